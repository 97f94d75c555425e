"""Plain-text matrix files.

First line ``rows cols``, then one whitespace-separated row per line with
17 significant digits, which round-trips float64 exactly.
"""

import numpy as np

from .exceptions import ContractViolation


def write_matrix(path, M):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    with open(path, "w") as fh:
        fh.write(f"{M.shape[0]} {M.shape[1]}\n")
        for row in M:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def read_matrix(path):
    with open(path) as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines:
        raise ContractViolation(f"{path}: empty matrix file")
    try:
        rows, cols = (int(v) for v in lines[0].split())
    except ValueError as exc:
        raise ContractViolation(f"{path}:1: header must be 'rows cols'") from exc
    if len(lines) - 1 != rows:
        raise ContractViolation(f"{path}: header says {rows} rows, found {len(lines) - 1}")
    M = np.empty((rows, cols))
    for i, ln in enumerate(lines[1:]):
        vals = ln.split()
        if len(vals) != cols:
            raise ContractViolation(f"{path}:{i + 2}: expected {cols} entries, found {len(vals)}")
        try:
            M[i] = [float(v) for v in vals]
        except ValueError as exc:
            raise ContractViolation(f"{path}:{i + 2}: {exc}") from exc
    return M
