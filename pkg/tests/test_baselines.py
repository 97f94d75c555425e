import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import kron_lyapunov, match_spectrum, random_hurwitz
from spmor import baselines
from spmor.exceptions import InsufficientRank, PreconditionError, RegularizationWarning, TieWarning
from spmor.inner import projection_error
from spmor.kernels import definiteness
from spmor.lti import STABLE, LtiSystem, decompose
from spmor.simulate import exact_snapshots


def _reduced(sys, proj):
    return proj.Psi.T @ sys.A @ proj.Phi


@pytest.fixture(scope="module")
def snaps_1d():
    from spmor.benchmarks import example_1d

    ex = example_1d()
    return ex, exact_snapshots(ex.sys.A, ex.x0, 0.5, 11)


# POD

def test_pod_identity_snapshots():
    proj = baselines.pod_basis(np.eye(4), 2)
    # equal singular values: any two canonical vectors, up to sign
    P = np.abs(proj.Phi)
    assert np.allclose(np.sort(P.sum(0)), 1.0) and np.allclose((P > 0.5).sum(0), 1)
    np.testing.assert_allclose(proj.Phi.T @ proj.Phi, np.eye(2), atol=1e-14)


def test_pod_1d_eigenvalues(snaps_1d):
    ex, X = snaps_1d
    proj = baselines.pod_basis(X, 4)
    w = np.linalg.eigvals(_reduced(ex.sys, proj))
    want = [-6.9457, -0.4456, 0.0828 + 1.9679j, 0.0828 - 1.9679j]
    assert match_spectrum(w, want, 1e-3)


def test_pod_eckart_young(rng):
    Q, _ = np.linalg.qr(rng.standard_normal((5, 2)))
    X = Q @ np.diag([3.0, 1.0])  # two columns with singular values (3, 1)
    proj = baselines.pod_basis(X, 1)
    assert abs(projection_error(X, proj) - 1.0**2) <= 1e-12


def test_pod_rank_error():
    with pytest.raises(InsufficientRank):
        baselines.pod_basis(np.ones((3, 4)), 2)


# balanced truncation

def test_bt_scalar_gramians():
    e1 = np.array([[1.0], [0.0]])
    sys = LtiSystem(-np.eye(2), e1, e1.T)
    res = baselines.balanced_truncation(sys, 1)
    np.testing.assert_allclose(res.sigma1, [0.5], atol=1e-15)
    np.testing.assert_allclose(res.Xi, 0.5 * e1 @ e1.T, atol=1e-15)
    np.testing.assert_allclose(_reduced(sys, res.projector), [[-1.0]], atol=1e-14)


def test_bt_1d_stable_part(snaps_1d):
    ex, _ = snaps_1d
    bs = decompose(ex.sys).block(STABLE)
    res = baselines.balanced_truncation(LtiSystem(bs.A, bs.B, bs.C), 2)
    w = np.linalg.eigvals(_reduced(LtiSystem(bs.A), res.projector))
    assert match_spectrum(w, [-2.8663 + 1.8442j, -2.8663 - 1.8442j], 1e-3)


def test_bt_full_order_is_similarity(rng):
    A = random_hurwitz(rng, 5)
    sys = LtiSystem(A, rng.standard_normal((5, 2)), rng.standard_normal((2, 5)))
    res = baselines.balanced_truncation(sys, 5)
    assert match_spectrum(np.linalg.eigvals(_reduced(sys, res.projector)), np.linalg.eigvals(A), 1e-8)


def test_bt_gramians_against_kronecker(rng):
    A = random_hurwitz(rng, 4)
    B, C = rng.standard_normal((4, 1)), rng.standard_normal((1, 4))
    res = baselines.balanced_truncation(LtiSystem(A, B, C), 2)
    np.testing.assert_allclose(res.Xi, kron_lyapunov(A, C.T @ C, "primal"), rtol=1e-9, atol=1e-12)
    np.testing.assert_allclose(res.XiPrime, kron_lyapunov(A, B @ B.T, "dual"), rtol=1e-9, atol=1e-12)


def test_bt_requires_hurwitz(snaps_1d):
    ex, _ = snaps_1d
    with pytest.raises(PreconditionError):
        baselines.balanced_truncation(ex.sys, 4)


def test_bt_regularization_warning(rng):
    A = random_hurwitz(rng, 4)
    sys = LtiSystem(A, np.eye(4)[:, :1], np.eye(4)[:1])
    with pytest.warns(RegularizationWarning):
        baselines.balanced_truncation(sys, 3, epsilon=1e-4)


# BPOD

def _spectral_gap(a, b):
    a, b = np.sort_complex(a), np.sort_complex(b)
    return np.abs(a - b).max()


def test_bpod_converges_to_bt(snaps_1d):
    # equal-weight impulse snapshots are a left Riemann sum: first-order in dt
    ex, _ = snaps_1d
    bs = decompose(ex.sys).block(STABLE)
    sys = LtiSystem(bs.A, bs.B, bs.C)
    ref = np.linalg.eigvals(_reduced(sys, baselines.balanced_truncation(sys, 2).projector))
    errs = []
    for N, dt in [(2000, 0.01), (20000, 0.001)]:
        bp = baselines.bpod(sys, N, dt, 2)
        errs.append(_spectral_gap(np.linalg.eigvals(_reduced(sys, bp.projector)), ref))
    assert errs[1] <= 3e-3
    assert 5 <= errs[0] / errs[1] <= 20


def test_balance_wide_factors_match_gramians(rng):
    from spmor.inner import inner_product_balance

    R = rng.standard_normal((4, 300))
    S = rng.standard_normal((4, 500))
    res = inner_product_balance(R, S, 2)
    ref = np.linalg.svd(np.linalg.cholesky(R @ R.T).T @ np.linalg.cholesky(S @ S.T), compute_uv=False)
    np.testing.assert_allclose(res.sigma1, ref[:2], rtol=1e-10)
    np.testing.assert_allclose(res.Psi.T @ res.Phi, np.eye(2), atol=1e-10)


def test_bpod_1d_eigenvalues(snaps_1d):
    ex, _ = snaps_1d
    res = baselines.bpod(ex.sys, 11, 0.5, 4)
    w = np.linalg.eigvals(_reduced(ex.sys, res.projector))
    want = [-2.8850 + 0.5713j, -2.8850 - 0.5713j, -0.0063 + 2.0060j, -0.0063 - 2.0060j]
    assert match_spectrum(w, want, 1e-2)


def test_bpod_zero_input():
    sys = LtiSystem(-np.eye(3), np.zeros((3, 1)), np.ones((1, 3)))
    with pytest.raises(InsufficientRank):
        baselines.bpod(sys, 5, 0.1, 1)


def test_bpod_gramians_semidefinite(snaps_1d):
    ex, _ = snaps_1d
    res = baselines.bpod(ex.sys, 11, 0.5, 4)
    assert definiteness(res.Xi) in ("SPD", "SPSD")
    assert definiteness(res.XiPrime) in ("SPD", "SPSD")


def test_impulse_snapshots_exact():
    S = baselines.impulse_snapshots(-np.eye(1), np.ones((1, 1)), 4, 0.5)
    np.testing.assert_allclose(S, [np.exp(-0.5 * np.arange(4))], rtol=1e-14)


# SRSB

def test_srsb_zero_shift_equals_bt(rng):
    A = random_hurwitz(rng, 5)
    sys = LtiSystem(A, rng.standard_normal((5, 1)), rng.standard_normal((1, 5)))
    a = baselines.srsb(sys, 0.0, 0.0, 2)
    b = baselines.balanced_truncation(sys, 2)
    np.testing.assert_allclose(_reduced(sys, a.projector), _reduced(sys, b.projector), atol=1e-12)


def test_srsb_two_state_example():
    # Kronecker oracle: shifted Gramians equal [[1/2, 1/4], [1/4, 1/6]]
    A = np.diag([1.0, -1.0])
    B = np.ones((2, 1))
    sys = LtiSystem(A, B, B.T)
    As = A - 2 * np.eye(2)
    W = kron_lyapunov(As, B @ B.T, "dual")
    np.testing.assert_allclose(W, [[1 / 2, 1 / 4], [1 / 4, 1 / 6]], atol=1e-14)
    v = np.linalg.eigh(W)[1][:, -1]
    expected = v @ A @ v
    res = baselines.srsb(sys, 2.0, 0.0, 1)
    Ar = _reduced(sys, res.projector)
    np.testing.assert_allclose(Ar, [[expected]], atol=1e-12)
    assert abs(Ar[0, 0] - 0.5547) <= 1e-3
    assert Ar[0, 0] > 0


def test_srsb_shift_must_stabilize():
    sys = LtiSystem(np.diag([1.0, -1.0]), np.ones((2, 1)), np.ones((1, 2)))
    with pytest.raises(PreconditionError):
        baselines.srsb(sys, 0.5, 0.0, 1)


@pytest.mark.xfail(reason="SRSB eigenvalues at mu=0.01, eps=0 differ from the reference by ~9e-3; see decisions ledger",
                   strict=True)
def test_srsb_1d_eigenvalues(snaps_1d):
    ex, _ = snaps_1d
    res = baselines.srsb(ex.sys, 0.01, 0.0, 4)
    w = np.linalg.eigvals(_reduced(ex.sys, res.projector))
    want = [-0.0008 + 0.9999j, -0.0008 - 0.9999j, 0.0002 + 2.0002j, 0.0002 - 2.0002j]
    assert match_spectrum(w, want, 1e-3)


def test_all_methods_biorthogonal(snaps_1d):
    ex, X = snaps_1d
    bs = decompose(ex.sys).block(STABLE)
    projs = [
        baselines.pod_basis(X, 4),
        baselines.balanced_truncation(LtiSystem(bs.A, bs.B, bs.C), 2).projector,
        baselines.bpod(ex.sys, 11, 0.5, 4).projector,
        baselines.srsb(ex.sys, 0.01, 0.0, 4).projector,
    ]
    for p in projs:
        np.testing.assert_allclose(p.Psi.T @ p.Phi, np.eye(p.k), atol=1e-9)


# property

@settings(max_examples=50, deadline=None)
@given(n=st.integers(2, 10), seed=st.integers(0, 2**32 - 1), data=st.data())
def test_srsb_zero_shift_property(n, seed, data):
    k = data.draw(st.integers(1, n))
    rng = np.random.default_rng(seed)
    A = random_hurwitz(rng, n)
    sys = LtiSystem(A, rng.standard_normal((n, 2)), rng.standard_normal((2, n)))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TieWarning)
        a = baselines.srsb(sys, 0.0, 0.0, k)
        b = baselines.balanced_truncation(sys, k)
    Aa, Ab = _reduced(sys, a.projector), _reduced(sys, b.projector)
    assert np.linalg.norm(Aa - Ab) <= 1e-9 * max(np.linalg.norm(Ab), 1.0)
