import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st

from regdae.consistent_iv import iv_for
from regdae.errors import InconsistentInitialValue, InvalidGrid, Overflow
from regdae.pencil import block_factorize, reversed_pencil
from regdae.solvers import (
    duality_check,
    expm,
    expm_batch,
    integrated_identity_residual,
    solve_backward,
    solve_mild,
    solve_strong,
)

from conftest import regular_pencils

T5 = np.linspace(0.0, 5.0, 51)


def test_expm_examples():
    np.testing.assert_array_equal(expm(np.zeros((3, 3)), 7.0).value, np.eye(3))
    np.testing.assert_allclose(expm(np.diag([-1.0, 2.0])).value, np.diag([np.exp(-1), np.exp(2)]), rtol=1e-14)
    np.testing.assert_allclose(expm(np.array([[0.0, 1.0], [0.0, 0.0]])).value, [[1, 1], [0, 1]], atol=1e-15)


def test_expm_eig_path():
    a = np.array([[-1.0, 3.0], [0.0, 2.0]])
    r = expm(a, 1.5, method="auto")
    assert r.method == "eig"
    np.testing.assert_allclose(r.value, scipy.linalg.expm(1.5 * a), rtol=1e-13)
    # a Jordan block is not diagonalizable and falls back to Pade
    assert expm(np.array([[1.0, 1.0], [0.0, 1.0]]), method="auto").method == "pade"


def test_expm_overflow():
    with pytest.raises(Overflow):
        expm(np.array([[800.0]]))


@given(st.integers(1, 6), st.integers(0, 10**6), st.floats(0.01, 50.0))
def test_expm_matches_scipy(n, seed, norm):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    a *= norm / np.linalg.norm(a, 2)
    a -= (np.max(np.linalg.eigvals(a).real) + 1.0) * np.eye(n)  # keep exp(a) representable
    ours = expm(a).value
    ref = scipy.linalg.expm(a)
    assert np.linalg.norm(ours - ref) <= 1e-12 * max(np.linalg.norm(ref), 1e-300) * max(1.0, norm)


def test_expm_batch_mixed_norms():
    a = np.stack([np.zeros((2, 2)), np.diag([-30.0, 1.0]), np.array([[0.0, 1e-3], [0.0, 0.0]])])
    vals, s = expm_batch(a)
    for k in range(3):
        np.testing.assert_allclose(vals[k], scipy.linalg.expm(a[k]), rtol=1e-13, atol=1e-300)
    assert s[0] == 0 and s[1] > 0


def test_strong_examples(example, scalar):
    traj = solve_strong(iv_for(scalar), [1.0], T5)
    np.testing.assert_allclose(traj.states[:, 0], np.exp(-T5), rtol=1e-13)
    traj = solve_strong(iv_for(example), [1.0, -2.0], T5)
    np.testing.assert_allclose(traj.states, np.exp(-T5)[:, None] * [1.0, -2.0], rtol=1e-13, atol=1e-300)
    with pytest.raises(InconsistentInitialValue, match="projection onto IV"):
        solve_strong(iv_for(example), [1.0, 0.0], T5)


def test_mild_example(example):
    f, iv = block_factorize(example), iv_for(example)
    traj = solve_mild(f, iv, [1.0, 0.0], T5, check=True)
    expected = np.exp(-T5)[:, None] * np.array([1.0, -2.0])
    np.testing.assert_allclose(traj.states[1:], expected[1:], rtol=1e-13)
    np.testing.assert_array_equal(traj.states[0], [1.0, 0.0])
    np.testing.assert_array_equal(traj.jump[0], [1.0, 0.0])
    np.testing.assert_allclose(traj.jump[1], [1.0, -2.0], atol=1e-15)
    assert np.max(integrated_identity_residual(f, [1.0, 0.0], T5)) <= 1e-10


def test_mild_null_space_data_vanishes(example):
    traj = solve_mild(block_factorize(example), iv_for(example), [0.0, 1.0], T5)
    assert np.all(traj.states[1:] == 0)


def test_backward_examples(scalar, example):
    rev = reversed_pencil(scalar)
    w = solve_backward(block_factorize(rev), iv_for(rev), [1.0], T5)
    np.testing.assert_allclose(w.states[:, 0], np.exp(T5), rtol=1e-13)
    rev = reversed_pencil(example)
    w = solve_backward(block_factorize(rev), iv_for(rev), [0.0, 1.0], T5)
    assert np.all(w.states[1:] == 0)
    twice = reversed_pencil(rev)
    fwd = solve_mild(block_factorize(example), iv_for(example), [1.0, 0.5], T5)
    again = solve_backward(block_factorize(twice), iv_for(twice), [1.0, 0.5], T5)
    np.testing.assert_allclose(again.states, fwd.states, atol=1e-10)


def test_duality_examples(scalar, example):
    assert duality_check(scalar, [1.0], 1.0, 33) <= 1e-14
    assert duality_check(example, [1.0, 0.0], 2.0, 64) <= 1e-9
    assert duality_check(example, [0.0, 1.0], 2.0, 64) == 0.0


def test_invalid_grids(example):
    iv = iv_for(example)
    with pytest.raises(InvalidGrid):
        solve_strong(iv, [1.0, -2.0], [0.5, 1.0])
    with pytest.raises(InvalidGrid):
        solve_strong(iv, [1.0, -2.0], [0.0, 2.0, 1.0])


@given(regular_pencils(max_n=6), st.integers(0, 10**6))
def test_strong_residual_and_invariance(p, seed):
    iv = iv_for(p)
    f = block_factorize(p)
    if iv.dim == 0:
        return
    rng = np.random.default_rng(seed)
    u0 = iv.basis.embed(rng.standard_normal(iv.dim) + 1j * rng.standard_normal(iv.dim))
    u = solve_strong(iv, u0, T5).states
    q, g = iv.basis.basis, iv.generator_g
    du = (u @ q.conj()) @ (-g).T @ q.T
    m1n = np.linalg.norm(p.m1, 2)
    norms = np.linalg.norm(u, axis=1)
    assert np.all(np.linalg.norm(du @ p.m0.T + u @ p.m1.T, axis=1) <= 1e-9 * m1n * norms)
    dist = np.linalg.norm(u - u @ iv.basis.projector().T, axis=1)
    assert np.all(dist <= 1e-9 * norms)
    assert f.rank == iv.dim


@given(regular_pencils(max_n=6), st.integers(0, 10**6))
def test_mild_properties(p, seed):
    f, iv = block_factorize(p), iv_for(p)
    rng = np.random.default_rng(seed)
    u0 = rng.standard_normal(p.n) + 1j * rng.standard_normal(p.n)
    t = np.linspace(0.0, 3.0, 7)
    traj = solve_mild(f, iv, u0, t)
    res = integrated_identity_residual(f, u0, t)
    assert np.max(res) <= 1e-7 * (1 + np.linalg.norm(u0))
    # M0 u(0+) = M0 u0 and the algebraic constraint holds for t > 0
    assert np.linalg.norm(p.m0 @ (traj.jump[1] - u0)) <= 1e-10 * max(1.0, np.linalg.norm(u0))
    corange = f.decomp.corange_m0.basis
    defect = np.linalg.norm(traj.states[1:] @ p.m1.T @ corange.conj(), axis=1)
    assert np.all(defect <= 1e-10 * np.linalg.norm(p.m1, 2) * (1 + np.linalg.norm(traj.states[1:], axis=1)))


@given(regular_pencils(max_n=6), st.floats(0, 5), st.floats(0, 5))
def test_semigroup_law(p, s, t):
    g = iv_for(p).generator_g
    if g.size == 0:
        return
    lhs = expm(-g, s + t).value
    rhs = expm(-g, s).value @ expm(-g, t).value
    assert np.linalg.norm(lhs - rhs) <= 1e-10 * max(1.0, np.linalg.norm(lhs))


@given(regular_pencils(max_n=6), st.integers(0, 10**6))
def test_mild_equals_strong_on_iv(p, seed):
    f, iv = block_factorize(p), iv_for(p)
    if iv.dim == 0:
        return
    rng = np.random.default_rng(seed)
    u0 = iv.basis.embed(rng.standard_normal(iv.dim) + 0j)
    mild = solve_mild(f, iv, u0, T5, check=True)
    strong = solve_strong(iv, u0, T5)
    assert np.max(np.abs(mild.states - strong.states)) <= 1e-9 * max(1.0, mild.max_norm())


@given(regular_pencils(max_n=6), st.integers(0, 10**6))
def test_duality_property(p, seed):
    rng = np.random.default_rng(seed)
    u0 = rng.standard_normal(p.n) + 1j * rng.standard_normal(p.n)
    t = np.linspace(0.0, 2.0, 64)
    u = solve_mild(block_factorize(p), iv_for(p), u0, t)
    assert duality_check(p, u0, 2.0, 64) <= 1e-8 * u.max_norm()
