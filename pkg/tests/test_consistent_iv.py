import numpy as np
import pytest
from hypothesis import given

from regdae.consistent_iv import iv_for, iv_membership, iv_structure_predicates
from regdae.pencil import Pencil, block_factorize
from regdae.oracles import matched_distance

from conftest import regular_pencils


def test_example_iv(example):
    iv = iv_for(example)
    np.testing.assert_allclose(iv.basis.basis[:, 0], np.array([1.0, -2.0]) / np.sqrt(5), atol=1e-15)
    np.testing.assert_allclose(iv.generator_g, [[1.0]], atol=1e-14)
    np.testing.assert_allclose(iv.iso_k, [[1 / np.sqrt(5)]], atol=1e-15)
    # the coupling expressed in the standard coordinates is y = -2x
    dec = block_factorize(example).decomp
    lift = dec.conull_m0.basis + dec.null_m0.basis @ iv.coupling
    assert lift[1, 0] / lift[0, 0] == pytest.approx(-2.0)


def test_identity_m0_iv_is_everything():
    m1 = np.array([[1.0, 2.0], [0.0, 3.0]])
    iv = iv_for(Pencil(np.eye(2), m1))
    assert iv.dim == 2 and iv.coupling.shape == (0, 2)
    q = iv.basis.basis
    np.testing.assert_allclose(q @ iv.generator_g @ q.conj().T, m1, atol=1e-14)
    np.testing.assert_allclose(iv.iso_k.conj().T @ iv.iso_k, np.eye(2), atol=1e-14)


def test_c_zero_iv_is_conull():
    iv = iv_for(Pencil(np.diag([1.0, 0.0]), np.eye(2)))
    np.testing.assert_allclose(iv.coupling, [[0.0]], atol=1e-15)
    np.testing.assert_allclose(np.abs(iv.basis.basis[:, 0]), [1.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(iv.generator_g, [[1.0]], atol=1e-15)


def test_membership_examples(example):
    iv = iv_for(example)
    assert iv_membership(iv, [1.0, -2.0])
    assert not iv_membership(iv, [1.0, 0.0])
    assert iv_membership(iv, [0.0, 0.0])


def test_structure_predicates():
    f = block_factorize(Pencil(np.diag([1.0, 0.0]), np.eye(2)))
    p = iv_structure_predicates(f)
    assert (p.nbot_subset_iv, p.iv_meets_nbot_trivially) == (True, False)
    f = block_factorize(Pencil(np.diag([1.0, 0.0]), np.array([[3.0, 1.0], [2.0, 1.0]])))
    p = iv_structure_predicates(f)
    assert (p.nbot_subset_iv, p.iv_meets_nbot_trivially) == (False, True)
    f = block_factorize(Pencil(np.array([[1.0]]), np.array([[5.0]])))
    p = iv_structure_predicates(f)
    assert (p.nbot_subset_iv, p.iv_meets_nbot_trivially) == (True, True)


@given(regular_pencils(max_n=8))
def test_iv_invariants(p):
    f = block_factorize(p)
    iv = iv_for(p)
    assert iv.dim == f.rank
    m1n = np.linalg.norm(p.m1, 2)
    corange = f.decomp.corange_m0.basis
    for v in iv.basis.basis.T:
        assert np.linalg.norm(corange.conj().T @ p.m1 @ v) <= 1e-10 * m1n * np.linalg.norm(v)
    if iv.dim:
        a, g, k = f.reduced_generator_a, iv.generator_g, iv.iso_k
        assert np.linalg.norm(k @ (-g) - a @ k, 2) <= 1e-10 * np.linalg.norm(a, 2) * np.linalg.norm(k, 2) + 1e-14
        assert matched_distance(np.linalg.eigvals(-g), np.linalg.eigvals(a)) <= 1e-8
        assert np.linalg.svd(iv.m0_iv, compute_uv=False)[-1] > 0
        assert np.isfinite(iv.m0_iv_cond)


@given(regular_pencils(max_n=6))
def test_membership_agrees_with_definition(p):
    iv = iv_for(p)
    f = block_factorize(p)
    rng = np.random.default_rng(p.n)
    inside = iv.basis.embed(rng.standard_normal(iv.dim) + 0j)
    assert iv_membership(iv, inside)
    if f.decomp.null_m0.dim and f.rank < p.n:
        outside = inside + f.decomp.null_m0.basis[:, 0]
        assert not iv_membership(iv, outside)
