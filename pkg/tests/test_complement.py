import numpy as np
import pytest

from copcomp.complement import (
    FAIL,
    PASS,
    ComplementError,
    align_factorizations,
    check_assumptions,
    decompose_dual,
    embed,
    positive_factorization,
    restrict,
)
from copcomp.paperlab import (
    build_extremal5,
    build_pp3z_jjj,
    build_pp4z_j,
    build_s4,
)
from copcomp.symcore import Tolerances
from copcomp.zerostruct import compute_zero_structure

TOL = Tolerances()
RNG = np.random.default_rng(20240822)


def test_restrict_embed_roundtrip():
    x = RNG.standard_normal((4, 4))
    x = 0.5 * (x + x.T)
    support = (0, 2, 3)
    w = restrict(x, support)
    assert w.shape == (3, 3)
    back = embed(w, support, 4)
    assert np.allclose(restrict(back, support), w)
    assert back[1, :].sum() == 0.0 and back[:, 1].sum() == 0.0


def test_restrict_worked_example_blocks():
    x = build_s4()["x"]
    expect = np.array([[1.0, -1.0], [-1.0, 1.0]])
    assert np.allclose(restrict(x, (0, 1)), expect)
    assert np.allclose(restrict(x, (1, 2)), expect)


def test_embed_order_mismatch():
    with pytest.raises(ValueError):
        embed(np.eye(2), (0, 1, 2), 4)


def test_trace_identity():
    x = build_s4()["x"]
    w = RNG.standard_normal((2, 2))
    w = 0.5 * (w + w.T)
    support = (1, 2)
    assert np.isclose(float(np.tensordot(x, embed(w, support, 3))),
                      float(np.tensordot(restrict(x, support), w)))


def test_decompose_worked_example():
    data = build_s4()
    zs = compute_zero_structure(data["x"], TOL)
    dd = decompose_dual(data["u"], zs, TOL)
    assert dd.residual <= 1e-12
    assert dd.unique
    assert np.allclose(dd.total(), data["u"], atol=1e-10)
    by_support = {ps: c for ps, c in zip(zs.supports, dd.components)}
    assert np.linalg.norm(by_support[(0, 1)]
                          - np.outer(data["b"], data["b"])) <= 1e-10
    assert np.linalg.norm(by_support[(1, 2)]
                          - np.outer(data["c"], data["c"])) <= 1e-10
    # support condition: components vanish off their blocks
    for ps, c in zip(zs.supports, dd.components):
        mask = np.ones(3, dtype=bool)
        mask[list(ps)] = False
        assert np.all(c[mask, :] == 0.0) and np.all(c[:, mask] == 0.0)


def test_decompose_zero_dual():
    zs = compute_zero_structure(build_s4()["x"], TOL)
    dd = decompose_dual(np.zeros((3, 3)), zs, TOL)
    assert all(np.linalg.norm(c) <= 1e-12 for c in dd.components)


def test_decompose_rejects_non_complementary():
    zs = compute_zero_structure(build_s4()["x"], TOL)
    with pytest.raises(ComplementError):
        decompose_dual(np.eye(3), zs, TOL)


def test_decompose_empty_zero_set():
    zs = compute_zero_structure(np.eye(3), TOL)
    dd = decompose_dual(np.zeros((3, 3)), zs, TOL)
    assert dd.components == []
    with pytest.raises(ComplementError):
        decompose_dual(np.ones((3, 3)) * 1e-3, zs, TOL)


def test_decompose_single_block_component_is_whole_dual():
    data = build_extremal5()
    zs = compute_zero_structure(data["x"], TOL)
    dd = decompose_dual(data["u"], zs, TOL)
    assert len(dd.components) == 1
    assert np.linalg.norm(dd.components[0] - data["u"]) <= 1e-8


def test_rank_one_component_beyond_pair_generators():
    # U = (e2+e3+e4)(e2+e3+e4)': representable only with the full subset sum
    data = build_pp4z_j()
    zs = compute_zero_structure(data["x"], TOL)
    dd = decompose_dual(data["u"], zs, TOL)
    assert dd.residual <= 1e-10
    assert np.allclose(dd.restricted[0], np.ones((3, 3)), atol=1e-10)
    combo = max(dd.coefficients[0], key=dd.coefficients[0].get)
    assert len(combo) == 3


def test_assumption_report_worked_example():
    data = build_s4()
    zs = compute_zero_structure(data["x"], TOL)
    dd = decompose_dual(data["u"], zs, TOL)
    rep = check_assumptions(data["x"], data["u"], zs, dd, TOL)
    for name in ("j", "jj", "jjj", "cond_i", "cond_ii", "cond_iii"):
        assert getattr(rep, name).status == PASS, name
    # positive pair-generator weights certify strict complementarity
    assert all(b["gamma"] >= 1e-6 for b in rep.j.certificate["blocks"])


def test_assumption_j_fails_without_range_condition():
    data = build_pp4z_j()
    zs = compute_zero_structure(data["x"], TOL)
    dd = decompose_dual(data["u"], zs, TOL)
    rep = check_assumptions(data["x"], data["u"], zs, dd, TOL)
    assert rep.j.status == FAIL
    blk = rep.j.certificate["blocks"][0]
    assert blk["rank_w"] == 1 and blk["rank_tau"] == 3


def test_assumption_jjj_certificate_names_offenders():
    data = build_pp3z_jjj()
    zs = compute_zero_structure(data["x"], TOL)
    dd = decompose_dual(data["u"], zs, TOL)
    rep = check_assumptions(data["x"], data["u"], zs, dd, TOL)
    assert rep.jjj.status == FAIL
    off = rep.jjj.certificate["offending"][0]
    assert off["contact_set"] == [1, 2, 3]
    assert off["support"] == [1, 2]


def test_check_assumptions_rejects_non_complementary_pair():
    data = build_s4()
    zs = compute_zero_structure(data["x"], TOL)
    dd = decompose_dual(data["u"], zs, TOL)
    with pytest.raises(ComplementError):
        check_assumptions(data["x"], np.eye(3), zs, dd, TOL)


def test_positive_factorization_rank_one():
    w = np.array([[1.0, 1.0], [1.0, 1.0]])
    m = positive_factorization(w, [np.array([0.5, 0.5])], TOL)
    assert m is not None
    assert np.min(m) > 0.0
    assert np.linalg.norm(m @ m.T - w) <= 1e-9


def test_positive_factorization_needs_theta_shift():
    w = np.array([[2.0, 1.0], [1.0, 2.0]])
    taus = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
    m = positive_factorization(w, taus, TOL)
    assert m is not None
    assert np.min(m) > 0.0
    assert np.linalg.norm(m @ m.T - w) <= 1e-9


def test_positive_factorization_unavailable_for_identity():
    taus = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
    assert positive_factorization(np.eye(2), taus, TOL) is None


def test_positive_factorization_rejects_indefinite():
    with pytest.raises(ValueError):
        positive_factorization(np.diag([1.0, -1.0]),
                               [np.array([0.5, 0.5])], TOL)


def test_align_identity_and_permutation():
    b = RNG.standard_normal((4, 3))
    omega, bp, mp = align_factorizations(b, b, TOL)
    assert np.allclose(omega, np.eye(3), atol=1e-8)
    m = b[:, [2, 0, 1]]
    omega, bp, mp = align_factorizations(b, m, TOL)
    assert np.linalg.norm(bp @ omega - mp) <= 1e-8
    assert np.allclose(np.abs(omega), np.eye(3)[[2, 0, 1]].T, atol=1e-8)


def test_align_recovers_random_rotation():
    for _ in range(5):
        b = RNG.standard_normal((4, 3))
        q, _ = np.linalg.qr(RNG.standard_normal((3, 3)))
        omega, bp, mp = align_factorizations(b, b @ q, TOL)
        assert np.linalg.norm(bp @ omega - mp) <= 1e-8
        assert np.linalg.norm(omega.T @ omega - np.eye(3)) <= 1e-10


def test_align_pads_unequal_widths():
    b = np.array([[1.0, 1.0], [1.0, -1.0]])
    m = np.hstack([b, np.zeros((2, 1))])  # same Gram, wider
    out = align_factorizations(b, m, TOL)
    assert out is not None
    omega, bp, mp = out
    assert bp.shape == mp.shape == (2, 3)
    assert np.linalg.norm(bp @ omega - mp) <= 1e-8


def test_align_rejects_different_grams():
    assert align_factorizations(np.eye(2), 2.0 * np.eye(2), TOL) is None


def test_derived_conditions_follow_from_j_and_jj():
    # whenever j and jj PASS, conditions i-iii PASS (across the corpus)
    from copcomp.paperlab import SCENARIOS

    for name in ("s4", "pp3z-jjj", "pp4z-jjj"):
        data = SCENARIOS[name].build()
        zs = compute_zero_structure(data["x"], TOL)
        dd = decompose_dual(data["u"], zs, TOL)
        rep = check_assumptions(data["x"], data["u"], zs, dd, TOL)
        if rep.j.status == PASS and rep.jj.status == PASS:
            assert rep.cond_i.status == PASS
            assert rep.cond_ii.status == PASS
            assert rep.cond_iii.status == PASS
