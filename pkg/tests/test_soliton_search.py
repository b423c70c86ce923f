from fractions import Fraction

import numpy as np
import pytest

from solvpinch import fixtures as fx
from solvpinch import lie_core as lc
from solvpinch import soliton_search as ss
from solvpinch.almost_abelian import AAData, F_aa, bracket_of, comm
from solvpinch.errors import DegenerateError, FlatMetricError, MalformedInputError, PreconditionError
from solvpinch.soliton_search import BetaType, FlowConfig
from oracles import E, random_orthogonal

E12 = np.array([[0.0, 1.0], [0.0, 0.0]])
JORDAN = np.array([[1.0, 1.0], [0.0, 1.0]])
HEIS_TYPE = BetaType.from_values([-1.0, -1.0, 1.0])


def _charpoly_drift(A0, A1):
    p0, p1 = np.poly(A0), np.poly(A1)
    return np.max(np.abs(p1 - p0)) / max(1.0, np.max(np.abs(p0)))


# ---------------------------------------------------------------- config

@pytest.mark.parametrize("kw", [{"step": 0.0}, {"max_iter": 0}, {"grad_tol": -1.0}, {"normalization": "x"}])
def test_flow_config_validation(kw):
    with pytest.raises(MalformedInputError):
        FlowConfig(**kw)


def test_flow_result_to_dict_is_json_ready():
    import json

    res = ss.double_bracket_flow(AAData(np.diag([1.0, 2.0])))
    d = res.to_dict()
    assert json.loads(json.dumps(d))["final"] == [[1.0, 0.0], [0.0, 2.0]]


# ---------------------------------------------------------------- ascent flow

def test_ascent_jordan_leaves_orbit():
    res = ss.ascent_flow(AAData(JORDAN))
    assert not res.converged
    assert res.F_trace[-1] > 3 - 1e-3
    assert np.all(np.diff(res.F_trace) >= -1e-12)


def test_ascent_nilsoliton_is_fixed():
    res = ss.ascent_flow(AAData(E12))
    assert res.converged and res.iterations == 0
    assert np.array_equal(res.final, E12)


@pytest.mark.parametrize("seed", range(3))
def test_ascent_recovers_normal_value(seed):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((2, 2)) + 2 * np.eye(2)
    A = g @ np.diag([1.0, 2.0]) @ np.linalg.inv(g)
    res = ss.ascent_flow(AAData(A))
    assert res.converged
    assert res.F_trace[-1] == pytest.approx(F_aa(np.diag([1.0, 2.0])), abs=1e-6)
    assert np.all(np.diff(res.F_trace) >= -1e-12)
    assert _charpoly_drift(A, res.final) < 1e-6


def test_ascent_flat_aborts():
    with pytest.raises(FlatMetricError):
        ss.ascent_flow(AAData(np.array([[0.0, -1.0], [1.0, 0.0]])))


# ---------------------------------------------------------------- double-bracket flow

def test_double_bracket_semisimple_start():
    A = np.array([[1.0, 1.0], [0.0, 2.0]])
    res = ss.double_bracket_flow(AAData(A))
    assert res.converged
    final = res.final
    assert np.linalg.norm(comm(final, final.T)) < 1e-8
    assert np.allclose(np.sort(np.linalg.eigvals(final).real), [1.0, 2.0], atol=1e-6)
    assert np.all(np.diff(res.trace) <= 1e-15)


def test_double_bracket_normal_is_fixed():
    A = np.diag([1.0, -3.0])
    res = ss.double_bracket_flow(AAData(A))
    assert res.converged and res.iterations == 0


def test_double_bracket_rank_one_nilpotent():
    res = ss.double_bracket_flow(AAData(E12), FlowConfig(max_iter=200))
    assert not res.converged
    final = res.final
    r = np.linalg.norm(comm(final, final.T)) / np.sum(final * final)
    assert r == pytest.approx(np.sqrt(2), rel=1e-9)
    assert np.linalg.norm(final) < 1.0


@pytest.mark.parametrize("seed", range(5))
def test_double_bracket_does_not_decrease_F(seed):
    rng = np.random.default_rng(seed)
    D = np.diag(rng.uniform(-2, 2, 3))
    g = rng.standard_normal((3, 3)) + 3 * np.eye(3)
    A = g @ D @ np.linalg.inv(g)
    res = ss.double_bracket_flow(AAData(A))
    assert res.converged
    assert F_aa(res.final) >= F_aa(A) - 1e-9
    assert _charpoly_drift(A, res.final) < 1e-6


# ---------------------------------------------------------------- nilsoliton search and beta

def test_nilsoliton_heis_immediate():
    res = ss.nilsoliton_find(fx.heis())
    assert res.converged and res.iterations == 0
    ric = lc.ricci(lc.MetricLieAlgebra(res.final)).ric
    assert np.allclose(ric / -ric[0, 0] * 0.5, np.diag([-0.5, -0.5, 0.5]), atol=1e-12)


def test_nilsoliton_requires_nilpotent_and_nonflat():
    with pytest.raises(PreconditionError):
        ss.nilsoliton_find(fx.hyp(3))
    with pytest.raises(FlatMetricError):
        ss.nilsoliton_find(fx.abelian(4))


@pytest.mark.parametrize("seed", range(2))
def test_nilsoliton_from_moved_heis(seed):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((3, 3)) + 3 * np.eye(3)
    res = ss.nilsoliton_find(fx.heis().act(g))
    assert res.converged
    bt = ss.beta_from_nilsoliton(lc.MetricLieAlgebra(res.final), 1e-6)
    assert np.allclose(bt.b, [-1, -1, 1], atol=1e-6)
    assert np.all(np.diff(res.F_trace) >= -1e-12)


def test_nilsoliton_mu4_type():
    res = ss.nilsoliton_find(fx.table1_bracket("mu4"))
    assert res.converged
    bt = ss.beta_from_nilsoliton(lc.MetricLieAlgebra(res.final), 1e-6)
    assert np.allclose(bt.b, [-0.5, -0.5, -0.5, -0.5, 1.0], atol=1e-6)


@pytest.mark.parametrize(
    "mu, b, q",
    [(fx.heis(), (-1, -1, 1), Fraction(1, 3)),
     (fx.table1_bracket("mu7"), (-1, -1, 0, 0, 1), Fraction(1, 3)),
     (fx.table1_bracket("mu4"), (Fraction(-1, 2),) * 4 + (1,), Fraction(1, 2))],
    ids=["heis", "mu7", "mu4"],
)
def test_beta_examples(mu, b, q):
    bt = ss.beta_from_nilsoliton(mu)
    assert np.allclose(bt.b, [float(x) for x in b], atol=1e-12)
    assert bt.q == pytest.approx(float(q), abs=1e-12)
    assert bt.rational() == tuple(Fraction(x) for x in b)


def test_beta_rejects_non_soliton():
    mu = fx.from_differentials(4, [[], [], [(1.0, 1, 2)], [(3.0, 1, 3)]])
    with pytest.raises(PreconditionError):
        ss.beta_from_nilsoliton(mu)


def test_beta_type_all_zero():
    with pytest.raises(DegenerateError):
        BetaType.from_values([0.0, 0.0])


@pytest.mark.parametrize(
    "b, nsq, ok",
    [((-1, -1, 0, 0, 1), 3.0, True), ((-0.5, -0.5, -0.5, -0.5, 1), 2.0, True), ((-1, 0), 1.0, False)],
)
def test_type_invariants(b, nsq, ok):
    rep = ss.type_invariants_check(BetaType.from_values(b))
    assert rep.passed is ok
    assert rep.norm_sq == pytest.approx(nsq)


def test_pinching_bound_examples():
    mu7 = ss.beta_from_nilsoliton(fx.table1_bracket("mu7"))
    assert ss.pinching_bound(6, 5, mu7) == pytest.approx(4 / 3)
    assert ss.pinching_bound(3, 3, HEIS_TYPE) == pytest.approx(1 / 3)
    assert ss.pinching_bound(5, 4) == 1.0
    with pytest.raises(PreconditionError):
        ss.pinching_bound(3, 4)


def test_beta_sigma():
    assert np.allclose(ss.beta_sigma(HEIS_TYPE, 4), np.diag([-3.0, -1.0, -1.0, 1.0]))
    assert np.allclose(ss.beta_sigma(HEIS_TYPE, 3), np.diag([-1.0, -1.0, 1.0]))
    with pytest.raises(PreconditionError):
        ss.beta_sigma(None, 4)


@pytest.mark.parametrize("name", ["mu3", "mu4", "mu5", "mu7", "mu8"])
def test_beta_consistency_with_F(name):
    # F of a nilsoliton equals 1/|beta|^2
    res = ss.nilsoliton_find(fx.table1_bracket(name))
    lam = lc.MetricLieAlgebra(res.final)
    bt = ss.beta_from_nilsoliton(lam, 1e-6)
    assert ss.type_invariants_check(bt, 1e-6).passed
    assert ss.pinching_bound(bt.m, bt.m, bt) == pytest.approx(lc.pinching_F(lam), abs=1e-6)


# ---------------------------------------------------------------- unimodular checks

def test_verify_unimodular_heis():
    rep = ss.solvsoliton_verify_unimodular(fx.heis(), [0, 1, 2], HEIS_TYPE)
    assert rep.passed and rep.scal_N == pytest.approx(-0.5)


def test_verify_unimodular_scale_invariant():
    rep = ss.solvsoliton_verify_unimodular(fx.heis().scaled(3.0), [0, 1, 2], HEIS_TYPE)
    assert rep.passed


def test_verify_unimodular_failures():
    rng = np.random.default_rng(1)
    A = rng.standard_normal((3, 3))
    A -= np.trace(A) / 3 * np.eye(3)
    mu = bracket_of(A)
    rep = ss.solvsoliton_verify_unimodular(mu, [0, 1, 2], BetaType.from_values([-1.0, -1.0, 1.0]))
    assert not rep.passed
    assert ss.solvsoliton_verify_unimodular(fx.abelian(3), [0, 1, 2], HEIS_TYPE).skipped
    with pytest.raises(MalformedInputError):
        ss.solvsoliton_verify_unimodular(fx.heis(), [0, 0, 1], HEIS_TYPE)
    with pytest.raises(PreconditionError):
        ss.solvsoliton_verify_unimodular(fx.hyp(3), [0, 1], HEIS_TYPE)


def test_ebeta_pairing_heis():
    pairing, rep = ss.ebeta_pairing(fx.heis(), [0, 1, 2], HEIS_TYPE)
    assert pairing == pytest.approx(0.0, abs=1e-12)
    assert rep.passed


def test_ebeta_pairing_abelian_nilradical():
    pairing, _ = ss.ebeta_pairing(bracket_of(np.diag([1.0, -1.0])), [0, 1], None)
    assert pairing >= 0


def _heis_extension(D):
    """R e4 acting on heis_3 by the derivation D (columns are images of e1, e2, e3)."""
    c = np.zeros((4, 4, 4))
    c[0, 1, 2], c[1, 0, 2] = 1, -1
    c[3, :3, :3] = D.T
    c[:3, 3, :3] = -D.T
    return lc.MetricLieAlgebra(c)


HEIS_BETA = BetaType.from_values([-1.0, -1.0, 1.0], np.diag([-1.0, -1.0, 1.0]))


@pytest.mark.parametrize("seed", range(5))
def test_ebeta_pairing_strict_for_random(seed):
    rng = np.random.default_rng(seed)
    x, y, z, u, v = rng.standard_normal(5)
    D = np.array([[x, y, 0.0], [z, -x, 0.0], [u, v, 0.0]])
    mu = _heis_extension(D)
    assert lc.is_unimodular(mu)
    pairing, rep = ss.ebeta_pairing(mu, [0, 1, 2], HEIS_BETA)
    assert pairing > 1e-6 and rep is None
    # dropping the part that fails to commute with beta gives the equality case
    D[2, :2] = 0.0
    pairing, rep = ss.ebeta_pairing(_heis_extension(D), [0, 1, 2], HEIS_BETA)
    assert abs(pairing) < 1e-12 and rep.passed


@pytest.mark.parametrize("seed", range(5))
def test_ebeta_pairing_vanishes_for_unimodular_almost_abelian(seed):
    # with abelian nilradical and beta_+ = I the pairing is -(tr A)^2
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((3, 3))
    A -= np.trace(A) / 3 * np.eye(3)
    pairing, rep = ss.ebeta_pairing(bracket_of(A), [0, 1, 2], None)
    assert abs(pairing) < 1e-12 and rep.passed


def test_norm_estimate_heis_equality():
    rep = ss.norm_estimate_check(fx.heis(), 3, 3, HEIS_TYPE)
    assert rep.equality and rep.is_solvsoliton and rep.consistent


@pytest.mark.parametrize("seed", range(5))
def test_norm_estimate_random_strict(seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((3, 3))
    A -= np.trace(A) / 3 * np.eye(3)
    rep = ss.norm_estimate_check(bracket_of(A), 4, 3, None)
    assert rep.holds and rep.F_below_bound and not rep.equality and rep.consistent


def test_norm_estimate_normal_equality():
    rep = ss.norm_estimate_check(bracket_of(np.diag([1.0, -1.0])), 3, 2, None)
    assert rep.equality and rep.is_solvsoliton


# ---------------------------------------------------------------- Table 1

@pytest.mark.parametrize("name", ["mu2", "mu3", "mu4", "mu5", "mu7", "mu8"])
def test_table1_matching_rows(name):
    assert ss.table1_row(name).status == "match"


def test_table1_mu1_flagged():
    row = ss.table1_row("mu1")
    assert row.status == "mismatch"
    assert "inconsistent" in row.note
    # the computed q equals the printed q; the printed type does not
    assert row.computed_q == pytest.approx(5 / 6, abs=1e-6)


def test_table1_mu6_reports_converged_type():
    row = ss.table1_row("mu6")
    assert row.computed_type is not None
    assert np.allclose(row.computed_type, ss.table1_row("mu2").computed_type, atol=1e-6)


def test_table1_inconclusive_on_budget():
    row = ss.table1_row("mu3", FlowConfig(max_iter=1, grad_tol=1e-7))
    assert row.status == "inconclusive" and row.computed_type is None


def test_table1_unknown_row():
    with pytest.raises(MalformedInputError):
        ss.table1_reproduce(rows=["mu9"])


@pytest.mark.parametrize("seed", range(3))
def test_table1_type_is_orbit_invariant(seed):
    rng = np.random.default_rng(seed)
    k = random_orthogonal(rng, 5)
    g = k @ np.diag(rng.uniform(0.5, 2.0, 5))
    res = ss.nilsoliton_find(fx.table1_bracket("mu3").act(g))
    assert res.converged
    bt = ss.beta_from_nilsoliton(lc.MetricLieAlgebra(res.final), 1e-6)
    assert np.allclose(bt.b, [-0.8, -0.6, -0.2, 0.0, 0.6], atol=1e-6)


@pytest.mark.parametrize("newton", [True, False])
def test_double_bracket_variants_share_the_limit(newton):
    A = np.array([[1.0, 3.0], [0.0, 2.0]])
    res = ss.double_bracket_flow(AAData(A), newton=newton)
    assert res.converged
    assert np.allclose(res.final, res.final.T, atol=1e-8)
    assert np.all(np.diff(res.trace) <= 0)


def test_double_bracket_newton_handles_close_eigenvalues():
    g = np.array([[1.0, 2.0, 0.0], [0.5, 1.0, 1.0], [0.0, 0.3, 1.0]])
    A = g @ np.diag([-0.41, -0.40, 0.1]) @ np.linalg.inv(g)
    assert ss.double_bracket_flow(AAData(A), FlowConfig(max_iter=200)).converged
    assert not ss.double_bracket_flow(AAData(A), FlowConfig(max_iter=200), newton=False).converged
