import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chirplab import bounds as bnd

from oracles import epsilon_bar_chain, subgaussian_grid


# -- q* and sub-Gaussian norm ------------------------------------------------

def test_q_star_values():
    assert bnd.q_star(500, 500) == 1.0
    assert bnd.q_star(1000, 30) == pytest.approx(7.0131157946399636, rel=1e-14)
    assert bnd.q_star(1000, 1000 / math.sqrt(math.e)) == pytest.approx(1.0, abs=1e-14)


def test_q_star_rejects_bad_counts():
    with pytest.raises(ValueError):
        bnd.q_star(10, 11)


def test_subgaussian_norm_full_selection():
    assert bnd.subgaussian_norm(64, 64) == 1.0


def test_subgaussian_norm_matches_dense_grid():
    oracle = subgaussian_grid(1000, 30)
    assert oracle == pytest.approx(0.22903257413267983, rel=1e-10)
    assert bnd.subgaussian_norm(1000, 30) == pytest.approx(oracle, rel=1e-10)


@pytest.mark.parametrize("N,Nc", [(100, 3), (256, 25), (2048, 5), (50, 40)])
def test_q_star_is_the_maximiser(N, Nc):
    assert bnd.subgaussian_norm(N, Nc) == pytest.approx(subgaussian_grid(N, Nc), rel=1e-9)


def test_subgaussian_norm_monotone_in_chirps():
    vals = [bnd.subgaussian_norm(200, nc) for nc in range(1, 201)]
    assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))


# -- operator-norm tail ------------------------------------------------------

def test_opnorm_threshold_value():
    ob = bnd.opnorm_bounds(1000, 400, 30)
    assert ob.threshold == pytest.approx(2 * math.sqrt(1000 * math.log(1400) / 400), rel=1e-14)
    assert ob.threshold == pytest.approx(8.5113027884122125, rel=1e-12)
    assert ob.precondition_ok


def test_opnorm_large_chirp_limit():
    ob = bnd.opnorm_bounds(1000, 400, 1e12)
    assert ob.alpha2 == pytest.approx(2.0, abs=1e-5)
    assert ob.tail.raw == pytest.approx(1 / 1400, rel=1e-4)


def test_opnorm_precondition_flag():
    ob = bnd.opnorm_bounds(1000, 400, 2)
    assert not ob.precondition_ok
    assert math.isfinite(ob.threshold) and 0 <= ob.tail.clamped <= 1


@pytest.mark.parametrize("N,M,Nc", [(1000, 400, 30), (256, 100, 25), (4096, 512, 64)])
def test_bernstein_composition_reproduces_opnorm_tail(N, M, Nc):
    ob = bnd.opnorm_bounds(N, M, Nc)
    L = math.sqrt(N / (M * Nc))
    mb = bnd.matrix_bernstein_tail(L, N / M, M, N, ob.threshold)
    assert mb.tail.raw == pytest.approx(ob.tail.raw, rel=1e-12)


def test_bernstein_small_t_and_monotone_nu():
    raw = bnd.matrix_bernstein_tail(1.0, 1.0, 3, 5, 1e-9).tail
    assert raw.raw == pytest.approx(8.0, rel=1e-9) and raw.clamped == 1.0
    lo = bnd.matrix_bernstein_tail(1.0, 1.0, 3, 5, 4.0).tail.raw
    hi = bnd.matrix_bernstein_tail(1.0, 2.0, 3, 5, 4.0).tail.raw
    assert hi >= lo


def test_bernstein_rejects_nonpositive():
    with pytest.raises(ValueError):
        bnd.matrix_bernstein_tail(0.0, 1.0, 2, 2, 1.0)


# -- column-norm and coherence tails -----------------------------------------

def test_column_norm_tail_chain():
    eb = epsilon_bar_chain(1000, 30, 0.5)
    expected = 4 * 1000 * math.exp(-400 * 1.0 * eb * eb)
    got = bnd.column_norm_tail(1000, 400, 30, 0.5, 1.0)
    assert bnd.epsilon_bar(1000, 30, 0.5) == pytest.approx(eb, rel=1e-14)
    assert got.raw == pytest.approx(expected, rel=1e-12)


def test_column_norm_tail_small_epsilon_and_monotone_in_M():
    assert bnd.column_norm_tail(1000, 400, 30, 1e-12, 1.0).raw == pytest.approx(4000, rel=1e-6)
    assert bnd.column_norm_tail(1000, 400, 30, 1e-12, 1.0).clamped == 1.0
    vals = [bnd.column_norm_tail(1000, M, 500, 0.05, 0.01).raw for M in range(10, 400, 10)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_coherence_exponents_by_independent_arithmetic():
    N, M, Nc, a3, d = 1000, 400, 30, 0.7, 0.3
    q = 2 * math.log(N / Nc)
    s = q * a3 / (Nc / N) ** (2 / q - 1)
    ct = bnd.coherence_tail(N, M, Nc, a3, 0.5, d)
    assert ct.u1 == pytest.approx(d * s * s, rel=1e-13)
    assert ct.u2 == pytest.approx(s * d * math.log(N), rel=1e-13)


def test_coherence_branch_selection():
    # branch condition ln N > s alpha3 with s = selection factor
    N, Nc = 1000, 30
    s = bnd.selection_factor(N, Nc)
    cut = math.log(N) / s
    assert bnd.coherence_tail(N, 400, Nc, 0.9 * cut, 0.5, 1.0).branch == "u1"
    assert bnd.coherence_tail(N, 400, Nc, 1.1 * cut, 0.5, 1.0).branch == "u2"


def test_coherence_threshold_scaling():
    a = bnd.coherence_tail(1000, 100, 30, 1.0, 0.5, 1.0).threshold
    b = bnd.coherence_tail(1000, 400, 30, 1.0, 0.5, 1.0).threshold
    assert a / b == 2.0


def test_coherence_precondition_flag():
    assert not bnd.coherence_tail(1000, 300, 30, 1.0, 0.5, 1.0).precondition_ok
    assert bnd.coherence_tail(1000, 400, 30, 1.0, 0.5, 1.0).precondition_ok


# -- recovery conditions and RIP requirement ---------------------------------

def test_k_max_value():
    expected = 0.9 * 205 / (math.log(512) * math.log(717))
    assert bnd.k_max(512, 205, 1.0, 0.1) == pytest.approx(expected, rel=1e-14)
    assert bnd.k_max(512, 205, 1.0, 0.1) == pytest.approx(4.498, abs=5e-4)


def test_recovery_report_trivial_conditions():
    rep = bnd.theorem1_report(1000, 400, 30, 0, sigma=0.0, x_min=1e-6)
    assert rep.condition_flags["sparsity"]
    assert rep.condition_flags["min_signal"]
    assert rep.min_signal_threshold == 0.0


def test_recovery_report_fields():
    c = bnd.UniversalConstants(alpha1=2.0, kappa=0.5)
    rep = bnd.theorem1_report(1000, 400, 30, 3, 1.0, 100.0, c, nu=0.05)
    assert rep.constants["alpha1"] == 2.0 and rep.constants["kappa"] == 0.5
    assert not rep.condition_flags["num_chirps"]           # 30 < 0.05 * 1000
    assert rep.snr_r_threshold == pytest.approx(64 * math.log(1000), rel=1e-14)
    for p in list(rep.p_bar.values()) + [rep.success_probability, rep.opnorm_tail_prob]:
        assert math.isnan(p.clamped) or 0.0 <= p.clamped <= 1.0
    names = [q for q, _ in rep.rows()]
    assert len(names) == len(set(names))
    assert any("O(N^(-2 ln 2))" in n for n in rep.notes)
    expected = rep.p_bar["p_bar4"].raw * (1 - sum(rep.p_bar[k].raw for k in
                                                  ("p_bar1", "p_bar2", "p_bar3")))
    assert rep.success_probability.raw == pytest.approx(expected, rel=1e-14)


def test_rip_requirement_value():
    assert bnd.theorem2_requirement(256, 3, 0.3).M_required == 555


@given(st.integers(2, 5000), st.integers(1, 50), st.floats(0.01, 0.99), st.floats(0.1, 10))
def test_rip_requirement_scaling(N, K, delta, a):
    base = bnd.theorem2_requirement(N, K, delta, a).M_required_exact
    assert bnd.theorem2_requirement(N, 2 * K, delta, a).M_required_exact == pytest.approx(4 * base, rel=1e-12)
    assert bnd.theorem2_requirement(N, K, delta / 2, a).M_required_exact == pytest.approx(4 * base, rel=1e-12)


def test_rip_requirement_tail_terms():
    r = bnd.theorem2_requirement(1000, 2, 0.5, N_c=30, M=400)
    s = bnd.selection_factor(1000, 30)
    assert r.u3 == pytest.approx(s * s, rel=1e-14)
    assert r.p5.raw == pytest.approx(1000 ** (-(s * s - 2)), rel=1e-12)
    assert math.isnan(bnd.theorem2_requirement(1000, 2, 0.5).p5.raw)
    with pytest.raises(ValueError):
        bnd.theorem2_requirement(1000, 2, 1.5)


def test_snr_and_min_signal():
    assert bnd.snr_threshold(1000) == pytest.approx(884.19267570971351, rel=1e-14)
    assert 10 * math.log10(bnd.snr_threshold(1000)) == pytest.approx(29.47, abs=0.01)
    assert bnd.min_signal(0.0, 1000, 0.5) == 0.0
    assert bnd.min_signal(2.0, 1000, 0.0) == pytest.approx(16 * math.sqrt(2 * math.log(1000)))


# -- constants and probabilities ---------------------------------------------

@pytest.mark.parametrize("kw", [dict(d=0), dict(alpha3=-1), dict(epsilon=1.0), dict(epsilon1=0)])
def test_constants_validation(kw):
    with pytest.raises(ValueError):
        bnd.UniversalConstants(**kw)


@given(st.floats(allow_nan=True, allow_infinity=True))
def test_probability_clamp(raw):
    p = bnd.Probability(raw)
    if math.isnan(raw):
        assert math.isnan(p.clamped)
    else:
        assert 0.0 <= p.clamped <= 1.0
        assert p.raw == raw


def test_bounds_are_deterministic():
    a = bnd.theorem1_report(512, 205, 25, 3, 1.0, 50.0).rows()
    b = bnd.theorem1_report(512, 205, 25, 3, 1.0, 50.0).rows()
    assert a == b
    assert np.all([isinstance(q, str) for q, _ in a])
