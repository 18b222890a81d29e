import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chirplab.matrix_core import (Ensemble, SensingMatrix, SystemConfig, build_gaussian,
                                  build_multichirp_columns, build_multichirp_sum,
                                  build_partial_toeplitz, chirp_term, column_normalize,
                                  frequency_matrix, tone_matrix, toeplitz_rows,
                                  validate_or_fix_p)
from chirplab.stochastic import draw_selection, make_rng

from oracles import receiver_matrix


@st.composite
def configs(draw, max_n=64):
    N = draw(st.integers(2, max_n))
    M = draw(st.integers(1, N))
    n_chirps = draw(st.integers(1, N))
    p = validate_or_fix_p(M, draw(st.integers(1, 3 * N)))
    return SystemConfig(N=N, M=M, n_chirps=n_chirps, p=p)


@st.composite
def config_and_selection(draw, max_n=64):
    cfg = draw(configs(max_n))
    seed = draw(st.integers(0, 2 ** 32))
    model = draw(st.sampled_from(["bernoulli_phase", "bernoulli_rademacher"]))
    return cfg, draw_selection(cfg.N, cfg.n_chirps, model, make_rng(seed))


def unit(N, i, value=1.0):
    c = np.zeros(N, dtype=complex)
    c[i] = value
    return c


# -- SystemConfig ------------------------------------------------------------

def test_config_rejects_shared_factor():
    with pytest.raises(ValueError, match="co-prime"):
        SystemConfig(N=8, M=4, n_chirps=2, p=6)


@pytest.mark.parametrize("kw", [dict(N=4, M=5, n_chirps=1, p=1), dict(N=4, M=2, n_chirps=0, p=1),
                                dict(N=4, M=2, n_chirps=5, p=1), dict(N=4, M=3, n_chirps=1, p=0)])
def test_config_rejects_bad_sizes(kw):
    with pytest.raises(ValueError):
        SystemConfig(**kw)


def test_from_physical_derives_grid():
    # 1 GHz bandwidth over 150 m of range gives t_u = 1 us and N = 1000
    cfg = SystemConfig.from_physical(B=1e9, g=2.5, R_min=0.0, R_max=149.896229,
                                     n_chirps=30)
    assert (cfg.N, cfg.M) == (1000, 400)
    assert cfg.p == 401
    assert cfg.N / cfg.M == pytest.approx(2.5)


def test_from_physical_bumps_p():
    cfg = SystemConfig.from_physical(B=1e9, g=2.5, R_min=0.0, R_max=149.896229,
                                     n_chirps=30, p=402)
    assert math.gcd(cfg.p, cfg.M) == 1 and cfg.p == 403


# -- validate_or_fix_p -------------------------------------------------------

@pytest.mark.parametrize("M,p,expected", [(3, 4, 4), (4, 4, 5), (6, 8, 11)])
def test_validate_or_fix_p_examples(M, p, expected):
    assert validate_or_fix_p(M, p) == expected


@given(st.integers(1, 200), st.integers(1, 500))
def test_validate_or_fix_p_is_smallest_coprime(M, p):
    got = validate_or_fix_p(M, p)
    scan = next(q for q in range(p, p + 10 * M + 2) if math.gcd(q, M) == 1)
    assert got == scan


# -- multichirp construction -------------------------------------------------

def test_single_chirp_is_scaled_conjugate_dft():
    cfg = SystemConfig(N=4, M=4, n_chirps=1, p=5)
    A = build_multichirp_sum(cfg, unit(4, 0)).entries
    k, r = np.indices((4, 4))
    np.testing.assert_allclose(A, np.exp(-2j * np.pi * r * k / 4) / 2, atol=1e-15)
    np.testing.assert_allclose(A @ A.conj().T, np.eye(4), atol=1e-14)


def test_empty_selection_gives_zero_matrix():
    cfg = SystemConfig(N=6, M=3, n_chirps=2, p=4)
    for build in (build_multichirp_sum, build_multichirp_columns):
        A = build(cfg, np.zeros(6)).entries
        assert A.shape == (3, 6) and not np.any(A)


def test_two_chirp_instance_matches_receiver_formula():
    cfg = SystemConfig(N=6, M=3, n_chirps=2, p=4)
    c = unit(6, 1) - unit(6, 4)
    expected = receiver_matrix(6, 3, 2, 4, c)
    np.testing.assert_allclose(build_multichirp_sum(cfg, c).entries, expected, atol=1e-12)
    np.testing.assert_allclose(build_multichirp_columns(cfg, c).entries, expected, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(config_and_selection())
def test_sum_and_column_forms_agree(pair):
    cfg, sel = pair
    a = build_multichirp_sum(cfg, sel).entries
    b = build_multichirp_columns(cfg, sel).entries
    assert np.max(np.abs(a - b)) <= 1e-10


def test_sum_matches_explicit_chirp_terms():
    cfg = SystemConfig(N=20, M=7, n_chirps=4, p=8)
    sel = draw_selection(20, 4, rng=make_rng(3))
    explicit = sum(sel.values[i] * chirp_term(cfg, i) for i in range(20))
    np.testing.assert_allclose(build_multichirp_sum(cfg, sel).entries, explicit, atol=1e-12)


def test_first_chirp_column_is_tone_column():
    cfg = SystemConfig(N=12, M=5, n_chirps=3, p=6)
    A = build_multichirp_columns(cfg, unit(12, 0)).entries
    np.testing.assert_allclose(A, tone_matrix(cfg), atol=1e-14)


def test_single_chirp_columns_have_unit_norm():
    cfg = SystemConfig(N=4, M=4, n_chirps=1, p=5)
    A = build_multichirp_columns(cfg, unit(4, 0)).entries
    np.testing.assert_allclose(np.linalg.norm(A, axis=0), 1.0, atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(config_and_selection())
def test_entry_magnitude_bound(pair):
    cfg, sel = pair
    A = build_multichirp_sum(cfg, sel)
    assert np.max(np.abs(A.entries)) <= sel.realized_count * cfg.scale * (1 + 1e-12)
    assert A.kind is Ensemble.MULTICHIRP


def test_selection_seed_recorded():
    cfg = SystemConfig(N=10, M=5, n_chirps=3, p=6)
    sel = draw_selection(10, 3, rng=make_rng(0))
    A = build_multichirp_sum(cfg, sel)
    np.testing.assert_array_equal(A.seed_record["selection"], sel.values)


def test_wrong_selection_length():
    cfg = SystemConfig(N=10, M=5, n_chirps=3, p=6)
    with pytest.raises(ValueError, match="length"):
        build_multichirp_sum(cfg, np.ones(9))


# -- structural identities ---------------------------------------------------

@pytest.mark.parametrize("N,M,Nc,p", [(1000, 400, 30, 401), (256, 100, 25, 101), (48, 9, 4, 10),
                                      (1000, 200, 5, 201), (1000, 300, 25, 301)])
def test_tone_gram_identity(N, M, Nc, p):
    Abar = tone_matrix(SystemConfig(N, M, Nc, p))
    G = Abar @ Abar.conj().T
    assert np.max(np.abs(G - (N / (M * Nc)) * np.eye(M))) <= 1e-10


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 60), st.integers(1, 400), st.integers(0, 500))
def test_frequency_map_bijective(M, p_req, start):
    p = validate_or_fix_p(M, p_req)
    assert sorted((i * p) % M for i in range(start, start + M)) == list(range(M))


@pytest.mark.parametrize("N,M,Nc", [(1000, 200, 5), (1000, 300, 25), (64, 16, 4), (50, 7, 3)])
def test_frequency_matrix_opnorm(N, M, Nc):
    F = frequency_matrix(SystemConfig(N, M, Nc, validate_or_fix_p(M, M + 1)))
    assert np.linalg.norm(F, 2) ** 2 == pytest.approx(math.ceil(N / M) / Nc, abs=1e-9)


@pytest.mark.parametrize("i", [0, 1, 7, 31])
def test_chirp_term_norm(i):
    cfg = SystemConfig(N=32, M=12, n_chirps=5, p=13)
    assert np.linalg.norm(chirp_term(cfg, i), 2) == pytest.approx(math.sqrt(32 / 60), rel=1e-12)


def test_variance_identity_monte_carlo():
    # sum_i E[P_i P_i^*] = (N/M) I with P_i = c_i H_i Abar D_i
    N, M, Nc = 24, 8, 6
    cfg = SystemConfig(N, M, Nc, 9)
    terms = [chirp_term(cfg, i) for i in range(N)]
    outer = np.array([T @ T.conj().T for T in terms])
    rng = make_rng(11)
    draws = 2000
    samples = np.empty((draws, M, M), dtype=complex)
    for t in range(draws):
        c = draw_selection(N, Nc, rng=rng).values
        samples[t] = np.tensordot(np.abs(c) ** 2, outer, axes=1)
    mean = samples.mean(axis=0)
    se = samples.std(axis=0, ddof=1) / math.sqrt(draws)
    target = (N / M) * np.eye(M)
    dev = np.abs(mean - target)
    # off-diagonal terms vanish identically; the diagonal carries Monte-Carlo error
    assert np.all(dev <= 5 * np.abs(se) + 1e-9)


# -- baselines ---------------------------------------------------------------

def test_gaussian_entry_variance():
    M, N = 400, 1000
    A = build_gaussian(M, N, make_rng(5)).entries
    e = np.abs(A.ravel()) ** 2
    assert abs(e.mean() - 1 / M) <= 5 * e.std(ddof=1) / math.sqrt(e.size)


def test_gaussian_column_norm_mean():
    A = build_gaussian(100, 200, make_rng(6)).entries
    n2 = np.linalg.norm(A, axis=0) ** 2
    assert abs(n2.mean() - 1.0) <= 3 * n2.std(ddof=1) / math.sqrt(n2.size)


def test_gaussian_deterministic():
    a = build_gaussian(5, 9, make_rng(42)).entries
    b = build_gaussian(5, 9, make_rng(42)).entries
    np.testing.assert_array_equal(a, b)


def test_toeplitz_full_sampling_is_toeplitz():
    N = 9
    T = build_partial_toeplitz(N, N, make_rng(1)).entries
    for off in range(-N + 1, N):
        d = np.diagonal(T, offset=off)
        assert np.allclose(d, d[0], atol=0)


def test_toeplitz_decimated_rows_match_explicit_assembly():
    T = build_partial_toeplitz(2, 4, make_rng(8))
    t = T.seed_record["generators"]
    T1 = np.array([[t[4 - 1 + r - c] for c in range(4)] for r in range(4)])
    np.testing.assert_array_equal(toeplitz_rows(2, 4), [0, 2])
    np.testing.assert_allclose(T.entries, T1[[0, 2]] / math.sqrt(2), atol=0)


def test_toeplitz_rejects_wide_rows():
    with pytest.raises(ValueError):
        build_partial_toeplitz(5, 4, make_rng(0))


# -- SensingMatrix and normalisation ------------------------------------------

def test_sensing_matrix_is_read_only():
    src = np.ones((2, 3), dtype=complex)
    A = SensingMatrix(src)
    with pytest.raises(ValueError):
        A.entries[0, 0] = 2
    src[0, 0] = 5
    assert A.entries[0, 0] == 1


def test_sensing_matrix_rejects_nan():
    with pytest.raises(ValueError, match="non-finite"):
        SensingMatrix(np.array([[1.0, np.nan]]))


def test_normalize_unit_columns_is_identity():
    cfg = SystemConfig(N=4, M=4, n_chirps=1, p=5)
    A = build_multichirp_sum(cfg, unit(4, 0))
    A_hat, D = column_normalize(A)
    np.testing.assert_allclose(A_hat.entries, A.entries, atol=1e-15)
    np.testing.assert_allclose(D, 1.0, atol=1e-15)


def test_normalize_opnorm_bracket_and_norms():
    A = build_gaussian(20, 50, make_rng(2))
    A_hat, D = column_normalize(A)
    op, op_hat = np.linalg.norm(A.entries, 2), np.linalg.norm(A_hat.entries, 2)
    assert op / D.max() * (1 - 1e-12) <= op_hat <= op / D.min() * (1 + 1e-12)
    np.testing.assert_allclose(A_hat.column_norms, 1.0, atol=1e-12)
    np.testing.assert_allclose(A_hat.column_norms, np.linalg.norm(A_hat.entries, axis=0), atol=1e-12)
    assert A_hat.normalized and A_hat.kind is Ensemble.GAUSSIAN


def test_normalize_is_scale_invariant_per_column():
    A = build_gaussian(6, 10, make_rng(3)).entries.copy()
    B = A.copy()
    B[:, 4] *= 2
    np.testing.assert_allclose(column_normalize(B)[0].entries[:, 4],
                               column_normalize(A)[0].entries[:, 4], atol=1e-15)


def test_normalize_rejects_zero_column():
    A = np.ones((3, 4), dtype=complex)
    A[:, 2] = 0
    with pytest.raises(ValueError, match="zero column"):
        column_normalize(A)
