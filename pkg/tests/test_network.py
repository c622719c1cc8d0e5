import math
from dataclasses import replace

import numpy as np
import pytest

from angsep import kernels
from angsep.geometry import DegenerateInputError
from angsep.network import (
    NetworkParams,
    Scenario,
    empirical_hearability,
    hearable_set,
    sample_scenario,
    shadowing_transformed_density,
    sinr,
)

REF = NetworkParams(seed=902)  # f=1, alpha=4, -10 dB, 8 dB shadowing, 500 m ISD density


def scenario_from(positions, shadowing, active):
    return Scenario(
        positions=np.asarray(positions, float),
        shadowing=np.asarray(shadowing, float),
        active=np.asarray(active, bool),
        hearable_indices=np.empty(0, np.int64),
    )


# ------------------------------------------------------------------- params

def test_param_validation():
    with pytest.raises(ValueError):
        NetworkParams(alpha=2.0)
    with pytest.raises(ValueError):
        NetworkParams(f=1.5)
    with pytest.raises(ValueError):
        NetworkParams(lam=0.0)
    with pytest.raises(ValueError):
        NetworkParams(window_radius=-1.0)


def test_mean_count_matches_hex_grid_equivalent():
    # density 2/(sqrt(3)*500^2) on a 5 km disk
    assert math.isclose(REF.mean_count, 362.7598, rel_tol=1e-5)


# ----------------------------------------------------------------- sampling

def test_sample_scenario_deterministic():
    a = sample_scenario(REF, 7)
    b = sample_scenario(REF, 7)
    assert np.array_equal(a.positions, b.positions)
    assert np.array_equal(a.shadowing, b.shadowing)
    assert np.array_equal(a.active, b.active)
    assert np.array_equal(a.hearable_indices, b.hearable_indices)
    c = sample_scenario(REF, 8)
    assert not np.array_equal(a.positions, c.positions)


def test_sample_scenario_poisson_mean():
    totals = [sample_scenario(REF, i).n_bs for i in range(300)]
    mu = REF.mean_count
    se = math.sqrt(mu / len(totals))
    assert abs(np.mean(totals) - mu) < 3 * se


def test_sample_scenario_positions_inside_window():
    sc = sample_scenario(REF, 3)
    d = np.hypot(sc.positions[:, 0], sc.positions[:, 1])
    assert np.all(d <= REF.window_radius)


def test_zero_load_means_no_active():
    sc = sample_scenario(replace(REF, f=0.0), 1)
    assert not sc.active.any()


def test_full_load_means_all_active():
    sc = sample_scenario(REF, 1)
    assert sc.active.all()


def test_zero_shadowing_gains_are_exactly_one():
    sc = sample_scenario(replace(REF, sigma_s_db=0.0), 2)
    assert np.all(sc.shadowing == 1.0)


def test_thinning_consistency():
    params = replace(REF, f=0.5)
    n = 3000
    active_counts = [sample_scenario(params, i).active.sum() for i in range(n)]
    expect = 0.5 * params.mean_count
    se = math.sqrt(expect / n)
    assert abs(np.mean(active_counts) - expect) < 3 * se


# --------------------------------------------------------------------- SINR

def test_sinr_single_active_bs_noise_only():
    params = replace(REF, sigma2=2.0, tx_power=3.0)
    sc = scenario_from([[100.0, 0.0]], [1.5], [True])
    expect = 3.0 * 1.5 * 100.0**-4 / 2.0
    assert math.isclose(sinr(sc, params, 0), expect, rel_tol=1e-12)


def test_sinr_two_equal_bs_is_exactly_one():
    sc = scenario_from([[50.0, 0.0], [0.0, 50.0]], [2.0, 2.0], [True, True])
    assert sinr(sc, REF, 0) == 1.0
    assert sinr(sc, REF, 1) == 1.0


def test_sinr_three_bs_hand_computed():
    params = replace(REF, sigma2=1e-9, tx_power=2.0, alpha=4.0)
    pos = [[100.0, 0.0], [0.0, 200.0], [-300.0, 0.0]]
    sh = [1.0, 2.0, 0.5]
    sc = scenario_from(pos, sh, [True, True, True])
    w = [2.0 * 1.0 / 100.0**4, 2.0 * 2.0 / 200.0**4, 2.0 * 0.5 / 300.0**4]
    for i in range(3):
        interference = sum(w) - w[i] + 1e-9
        assert math.isclose(sinr(sc, params, i), w[i] / interference, rel_tol=1e-9)


def test_sinr_inactive_candidate_sees_full_interference():
    # an idle BS can still be heard; all active BSs interfere with it
    pos = [[100.0, 0.0], [0.0, 100.0], [100.0, 100.0]]
    sc = scenario_from(pos, [1.0, 1.0, 1.0], [True, True, False])
    w = [100.0**-4, 100.0**-4, (2 * 100.0**2) ** -2]
    assert math.isclose(sinr(sc, REF, 2), w[2] / (w[0] + w[1]), rel_tol=1e-12)
    assert math.isclose(sinr(sc, REF, 0), w[0] / w[1], rel_tol=1e-12)


def test_sinr_zero_distance_rejected():
    sc = scenario_from([[0.0, 0.0]], [1.0], [True])
    with pytest.raises(DegenerateInputError):
        sinr(sc, REF, 0)


# --------------------------------------------------------------- hearability

def test_threshold_off_hears_every_bs():
    params = replace(REF, beta_over_gamma_db=-math.inf)
    sc = sample_scenario(params, 5)
    assert sc.n_hearable == sc.n_bs


def test_hearable_sorted_by_decreasing_sinr():
    sc = sample_scenario(REF, 11)
    values = [sinr(sc, REF, int(i)) for i in sc.hearable_indices]
    assert all(a >= b for a, b in zip(values, values[1:]))
    assert all(v >= REF.threshold_linear for v in values)


def test_hearable_set_matches_scenario_field():
    sc = sample_scenario(REF, 13)
    assert np.array_equal(hearable_set(sc, REF), sc.hearable_indices)


def test_interference_limited_dominance_at_full_load():
    # sigma2 = 0, threshold above 0 dB, f = 1: no two BSs can both clear ratio 1
    params = replace(REF, beta_over_gamma_db=0.1, seed=77)
    counts, _ = kernels.run_block(params, 0, 100_000, collect_rows=False)
    assert counts.max() <= 1


def test_empirical_hearability_high_threshold_hears_nothing():
    params = replace(REF, beta_over_gamma_db=200.0, seed=3)
    table = empirical_hearability(params, 200)
    assert table.pmf[0] == 1.0


def test_empirical_hearability_threshold_off_matches_poisson():
    params = replace(REF, beta_over_gamma_db=-math.inf, seed=5)
    table = empirical_hearability(params, 4000)
    mean_n = float(np.sum(np.arange(len(table.counts)) * table.pmf))
    se = math.sqrt(params.mean_count / 4000)
    assert abs(mean_n - params.mean_count) < 3 * se
    assert math.isclose(table.pmf.sum(), 1.0, abs_tol=1e-12)
    assert table.stderr.shape == table.pmf.shape


def test_hearability_tail_vanishes_at_reference_params():
    table = empirical_hearability(replace(REF, seed=31), 20_000)
    # detection bound at -10 dB: at most 1 + 1/0.1 = 11 hearable under full load
    assert len(table.counts) - 1 <= 11
    assert table.p_at_least(9) < 1e-3


# ---------------------------------------------------- transformed density

def test_transformed_density_no_shadowing():
    params = replace(REF, sigma_s_db=0.0)
    assert shadowing_transformed_density(params) == params.lam


def test_transformed_density_reference_parameters():
    # E[S^(2/alpha)] for 8 dB log-normal shadowing, alpha 4
    ratio = shadowing_transformed_density(REF) / REF.lam
    rng = np.random.default_rng(59)
    z = rng.standard_normal(2_000_000)
    s = np.exp(REF.shadow_scale * z) ** 0.5
    assert math.isclose(ratio, 1.5283, rel_tol=2e-4)
    assert math.isclose(ratio, float(s.mean()), rel_tol=3 * float(s.std()) / math.sqrt(s.size))


def test_transformed_density_decreases_with_alpha():
    r1 = shadowing_transformed_density(replace(REF, alpha=2.000001)) / REF.lam
    r2 = shadowing_transformed_density(replace(REF, alpha=3.0)) / REF.lam
    r3 = shadowing_transformed_density(replace(REF, alpha=4.0)) / REF.lam
    assert r1 > r2 > r3 > 1.0
    sigma_ln = REF.sigma_s_db * math.log(10) / 10
    assert math.isclose(r1, math.exp(0.5 * sigma_ln**2), rel_tol=1e-4)


# ------------------------------------------------------------- determinism

def test_blocks_are_partition_invariant():
    whole_c, whole_r = kernels.run_block(REF, 0, 400, l_min=4)
    part1_c, part1_r = kernels.run_block(REF, 0, 150, l_min=4)
    part2_c, part2_r = kernels.run_block(REF, 150, 250, l_min=4)
    assert np.array_equal(whole_c, np.concatenate([part1_c, part2_c]))
    for i in range(7):
        assert np.array_equal(whole_r[i], np.concatenate([part1_r[i], part2_r[i]]))


def test_window_adequacy():
    # doubling the window shifts P(N >= 4) by less than 2 combined sigmas
    n = 20_000
    base = NetworkParams(seed=41)
    wide = replace(base, window_radius=10_000.0)
    c1, _ = kernels.run_block(base, 0, n, collect_rows=False)
    c2, _ = kernels.run_block(wide, 0, n, collect_rows=False)
    p1 = np.mean(c1 >= 4)
    p2 = np.mean(c2 >= 4)
    se = math.sqrt(p1 * (1 - p1) / n + p2 * (1 - p2) / n)
    assert abs(p1 - p2) < 2 * se
