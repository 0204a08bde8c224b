"""Model tests: encoding, reliability structures, constraints, penalties."""

import math

import numpy as np
import pytest

from birrap.model import (
    R_CLAMP_HI,
    RrapProblem,
    SubsystemParams,
    benchmark,
    constraints,
    decode,
    encode,
    evaluate,
    evaluate_nr,
    penalize,
    random_solution,
    system_reliability,
)

ALL_IDS = (1, 2, 3, 4)


class TestDecode:
    def test_published_example(self):
        p = benchmark(4)
        n, r = decode(p, [3.91999, 3.90587, 2.90836, 1.9368])
        assert n == [3, 3, 2, 1]
        assert r == pytest.approx([0.91999, 0.90587, 0.90836, 0.9368], abs=1e-12)

    def test_lower_bound_case(self):
        p = benchmark(1)
        n, r = decode(p, [1.75] * 5)
        assert n == [1] * 5
        assert r == pytest.approx([0.75] * 5, abs=1e-15)

    def test_frac_near_one(self):
        p = benchmark(1)
        n, r = decode(p, [2.999999] + [1.75] * 4)
        assert n[0] == 2
        assert r[0] == pytest.approx(0.999999, abs=1e-12)

    def test_round_trip_exact(self):
        p = benchmark(1)
        rng = np.random.default_rng(11)
        for _ in range(500):
            genes = random_solution(p, rng)
            n, r = decode(p, genes)
            assert encode(n, r) == genes  # bit-exact re-encoding
            n2, r2 = decode(p, encode(n, r))
            assert n2 == n
            assert all(abs(a - b) <= 1e-12 for a, b in zip(r, r2))

    @pytest.mark.parametrize(
        "genes, fragment",
        [
            ([0.8, 1.75, 1.75, 1.75, 1.75], "gene 0"),
            ([1.75, 11.8, 1.75, 1.75, 1.75], "gene 1"),
            ([1.75, 1.75, 1.5, 1.75, 1.75], "gene 2"),
            ([1.75, 1.75, 1.75, 2.0, 1.75], "gene 3"),
        ],
    )
    def test_out_of_bounds_names_index(self, genes, fragment):
        p = benchmark(1)
        with pytest.raises(ValueError, match=fragment):
            decode(p, genes)

    def test_wrong_length(self):
        with pytest.raises(ValueError, match="expected 5"):
            decode(benchmark(1), [1.8, 1.8])


class TestSystemReliability:
    @pytest.mark.parametrize("mode", ("standard_active", "literal"))
    def test_series_of_singletons(self, mode):
        p = benchmark(1, formula_mode=mode)
        assert system_reliability(p, [1] * 5, [0.8] * 5) == pytest.approx(0.8**5, rel=1e-15)

    def test_bridge_dead_center_link(self):
        p = benchmark(3)
        n = [2, 1, 3, 1, 2]
        r = [0.9, 0.8, 0.7, 0.6, 0.0]
        R = [1 - (1 - ri) ** ni for ni, ri in zip(n, r)]
        expected = R[0] * R[1] + R[2] * R[3] - R[0] * R[1] * R[2] * R[3]
        assert system_reliability(p, n, r) == pytest.approx(expected, rel=1e-12)

    def test_series_parallel_frozen_value(self):
        # independently computed with exact rational arithmetic
        p = benchmark(2)
        assert system_reliability(p, [2] * 5, [0.9] * 5) == pytest.approx(0.9997990299, rel=1e-12)

    def test_literal_differs_when_redundant(self):
        n, r = [2] * 5, [0.9] * 5
        for pid in (2, 3):
            std = system_reliability(benchmark(pid), n, r)
            lit = system_reliability(benchmark(pid, formula_mode="literal"), n, r)
            assert std != lit

    def test_modes_agree_for_singletons(self):
        n, r = [1] * 5, [0.88, 0.8, 0.95, 0.77, 0.9]
        for pid in (2, 3):
            std = system_reliability(benchmark(pid), n, r)
            lit = system_reliability(benchmark(pid, formula_mode="literal"), n, r)
            assert std == pytest.approx(lit, rel=1e-15)

    @pytest.mark.parametrize("pid", ALL_IDS)
    @pytest.mark.parametrize("mode", ("standard_active", "literal"))
    def test_unit_interval(self, pid, mode):
        p = benchmark(pid, formula_mode=mode)
        rng = np.random.default_rng(5)
        for _ in range(300):
            n = rng.integers(1, 11, size=p.n_sub).tolist()
            r = rng.uniform(0.0, 1.0, size=p.n_sub).tolist()
            val = system_reliability(p, n, r)
            assert 0.0 <= val <= 1.0


class TestConstraints:
    def test_volume_from_table(self):
        g_v, _, _ = constraints(benchmark(1), [1] * 5, [0.8] * 5)
        assert g_v == 12.0  # 1+2+3+4+2

    def test_weight_frozen_value(self):
        # hand arithmetic: sum w_i = 38, so g_w = 38 e^(1/4)
        _, _, g_w = constraints(benchmark(1), [1] * 5, [0.8] * 5)
        assert g_w == pytest.approx(48.79296583413417, rel=1e-12)

    def test_cost_frozen_value_benchmark4(self):
        # 124.6051845778992485... from a high-precision independent script
        _, g_c, _ = constraints(benchmark(4), [1] * 4, [0.9] * 4)
        assert g_c == pytest.approx(124.60518457789925, rel=1e-12)

    def test_singular_reliability_raises(self):
        with pytest.raises(ValueError, match="singular"):
            constraints(benchmark(1), [1] * 5, [1.0, 0.8, 0.8, 0.8, 0.8])
        with pytest.raises(ValueError):
            constraints(benchmark(1), [1] * 5, [0.0, 0.8, 0.8, 0.8, 0.8])

    @pytest.mark.parametrize("pid", (1, 4))
    def test_monotone_in_redundancy(self, pid):
        p = benchmark(pid)
        rng = np.random.default_rng(17)
        for _ in range(200):
            n = rng.integers(1, 10, size=p.n_sub).tolist()
            r = rng.uniform(0.75, 0.99, size=p.n_sub).tolist()
            base = constraints(p, n, r)
            j = int(rng.integers(p.n_sub))
            bumped = list(n)
            bumped[j] += 1
            after = constraints(p, bumped, r)
            assert all(b >= a for a, b in zip(base, after))


class TestPenalize:
    def test_identity_when_all_ratios_one(self):
        p = benchmark(1)
        # r_s/r_lb = 1, v_ub/g_v = 1, w_ub/g_w = 1, c_ub/g_c = 1
        f_r, f_c = penalize(p, p.r_lb, p.v_ub, p.c_ub, p.w_ub)
        assert f_r == p.r_lb
        assert f_c == p.c_ub

    def test_half_ratio_cubes(self):
        p = benchmark(1)
        # make the cost ratio the binding one at exactly 1/2
        f_r, f_c = penalize(p, 0.9, p.v_ub / 4, 2 * p.c_ub, p.w_ub / 4)
        assert f_r == pytest.approx(0.9 / 8, rel=1e-15)
        assert f_c == pytest.approx(16 * p.c_ub, rel=1e-15)

    def test_inflation_above_one(self):
        p = benchmark(1)
        f_r, f_c = penalize(p, 2 * p.r_lb, p.v_ub / 2, p.c_ub / 2, p.w_ub / 2)
        assert f_r == pytest.approx(2 * p.r_lb * 8, rel=1e-15)
        assert f_c == pytest.approx(p.c_ub / 16, rel=1e-15)

    def test_cap_flag(self):
        p = benchmark(1, cap_penalty_factor=True)
        f_r, f_c = penalize(p, 2 * p.r_lb, p.v_ub / 2, p.c_ub / 2, p.w_ub / 2)
        assert f_r == 2 * p.r_lb
        assert f_c == p.c_ub / 2

    def test_nonpositive_constraint_raises(self):
        p = benchmark(1)
        with pytest.raises(ValueError):
            penalize(p, 0.9, 0.0, 10.0, 10.0)
        with pytest.raises(ValueError):
            penalize(p, 0.9, 10.0, -1.0, 10.0)

    @pytest.mark.parametrize("pid", ALL_IDS)
    def test_direction_matches_ratio(self, pid):
        p = benchmark(pid)
        rng = np.random.default_rng(23)
        for _ in range(500):
            genes = random_solution(p, rng)
            ev = evaluate(p, genes)
            m = min(ev.r_s / p.r_lb, p.v_ub / ev.g_v, p.w_ub / ev.g_w, p.c_ub / ev.g_c)
            if m < 1:
                assert ev.f_r < ev.r_s and ev.f_c > ev.g_c
            else:
                assert ev.f_r >= ev.r_s and ev.f_c <= ev.g_c


class TestEvaluate:
    def test_deeply_infeasible_is_unqualified(self):
        p = benchmark(1)
        ev = evaluate(p, [10.9] * 5)  # maximal redundancy blows every budget
        assert not ev.feasible
        assert ev.f_r < 0.1
        assert not ev.qualified

    def test_feasible_high_reliability_is_qualified(self):
        p = benchmark(1)
        genes = encode([3, 3, 2, 2, 2], [0.75, 0.8, 0.85, 0.75, 0.85])
        ev = evaluate(p, genes)
        assert ev.feasible
        assert ev.r_s >= p.r_lb
        assert ev.f_r >= ev.r_s >= 0.1
        assert ev.qualified

    def test_feasibility_matches_raw_recheck(self):
        p = benchmark(2)
        rng = np.random.default_rng(31)
        for _ in range(400):
            ev = evaluate(p, random_solution(p, rng))
            assert ev.feasible == (ev.g_v <= p.v_ub and ev.g_c <= p.c_ub and ev.g_w <= p.w_ub)

    @pytest.mark.parametrize("pid", (1, 4))
    def test_reliability_monotone_in_genes(self, pid):
        p = benchmark(pid)
        rng = np.random.default_rng(41)
        for _ in range(200):
            n = rng.integers(1, 10, size=p.n_sub).tolist()
            r = rng.uniform(0.75, 0.99, size=p.n_sub).tolist()
            base = system_reliability(p, n, r)
            j = int(rng.integers(p.n_sub))
            n_up = list(n)
            n_up[j] += 1
            assert system_reliability(p, n_up, r) >= base
            r_up = list(r)
            r_up[j] = min(r_up[j] + 0.005, 0.999999)
            assert system_reliability(p, n, r_up) >= base

    def test_nr_path_matches_gene_path(self):
        p = benchmark(3)
        rng = np.random.default_rng(43)
        for _ in range(50):
            genes = random_solution(p, rng)
            n, r = decode(p, genes)
            assert evaluate(p, genes) == evaluate_nr(p, n, r)

    def test_mopso_style_out_of_bound_reliability_is_infeasible(self):
        p = benchmark(1)
        ev = evaluate_nr(p, [2] * 5, [0.6] * 5)  # below the reliability floor
        assert not ev.feasible

    def test_reliability_one_is_clamped_not_fatal(self):
        p = benchmark(1)
        ev = evaluate_nr(p, [1] * 5, [1.0] * 5)
        assert ev.r_s == 1.0
        assert math.isfinite(ev.g_c)


class TestProblemDefinition:
    def test_benchmark_table(self):
        p1 = benchmark(1)
        assert p1.n_sub == 5 and (p1.v_ub, p1.c_ub, p1.w_ub) == (110.0, 175.0, 200.0)
        assert [s.alpha for s in p1.subsystems] == pytest.approx(
            [2.33e-5, 1.45e-5, 0.541e-5, 8.05e-5, 1.95e-5]
        )
        p2 = benchmark(2)
        assert (p2.v_ub, p2.c_ub, p2.w_ub) == (180.0, 175.0, 100.0)
        assert [s.weight for s in p2.subsystems] == [3.5, 4.0, 4.0, 3.5, 4.5]
        assert benchmark(3).subsystems == p1.subsystems
        p4 = benchmark(4)
        assert p4.n_sub == 4 and (p4.v_ub, p4.c_ub, p4.w_ub) == (250.0, 400.0, 500.0)

    def test_json_round_trip(self, tmp_path):
        p = benchmark(2, n_ub=5, r_lb=0.8)
        path = tmp_path / "problem.json"
        path.write_text(__import__("json").dumps(p.to_dict()))
        assert RrapProblem.from_json(path) == p

    def test_r_hi_respects_explicit_upper_bound(self):
        assert benchmark(1).r_hi == R_CLAMP_HI
        assert benchmark(1, r_ub=0.95).r_hi == 0.95

    def test_validation_errors(self):
        with pytest.raises(ValueError):
            SubsystemParams(alpha=-1.0, beta=1.5, vol_coeff=1.0, weight=1.0)
        with pytest.raises(ValueError):
            benchmark(1, n_lb=0)
        with pytest.raises(ValueError):
            benchmark(1, r_lb=0.9, r_ub=0.8)
        with pytest.raises(ValueError):
            benchmark(1, formula_mode="bogus")
        with pytest.raises(ValueError):
            benchmark(7)

    def test_series_parallel_requires_five_subsystems(self):
        subs = tuple(SubsystemParams(1e-5, 1.5, 1.0, 1.0) for _ in range(4))
        with pytest.raises(ValueError, match="5 subsystems"):
            RrapProblem(id=2, subsystems=subs, v_ub=10, c_ub=10, w_ub=10)

    def test_random_solution_in_bounds(self):
        p = benchmark(1, n_ub=3, r_ub=0.95)
        rng = np.random.default_rng(3)
        for _ in range(200):
            n, r = decode(p, random_solution(p, rng))
            assert all(1 <= v <= 3 for v in n)
            assert all(0.75 <= v <= 0.95 for v in r)
