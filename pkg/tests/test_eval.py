import math
import random

import numpy as np
import pytest

from ttp.evaluate import (
    PrefixCache,
    Solution,
    build_prefix_cache,
    city_weight,
    delta_flip,
    evaluate,
    velocity_at,
)

from conftest import make_random_instance, random_solution
from reference_eval import ref_evaluate


def test_worked_example_heavy_item(example5):
    res = evaluate(example5, Solution([1, 2, 3, 4, 5], [1, 0, 0, 0]))
    # G = 101 - 1 * (1 + 10/0.1) = 0
    assert res.gain == pytest.approx(0.0, abs=1e-9)
    assert res.travel_time == pytest.approx(101.0, abs=1e-9)
    assert res.feasible


def test_worked_example_three_items(example5):
    res = evaluate(example5, Solution([1, 2, 3, 4, 5], [0, 1, 1, 1]))
    assert res.total_profit == 18
    assert res.travel_time == pytest.approx(15.40, abs=0.01)
    assert res.gain == pytest.approx(2.60, abs=0.01)
    assert res.final_weight == 8


def test_city_weight(example5):
    assert city_weight(example5, [1, 0, 0, 0], 2) == 10
    for c in range(1, 6):
        assert city_weight(example5, [0, 0, 0, 0], c) == 0
    # back-solved from v_c = 0.46 at city 4 on plan {2,3,4}
    assert city_weight(example5, [0, 1, 1, 1], 4) == 4


def test_velocity_at(example5):
    assert velocity_at(example5, 0) == example5.v_max
    assert velocity_at(example5, 10) == pytest.approx(0.1)
    assert velocity_at(example5, 6) == pytest.approx(0.46)
    # exact floor at capacity, clamped past it
    assert velocity_at(example5, example5.capacity) == example5.v_min
    assert velocity_at(example5, example5.capacity * 2) == example5.v_min


def test_empty_packing_travels_at_vmax(example5):
    res = evaluate(example5, Solution([1, 2, 3, 4, 5], [0, 0, 0, 0]))
    tour_len = 1 + 5 + 3 + 1 + 1
    assert res.gain == pytest.approx(-example5.renting_ratio * tour_len / example5.v_max)


def test_evaluate_rejects_bad_packing_length(example5):
    with pytest.raises(ValueError):
        evaluate(example5, Solution([1, 2, 3, 4, 5], [0, 0]))


def test_overweight_packing_flagged_infeasible(example5):
    res = evaluate(example5, Solution([1, 2, 3, 4, 5], [1, 1, 1, 1]))
    assert not res.feasible
    assert res.final_weight == 18


def test_prefix_cache_suffix_distances(example5):
    cache = build_prefix_cache(example5, Solution([1, 2, 3, 4, 5], [0, 1, 1, 1]))
    assert cache.suffix_dist[cache.position[2 - 1]] == 10
    assert cache.suffix_dist[example5.n - 1] == example5.distance(5, 1)
    assert cache.suffix_dist[0] == 11  # full cyclic tour length


def test_prefix_cache_matches_recomputation():
    rng = random.Random(3)
    for _ in range(20):
        inst = make_random_instance(rng, 8, rng.randint(0, 10))
        sol = random_solution(rng, inst)
        cache = build_prefix_cache(inst, sol)
        res = evaluate(inst, sol)
        assert cache.total_time == pytest.approx(res.travel_time, rel=1e-12)
        # cache entries at every position match a from-scratch walk
        carried = 0.0
        time = 0.0
        for k in range(inst.n):
            carried += city_weight(inst, sol.packing, sol.tour[k])
            assert cache.cum_weight[k] == pytest.approx(carried)
            assert cache.arrive_time[k] == pytest.approx(time)
            time += inst.distance(sol.tour[k], sol.tour[(k + 1) % inst.n]) / velocity_at(inst, carried)
        assert np.all(np.diff(cache.cum_weight) >= 0)
        assert np.all(np.diff(cache.suffix_dist) <= 0)


def test_delta_flip_hand_case(example5):
    sol = Solution([1, 2, 3, 4, 5], [0, 0, 0, 0])
    cache = build_prefix_cache(example5, sol)
    # picking item 1 slows only the 10 units of suffix after city 2
    assert delta_flip(example5, sol, cache, 1) == pytest.approx(101 - (10 / 0.1 - 10 / 1))


def test_delta_flip_involution(example5):
    rng = random.Random(5)
    for _ in range(50):
        sol = random_solution(rng, example5)
        cache = build_prefix_cache(example5, sol)
        j = rng.randint(1, example5.m)
        d1 = delta_flip(example5, sol, cache, j)
        sol.packing[j - 1] ^= 1
        cache2 = build_prefix_cache(example5, sol)
        d2 = delta_flip(example5, sol, cache2, j)
        assert d1 + d2 == pytest.approx(0.0, abs=1e-9)


def test_delta_flip_matches_brute_force():
    rng = random.Random(11)
    for _ in range(30):
        inst = make_random_instance(rng, rng.randint(3, 7), rng.randint(1, 8))
        sol = random_solution(rng, inst, feasible=False)
        cache = build_prefix_cache(inst, sol)
        base = evaluate(inst, sol).gain
        for j in range(1, inst.m + 1):
            flipped = sol.copy()
            flipped.packing[j - 1] ^= 1
            expect = evaluate(inst, flipped).gain - base
            got = delta_flip(inst, sol, cache, j)
            assert got == pytest.approx(expect, rel=1e-6, abs=1e-9)


def test_delta_flip_bad_index(example5):
    sol = Solution([1, 2, 3, 4, 5], [0, 0, 0, 0])
    cache = build_prefix_cache(example5, sol)
    with pytest.raises(IndexError):
        delta_flip(example5, sol, cache, 0)
    with pytest.raises(IndexError):
        delta_flip(example5, sol, cache, 5)


def test_matches_reference_evaluator():
    rng = random.Random(99)
    for _ in range(100):
        inst = make_random_instance(rng, rng.randint(2, 8), rng.randint(0, 12))
        sol = random_solution(rng, inst, feasible=False)
        res = evaluate(inst, sol)
        profit, time, gain, weight, feasible = ref_evaluate(inst, sol.tour, sol.packing)
        assert res.total_profit == pytest.approx(profit)
        assert res.travel_time == pytest.approx(time, rel=1e-12)
        assert res.gain == pytest.approx(gain, rel=1e-12, abs=1e-12)
        assert res.final_weight == pytest.approx(weight)
        assert res.feasible == feasible


def test_monotone_slowdown():
    rng = random.Random(21)
    for _ in range(50):
        inst = make_random_instance(rng, rng.randint(3, 7), rng.randint(1, 8))
        sol = random_solution(rng, inst)
        base = evaluate(inst, sol).travel_time
        zeros = [j for j in range(inst.m) if not sol.packing[j]]
        if not zeros:
            continue
        j = rng.choice(zeros)
        sol.packing[j] = 1
        assert evaluate(inst, sol).travel_time >= base - 1e-12


def test_gain_decomposition():
    rng = random.Random(31)
    for _ in range(50):
        inst = make_random_instance(rng, rng.randint(3, 7), rng.randint(0, 8))
        sol = random_solution(rng, inst)
        res = evaluate(inst, sol)
        assert res.gain + inst.renting_ratio * res.travel_time == pytest.approx(res.total_profit, rel=1e-9, abs=1e-9)


def test_solution_validation(example5):
    with pytest.raises(ValueError):
        Solution([2, 1, 3, 4, 5], [0, 0, 0, 0]).validate(example5)
    with pytest.raises(ValueError):
        Solution([1, 2, 3, 4], [0, 0, 0, 0]).validate(example5)
    with pytest.raises(ValueError):
        Solution([1, 2, 3, 4, 5], [0, 0, 2, 0]).validate(example5)
    Solution([1, 2, 3, 4, 5], [1, 0, 1, 0]).validate(example5)
