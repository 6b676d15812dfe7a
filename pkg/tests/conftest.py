import random
from itertools import permutations, product
from pathlib import Path

import numpy as np
import pytest

from ttp.evaluate import Solution, evaluate
from ttp.instance import EdgeWeightType, Instance, Item, load_instance

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def example5() -> Instance:
    """The 5-city / 4-item worked-example instance with explicit distances."""
    return load_instance(FIXTURES / "example5.ttp")


@pytest.fixture(scope="session")
def category_c() -> Instance:
    return load_instance(FIXTURES / "category_c_20.ttp")


def make_random_instance(rng: random.Random, n: int, m: int,
                         cap_fraction: tuple[float, float] = (0.3, 0.8)) -> Instance:
    coords = np.array([[rng.uniform(0, 100), rng.uniform(0, 100)] for _ in range(n)])
    items = tuple(
        Item(j, rng.randint(10, 100), rng.randint(1, 50), rng.randint(2, n))
        for j in range(1, m + 1)
    )
    total = sum(it.weight for it in items)
    cap = max(1.0, round(rng.uniform(*cap_fraction) * total)) if m else 10.0
    return Instance(
        name=f"rand-n{n}-m{m}",
        n=n,
        m=m,
        coords=coords,
        items=items,
        capacity=cap,
        v_min=0.1,
        v_max=1.0,
        renting_ratio=rng.uniform(0.5, 5.0),
        edge_weight_type=EdgeWeightType.CEIL_2D,
    )


def feasible_packings(inst: Instance):
    for z in product([0, 1], repeat=inst.m):
        if sum(inst.items[j].weight * z[j] for j in range(inst.m)) <= inst.capacity:
            yield list(z)


def brute_force_best_packing(inst: Instance, tour: list[int]) -> float:
    """Exhaustive 2^m enumeration of feasible plans on a fixed tour."""
    return max(evaluate(inst, Solution(list(tour), z)).gain for z in feasible_packings(inst))


def brute_force_best_solution(inst: Instance) -> float:
    """Exhaustive tour x packing enumeration; only viable for tiny instances."""
    best = float("-inf")
    for perm in permutations(range(2, inst.n + 1)):
        tour = [1] + list(perm)
        best = max(best, brute_force_best_packing(inst, tour))
    return best


def random_solution(rng: random.Random, inst: Instance, feasible: bool = True) -> Solution:
    rest = list(range(2, inst.n + 1))
    rng.shuffle(rest)
    tour = [1] + rest
    packing = [0] * inst.m
    order = list(range(inst.m))
    rng.shuffle(order)
    weight = 0.0
    for j in order:
        if rng.random() < 0.5:
            w = inst.items[j].weight
            if feasible and weight + w > inst.capacity:
                continue
            packing[j] = 1
            weight += w
    return Solution(tour, packing)
