"""Item scoring for the picking heuristic.

An item's score is profit / (weight^alpha * suffix distance), where the
suffix distance is the tour distance from the item's home city to the end of
the cyclic tour.  Raising alpha above 1 amplifies the weight's influence,
which pays off on instances where many items compete for capacity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ttp.evaluate import PrefixCache
from ttp.instance import Instance

DEFAULT_ALPHA = 1.5


@dataclass
class ScoreTable:
    """Per-item scores plus the aggregate statistics driving plan construction.

    ``scores[j]`` and ``marginal[j]`` are indexed by 0-based item index.
    Items whose standalone insertion gain is nonpositive (or that cannot fit
    at all) are excluded from ``order``, ``avg_score``, ``max_score`` and the
    positive count ``l``.
    """

    scores: list[float]
    marginal: list[float]
    avg_score: float
    max_score: float
    positive_count: int
    ratio: float
    order: list[int]  # 1-based item indices, descending score, ties by index


def item_score(inst: Instance, cache: PrefixCache, item: int, alpha: float) -> float:
    """Score of one item under the current tour; +inf when the suffix
    distance is zero (the item is effectively free to carry)."""
    if not (1 <= item <= inst.m):
        raise IndexError(f"item index out of range: {item}")
    it = inst.items[item - 1]
    suffix = float(cache.suffix_dist[int(cache.position[it.city - 1])])
    if suffix == 0.0:
        return math.inf
    return it.profit / (it.weight ** alpha * suffix)


def marginal_gain(inst: Instance, cache: PrefixCache, item: int) -> float:
    """Standalone insertion gain of one item into an empty knapsack,
    charging the slowed speed over the whole tour suffix.

    Items heavier than the capacity can never be picked and get -inf.
    """
    if not (1 <= item <= inst.m):
        raise IndexError(f"item index out of range: {item}")
    it = inst.items[item - 1]
    v = inst.v_max - it.weight * inst.weight_velocity_slope
    if it.weight > inst.capacity or v <= 0:
        return -math.inf
    suffix = float(cache.suffix_dist[int(cache.position[it.city - 1])])
    return it.profit - inst.renting_ratio * suffix / v


def build_score_table(inst: Instance, cache: PrefixCache, alpha: float = DEFAULT_ALPHA) -> ScoreTable:
    scores = [item_score(inst, cache, j, alpha) for j in range(1, inst.m + 1)]
    marginal = [marginal_gain(inst, cache, j) for j in range(1, inst.m + 1)]
    eligible = [j for j in range(1, inst.m + 1) if marginal[j - 1] > 0]
    order = sorted(eligible, key=lambda j: (-scores[j - 1], j))
    l = len(eligible)
    if l:
        finite = [scores[j - 1] for j in eligible if math.isfinite(scores[j - 1])]
        avg = sum(finite) / l if finite else math.inf
        mx = max(scores[j - 1] for j in eligible)
    else:
        avg = 0.0
        mx = 0.0
    return ScoreTable(
        scores=scores,
        marginal=marginal,
        avg_score=avg,
        max_score=mx,
        positive_count=l,
        ratio=l / inst.m if inst.m else 0.0,
        order=order,
    )
