"""Exact and incremental evaluation of the TTP objective.

The gain of a (tour, packing) pair is total picked profit minus the knapsack
rent, where rent is the renting ratio times the load-dependent travel time.
Velocity drops linearly with carried weight from v_max (empty) to v_min
(full).  Over-capacity packings are evaluated with velocity clamped at v_min
and flagged infeasible instead of being rejected, so search operators can
probe and discard them uniformly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ttp.instance import Instance

# Absolute tolerance used when deciding improvement ties on gains.
GAIN_EPS = 1e-9


@dataclass
class Solution:
    """A tour permutation (1-based city ids, starting at city 1) plus a
    binary picking plan over items 1..m."""

    tour: list[int]
    packing: list[int]

    def copy(self) -> "Solution":
        return Solution(list(self.tour), list(self.packing))

    def validate(self, inst: Instance) -> None:
        if len(self.tour) != inst.n or sorted(self.tour) != list(range(1, inst.n + 1)):
            raise ValueError("tour is not a permutation of 1..n")
        if self.tour[0] != 1:
            raise ValueError("tour must start at city 1")
        if len(self.packing) != inst.m:
            raise ValueError("packing length does not match item count")
        if any(z not in (0, 1) for z in self.packing):
            raise ValueError("packing entries must be 0 or 1")


@dataclass(frozen=True)
class EvalResult:
    total_profit: float
    travel_time: float
    gain: float
    final_weight: float
    feasible: bool


@dataclass
class PrefixCache:
    """Per-tour-position prefix data for incremental probing.

    ``cum_weight[k]`` is the carried weight after collecting at the city in
    tour position k; ``arrive_time[k]`` the travel time accumulated upon
    arriving there; ``suffix_dist[k]`` the tour distance from that city to
    the end of the cyclic tour (back to city 1); ``position[city]`` the
    0-based tour position of a 1-based city id.
    """

    cum_weight: np.ndarray
    arrive_time: np.ndarray
    suffix_dist: np.ndarray
    leg_dist: np.ndarray  # leg_dist[k] = d(tour[k], tour[k+1 mod n])
    position: np.ndarray  # position[city-1] = tour position of city
    total_time: float
    total_profit: float


def city_weight(inst: Instance, packing: list[int], city: int) -> float:
    """Total weight of picked items homed at ``city``."""
    return sum(
        it.weight for it in inst.items if it.city == city and packing[it.index - 1]
    )


def velocity_at(inst: Instance, cumulative_weight: float) -> float:
    """Velocity under the given load; exactly v_min at capacity, clamped
    at v_min past it."""
    if cumulative_weight >= inst.capacity:
        return inst.v_min
    v = inst.v_max - cumulative_weight * inst.weight_velocity_slope
    return max(v, inst.v_min)


def _city_weights(inst: Instance, packing: list[int]) -> np.ndarray:
    """Picked weight collected at each city, indexed by 0-based city id."""
    w = np.zeros(inst.n)
    for it in inst.items:
        if packing[it.index - 1]:
            w[it.city - 1] += it.weight
    return w


def evaluate(inst: Instance, sol: Solution) -> EvalResult:
    """Full objective evaluation of a solution."""
    if len(sol.packing) != inst.m:
        raise ValueError("packing length does not match item count")
    w_city = _city_weights(inst, sol.packing)
    total_profit = sum(
        it.profit for it in inst.items if sol.packing[it.index - 1]
    )
    time = 0.0
    cum = 0.0
    n = inst.n
    for k in range(n):
        cum += w_city[sol.tour[k] - 1]
        nxt = sol.tour[(k + 1) % n]
        time += inst.distance(sol.tour[k], nxt) / velocity_at(inst, cum)
    final_weight = float(cum)
    gain = total_profit - inst.renting_ratio * time
    return EvalResult(
        total_profit=float(total_profit),
        travel_time=time,
        gain=gain,
        final_weight=final_weight,
        feasible=final_weight <= inst.capacity + 1e-12,
    )


def build_prefix_cache(inst: Instance, sol: Solution) -> PrefixCache:
    n = inst.n
    w_city = _city_weights(inst, sol.packing)
    cum_weight = np.zeros(n)
    arrive_time = np.zeros(n)
    leg_dist = np.zeros(n)
    position = np.zeros(n, dtype=int)
    cum = 0.0
    time = 0.0
    for k in range(n):
        city = sol.tour[k]
        position[city - 1] = k
        arrive_time[k] = time
        cum += w_city[city - 1]
        cum_weight[k] = cum
        nxt = sol.tour[(k + 1) % n]
        leg_dist[k] = inst.distance(city, nxt)
        time += leg_dist[k] / velocity_at(inst, cum)
    suffix_dist = np.cumsum(leg_dist[::-1])[::-1].copy()
    total_profit = sum(it.profit for it in inst.items if sol.packing[it.index - 1])
    return PrefixCache(
        cum_weight=cum_weight,
        arrive_time=arrive_time,
        suffix_dist=suffix_dist,
        leg_dist=leg_dist,
        position=position,
        total_time=time,
        total_profit=float(total_profit),
    )


def delta_flip(inst: Instance, sol: Solution, cache: PrefixCache, item: int) -> float:
    """Gain change from flipping item ``item`` (1-based), in time proportional
    to the tour suffix after the item's home city."""
    if not (1 <= item <= inst.m):
        raise IndexError(f"item index out of range: {item}")
    it = inst.items[item - 1]
    sign = -1.0 if sol.packing[item - 1] else 1.0
    k0 = int(cache.position[it.city - 1])
    dt = 0.0
    n = inst.n
    for k in range(k0, n):
        old_w = cache.cum_weight[k]
        new_w = old_w + sign * it.weight
        dt += cache.leg_dist[k] * (
            1.0 / velocity_at(inst, new_w) - 1.0 / velocity_at(inst, old_w)
        )
    return sign * it.profit - inst.renting_ratio * dt
