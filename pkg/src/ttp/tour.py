"""Tour construction and 2-OPT improvement over Delaunay candidate edges."""

from __future__ import annotations

import math
import time as _time
from random import Random
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import Delaunay, QhullError

from ttp.evaluate import GAIN_EPS, PrefixCache, Solution, build_prefix_cache, velocity_at
from ttp.instance import EdgeWeightType, Instance

CandidateLists = dict[int, list[int]]


def nearest_neighbor_tour(inst: Instance, start: int = 1, rng: Optional[Random] = None) -> list[int]:
    """Greedy nearest-neighbour tour from ``start``; ties broken by lowest id.

    When ``rng`` is given the second city is chosen uniformly at random and
    the rest of the walk stays greedy, which is how the solver diversifies
    restarts.
    """
    unvisited = set(range(1, inst.n + 1))
    unvisited.discard(start)
    tour = [start]
    if rng is not None and unvisited:
        second = rng.choice(sorted(unvisited))
        tour.append(second)
        unvisited.discard(second)
    while unvisited:
        here = tour[-1]
        nxt = min(unvisited, key=lambda c: (inst.distance(here, c), c))
        tour.append(nxt)
        unvisited.discard(nxt)
    return tour


def _knn_candidates(inst: Instance, k: int = 8) -> CandidateLists:
    k = min(k, inst.n - 1)
    cand: CandidateLists = {}
    for i in range(1, inst.n + 1):
        others = sorted(
            (c for c in range(1, inst.n + 1) if c != i),
            key=lambda c: (inst.distance(i, c), c),
        )
        cand[i] = others[:k]
    # symmetrize: a knn relation is not necessarily mutual
    for i in range(1, inst.n + 1):
        for j in cand[i]:
            if i not in cand[j]:
                cand[j].append(i)
    for i in cand:
        cand[i].sort(key=lambda c: (inst.distance(i, c), c))
    return cand


def delaunay_candidates(inst: Instance) -> CandidateLists:
    """Neighbour lists from the Delaunay triangulation of the city coordinates.

    EXPLICIT-distance instances (no coordinates) and degenerate point sets
    fall back to k-nearest-neighbour lists (k=8).  Duplicate coordinates are
    perturbed deterministically by an index-scaled epsilon first.
    """
    if inst.coords is None:
        return _knn_candidates(inst)
    pts = np.array(inst.coords, dtype=float)
    if len(np.unique(pts, axis=0)) != len(pts):
        span = max(float(np.ptp(pts)), 1.0)
        eps = 1e-9 * span
        seen: dict[tuple[float, float], int] = {}
        for i in range(len(pts)):
            key = (pts[i, 0], pts[i, 1])
            if key in seen:
                pts[i] += eps * (i + 1)
            else:
                seen[key] = i
    try:
        tri = Delaunay(pts)
    except QhullError:
        return _knn_candidates(inst)
    neighbours: dict[int, set[int]] = {i: set() for i in range(1, inst.n + 1)}
    for simplex in tri.simplices:
        for a in simplex:
            for b in simplex:
                if a != b:
                    neighbours[a + 1].add(b + 1)
    return {
        i: sorted(ns, key=lambda c: (inst.distance(i, c), c))
        for i, ns in neighbours.items()
    }


def reverse_segment(seq: Sequence, i: int, j: int) -> list:
    """Reverse the elements between 1-based positions ``i`` and ``j`` inclusive.

    Works on any element type (city ids, or per-city item sets when walking
    attribute sequences in reverse).
    """
    if not (1 <= i <= j <= len(seq)):
        raise IndexError(f"segment ({i}, {j}) out of bounds for length {len(seq)}")
    out = list(seq)
    out[i - 1 : j] = out[i - 1 : j][::-1]
    return out


def _time_after_reversal(
    inst: Instance,
    tour: list[int],
    w_city: np.ndarray,
    cache: PrefixCache,
    a: int,
    b: int,
) -> float:
    """Total travel time if tour positions [a, b] (0-based, a >= 1) were
    reversed, reusing the prefix untouched by the move."""
    t = float(cache.arrive_time[a - 1])
    cum = float(cache.cum_weight[a - 1])
    v = velocity_at(inst, cum)
    prev = tour[a - 1]
    n = len(tour)
    for k in range(b, a - 1, -1):
        city = tour[k]
        t += inst.distance(prev, city) / v
        cum += w_city[city - 1]
        v = velocity_at(inst, cum)
        prev = city
    for k in range(b + 1, n):
        city = tour[k]
        t += inst.distance(prev, city) / v
        cum += w_city[city - 1]
        v = velocity_at(inst, cum)
        prev = city
    t += inst.distance(prev, tour[0]) / v
    return t


def two_opt_improve(
    inst: Instance,
    sol: Solution,
    cache: Optional[PrefixCache],
    candidates: CandidateLists,
    deadline: Optional[float] = None,
) -> Solution:
    """2-OPT descent on the tour, scored against the full TTP gain with the
    packing held fixed.

    Only moves creating a candidate-list edge are probed; first-improvement
    acceptance, scanning by tour position then candidate order.  Runs until a
    full pass finds no improving move or the deadline passes.
    """
    from ttp.evaluate import _city_weights  # local import avoids cycle at module load

    sol = sol.copy()
    w_city = _city_weights(inst, sol.packing)
    if cache is None or list(cache.position[np.array(sol.tour) - 1]) != list(range(inst.n)):
        cache = build_prefix_cache(inst, sol)
    n = inst.n
    r = inst.renting_ratio
    improved = True
    while improved:
        improved = False
        for a in range(1, n):
            if deadline is not None and _time.monotonic() >= deadline:
                return sol
            u = sol.tour[a - 1]
            for v in candidates[u]:
                b = int(cache.position[v - 1])
                if b <= a or b > n - 1:
                    continue
                new_time = _time_after_reversal(inst, sol.tour, w_city, cache, a, b)
                # gain delta is -R * (time delta); with R = 0 the objective
                # cannot improve, so fall back to plain time descent ties off
                if r * (cache.total_time - new_time) > GAIN_EPS:
                    sol.tour[a : b + 1] = sol.tour[a : b + 1][::-1]
                    cache = build_prefix_cache(inst, sol)
                    improved = True
                    break
            if improved:
                break
    return sol
