"""Regenerates tests/fixtures/category_c_20.ttp.

Category-C shape: 10 items per non-start city, uncorrelated profits and
weights, high knapsack capacity (80% of total item weight).  Deterministic
given the fixed seed.
"""

import random
from pathlib import Path

SEED = 20240817
N = 20
ITEMS_PER_CITY = 10


def main() -> None:
    rng = random.Random(SEED)
    coords = [(rng.randint(0, 500), rng.randint(0, 500)) for _ in range(N)]
    items = []
    idx = 1
    for city in range(2, N + 1):
        for _ in range(ITEMS_PER_CITY):
            items.append((idx, rng.randint(100, 1000), rng.randint(1, 100), city))
            idx += 1
    total_weight = sum(w for _, _, w, _ in items)
    capacity = round(0.8 * total_weight)

    lines = [
        "PROBLEM NAME: category_c_20",
        "KNAPSACK DATA TYPE: uncorrelated",
        f"DIMENSION: {N}",
        f"NUMBER OF ITEMS: {len(items)}",
        f"CAPACITY OF KNAPSACK: {capacity}",
        "MIN SPEED: 0.1",
        "MAX SPEED: 1",
        "RENTING RATIO: 5",
        "EDGE_WEIGHT_TYPE: CEIL_2D",
        "NODE_COORD_SECTION (INDEX, X, Y):",
    ]
    lines += [f"{i + 1} {x} {y}" for i, (x, y) in enumerate(coords)]
    lines.append("ITEMS SECTION (INDEX, PROFIT, WEIGHT, ASSIGNED NODE NUMBER):")
    lines += [f"{j} {p} {w} {c}" for j, p, w, c in items]

    out = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "category_c_20.ttp"
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {out} (m={len(items)}, capacity={capacity})")


if __name__ == "__main__":
    main()
