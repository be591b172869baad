"""Shared test helpers, kept deliberately independent of the library paths.

``reference_rows`` re-derives a design run by run with plain Python loops
and the Gray-map substitution table; it shares no code with the vectorized
builder it checks.  ``compositions_count`` counts integer compositions
recursively as an independent enumeration oracle.
"""

from __future__ import annotations

from itertools import product

from qcdesign import Family, GeneratorSpec

GRAY_PAIRS = {0: (1, 1), 1: (1, -1), 2: (-1, -1), 3: (-1, 1)}


def reference_rows(spec: GeneratorSpec) -> list[list[int]]:
    """Evaluate every run of a design directly from the generator data."""
    rows = []
    branch_values = (0, 1) if spec.family.branched else (0,)
    for a0 in branch_values:
        for a in product(range(4), repeat=spec.n):
            t_u = sum(x * y for x, y in zip(a, spec.u))
            t_v = sum(x * y for x, y in zip(a, spec.v))
            if spec.family.branched:
                t_u += spec.u0 * a0
                t_v += spec.v0 * a0
            row = list(GRAY_PAIRS[t_u % 4]) + list(GRAY_PAIRS[t_v % 4])
            if spec.family.drops_first_check:
                row = row[1:]
            if spec.family.branched:
                row.append(1 if a0 == 0 else -1)
            for aj in a:
                row.extend(GRAY_PAIRS[aj])
            rows.append(row)
    return rows


def compositions_count(n: int, parts: int) -> int:
    """Count compositions of n into `parts` nonnegative parts, recursively."""
    if parts == 1:
        return 1
    return sum(compositions_count(n - first, parts - 1) for first in range(n + 1))
