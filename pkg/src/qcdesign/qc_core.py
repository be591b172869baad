"""Construction of two-level designs from quaternary (Z4) generator data.

A generator pair (u, v) over Z4, together with an optional branching pair
(u0, v0), defines a code whose binary image under the Gray map is an N x q
matrix of +1/-1 entries.  Four families are supported:

==================  =========  ============  =======================
family              runs N     factors q     extra generator data
==================  =========  ============  =======================
``SIXTEENTH_EVEN``  2^(2n)     2n + 4        none
``EIGHTH_EVEN``     2^(2n)     2n + 3        none (first check column dropped)
``SIXTEENTH_ODD``   2^(2n+1)   2n + 5        u0, v0
``EIGHTH_ODD``      2^(2n+1)   2n + 4        u0, v0 (first check column dropped)
==================  =========  ============  =======================
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

Z4 = (0, 1, 2, 3)

#: Gray map on Z4, written with levels +1/-1.
GRAY = {0: (1, 1), 1: (1, -1), 2: (-1, -1), 3: (-1, 1)}

# First and second Gray coordinates of k in Z4, as lookup arrays.
_GRAY1 = np.array([1, 1, -1, -1], dtype=np.int8)
_GRAY2 = np.array([1, -1, -1, 1], dtype=np.int8)


class Family(Enum):
    """The four supported design families."""

    SIXTEENTH_EVEN = "sixteenth-even"
    EIGHTH_EVEN = "eighth-even"
    SIXTEENTH_ODD = "sixteenth-odd"
    EIGHTH_ODD = "eighth-odd"

    @property
    def branched(self) -> bool:
        """True for the odd-power-of-two run sizes (u0/v0 required)."""
        return self in (Family.SIXTEENTH_ODD, Family.EIGHTH_ODD)

    @property
    def drops_first_check(self) -> bool:
        """True for the eighth fractions, which omit column F1."""
        return self in (Family.EIGHTH_EVEN, Family.EIGHTH_ODD)

    @property
    def sixteenth(self) -> bool:
        return self in (Family.SIXTEENTH_EVEN, Family.SIXTEENTH_ODD)

    def run_count(self, n: int) -> int:
        return 2 ** (2 * n + 1) if self.branched else 2 ** (2 * n)

    def factor_count(self, n: int) -> int:
        q = 2 * n + 4
        if self.branched:
            q += 1
        if self.drops_first_check:
            q -= 1
        return q

    @classmethod
    def from_label(cls, label: str) -> "Family":
        for fam in cls:
            if fam.value == label:
                return fam
        raise ValueError(f"unknown family {label!r}")


def _check_z4(values: Iterable[int], what: str) -> tuple[int, ...]:
    vals = tuple(int(x) for x in values)
    for x in vals:
        if x not in Z4:
            raise ValueError(f"{what} entries must lie in {{0,1,2,3}}, got {x}")
    return vals


@dataclass(frozen=True)
class GeneratorSpec:
    """Generator data for one design: family tag plus Z4 vectors.

    ``u`` and ``v`` have length ``n``; ``u0``/``v0`` are single Z4 elements
    present exactly for the branched (odd-run) families.
    """

    family: Family
    n: int
    u: tuple[int, ...]
    v: tuple[int, ...]
    u0: int | None = None
    v0: int | None = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be a positive integer")
        object.__setattr__(self, "u", _check_z4(self.u, "u"))
        object.__setattr__(self, "v", _check_z4(self.v, "v"))
        if len(self.u) != self.n or len(self.v) != self.n:
            raise ValueError("u and v must both have length n")
        if self.family.branched:
            if self.u0 is None or self.v0 is None:
                raise ValueError(f"{self.family.value} requires u0 and v0")
            if self.u0 not in Z4 or self.v0 not in Z4:
                raise ValueError("u0 and v0 must lie in {0,1,2,3}")
        elif self.u0 is not None or self.v0 is not None:
            raise ValueError(f"{self.family.value} does not take u0/v0")

    @property
    def u0v0(self) -> tuple[int, int] | None:
        if self.u0 is None:
            return None
        return (self.u0, self.v0)

    @property
    def run_count(self) -> int:
        return self.family.run_count(self.n)

    @property
    def factor_count(self) -> int:
        return self.family.factor_count(self.n)


def column_labels(family: Family, n: int) -> tuple[str, ...]:
    """Ordered factor labels: F1..F4 checks, F5 for branched, then pairs Fj1, Fj2."""
    labels = ["F1", "F2", "F3", "F4"]
    if family.drops_first_check:
        labels = labels[1:]
    if family.branched:
        labels.append("F5")
    for j in range(1, n + 1):
        labels.append(f"F{j}1")
        labels.append(f"F{j}2")
    return tuple(labels)


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    """An N x q array over {+1, -1} with labeled columns."""

    columns: tuple[str, ...]
    rows: np.ndarray

    def __post_init__(self) -> None:
        rows = np.asarray(self.rows, dtype=np.int8)
        if rows.ndim != 2:
            raise ValueError("rows must be a 2-d array")
        if rows.shape[1] != len(self.columns):
            raise ValueError("row width must match the number of column labels")
        if not np.all(np.abs(rows) == 1):
            raise ValueError("design entries must be +1 or -1")
        rows.flags.writeable = False
        object.__setattr__(self, "rows", rows)

    @property
    def n_runs(self) -> int:
        return self.rows.shape[0]

    @property
    def n_factors(self) -> int:
        return self.rows.shape[1]

    def column_index(self, label: str) -> int:
        try:
            return self.columns.index(label)
        except ValueError:
            raise KeyError(f"unknown column {label!r}") from None

    def drop(self, label: str) -> "DesignMatrix":
        """Return a copy with one column removed."""
        i = self.column_index(label)
        cols = self.columns[:i] + self.columns[i + 1 :]
        return DesignMatrix(cols, np.delete(self.rows, i, axis=1))


def build_design(spec: GeneratorSpec) -> DesignMatrix:
    """Materialise the design matrix for a generator spec.

    Rows enumerate a = (a1, ..., an) over Z4^n (even-run families), preceded
    by a0 in {0, 1} for branched families; the row index is
    a0*4^n + sum_j aj*4^(n-j), so an varies fastest.  Check columns carry the
    Gray pairs of (u0*a0 +) a'u and (v0*a0 +) a'v mod 4, the branch column F5
    is +1 exactly when a0 = 0, and each pair (Fj1, Fj2) is the Gray pair of aj.
    """
    fam, n = spec.family, spec.n
    base = 4**n
    idx = np.arange(base, dtype=np.int64)
    digits = np.empty((base, n), dtype=np.int64)
    for j in range(n):
        digits[:, j] = (idx >> (2 * (n - 1 - j))) & 3

    u = np.array(spec.u, dtype=np.int64)
    v = np.array(spec.v, dtype=np.int64)
    if fam.branched:
        digits = np.vstack([digits, digits])
        a0 = np.repeat(np.array([0, 1], dtype=np.int64), base)
        tu = (digits @ u + spec.u0 * a0) % 4
        tv = (digits @ v + spec.v0 * a0) % 4
    else:
        a0 = None
        tu = (digits @ u) % 4
        tv = (digits @ v) % 4

    cols: list[np.ndarray] = [_GRAY1[tu], _GRAY2[tu], _GRAY1[tv], _GRAY2[tv]]
    if fam.drops_first_check:
        cols = cols[1:]
    if fam.branched:
        cols.append((1 - 2 * a0).astype(np.int8))
    for j in range(n):
        aj = digits[:, j]
        cols.append(_GRAY1[aj])
        cols.append(_GRAY2[aj])

    return DesignMatrix(column_labels(fam, n), np.column_stack(cols))


@dataclass(frozen=True)
class FrequencyTable:
    """Counts f[k][s] of positions j with u_j = k and v_j = s."""

    counts: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.counts) != 4 or any(len(r) != 4 for r in self.counts):
            raise ValueError("frequency table must be 4 x 4")
        if any(x < 0 for row in self.counts for x in row):
            raise ValueError("frequencies must be nonnegative")

    def __getitem__(self, ks: tuple[int, int]) -> int:
        return self.counts[ks[0]][ks[1]]

    @property
    def n(self) -> int:
        return sum(x for row in self.counts for x in row)


def frequencies(u: Sequence[int], v: Sequence[int]) -> FrequencyTable:
    """Tally how often each (k, s) pair occurs as (u_j, v_j)."""
    u = _check_z4(u, "u")
    v = _check_z4(v, "v")
    if len(u) != len(v):
        raise ValueError("u and v must have the same length")
    table = [[0] * 4 for _ in range(4)]
    for k, s in zip(u, v):
        table[k][s] += 1
    return FrequencyTable(tuple(tuple(row) for row in table))


# The ten (k, s) pair classes, listed with a canonical representative each.
# A generator position contributes to exactly one class, and the design's
# word spectrum depends on (u, v) only through the ten class counts.
_CLASS_PAIRS: tuple[tuple[tuple[int, int], ...], ...] = (
    ((1, 0), (3, 0)),
    ((0, 1), (0, 3)),
    ((1, 2), (3, 2)),
    ((2, 1), (2, 3)),
    ((1, 1), (3, 3)),
    ((1, 3), (3, 1)),
    ((0, 2),),
    ((2, 0),),
    ((2, 2),),
    ((0, 0),),
)


@dataclass(frozen=True)
class GeneratorProfile:
    """The 10-tuple of pair-class counts summarising a generator pair."""

    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.counts) != 10:
            raise ValueError("profile must have 10 entries")
        if any(x < 0 for x in self.counts):
            raise ValueError("profile entries must be nonnegative")

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def digits(self) -> str:
        if any(x > 9 for x in self.counts):
            return ",".join(str(x) for x in self.counts)
        return "".join(str(x) for x in self.counts)

    @classmethod
    def from_digits(cls, text: str) -> "GeneratorProfile":
        text = text.strip()
        if "," in text:
            parts = [int(p) for p in text.split(",")]
        else:
            parts = [int(ch) for ch in text]
        return cls(tuple(parts))


def profile_from_frequencies(freq: FrequencyTable) -> GeneratorProfile:
    """Collapse a frequency table into the ten pair-class counts."""
    return GeneratorProfile(
        tuple(sum(freq[pair] for pair in pairs) for pairs in _CLASS_PAIRS)
    )


def profile_of(u: Sequence[int], v: Sequence[int]) -> GeneratorProfile:
    return profile_from_frequencies(frequencies(u, v))


def realize_profile(profile: GeneratorProfile) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Return a canonical (u, v) whose profile is the given one.

    Uses the first-listed representative of each class, emitting class 1
    positions first.  Any member of a class gives a spectrum-equivalent
    design, so this choice is a convention, not a restriction.
    """
    if profile.n == 0:
        raise ValueError("cannot realize the all-zero profile")
    u: list[int] = []
    v: list[int] = []
    for count, pairs in zip(profile.counts, _CLASS_PAIRS):
        k, s = pairs[0]
        u.extend([k] * count)
        v.extend([s] * count)
    return tuple(u), tuple(v)


def spec_for(
    family: Family,
    profile: GeneratorProfile,
    u0v0: tuple[int, int] | None = None,
) -> GeneratorSpec:
    """Build a GeneratorSpec from a profile via its canonical realization."""
    u, v = realize_profile(profile)
    if family.branched:
        if u0v0 is None:
            raise ValueError(f"{family.value} requires u0v0")
        return GeneratorSpec(family, profile.n, u, v, u0v0[0], u0v0[1])
    if u0v0 is not None:
        raise ValueError(f"{family.value} does not take u0v0")
    return GeneratorSpec(family, profile.n, u, v)
