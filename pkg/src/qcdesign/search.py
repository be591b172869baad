"""Exhaustive optimization over generator profiles and reference tables.

The profile space for n free coordinates is the C(n+9, 9) compositions of n
into ten class counts; branched families additionally range over the merged
(u0, v0) column classes.  Candidates are compared on exact integer keys, so
results are deterministic and independent of evaluation order.

Ties are real: distinct profiles (and distinct u0v0 classes) can share the
optimal wordlength pattern, resolution, and projectivity.  ``optimize``
therefore reports the full tie set under its refinement pipeline, and table
verification checks that the published design is among the ties with exactly
the published metrics.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

from .oracle import projectivity as oracle_projectivity
from .qc_core import DesignMatrix, Family, GeneratorProfile, build_design, spec_for
from .spectrum import Resolution, WordSpectrum, spectrum_metrics
from .theory import (
    U0V0_CLASSES_EIGHTH,
    U0V0_CLASSES_SIXTEENTH,
    _raw_family,
    family_spectrum,
    projectivity_bound,
    u0v0_class,
)

DEFAULT_MAX_N = 8

U0V0 = tuple[int, int]
Candidate = tuple[GeneratorProfile, U0V0 | None]


class Criterion(Enum):
    RESOLUTION = "resolution"
    ABERRATION = "aberration"
    PROJECTIVITY = "projectivity"

    @classmethod
    def from_label(cls, label: str) -> "Criterion":
        for c in cls:
            if c.value == label:
                return c
        raise ValueError(f"unknown criterion {label!r}")


def enumerate_profiles(n: int) -> Iterator[GeneratorProfile]:
    """All C(n+9, 9) compositions of n into ten counts, lexicographically."""
    if n < 1:
        raise ValueError("n must be positive")

    def rec(prefix: tuple[int, ...], remaining: int) -> Iterator[tuple[int, ...]]:
        if len(prefix) == 9:
            yield prefix + (remaining,)
            return
        for x in range(remaining + 1):
            yield from rec(prefix + (x,), remaining - x)

    for counts in rec((), n):
        yield GeneratorProfile(counts)


def u0v0_classes(family: Family) -> tuple[U0V0, ...]:
    if not family.branched:
        raise ValueError(f"{family.value} has no u0v0 classes")
    return U0V0_CLASSES_SIXTEENTH if family.sixteenth else U0V0_CLASSES_EIGHTH


def all_u0v0_pairs() -> tuple[U0V0, ...]:
    return tuple((a, b) for a in range(4) for b in range(4))


def _resolution_key(raw) -> tuple[int, int]:
    """Key increasing with resolution: (min length, exponent at min length)."""
    if not raw:
        return (1 << 30, 1 << 30)
    r = raw[0][0]
    return (r, min(e for length, e, _ in raw if length == r))


def _wlp_key(raw, q: int) -> tuple[int, ...]:
    """Doubled-integer wordlength pattern (A_k sums the table weights)."""
    acc = [0] * q
    for length, e, count in raw:
        acc[length - 1] += (2 * count) >> (2 * e)
    return tuple(acc)


def _candidate_order(cand: Candidate) -> tuple:
    profile, u0v0 = cand
    return (profile.counts, u0v0 if u0v0 is not None else (-1, -1))


@dataclass(frozen=True)
class RegularReference:
    """Published regular minimum-aberration benchmark for one design size."""

    resolution: Fraction
    wlp_comparison: str


@dataclass(frozen=True)
class SearchResult:
    family: Family
    n: int
    criterion: Criterion
    profile: GeneratorProfile
    u0v0: U0V0 | None
    resolution: Resolution
    wlp: tuple[Fraction, ...]
    spectrum: WordSpectrum
    projectivity: int | None
    criteria_coincide: bool
    ties: tuple[Candidate, ...]
    regular_reference: RegularReference | None

    @property
    def wlp_from_4(self) -> tuple[Fraction, ...]:
        return self.wlp[3:]


def _candidates(family: Family, n: int, all_pairs: bool) -> list[Candidate]:
    if family.branched:
        pairs = all_u0v0_pairs() if all_pairs else u0v0_classes(family)
        return [
            (profile, pair)
            for profile in enumerate_profiles(n)
            for pair in pairs
        ]
    return [(profile, None) for profile in enumerate_profiles(n)]


def _check_class_ties(family: Family, n: int) -> None:
    """Assert that u0v0 values in one merged column give identical spectra."""
    for profile in enumerate_profiles(n):
        by_class: dict[U0V0, tuple] = {}
        for pair in all_u0v0_pairs():
            raw = tuple(_raw_family(family, profile, pair))
            rep = u0v0_class(family, pair)
            if rep in by_class:
                if by_class[rep] != raw:
                    raise AssertionError(
                        f"u0v0 {pair} differs from its class representative "
                        f"{rep} on profile {profile.digits}"
                    )
            else:
                by_class[rep] = raw


def _design_for(family: Family, candidate: Candidate) -> DesignMatrix:
    profile, u0v0 = candidate
    return build_design(spec_for(family, profile, u0v0))


def optimize(
    n: int,
    family: Family,
    criterion: Criterion,
    max_n: int = DEFAULT_MAX_N,
    all_pairs: bool = False,
    with_projectivity: bool = True,
) -> SearchResult:
    """Best design over all profiles (and u0v0 classes) for one criterion.

    The winner set is refined in a fixed order: criterion value, then full
    wordlength pattern, then resolution, then (optionally) oracle
    projectivity of the realized designs, and finally the lexicographically
    smallest (profile, u0v0).  The surviving tie set is reported in full.
    """
    if not 1 <= n <= max_n:
        raise ValueError(f"n must lie in 1..{max_n}")
    if all_pairs and family.branched:
        _check_class_ties(family, n)
    q = family.factor_count(n)

    scored: list[tuple[tuple[int, ...], tuple[int, int], Candidate]] = []
    for cand in _candidates(family, n, all_pairs):
        raw = _raw_family(family, cand[0], cand[1])
        scored.append((_wlp_key(raw, q), _resolution_key(raw), cand))

    min_wlp = min(s[0] for s in scored)
    max_res = max(s[1] for s in scored)
    ma_set = [s for s in scored if s[0] == min_wlp]
    criteria_coincide = any(s[1] == max_res for s in ma_set)

    if criterion is Criterion.ABERRATION:
        pool = ma_set
        best_res = max(s[1] for s in pool)
        pool = [s for s in pool if s[1] == best_res]
    elif criterion is Criterion.RESOLUTION:
        pool = [s for s in scored if s[1] == max_res]
        best_wlp = min(s[0] for s in pool)
        pool = [s for s in pool if s[0] == best_wlp]
    elif criterion is Criterion.PROJECTIVITY:
        projs = [
            (oracle_projectivity(_design_for(family, s[2])), s) for s in scored
        ]
        top = max(p for p, _ in projs)
        pool = [s for p, s in projs if p == top]
        best_wlp = min(s[0] for s in pool)
        pool = [s for s in pool if s[0] == best_wlp]
        best_res = max(s[1] for s in pool)
        pool = [s for s in pool if s[1] == best_res]
    else:  # pragma: no cover
        raise ValueError(criterion)

    ties = sorted((s[2] for s in pool), key=_candidate_order)
    best_projectivity: int | None = None
    if criterion is Criterion.PROJECTIVITY:
        best_projectivity = max(p for p, _ in projs)
    elif with_projectivity:
        by_proj = [
            (oracle_projectivity(_design_for(family, cand)), cand)
            for cand in ties
        ]
        best_projectivity = max(p for p, _ in by_proj)
        ties = [cand for p, cand in by_proj if p == best_projectivity]

    winner = min(ties, key=_candidate_order)
    spectrum = family_spectrum(family, winner[0], winner[1])
    resolution, wlp = spectrum_metrics(spectrum, q)
    if with_projectivity and best_projectivity is None:
        best_projectivity = oracle_projectivity(_design_for(family, winner))
    return SearchResult(
        family=family,
        n=n,
        criterion=criterion,
        profile=winner[0],
        u0v0=winner[1],
        resolution=resolution,
        wlp=wlp,
        spectrum=spectrum,
        projectivity=best_projectivity,
        criteria_coincide=criteria_coincide,
        ties=tuple(ties),
        regular_reference=_REGULAR_REFERENCE.get((family, n)),
    )


@lru_cache(maxsize=None)
def _optimize_cached(
    n: int, family: Family, criterion: Criterion, with_projectivity: bool
) -> SearchResult:
    return optimize(n, family, criterion, with_projectivity=with_projectivity)


def orthogonal_array_ceiling(q: int, fraction: str) -> int:
    """Highest projectivity any design of this size could have.

    Exceeding it would require an index-one orthogonal array of strength
    q - 4 (sixteenth fractions) or q - 3 (eighth fractions), which does not
    exist; rows attaining the ceiling are globally optimal among all
    designs, not just the code-derived ones.
    """
    if fraction == "sixteenth":
        return q - 5
    if fraction == "eighth":
        return q - 4
    raise ValueError("fraction must be 'sixteenth' or 'eighth'")


# ---------------------------------------------------------------------------
# Published reference values: the optimal-design tables (ids 3 and 4) and
# their projectivity tables (ids 5 and 6), plus the regular minimum-
# aberration benchmarks quoted alongside them.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TableRowSpec:
    label: str
    family: Family
    n: int
    profile: str
    u0v0: U0V0 | None
    resolution: Fraction
    wlp_from_4: tuple[int, ...]
    qc_projectivity: int
    regular_projectivity: int
    regular: RegularReference


def _row(label, family, n, profile, u0v0, res, a4, proj, reg_proj, reg_r, cmp):
    return TableRowSpec(
        label, family, n, profile, u0v0, Fraction(res), tuple(a4),
        proj, reg_proj, RegularReference(Fraction(reg_r), cmp),
    )


SIXTEENTH_ROWS: tuple[TableRowSpec, ...] = (
    _row("2^{8-4}", Family.SIXTEENTH_EVEN, 2, "0011000000", None,
         4, (14, 0, 0, 0, 1), 3, 3, 4, "same"),
    _row("2^{9-4}", Family.SIXTEENTH_ODD, 2, "0011000000", (1, 1),
         Fraction(9, 2), (6, 8, 0, 0, 1, 0), 4, 3, 4, "same"),
    _row("2^{10-4}", Family.SIXTEENTH_EVEN, 3, "0001110000", None,
         Fraction(9, 2), (2, 8, 4, 0, 1, 0, 0), 5, 3, 4, "same"),
    _row("2^{11-4}", Family.SIXTEENTH_ODD, 3, "0001110000", (1, 2),
         Fraction(11, 2), (0, 6, 6, 2, 1, 0, 0, 0), 6, 4, 5, "same"),
    _row("2^{12-4}", Family.SIXTEENTH_EVEN, 4, "0011110000", None,
         Fraction(13, 2), (0, 0, 12, 0, 3, 0, 0, 0, 0), 7, 5, 6, "same"),
    _row("2^{13-4}", Family.SIXTEENTH_ODD, 4, "0011110000", (2, 2),
         Fraction(13, 2), (0, 0, 4, 8, 3, 0, 0, 0, 0, 0), 7, 5, 6, "same"),
    _row("2^{14-4}", Family.SIXTEENTH_EVEN, 5, "1011110000", None,
         Fraction(13, 2), (0, 0, 2, 8, 3, 0, 2, 0, 0, 0, 0), 7, 6, 7, "better"),
)

EIGHTH_ROWS: tuple[TableRowSpec, ...] = (
    _row("2^{7-3}", Family.EIGHTH_EVEN, 2, "0011000000", None,
         4, (7, 0, 0, 0), 3, 3, 4, "same"),
    _row("2^{8-3}", Family.EIGHTH_ODD, 2, "0011000000", (1, 1),
         Fraction(9, 2), (3, 4, 0, 0, 0), 4, 3, 4, "same"),
    _row("2^{9-3}", Family.EIGHTH_EVEN, 3, "0010110000", None,
         Fraction(9, 2), (1, 4, 2, 0, 0, 0), 5, 3, 4, "same"),
    _row("2^{10-3}", Family.EIGHTH_ODD, 3, "0010110000", (2, 1),
         Fraction(11, 2), (0, 3, 3, 1, 0, 0, 0), 6, 4, 5, "same"),
    _row("2^{11-3}", Family.EIGHTH_EVEN, 4, "0011110000", None,
         Fraction(13, 2), (0, 0, 6, 0, 1, 0, 0, 0), 7, 5, 6, "same"),
    _row("2^{12-3}", Family.EIGHTH_ODD, 4, "0011110000", (1, 2),
         Fraction(27, 4), (0, 0, 2, 4, 1, 0, 0, 0, 0), 7, 5, 6, "same"),
    _row("2^{13-3}", Family.EIGHTH_EVEN, 5, "0021110000", None,
         Fraction(31, 4), (0, 0, 0, 4, 3, 0, 0, 0, 0, 0), 7, 6, 7, "same"),
)

_REGULAR_REFERENCE: dict[tuple[Family, int], RegularReference] = {
    (row.family, row.n): row.regular for row in SIXTEENTH_ROWS + EIGHTH_ROWS
}


@dataclass(frozen=True)
class ReportRow:
    """One verified table row: computed results against published values."""

    label: str
    family: Family
    n: int
    result: SearchResult
    expected: TableRowSpec
    flags: dict[str, bool]

    @property
    def passed(self) -> bool:
        return all(self.flags.values())


def _optima_rows(which: int) -> tuple[TableRowSpec, ...]:
    if which in (3, 5):
        return SIXTEENTH_ROWS
    if which in (4, 6):
        return EIGHTH_ROWS
    raise ValueError("table id must be 3, 4, 5, or 6")


def reproduce_table(which: int) -> list[ReportRow]:
    """Re-derive one reference table and flag agreement row by row.

    Tables 3 and 4 verify the optimal (profile, u0v0, resolution, wordlength
    pattern) per design size; published entries must be in the search tie
    set with exact metrics.  Tables 5 and 6 verify the oracle projectivity
    of those optima, including (for sixteenth fractions) that it attains the
    closed-form bound.
    """
    rows = []
    for spec in _optima_rows(which):
        result = _optimize_cached(spec.n, spec.family, Criterion.ABERRATION, True)
        q = spec.family.factor_count(spec.n)
        expected_wlp = tuple(
            Fraction(a) for a in ((0,) * 3 + spec.wlp_from_4)
        )
        listed = (GeneratorProfile.from_digits(spec.profile), spec.u0v0)
        if which in (3, 4):
            flags = {
                "resolution": result.resolution == spec.resolution,
                "wlp": result.wlp == expected_wlp,
                "listed_design_in_ties": listed in result.ties,
                "criteria_coincide": result.criteria_coincide,
            }
        else:
            flags = {
                "projectivity": result.projectivity == spec.qc_projectivity,
                "listed_design_in_ties": listed in result.ties,
            }
            if spec.family.sixteenth:
                flags["attains_bound"] = (
                    result.projectivity == projectivity_bound(spec.n, spec.family)
                )
            fraction = "sixteenth" if spec.family.sixteenth else "eighth"
            ceiling = orthogonal_array_ceiling(q, fraction)
            if result.projectivity == ceiling:
                flags["globally_optimal"] = True
        rows.append(ReportRow(spec.label, spec.family, spec.n, result, spec, flags))
    return rows
