"""Peaks of a persistence curve and community-size selection."""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction

from .shrink import PersistenceCurve

__all__ = ["find_peaks", "select_k", "score_against_truth", "TruthScore", "peak_report"]

RULES = ("first", "median")


def _values(curve: PersistenceCurve | Mapping[int, Fraction]) -> dict[int, Fraction]:
    return curve.alphas() if isinstance(curve, PersistenceCurve) else dict(curve)


def find_peaks(curve: PersistenceCurve | Mapping[int, Fraction]) -> list[int]:
    """Interior local maxima, ascending.

    A plateau ``a[k-1] < a[k] = ... = a[k+t] > a[k+t+1]`` counts once, at its
    smallest ``k``. Both neighbours must exist; the first and last sizes of
    the curve are never peaks.
    """
    vals = _values(curve)
    if len(vals) < 3:
        raise ValueError("curve needs at least three points")
    peaks = []
    ks = sorted(vals)
    i = 0
    while i < len(ks):
        k = ks[i]
        j = i
        while j + 1 < len(ks) and ks[j + 1] == ks[j] + 1 and vals[ks[j + 1]] == vals[k]:
            j += 1
        end = ks[j]
        left, right = vals.get(k - 1), vals.get(end + 1)
        if left is not None and right is not None and left < vals[k] > right:
            peaks.append(k)
        i = j + 1
    return peaks


def select_k(peaks: Iterable[int], rule: str) -> int | None:
    """``first`` is the smallest peak; ``median`` the ``floor((l+1)/2)``-th (1-based)."""
    if rule not in RULES:
        raise ValueError(f"unknown rule {rule!r}; expected one of {RULES}")
    ordered = sorted(peaks)
    if not ordered:
        return None
    if rule == "first":
        return ordered[0]
    return ordered[(len(ordered) + 1) // 2 - 1]


@dataclass(frozen=True)
class TruthScore:
    first_hit: bool
    median_hit: bool
    at_least_one: bool
    all_covered: bool


def score_against_truth(peaks: Iterable[int], truth_sizes: Iterable[int]) -> TruthScore:
    peaks = sorted(set(peaks))
    truth = set(truth_sizes)
    if not truth:
        raise ValueError("truth sizes must be non-empty")
    first, median = select_k(peaks, "first"), select_k(peaks, "median")
    return TruthScore(
        first_hit=first in truth,
        median_hit=median in truth,
        at_least_one=bool(truth.intersection(peaks)),
        all_covered=truth.issubset(peaks),
    )


def peak_report(curve: PersistenceCurve) -> dict:
    peaks = find_peaks(curve)
    return {
        "peaks": peaks,
        "first": select_k(peaks, "first"),
        "median": select_k(peaks, "median"),
        "alphas": {str(k): float(a) for k, a in curve.alphas().items()},
    }
