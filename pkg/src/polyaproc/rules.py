"""Replacement rules for two-color urns: deterministic and randomized.

A deterministic rule adds (a, b) balls on a white draw and (c, d) on a blue
draw.  A randomized rule draws the diagonal entries W and Z fresh at every
event from finite distributions on {0..k}; the rows (W, k-W) and (k-Z, Z)
are balanced by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

PMF_TOL = 1e-12


@dataclass(frozen=True)
class ValidationReport:
    balanced: bool
    tenable: bool
    diagnostics: str = ""

    @property
    def ok(self) -> bool:
        return self.balanced and self.tenable


@dataclass(frozen=True)
class ReplacementRule:
    """Deterministic 2x2 integer ball-addition matrix with balance factor k."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a + self.b != self.c + self.d:
            raise ValueError(
                f"unbalanced rule: row sums {self.a + self.b} != {self.c + self.d}"
            )
        if self.a + self.b < 1:
            raise ValueError("balance factor must be >= 1")

    @property
    def k(self) -> int:
        return self.a + self.b

    def row(self, which: int) -> tuple[int, int]:
        if which == 1:
            return (self.a, self.b)
        if which == 2:
            return (self.c, self.d)
        raise ValueError(f"row must be 1 or 2, got {which}")


@dataclass(frozen=True)
class EntryDistribution:
    """Finite distribution on {0..k} for a randomized diagonal entry."""

    k: int
    pmf: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "pmf", tuple(float(p) for p in self.pmf))
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if len(self.pmf) != self.k + 1:
            raise ValueError(
                f"pmf must have {self.k + 1} entries for support 0..{self.k}, "
                f"got {len(self.pmf)}"
            )
        if any(p < 0 for p in self.pmf):
            raise ValueError("pmf has negative mass")
        total = sum(self.pmf)
        if abs(total - 1.0) > PMF_TOL:
            raise ValueError(f"pmf sums to {total!r}, not 1")

    @classmethod
    def bernoulli(cls, p: float) -> "EntryDistribution":
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"Bernoulli parameter {p} outside [0, 1]")
        return cls(k=1, pmf=(1.0 - p, p))

    @classmethod
    def point_mass(cls, k: int, value: int) -> "EntryDistribution":
        if not 0 <= value <= k:
            raise ValueError(f"point mass {value} outside support 0..{k}")
        pmf = [0.0] * (k + 1)
        pmf[value] = 1.0
        return cls(k=k, pmf=tuple(pmf))

    @property
    def mean(self) -> float:
        return sum(v * p for v, p in enumerate(self.pmf))

    def sample(self, u: float) -> int:
        """Inverse-CDF sample from a uniform draw u in [0, 1)."""
        acc = 0.0
        for v, p in enumerate(self.pmf):
            acc += p
            if u < acc:
                return v
        return self.k


@dataclass(frozen=True)
class RandomizedRule:
    """Randomized rule with rows (W, k-W) and (k-Z, Z)."""

    dist_w: EntryDistribution
    dist_z: EntryDistribution

    def __post_init__(self):
        if self.dist_w.k != self.dist_z.k:
            raise ValueError(
                f"entry distributions disagree on k: {self.dist_w.k} != {self.dist_z.k}"
            )

    @property
    def k(self) -> int:
        return self.dist_w.k

    @classmethod
    def play_the_winner(cls, p1: float, p2: float) -> "RandomizedRule":
        return cls(
            dist_w=EntryDistribution.bernoulli(p1),
            dist_z=EntryDistribution.bernoulli(p2),
        )


def validate_deterministic(rule: ReplacementRule, w0: int, b0: int) -> ValidationReport:
    """Check balance and tenability of a deterministic rule from (w0, b0).

    Negative diagonal entries are tenable only under the classical
    divisibility conditions; off-diagonal entries must be nonnegative.
    """
    if w0 < 0 or b0 < 0 or w0 + b0 < 1:
        raise ValueError("initial counts must be nonnegative with w0 + b0 >= 1")
    a, b, c, d = rule.a, rule.b, rule.c, rule.d
    balanced = (a + b) == (c + d)
    notes = []
    if not balanced:
        notes.append(f"row sums differ: {a + b} vs {c + d}")

    tenable = True
    if b < 0 or c < 0:
        tenable = False
        notes.append("negative off-diagonal entry")
    if a < 0 and not (w0 % abs(a) == 0 and c % abs(a) == 0):
        tenable = False
        notes.append(f"a={a} < 0 must divide w0={w0} and c={c}")
    if d < 0 and not (b0 % abs(d) == 0 and b % abs(d) == 0):
        tenable = False
        notes.append(f"d={d} < 0 must divide b0={b0} and b={b}")

    return ValidationReport(balanced, tenable, "; ".join(notes) or "ok")


def validate_randomized(rule: RandomizedRule) -> ValidationReport:
    """Randomized rules are balanced by construction; validity is pmf validity."""
    notes = []
    for name, dist in (("W", rule.dist_w), ("Z", rule.dist_z)):
        if any(p < 0 for p in dist.pmf):
            notes.append(f"dist {name}: negative mass")
        total = sum(dist.pmf)
        if abs(total - 1.0) > PMF_TOL:
            notes.append(f"dist {name}: pmf sums to {total}")
    ok = not notes
    return ValidationReport(balanced=True, tenable=ok, diagnostics="; ".join(notes) or "ok")


def entry_mixed_moment(dist: EntryDistribution, r: int, s: int) -> float:
    """E[V^r (k-V)^s] by exact summation over the support, with 0^0 = 1."""
    if r < 0 or s < 0:
        raise ValueError("moment orders must be nonnegative")
    k = dist.k
    return sum(p * v**r * (k - v) ** s for v, p in enumerate(dist.pmf))


def deterministic_entry_moment(rule: ReplacementRule, row: int, r: int, s: int) -> float:
    """left^r * right^s for the given row; the point-mass analog of entry_mixed_moment."""
    if r < 0 or s < 0:
        raise ValueError("moment orders must be nonnegative")
    left, right = rule.row(row)
    return float(left**r * right**s)
