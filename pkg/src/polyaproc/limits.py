"""Gamma limit laws of the scaled urn vector e^{-kt} (W(t), B(t)).

The scaled pair converges to a single Gamma(tau0/k, k) variable times a
fixed weight vector, so the limit is rank one and the limiting correlation
between the coordinates is exactly 1 when both weights are positive.

Scale parameterization throughout: multiplying Gamma(shape, scale) by a
constant m gives Gamma(shape, m * scale).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .moments import rising_factorial
from .rules import RandomizedRule, ReplacementRule


@dataclass(frozen=True)
class GammaLimit:
    shape: float
    scale: float
    weights: tuple[float, float]  # (white, blue), summing to 1

    def __post_init__(self):
        w, b = self.weights
        if w < 0 or b < 0 or abs(w + b - 1.0) > 1e-12:
            raise ValueError(f"weights {self.weights} must be nonnegative and sum to 1")
        if self.shape <= 0 or self.scale <= 0:
            raise ValueError("shape and scale must be positive")

    def marginal(self, color: str) -> tuple[float, float]:
        """(shape, scale) of the white or blue marginal Gamma law."""
        idx = {"white": 0, "blue": 1}[color]
        return (self.shape, self.scale * self.weights[idx])

    def white_moment(self, n: int) -> float:
        """n-th moment of the white marginal: (scale*w)^n <shape>_n."""
        return (self.scale * self.weights[0]) ** n * rising_factorial(self.shape, n)


def bagchi_pal_limit(rule: ReplacementRule, tau0: int) -> GammaLimit:
    """Gamma(tau0/k, k) times weights (c/(b+c), b/(b+c))."""
    b, c = rule.b, rule.c
    if b + c <= 0:
        raise ValueError("limit undefined for b + c = 0 (decoupled pure-birth processes)")
    return GammaLimit(
        shape=tau0 / rule.k,
        scale=float(rule.k),
        weights=(c / (b + c), b / (b + c)),
    )


def randomized_limit(rule: RandomizedRule, tau0: int) -> GammaLimit:
    """Gamma(tau0/k, k) times weights from the diagonal-entry means."""
    k = rule.k
    mu_w = rule.dist_w.mean
    mu_z = rule.dist_z.mean
    denom = 2 * k - mu_w - mu_z
    if denom <= 0:
        raise ValueError("limit undefined when mu_W = mu_Z = k")
    return GammaLimit(
        shape=tau0 / k,
        scale=float(k),
        weights=((k - mu_z) / denom, (k - mu_w) / denom),
    )


def play_the_winner_limit(p1: float, p2: float, tau0: int) -> GammaLimit:
    """Gamma(tau0, 1) times (q2/(q1+q2), q1/(q1+q2)) with q_i = 1 - p_i."""
    if not (0 <= p1 <= 1 and 0 <= p2 <= 1):
        raise ValueError("success rates must lie in [0, 1]")
    if p1 == 1 and p2 == 1:
        raise ValueError("p1 = p2 = 1 is degenerate (no failures ever recorded)")
    return randomized_limit(RandomizedRule.play_the_winner(p1, p2), tau0)


def gamma_pdf(x: float, shape: float, scale: float) -> float:
    """Gamma density in the scale parameterization."""
    _check_gamma_args(x, shape, scale)
    if x == 0.0:
        if shape > 1.0:
            return 0.0
        if shape == 1.0:
            return 1.0 / scale
        return math.inf
    z = x / scale
    return math.exp((shape - 1.0) * math.log(z) - z - math.lgamma(shape)) / scale


def gamma_cdf(x: float, shape: float, scale: float) -> float:
    """Regularized lower incomplete gamma P(shape, x/scale), ~1e-10 absolute.

    Power series for small arguments, Lentz continued fraction for the upper
    tail otherwise.
    """
    _check_gamma_args(x, shape, scale)
    z = x / scale
    if z == 0.0:
        return 0.0
    if z < shape + 1.0:
        return _lower_series(shape, z)
    return 1.0 - _upper_continued_fraction(shape, z)


def _check_gamma_args(x: float, shape: float, scale: float) -> None:
    if x < 0:
        raise ValueError("x must be >= 0")
    if shape <= 0 or scale <= 0:
        raise ValueError("shape and scale must be positive")


_EPS = 1e-16
_MAX_ITER = 500


def _lower_series(a: float, z: float) -> float:
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= z / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-z + a * math.log(z) - math.lgamma(a))


def _upper_continued_fraction(a: float, z: float) -> float:
    tiny = 1e-300
    b = z + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b if b != 0 else 1.0 / tiny
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-z + a * math.log(z) - math.lgamma(a)) * h
