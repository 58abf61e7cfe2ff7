"""Reconciles simulation ensembles with theory.

Extracts the scaled samples (W, B) e^{-k t*}, compares empirical mixed
moments to exact ODE trajectories, runs a one-sample Kolmogorov-Smirnov test
against the limiting Gamma marginals, and reports the white-ball proportion
and Pearson correlation alongside pass/fail flags.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .limits import GammaLimit, gamma_cdf
from .moments import MomentTrajectory
from .simulate import EnsembleResult, SimConfig, expected_event_count

# 1% asymptotic KS critical value is 1.63 / sqrt(n)
KS_CRITICAL_COEFF = 1.63
EVENT_COUNT_REL_TOL = 0.03


@dataclass(frozen=True)
class MomentRow:
    i: int
    j: int
    empirical: float
    standard_error: float
    theoretical: float

    @property
    def standardized_error(self) -> float:
        if self.standard_error == 0.0:
            return 0.0 if self.empirical == self.theoretical else math.inf
        return (self.empirical - self.theoretical) / self.standard_error


@dataclass(frozen=True)
class VerificationReport:
    proportion_white: float
    theory_proportion: float
    proportion_tolerance: float
    pearson_corr: float
    corr_threshold: float
    ks_white: tuple[float, float]  # (D, approximate p-value)
    ks_blue: tuple[float, float]
    ks_critical: float
    moment_table: tuple[MomentRow, ...]
    event_count_mean: float
    event_count_expected: float
    pass_flags: dict = field(default_factory=dict)

    @property
    def all_pass(self) -> bool:
        return all(self.pass_flags.values())


def scaled_samples(ensemble: EnsembleResult, k: int, t_star: float) -> list[tuple[float, float]]:
    """(W, B) e^{-k t*} per replica; the inputs to the Gamma limit checks."""
    if not ensemble.replicas:
        raise ValueError("empty ensemble")
    factor = math.exp(-k * t_star)
    return [(r.final.white * factor, r.final.blue * factor) for r in ensemble.replicas]


def empirical_moment(
    samples: list[tuple[float, float]], i: int, j: int
) -> tuple[float, float]:
    """Mean of w^i b^j with a jackknife standard error.

    Jackknife is preferred over the analytic plug-in because high-order
    moments of the scaled counts are heavy-tailed at small Gamma shapes.
    """
    n = len(samples)
    if n < 2:
        raise ValueError("need at least 2 samples")
    g = np.array([w**i * b**j for w, b in samples])
    total = g.sum()
    estimate = total / n
    loo = (total - g) / (n - 1)
    se = math.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2))
    return float(estimate), float(se)


def ks_statistic(samples, cdf) -> tuple[float, float]:
    """One-sample KS distance and its asymptotic p-value approximation."""
    xs = sorted(samples)
    n = len(xs)
    if n < 1:
        raise ValueError("need at least 1 sample")
    d = 0.0
    for idx, x in enumerate(xs, start=1):
        f = cdf(x)
        d = max(d, idx / n - f, f - (idx - 1) / n)
    return d, _kolmogorov_pvalue(d, n)


def _kolmogorov_pvalue(d: float, n: int) -> float:
    """Two-sided asymptotic Kolmogorov survival probability."""
    sqrt_n = math.sqrt(n)
    lam = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d
    if lam < 1e-8:
        return 1.0
    total = 0.0
    for j in range(1, 101):
        term = 2.0 * (-1) ** (j - 1) * math.exp(-2.0 * j * j * lam * lam)
        total += term
        if abs(term) < 1e-12:
            break
    return min(1.0, max(0.0, total))


def pearson_correlation(pairs) -> float:
    arr = np.asarray(pairs, dtype=float)
    if arr.shape[0] < 2:
        raise ValueError("need at least 2 pairs")
    x, y = arr[:, 0], arr[:, 1]
    sx, sy = x.std(ddof=1), y.std(ddof=1)
    if sx == 0.0 or sy == 0.0:
        raise ValueError("degenerate variance in correlation input")
    return float(np.mean((x - x.mean()) * (y - y.mean())) * len(x) / (len(x) - 1) / (sx * sy))


def proportion_white(ensemble: EnsembleResult) -> float:
    """Mean over replicas of W/(W+B) at the final state."""
    if not ensemble.replicas:
        raise ValueError("empty ensemble")
    return ensemble.mean_white_proportion


def build_report(
    ensemble: EnsembleResult,
    config: SimConfig,
    limit: GammaLimit,
    moments: MomentTrajectory,
    proportion_tolerance: float = 0.01,
    corr_threshold: float = 0.999,
) -> VerificationReport:
    """Assemble all verification statistics with documented thresholds.

    The KS comparison targets the asymptotic Gamma law, which is only an
    approximation at finite t*; the threshold is the 1% asymptotic critical
    value.
    """
    k = config.rule.k
    if abs(limit.scale - k) > 1e-12:
        raise ValueError(
            f"limit scale {limit.scale} does not match the rule balance factor {k}"
        )
    if moments.times[-1] + 1e-12 < config.t_star:
        raise ValueError("moment trajectory does not reach t_star")

    pairs = scaled_samples(ensemble, k, config.t_star)
    n_reps = len(pairs)

    prop = proportion_white(ensemble)
    theory_prop = limit.weights[0]
    corr = pearson_correlation(pairs)

    shape_w, scale_w = limit.marginal("white")
    shape_b, scale_b = limit.marginal("blue")
    ks_w = ks_statistic([w for w, _ in pairs], lambda x: gamma_cdf(x, shape_w, scale_w))
    ks_b = ks_statistic([b for _, b in pairs], lambda x: gamma_cdf(x, shape_b, scale_b))
    ks_crit = KS_CRITICAL_COEFF / math.sqrt(n_reps)

    # exact scaled moments at t_star for every tracked index
    t_idx = int(np.argmin(np.abs(moments.times - config.t_star)))
    rows = []
    for i, j in moments.system.index:
        emp, se = empirical_moment(pairs, i, j)
        theo = float(moments.scaled_moment(i, j, k)[t_idx])
        rows.append(MomentRow(i=i, j=j, empirical=emp, standard_error=se, theoretical=theo))

    events_mean = ensemble.mean_events
    events_expected = expected_event_count(config.w0 + config.b0, k, config.t_star)

    flags = {
        "proportion": abs(prop - theory_prop) <= proportion_tolerance,
        "correlation": corr >= corr_threshold,
        "ks_white": ks_w[0] < ks_crit,
        "ks_blue": ks_b[0] < ks_crit,
        "event_count": abs(events_mean - events_expected)
        <= EVENT_COUNT_REL_TOL * events_expected,
        "moments": all(
            abs(r.standardized_error) <= 3.0 for r in rows if (r.i + r.j) <= 2
        ),
    }
    return VerificationReport(
        proportion_white=prop,
        theory_proportion=theory_prop,
        proportion_tolerance=proportion_tolerance,
        pearson_corr=corr,
        corr_threshold=corr_threshold,
        ks_white=ks_w,
        ks_blue=ks_b,
        ks_critical=ks_crit,
        moment_table=tuple(rows),
        event_count_mean=events_mean,
        event_count_expected=events_expected,
        pass_flags=flags,
    )
