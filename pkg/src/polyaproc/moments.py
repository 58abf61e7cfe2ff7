"""Mixed-moment ODE system for balanced two-color urn processes.

All mixed moments m_{i,j}(t) = E[W^i(t) B^j(t)] with 1 <= i+j <= N satisfy
one linear ODE system d/dt m = L m.  Grouping indices by order n = i+j makes
L block lower-triangular; the diagonal block of order n is a tridiagonal
Krawtchouk-type matrix whose eigenvalues form the arithmetic progression
n*k - s*(b+c), s = 0..n.  The leading coefficients of m_{i,j}(t) e^{-k(i+j)t}
have a closed form driven by rising factorials of tau0/k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .rules import (
    EntryDistribution,
    RandomizedRule,
    ReplacementRule,
    deterministic_entry_moment,
    entry_mixed_moment,
)

MAX_ORDER = 6  # e^{kNt} overflows double precision quickly past this


def rising_factorial(x: float, n: int) -> float:
    """x (x+1) ... (x+n-1); empty product 1 at n = 0."""
    if n < 0:
        raise ValueError("n must be >= 0")
    out = 1.0
    for i in range(n):
        out *= x + i
    return out


def stirling2(n: int, i: int) -> int:
    """Stirling partition number S(n, i) via S(n,i) = i S(n-1,i) + S(n-1,i-1)."""
    if not 0 <= i <= n:
        raise ValueError(f"need 0 <= i <= n, got ({n}, {i})")
    row = [1]  # S(0, 0)
    for m in range(1, n + 1):
        prev = row
        row = [0] * (m + 1)
        for j in range(1, m + 1):
            row[j] = j * (prev[j] if j < len(prev) else 0) + prev[j - 1]
    return row[i]


def total_moment(tau0: int, k: int, n: int, t: float) -> float:
    """Exact n-th moment of the total count tau(t) for any balanced urn."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if t < 0:
        raise ValueError("t must be >= 0")
    x = tau0 / k
    return k**n * sum(
        (-1) ** (n - i) * stirling2(n, i) * rising_factorial(x, i) * math.exp(k * i * t)
        for i in range(1, n + 1)
    )


def moment_indices(order_cap: int) -> list[tuple[int, int]]:
    """All (i, j) with 1 <= i+j <= order_cap, order ascending, i descending.

    Within order n the layout is (m_{n,0}, m_{n-1,1}, ..., m_{0,n}), matching
    the tridiagonal block convention of build_An.
    """
    return [
        (n - p, p) for n in range(1, order_cap + 1) for p in range(n + 1)
    ]


@dataclass(frozen=True)
class MomentSystem:
    order_cap: int
    index: tuple[tuple[int, int], ...]
    coefficient_matrix: np.ndarray  # d/dt m = L m
    initial: np.ndarray

    def position(self, i: int, j: int) -> int:
        return self.index.index((i, j))


@dataclass(frozen=True)
class MomentTrajectory:
    system: MomentSystem
    times: np.ndarray
    values: np.ndarray  # shape (len(times), len(index))

    def moment(self, i: int, j: int) -> np.ndarray:
        return self.values[:, self.system.position(i, j)]

    def scaled_moment(self, i: int, j: int, k: int) -> np.ndarray:
        """m_{i,j}(t) e^{-k(i+j)t}, the bounded form for large t."""
        return self.moment(i, j) * np.exp(-k * (i + j) * self.times)


def _row_moment_fns(rule: ReplacementRule | RandomizedRule):
    """Return (mu1, mu2) with mu_r(p, q) = E[left^p right^q] for row r."""
    if isinstance(rule, ReplacementRule):
        mu1 = lambda p, q: deterministic_entry_moment(rule, 1, p, q)
        mu2 = lambda p, q: deterministic_entry_moment(rule, 2, p, q)
    else:
        # row 1 is (W, k-W); row 2 is (k-Z, Z)
        mu1 = lambda p, q: entry_mixed_moment(rule.dist_w, p, q)
        mu2 = lambda p, q: entry_mixed_moment(rule.dist_z, q, p)
    return mu1, mu2


def build_moment_ode(
    rule: ReplacementRule | RandomizedRule, order_cap: int, w0: int, b0: int
) -> MomentSystem:
    """Assemble d/dt m_{i,j} over all indices with 1 <= i+j <= order_cap.

    Each derivative couples m_{r+1,s} and m_{r,s+1} for (r,s) <= (i,j),
    (r,s) != (i,j), weighted by binomials and row-entry mixed moments, so the
    system is closed on the index set and block lower-triangular by order.
    """
    if order_cap < 1:
        raise ValueError("order_cap must be >= 1")
    if order_cap > MAX_ORDER:
        raise ValueError(f"order_cap {order_cap} exceeds the cap {MAX_ORDER}")
    index = moment_indices(order_cap)
    pos = {ij: p for p, ij in enumerate(index)}
    mu1, mu2 = _row_moment_fns(rule)

    size = len(index)
    L = np.zeros((size, size))
    for (i, j), row in ((ij, pos[ij]) for ij in index):
        for r in range(i + 1):
            for s in range(j + 1):
                if (r, s) == (i, j):
                    continue
                coeff = math.comb(i, r) * math.comb(j, s)
                L[row, pos[(r + 1, s)]] += coeff * mu1(i - r, j - s)
                L[row, pos[(r, s + 1)]] += coeff * mu2(i - r, j - s)

    initial = np.array([float(w0**i * b0**j) for i, j in index])
    return MomentSystem(
        order_cap=order_cap,
        index=tuple(index),
        coefficient_matrix=L,
        initial=initial,
    )


def build_An(n: int, b: int, c: int, k: int) -> np.ndarray:
    """Tridiagonal order-n coupling matrix for rows (k-b, b), (c, k-c).

    Row for m_{i, n-i} (positions ordered i = n down to 0): diagonal
    i(k-b) + (n-i)(k-c), super-diagonal i*c, sub-diagonal (n-i)*b.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    A = np.zeros((n + 1, n + 1))
    for p in range(n + 1):
        i = n - p
        A[p, p] = i * (k - b) + (n - i) * (k - c)
        if p + 1 <= n:
            A[p, p + 1] = i * c
        if p - 1 >= 0:
            A[p, p - 1] = (n - i) * b
    return A


def eigenvalues_An(n: int, b: int, c: int, k: int) -> list[float]:
    """Closed-form spectrum {n k - s (b+c) : s = 0..n}, descending."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return [float(n * k - s * (b + c)) for s in range(n + 1)]


class SolverAccuracyError(RuntimeError):
    """The trajectory solver could not meet its accuracy target."""


def solve_moments(system: MomentSystem, t_grid) -> MomentTrajectory:
    """Solve d/dt m = L m on the grid.

    Primary path is the scaling-and-squaring matrix exponential, which is
    well below the 1e-8 relative target and handles non-diagonalizable L
    (possible when eigenvalues coincide across order blocks).  Adaptive
    Runge-Kutta at relative tolerance 1e-10 is the fallback if the
    exponential overflows or degrades.
    """
    times = np.asarray(t_grid, dtype=float)
    if times.ndim != 1 or times[0] != 0.0 or np.any(np.diff(times) <= 0):
        raise ValueError("t_grid must be strictly increasing and start at 0")

    L = system.coefficient_matrix
    m0 = system.initial
    values = np.array([expm(L * t) @ m0 for t in times])
    if not np.all(np.isfinite(values)):
        sol = solve_ivp(
            lambda t, m: L @ m,
            (0.0, float(times[-1])),
            m0,
            method="DOP853",
            t_eval=times,
            rtol=1e-10,
            atol=1e-12,
        )
        if not sol.success:
            raise SolverAccuracyError(sol.message)
        values = sol.y.T
    values[0] = m0  # exact initial condition on the grid
    return MomentTrajectory(system=system, times=times, values=values)


def asymptotic_K(i: int, j: int, b: int, c: int, k: int, tau0: int) -> float:
    """Leading coefficient of m_{i,j}(t) e^{-k(i+j)t} for deterministic rules.

    b^j c^i / (b+c)^{i+j} * k^{i+j} * <tau0/k>_{i+j}.
    """
    if b + c <= 0:
        raise ValueError("requires b + c > 0 (otherwise the limit constants are undefined)")
    n = i + j
    return b**j * c**i / (b + c) ** n * k**n * rising_factorial(tau0 / k, n)


def asymptotic_M(i: int, j: int, rule: RandomizedRule, tau0: int) -> float:
    """Leading coefficient for randomized rules, driven by the entry means.

    (k-mu_W)^j (k-mu_Z)^i / (2k - mu_W - mu_Z)^{i+j} * k^{i+j} * <tau0/k>_{i+j}.
    """
    k = rule.k
    mu_w = rule.dist_w.mean
    mu_z = rule.dist_z.mean
    denom = 2 * k - mu_w - mu_z
    if denom <= 0:
        raise ValueError("requires 2k - mu_W - mu_Z > 0 (degenerate all-diagonal rule)")
    n = i + j
    return (k - mu_w) ** j * (k - mu_z) ** i / denom**n * k**n * rising_factorial(tau0 / k, n)
