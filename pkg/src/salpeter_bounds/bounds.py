"""Semiclassical lower and upper bounds on the Salpeter ground-state energy.

Every bound here is the minimum over a radius r > 0 of

    beta * sqrt(m^2 + 1/r^2) + sum_q a(q) sgn(q) (P(q) r)^q + a(0) ln(P(0) r)

with P-numbers chosen to make the result a lower bound (tabulated P^(1),
running Coulomb P_L) or an upper bound (trial-function P(nu, q)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConfigurationError, DomainError, UnsupportedTermError
from .kinetic_potentials import (
    COULOMB_Q,
    LOG_Q,
    P_LOWER_TABLE,
    P_SCHRODINGER_TABLE,
    PNumberSet,
    PotentialSum,
    coulomb_running_p,
    lower_p_set,
    schrodinger_p_set,
    variational_p_set,
)
from .numerics import Bracket, minimize_positive, minimize_unimodal

DEFAULT_NU_RANGE = (0.5, 3.0)
DEFAULT_NU_STEPS = 26


@dataclass(frozen=True)
class Problem:
    """H = beta sqrt(m^2 + p^2) + V(r)."""

    beta: float
    m: float
    potential: PotentialSum

    def __post_init__(self):
        if not self.beta > 0.0:
            raise DomainError(f"beta must be positive, got {self.beta}")
        if not self.m >= 0.0:
            raise DomainError(f"mass must be non-negative, got {self.m}")
        # Raises CouplingTooLargeError for a/beta >= 1/2.
        coulomb_running_p(self.coulomb_coupling)
        if not (self.potential.has_confining_term or self.potential.is_pure_coulomb):
            raise DomainError("potential needs a confining term (q > 0 or log) unless it is pure Coulomb")

    @classmethod
    def from_coefficients(cls, beta: float = 1.0, m: float = 0.0, **coefficients) -> "Problem":
        return cls(beta, m, PotentialSum.from_coefficients(**coefficients))

    @property
    def coulomb_coupling(self) -> float:
        return self.potential.coulomb / self.beta

    def with_mass(self, m: float) -> "Problem":
        return Problem(self.beta, m, self.potential)


@dataclass(frozen=True)
class BoundReport:
    value: float
    r_star: float
    method: str
    nu: Optional[float] = None
    # True when r_star comes from a closed form (pure Coulomb), inf if m = 0.
    analytic: bool = False


def semiclassical_objective(r: float, problem: Problem, p_set: PNumberSet) -> float:
    """The bracketed expression minimized by every bound, at radius r."""
    pot = problem.potential
    value = problem.beta * math.sqrt(problem.m ** 2 + 1.0 / (r * r))
    for q in pot.exponents:
        a = pot.coefficient(q)
        p = p_set[q]
        if q == LOG_Q:
            value += a * math.log(p * r)
        else:
            value += a * math.copysign(1.0, q) * (p * r) ** q
    return value


def _minimize(problem: Problem, p_set: PNumberSet, method: str, nu=None) -> BoundReport:
    def f(r):
        return semiclassical_objective(r, problem, p_set)

    seed = 1.0 / max(problem.m, 1.0)
    r_star, value = minimize_positive(f, seed)
    return BoundReport(value=value, r_star=r_star, method=method, nu=nu)


def _pure_coulomb_lower(problem: Problem) -> BoundReport:
    v = problem.coulomb_coupling
    p_l = coulomb_running_p(v)
    value = problem.beta * problem.m * p_l
    r_star = p_l ** 2 / (problem.m * v) if problem.m > 0.0 else math.inf
    return BoundReport(value=value, r_star=r_star, method="lower_thm3", analytic=True)


def lower_bound(problem: Problem) -> BoundReport:
    """Sum-of-components lower bound with tabulated lower P-numbers.

    A Coulomb term enters through the running factor P_L(a/beta).
    """
    for q in problem.potential.exponents:
        if q < COULOMB_Q:
            raise UnsupportedTermError(f"r^{q}: lower bound needs q > -1 or q = -1")
    if problem.potential.is_pure_coulomb:
        return _pure_coulomb_lower(problem)
    p_set = lower_p_set(problem.potential, problem.beta)
    return _minimize(problem, p_set, "lower_thm3")


def upper_bound(problem: Problem, nu: float) -> BoundReport:
    """Trial-function upper bound for fixed shape exponent nu."""
    if not nu > 0.0:
        raise DomainError(f"nu must be positive, got {nu}")
    if problem.potential.is_pure_coulomb and problem.m == 0.0:
        raise DomainError("massless pure-Coulomb problem has no discrete ground state")
    p_set = variational_p_set(problem.potential, nu)
    return _minimize(problem, p_set, "upper_thm4", nu=nu)


def upper_bound_optimized(problem: Problem, nu_range: tuple[float, float] = DEFAULT_NU_RANGE,
                          nu_steps: int = DEFAULT_NU_STEPS) -> BoundReport:
    """Grid scan over nu followed by golden-section refinement."""
    lo, hi = nu_range
    if not (0.0 < lo <= hi <= 5.0):
        raise DomainError(f"nu range must lie within (0, 5], got {nu_range}")
    if nu_steps < 3:
        raise DomainError("nu_steps must be >= 3")
    if lo == hi:
        return upper_bound(problem, lo)
    grid = np.linspace(lo, hi, nu_steps)
    reports = [upper_bound(problem, float(nu)) for nu in grid]
    values = [rep.value for rep in reports]
    k = int(np.argmin(values))
    best = reports[k]
    if 0 < k < nu_steps - 1 and values[k] < values[k - 1] and values[k] < values[k + 1]:
        bracket = Bracket(float(grid[k - 1]), float(grid[k + 1]), float(grid[k]))
        nu_star, _ = minimize_unimodal(lambda nu: upper_bound(problem, nu).value, bracket, rel_tol=1e-8)
        refined = upper_bound(problem, nu_star)
        if refined.value < best.value:
            best = refined
    return best


def _single_term(problem: Problem) -> float:
    qs = problem.potential.exponents
    if len(qs) != 1:
        raise ConfigurationError(
            "theorem1_bounds needs a single-term potential; use lower_bound/upper_bound for sums"
        )
    return qs[0]


def theorem1_bounds(problem: Problem) -> tuple[BoundReport, BoundReport]:
    """Complementary bounds for a single power (or log) term.

    Lower uses the K = p P-number, upper the K = p^2 one.
    """
    q = _single_term(problem)
    if q == COULOMB_Q:
        lower = _pure_coulomb_lower(problem)
        lower = BoundReport(lower.value, lower.r_star, "lower_thm1", analytic=True)
    else:
        lower = _minimize(problem, lower_p_set(problem.potential, problem.beta), "lower_thm1")
    upper = _minimize(problem, schrodinger_p_set(problem.potential), "upper_thm1")
    return lower, upper


def _envelope(W: Callable[[float], float], v: float, m: float, beta: float, p: float, method: str) -> BoundReport:
    if not v > 0.0:
        raise DomainError("coupling v must be positive")

    def f(r):
        return beta * math.sqrt(m * m + 1.0 / (r * r)) + v * W(p * r)

    r_star, value = minimize_positive(f, 1.0 / max(m, 1.0))
    return BoundReport(value=value, r_star=r_star, method=method)


def envelope_lower_convex(W: Callable[[float], float], v: float, m: float = 0.0, beta: float = 1.0,
                          convexity: str = "convex") -> BoundReport:
    """Lower bound for V = v W(r), W increasing and convex in r.

    Only the minimum over r is a bound; individual r values are not.
    """
    if convexity != "convex":
        raise ConfigurationError("W is not convex: use envelope_upper_concave for concave W")
    return _envelope(W, v, m, beta, P_LOWER_TABLE[1.0], "lower_envelope")


def envelope_upper_concave(W: Callable[[float], float], v: float, m: float = 0.0, beta: float = 1.0,
                           convexity: str = "concave") -> BoundReport:
    """Upper bound for V = v W(r), W increasing and concave in r."""
    if convexity != "concave":
        raise ConfigurationError("W is not concave: use envelope_lower_convex for convex W")
    return _envelope(W, v, m, beta, P_SCHRODINGER_TABLE[1.0], "upper_envelope")


@dataclass(frozen=True)
class SubadditivityMargin:
    m: float
    bound: float
    grid_bound: Optional[float]
    oracle: float
    margin: float


def sum_subadditivity_check(problem: Problem, s_grid: Optional[Sequence[float]] = None,
                            masses: Optional[Sequence[float]] = None,
                            settings=None) -> list[SubadditivityMargin]:
    """Compare the summed-component lower bound with the oracle energy.

    For each mass the bound is min over s of beta sqrt(m^2 + s^2) plus the sum
    of component kinetic potentials at r = 1/s. ``s_grid`` additionally
    reports the minimum over those s values alone. margin = oracle - bound.
    """
    from .oracle import salpeter_ground

    out = []
    for m in (masses if masses is not None else [problem.m]):
        prob = problem.with_mass(float(m))
        bound = lower_bound(prob).value
        grid_bound = None
        if s_grid is not None and not prob.potential.is_pure_coulomb:
            p_set = lower_p_set(prob.potential, prob.beta)
            grid_bound = min(semiclassical_objective(1.0 / s, prob, p_set) for s in s_grid)
        e = salpeter_ground(prob, settings).energy
        out.append(SubadditivityMargin(float(m), bound, grid_bound, e, e - bound))
    return out

