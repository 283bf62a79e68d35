"""P-numbers and kinetic-potential machinery.

A P-number P(q) turns the kinetic potential of sgn(q) r^q into the
"attractive" form sgn(q) (P r)^q once the mean kinetic energy s is traded for
a radius (s = 1/r for K = p, s = 1/r^2 for K = p^2). The log potential uses
ln(P r) instead.
"""
from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import (
    ConfigurationError,
    CouplingTooLargeError,
    DomainError,
    InvalidCurveError,
    UnsupportedTermError,
)
from .numerics import digamma, ln_gamma

COULOMB_Q = -1.0
LOG_Q = 0.0


# ---------------------------------------------------------------------------
# Potentials


@dataclass(frozen=True)
class PowerTerm:
    """a * sgn(q) * r**q with a >= 0, q != 0."""

    q: float
    a: float

    def __post_init__(self):
        if self.q == 0.0:
            raise DomainError("q = 0 is the log term; use PotentialSum.log_coefficient")
        if not self.a >= 0.0:
            raise DomainError(f"coefficient must be non-negative, got {self.a}")

    def __call__(self, r):
        return self.a * math.copysign(1.0, self.q) * np.power(r, self.q)


@dataclass(frozen=True)
class PotentialSum:
    """V(r) = sum_q a(q) sgn(q) r^q + a(0) ln r, all coefficients >= 0."""

    power_terms: tuple[PowerTerm, ...] = ()
    log_coefficient: float = 0.0

    def __post_init__(self):
        terms = tuple(sorted(self.power_terms, key=lambda t: t.q))
        object.__setattr__(self, "power_terms", terms)
        qs = [t.q for t in terms]
        if len(set(qs)) != len(qs):
            raise DomainError(f"duplicate exponents in potential: {qs}")
        if not self.log_coefficient >= 0.0:
            raise DomainError("log coefficient must be non-negative")
        if all(t.a == 0.0 for t in terms) and self.log_coefficient == 0.0:
            raise DomainError("potential coefficients are all zero")

    @classmethod
    def from_coefficients(
        cls,
        coulomb: float = 0.0,
        log: float = 0.0,
        linear: float = 0.0,
        quadratic: float = 0.0,
        extra: Optional[Mapping[float, float]] = None,
    ) -> "PotentialSum":
        """-coulomb/r + log ln r + linear r + quadratic r^2 + extra powers.

        Zero coefficients are dropped.
        """
        coeffs = {COULOMB_Q: coulomb, 1.0: linear, 2.0: quadratic}
        for q, a in (extra or {}).items():
            q = float(q)
            if q in coeffs and coeffs[q] != 0.0:
                raise DomainError(f"exponent {q} given twice")
            coeffs[q] = a
        terms = tuple(PowerTerm(q, a) for q, a in coeffs.items() if a != 0.0)
        return cls(terms, float(log))

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for t in self.power_terms:
            out = out + t(r)
        if self.log_coefficient:
            out = out + self.log_coefficient * np.log(r)
        return out

    @property
    def exponents(self) -> tuple[float, ...]:
        """Exponents of all non-zero terms; the log term appears as 0."""
        qs = [t.q for t in self.power_terms if t.a > 0.0]
        if self.log_coefficient > 0.0:
            qs.append(LOG_Q)
        return tuple(sorted(qs))

    def coefficient(self, q: float) -> float:
        if q == LOG_Q:
            return self.log_coefficient
        for t in self.power_terms:
            if t.q == q:
                return t.a
        return 0.0

    @property
    def coulomb(self) -> float:
        return self.coefficient(COULOMB_Q)

    @property
    def is_pure_coulomb(self) -> bool:
        return self.exponents == (COULOMB_Q,)

    @property
    def has_confining_term(self) -> bool:
        return any(q >= 0.0 for q in self.exponents)

    def scaled(self, c: float) -> "PotentialSum":
        if not c > 0.0:
            raise DomainError("coupling must be positive")
        return PotentialSum(
            tuple(PowerTerm(t.q, c * t.a) for t in self.power_terms),
            c * self.log_coefficient,
        )

    def describe(self) -> str:
        parts = []
        for q in self.exponents:
            a = self.coefficient(q)
            if q == LOG_Q:
                parts.append(f"{a:g}*ln(r)")
            else:
                sign = "+" if q > 0 else "-"
                parts.append(f"{sign}{a:g}*r^{q:g}")
        return " ".join(parts)


# ---------------------------------------------------------------------------
# P-number formulas


def p_lower(q: float, e1: float) -> float:
    """P^(1)(q) from the v = 1 ground energy of p + sgn(q) r^q."""
    if q == 0.0 or q <= -1.0:
        raise DomainError(f"p_lower needs q > -1, q != 0 (got {q}); see p_log / coulomb_running_p")
    return abs(e1 / (1.0 + q)) ** (1.0 + 1.0 / q) * abs(q)


def p_schrodinger(q: float, e2: float) -> float:
    """P^(2)(q) from the v = 1 ground energy of p^2 + sgn(q) r^q."""
    if q == 0.0 or q <= -2.0:
        raise DomainError(f"p_schrodinger needs q > -2, q != 0 (got {q})")
    return abs(e2 / (1.0 + 0.5 * q)) ** (0.5 + 1.0 / q) * math.sqrt(abs(0.5 * q))


class PKind(str, enum.Enum):
    RELATIVISTIC_LOWER = "relativistic_lower"
    SCHRODINGER = "schrodinger"
    VARIATIONAL = "variational"


def p_log(kind: PKind | str, e0: float) -> float:
    """P(0) for the log potential from the v = 1 energy of K + ln r."""
    kind = PKind(kind)
    if kind is PKind.RELATIVISTIC_LOWER:
        return math.exp(e0 - 1.0)
    if kind is PKind.SCHRODINGER:
        return math.exp(e0 - 0.5) / math.sqrt(2.0)
    raise DomainError("p_log is defined for relativistic_lower and schrodinger only")


def _kinetic_prefactor_log(nu: float) -> float:
    # ln of (nu/2) * sqrt(Gamma(2 + 1/nu) / Gamma(3/nu))
    return math.log(0.5 * nu) + 0.5 * (ln_gamma(2.0 + 1.0 / nu) - ln_gamma(3.0 / nu))


def p_variational(nu: float, q: float) -> float:
    """Upper P-number for the trial function exp(-alpha r^nu / 2)."""
    if not nu > 0.0:
        raise DomainError(f"nu must be positive, got {nu}")
    if q == 0.0:
        return p_variational_log(nu)
    if q <= -3.0:
        raise DomainError(f"<r^q> diverges for q <= -3 (got {q})")
    log_moment = ln_gamma((q + 3.0) / nu) - ln_gamma(3.0 / nu)
    return math.exp(_kinetic_prefactor_log(nu) + log_moment / q)


def p_variational_log(nu: float) -> float:
    if not nu > 0.0:
        raise DomainError(f"nu must be positive, got {nu}")
    return math.exp(_kinetic_prefactor_log(nu) + digamma(3.0 / nu) / nu)


def _check_coupling(v: float) -> None:
    if v < 0.0:
        raise DomainError(f"Coulomb coupling must be non-negative, got {v}")
    if v >= 0.5:
        raise CouplingTooLargeError(
            f"Coulomb coupling v = {v} must satisfy v < 1/2 (the closed-form relativistic "
            "Coulomb lower bound is only available there; stricter than the operator limit 2/pi)"
        )


def coulomb_running_p(v: float) -> float:
    """P_L(v) = sqrt((1 + sqrt(1 - 4 v^2)) / 2), for 0 <= v < 1/2."""
    _check_coupling(v)
    return math.sqrt(0.5 * (1.0 + math.sqrt(1.0 - 4.0 * v * v)))


def coulomb_lower_energy(v: float, m: float) -> float:
    """Lower bound m * P_L(v) on sqrt(m^2 + p^2) - v/r."""
    if m < 0.0:
        raise DomainError("mass must be non-negative")
    return m * coulomb_running_p(v)


# ---------------------------------------------------------------------------
# Tabulated eigenvalues and P-numbers for q = -1, 0, 1, 2 at v = 1.
# E1 values are rounded down and E2 values up, so the derived P-numbers keep
# the bound direction.

TABLE1_PRINTED = {
    # q: (E1, P1, E2, P2); None where p - 1/r has no discrete spectrum.
    -1.0: (None, None, -0.25, 1.0),
    0.0: (1.06365, 1.0657, 1.0443325, 1.218669),
    1.0: (2.23225, 1.2457, 2.3381075, 1.376084),
    2.0: (2.338107, 1.366687, 3.0, 1.5),
}

# Library lower P-numbers. P1(2) is recomputed from E1(2) = 2.338107 by the
# defining formula (1.3760832, rounded down); the printed 1.366687 disagrees
# with that formula and with the p + r^2 ~ p^2 + r duality.
P_LOWER_TABLE = {0.0: 1.0657, 1.0: 1.2457, 2.0: 1.376083}
P_SCHRODINGER_TABLE = {-1.0: 1.0, 0.0: 1.218669, 1.0: 1.376084, 2.0: 1.5}


@dataclass(frozen=True)
class PNumberSet:
    """P-factors keyed by exponent (0 for the log term)."""

    kind: PKind
    values: Mapping[float, float]
    nu: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", PKind(self.kind))
        for q, p in self.values.items():
            if not p > 0.0:
                raise ConfigurationError(f"P-factor for q={q} must be positive, got {p}")
        if self.kind is PKind.VARIATIONAL and self.nu is None:
            raise ConfigurationError("variational P-number set needs nu")

    def __getitem__(self, q: float) -> float:
        try:
            return self.values[q]
        except KeyError:
            raise ConfigurationError(f"no {self.kind.value} P-factor for q = {q}") from None


_cache_lock = threading.Lock()
_computed_cache: dict[tuple[str, float], float] = {}


def computed_p_number(kind: PKind | str, q: float, settings=None) -> float:
    """P-number for a general exponent from an oracle eigenvalue at v = 1.

    Slow path; results are memoized per (kind, q) for default settings.
    The oracle value is variational (too high), so for the lower P-number the
    energy is first lowered by the oracle's truncation residual.
    """
    from . import oracle  # deferred: oracle depends on this module

    kind = PKind(kind)
    key = (kind.value, float(q))
    if settings is None:
        with _cache_lock:
            if key in _computed_cache:
                return _computed_cache[key]
    potential = PotentialSum((), 1.0) if q == LOG_Q else PotentialSum((PowerTerm(q, 1.0),))
    if kind is PKind.RELATIVISTIC_LOWER:
        res = oracle.ultrarelativistic_ground(potential, settings or oracle.OracleSettings())
        e = res.energy - res.residual
        value = p_log(kind, e) if q == LOG_Q else p_lower(q, e)
    elif kind is PKind.SCHRODINGER:
        res = oracle.schrodinger_ground(potential, 1.0, settings or oracle.OracleSettings())
        value = p_log(kind, res.energy) if q == LOG_Q else p_schrodinger(q, res.energy)
    else:
        raise DomainError("variational P-numbers are closed-form; use p_variational")
    if settings is None:
        with _cache_lock:
            _computed_cache[key] = value
    return value


def lower_p_set(potential: PotentialSum, beta: float = 1.0) -> PNumberSet:
    """Lower P-numbers for every term, with the running Coulomb P_L(a/beta)."""
    values = {}
    for q in potential.exponents:
        if q == COULOMB_Q:
            values[q] = coulomb_running_p(potential.coulomb / beta)
        elif q in P_LOWER_TABLE:
            values[q] = P_LOWER_TABLE[q]
        elif q > -1.0:
            values[q] = computed_p_number(PKind.RELATIVISTIC_LOWER, q)
        else:
            raise UnsupportedTermError(f"no lower P-number for r^{q}: need q > -1 or q = -1")
    return PNumberSet(PKind.RELATIVISTIC_LOWER, values)


def schrodinger_p_set(potential: PotentialSum) -> PNumberSet:
    values = {}
    for q in potential.exponents:
        if q in P_SCHRODINGER_TABLE:
            values[q] = P_SCHRODINGER_TABLE[q]
        elif q > -2.0:
            values[q] = computed_p_number(PKind.SCHRODINGER, q)
        else:
            raise UnsupportedTermError(f"no Schrodinger P-number for r^{q}: need q > -2")
    return PNumberSet(PKind.SCHRODINGER, values)


def variational_p_set(potential: PotentialSum, nu: float) -> PNumberSet:
    return PNumberSet(
        PKind.VARIATIONAL, {q: p_variational(nu, q) for q in potential.exponents}, nu=nu
    )


# ---------------------------------------------------------------------------
# Coupling curves and the Legendre transform


@dataclass(frozen=True)
class CouplingCurve:
    """Samples (v, F(v)) of the ground energy of K + v h(r)."""

    v: np.ndarray
    F: np.ndarray
    concavity_tol: float = 1e-8
    label: str = field(default="", compare=False)

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float)
        F = np.asarray(self.F, dtype=float)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "F", F)
        if v.ndim != 1 or v.shape != F.shape:
            raise InvalidCurveError("v and F must be 1-D arrays of equal length")
        if len(v) < 3:
            raise InvalidCurveError("a coupling curve needs at least 3 samples")
        if np.any(v <= 0.0) or np.any(np.diff(v) <= 0.0):
            raise InvalidCurveError("couplings must be positive and strictly increasing")
        worst = float(np.max(self.second_differences()))
        if worst > self.concavity_tol * max(1.0, float(np.max(np.abs(F)))):
            raise InvalidCurveError(f"curve is not concave: second difference {worst:.3e}")

    def second_differences(self) -> np.ndarray:
        """Divided second differences; <= 0 for a concave curve."""
        v, F = self.v, self.F
        s1 = np.diff(F) / np.diff(v)
        return 2.0 * np.diff(s1) / (v[2:] - v[:-2])

    def derivative(self) -> np.ndarray:
        """F'(v) by three-point differences on the (non-uniform) grid."""
        v, F = self.v, self.F
        d = np.empty_like(F)
        h0, h1 = v[1:-1] - v[:-2], v[2:] - v[1:-1]
        d[1:-1] = (-h1 / (h0 * (h0 + h1)) * F[:-2]
                   + (h1 - h0) / (h0 * h1) * F[1:-1]
                   + h0 / (h1 * (h0 + h1)) * F[2:])
        # One-sided three-point formulas at the ends.
        a, b = v[1] - v[0], v[2] - v[0]
        d[0] = (-(a + b) / (a * b) * F[0] + b / (a * (b - a)) * F[1] - a / (b * (b - a)) * F[2])
        a, b = v[-2] - v[-1], v[-3] - v[-1]
        d[-1] = (-(a + b) / (a * b) * F[-1] + b / (a * (b - a)) * F[-2] - a / (b * (b - a)) * F[-3])
        return d


def kinetic_potential_from_curve(curve: CouplingCurve) -> list[tuple[float, float]]:
    """Legendre transform s = F - v F', hbar = F' at every sample."""
    dF = curve.derivative()
    s = curve.F - curve.v * dF
    if np.all(np.abs(s) <= 1e-12 * max(1.0, float(np.max(np.abs(curve.F))))):
        raise InvalidCurveError("linear coupling curve: zero kinetic part, transform is degenerate")
    return [(float(a), float(b)) for a, b in zip(s, dF)]


class BoundaryMinimumWarning(UserWarning):
    """Kinetic-potential minimum sits at the edge of the sampled s range."""


def energy_from_kinetic_potential(samples: Sequence[tuple[float, float]], v: float) -> float:
    """min over s of s + v * hbar(s), refined on a local interpolating polynomial.

    The refinement uses the cubic through four samples around the discrete
    minimum (quadratic when only three exist); a quadratic fit alone leaves an
    O(ds^3) bias that is visible at the 1e-6 level on typical grids.
    """
    import warnings

    if len(samples) < 3:
        raise InvalidCurveError("need at least 3 kinetic-potential samples")
    if not v > 0.0:
        raise DomainError("coupling must be positive")
    pts = sorted(samples)
    s = np.array([p[0] for p in pts])
    h = np.array([p[1] for p in pts])
    g = s + v * h
    n = len(s)
    k = int(np.argmin(g))
    if k == 0 or k == n - 1:
        warnings.warn("minimum at the sample boundary", BoundaryMinimumWarning, stacklevel=2)
        return float(g[k])
    if n == 3:
        window = np.arange(3)
    elif k + 2 < n:
        window = np.arange(k - 1, k + 3)
    else:
        window = np.arange(k - 2, k + 2)
    x = s[window] - s[k]
    poly = np.polynomial.Polynomial.fit(x, g[window], len(window) - 1, domain=[x[0], x[-1]])
    lo, hi = s[k - 1] - s[k], s[k + 1] - s[k]
    candidates = [0.0]
    for root in poly.deriv().roots():
        if abs(root.imag) < 1e-14 and lo <= root.real <= hi:
            candidates.append(float(root.real))
    return float(min(min(poly(c) for c in candidates), g[k]))
