"""Rayleigh-Ritz reference solver for the s-wave ground state of K + V(r).

Two nested, orthonormal s-wave bases are available, both with closed-form
momentum-space representations so that p and sqrt(m^2 + p^2) are simple
multiplicative integrals:

* ``oscillator``: 3-D harmonic-oscillator functions exp(-r^2/2b^2) L_n^{1/2}(r^2/b^2);
  the momentum functions have the same form with b -> 1/b.
* ``laguerre``: exp(-r/b) L_k^{2}(2r/b); these contain the hydrogen ground
  state and converge much faster for Coulomb and linear potentials.

The default is ``laguerre``. With ``basis="auto"`` both families are tried
and the lower (still variational) energy is kept. Matrix elements use mapped Gauss-Legendre rules.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence, Union

import numpy as np

from .errors import CouplingTooLargeError, DomainError, NoDiscreteSpectrumError
from .kinetic_potentials import COULOMB_Q, CouplingCurve, PotentialSum
from .numerics import (
    expand_bracket,
    gauss_legendre,
    ln_gamma,
    minimize_unimodal,
    semi_infinite_rule,
    symmetric_eigen_smallest,
)

FAMILIES = ("laguerre", "oscillator")

# exp(-x/2)**2 underflows past this, so nodes beyond it carry no weight.
_X_CUTOFF = 1400.0
# Relative weight of the outermost tenth of the nodes that marks a divergent
# (or unresolved) potential integral.
_TAIL_TOL = 1e-10


@dataclass(frozen=True)
class OracleSettings:
    basis_dim: int = 25
    scale: float = 1.0
    scale_auto: bool = True
    quadrature_order: int = 200
    basis: str = "laguerre"
    scale_tol: float = 1e-5

    def __post_init__(self):
        if not 2 <= self.basis_dim <= 128:
            raise DomainError(f"basis_dim must be in [2, 128], got {self.basis_dim}")
        if not self.scale > 0.0:
            raise DomainError("basis scale must be positive")
        if self.quadrature_order < 50:
            raise DomainError("quadrature_order must be >= 50")
        if self.basis not in FAMILIES + ("auto",):
            raise DomainError(f"unknown basis family {self.basis!r}")


@dataclass(frozen=True)
class SpectralResult:
    energy: float
    residual: float
    settings_used: OracleSettings

    @property
    def basis(self) -> str:
        return self.settings_used.basis


@dataclass(frozen=True)
class Kinetic:
    """Kinetic-energy operator as a function of |p|."""

    kind: str
    m: float = 0.0
    beta: float = 1.0

    def __post_init__(self):
        if self.kind not in ("p2", "p", "salpeter"):
            raise DomainError(f"unknown kinetic operator {self.kind!r}")
        if self.m < 0.0 or not self.beta > 0.0:
            raise DomainError("need m >= 0 and beta > 0")

    @classmethod
    def parse(cls, spec: Union[str, "Kinetic"]) -> "Kinetic":
        return spec if isinstance(spec, Kinetic) else cls(spec)

    def __call__(self, p):
        if self.kind == "p2":
            return p * p
        if self.kind == "p":
            return p
        return self.beta * np.sqrt(self.m * self.m + p * p)


def _laguerre_table(x: np.ndarray, n: int, alpha: float) -> np.ndarray:
    """Rows k = 0..n-1 of exp(-x/2) L_k^alpha(x) by forward recurrence."""
    out = np.empty((n, x.size))
    out[0] = np.exp(-0.5 * x)
    if n > 1:
        out[1] = (1.0 + alpha - x) * out[0]
    for k in range(1, n - 1):
        out[k + 1] = ((2 * k + 1 + alpha - x) * out[k] - (k + alpha) * out[k - 1]) / (k + 1)
    return out


class _Basis:
    """Basis functions tabulated on quadrature nodes in r and in p."""

    def __init__(self, family: str, dim: int, scale: float, order: int):
        self.family = family
        self.dim = dim
        self.scale = scale
        n_quad = max(order, 4 * dim)
        rule = semi_infinite_rule(n_quad, scale=4.0 * dim, cluster=True)
        keep = rule.nodes < _X_CUTOFF
        x, w = rule.nodes[keep], rule.weights[keep]
        k = np.arange(dim)
        if family == "laguerre":
            # chi_k(x) = exp(-x/2) L_k^2(x) / sqrt((k+1)(k+2)),  r = x b / 2
            chi = _laguerre_table(x, dim, 2.0) / np.sqrt((k + 1.0) * (k + 2.0))[:, None]
            self.r = 0.5 * scale * x
            self.r_rows = chi * np.sqrt(w * x * x)
            # Momentum side on theta in (0, pi), p = tan(theta/2) / b.
            th_rule = gauss_legendre(n_quad, 0.0, math.pi)
            th, wt = th_rule.nodes, th_rule.weights
            j = np.arange(dim)[:, None]
            terms = ((-1.0) ** j) * (j + 1.0) * np.sin((j + 1.0) * th) / np.sin(th)
            sums = np.cumsum(terms, axis=0)
            norm = np.sqrt(8.0 / ((k + 1.0) * (k + 2.0))) * math.sqrt(2.0 / math.pi) * 2.0
            g = norm[:, None] * np.cos(0.5 * th) ** 4 * sums
            t = np.tan(0.5 * th)
            jac = wt * t * t * 0.5 / np.cos(0.5 * th) ** 2
            self.p = t / scale
            self.p_rows = g * np.sqrt(jac)
        elif family == "oscillator":
            # chi_n(y) = sqrt(n!/Gamma(n+3/2)) exp(-y/2) L_n^{1/2}(y),  r = b sqrt(y)
            lognorm = np.array([0.5 * (ln_gamma(n + 1.0) - ln_gamma(n + 1.5)) for n in k])
            chi = _laguerre_table(x, dim, 0.5) * np.exp(lognorm)[:, None]
            rows = chi * np.sqrt(w * np.sqrt(x))
            self.r = scale * np.sqrt(x)
            self.r_rows = rows
            self.p = np.sqrt(x) / scale
            self.p_rows = rows * ((-1.0) ** k)[:, None]
        else:
            raise DomainError(f"unknown basis family {family!r}")

    def overlap(self) -> np.ndarray:
        return self.r_rows @ self.r_rows.T

    def potential_matrix(self, potential: Callable) -> np.ndarray:
        """<chi_i|V|chi_j>; all +inf if some <chi_i|V|chi_i> diverges.

        Divergence (e.g. exp(r) against exp(-r/b) with b >= 2) shows up as
        weight in the outermost nodes; the expectation is then infinite and so
        is the variational energy at this scale.
        """
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            v = np.asarray(potential(self.r), dtype=float)
            v = np.where(np.isfinite(v), v, np.where(v > 0, 1e300, -1e300))
            contrib = self.r_rows ** 2 * np.abs(v)
        tail = contrib[:, -max(1, contrib.shape[1] // 10):].sum(axis=1)
        if not np.all(tail <= _TAIL_TOL * contrib.sum(axis=1)):
            return np.full((self.dim, self.dim), np.inf)
        return (self.r_rows * v) @ self.r_rows.T

    def kinetic_matrix(self, kinetic: Callable) -> np.ndarray:
        return (self.p_rows * kinetic(self.p)) @ self.p_rows.T

    def hamiltonian(self, kinetic: Callable, potential: Callable) -> np.ndarray:
        h = self.kinetic_matrix(kinetic) + self.potential_matrix(potential)
        return 0.5 * (h + h.T)


def _lowest(h: np.ndarray) -> float:
    if not np.all(np.isfinite(h)):
        return math.inf
    return symmetric_eigen_smallest(h)[0]


def _solve_family(kinetic, potential, settings: OracleSettings, family: str) -> SpectralResult:
    dim, order = settings.basis_dim, settings.quadrature_order

    def energy(scale: float) -> float:
        return _lowest(_Basis(family, dim, scale, order).hamiltonian(kinetic, potential))

    scale = settings.scale
    if settings.scale_auto:
        bracket = expand_bracket(energy, scale, max_expansions=80)
        scale, _ = minimize_unimodal(energy, bracket, rel_tol=settings.scale_tol)
    h = _Basis(family, dim, scale, order).hamiltonian(kinetic, potential)
    e = _lowest(h)
    sub = max(1, dim - 5)
    residual = max(_lowest(h[:sub, :sub]) - e, 0.0)
    used = replace(settings, scale=scale, scale_auto=False, basis=family)
    return SpectralResult(energy=e, residual=residual, settings_used=used)


def ground_state(kinetic, potential: Callable, settings: OracleSettings | None = None) -> SpectralResult:
    """Variational ground energy of K + V for any radial potential callable."""
    settings = settings or OracleSettings()
    kinetic = Kinetic.parse(kinetic)
    families = FAMILIES if settings.basis == "auto" else (settings.basis,)
    results = [_solve_family(kinetic, potential, settings, f) for f in families]
    return min(results, key=lambda res: res.energy)


def schrodinger_ground(potential: PotentialSum, v_overall: float = 1.0,
                       settings: OracleSettings | None = None) -> SpectralResult:
    """Ground energy of p^2 + v V(r)."""
    return ground_state(Kinetic("p2"), potential.scaled(v_overall), settings)


def ultrarelativistic_ground(potential: PotentialSum, settings: OracleSettings | None = None) -> SpectralResult:
    """Ground energy of p + V(r); needs a term with q > -1."""
    if all(q <= COULOMB_Q for q in potential.exponents):
        raise NoDiscreteSpectrumError("p - v/r has no discrete eigenvalues")
    return ground_state(Kinetic("p"), potential, settings)


def salpeter_ground(problem, settings: OracleSettings | None = None) -> SpectralResult:
    """Ground energy of beta sqrt(m^2 + p^2) + V(r) for a bounds.Problem."""
    v = problem.potential.coulomb / problem.beta
    if v >= 0.5:
        raise CouplingTooLargeError(f"Coulomb coupling a/beta = {v} must be below 1/2")
    if problem.m == 0.0 and all(q <= COULOMB_Q for q in problem.potential.exponents):
        raise NoDiscreteSpectrumError("massless Salpeter-Coulomb problem has no discrete eigenvalues")
    return ground_state(Kinetic("salpeter", problem.m, problem.beta), problem.potential, settings)


def coupling_curve(kinetic, base: PotentialSum, v_grid: Sequence[float],
                   settings: OracleSettings | None = None) -> CouplingCurve:
    """Sample F(v), the ground energy of K + v * base, on v_grid."""
    kinetic = Kinetic.parse(kinetic)
    v = np.asarray(sorted(v_grid), dtype=float)
    F = [ground_state(kinetic, base.scaled(c), settings).energy for c in v]
    return CouplingCurve(v, np.array(F), label=f"{kinetic.kind} + v*({base.describe()})")
