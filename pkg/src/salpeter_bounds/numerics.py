"""Special functions, quadrature, 1-D minimization and a Jacobi eigensolver.

Everything here is a pure function of its inputs.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import BracketError, DomainError, UnboundedObjectiveError

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# Bernoulli terms B_2k / (2k) for the digamma asymptotic series.
_DIGAMMA_ASYMPTOTIC = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)

GOLDEN = 0.5 * (math.sqrt(5.0) - 1.0)


def ln_gamma(x: float) -> float:
    """Natural log of the Gamma function for real x > 0."""
    x = float(x)
    if not x > 0.0 or math.isinf(x):
        raise DomainError(f"ln_gamma requires finite x > 0, got {x!r}")
    if x < 0.5:
        # Lanczos loses accuracy below 1/2; step up once.
        return ln_gamma(x + 1.0) - math.log(x)
    z = x - 1.0
    acc = _LANCZOS_COEF[0]
    for k in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(acc)


def digamma(x: float) -> float:
    """psi(x) = Gamma'(x)/Gamma(x) for real x > 0.

    Upward recurrence to x >= 6, then the asymptotic Bernoulli series.
    """
    x = float(x)
    if not x > 0.0 or math.isinf(x):
        raise DomainError(f"digamma requires finite x > 0, got {x!r}")
    shift = 0.0
    while x < 6.0:
        shift -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    power = inv2
    for coef in _DIGAMMA_ASYMPTOTIC:
        series += coef * power
        power *= inv2
    return shift + math.log(x) - 0.5 / x - series


# ---------------------------------------------------------------------------
# Quadrature


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def integrate(self, f: Callable[[np.ndarray], np.ndarray]) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


@functools.lru_cache(maxsize=64)
def _legendre_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights on [-1, 1] by Newton iteration on P_n (cached, read-only)."""
    i = np.arange(1, order + 1)
    x = np.cos(np.pi * (i - 0.25) / (order + 0.5))
    for _ in range(100):
        p0 = np.ones_like(x)
        p1 = x.copy()
        for k in range(2, order + 1):
            p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
        dp = order * (x * p1 - p0) / (x * x - 1.0)
        dx = p1 / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-16:
            break
    # Final derivative at the converged nodes.
    p0 = np.ones_like(x)
    p1 = x.copy()
    for k in range(2, order + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    dp = order * (x * p1 - p0) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    x, w = x[::-1].copy(), w[::-1].copy()
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def gauss_legendre(order: int, lo: float = -1.0, hi: float = 1.0) -> QuadratureRule:
    """Gauss-Legendre rule with `order` nodes on [lo, hi].

    Exact for polynomials of degree <= 2*order - 1.
    """
    if order < 2:
        raise DomainError(f"quadrature order must be >= 2, got {order}")
    if not lo < hi:
        raise DomainError(f"need lo < hi, got [{lo}, {hi}]")
    x, w = _legendre_nodes(int(order))
    half = 0.5 * (hi - lo)
    return QuadratureRule(nodes=lo + half * (x + 1.0), weights=half * w, order=int(order))


def semi_infinite_rule(order: int = 200, scale: float = 1.0, cluster: bool = False) -> QuadratureRule:
    """Rule for integrals over (0, inf) via x = scale * t / (1 - t).

    With ``cluster=True`` the inner variable is t = s**2, which packs nodes
    near the origin for integrands with 1/x or ln x behaviour there.
    """
    if scale <= 0.0:
        raise DomainError("scale must be positive")
    base = gauss_legendre(order, 0.0, 1.0)
    s, ws = base.nodes, base.weights
    if cluster:
        t, dt = s * s, 2.0 * s
    else:
        t, dt = s, np.ones_like(s)
    x = scale * t / (1.0 - t)
    dx = scale * dt / (1.0 - t) ** 2
    return QuadratureRule(nodes=x, weights=ws * dx, order=base.order)


# ---------------------------------------------------------------------------
# One-dimensional minimization over a radius


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float
    mid: Optional[float] = None

    def __post_init__(self):
        if not (0.0 < self.lo < self.hi):
            raise BracketError(f"need 0 < lo < hi, got [{self.lo}, {self.hi}]")
        if self.mid is not None and not (self.lo < self.mid < self.hi):
            raise BracketError("mid must lie strictly inside the bracket")

    def interior(self) -> float:
        return self.mid if self.mid is not None else math.sqrt(self.lo * self.hi)


def _finite(value: float) -> float:
    return value if math.isfinite(value) else math.inf


def expand_bracket(f: Callable[[float], float], seed: float, max_expansions: int = 200) -> Bracket:
    """Walk geometrically (factor 2) from `seed` until a minimum is enclosed."""
    if not seed > 0.0:
        raise DomainError("seed radius must be positive")
    fb = _finite(f(seed))
    if math.isinf(fb):
        raise DomainError(f"objective not finite at seed {seed}")
    a, b, c = seed / 2.0, seed, seed * 2.0
    fa, fc = _finite(f(a)), _finite(f(c))
    for _ in range(max_expansions):
        if fa > fb and fc > fb:
            return Bracket(a, c, b)
        if fa < fb and fa <= fc:
            a, b, c = a / 2.0, a, b
            fb, fc = fa, fb
            fa = _finite(f(a))
        elif fc < fb:
            a, b, c = b, c, c * 2.0
            fa, fb = fb, fc
            fc = _finite(f(c))
        else:
            # Exact tie with the middle point (flat bottom): widen the tied side.
            if fa == fb:
                a = a / 2.0
                fa = _finite(f(a))
            if fc == fb:
                c = c * 2.0
                fc = _finite(f(c))
    raise UnboundedObjectiveError(
        f"no interior minimum within {max_expansions} doublings of seed {seed}"
    )


def minimize_unimodal(
    f: Callable[[float], float], bracket: Bracket, rel_tol: float = 1e-10
) -> tuple[float, float]:
    """Golden-section search in u = ln r. Returns (r_star, f(r_star)).

    The argmin cannot be resolved below ~sqrt(machine eps) relative, since
    f is flat to second order there; the minimum value is still accurate.
    """
    lo, hi = math.log(bracket.lo), math.log(bracket.hi)
    f_lo, f_hi = _finite(f(bracket.lo)), _finite(f(bracket.hi))
    f_in = _finite(f(bracket.interior()))
    if not (f_in < f_lo and f_in < f_hi):
        raise BracketError("interior point is not below both bracket endpoints")

    def g(u):
        return _finite(f(math.exp(u)))

    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    g1, g2 = g(x1), g(x2)
    tol = max(rel_tol, 1e-15)
    while hi - lo > tol:
        if g1 <= g2:
            hi, x2, g2 = x2, x1, g1
            x1 = hi - GOLDEN * (hi - lo)
            g1 = g(x1)
        else:
            lo, x1, g1 = x1, x2, g2
            x2 = lo + GOLDEN * (hi - lo)
            g2 = g(x2)
    u_star = x1 if g1 <= g2 else x2
    best = min(g1, g2)
    if f_in < best:
        # Flat objective, golden section drifted; keep the known better point.
        return bracket.interior(), f_in
    return math.exp(u_star), best


def minimize_positive(f: Callable[[float], float], seed: float = 1.0, rel_tol: float = 1e-10) -> tuple[float, float]:
    """expand_bracket followed by minimize_unimodal."""
    return minimize_unimodal(f, expand_bracket(f, seed), rel_tol)


# ---------------------------------------------------------------------------
# Dense symmetric eigenproblem


def _round_robin(n: int) -> list[list[tuple[int, int]]]:
    """n-1 rounds of n/2 disjoint index pairs covering every pair once (n even)."""
    players = list(range(n))
    rounds = []
    for _ in range(n - 1):
        rounds.append([(min(players[i], players[n - 1 - i]), max(players[i], players[n - 1 - i]))
                       for i in range(n // 2)])
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def _check_symmetric(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {a.shape}")
    scale = np.linalg.norm(a)
    if np.linalg.norm(a - a.T) > 1e-12 * max(scale, 1e-300):
        raise DomainError("matrix is not symmetric")
    return 0.5 * (a + a.T)


def jacobi_eigh(matrix, tol: float = 1e-15, max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """All eigenpairs of a real symmetric matrix by cyclic Jacobi rotations.

    Uses the round-robin (parallel) ordering so that each round applies n/2
    disjoint rotations as one orthogonal similarity transform. Returns
    eigenvalues ascending and eigenvectors as columns.
    """
    a = _check_symmetric(matrix)
    n0 = a.shape[0]
    if n0 == 1:
        return a.diagonal().copy(), np.ones((1, 1))
    n = n0 + (n0 % 2)
    if n != n0:
        # Pad with a decoupled dummy row; its rotations are always trivial.
        padded = np.zeros((n, n))
        padded[:n0, :n0] = a
        a = padded
    v = np.eye(n)
    norm = np.linalg.norm(a)
    rounds = _round_robin(n)
    idx = [(np.array([p for p, _ in r]), np.array([q for _, q in r])) for r in rounds]
    prev = math.inf
    for _ in range(max_sweeps):
        # Direct norm: sum(a^2) - sum(diag^2) cancels below sqrt(eps) * |A|.
        off = np.linalg.norm(a - np.diag(a.diagonal()))
        # Converged, or stuck at the rounding floor (quadratic convergence stalled).
        if off <= tol * norm or (off <= 1e-10 * norm and off > 0.25 * prev):
            break
        prev = off
        for p, q in idx:
            apq = a[p, q]
            d = a[q, q] - a[p, p]
            den = np.abs(d) + np.sqrt(d * d + 4.0 * apq * apq)
            safe = np.where(den > 0.0, den, 1.0)
            t = np.where(den > 0.0, 2.0 * apq * np.where(d >= 0.0, 1.0, -1.0) / safe, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # One round = n/2 disjoint plane rotations = one orthogonal matrix.
            rot = np.zeros((n, n))
            rot[p, p] = c
            rot[q, q] = c
            rot[p, q] = s
            rot[q, p] = -s
            a = rot.T @ a @ rot
            v = v @ rot
    w = a.diagonal()[:n0]
    vecs = v[:n0, :n0]
    order = np.argsort(w)
    return w[order].copy(), vecs[:, order].copy()


def symmetric_eigen_smallest(matrix) -> tuple[float, np.ndarray]:
    """Smallest eigenvalue and its unit eigenvector."""
    a = np.asarray(matrix, dtype=float)
    if a.shape[0] > 128:
        raise DomainError("symmetric_eigen_smallest supports N <= 128")
    w, v = jacobi_eigh(a)
    x = v[:, 0]
    return float(w[0]), x / np.linalg.norm(x)
