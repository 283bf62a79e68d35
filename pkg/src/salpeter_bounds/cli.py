"""Command-line front end: CSV tables of bounds and oracle energies.

Subcommands
    table1   tabulated v = 1 eigenvalues and P-numbers next to recomputed ones
    bounds   lower / upper bounds over a mass grid for a flag-built potential
    figure   preset problems and grids for the four figures
    oracle   Rayleigh-Ritz ground energies

Exit codes: 0 success, 2 argument error, 3 domain error, 4 lower > upper.
"""
from __future__ import annotations

import argparse
import io
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .bounds import (
    DEFAULT_NU_RANGE,
    DEFAULT_NU_STEPS,
    Problem,
    lower_bound,
    theorem1_bounds,
    upper_bound,
    upper_bound_optimized,
)
from .errors import ConfigurationError, DomainError, UnboundedObjectiveError
from .kinetic_potentials import (
    TABLE1_PRINTED,
    PKind,
    PotentialSum,
    p_log,
    p_lower,
    p_schrodinger,
)
from .oracle import (
    FAMILIES,
    Kinetic,
    OracleSettings,
    ground_state,
    salpeter_ground,
    ultrarelativistic_ground,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_ORDERING = 4

SUBCOMMANDS = ("table1", "bounds", "figure", "oracle")


class OrderingViolation(RuntimeError):
    """A lower bound came out above the matching upper bound."""


@dataclass(frozen=True)
class MassGrid:
    start: float
    stop: float
    steps: int

    def __post_init__(self):
        if self.steps < 1:
            raise ConfigurationError("mass grid needs at least one point")
        if self.start < 0.0 or self.stop < 0.0:
            raise DomainError("masses must be non-negative")

    @classmethod
    def parse(cls, text: str) -> "MassGrid":
        parts = text.split(":")
        try:
            if len(parts) == 1:
                values = (float(parts[0]), float(parts[0]), 1)
            elif len(parts) == 3:
                values = (float(parts[0]), float(parts[1]), int(parts[2]))
            else:
                values = None
        except ValueError:
            values = None
        if values is None:
            raise ConfigurationError(f"mass grid must be 'm' or 'start:stop:count', got {text!r}")
        return cls(*values)

    def values(self) -> np.ndarray:
        if self.steps == 1:
            return np.array([self.start])
        return np.linspace(self.start, self.stop, self.steps)

    def __str__(self):
        return f"{self.start:g}:{self.stop:g}:{self.steps}"


# Preset figure problems. Grids are artifact choices: [0, 10] with 21 points,
# and [0, 50] for the large-m continuation.
FIGURES = {
    1: dict(coefficients=dict(linear=1.0), nu=None, grid="0:10:21", oracle=False),
    2: dict(coefficients=dict(coulomb=0.1, linear=0.25), nu=1.6, grid="0:10:21", oracle=True),
    3: dict(coefficients=dict(coulomb=0.1, linear=0.25), nu=1.6, grid="0:50:51", oracle=False),
    4: dict(coefficients=dict(coulomb=0.1, log=0.25, linear=0.25, quadratic=0.25), nu=1.4,
            grid="0:10:21", oracle=False),
}
FIGURE_ORACLE_DIM = 25


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    beta: float = 1.0
    mass_grid: MassGrid = field(default_factory=lambda: MassGrid(0.0, 0.0, 1))
    coefficients: dict = field(default_factory=dict)
    nu: Optional[float] = None
    nu_optimize: bool = False
    with_oracle: bool = False
    oracle_dim: int = 25
    basis: str = "laguerre"
    kinetic: str = "salpeter"
    figure_id: Optional[int] = None
    output_path: Optional[str] = None

    def potential(self) -> PotentialSum:
        return PotentialSum.from_coefficients(**self.coefficients)

    def problem(self, m: float = 0.0) -> Problem:
        return Problem(self.beta, float(m), self.potential())

    def oracle_settings(self) -> OracleSettings:
        return OracleSettings(basis_dim=self.oracle_dim, basis=self.basis)

    def echo(self) -> str:
        fields = [f"subcommand={self.subcommand}"]
        if self.subcommand == "figure":
            fields.append(f"id={self.figure_id}")
        if self.subcommand != "table1":
            fields += [f"beta={self.beta:g}", f"mass={self.mass_grid}",
                       f"potential={self.potential().describe()}"]
        if self.subcommand in ("bounds", "figure"):
            nu = "optimize" if self.nu_optimize else ("-" if self.nu is None else f"{self.nu:g}")
            fields.append(f"nu={nu}")
        if self.subcommand == "oracle" or self.with_oracle or self.subcommand == "table1":
            fields += [f"oracle_dim={self.oracle_dim}", f"basis={self.basis}"]
        if self.subcommand == "oracle":
            fields.append(f"kinetic={self.kinetic}")
        return "# " + " ".join(fields)


def _term(text: str) -> tuple[float, float]:
    try:
        q, a = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"--term expects q:a, got {text!r}") from None
    if q == 0.0:
        raise argparse.ArgumentTypeError("use --log for the logarithmic term")
    return q, a


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="salpeter-bounds",
        description="Bounds on the ground energy of beta*sqrt(m^2+p^2) + V(r).",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_output(p):
        p.add_argument("--output", help="write CSV here instead of stdout")

    def add_potential(p):
        g = p.add_argument_group("problem")
        g.add_argument("--beta", type=float, default=1.0)
        g.add_argument("--mass", default="0", help="m or start:stop:count (inclusive)")
        g.add_argument("--coulomb", type=float, default=0.0, help="a in -a/r")
        g.add_argument("--log", type=float, default=0.0, help="b in b ln r")
        g.add_argument("--linear", type=float, default=0.0, help="c in c r")
        g.add_argument("--quadratic", type=float, default=0.0, help="d in d r^2")
        g.add_argument("--term", type=_term, action="append", default=[], metavar="Q:A",
                       help="extra a sgn(q) r^q term; repeatable (write --term=-0.5:1 for q < 0)")

    def add_oracle(p):
        p.add_argument("--oracle-dim", type=int, default=25)
        p.add_argument("--basis", choices=FAMILIES + ("auto",), default="laguerre")

    p = sub.add_parser("table1", help="v = 1 eigenvalues and P-numbers")
    add_oracle(p)
    add_output(p)

    p = sub.add_parser("bounds", help="lower and upper bounds over a mass grid")
    add_potential(p)
    nu = p.add_mutually_exclusive_group()
    nu.add_argument("--nu", type=float, help="fixed trial exponent for the upper bound")
    nu.add_argument("--nu-optimize", action="store_true", help="optimize the trial exponent (default)")
    p.add_argument("--with-oracle", action="store_true", help="add a Rayleigh-Ritz column")
    add_oracle(p)
    add_output(p)

    p = sub.add_parser("figure", help="preset figure data")
    p.add_argument("--id", type=int, choices=sorted(FIGURES), required=True, dest="figure_id")
    p.add_argument("--mass", default=None, help="override the preset mass grid")
    add_output(p)

    p = sub.add_parser("oracle", help="Rayleigh-Ritz ground energy")
    add_potential(p)
    p.add_argument("--kinetic", choices=("p2", "p", "salpeter"), default="salpeter")
    add_oracle(p)
    add_output(p)
    return parser


def parse_args(argv: Optional[Sequence[str]] = None) -> RunConfig:
    """Parse and validate; argparse exits with status 2 on malformed flags.

    Raises DomainError for inadmissible problems (coupling, all-zero
    coefficients) and ConfigurationError for inconsistent settings.
    """
    ns = _build_parser().parse_args(argv)
    out = dict(subcommand=ns.subcommand, output_path=ns.output)

    if ns.subcommand == "figure":
        preset = FIGURES[ns.figure_id]
        out.update(figure_id=ns.figure_id, coefficients=dict(preset["coefficients"]),
                   mass_grid=MassGrid.parse(ns.mass or preset["grid"]), nu=preset["nu"],
                   with_oracle=preset["oracle"], oracle_dim=FIGURE_ORACLE_DIM)
    if ns.subcommand in ("table1", "bounds", "oracle"):
        out.update(oracle_dim=ns.oracle_dim, basis=ns.basis)
    if ns.subcommand in ("bounds", "oracle"):
        extra = {}
        for q, a in ns.term:
            if q in extra:
                raise ConfigurationError(f"--term given twice for q = {q:g}")
            extra[q] = a
        coefficients = dict(coulomb=ns.coulomb, log=ns.log, linear=ns.linear, quadratic=ns.quadratic)
        if extra:
            coefficients["extra"] = extra
        out.update(beta=ns.beta, mass_grid=MassGrid.parse(ns.mass), coefficients=coefficients)
    if ns.subcommand == "bounds":
        out.update(nu=ns.nu, nu_optimize=ns.nu is None, with_oracle=ns.with_oracle)
    if ns.subcommand == "oracle":
        out.update(kinetic=ns.kinetic)

    config = RunConfig(**out)
    # Validate everything before any computation starts.
    if config.subcommand != "table1":
        config.oracle_settings()
        config.potential()
        if config.subcommand != "oracle" or config.kinetic == "salpeter":
            for m in config.mass_grid.values():
                config.problem(m)
    return config


def _fmt(x: Optional[float]) -> str:
    if x is None:
        return ""
    return f"{x:.9g}"


def _csv(header: Sequence[str], rows: Sequence[Sequence[str]], echo: str) -> str:
    buf = io.StringIO()
    buf.write(echo + "\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def _cell_error(exc: Exception) -> str:
    return f"error:{type(exc).__name__}"


def run_table1(config: RunConfig) -> str:
    settings = config.oracle_settings()
    header = ["q", "E1_paper", "E1_computed", "P1_paper", "P1_computed",
              "E2_paper", "E2_computed", "P2_paper", "P2_computed"]
    rows = []
    for q, (e1p, p1p, e2p, p2p) in TABLE1_PRINTED.items():
        term = PotentialSum((), 1.0) if q == 0.0 else PotentialSum.from_coefficients(
            coulomb=1.0 if q == -1.0 else 0.0, extra=None if q == -1.0 else {q: 1.0})
        row = [f"{q:g}"]
        if e1p is None:
            row += ["", "", "", ""]
        else:
            try:
                e1 = ground_state(Kinetic("p"), term, settings).energy
                p1 = p_log(PKind.RELATIVISTIC_LOWER, e1) if q == 0.0 else p_lower(q, e1)
                row += [_fmt(e1p), _fmt(e1), _fmt(p1p), _fmt(p1)]
            except (DomainError, ArithmeticError, UnboundedObjectiveError) as exc:
                row += [_fmt(e1p), _cell_error(exc), _fmt(p1p), _cell_error(exc)]
        try:
            e2 = ground_state(Kinetic("p2"), term, settings).energy
            p2 = p_log(PKind.SCHRODINGER, e2) if q == 0.0 else p_schrodinger(q, e2)
            row += [_fmt(e2p), _fmt(e2), _fmt(p2p), _fmt(p2)]
        except (DomainError, ArithmeticError, UnboundedObjectiveError) as exc:
            row += [_fmt(e2p), _cell_error(exc), _fmt(p2p), _cell_error(exc)]
        rows.append(row)
    return _csv(header, rows, config.echo())


def _check_order(m: float, lower: float, upper: float) -> None:
    if lower > upper:
        raise OrderingViolation(f"lower {lower!r} > upper {upper!r} at m = {m:g}")


def _bound_rows(config: RunConfig) -> tuple[list[str], list[list[str]]]:
    header = ["m", "lower", "upper", "nu_used"] + (["oracle"] if config.with_oracle else [])
    rows = []
    for m in config.mass_grid.values():
        problem = config.problem(m)
        lo = lower_bound(problem)
        if config.nu_optimize:
            up = upper_bound_optimized(problem, DEFAULT_NU_RANGE, DEFAULT_NU_STEPS)
        else:
            up = upper_bound(problem, config.nu)
        _check_order(m, lo.value, up.value)
        row = [_fmt(m), _fmt(lo.value), _fmt(up.value), _fmt(up.nu)]
        if config.with_oracle:
            res = salpeter_ground(problem, config.oracle_settings())
            if lo.value > res.energy:
                print(f"warning: lower bound {lo.value:.9g} exceeds oracle energy "
                      f"{res.energy:.9g} at m = {m:g}", file=sys.stderr)
            row.append(_fmt(res.energy))
        rows.append(row)
    return header, rows


def run_bounds(config: RunConfig) -> str:
    header, rows = _bound_rows(config)
    return _csv(header, rows, config.echo())


def run_figure(config: RunConfig) -> str:
    if config.figure_id == 1:
        rows = []
        for m in config.mass_grid.values():
            lo, up = theorem1_bounds(config.problem(m))
            _check_order(m, lo.value, up.value)
            rows.append([_fmt(m), _fmt(lo.value), _fmt(up.value)])
        return _csv(["m", "lower", "upper"], rows, config.echo())
    header, rows = _bound_rows(config)
    return _csv(header, rows, config.echo())


def run_oracle(config: RunConfig) -> str:
    settings = config.oracle_settings()
    header = ["m", "energy", "residual", "basis_dim", "scale", "basis"]
    rows = []
    if config.kinetic == "salpeter":
        for m in config.mass_grid.values():
            res = salpeter_ground(config.problem(m), settings)
            rows.append([_fmt(m), _fmt(res.energy), _fmt(res.residual), str(settings.basis_dim),
                         _fmt(res.settings_used.scale), res.basis])
    else:
        potential = config.potential()
        if config.kinetic == "p":
            res = ultrarelativistic_ground(potential, settings)
        else:
            res = ground_state(Kinetic("p2"), potential, settings)
        rows.append(["", _fmt(res.energy), _fmt(res.residual), str(settings.basis_dim),
                     _fmt(res.settings_used.scale), res.basis])
    return _csv(header, rows, config.echo())


RUNNERS = {"table1": run_table1, "bounds": run_bounds, "figure": run_figure, "oracle": run_oracle}


def run(config: RunConfig) -> str:
    return RUNNERS[config.subcommand](config)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        config = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    try:
        text = run(config)
    except OrderingViolation as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_ORDERING
    except (DomainError, UnboundedObjectiveError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    if config.output_path:
        with open(config.output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
