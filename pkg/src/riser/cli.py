"""Command-line entry point.

::

    riser tau          --system s5 --out tau.csv
    riser poles        --system s4 --param re_max=12 --out poles.json
    riser psi          --system s6.1 --param energy=2.1263-0.2428j
    riser reflectivity --config run.cfg
    riser table1       --out table1.json

``--config`` reads a configuration file; otherwise ``--system`` and
repeated ``--param key=value`` build one inline.  ``--out`` overrides the
output path (standard output by default).  ``RISER_THREADS`` caps worker
processes.

Exit status: 0 success, 1 usage or configuration error, 2 a physics check
failed (a numerical failure, a reference mismatch, or a reflection
amplitude off the unit circle).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from typing import Optional, Sequence

import numpy as np

from . import matcher
from . import poles as P
from . import report as R
from . import systems as S
from . import timedelay as T
from .config import ConfigError, RunConfig, load_config, parse_config

__all__ = ["main", "build_config", "run", "UsageError", "PhysicsCheckError", "EXIT_OK", "EXIT_USAGE", "EXIT_PHYSICS"]

EXIT_OK, EXIT_USAGE, EXIT_PHYSICS = 0, 1, 2

#: allowed deviation of |r|^2 from 1 in the reflectivity check
UNIMODULAR_TOL = 1e-6

DEFAULT_E_MAX = 10.0
DEFAULT_N_GRID = 2000
DEFAULT_X_RANGE = (-15.0, 8.0)
DEFAULT_N_POINTS = 2301


class UsageError(Exception):
    """Bad command-line arguments."""


class PhysicsCheckError(Exception):
    """A result failed its physical check."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="riser", description="Resonances of one-sided scattering off a rising potential.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, text in (
        ("tau", "reflection phase and time delay on an energy grid (CSV E,theta,tau)"),
        ("poles", "complex-energy poles of the reflection amplitude (JSON)"),
        ("psi", "wavefunction profile at a complex energy (CSV x,re_psi,im_psi,abs2_psi)"),
        ("reflectivity", "reflection amplitude on an energy grid (CSV E,re_r,im_r,abs2_r)"),
        ("table1", "compare poles and delay peaks with the embedded reference table (JSON)"),
    ):
        cmd = sub.add_parser(name, help=text, description=text)
        cmd.add_argument("--config", metavar="PATH", help="configuration file")
        cmd.add_argument("--system", help="alias (s0.1 ... s7.3) or variant name")
        cmd.add_argument("--param", action="append", default=[], metavar="KEY=VALUE", help="extra setting; repeatable")
        cmd.add_argument("--out", metavar="PATH", help="output path ('-' for standard output)")
    return parser


def build_config(args: argparse.Namespace) -> RunConfig:
    """Turn parsed arguments into a validated :class:`RunConfig`."""
    if args.config and (args.system or args.param):
        raise UsageError("--config cannot be combined with --system/--param")
    if args.config:
        config = load_config(args.config, args.command)
    else:
        lines = [] if args.system is None else [f"system = {args.system}"]
        for item in args.param:
            if "=" not in item:
                raise UsageError(f"--param expects KEY=VALUE, got {item!r}")
            key, value = item.split("=", 1)
            lines.append(f"{key.strip()} = {value.strip()}")
        config = parse_config("\n".join(lines), args.command)
    if args.out is not None:
        config = replace(config, out=args.out)
    return config


def _energy_grid(config: RunConfig) -> np.ndarray:
    lo = R.peak_window(config.system, 0.0)[0]
    e_min = lo if config.e_min is None else config.e_min
    e_max = DEFAULT_E_MAX if config.e_max is None else config.e_max
    if not e_min < e_max:
        raise ConfigError("invariant-violation", f"empty energy range [{e_min:g}, {e_max:g}]")
    return np.linspace(e_min, e_max, config.n_grid or DEFAULT_N_GRID)


def _run_tau(config: RunConfig) -> None:
    grid = _energy_grid(config)
    R.emit_curve(T.delay_curve(config.system, grid), config.out)
    if config.peaks_out is not None:
        peaks = T.find_peaks(config.system, grid[0], grid[-1], len(grid), prominence=config.prominence)
        R.emit_peaks(peaks, config.peaks_out)


def _run_poles(config: RunConfig) -> None:
    spec = config.system
    region = config.region or P.DEFAULT_REGION
    resonances = P.find_resonances(spec, region, config.tol)
    indexed = [r for r in resonances if r.n is not None]
    if config.peaks and indexed and not isinstance(spec, S.RigidWall):
        lo, hi = R.peak_window(spec, max(r.E_n for r in indexed) + 1.0)
        if lo < hi:
            peaks = T.find_peaks(spec, lo, hi, prominence=config.prominence)
            resonances = P.attach_peaks(resonances, [p.eps_n for p in peaks])
    R.emit_poles(P.pole_records(spec, resonances), config.out)


def _run_psi(config: RunConfig) -> None:
    x_min = DEFAULT_X_RANGE[0] if config.x_min is None else config.x_min
    x_max = DEFAULT_X_RANGE[1] if config.x_max is None else config.x_max
    profile = matcher.wavefunction_profile(
        config.system, config.energy, x_min, x_max, config.n_points or DEFAULT_N_POINTS, config.matcher_tol
    )
    R.emit_profile(profile, config.out)


def _run_reflectivity(config: RunConfig) -> None:
    grid = _energy_grid(config)
    r = T.reflection_many(config.system, grid)
    R.emit_reflectivity(grid, r, config.out)
    worst = float(np.max(np.abs(np.abs(r) ** 2 - 1)))
    if worst > UNIMODULAR_TOL:
        raise PhysicsCheckError(f"|r|^2 deviates from 1 by {worst:.3g}")


def _run_table1(config: RunConfig) -> None:
    result = R.run_table1(config.tolerances, config.region or P.DEFAULT_REGION)
    R.write_text(R.to_json(result.as_dict()), config.out)
    if not result.passed:
        failed = [r.alias for r in result.rows if not r.passed]
        raise PhysicsCheckError(f"reference mismatch in {', '.join(failed)}")


_TASKS = {
    "tau": _run_tau,
    "poles": _run_poles,
    "psi": _run_psi,
    "reflectivity": _run_reflectivity,
    "table1": _run_table1,
}


def run(config: RunConfig) -> None:
    """Execute ``config.task``; raises on failure."""
    _TASKS[config.task](config)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = _parser().parse_args(argv)
        config = build_config(args)
        run(config)
    except (UsageError, ConfigError, OSError) as err:
        print(f"riser: {err}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as err:
        # inputs the library rejects (grid outside a system's range, an
        # energy on a threshold) are usage errors too
        print(f"riser: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (PhysicsCheckError, *R.PHYSICS_ERRORS) as err:
        print(f"riser: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_PHYSICS
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
