"""Deterministic CSV/JSON emission and the reference-table comparison.

Every file is written with LF line endings and a trailing newline.  CSV
floats use 17 significant digits (``%.17g``), enough to round-trip a
double exactly.  JSON goes through :func:`json.dumps` with a fixed
indent, so identical inputs give byte-identical outputs.
"""

from __future__ import annotations

import json
import math
import sys
import time
from dataclasses import dataclass, field
from typing import IO, Iterable, Optional, Sequence

import numpy as np

from . import golden as G
from . import poles as P
from . import systems as S
from . import timedelay as T
from .config import Tolerances
from .matcher import MatcherError, WavefunctionProfile
from .specfun import SpecialFunctionError

#: numerical failures that count as a failed physics check, not a crash
PHYSICS_ERRORS = (P.PoleSearchError, T.TimeDelayError, MatcherError, SpecialFunctionError, ArithmeticError)

__all__ = [
    "format_csv",
    "curve_csv",
    "profile_csv",
    "reflectivity_csv",
    "to_json",
    "peak_records",
    "write_text",
    "emit_curve",
    "emit_profile",
    "emit_reflectivity",
    "emit_poles",
    "emit_peaks",
    "RowReport",
    "Table1Report",
    "peak_window",
    "compare_row",
    "run_table1",
    "PHYSICS_ERRORS",
]


def _g17(value: float) -> str:
    return "%.17g" % value


def format_csv(header: Sequence[str], rows: Iterable[Sequence[float]]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(_g17(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def curve_csv(curve: T.TimeDelayCurve) -> str:
    return format_csv(("E", "theta", "tau"), curve.rows())


def profile_csv(profile: WavefunctionProfile) -> str:
    rows = ((x, psi.real, psi.imag, a2) for x, psi, a2 in profile.samples)
    return format_csv(("x", "re_psi", "im_psi", "abs2_psi"), rows)


def reflectivity_csv(energies: Sequence[float], r: Sequence[complex]) -> str:
    rows = ((E, z.real, z.imag, abs(z) ** 2) for E, z in zip(np.asarray(energies, float), np.asarray(r, complex)))
    return format_csv(("E", "re_r", "im_r", "abs2_r"), rows)


def _clean(value):
    # JSON has no NaN or infinity; report them as null
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.generic):
        return _clean(value.item())
    return value


def to_json(data) -> str:
    return json.dumps(_clean(data), indent=2, allow_nan=False) + "\n"


def peak_records(peaks: Sequence[T.DelayPeak]) -> list[dict]:
    return [{"eps_n": p.eps_n, "tau_max": p.tau_max} for p in peaks]


def write_text(text: str, path: Optional[str], stream: IO[str] = None) -> None:
    """Write ``text`` to ``path``, or to ``stream`` (stdout) for ``None``/``-``.

    Filesystem errors propagate unchanged.
    """
    if path is None or path == "-":
        (stream or sys.stdout).write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def emit_curve(curve: T.TimeDelayCurve, path: Optional[str]) -> None:
    write_text(curve_csv(curve), path)


def emit_profile(profile: WavefunctionProfile, path: Optional[str]) -> None:
    write_text(profile_csv(profile), path)


def emit_reflectivity(energies: Sequence[float], r: Sequence[complex], path: Optional[str]) -> None:
    write_text(reflectivity_csv(energies, r), path)


def emit_poles(records: list[dict], path: Optional[str]) -> None:
    write_text(to_json(records), path)


def emit_peaks(peaks: Sequence[T.DelayPeak], path: Optional[str]) -> None:
    write_text(to_json(peak_records(peaks)), path)


# ---------------------------------------------------------------------------
# reference table
# ---------------------------------------------------------------------------


@dataclass
class RowReport:
    alias: str
    entries: list[dict] = field(default_factory=list)
    error: Optional[str] = None
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.error is None and all(e["pass"] for e in self.entries)

    def as_dict(self) -> dict:
        return {
            "system": self.alias,
            "pass": self.passed,
            "error": self.error,
            "seconds": round(self.seconds, 1),
            "entries": self.entries,
        }


@dataclass
class Table1Report:
    rows: list[RowReport]
    tolerances: Tolerances

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def as_dict(self, timings: bool = False) -> dict:
        rows = [r.as_dict() for r in self.rows]
        if not timings:
            for r in rows:
                del r["seconds"]
        tol = self.tolerances
        return {
            "pass": self.passed,
            "tolerances": {
                "energy": tol.energy_tol,
                "width_abs": tol.width_abs_tol,
                "width_rel": tol.width_rel_tol,
                "narrow_width_rel": tol.narrow_width_rel_tol,
                "narrow_width": tol.narrow_width,
                "peak": tol.peak_tol,
            },
            "rows": rows,
        }


def peak_window(spec: S.SystemSpec, top: float) -> tuple[float, float]:
    """Energy range scanned for delay peaks up to ``top``."""
    level = S.left_level(spec)
    lo = 0.1 if math.isinf(level) else max(level, 0.0) + 0.1
    return lo, top


def compare_row(
    row: G.GoldenRow,
    resonances: Sequence[P.Resonance],
    tolerances: Tolerances = Tolerances(),
) -> list[dict]:
    """One entry per reference value with the computed value, delta and verdict.

    Computed poles are those with an index ``n``; each carries the delay peak
    attached by :func:`riser.poles.attach_peaks` (or ``None``).
    """
    indexed = {r.n: r for r in resonances if r.n is not None}
    entries = []
    for n, ((E_ref, hw_ref), eps_ref) in enumerate(zip(row.poles, row.peaks)):
        res = indexed.get(n)
        E = None if res is None else res.E_n
        hw = None if res is None else res.half_width
        eps = None if res is None else res.eps_n
        checks = (
            ("E_n", E_ref, E, tolerances.energy_tol),
            ("half_width", hw_ref, hw, tolerances.width_window(hw_ref)),
            ("eps_n", eps_ref, eps, tolerances.peak_tol),
        )
        for quantity, ref, got, window in checks:
            delta = None if got is None else got - ref
            entries.append(
                {
                    "n": n,
                    "quantity": quantity,
                    "reference": ref,
                    "computed": got,
                    "delta": delta,
                    "window": window,
                    "pass": delta is not None and abs(delta) <= window,
                }
            )
    return entries


def run_table1(tolerances: Tolerances = Tolerances(), region: P.SearchRegion = P.DEFAULT_REGION) -> Table1Report:
    """Search poles and delay peaks of every reference row and compare.

    A numerical failure inside one row is recorded in that row's ``error``
    (prefixed with the row alias and exception type) and the remaining rows
    still run.
    """
    rows = []
    for golden in G.TABLE1:
        start = time.perf_counter()
        report = RowReport(golden.alias)
        try:
            spec = S.system_from_alias(golden.alias)
            resonances = P.find_resonances(spec, region)
            indexed = [r for r in resonances if r.n is not None]
            top = (indexed[min(4, len(indexed) - 1)].E_n if indexed else region.re_max) + 1.0
            peaks = T.find_peaks(spec, *peak_window(spec, top))
            resonances = P.attach_peaks(resonances, [p.eps_n for p in peaks])
            report.entries = compare_row(golden, resonances, tolerances)
        except PHYSICS_ERRORS as err:
            report.error = f"{golden.alias}: {type(err).__name__}: {err}"
        report.seconds = time.perf_counter() - start
        rows.append(report)
    return Table1Report(rows, tolerances)
