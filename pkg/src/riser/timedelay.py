"""Reflection phase, Wigner time delay and delay peaks.

With ``r(E) = exp(i theta(E))`` on the real axis, the delay is
``tau = d theta / dE = Im(r'(E) / r(E))`` (``hbar = 1``, so ``tau`` is in
inverse energy units).  Peaks of ``tau`` sit close to the real parts of the
resonance poles.

All evaluations go through :func:`reflection_many`, which hands whole arrays
of energies to the numerical matcher (one sweep) or spreads closed-form
evaluations over worker processes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.signal import find_peaks as _grid_maxima

from . import matcher
from . import models as M
from . import systems as S
from .parallel import map_chunks
from .systems import SystemSpec

__all__ = [
    "TimeDelayError",
    "ThresholdError",
    "RefinementLimitError",
    "TimeDelayCurve",
    "DelayPeak",
    "reflection_many",
    "phase_curve",
    "time_delay",
    "time_delay_many",
    "delay_curve",
    "find_peaks",
    "THRESHOLD_GUARD",
]

#: energies closer than this to a threshold are excluded from peak scans
THRESHOLD_GUARD = 1e-6
#: time_delay refuses energies closer than this to a threshold
THRESHOLD_EXCLUSION = 1e-9
#: phase change between neighbours that triggers bisection in peak scans
DENSIFY_STEP = 0.1
MAX_DEPTH = 20
#: fixed matcher step for numerical amplitudes (keeps r(E) smooth in E)
NUMERIC_STEP = 0.01


class TimeDelayError(RuntimeError):
    """Base class for time-delay failures."""


class ThresholdError(TimeDelayError, ValueError):
    """Energy at or within the exclusion band of a threshold."""


class RefinementLimitError(TimeDelayError):
    """Phase steps could not be brought below ``pi`` within the depth limit."""


@dataclass(frozen=True)
class TimeDelayCurve:
    """Unwrapped phase (and optionally delay) on an ascending energy grid."""

    energies: np.ndarray
    theta: np.ndarray
    tau: Optional[np.ndarray]
    system: SystemSpec

    def rows(self) -> list[tuple[float, float, float]]:
        tau = self.tau if self.tau is not None else np.full(len(self.energies), np.nan)
        return list(zip(self.energies.tolist(), self.theta.tolist(), tau.tolist()))


@dataclass(frozen=True)
class DelayPeak:
    """A local maximum of ``tau`` at ``eps_n`` with its second derivative."""

    eps_n: float
    tau_max: float
    curvature: float


# ---------------------------------------------------------------------------
# amplitude evaluation
# ---------------------------------------------------------------------------


def _closed_r_chunk(spec: SystemSpec, energies: list[complex]) -> list[complex]:
    return [complex(M.reflection(spec, E).r) for E in energies]


def reflection_many(spec: SystemSpec, energies: Sequence[float]) -> np.ndarray:
    """``r(E)`` for an array of energies."""
    energies = np.asarray(energies, dtype=float)
    if energies.size == 0:
        return np.zeros(0, complex)
    if M.has_closed_form(spec):
        return np.array(map_chunks(_closed_r_chunk, spec, energies.tolist()), dtype=complex)
    return np.asarray(matcher.numeric_reflection_many(spec, energies, step=NUMERIC_STEP).r)


def _check_energies(spec: SystemSpec, energies: np.ndarray, guard: float) -> None:
    for thr in S.thresholds(spec):
        if np.any(energies <= thr + guard):
            raise ThresholdError(f"energies must lie above the threshold {thr:g} by more than {guard:g}")


# ---------------------------------------------------------------------------
# phase
# ---------------------------------------------------------------------------


def _refine_phase(spec: SystemSpec, grid: np.ndarray, r: np.ndarray, limit: float) -> tuple[np.ndarray, np.ndarray]:
    """Insert midpoints until every neighbouring phase step is below ``limit``."""
    for _ in range(MAX_DEPTH + 1):
        step = np.angle(r[1:] / r[:-1])
        bad = np.nonzero(np.abs(step) >= limit)[0]
        if bad.size == 0:
            return grid, r
        mids = 0.5 * (grid[bad] + grid[bad + 1])
        grid = np.insert(grid, bad + 1, mids)
        r = np.insert(r, bad + 1, reflection_many(spec, mids))
    raise RefinementLimitError(f"phase step still {np.max(np.abs(step)):.3g} after {MAX_DEPTH} bisections")


def phase_curve(spec: SystemSpec, e_grid: Sequence[float]) -> TimeDelayCurve:
    """Unwrapped reflection phase on ``e_grid``.

    ``theta`` starts at the principal argument of the first amplitude and
    accumulates ``arg(r[i+1] / r[i])``.  Wherever an increment reaches
    ``pi / 2``, the interval is bisected (up to 20 levels).  The returned
    curve contains the inserted energies, so neighbouring samples never
    differ by more than ``pi / 2`` and every energy of ``e_grid`` is
    present.
    """
    grid = np.asarray(e_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 1 or np.any(np.diff(grid) <= 0):
        raise ValueError("e_grid must be a strictly ascending 1-D sequence")
    _check_energies(spec, grid, 0.0)
    grid, r = _refine_phase(spec, grid, reflection_many(spec, grid), math.pi / 2)
    theta = np.angle(r[0]) + np.concatenate([[0.0], np.cumsum(np.angle(r[1:] / r[:-1]))])
    return TimeDelayCurve(grid, theta, None, spec)


# ---------------------------------------------------------------------------
# delay
# ---------------------------------------------------------------------------

_RIDDERS_LEVELS = 8
#: largest phase change allowed across the widest Ridders stencil
PHASE_WINDOW = 0.05


def _local_step(spec: SystemSpec, E: np.ndarray, r0: np.ndarray, h: np.ndarray) -> np.ndarray:
    h = h.copy()
    todo = np.arange(E.size)
    for _ in range(40):
        if todo.size == 0:
            break
        e, hh = E[todo], h[todo]
        r = reflection_many(spec, np.concatenate([e + hh, e - hh]))
        m = todo.size
        swing = np.maximum(np.abs(np.angle(r[:m] / r0[todo])), np.abs(np.angle(r[m:] / r0[todo])))
        todo = todo[swing > PHASE_WINDOW]
        h[todo] /= 2
    return h


def time_delay_many(spec: SystemSpec, energies: Sequence[float]) -> np.ndarray:
    """``Im(r'/r)`` with ``r'`` from Richardson-extrapolated central differences.

    Each energy gets a tableau of central differences for steps ``h, h/2,
    ...`` (Ridders' scheme).  The entry with the smallest estimated error is
    returned.  The initial ``h`` is ``1e-2 max(1, |E|)`` and is capped at
    a quarter of the distance to the nearest threshold, then halved until
    the phase moves by less than ``PHASE_WINDOW`` across ``E +- h`` so that
    narrow resonances are not stepped over.
    """
    E = np.asarray(energies, dtype=float)
    _check_energies(spec, E, THRESHOLD_EXCLUSION)
    h0 = 1e-2 * np.maximum(1.0, np.abs(E))
    for thr in S.thresholds(spec):
        h0 = np.minimum(h0, (E - thr) / 4)
    n = E.size
    r0 = reflection_many(spec, E)
    h0 = _local_step(spec, E, r0, h0)
    hs = h0[None, :] / 2.0 ** np.arange(_RIDDERS_LEVELS)[:, None]
    r = reflection_many(spec, np.concatenate([(E + hs).ravel(), (E - hs).ravel()]))
    plus = r[: hs.size].reshape(hs.shape)
    minus = r[hs.size :].reshape(hs.shape)
    diffs = (plus - minus) / (2 * hs)
    best = diffs[0].copy()
    err = np.full(n, np.inf)
    tab = [diffs[0]]
    for i in range(1, _RIDDERS_LEVELS):
        row = [diffs[i]]
        fac = 4.0
        for j in range(1, i + 1):
            row.append((fac * row[j - 1] - tab[j - 1]) / (fac - 1))
            fac *= 4.0
            e = np.maximum(np.abs(row[j] - row[j - 1]), np.abs(row[j] - tab[j - 1]))
            take = e < err
            err = np.where(take, e, err)
            best = np.where(take, row[j], best)
        tab = row
    return (best / r0).imag


def time_delay(spec: SystemSpec, E: float) -> float:
    """Wigner delay ``tau(E) = Im(r'(E) / r(E))``."""
    return float(time_delay_many(spec, [float(E)])[0])


def delay_curve(spec: SystemSpec, e_grid: Sequence[float]) -> TimeDelayCurve:
    """:func:`phase_curve` with ``tau`` filled in at every grid energy."""
    curve = phase_curve(spec, e_grid)
    return TimeDelayCurve(curve.energies, curve.theta, time_delay_many(spec, curve.energies), spec)


# ---------------------------------------------------------------------------
# peaks
# ---------------------------------------------------------------------------


def _refine_maxima(spec: SystemSpec, brackets: np.ndarray, tol: float = 1e-6, max_iter: int = 80):
    """Iterated three-point parabolic refinement of maxima, all peaks in lockstep.

    ``brackets`` rows are ``(a, b, c)`` with ``tau(b) > tau(a), tau(c)``.
    A golden-section step replaces the parabola whenever its vertex falls
    outside the bracket or too close to ``b``.
    """
    a, b, c = (brackets[:, i].copy() for i in range(3))
    fa, fb, fc = (time_delay_many(spec, v) for v in (a, b, c))
    active = np.ones(len(a), bool)
    golden = 0.381966
    for _ in range(max_iter):
        if not np.any(active):
            break
        num = (b - a) ** 2 * (fb - fc) - (b - c) ** 2 * (fb - fa)
        den = (b - a) * (fb - fc) - (b - c) * (fb - fa)
        with np.errstate(divide="ignore", invalid="ignore"):
            x = b - 0.5 * num / den
        wide_right = (c - b) > (b - a)
        gold = np.where(wide_right, b + golden * (c - b), b - golden * (b - a))
        bad = ~np.isfinite(x) | (x <= a) | (x >= c) | (np.abs(x - b) < 0.25 * tol)
        x = np.where(bad, gold, x)
        idx = np.nonzero(active)[0]
        fx = np.full(len(a), -np.inf)
        fx[idx] = time_delay_many(spec, x[idx])
        moved = np.abs(x - b)
        better = fx > fb
        right = x > b
        # new bracket keeps the best point in the middle
        na = np.where(better, np.where(right, b, a), np.where(right, a, x))
        nc = np.where(better, np.where(right, c, b), np.where(right, x, c))
        nfa = np.where(better, np.where(right, fb, fa), np.where(right, fa, fx))
        nfc = np.where(better, np.where(right, fc, fb), np.where(right, fx, fc))
        nb = np.where(better, x, b)
        nfb = np.where(better, fx, fb)
        a = np.where(active, na, a)
        c = np.where(active, nc, c)
        fa = np.where(active, nfa, fa)
        fc = np.where(active, nfc, fc)
        b = np.where(active, nb, b)
        fb = np.where(active, nfb, fb)
        active &= ~((c - a < 2 * tol) | (moved < tol))
    return b, fb


def find_peaks(
    spec: SystemSpec,
    e_min: float,
    e_max: float,
    n_grid: int = 2000,
    *,
    prominence: float = 1e-6,
) -> list[DelayPeak]:
    """Local maxima of ``tau`` on ``(e_min, e_max)``, ascending.

    The scan starts on ``n_grid`` equally spaced energies (kept at least
    ``THRESHOLD_GUARD`` above thresholds).  Intervals with phase change
    above ``DENSIFY_STEP`` are bisected up to 20 times, so that very narrow
    resonances are resolved.  Maxima of the discrete ``dtheta / dE`` that
    stand out by more than ``prominence`` times ``max(1, max |tau|)`` are
    refined on the exact delay to 1e-6 in energy.
    """
    if not e_min < e_max:
        raise ValueError("need e_min < e_max")
    lo = e_min
    for thr in S.thresholds(spec):
        lo = max(lo, thr + THRESHOLD_GUARD)
    grid = np.linspace(lo, e_max, n_grid)
    grid, r = _refine_phase(spec, grid, reflection_many(spec, grid), DENSIFY_STEP)
    mids = 0.5 * (grid[1:] + grid[:-1])
    slope = np.angle(r[1:] / r[:-1]) / np.diff(grid)
    scale = max(1.0, float(np.max(np.abs(slope))))
    idx, _ = _grid_maxima(slope, prominence=prominence * scale)
    if idx.size == 0:
        return []
    brackets = np.stack([mids[idx - 1], mids[idx], mids[idx + 1]], axis=1)
    eps, tau_max = _refine_maxima(spec, brackets)
    peaks = []
    for e, t, br in zip(eps, tau_max, brackets):
        h = max(1e-5, 1e-2 * (br[2] - br[0]))
        side = time_delay_many(spec, [e - h, e + h])
        peaks.append(DelayPeak(float(e), float(t), float((side[0] - 2 * t + side[1]) / h**2)))
    peaks.sort(key=lambda p: p.eps_n)
    return peaks
