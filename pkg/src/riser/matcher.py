"""Direct numerical integration of ``psi'' = (V(x) - E) psi``.

The matcher handles any left-hand potential joined to a rising right-hand
side.  The recessive solution is seeded deep inside the classically
forbidden region using ``Ai`` for a linear rise or a WKB seed for other
rises.  It is then integrated leftwards, the stable direction, and finally
projected onto the free waves of the left region.

Everything is vectorised over energy.  One sweep carries a whole batch of
energies along a shared step sequence, which keeps scans over thousands of
energies affordable.  Magnitudes are carried as ``psi_true = psi *
exp(log_scale)``, with a complex ``log_scale`` so that amplitudes built from
them stay analytic in ``E``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import special

from . import systems as S
from .models import ReflectionResult
from .systems import SystemSpec

__all__ = [
    "MatcherError",
    "StepUnderflowError",
    "IntegrationOverflowError",
    "ProjectionDegeneracyError",
    "InsufficientSpanError",
    "PotentialFunction",
    "StatePair",
    "MatchedSolution",
    "WavefunctionProfile",
    "build_potential",
    "integrate_schrodinger",
    "seed_right",
    "project_left",
    "reconstruct_left",
    "match",
    "numeric_reflection",
    "numeric_reflection_many",
    "wavefunction_profile",
    "catastrophe_metric",
]

#: seed depth: the Airy argument at the right end of the integration
SEED_AIRY_ARGUMENT = 8.0
#: WKB seed depth: accumulated ``Re int kappa dx`` beyond the turning point
SEED_WKB_EXPONENT = 25.0
RENORMALIZE_EVERY = 50
#: longest interval a single integration (or profile) may cover
MAX_SPAN = 1e4
OVERFLOW_LIMIT = 1e250


class MatcherError(RuntimeError):
    """Base class for integration and projection failures."""


class StepUnderflowError(MatcherError):
    """The adaptive step fell below ``1e-12 (1 + |x|)``."""


class IntegrationOverflowError(MatcherError):
    """``|psi|`` exceeded the overflow limit; renormalize more often."""


class ProjectionDegeneracyError(MatcherError):
    """Both left coefficients vanished (``|A|, |B| < 1e-300``)."""


class InsufficientSpanError(ValueError):
    """A profile does not cover three oscillations on the left."""


# ---------------------------------------------------------------------------
# data types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PotentialFunction:
    """A potential with the metadata the matcher needs.

    Parameters
    ----------
    value
        Vectorised ``x -> V(x)`` for the smooth part.  Delta functions are
        listed in ``deltas`` instead.
    x_left
        Where the left solution is projected onto free waves.
    left_level
        Constant potential for ``x <= x_left``, or ``None`` when the left
        region is a linear ramp of slope ``left_slope`` through the origin.
    rise_slope
        Slope ``g`` if ``V = g x`` for ``x >= x_join``, else ``None``.
    breakpoints
        Points where ``V`` or a derivative jumps; steps never straddle them.
    deltas
        ``(x0, strength)`` pairs for terms ``strength * delta(x - x0)``.
    """

    value: Callable[[np.ndarray], np.ndarray]
    x_left: float
    left_level: Optional[float] = 0.0
    left_slope: float = 0.0
    rise_slope: Optional[float] = None
    x_join: float = 0.0
    breakpoints: tuple[float, ...] = ()
    deltas: tuple[tuple[float, float], ...] = ()

    def __call__(self, x):
        return self.value(np.asarray(x, dtype=float))

    def surfaces(self) -> tuple[float, ...]:
        """Sorted mandatory step boundaries (breakpoints and delta sites)."""
        pts = set(self.breakpoints) | {x0 for x0, _ in self.deltas}
        return tuple(sorted(pts))


@dataclass
class StatePair:
    """``psi`` and ``psi'`` at ``x``; true values are scaled by ``exp(log_scale)``.

    ``psi``, ``dpsi`` and ``log_scale`` may be scalars or arrays (one entry per
    energy in a batch).
    """

    psi: np.ndarray
    dpsi: np.ndarray
    x: float
    log_scale: np.ndarray = field(default_factory=lambda: np.zeros(1, complex))

    def true_values(self) -> tuple[np.ndarray, np.ndarray]:
        scale = np.exp(self.log_scale)
        return self.psi * scale, self.dpsi * scale


@dataclass(frozen=True)
class MatchedSolution:
    """Coefficients of the right-decaying solution in the left region.

    ``C_right`` is the coefficient of the seed (``Ai`` or WKB), fixed to 1.
    ``A`` and ``B`` carry the full scale, so ``A`` is an analytic function
    of energy whose zeros are the poles of ``r``.
    """

    A: np.ndarray
    B: np.ndarray
    C_right: float = 1.0
    x_left: float = 0.0
    x_right: float = 0.0

    @property
    def r(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.B / self.A


@dataclass(frozen=True)
class WavefunctionProfile:
    """Samples of the matched solution on an increasing grid.

    ``x_left`` and ``k_left`` describe the free left region so that the
    envelope windows of :func:`catastrophe_metric` can be laid out.
    """

    x: np.ndarray
    psi: np.ndarray
    energy: complex
    system: Optional[SystemSpec]
    x_left: float
    k_left: complex

    @property
    def abs2(self) -> np.ndarray:
        return (self.psi * self.psi.conj()).real

    @property
    def samples(self) -> list[tuple[float, complex, float]]:
        return list(zip(self.x.tolist(), self.psi.tolist(), self.abs2.tolist()))


# ---------------------------------------------------------------------------
# potentials of the named systems
# ---------------------------------------------------------------------------


def _exp_cutoff(amplitude: float, length: float) -> float:
    # where amplitude * exp(x / length) drops to 1e-13
    return length * math.log(1e-13 / amplitude)


def build_potential(spec: SystemSpec) -> PotentialFunction:
    """Return the :class:`PotentialFunction` of a named system."""
    if isinstance(spec, S.Exponential):
        V0, c = spec.V0, spec.c
        return PotentialFunction(
            value=lambda x: V0 * np.exp(2 * x / c),
            x_left=_exp_cutoff(V0, c / 2),
        )
    if isinstance(spec, S.Morse):
        V0, c = spec.V0, spec.c
        return PotentialFunction(
            value=lambda x: V0 * (np.exp(2 * x / c) - 2 * np.exp(x / c)),
            x_left=_exp_cutoff(2 * V0, c),
        )
    if isinstance(spec, S.TwoPieceExp):
        V0, c, d = spec.V0, spec.c, spec.d
        if c > 0:
            left = lambda x: V0 * np.exp(2 * np.minimum(x, 0) / c)  # noqa: E731
            x_left = _exp_cutoff(V0, c / 2)
        else:
            left = lambda x: np.zeros_like(x)  # noqa: E731
            x_left = 0.0
        return PotentialFunction(
            value=lambda x: np.where(x < 0, left(x), V0 * np.exp(2 * np.maximum(x, 0) / d)),
            x_left=x_left,
            breakpoints=(0.0,),
        )
    if isinstance(spec, S.TwoPieceLinear):
        h, g = spec.h, spec.g
        return PotentialFunction(
            value=lambda x: np.where(x < 0, h * x, g * x),
            x_left=0.0,
            left_level=None if h > 0 else 0.0,
            left_slope=h,
            rise_slope=g,
            breakpoints=(0.0,),
        )
    if isinstance(spec, S.ParabolicStep):
        om, a, V0 = spec.omega, spec.a, spec.V0
        return PotentialFunction(
            value=lambda x: np.where(x < 0, V0, om**2 * (x - a) ** 2 / 4),
            x_left=0.0,
            left_level=V0,
            breakpoints=(0.0,),
        )
    if isinstance(spec, S.StepLinear):
        Vp, g = spec.Vp, spec.g
        return PotentialFunction(
            value=lambda x: np.where(x < 0, -Vp, g * x),
            x_left=0.0,
            left_level=-Vp,
            rise_slope=g,
            breakpoints=(0.0,),
        )
    if isinstance(spec, S.DeltaLinear):
        Vp, a, g = spec.Vp, spec.a, spec.g
        return PotentialFunction(
            value=lambda x: np.where(x < 0, 0.0, g * x),
            x_left=-a,
            rise_slope=g,
            breakpoints=(0.0,),
            deltas=((-a, -Vp),),
        )
    if isinstance(spec, S.WellLinear):
        Vp, a, g = spec.Vp, spec.a, spec.g
        return PotentialFunction(
            value=lambda x: np.where(x < -a, 0.0, np.where(x < 0, -Vp, g * x)),
            x_left=-a,
            rise_slope=g,
            breakpoints=(-a, 0.0),
        )
    if isinstance(spec, S.GaussianLinear):
        Vp, a, b, g = spec.Vp, spec.a, spec.b, spec.g
        if Vp == 0:
            x_left = 0.0
        else:
            depth = math.log(abs(Vp) / (1e-12 * max(abs(Vp), 1.0)))
            x_left = -a - b * math.sqrt(max(depth, 0.0))
        return PotentialFunction(
            value=lambda x: np.where(x < 0, -Vp * np.exp(-((x + a) ** 2) / b**2), g * x),
            x_left=min(x_left, 0.0),
            rise_slope=g,
            breakpoints=(0.0,),
        )
    raise TypeError(f"no numerical potential for {type(spec).__name__}")


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4)
# ---------------------------------------------------------------------------

_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_BERR = _B5 - _B4


def _dp_step(vfun, E, x, h, psi, dpsi):
    """One Dormand-Prince step; returns the 5th-order state and error estimate."""
    # psi' = dpsi, dpsi' = (V - E) psi; the tableau is unrolled for speed
    A = _A
    p1, d1 = dpsi, (vfun(x) - E) * psi
    p = psi + h * A[1][0] * p1
    p2, d2 = dpsi + h * A[1][0] * d1, (vfun(x + _C[1] * h) - E) * p
    p = psi + h * (A[2][0] * p1 + A[2][1] * p2)
    d = dpsi + h * (A[2][0] * d1 + A[2][1] * d2)
    p3, d3 = d, (vfun(x + _C[2] * h) - E) * p
    p = psi + h * (A[3][0] * p1 + A[3][1] * p2 + A[3][2] * p3)
    d = dpsi + h * (A[3][0] * d1 + A[3][1] * d2 + A[3][2] * d3)
    p4, d4 = d, (vfun(x + _C[3] * h) - E) * p
    p = psi + h * (A[4][0] * p1 + A[4][1] * p2 + A[4][2] * p3 + A[4][3] * p4)
    d = dpsi + h * (A[4][0] * d1 + A[4][1] * d2 + A[4][2] * d3 + A[4][3] * d4)
    p5, d5 = d, (vfun(x + _C[4] * h) - E) * p
    p = psi + h * (A[5][0] * p1 + A[5][1] * p2 + A[5][2] * p3 + A[5][3] * p4 + A[5][4] * p5)
    d = dpsi + h * (A[5][0] * d1 + A[5][1] * d2 + A[5][2] * d3 + A[5][3] * d4 + A[5][4] * d5)
    p6, d6 = d, (vfun(x + h) - E) * p
    b = _B5
    new_p = psi + h * (b[0] * p1 + b[2] * p3 + b[3] * p4 + b[4] * p5 + b[5] * p6)
    new_d = dpsi + h * (b[0] * d1 + b[2] * d3 + b[3] * d4 + b[4] * d5 + b[5] * d6)
    p7, d7 = new_d, (vfun(x + h) - E) * new_p
    e = _BERR
    err_p = h * (e[0] * p1 + e[2] * p3 + e[3] * p4 + e[4] * p5 + e[5] * p6 + e[6] * p7)
    err_d = h * (e[0] * d1 + e[2] * d3 + e[3] * d4 + e[4] * d5 + e[5] * d6 + e[6] * d7)
    return new_p, new_d, err_p, err_d


_A = [[float(v) for v in row] for row in _A]
_B5 = [float(v) for v in _B5]
_BERR = [float(v) for v in _BERR]
_C = [float(v) for v in _C]


def _segment_potential(V: PotentialFunction, lo: float, hi: float):
    # keep stage points strictly inside the segment so each side of a jump
    # sees its own branch
    pad = 1e-13 * (1 + max(abs(lo), abs(hi)))
    a, b = lo + pad, hi - pad
    if a >= b:
        mid = 0.5 * (lo + hi)
        return lambda x: float(V(mid))
    return lambda x: float(V(min(max(x, a), b)))


def _error_norm(psi, dpsi, new_p, new_d, err_p, err_d) -> float:
    # worst error over the batch relative to the state magnitude
    if isinstance(psi, complex):
        scale = max(abs(psi), abs(dpsi), abs(new_p), abs(new_d)) or 1.0
        return max(abs(err_p), abs(err_d)) / scale
    scale = np.maximum(np.maximum(np.abs(psi), np.abs(dpsi)), np.maximum(np.abs(new_p), np.abs(new_d)))
    scale = np.where(scale > 0, scale, 1.0)
    return float(np.max(np.maximum(np.abs(err_p), np.abs(err_d)) / scale))


class _Integrator:
    """Right-hand side and step control shared by one sweep."""

    def __init__(self, V: PotentialFunction, E, tol: float, step: Optional[float], renormalize_every):
        self.V = V
        self.E = np.atleast_1d(np.asarray(E, dtype=complex))
        self.tol = tol
        self.step = step
        self.renormalize_every = renormalize_every
        self.h = None
        self.count = 0

    def run(self, state: StatePair, to_x: float) -> StatePair:
        psi = np.array(np.broadcast_to(state.psi, self.E.shape), dtype=complex)
        dpsi = np.array(np.broadcast_to(state.dpsi, self.E.shape), dtype=complex)
        log_scale = np.array(np.broadcast_to(state.log_scale, self.E.shape), dtype=complex)
        x = float(state.x)
        scalar = self.E.size == 1
        if scalar:
            # python complex arithmetic is far cheaper than 1-element arrays
            E_batch, self.E = self.E, complex(self.E[0])
            psi, dpsi, log_scale = complex(psi[0]), complex(dpsi[0]), complex(log_scale[0])
        try:
            out = self._run(x, to_x, psi, dpsi, log_scale)
        finally:
            if scalar:
                self.E = E_batch
        if scalar:
            out = StatePair(*(np.array([v]) for v in out[:2]), to_x, np.array([out[2]]))
        else:
            out = StatePair(out[0], out[1], to_x, out[2])
        return out

    def _run(self, x, to_x, psi, dpsi, log_scale):
        direction = 1.0 if to_x > x else -1.0
        inner = [s for s in self.V.surfaces() if min(x, to_x) < s < max(x, to_x)]
        stops = sorted(inner, reverse=direction < 0) + [to_x]
        for stop in stops:
            vfun = _segment_potential(self.V, min(x, stop), max(x, stop))
            psi, dpsi, log_scale = self._segment(vfun, x, stop, psi, dpsi, log_scale)
            x = stop
            psi, dpsi = self._cross(stop, psi, dpsi, direction)
        return psi, dpsi, log_scale

    def _cross(self, x0, psi, dpsi, direction):
        for site, strength in self.V.deltas:
            if site == x0:
                # psi'(x0+) - psi'(x0-) = strength * psi(x0)
                dpsi = dpsi + direction * strength * psi
        return psi, dpsi

    def _renormalize(self, psi, dpsi, log_scale):
        if isinstance(psi, complex):
            norm = max(abs(psi), abs(dpsi)) or 1.0
            return psi / norm, dpsi / norm, log_scale + math.log(norm)
        norm = np.maximum(np.abs(psi), np.abs(dpsi))
        norm = np.where(norm > 0, norm, 1.0)
        return psi / norm, dpsi / norm, log_scale + np.log(norm)

    def _check(self, psi, dpsi, x):
        big = np.max(np.maximum(np.abs(psi), np.abs(dpsi)))
        if not math.isfinite(big) or big > OVERFLOW_LIMIT:
            raise IntegrationOverflowError(f"|psi| exceeded {OVERFLOW_LIMIT:g} near x = {x:.6g}")

    def _accepted(self, psi, dpsi, log_scale, x):
        self.count += 1
        if self.renormalize_every and self.count % self.renormalize_every == 0:
            psi, dpsi, log_scale = self._renormalize(psi, dpsi, log_scale)
        else:
            self._check(psi, dpsi, x)
        return psi, dpsi, log_scale

    def _segment(self, vfun, x0, x1, psi, dpsi, log_scale):
        span = x1 - x0
        if span == 0:
            return psi, dpsi, log_scale
        E = self.E
        if self.step is not None:
            n = max(1, math.ceil(abs(span) / self.step))
            h = span / n
            for i in range(n):
                x = x0 + i * h
                psi, dpsi, _, _ = _dp_step(vfun, E, x, h, psi, dpsi)
                psi, dpsi, log_scale = self._accepted(psi, dpsi, log_scale, x + h)
            return psi, dpsi, log_scale

        direction = math.copysign(1.0, span)
        h = direction * min(abs(span), abs(self.h) if self.h else 0.05)
        x = x0
        while (x1 - x) * direction > 0:
            if (x + h - x1) * direction > 0:
                h = x1 - x
            new_p, new_d, err_p, err_d = _dp_step(vfun, E, x, h, psi, dpsi)
            err = _error_norm(psi, dpsi, new_p, new_d, err_p, err_d) / abs(h)
            if not math.isfinite(err):
                err = math.inf
            if err <= self.tol:
                x = x1 if abs(x1 - x - h) <= 1e-15 * (1 + abs(x1)) else x + h
                psi, dpsi, log_scale = self._accepted(new_p, new_d, log_scale, x)
                factor = 5.0 if err == 0 else min(5.0, 0.9 * (self.tol / err) ** 0.2)
                if abs(x1 - x) > 0:
                    self.h = h * factor
                    h = self.h
            else:
                factor = 0.2 if not math.isfinite(err) else max(0.2, 0.9 * (self.tol / err) ** 0.25)
                h = h * factor
                if abs(h) < 1e-12 * (1 + abs(x)):
                    raise StepUnderflowError(f"step underflow at x = {x:.6g}")
        return psi, dpsi, log_scale


def integrate_schrodinger(
    V: PotentialFunction,
    E,
    start: StatePair,
    to_x: float,
    tol: float = 1e-10,
    *,
    step: Optional[float] = None,
    renormalize_every: Optional[int] = RENORMALIZE_EVERY,
) -> StatePair:
    """Integrate ``psi'' = (V(x) - E) psi`` from ``start.x`` to ``to_x``.

    Parameters
    ----------
    V
        Potential with its mandatory step boundaries.
    E
        Energy or 1-D array of energies (one solution each).
    start
        Initial state; arrays must broadcast against ``E``.
    tol
        Local error per unit step, relative to the state magnitude; must lie
        in ``[1e-13, 1e-6]``.
    step
        Use fixed Dormand-Prince steps of at most this size instead of the
        adaptive controller.  The map ``E -> state`` is then a fixed
        polynomial composition, hence analytic in ``E``.
    renormalize_every
        Divide out the state magnitude every so many steps, accumulating it
        in ``log_scale``.  ``None`` disables this, and overflow raises.

    Returns
    -------
    StatePair
        State at ``to_x``; arrays of the batch shape.

    Both directions are accepted.  Callers seeding a recessive solution
    should integrate towards the dominant side (leftwards here).  A delta
    function located exactly at ``to_x`` is crossed, so the result is the
    state just beyond it; one at ``start.x`` counts as already crossed.
    """
    if not 1e-13 <= tol <= 1e-6:
        raise ValueError(f"tol must lie in [1e-13, 1e-6], got {tol:g}")
    if not abs(to_x - start.x) < MAX_SPAN:
        raise ValueError(f"integration span must be below {MAX_SPAN:g}")
    if step is not None and not step > 0:
        raise ValueError("step must be positive")
    if np.all(start.psi == 0) and np.all(start.dpsi == 0):
        raise ValueError("trivial initial state")
    return _Integrator(V, E, tol, step, renormalize_every).run(start, float(to_x))


# ---------------------------------------------------------------------------
# seeding, projection and matching
# ---------------------------------------------------------------------------


def _default_right_end(V: PotentialFunction, E: np.ndarray) -> float:
    top = float(np.max(E.real))
    start = max(V.surfaces() + (V.x_join, V.x_left))
    if V.rise_slope is not None:
        g = V.rise_slope
        return max(start, (SEED_AIRY_ARGUMENT * g ** (2 / 3) + top) / g)
    # march out past the turning point until the WKB exponent is large
    x, dx, acc = start, 0.02, 0.0
    while acc < SEED_WKB_EXPONENT:
        if x - start > 1e3:
            raise MatcherError("potential does not rise on the right")
        acc += max(float(V(x + dx / 2)) - top, 0.0) ** 0.5 * dx
        x += dx
    return x


def seed_right(V: PotentialFunction, E, x_right: Optional[float] = None) -> StatePair:
    """Recessive state at ``x_right`` inside the forbidden region.

    A linear rise uses ``psi = Ai(u)``, ``psi' = g^(1/3) Ai'(u)`` with
    ``u = (g x - E) / g^(2/3)``, which is exact.  Any other rise uses the
    first-order WKB log-derivative ``-kappa - kappa' / (2 kappa)``.
    """
    E = np.atleast_1d(np.asarray(E, dtype=complex))
    if x_right is None:
        x_right = _default_right_end(V, E)
    if V.rise_slope is not None:
        g = V.rise_slope
        u = (g * x_right - E) / g ** (2 / 3)
        ai, aip, _, _ = special.airye(u)
        zeta = 2 / 3 * u**1.5
        return StatePair(ai + 0j, g ** (1 / 3) * aip + 0j, x_right, -zeta)
    dx = 1e-4 * (1 + abs(x_right))
    v = float(V(x_right))
    dv = (float(V(x_right + dx)) - float(V(x_right - dx))) / (2 * dx)
    kappa = np.sqrt(v - E)
    return StatePair(np.ones_like(E), -kappa - dv / (4 * kappa**2), x_right, np.zeros_like(E))


def _left_waves(V: PotentialFunction, E: np.ndarray, x: float):
    """Incident and reflected solutions (value, derivative) at ``x``."""
    if V.left_level is None:
        h = V.left_slope
        v = (h * x - E) / h ** (2 / 3)
        w = h ** (1 / 3)
        out = []
        for sign in (-1, +1):
            # Bi + sign i Ai = 2 exp(sign i pi/6) Ai(v exp(sign 2 pi i / 3))
            rot = np.exp(sign * 2j * np.pi / 3)
            ai, aip, _, _ = special.airy(v * rot)
            pref = 2 * np.exp(sign * 1j * np.pi / 6)
            out.append((pref * ai, w * pref * rot * aip))
        return out[0], out[1]
    k = np.sqrt(E - V.left_level)
    inc = np.exp(1j * k * x)
    ref = np.exp(-1j * k * x)
    return (inc, 1j * k * inc), (ref, -1j * k * ref)


def project_left(V: PotentialFunction, E, state: StatePair) -> tuple[np.ndarray, np.ndarray]:
    """Split ``state`` into incident and reflected coefficients ``(A, B)``.

    ``A`` and ``B`` are in the scaled frame of ``state``; multiply by
    ``exp(state.log_scale)`` for the true coefficients.
    """
    E = np.atleast_1d(np.asarray(E, dtype=complex))
    (fi, fid), (fr, frd) = _left_waves(V, E, state.x)
    wr = fi * frd - fid * fr
    A = (state.psi * frd - state.dpsi * fr) / wr
    B = (fi * state.dpsi - fid * state.psi) / wr
    return A, B


def reconstruct_left(V: PotentialFunction, E, A, B, x: float) -> tuple[np.ndarray, np.ndarray]:
    """``psi, psi'`` at ``x`` of ``A * incident + B * reflected``."""
    E = np.atleast_1d(np.asarray(E, dtype=complex))
    (fi, fid), (fr, frd) = _left_waves(V, E, x)
    return A * fi + B * fr, A * fid + B * frd


def match(
    V: PotentialFunction,
    E,
    tol: float = 1e-10,
    *,
    x_right: Optional[float] = None,
    step: Optional[float] = None,
) -> MatchedSolution:
    """Seed on the right, integrate to ``V.x_left`` and project.

    Returns true-scale ``A`` and ``B`` (arrays over the energy batch).
    """
    E = np.atleast_1d(np.asarray(E, dtype=complex))
    seed = seed_right(V, E, x_right)
    state = integrate_schrodinger(V, E, seed, V.x_left, tol, step=step)
    A, B = project_left(V, E, state)
    if np.any((np.abs(A) < 1e-300) & (np.abs(B) < 1e-300)):
        raise ProjectionDegeneracyError("both left coefficients vanish")
    ls = state.log_scale
    if np.any(np.abs(ls.real) > 700):
        # r stays meaningful; only the absolute scale is unrepresentable
        raise IntegrationOverflowError("left coefficients outside double range")
    scale = np.exp(ls)
    return MatchedSolution(A * scale, B * scale, 1.0, V.x_left, seed.x)


def numeric_reflection_many(
    spec: SystemSpec,
    energies: Sequence[complex],
    tol: float = 1e-10,
    *,
    x_right: Optional[float] = None,
    step: Optional[float] = None,
) -> MatchedSolution:
    """Vectorised :func:`numeric_reflection` over a batch of energies."""
    V = build_potential(spec)
    return match(V, energies, tol, x_right=x_right, step=step)


def numeric_reflection(spec: SystemSpec, E: complex, tol: float = 1e-10, **kwargs) -> ReflectionResult:
    """Reflection amplitude of ``spec`` by direct integration.

    ``numerator`` and ``denominator`` are the true-scale coefficients ``B``
    and ``A``; ``A`` vanishes at the resonance poles.
    """
    sol = numeric_reflection_many(spec, [E], tol, **kwargs)
    A, B = complex(sol.A[0]), complex(sol.B[0])
    r = B / A if A != 0 else complex("inf")
    return ReflectionResult(r=r, numerator=B, denominator=A, system=spec, energy=complex(E))


# ---------------------------------------------------------------------------
# profiles and the catastrophe metric
# ---------------------------------------------------------------------------


def _left_wavenumber(V: PotentialFunction, E: complex, x: float) -> complex:
    if V.left_level is None:
        return complex(np.sqrt(complex(E) - V.left_slope * x))
    return complex(np.sqrt(complex(E) - V.left_level))


def wavefunction_profile(
    spec: SystemSpec,
    E: complex,
    x_min: float,
    x_max: float,
    n: int,
    tol: float = 1e-10,
) -> WavefunctionProfile:
    """Matched (right-decaying) solution sampled on ``n`` points of ``[x_min, x_max]``.

    The samples are normalised so that ``max |psi| = 1`` on the grid.
    """
    if n < 2 or not x_min < x_max:
        raise ValueError("need n >= 2 and x_min < x_max")
    if not x_max - x_min < MAX_SPAN:
        raise ValueError(f"profile span must be below {MAX_SPAN:g}")
    V = build_potential(spec)
    E_arr = np.array([complex(E)])
    seed = seed_right(V, E_arr)
    if seed.x < x_max:
        seed = seed_right(V, E_arr, x_max)
    grid = np.linspace(x_min, x_max, n)
    psi = np.empty(n, complex)
    logs = np.empty(n, complex)
    state = seed
    for i in range(n - 1, -1, -1):
        state = integrate_schrodinger(V, E_arr, state, float(grid[i]), tol)
        psi[i] = state.psi[0]
        logs[i] = state.log_scale[0]
    mags = np.log(np.abs(psi)) + logs.real
    mags = np.where(np.isfinite(mags), mags, -np.inf)
    top = np.max(mags)
    psi = psi * np.exp(logs - top)
    return WavefunctionProfile(grid, psi, complex(E), spec, V.x_left, _left_wavenumber(V, E, V.x_left))


def catastrophe_metric(profile: WavefunctionProfile) -> float:
    """Left-edge envelope maximum over the envelope maximum next to the join.

    The left region ``x <= x_left`` is cut into windows of one oscillation
    of ``|psi|`` (width ``pi / Re k``), starting at ``x_left``.  Values well
    above 1 signal spatial growth; a bounded standing wave gives about 1.
    """
    k = profile.k_left.real
    if not k > 0:
        raise InsufficientSpanError("left region is not oscillatory")
    width = math.pi / k
    x, mag = profile.x, np.abs(profile.psi)
    x_left = min(profile.x_left, float(x[-1]))
    count = int(math.floor((x_left - x[0]) / width + 1e-9))
    if count < 3:
        raise InsufficientSpanError(f"left region spans {count} oscillation windows, need 3")
    peaks = []
    for j in range(count):
        hi = x_left - j * width
        lo = hi - width
        sel = (x >= lo - 1e-12) & (x <= hi + 1e-12)
        if np.count_nonzero(sel) < 4:
            raise InsufficientSpanError("grid too coarse for the oscillation windows")
        peaks.append(float(np.max(mag[sel])))
    return peaks[-1] / peaks[0]
