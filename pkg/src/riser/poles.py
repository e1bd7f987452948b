"""Complex-energy zeros of the reflection denominator.

Zeros of ``A(E)`` in the lower half plane are the resonance (Gamow) poles
``E_n - i Gamma_n / 2`` of ``r(E)``.  The search counts zeros cell by cell
with the argument principle, refines each with Muller's method, verifies the
refined root with a small winding box, and finally classifies it.

Denominators are wrapped in :class:`Denominator`, which memoises values and
evaluates many points in one call.  Adjacent cells share edge points, and
the numerical matcher evaluates a whole batch of energies in one sweep.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import matcher
from . import models as M
from . import systems as S
from .parallel import map_chunks
from .systems import SystemSpec

__all__ = [
    "PoleSearchError",
    "BoundaryZeroError",
    "PhaseResolutionError",
    "DivergenceError",
    "RootEscapedError",
    "SearchRegion",
    "Cell",
    "Denominator",
    "Resonance",
    "PoleScan",
    "DEFAULT_REGION",
    "denominator_for",
    "winding_count",
    "refine_root",
    "scan",
    "classify",
    "find_resonances",
    "attach_peaks",
    "pole_records",
]

MAX_SEGMENTS = 2**16
MAX_MULLER_ITERATIONS = 100
#: fixed matcher step used for numerical denominators
NUMERIC_STEP = 0.02


class PoleSearchError(RuntimeError):
    """Base class for pole-search failures."""


class BoundaryZeroError(PoleSearchError):
    """``D`` (nearly) vanishes on a cell boundary."""


class PhaseResolutionError(PoleSearchError):
    """The boundary phase could not be resolved within the segment budget."""


class DivergenceError(PoleSearchError):
    """Muller iteration did not converge."""


class RootEscapedError(PoleSearchError):
    """A refined root left its cell or failed the a-posteriori winding check."""


# ---------------------------------------------------------------------------
# regions and cells
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Cell:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))

    @property
    def size(self) -> float:
        return max(self.re_max - self.re_min, self.im_max - self.im_min)

    def contains(self, z: complex, margin: float = 0.0) -> bool:
        return (
            self.re_min - margin <= z.real <= self.re_max + margin
            and self.im_min - margin <= z.imag <= self.im_max + margin
        )

    def split(self, fx: float = 0.5, fy: float = 0.5) -> list["Cell"]:
        xm = self.re_min + fx * (self.re_max - self.re_min)
        ym = self.im_min + fy * (self.im_max - self.im_min)
        return [
            Cell(self.re_min, xm, self.im_min, ym),
            Cell(xm, self.re_max, self.im_min, ym),
            Cell(self.re_min, xm, ym, self.im_max),
            Cell(xm, self.re_max, ym, self.im_max),
        ]

    @classmethod
    def around(cls, z: complex, half: float) -> "Cell":
        return cls(z.real - half, z.real + half, z.imag - half, z.imag + half)


@dataclass(frozen=True)
class SearchRegion:
    """Rectangle ``[re_min, re_max] x [im_min, im_max]`` cut into ``nx x ny`` cells."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float
    nx: int = 60
    ny: int = 12

    def __post_init__(self):
        if not self.re_min < self.re_max:
            raise ValueError("re_min must be below re_max")
        if not self.im_min < self.im_max <= 0:
            raise ValueError("need im_min < im_max <= 0")
        if self.nx < 4 or self.ny < 4:
            raise ValueError("grid must be at least 4 x 4")

    def cells(self) -> list[Cell]:
        xs = np.linspace(self.re_min, self.re_max, self.nx + 1)
        ys = np.linspace(self.im_min, self.im_max, self.ny + 1)
        return [
            Cell(float(xs[i]), float(xs[i + 1]), float(ys[j]), float(ys[j + 1]))
            for j in range(self.ny)
            for i in range(self.nx)
        ]

    def as_cell(self) -> Cell:
        return Cell(self.re_min, self.re_max, self.im_min, self.im_max)


DEFAULT_REGION = SearchRegion(0.1, 30.0, -6.0, -1e-6, 60, 12)


# ---------------------------------------------------------------------------
# denominators
# ---------------------------------------------------------------------------


class Denominator:
    """Memoised ``E -> D(E)``.

    Parameters
    ----------
    func
        Scalar function, or with ``batch=True`` a function mapping a 1-D
        complex array to an array of values.
    """

    def __init__(self, func: Callable, batch: bool = False):
        self.func = func
        self.batch = batch
        self.cache: dict[complex, complex] = {}

    def many(self, points: Sequence[complex]) -> np.ndarray:
        pts = [complex(z) for z in points]
        todo = list(dict.fromkeys(z for z in pts if z not in self.cache))
        if todo:
            if self.batch:
                vals = np.asarray(self.func(np.array(todo)), dtype=complex)
            else:
                vals = [complex(self.func(z)) for z in todo]
            self.cache.update(zip(todo, (complex(v) for v in vals)))
        return np.array([self.cache[z] for z in pts], dtype=complex)

    def __call__(self, z: complex) -> complex:
        return complex(self.many([z])[0])


def _closed_chunk(spec: SystemSpec, points: list[complex]) -> list[complex]:
    return [complex(M.denominator(spec, z)) for z in points]


def denominator_for(spec: SystemSpec, re_max: float = 30.0) -> Denominator:
    """Pole-search denominator of ``spec``.

    Closed-form systems use the analytic denominator.  The Gaussian uses the
    matcher's ``A(E)`` in fixed-step mode with a fixed right end (set by
    ``re_max``), so the function searched is exactly analytic.
    """
    if M.has_closed_form(spec):
        return Denominator(lambda pts: map_chunks(_closed_chunk, spec, list(pts)), batch=True)
    V = matcher.build_potential(spec)
    x_right = matcher._default_right_end(V, np.array([complex(re_max)]))

    def numeric(pts):
        return matcher.match(V, pts, x_right=x_right, step=NUMERIC_STEP).A

    return Denominator(numeric, batch=True)


def _as_denominator(D) -> Denominator:
    return D if isinstance(D, Denominator) else Denominator(D)


# ---------------------------------------------------------------------------
# argument principle
# ---------------------------------------------------------------------------


def _edge(a: complex, b: complex, n: int) -> list[complex]:
    # canonical orientation so shared edges of neighbouring cells coincide
    if (a.real, a.imag) <= (b.real, b.imag):
        pts = [a + (b - a) * t for t in np.linspace(0, 1, n + 1)]
    else:
        pts = [b + (a - b) * t for t in np.linspace(0, 1, n + 1)][::-1]
    pts[0], pts[-1] = a, b
    return pts[:-1]


def _boundary(cell: Cell, n: int) -> list[complex]:
    c = [
        complex(cell.re_min, cell.im_min),
        complex(cell.re_max, cell.im_min),
        complex(cell.re_max, cell.im_max),
        complex(cell.re_min, cell.im_max),
    ]
    pts: list[complex] = []
    for i in range(4):
        pts += _edge(c[i], c[(i + 1) % 4], n)
    return pts + [c[0]]


def _winding_counts(D: Denominator, cells: Sequence[Cell], initial: int = 8) -> list[int]:
    """Winding numbers of ``D`` around each cell, refined in lockstep.

    Every unresolved segment is bisected; it is resolved once both halves
    turn by less than ``pi / 2`` and by similar amounts (difference below
    ``pi / 4``).  The second condition rejects sampled increments that are
    small only modulo ``2 pi``.
    """
    paths = [_boundary(c, initial) for c in cells]
    open_segs = [[True] * (len(p) - 1) for p in paths]
    result: list[Optional[int]] = [None] * len(cells)
    first = D.many([z for p in paths for z in p])
    pos = 0
    for i, p in enumerate(paths):
        _check_boundary(first[pos : pos + len(p)], cells[i])
        pos += len(p)
    while True:
        pending = [i for i, r in enumerate(result) if r is None]
        if not pending:
            break
        mids = {i: [0.5 * (paths[i][j] + paths[i][j + 1]) for j, o in enumerate(open_segs[i]) if o] for i in pending}
        D.many([z for i in pending for z in mids[i]])
        for i in pending:
            path, flags = paths[i], open_segs[i]
            new_path, new_flags = [path[0]], []
            for j, o in enumerate(flags):
                if o:
                    m = 0.5 * (path[j] + path[j + 1])
                    v0, vm, v1 = D(path[j]), D(m), D(path[j + 1])
                    _check_boundary(np.array([vm]), cells[i], scale=max(abs(v0), abs(v1)))
                    d1, d2 = cmath.phase(vm / v0), cmath.phase(v1 / vm)
                    still = abs(d1) >= math.pi / 2 or abs(d2) >= math.pi / 2 or abs(d1 - d2) >= math.pi / 4
                    new_path += [m, path[j + 1]]
                    new_flags += [still, still]
                else:
                    new_path.append(path[j + 1])
                    new_flags.append(False)
            if len(new_path) > MAX_SEGMENTS:
                raise PhaseResolutionError(f"boundary of {cells[i]} needs more than {MAX_SEGMENTS} segments")
            paths[i], open_segs[i] = new_path, new_flags
            if not any(new_flags):
                v = D.many(new_path)
                total = float(np.sum(np.angle(v[1:] / v[:-1]))) / (2 * math.pi)
                if abs(total - round(total)) > 0.1:
                    raise PhaseResolutionError(f"winding {total:.3f} is not an integer")
                result[i] = round(total)
    return [int(r) for r in result]  # type: ignore[arg-type]


def _check_boundary(values: np.ndarray, cell: Cell, scale: Optional[float] = None) -> None:
    if not np.all(np.isfinite(values)):
        raise PhaseResolutionError(f"non-finite denominator on the boundary of {cell}")
    mag = np.abs(values)
    top = np.max(mag) if scale is None else scale
    if np.min(mag) < 1e-12 * top:
        raise BoundaryZeroError(f"denominator vanishes on the boundary of {cell}")


def winding_count(D, cell: Cell | SearchRegion) -> int:
    """Number of zeros of ``D`` inside ``cell`` by the argument principle.

    Phase is accumulated along the counter-clockwise boundary.  Segments
    are bisected until every phase increment is below ``pi / 2`` and the
    phase turns smoothly across each segment.

    Raises
    ------
    BoundaryZeroError
        ``|D| < 1e-12 max|D|`` somewhere on the boundary.
    PhaseResolutionError
        More than ``2**16`` segments would be needed.
    """
    if isinstance(cell, SearchRegion):
        cell = cell.as_cell()
    return _winding_counts(_as_denominator(D), [cell])[0]


# ---------------------------------------------------------------------------
# Muller refinement
# ---------------------------------------------------------------------------


def refine_root(D, seed: complex, tol: float = 1e-10, *, spread: Optional[float] = None, verify: bool = True) -> complex:
    """Muller iteration from ``seed`` until the step is below ``tol``.

    The root is accepted when, in addition, ``|D|`` has dropped by 1e6 from
    the seed, or the iteration has stagnated at rounding level.  It is then
    verified by a winding count of 1 on a box of half-width ``1e3 tol``.
    """
    D = _as_denominator(D)
    seed = complex(seed)
    h = spread if spread is not None else 1e-3 * (1 + abs(seed))
    xs = [seed - h, seed + h, seed]
    fs = [D(x) for x in xs]
    f_seed = abs(fs[2])
    root = None
    for _ in range(MAX_MULLER_ITERATIONS):
        x0, x1, x2 = xs
        f0, f1, f2 = fs
        if f2 == 0:
            root = x2
            break
        h1, h2 = x1 - x0, x2 - x1
        d1, d2 = (f1 - f0) / h1, (f2 - f1) / h2
        a = (d2 - d1) / (h2 + h1)
        b = a * h2 + d2
        disc = cmath.sqrt(b * b - 4 * a * f2)
        den = b + disc if abs(b + disc) >= abs(b - disc) else b - disc
        dx = -2 * f2 / den if den != 0 else h2
        x3 = x2 + dx
        f3 = D(x3)
        xs, fs = [x1, x2, x3], [f1, f2, f3]
        if not cmath.isfinite(f3):
            raise DivergenceError(f"non-finite denominator at {x3}")
        small_step = abs(dx) < tol
        stagnant = abs(dx) <= 4e-16 * (1 + abs(x3))
        if f3 == 0 or (small_step and abs(f3) <= 1e-6 * f_seed) or stagnant:
            root = x3
            break
    if root is None:
        raise DivergenceError(f"Muller iteration from {seed} did not converge")
    if verify:
        half = max(1e3 * tol, 1e-9 * (1 + abs(root)))
        try:
            count = winding_count(D, Cell.around(root, half))
        except PoleSearchError as exc:
            raise RootEscapedError(f"could not verify root {root}: {exc}") from exc
        if count != 1:
            raise RootEscapedError(f"root {root} fails verification (winding {count})")
    return root


# ---------------------------------------------------------------------------
# scanning
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PoleScan:
    """Raw output of :func:`scan`: roots plus the cell winding audit."""

    roots: list[complex]
    winding_total: int
    cell_counts: dict[Cell, int]


def _roots_in(D: Denominator, cell: Cell, count: int, tol: float, depth: int = 0) -> list[complex]:
    if count == 0:
        return []
    if count == 1:
        try:
            z = refine_root(D, cell.center, tol, spread=0.1 * cell.size)
            if cell.contains(z, 1e3 * tol):
                return [z]
        except (DivergenceError, RootEscapedError):
            pass
    if depth > 12:
        raise RootEscapedError(f"could not isolate {count} roots in {cell}")
    # slightly off-centre splits avoid landing the new edges on a root
    for fx, fy in ((0.5, 0.5), (0.4871, 0.5137), (0.5419, 0.4603)):
        subs = cell.split(fx, fy)
        try:
            counts = _winding_counts(D, subs)
        except BoundaryZeroError:
            continue
        if sum(counts) == count:
            break
    else:
        raise RootEscapedError(f"sub-cell counts of {cell} do not add up to {count}")
    out = []
    for sub, n in zip(subs, counts):
        out += _roots_in(D, sub, n, tol, depth + 1)
    return out


def _dedupe(roots: Iterable[complex], radius: float) -> list[complex]:
    out: list[complex] = []
    for z in sorted(roots, key=lambda z: (z.real, z.imag)):
        if not any(abs(z - w) <= radius for w in out):
            out.append(z)
    return out


def scan(D, region: SearchRegion = DEFAULT_REGION, tol: float = 1e-10) -> PoleScan:
    """Count, isolate and refine all zeros of ``D`` in ``region``."""
    D = _as_denominator(D)
    cells = region.cells()
    counts = _winding_counts(D, cells)
    roots: list[complex] = []
    for cell, n in zip(cells, counts):
        roots += _roots_in(D, cell, n, tol)
    roots = _dedupe(roots, 10 * tol)
    return PoleScan(roots, int(sum(counts)), {c: n for c, n in zip(cells, counts) if n})


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Resonance:
    """A classified pole ``E_n - i Gamma_n / 2``."""

    energy: complex
    n: Optional[int]
    classification: str
    eps_n: Optional[float] = None

    @property
    def E_n(self) -> float:
        return self.energy.real

    @property
    def half_width(self) -> float:
        return -self.energy.imag

    @property
    def gamma(self) -> float:
        return -2 * self.energy.imag


def _false_spectrum(spec: SystemSpec) -> list[float]:
    """Known zeros of the closed-form denominators that are not poles of r."""
    if isinstance(spec, S.Exponential):
        # 1/Gamma(1 + ikc) vanishes on ikc = -(n + 1)
        return [-((n + 1) ** 2) / spec.c**2 for n in range(64)]
    if isinstance(spec, S.Morse):
        # 1/Gamma(2ikc) vanishes on 2ikc = -n
        return [-((n / (2 * spec.c)) ** 2) for n in range(128)]
    return []


def classify(spec: SystemSpec, z: complex, tol: float = 1e-10) -> str:
    """``bound``, ``spurious``, ``anomaly``, ``metastable`` or ``resonance``.

    Spurious poles are an explicit per-system list of members of the
    denominator's false families.  Roots with ``-1e-12 <= Im`` that are not
    bound states are on-axis anomalies, reported rather than dropped.
    """
    level = S.left_level(spec)
    if isinstance(spec, S.Morse) and abs(z.imag) < max(tol, 1e-9):
        if any(abs(z.real - e) <= 1e-6 * (1 + abs(e)) for e in M.morse_bound_spectrum(spec)):
            return "bound"
    false = _false_spectrum(spec)
    if any(abs(z - e) <= max(1e-6, 1e3 * tol) * (1 + abs(e)) for e in false):
        return "spurious"
    if abs(z.imag) < tol and z.real < level:
        return "bound"
    if z.imag >= -1e-12:
        return "anomaly"
    if z.real < S.barrier_height(spec):
        return "metastable"
    return "resonance"


def find_resonances(
    spec: SystemSpec,
    region: SearchRegion = DEFAULT_REGION,
    tol: float = 1e-10,
    *,
    D=None,
) -> list[Resonance]:
    """All classified poles of ``r`` in ``region``, sorted by real part.

    ``n`` counts the metastable and resonance poles from 0 in order of
    energy; other classes carry ``n = None``.
    """
    if D is None:
        D = denominator_for(spec, region.re_max)
    roots = scan(D, region, tol).roots
    out, n = [], 0
    for z in sorted(roots, key=lambda z: z.real):
        kind = classify(spec, z, tol)
        if kind in ("metastable", "resonance"):
            out.append(Resonance(z, n, kind))
            n += 1
        else:
            out.append(Resonance(z, None, kind))
    return out


def attach_peaks(resonances: Sequence[Resonance], peaks: Sequence[float]) -> list[Resonance]:
    """Pair each pole with the nearest unused time-delay peak.

    A peak is accepted within ``max(0.35, 3 Gamma_n / 2)`` of ``E_n``.
    """
    used: set[int] = set()
    out = []
    for res in resonances:
        best = None
        if res.n is not None:
            window = max(0.35, 3 * res.half_width)
            cand = [(abs(p - res.E_n), i) for i, p in enumerate(peaks) if i not in used]
            cand = [c for c in cand if c[0] <= window]
            if cand:
                best = min(cand)[1]
                used.add(best)
        out.append(Resonance(res.energy, res.n, res.classification, None if best is None else float(peaks[best])))
    return out


def pole_records(spec: SystemSpec, resonances: Sequence[Resonance]) -> list[dict]:
    """JSON-ready records ``{system, params, n, re, im, gamma, eps_n, class}``."""
    return [
        {
            "system": spec.kind,
            "params": spec.params(),
            "n": r.n,
            "re": r.energy.real,
            "im": r.energy.imag,
            "gamma": r.gamma,
            "eps_n": r.eps_n,
            "class": r.classification,
        }
        for r in resonances
    ]
