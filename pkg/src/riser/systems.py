"""Potential systems and the wavenumbers derived from them.

Every system is a frozen dataclass.  Units are fixed by
:class:`UnitConvention` (``2m = hbar**2 = 1``), so the Schrodinger equation
reads ``psi'' = (V(x) - E) psi`` and a free wave at level ``V_L`` has
wavenumber ``sqrt(E - V_L)``.

Square roots use the principal branch (cut on the negative real axis).  For
``Im E < 0`` this gives ``Im k < 0``: the incident wave ``exp(ikx)`` and the
reflected wave ``exp(-ikx)`` then grow towards ``x -> -inf``, which is the
Gamow/Siegert sheet on which resonance poles live.

The named systems are:

===============  ==========================================================
variant          potential
===============  ==========================================================
Exponential      ``V0 exp(2x/c)``
Morse            ``V0 (exp(2x/c) - 2 exp(x/c))``
TwoPieceExp      ``V0 exp(2x/c)`` for ``x < 0``, ``V0 exp(2x/d)`` for
                 ``x >= 0``; ``c = 0`` means ``V = 0`` for ``x < 0``
TwoPieceLinear   ``h x`` for ``x < 0``, ``g x`` for ``x >= 0``
ParabolicStep    ``omega**2 a**2 / 4`` for ``x < 0``,
                 ``omega**2 (x - a)**2 / 4`` for ``x >= 0``
StepLinear       ``-Vp`` for ``x < 0``, ``g x`` for ``x >= 0``
DeltaLinear      ``-Vp delta(x + a)`` for ``x < 0``, ``g x`` for ``x >= 0``
WellLinear       ``0`` for ``x <= -a``, ``-Vp`` on ``(-a, 0)``, ``g x`` after
GaussianLinear   ``-Vp exp(-(x + a)**2 / b**2)`` for ``x < 0``, ``g x`` after
RigidWall        hard wall at ``x = a``, free for ``x < a`` (reference model)
===============  ==========================================================
"""

from __future__ import annotations

import cmath
import math
from dataclasses import asdict, dataclass, fields
from typing import Optional, Union


class InvalidSystemError(ValueError):
    """A system parameter violates its physical invariant.

    ``parameter`` names the offending field when one is to blame.
    """

    def __init__(self, message: str, parameter: Optional[str] = None):
        super().__init__(message)
        self.parameter = parameter


@dataclass(frozen=True)
class UnitConvention:
    """Fixed unit system; every formula in the package assumes it."""

    two_m: float = 1.0
    hbar_sq: float = 1.0


UNITS = UnitConvention()


def _finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise InvalidSystemError(f"{name} must be finite, got {value}", name)
    return value


def _positive(name: str, value: float) -> None:
    if not value > 0:
        raise InvalidSystemError(f"{name} must be > 0, got {value}", name)


class _System:
    """Shared behaviour: validation hook and a flat parameter mapping."""

    kind: str = ""

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, _finite(f.name, getattr(self, f.name)))
        self._check()

    def _check(self) -> None:
        pass

    def params(self) -> dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class Exponential(_System):
    V0: float
    c: float
    kind = "exponential"

    def _check(self):
        _positive("V0", self.V0)
        _positive("c", self.c)


@dataclass(frozen=True)
class Morse(_System):
    V0: float
    c: float
    kind = "morse"

    def _check(self):
        _positive("V0", self.V0)
        _positive("c", self.c)


@dataclass(frozen=True)
class TwoPieceExp(_System):
    V0: float
    c: float
    d: float
    kind = "two_piece_exp"

    def _check(self):
        _positive("V0", self.V0)
        _positive("d", self.d)
        if self.c < 0:
            raise InvalidSystemError(f"c must be >= 0, got {self.c}", "c")


@dataclass(frozen=True)
class TwoPieceLinear(_System):
    h: float
    g: float
    kind = "two_piece_linear"

    def _check(self):
        _positive("g", self.g)
        if self.h < 0:
            raise InvalidSystemError(f"h must be >= 0, got {self.h}", "h")


@dataclass(frozen=True)
class ParabolicStep(_System):
    omega: float
    a: float
    kind = "parabolic_step"

    def _check(self):
        _positive("omega", self.omega)
        if self.a < 0:
            raise InvalidSystemError(f"a must be >= 0, got {self.a}", "a")

    @property
    def V0(self) -> float:
        """Left plateau, fixed by continuity of V at ``x = 0``."""
        return self.omega**2 * self.a**2 / 4.0


@dataclass(frozen=True)
class StepLinear(_System):
    Vp: float
    g: float
    kind = "step_linear"

    def _check(self):
        _positive("g", self.g)


@dataclass(frozen=True)
class DeltaLinear(_System):
    Vp: float
    a: float
    g: float
    kind = "delta_linear"

    def _check(self):
        _positive("g", self.g)
        _positive("a", self.a)


@dataclass(frozen=True)
class WellLinear(_System):
    Vp: float
    a: float
    g: float
    kind = "well_linear"

    def _check(self):
        _positive("g", self.g)
        _positive("a", self.a)


@dataclass(frozen=True)
class GaussianLinear(_System):
    Vp: float
    a: float
    b: float
    g: float
    kind = "gaussian_linear"

    def _check(self):
        _positive("g", self.g)
        _positive("b", self.b)
        if self.a < 0:
            raise InvalidSystemError(f"a must be >= 0, got {self.a}", "a")


@dataclass(frozen=True)
class RigidWall(_System):
    a: float
    kind = "rigid_wall"

    def _check(self):
        _positive("a", self.a)


SystemSpec = Union[
    Exponential,
    Morse,
    TwoPieceExp,
    TwoPieceLinear,
    ParabolicStep,
    StepLinear,
    DeltaLinear,
    WellLinear,
    GaussianLinear,
    RigidWall,
]

VARIANTS: dict[str, type] = {
    cls.kind: cls
    for cls in (
        Exponential,
        Morse,
        TwoPieceExp,
        TwoPieceLinear,
        ParabolicStep,
        StepLinear,
        DeltaLinear,
        WellLinear,
        GaussianLinear,
        RigidWall,
    )
}

# alias -> (variant, parameters)
ALIASES: dict[str, tuple[str, dict[str, float]]] = {
    "s0.1": ("exponential", {"V0": 5.0, "c": 0.5}),
    "s0.2": ("morse", {"V0": 5.0, "c": 1.0}),
    "s1.1": ("two_piece_exp", {"V0": 5.0, "c": 0.5, "d": 5.0}),
    "s1.2": ("two_piece_exp", {"V0": 5.0, "c": 0.0, "d": 5.0}),
    "s2.1": ("two_piece_linear", {"h": 0.0, "g": 1.0}),
    "s2.2": ("two_piece_linear", {"h": 1.2, "g": 1.0}),
    "s3.1": ("parabolic_step", {"omega": 1.0, "a": 0.0}),
    "s3.2": ("parabolic_step", {"omega": 1.0, "a": 4.0}),
    "s4": ("step_linear", {"Vp": 10.0, "g": 1.0}),
    "s5": ("delta_linear", {"Vp": 2.0, "a": 1.0, "g": 1.0}),
    "s6.1": ("well_linear", {"Vp": 5.0, "a": 2.0, "g": 1.0}),
    "s6.2": ("well_linear", {"Vp": -5.0, "a": 2.0, "g": 1.0}),
    "s7.1": ("gaussian_linear", {"Vp": 5.0, "a": 1.0, "b": math.sqrt(2.0), "g": 1.0}),
    "s7.2": ("gaussian_linear", {"Vp": 10.0, "a": 2.0, "b": 0.31, "g": 1.0}),
    "s7.3": ("gaussian_linear", {"Vp": -5.0, "a": 2.0, "b": 0.31, "g": 1.0}),
}


def make_system(kind: str, **params: float) -> SystemSpec:
    """Build a system from a variant name and keyword parameters."""
    try:
        cls = VARIANTS[kind]
    except KeyError:
        raise InvalidSystemError(f"unknown system variant {kind!r}") from None
    names = {f.name for f in fields(cls)}
    unknown = set(params) - names
    if unknown:
        raise InvalidSystemError(f"{kind}: unknown parameters {sorted(unknown)}")
    missing = names - set(params)
    if missing:
        raise InvalidSystemError(f"{kind}: missing parameters {sorted(missing)}")
    return cls(**params)


def system_from_alias(alias: str) -> SystemSpec:
    """Return the named system (``"s4"``, ``"s6.1"``, ...)."""
    try:
        kind, params = ALIASES[alias.lower()]
    except KeyError:
        raise InvalidSystemError(f"unknown system alias {alias!r}") from None
    return make_system(kind, **params)


# ---------------------------------------------------------------------------
# levels and thresholds
# ---------------------------------------------------------------------------


def left_level(spec: SystemSpec) -> float:
    """Asymptotic potential for ``x -> -inf`` (``-inf`` for a falling ramp)."""
    if isinstance(spec, TwoPieceLinear) and spec.h > 0:
        return -math.inf
    if isinstance(spec, ParabolicStep):
        return spec.V0
    if isinstance(spec, StepLinear):
        return -spec.Vp
    return 0.0


def thresholds(spec: SystemSpec) -> list[float]:
    """Energies where the left wavenumber vanishes."""
    level = left_level(spec)
    return [] if math.isinf(level) else [level]


def barrier_height(spec: SystemSpec) -> float:
    """Height of a confining left barrier, or ``-inf`` if there is none.

    Only a negative well depth (a barrier of height ``-Vp`` next to the
    rise) confines; poles below it are metastable states.
    """
    if isinstance(spec, (WellLinear, GaussianLinear)) and spec.Vp < 0:
        return -spec.Vp
    return -math.inf


def has_linear_rise(spec: SystemSpec) -> bool:
    return isinstance(spec, (TwoPieceLinear, StepLinear, DeltaLinear, WellLinear, GaussianLinear))


# ---------------------------------------------------------------------------
# derived quantities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DerivedQuantities:
    """Wavenumbers and special-function arguments at energy ``E``.

    Fields that do not apply to the system are ``None``.
    """

    k: complex
    p: Optional[complex] = None
    q: Optional[complex] = None
    s: Optional[complex] = None
    beta: Optional[float] = None
    nu: Optional[complex] = None
    zeta: Optional[float] = None
    eta: Optional[float] = None
    w: Optional[float] = None
    u_bar: Optional[complex] = None
    v_bar: Optional[complex] = None


def derived_quantities(spec: SystemSpec, E: complex) -> DerivedQuantities:
    """Evaluate the wavenumbers and arguments of ``spec`` at energy ``E``."""
    E = complex(E)
    k = cmath.sqrt(E)
    out: dict = {"k": k}
    if isinstance(spec, (Exponential, Morse)):
        out["s"] = math.sqrt(spec.V0) * spec.c
    elif isinstance(spec, TwoPieceExp):
        out["s"] = math.sqrt(spec.V0) * spec.c
        out["zeta"] = spec.d / spec.c if spec.c > 0 else None
    elif isinstance(spec, ParabolicStep):
        out["q"] = cmath.sqrt(E - spec.V0)
        out["beta"] = math.sqrt(spec.omega)
        out["nu"] = E / spec.omega - 0.5
    elif isinstance(spec, TwoPieceLinear):
        out["w"] = spec.g ** (1 / 3)
        out["u_bar"] = -E / spec.g ** (2 / 3)
        if spec.h > 0:
            out["eta"] = (spec.g / spec.h) ** (1 / 3)
            out["v_bar"] = -E / spec.h ** (2 / 3)
    elif isinstance(spec, (StepLinear, DeltaLinear, WellLinear, GaussianLinear)):
        out["p"] = cmath.sqrt(E + spec.Vp)
        out["w"] = spec.g ** (1 / 3)
        out["u_bar"] = -E / spec.g ** (2 / 3)
    return DerivedQuantities(**out)


def describe(spec: SystemSpec) -> str:
    """Short label such as ``well_linear(Vp=5, a=2, g=1)``."""
    inner = ", ".join(f"{k}={v:g}" for k, v in spec.params().items())
    return f"{spec.kind}({inner})"
