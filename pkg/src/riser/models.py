"""Closed-form reflection amplitudes.

For a wave ``psi = A exp(ikx) + B exp(-ikx)`` incident from the left, the
reflection amplitude is ``r = B/A``.  Each function returns ``r`` together
with a numerator/denominator pair, ``r = numerator/denominator``.  The
denominator is proportional to ``A(E)``; it is analytic in ``E`` on the
principal sheet, and its zeros are the resonance poles.

The two-interface systems (delta and rectangular well next to a linear
rise) are derived by continuity matching.  Write
``Ai = Ai(u_bar)``, ``Ai' = Ai'(u_bar)``, ``w = g**(1/3)``, and let
``kappa`` be the wavenumber between the interfaces.  Carrying the right
solution ``psi = Ai(u(x))`` from ``x = 0`` back to ``x = -a`` gives

    psi(-a)  = Ai cos(kappa a) - w Ai' sin(kappa a)/kappa
    psi'(-a) = w Ai' cos(kappa a) + kappa Ai sin(kappa a)

and matching to ``A exp(ikx) + B exp(-ikx)`` at ``x = -a`` (after a jump
``psi' -> psi' + Vp psi`` for the delta well) fixes ``A`` and ``B``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from . import specfun as sf
from .systems import (
    DeltaLinear,
    Exponential,
    GaussianLinear,
    Morse,
    ParabolicStep,
    RigidWall,
    StepLinear,
    SystemSpec,
    TwoPieceExp,
    TwoPieceLinear,
    WellLinear,
    derived_quantities,
)


@dataclass(frozen=True)
class ReflectionResult:
    """Reflection amplitude with the pair it was formed from."""

    r: complex
    numerator: complex
    denominator: complex
    system: SystemSpec
    energy: complex


def _result(spec, E, num, den, r=None) -> ReflectionResult:
    if r is None:
        r = num / den if den != 0 else complex(math.inf, math.inf)
    return ReflectionResult(complex(r), complex(num), complex(den), spec, complex(E))


def _sin_over(x: complex, a: float) -> complex:
    """``sin(x a)/x``, continuous through ``x = 0``."""
    t = x * a
    if abs(t) < 1e-4:
        return a * (1 - t * t / 6 + t**4 / 120)
    return cmath.sin(t) / x


def _carry_back(Ai: complex, Aid: complex, w: float, kappa: complex, a: float) -> tuple[complex, complex]:
    # (psi, psi') at x = -a for the solution Ai(u(x)) continued through a flat region
    c = cmath.cos(kappa * a)
    psi = Ai * c - w * Aid * _sin_over(kappa, a)
    dpsi = w * Aid * c + kappa * kappa * Ai * _sin_over(kappa, a)
    return psi, dpsi


def r_exponential(spec: Exponential, E: complex) -> ReflectionResult:
    """``r = -(s/2)**(-2ikc) Gamma(1+ikc)/Gamma(1-ikc)``.

    The denominator ``1/Gamma(1+ikc)`` vanishes on ``ikc = -(n+1)``, i.e.
    at ``E = -(n+1)**2/c**2`` only.
    """
    d = derived_quantities(spec, E)
    nu = 1j * d.k * spec.c
    log_half_s = math.log(d.s / 2)
    den = sf.rgamma(1 + nu)
    num = -cmath.exp(-2 * nu * log_half_s) * sf.rgamma(1 - nu)
    if den == 0 or num == 0:
        return _result(spec, E, num, den)
    r = -cmath.exp(-2 * nu * log_half_s + sf.log_gamma(1 + nu) - sf.log_gamma(1 - nu))
    return _result(spec, E, num, den, r)


def r_morse(spec: Morse, E: complex) -> ReflectionResult:
    """``r = (2s)**(-2ikc) G(2ikc)/G(-2ikc) * G(1/2-s-ikc)/G(1/2-s+ikc)``."""
    d = derived_quantities(spec, E)
    nu = 1j * d.k * spec.c
    s = d.s
    den = sf.rgamma(2 * nu) * sf.rgamma(0.5 - s - nu)
    phase = cmath.exp(-2 * nu * math.log(2 * s))
    num = phase * sf.rgamma(-2 * nu) * sf.rgamma(0.5 - s + nu)
    if den == 0 or num == 0:
        return _result(spec, E, num, den)
    r = cmath.exp(
        -2 * nu * math.log(2 * s)
        + sf.log_gamma(2 * nu)
        - sf.log_gamma(-2 * nu)
        + sf.log_gamma(0.5 - s - nu)
        - sf.log_gamma(0.5 - s + nu)
    )
    return _result(spec, E, num, den, r)


def morse_pole_condition(spec: Morse, E: complex) -> complex:
    """``1/Gamma(1/2 - s - ikc)``, the factor of the denominator whose zeros
    are the bound states.

    The other factor ``1/Gamma(2ikc)`` vanishes on ``E = -(n / 2c)**2``,
    which holds no states; for half-integer ``s`` those points coincide with
    the bound energies and make the full denominator's zeros double.
    """
    k = cmath.sqrt(complex(E))
    return sf.rgamma(0.5 - math.sqrt(spec.V0) * spec.c - 1j * k * spec.c)


def morse_bound_spectrum(spec: Morse) -> list[float]:
    """Bound energies ``-(s - n - 1/2)**2 / c**2`` for ``n + 1/2 < s``."""
    s = math.sqrt(spec.V0) * spec.c
    out = []
    n = 0
    while n + 0.5 < s:
        out.append(-((s - n - 0.5) ** 2) / spec.c**2)
        n += 1
    return out


def r_two_piece_exp(spec: TwoPieceExp, E: complex) -> ReflectionResult:
    """Exponential pieces ``V0 exp(2x/c)`` and ``V0 exp(2x/d)`` joined at 0.

    Left solutions ``I_{+-ikc}(s exp(x/c))``, right ``K_{ikd}(sqrt(V0) d
    exp(x/d))``.  ``c = 0`` is the step limit: plane waves at level 0 are
    matched directly to the K solution.
    """
    d = derived_quantities(spec, E)
    k = d.k
    s_d = math.sqrt(spec.V0) * spec.d
    mu = 1j * k * spec.d
    K = sf.bessel_k(mu, s_d)
    if spec.c == 0:
        slope = s_d / spec.d * K.derivative
        return _result(spec, E, 1j * k * K.value - slope, 1j * k * K.value + slope)
    nu = 1j * k * spec.c
    s = d.s
    ip, im = sf.bessel_i(nu, s), sf.bessel_i(-nu, s)
    w_plus = ip.value * K.derivative - ip.derivative * K.value
    w_minus = im.value * K.derivative - im.derivative * K.value
    log_half_s = math.log(s / 2)
    # Gamma(1-nu) (s/2)**nu I_{-nu}(s) -> 1 as s -> 0, so the factors stay O(1)
    den = cmath.exp(sf.log_gamma(1 - nu) + nu * log_half_s) * w_minus
    num = -cmath.exp(sf.log_gamma(1 + nu) - nu * log_half_s) * w_plus
    return _result(spec, E, num, den)


def r_two_piece_linear(spec: TwoPieceLinear, E: complex) -> ReflectionResult:
    """Ramps ``h x`` (left) and ``g x`` (right), Airy solutions on both sides.

    On the left the incident/reflected waves are ``Bi -+ i Ai`` of
    ``v(x) = (hx - E)/h**(2/3)``.  ``h = 0`` is the flat-left limit, matched
    with plane waves.
    """
    d = derived_quantities(spec, E)
    ai_u, _ = sf.airy(d.u_bar)
    if spec.h == 0:
        a = 1j * d.k * ai_u.value
        b = d.w * ai_u.derivative
        return _result(spec, E, a - b, a + b)
    if spec.h == spec.g:
        # both brackets are the Wronskian -[Ai, Bi] = -1/pi; evaluating them
        # term by term cancels like exp(4/3 Re u**1.5) off the real axis
        return _result(spec, E, 1 / math.pi, -1 / math.pi)
    num, den = _ramp_pair(ai_u, d.v_bar, d.eta)
    return _result(spec, E, num, den)


def _ramp_pair(ai_u: sf.FunctionPair, v_bar: complex, eta: float) -> tuple[complex, complex]:
    # incident wave Bi - i Ai, reflected Bi + i Ai; A ~ W[psi, reflected]
    f_ref, f_ref_d = _travelling_airy(v_bar, +1)
    f_inc, f_inc_d = _travelling_airy(v_bar, -1)
    den = eta * ai_u.derivative * f_ref - ai_u.value * f_ref_d
    num = -(eta * ai_u.derivative * f_inc - ai_u.value * f_inc_d)
    return num, den


_ROT = cmath.exp(2j * math.pi / 3)


def _travelling_airy(z: complex, sign: int) -> tuple[complex, complex]:
    """``Bi(z) + sign*i*Ai(z)`` and its derivative.

    Uses ``Bi(z) +- i Ai(z) = 2 exp(+-i pi/6) Ai(z exp(+-2 pi i/3))`` so that
    neither wave is formed by cancellation.
    """
    rot = _ROT**sign
    pref = 2 * cmath.exp(sign * 1j * math.pi / 6)
    ai, _ = sf.airy(z * rot)
    return pref * ai.value, pref * rot * ai.derivative


def r_parabolic(spec: ParabolicStep, E: complex) -> ReflectionResult:
    """Plateau ``V0`` on the left, ``D_nu(beta (x - a))`` on the right."""
    d = derived_quantities(spec, E)
    D = sf.parabolic_d(d.nu, -d.beta * spec.a)
    slope = d.beta * D.derivative
    iq = 1j * d.q * D.value
    return _result(spec, E, -slope + iq, slope + iq)


def r_step_linear(spec: StepLinear, E: complex) -> ReflectionResult:
    """Plateau ``-Vp`` on the left, ``Ai(u(x))`` on the right."""
    d = derived_quantities(spec, E)
    ai, _ = sf.airy(d.u_bar)
    a = 1j * d.p * ai.value
    b = d.w * ai.derivative
    return _result(spec, E, a - b, a + b)


def r_delta_linear(spec: DeltaLinear, E: complex) -> ReflectionResult:
    """Delta well ``-Vp delta(x + a)`` next to the rise.

    Equal to the closed form printed with the delta-well system after
    multiplying numerator and denominator by ``k``; this form has no
    spurious zero at ``k = 0``.
    """
    d = derived_quantities(spec, E)
    k = d.k
    ai, _ = sf.airy(d.u_bar)
    psi, dpsi = _carry_back(ai.value, ai.derivative, d.w, k, spec.a)
    den = (1j * k + spec.Vp) * psi + dpsi
    num = cmath.exp(-2j * k * spec.a) * ((1j * k - spec.Vp) * psi - dpsi)
    return _result(spec, E, num, den)


def r_well_linear(spec: WellLinear, E: complex) -> ReflectionResult:
    """Rectangular well (or barrier, ``Vp < 0``) of width ``a`` next to the rise."""
    d = derived_quantities(spec, E)
    k = d.k
    ai, _ = sf.airy(d.u_bar)
    psi, dpsi = _carry_back(ai.value, ai.derivative, d.w, d.p, spec.a)
    den = 1j * k * psi + dpsi
    num = cmath.exp(-2j * k * spec.a) * (1j * k * psi - dpsi)
    return _result(spec, E, num, den)


def r_well_linear_printed(spec: WellLinear, E: complex) -> ReflectionResult:
    """The rectangular-well formula as it appears in print.

    Its second bracket reads ``w Ai' sin(pa) + p Ai cos(pa)`` where the
    matching gives ``w Ai' cos(pa) + p Ai sin(pa)``.  Kept only so tests can
    record the deviation; not used by the toolkit.
    """
    d = derived_quantities(spec, E)
    k, p, w, a = d.k, d.p, d.w, spec.a
    ai, _ = sf.airy(d.u_bar)
    sn, cs = cmath.sin(p * a), cmath.cos(p * a)
    first = -w * ai.derivative * sn + p * ai.value * cs
    second = w * ai.derivative * sn + p * ai.value * cs
    num = cmath.exp(-2j * k * a) * (1j * k * first - p * second)
    den = 1j * k * first + p * second
    return _result(spec, E, num, den)


def r_rigid_wall(spec: RigidWall, E: complex) -> ReflectionResult:
    """Hard wall at ``x = a``: ``r = -exp(2ika)``, no poles."""
    k = cmath.sqrt(complex(E))
    return _result(spec, E, -cmath.exp(2j * k * spec.a), 1.0 + 0j)


_CLOSED_FORMS = {
    Exponential: r_exponential,
    Morse: r_morse,
    TwoPieceExp: r_two_piece_exp,
    TwoPieceLinear: r_two_piece_linear,
    ParabolicStep: r_parabolic,
    StepLinear: r_step_linear,
    DeltaLinear: r_delta_linear,
    WellLinear: r_well_linear,
    RigidWall: r_rigid_wall,
}


def has_closed_form(spec: SystemSpec) -> bool:
    return type(spec) in _CLOSED_FORMS


def reflection(spec: SystemSpec, E: complex) -> ReflectionResult:
    """Reflection amplitude of any system; numeric for the Gaussian well."""
    try:
        func = _CLOSED_FORMS[type(spec)]
    except KeyError:
        if isinstance(spec, GaussianLinear):
            from .matcher import numeric_reflection

            return numeric_reflection(spec, E)
        raise TypeError(f"not a system: {spec!r}") from None
    return func(spec, E)


def denominator(spec: SystemSpec, E: complex) -> complex:
    """The function whose zeros are the poles of ``r``."""
    return reflection(spec, E).denominator
