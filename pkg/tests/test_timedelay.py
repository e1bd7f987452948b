import math

import numpy as np
import pytest

from riser import golden as G
from riser import poles as P
from riser import systems as S
from riser import timedelay as T

WALL = S.RigidWall(a=1)


# ---- phase ----------------------------------------------------------------


def test_rigid_wall_phase():
    grid = np.linspace(0.5, 20, 50)
    curve = T.phase_curve(WALL, grid)
    offset = curve.theta - (math.pi + 2 * np.sqrt(grid))
    k = np.round(offset / (2 * math.pi))
    assert np.all(k == k[0])
    assert np.max(np.abs(offset - 2 * math.pi * k)) < 1e-12


def test_equal_slope_ramp_has_constant_phase():
    spec = S.TwoPieceLinear(h=1, g=1)
    curve = T.delay_curve(spec, np.linspace(0.5, 10, 40))
    assert np.ptp(curve.theta) < 1e-10
    assert np.max(np.abs(curve.tau)) < 1e-8


@pytest.mark.parametrize("alias", ["s4", "s6.2", "s3.2", "s2.2", "s7.1"])
def test_phase_independent_of_grid_density(alias):
    spec = S.system_from_alias(alias)
    lo = max(S.left_level(spec), 0.0) + 0.3 if not math.isinf(S.left_level(spec)) else 0.3
    coarse = np.linspace(lo, lo + 8, 60)
    fine = np.linspace(lo, lo + 8, 119)
    a, b = T.phase_curve(spec, coarse), T.phase_curve(spec, fine)
    ta = a.theta[np.searchsorted(a.energies, coarse)]
    tb = b.theta[np.searchsorted(b.energies, fine[::2])]
    assert np.max(np.abs(ta - tb)) < 1e-6


def test_phase_curve_is_continuous():
    grid = np.linspace(0.5, 9, 40)
    curve = T.phase_curve(S.system_from_alias("s6.2"), grid)
    # the coarse grid is refined around the narrow resonances
    assert len(curve.energies) > len(grid)
    assert np.all(np.isin(grid, curve.energies))
    assert np.all(np.abs(np.diff(curve.theta)) < math.pi / 2)
    assert len(curve.theta) == len(curve.energies)


def test_phase_curve_validation():
    with pytest.raises(ValueError):
        T.phase_curve(WALL, [2.0, 1.0])
    with pytest.raises(T.ThresholdError):
        T.phase_curve(S.system_from_alias("s4"), [-11.0, 1.0])


# ---- delay ----------------------------------------------------------------


@pytest.mark.parametrize("E,expected", [(1, 1.0), (4, 0.5), (9, 1 / 3)])
def test_rigid_wall_delay(E, expected):
    assert abs(T.time_delay(WALL, E) - expected) < 1e-9


def test_delta_delay_maximum_near_lowest_pole():
    spec = S.system_from_alias("s5")
    E = np.array([1.6, 1.69, 1.78])
    tau = T.time_delay_many(spec, E)
    assert tau[1] > tau[0] and tau[1] > tau[2]


def test_threshold_exclusion():
    with pytest.raises(T.ThresholdError):
        T.time_delay(S.system_from_alias("s3.2"), 4.0 + 1e-10)
    assert math.isfinite(T.time_delay(S.system_from_alias("s3.2"), 4.0 + 1e-4))


@pytest.mark.parametrize("alias", ["s4", "s1.1", "s3.1", "s6.1", "s7.2"])
def test_derivative_consistency(alias):
    spec = S.system_from_alias(alias)
    lo = max(S.left_level(spec), 0.0)
    grid = np.linspace(lo + 1.0, lo + 1.02, 201)
    theta = T.phase_curve(spec, grid).theta
    h = grid[1] - grid[0]
    fd = (theta[2:] - theta[:-2]) / (2 * h)
    tau = T.time_delay_many(spec, grid[1:-1])
    # second-order difference error is h^2/6 theta''' ; compare on smooth data
    assert np.max(np.abs(fd - tau)) < 1e-5 * max(1.0, np.max(np.abs(tau)))


# ---- peaks ----------------------------------------------------------------


def test_step_peaks():
    peaks = T.find_peaks(S.StepLinear(Vp=10, g=1), 0.5, 9)
    assert len(peaks) >= 5
    for p in peaks:
        assert p.curvature < 0
        assert p.tau_max > T.time_delay(S.StepLinear(Vp=10, g=1), p.eps_n + 0.01)


def test_parabolic_offset_reproduced():
    peaks = T.find_peaks(S.ParabolicStep(omega=1, a=0), 0.5, 12)
    poles = [r for r in P.find_resonances(S.ParabolicStep(omega=1, a=0)) if r.n is not None]
    # the lowest peak sits well above the lowest pole's real part
    assert 0.2 < peaks[0].eps_n - poles[0].E_n < 0.35


def test_narrow_peaks_resolved():
    peaks = T.find_peaks(S.system_from_alias("s6.2"), 0.5, 9)
    assert abs(peaks[0].eps_n - 1.85) < 0.05 and abs(peaks[1].eps_n - 3.56) < 0.05


def test_no_peaks_for_equal_slopes():
    assert T.find_peaks(S.TwoPieceLinear(h=1, g=1), 0.1, 30) == []


@pytest.mark.parametrize("row", G.TABLE1, ids=lambda r: r.alias)
def test_peak_pole_correspondence(row):
    spec = S.system_from_alias(row.alias)
    poles = [r for r in P.find_resonances(spec) if r.n is not None][:5]
    top = poles[-1].E_n + 1.0
    lo = S.left_level(spec)
    peaks = T.find_peaks(spec, 0.1 if math.isinf(lo) else max(lo, 0.0) + 0.1, top)
    for peak in peaks:
        nearest = min(poles + [r for r in P.find_resonances(spec) if r.n is not None], key=lambda r: abs(r.E_n - peak.eps_n))
        assert abs(peak.eps_n - nearest.E_n) <= max(0.35, 3 * nearest.half_width)


def test_lorentzian_sanity_narrow_well():
    spec = S.system_from_alias("s6.2")
    poles = [r for r in P.find_resonances(spec) if r.n is not None][:2]
    peaks = T.find_peaks(spec, 0.5, 4.5)[:2]
    for pole, peak in zip(poles, peaks):
        # a Lorentzian delay peak reaches 4 / Gamma
        assert abs(peak.tau_max * pole.gamma / 4 - 1) < 0.01
        # half-maximum full width of the delay peak versus Gamma
        grid = np.linspace(peak.eps_n - 20 * pole.half_width, peak.eps_n + 20 * pole.half_width, 4001)
        tau = T.time_delay_many(spec, grid)
        above = grid[tau >= 0.5 * peak.tau_max]
        width = above[-1] - above[0]
        assert abs(width / pole.gamma - 1) < 0.02


@pytest.mark.parametrize("alias", ["s4", "s6.2", "s2.2"])
def test_grid_invariance(alias):
    spec = S.system_from_alias(alias)
    a = [p.eps_n for p in T.find_peaks(spec, 0.5, 9, 2000)]
    b = [p.eps_n for p in T.find_peaks(spec, 0.5, 9, 4000)]
    assert len(a) == len(b)
    assert max(abs(x - y) for x, y in zip(a, b)) < 1e-4


def test_gaussian_peaks_straddle_barrier():
    peaks = T.find_peaks(S.system_from_alias("s7.3"), 0.5, 9)
    assert any(p.eps_n < 5 for p in peaks) and any(p.eps_n > 5 for p in peaks)


def test_curve_rows():
    curve = T.delay_curve(WALL, [1.0, 4.0])
    rows = {E: tau for E, _, tau in curve.rows()}
    assert abs(rows[1.0] - 1.0) < 1e-9 and abs(rows[4.0] - 0.5) < 1e-9
