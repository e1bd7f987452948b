"""Reference values of the first five resonances of the closed-form systems.

Each row gives the system alias, its parameters, five poles as
``(E_n, Gamma_n / 2)`` pairs and the five time-delay peak positions
``eps_n``, all as they were originally tabulated (two decimals, or one
significant figure for the narrow widths).  They are embedded data, never
recomputed, so regressions are caught against the reference rather than
against the package itself.
"""

from __future__ import annotations

from dataclasses import dataclass

from .systems import ALIASES


@dataclass(frozen=True)
class GoldenRow:
    alias: str
    params: dict[str, float]
    poles: tuple[tuple[float, float], ...]
    peaks: tuple[float, ...]

    def energies(self) -> list[complex]:
        return [complex(E, -hw) for E, hw in self.poles]


def _row(alias, poles, peaks) -> GoldenRow:
    return GoldenRow(alias, dict(ALIASES[alias][1]), tuple(poles), tuple(peaks))


TABLE1: tuple[GoldenRow, ...] = (
    _row(
        "s1.1",
        [(8.88, 1.50), (13.14, 1.87), (17.30, 2.17), (21.51, 2.45), (25.80, 2.70)],
        [8.89, 13.21, 17.34, 21.65, 26.05],
    ),
    _row(
        "s1.2",
        [(9.42, 1.23), (13.77, 1.49), (18.01, 1.69), (22.28, 1.89), (26.62, 2.07)],
        [9.36, 13.46, 18.04, 22.14, 26.43],
    ),
    _row(
        "s2.1",
        [(2.79, 1.09), (4.45, 1.03), (5.85, 0.98), (7.08, 0.94), (8.22, 0.91)],
        [2.89, 4.62, 5.85, 7.12, 8.26],
    ),
    _row(
        "s2.2",
        [(1.88, 1.69), (3.73, 1.47), (5.21, 1.35), (6.50, 1.27), (7.68, 1.22)],
        [1.92, 3.98, 5.24, 6.53, 7.76],
    ),
    _row(
        "s3.1",
        [(2.08, 1.75), (4.21, 2.09), (6.28, 2.32), (8.32, 2.48), (10.34, 2.61)],
        [2.38, 4.43, 6.51, 8.54, 10.33],
    ),
    _row(
        "s3.2",
        [(4.32, 0.22), (5.56, 0.48), (6.86, 0.65), (8.20, 0.78), (9.58, 0.89)],
        [4.31, 5.56, 6.86, 8.21, 9.63],
    ),
    _row(
        "s4",
        [(2.34, 0.31), (4.09, 0.30), (5.52, 0.29), (6.79, 0.29), (7.95, 0.28)],
        [2.31, 3.96, 5.53, 6.79, 7.90],
    ),
    _row(
        "s5",
        [(1.69, 0.17), (3.39, 0.18), (4.79, 0.18), (6.04, 0.18), (7.19, 0.18)],
        [1.69, 3.42, 4.82, 6.06, 7.20],
    ),
    _row(
        "s6.1",
        [(2.13, 0.24), (3.69, 0.43), (4.81, 0.57), (5.85, 0.43), (6.98, 0.32)],
        [2.15, 3.73, 4.78, 5.84, 7.06],
    ),
    _row(
        "s6.2",
        [(1.86, 0.5e-3), (3.56, 0.3e-3), (4.93, 0.01), (6.08, 0.07), (7.04, 0.25)],
        [1.85, 3.56, 4.95, 6.10, 7.03],
    ),
)

#: lowest pole of S6.1 quoted to four decimals with its eigenfunction plot
S61_POLE = complex(2.1263, -0.2428)


def golden_row(alias: str) -> GoldenRow:
    for row in TABLE1:
        if row.alias == alias:
            return row
    raise KeyError(alias)
