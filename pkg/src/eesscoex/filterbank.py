"""Base-station band-pass spectral response and out-of-band leakage.

The transmit chain is modeled as a Chebyshev Type-I band-pass response,
obtained from the analog low-pass prototype via the geometric-mean
frequency transform.  Leakage into a victim window is the
BS-bandwidth-normalized integral of the power response over that window,
so it reads directly as the fraction of transmit power emitted there.
"""

from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "FilterSpec",
    "VictimWindow",
    "LeakageProfile",
    "power_response",
    "worst_victim_window",
    "leakage_fraction",
    "leaked_psd_dbm_per_mhz",
    "edge_psd_margin",
]

DEFAULT_SPURIOUS_LIMIT_DBM_MHZ = -13.0  # TS 38.104 Category A, carriers > 1 GHz


@dataclass(frozen=True)
class FilterSpec:
    """Chebyshev Type-I band-pass parameterization.

    `order` is the number of coupled-resonator stages; `grid_step_mhz`
    sets the trapezoidal integration grid used for leakage fractions.
    """

    order: int = 7
    ripple_db: float = 0.2
    passband_low_ghz: float = 7.150
    passband_high_ghz: float = 7.400
    grid_step_mhz: float = 0.01

    def __post_init__(self):
        if self.order < 1 or int(self.order) != self.order:
            raise ValueError(f"filter order must be a positive integer, got {self.order}")
        if self.ripple_db <= 0:
            raise ValueError(f"passband ripple must be > 0 dB, got {self.ripple_db}")
        if not 0 < self.passband_low_ghz < self.passband_high_ghz:
            raise ValueError(
                f"degenerate passband [{self.passband_low_ghz}, {self.passband_high_ghz}] GHz"
            )
        if self.grid_step_mhz <= 0:
            raise ValueError(f"grid step must be > 0 MHz, got {self.grid_step_mhz}")

    @property
    def center_ghz(self) -> float:
        """Geometric-mean center frequency of the passband."""
        return float(np.sqrt(self.passband_low_ghz * self.passband_high_ghz))

    @property
    def fractional_bandwidth(self) -> float:
        return (self.passband_high_ghz - self.passband_low_ghz) / self.center_ghz

    @property
    def bandwidth_mhz(self) -> float:
        return (self.passband_high_ghz - self.passband_low_ghz) * 1e3

    @property
    def ripple_floor(self) -> float:
        """Minimum in-band power gain, 10^(-ripple/10)."""
        return 10.0 ** (-self.ripple_db / 10.0)

    def with_guard(self, guard_mhz: float, band_top_ghz: float = 7.400,
                   allocation_edge_ghz: float = 7.125) -> "FilterSpec":
        """Same design shifted to a passband starting `guard_mhz` above the allocation edge."""
        if not 0 <= guard_mhz < (band_top_ghz - allocation_edge_ghz) * 1e3:
            raise ValueError(f"guard band {guard_mhz} MHz leaves no usable passband")
        return replace(
            self,
            passband_low_ghz=allocation_edge_ghz + guard_mhz / 1e3,
            passband_high_ghz=band_top_ghz,
        )


@dataclass(frozen=True)
class VictimWindow:
    """Reference-bandwidth sub-band of a sensor allocation."""

    f_low_ghz: float
    f_high_ghz: float

    def __post_init__(self):
        if not 0 < self.f_low_ghz < self.f_high_ghz:
            raise ValueError(f"degenerate window [{self.f_low_ghz}, {self.f_high_ghz}] GHz")

    @property
    def width_mhz(self) -> float:
        return (self.f_high_ghz - self.f_low_ghz) * 1e3


@dataclass(frozen=True)
class LeakageProfile:
    """Power-leakage fraction of one filter design into one victim window."""

    sensor_id: str
    delta: float
    window: VictimWindow
    bs_bandwidth_mhz: float

    def __post_init__(self):
        # Strictly positive for any Chebyshev response; 0 covers the
        # ideal brick-wall limit.
        if not 0 <= self.delta < 1:
            raise ValueError(f"leakage fraction must lie in [0, 1), got {self.delta}")

    @property
    def delta_db(self) -> float:
        return float(10.0 * np.log10(self.delta)) if self.delta > 0 else float("-inf")


def _chebyshev_magnitude(order: int, x: np.ndarray) -> np.ndarray:
    """|T_n(x)| via the trig/hyperbolic forms (stable for large |x|)."""
    x = np.abs(x)
    out = np.empty_like(x)
    inband = x <= 1.0
    out[inband] = np.abs(np.cos(order * np.arccos(x[inband])))
    with np.errstate(over="ignore"):
        out[~inband] = np.cosh(order * np.arccosh(x[~inband]))
    return out


def power_response(spec: FilterSpec, f_ghz):
    """Normalized power gain |H(f)|^2 of the band-pass design.

    Accepts a scalar or array of frequencies in GHz.  The response peaks
    at exactly 1 and stays within the ripple band across the passband.
    """
    f = np.asarray(f_ghz, dtype=float)
    scalar = f.ndim == 0
    f = np.atleast_1d(f)
    if np.any(f <= 0):
        raise ValueError("frequencies must be positive")
    f0 = spec.center_ghz
    omega = (f / f0 - f0 / f) / spec.fractional_bandwidth
    eps2 = 10.0 ** (spec.ripple_db / 10.0) - 1.0
    t = _chebyshev_magnitude(spec.order, omega)
    with np.errstate(over="ignore"):
        resp = 1.0 / (1.0 + eps2 * t * t)
    return float(resp[0]) if scalar else resp


def worst_victim_window(sensor_span_ghz: tuple, ref_bw_mhz: float,
                        bs_band_ghz: tuple) -> VictimWindow:
    """Reference-bandwidth sub-band of the sensor span closest to the BS band.

    With the BS band above the sensor allocation this is always the
    window abutting the span's upper edge.
    """
    span_low, span_high = sensor_span_ghz
    bs_low, bs_high = bs_band_ghz
    if span_high <= span_low:
        raise ValueError(f"degenerate sensor span [{span_low}, {span_high}] GHz")
    width_ghz = ref_bw_mhz / 1e3
    if (span_high - span_low) < width_ghz - 1e-12:
        raise ValueError(
            f"sensor span {span_low}-{span_high} GHz narrower than "
            f"{ref_bw_mhz} MHz reference bandwidth"
        )
    if bs_low < span_high - 1e-12:
        raise ValueError(
            f"BS band [{bs_low}, {bs_high}] GHz must lie above the sensor span"
        )
    return VictimWindow(f_low_ghz=span_high - width_ghz, f_high_ghz=span_high)


def leakage_fraction(spec: FilterSpec, window: VictimWindow, bs_bandwidth_mhz: float,
                     sensor_id: str = "", response=None) -> LeakageProfile:
    """Fraction of transmit power leaked into `window`.

    Trapezoidal integration of the power response over the window on the
    spec's frequency grid, normalized by the occupied BS bandwidth.
    `response` can override the integrand (used by the test oracles);
    this models adjacent-band leakage only, so the window must not
    overlap the passband.
    """
    if bs_bandwidth_mhz <= 0:
        raise ValueError(f"BS bandwidth must be positive, got {bs_bandwidth_mhz}")
    if (window.f_high_ghz > spec.passband_low_ghz + 1e-12
            and window.f_low_ghz < spec.passband_high_ghz - 1e-12):
        raise ValueError(
            f"victim window [{window.f_low_ghz}, {window.f_high_ghz}] GHz overlaps "
            f"the passband [{spec.passband_low_ghz}, {spec.passband_high_ghz}] GHz; "
            "co-channel leakage is out of scope"
        )
    if response is None:
        response = lambda f: power_response(spec, f)
    step_ghz = spec.grid_step_mhz / 1e3
    n = max(int(np.ceil((window.f_high_ghz - window.f_low_ghz) / step_ghz)), 1)
    freqs = np.linspace(window.f_low_ghz, window.f_high_ghz, n + 1)
    integral_ghz = np.trapezoid(response(freqs), freqs)
    delta = float(integral_ghz * 1e3 / bs_bandwidth_mhz)
    return LeakageProfile(sensor_id=sensor_id, delta=delta, window=window,
                          bs_bandwidth_mhz=bs_bandwidth_mhz)


def leaked_psd_dbm_per_mhz(spec: FilterSpec, p_tx_dbw: float, f_ghz: float,
                           bs_bandwidth_mhz: float = None) -> float:
    """PSD of the leaked signal at `f_ghz` under a flat in-band PSD.

    The total power is spread uniformly over the occupied bandwidth
    (passband width unless overridden), then shaped by the response.
    """
    if not np.isfinite(p_tx_dbw):
        raise ValueError(f"transmit power must be finite, got {p_tx_dbw}")
    if bs_bandwidth_mhz is None:
        bs_bandwidth_mhz = spec.bandwidth_mhz
    inband_psd = (p_tx_dbw + 30.0) - 10.0 * np.log10(bs_bandwidth_mhz)
    return float(inband_psd + 10.0 * np.log10(power_response(spec, f_ghz)))


def edge_psd_margin(spec: FilterSpec, p_tx_dbw: float, eval_f_ghz: float,
                    limit_dbm_mhz: float = DEFAULT_SPURIOUS_LIMIT_DBM_MHZ,
                    bs_bandwidth_mhz: float = None) -> float:
    """Margin of the leaked PSD against an emission limit (positive = compliant)."""
    psd = leaked_psd_dbm_per_mhz(spec, p_tx_dbw, eval_f_ghz, bs_bandwidth_mhz)
    return float(limit_dbm_mhz - psd)
