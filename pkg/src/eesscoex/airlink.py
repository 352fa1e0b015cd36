"""Monte Carlo downlink MU-MISO channel per 3GPP TR 38.901 UMi-Street Canyon.

Each realization draws user positions on an annulus, assigns LOS/NLOS
states from the UMi LOS-probability model, applies the UMi outdoor path
loss (breakpoint LOS formulation; NLOS as max of LOS and the NLOS term)
with log-normal shadowing, and models small-scale fading as spatially
i.i.d. Rayleigh across the array.

All randomness flows from the generator handed in; per-trial substreams
are derived from (master seed, trial index) so serial and parallel runs
agree draw for draw.
"""

import csv
from dataclasses import dataclass

import numpy as np

__all__ = [
    "BOLTZMANN_J_PER_K",
    "SPEED_OF_LIGHT_M_S",
    "CellConfig",
    "ChannelRealization",
    "noise_power_w",
    "sample_positions",
    "los_probability",
    "umi_los_path_loss_db",
    "umi_nlos_path_loss_db",
    "path_loss",
    "generate_channel",
    "trial_rng",
    "dump_trace",
]

BOLTZMANN_J_PER_K = 1.380649e-23
SPEED_OF_LIGHT_M_S = 3.0e8  # propagation constant used by the 38.901 breakpoint

SHADOW_SIGMA_LOS_DB = 4.0
SHADOW_SIGMA_NLOS_DB = 7.82
_EFFECTIVE_ENV_HEIGHT_M = 1.0  # UMi h_E


@dataclass(frozen=True)
class CellConfig:
    """Single-cell downlink geometry and radio parameters."""

    n_antennas: int = 256
    n_users: int = 8
    r_min_m: float = 10.0
    r_cell_m: float = 150.0
    carrier_ghz: float = 7.275
    bandwidth_hz: float = 250e6
    bs_height_m: float = 10.0
    ut_height_m: float = 1.5
    tx_gain_users_db: float = 15.0
    noise_temp_k: float = 290.0
    distance_mode: str = "uniform-distance"  # or "uniform-area"
    shadowing: bool = True
    los_mode: str = "model"  # "model" | "los" | "nlos"

    def __post_init__(self):
        if not 0 < self.r_min_m < self.r_cell_m:
            raise ValueError(f"need 0 < r_min < r_cell, got ({self.r_min_m}, {self.r_cell_m})")
        if self.n_antennas < self.n_users or self.n_users < 1:
            raise ValueError(
                f"need n_antennas >= n_users >= 1, got ({self.n_antennas}, {self.n_users})"
            )
        if self.distance_mode not in ("uniform-distance", "uniform-area"):
            raise ValueError(f"unknown distance mode {self.distance_mode!r}")
        if self.los_mode not in ("model", "los", "nlos"):
            raise ValueError(f"unknown LOS mode {self.los_mode!r}")
        if self.carrier_ghz <= 0 or self.bandwidth_hz <= 0 or self.noise_temp_k <= 0:
            raise ValueError("carrier, bandwidth and noise temperature must be positive")

    @property
    def noise_power_w(self) -> float:
        return noise_power_w(self.noise_temp_k, self.bandwidth_hz)


@dataclass(frozen=True)
class ChannelRealization:
    """One Monte Carlo draw of the K-user downlink."""

    h: np.ndarray          # (K, N) unit-variance circular complex Gaussian rows
    g: np.ndarray          # (K,) large-scale linear power gains
    los: np.ndarray        # (K,) LOS flags
    distances_m: np.ndarray
    noise_w: float


def noise_power_w(temp_k: float, bandwidth_hz: float) -> float:
    """Thermal noise power k_B * T * B in watts."""
    return BOLTZMANN_J_PER_K * temp_k * bandwidth_hz


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    """Deterministic substream for one Monte Carlo trial."""
    return np.random.default_rng(np.random.SeedSequence(entropy=master_seed,
                                                        spawn_key=(trial,)))


def sample_positions(cfg: CellConfig, rng: np.random.Generator):
    """Draw K user positions on the serving annulus.

    Returns (distances_m, angles_rad).  The default samples the 2D
    distance uniformly on [r_min, r_cell]; "uniform-area" instead spreads
    users uniformly over the annulus area.
    """
    u = rng.uniform(size=cfg.n_users)
    if cfg.distance_mode == "uniform-distance":
        d = cfg.r_min_m + (cfg.r_cell_m - cfg.r_min_m) * u
    else:
        d = np.sqrt(cfg.r_min_m**2 + (cfg.r_cell_m**2 - cfg.r_min_m**2) * u)
    angles = rng.uniform(0.0, 2.0 * np.pi, size=cfg.n_users)
    return d, angles


def los_probability(d2d_m):
    """UMi-Street Canyon outdoor LOS probability (TR 38.901 Table 7.4.2-1)."""
    d = np.asarray(d2d_m, dtype=float)
    if np.any(d < 0):
        raise ValueError("distances must be >= 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(d <= 18.0, 1.0, 18.0 / d + np.exp(-d / 36.0) * (1.0 - 18.0 / d))
    return float(p) if p.ndim == 0 else p


def _breakpoint_distance_m(cfg: CellConfig) -> float:
    h_bs = cfg.bs_height_m - _EFFECTIVE_ENV_HEIGHT_M
    h_ut = cfg.ut_height_m - _EFFECTIVE_ENV_HEIGHT_M
    return 4.0 * h_bs * h_ut * cfg.carrier_ghz * 1e9 / SPEED_OF_LIGHT_M_S


def umi_los_path_loss_db(d2d_m, cfg: CellConfig):
    """UMi-Street Canyon LOS path loss, two-slope breakpoint form (no shadowing)."""
    d2d = np.asarray(d2d_m, dtype=float)
    dz = cfg.bs_height_m - cfg.ut_height_m
    d3d = np.hypot(d2d, dz)
    fc = cfg.carrier_ghz
    dbp = _breakpoint_distance_m(cfg)
    pl1 = 32.4 + 21.0 * np.log10(d3d) + 20.0 * np.log10(fc)
    pl2 = (32.4 + 40.0 * np.log10(d3d) + 20.0 * np.log10(fc)
           - 9.5 * np.log10(dbp**2 + dz**2))
    out = np.where(d2d <= dbp, pl1, pl2)
    return float(out) if out.ndim == 0 else out


def umi_nlos_path_loss_db(d2d_m, cfg: CellConfig):
    """UMi-Street Canyon NLOS path loss: max of the LOS loss and the NLOS term."""
    d2d = np.asarray(d2d_m, dtype=float)
    dz = cfg.bs_height_m - cfg.ut_height_m
    d3d = np.hypot(d2d, dz)
    pl_prime = (35.3 * np.log10(d3d) + 22.4 + 21.3 * np.log10(cfg.carrier_ghz)
                - 0.3 * (cfg.ut_height_m - 1.5))
    out = np.maximum(umi_los_path_loss_db(d2d_m, cfg), pl_prime)
    return float(out) if out.ndim == 0 else out


def path_loss(d2d_m, los, cfg: CellConfig, rng: np.random.Generator = None):
    """Large-scale linear gain g for one or more links.

    g = 10^((tx_gain - PL - SF)/10) with log-normal shadowing SF (sigma 4 dB
    LOS / 7.82 dB NLOS) when enabled; rng may be omitted only with
    shadowing disabled.
    """
    d2d = np.atleast_1d(np.asarray(d2d_m, dtype=float))
    if np.any(d2d < cfg.r_min_m):
        raise ValueError(f"distances below the exclusion radius {cfg.r_min_m} m")
    los = np.atleast_1d(np.asarray(los, dtype=bool))
    pl = np.where(los, umi_los_path_loss_db(d2d, cfg), umi_nlos_path_loss_db(d2d, cfg))
    if cfg.shadowing:
        if rng is None:
            raise ValueError("shadowing enabled but no generator supplied")
        sigma = np.where(los, SHADOW_SIGMA_LOS_DB, SHADOW_SIGMA_NLOS_DB)
        sf = rng.standard_normal(d2d.shape) * sigma
    else:
        sf = 0.0
    g = 10.0 ** ((cfg.tx_gain_users_db - pl - sf) / 10.0)
    return float(g[0]) if np.isscalar(d2d_m) else g


def generate_channel(cfg: CellConfig, rng: np.random.Generator) -> ChannelRealization:
    """Draw one full realization: positions -> LOS -> g -> h, plus noise power.

    Draw order is fixed (positions, LOS uniforms, shadowing normals,
    fading) so a given substream always yields the same realization.
    """
    distances, _ = sample_positions(cfg, rng)
    if cfg.los_mode == "model":
        los = rng.uniform(size=cfg.n_users) < los_probability(distances)
    else:
        rng.uniform(size=cfg.n_users)  # keep stream alignment across LOS modes
        los = np.full(cfg.n_users, cfg.los_mode == "los")
    g = path_loss(distances, los, cfg, rng)
    h = (rng.standard_normal((cfg.n_users, cfg.n_antennas))
         + 1j * rng.standard_normal((cfg.n_users, cfg.n_antennas))) / np.sqrt(2.0)
    return ChannelRealization(h=h, g=np.atleast_1d(g), los=los,
                              distances_m=distances, noise_w=cfg.noise_power_w)


def dump_trace(realizations, path, seed=None):
    """Write a replayable large-scale trace (per trial/user) as CSV."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["# seed", "" if seed is None else seed])
        writer.writerow(["trial", "user", "distance_m", "los", "g_db"])
        for trial, real in enumerate(realizations):
            for k in range(len(real.g)):
                writer.writerow([
                    trial, k,
                    f"{real.distances_m[k]:.6f}",
                    int(bool(real.los[k])),
                    f"{10.0 * np.log10(real.g[k]):.6f}",
                ])
