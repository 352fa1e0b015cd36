"""RFI-aware minimum-power downlink beamforming under perfect CSI.

Solves min sum_k ||w_k||^2 subject to per-user SINR targets and an
optional transmit-power budget that folds the satellite-interference cap
into min(P_BS, I_sat,max / (g_sat * delta)).  The solver runs the
uplink-downlink duality fixed point with MMSE beam directions and an
exact downlink power rescaling, so every feasible solution meets its
targets with equality; the uplink/downlink power match serves as the
optimality certificate.

All linear algebra stays in the K-dimensional user space (Gram-matrix
identities), so cost is O(N K^2 + K^3) per solve.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SinrTargets",
    "RfiBudget",
    "PowerModel",
    "PrecodeSolution",
    "sinr_target",
    "solve_power_min",
    "per_bs_rfi_w",
    "total_consumed_power_w",
]


def sinr_target(rate_bps: float, bandwidth_hz: float) -> float:
    """Linear SINR needed for a Shannon rate over the full band: 2^(R/B) - 1."""
    if rate_bps < 0 or bandwidth_hz <= 0:
        raise ValueError("need rate >= 0 and bandwidth > 0")
    return float(2.0 ** (rate_bps / bandwidth_hz) - 1.0)


@dataclass(frozen=True)
class SinrTargets:
    """Per-user linear SINR targets."""

    gammas: tuple

    def __post_init__(self):
        if len(self.gammas) == 0:
            raise ValueError("need at least one target")
        if any(g < 0 for g in self.gammas):
            raise ValueError("SINR targets must be >= 0")

    @classmethod
    def uniform(cls, gamma: float, n_users: int) -> "SinrTargets":
        return cls(gammas=(gamma,) * n_users)

    @classmethod
    def from_rates(cls, rates_bps, bandwidth_hz: float) -> "SinrTargets":
        return cls(gammas=tuple(sinr_target(r, bandwidth_hz) for r in rates_bps))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.gammas, dtype=float)


@dataclass(frozen=True)
class RfiBudget:
    """Per-BS power budget combining the hardware cap and the RFI cap."""

    p_bs_w: float
    i_sat_max_w: float = None   # per reference bandwidth, at the sensor
    g_sat_linear: float = None  # BS->sensor net coupling, linear
    delta: float = None         # leakage fraction into the victim window

    def __post_init__(self):
        if self.p_bs_w <= 0:
            raise ValueError(f"BS power cap must be positive, got {self.p_bs_w}")

    @property
    def p_sat_max_w(self) -> float:
        """Transmit power at which the satellite RFI cap binds."""
        if self.i_sat_max_w is None or self.g_sat_linear is None or self.delta is None:
            return float("inf")
        coupling = self.g_sat_linear * self.delta
        if coupling <= 0:
            return float("inf")
        return self.i_sat_max_w / coupling

    @property
    def p_sum_max_w(self) -> float:
        return min(self.p_bs_w, self.p_sat_max_w)

    @property
    def rfi_limited(self) -> bool:
        return self.p_sat_max_w < self.p_bs_w


@dataclass(frozen=True)
class PowerModel:
    """Consumed-power overhead coefficients: alpha(B) = a0 + a1*B, beta(l) = b0 + b1*l."""

    alpha0: float = 0.0
    alpha1_per_hz: float = 0.0
    beta0: float = 0.0
    beta1_per_stage: float = 0.0

    def __post_init__(self):
        if min(self.alpha0, self.alpha1_per_hz, self.beta0, self.beta1_per_stage) < 0:
            raise ValueError("power-model coefficients must be >= 0")


@dataclass(frozen=True)
class PrecodeSolution:
    """Beamformers (rows w_k), total power, feasibility and diagnostics."""

    w: np.ndarray
    p_tx_w: float
    feasible: bool
    sinr: np.ndarray
    converged: bool
    iterations: int
    duality_gap: float

    def to_dict(self, include_beams: bool = False) -> dict:
        out = {
            "p_tx_w": self.p_tx_w,
            "feasible": self.feasible,
            "sinr": [float(s) for s in self.sinr],
            "converged": self.converged,
            "iterations": self.iterations,
            "duality_gap": self.duality_gap,
        }
        if include_beams:
            out["w_real"] = self.w.real.tolist()
            out["w_imag"] = self.w.imag.tolist()
        return out


def solve_power_min(h: np.ndarray, g: np.ndarray, targets: SinrTargets,
                    noise_w: float, budget: RfiBudget = None,
                    tol: float = 1e-12, max_iterations: int = 1000) -> PrecodeSolution:
    """Minimum-power beamformers hitting every SINR target with equality.

    Args:
        h: (K, N) small-scale channel rows h_k.
        g: (K,) large-scale linear gains.
        targets: per-user linear SINR targets.
        noise_w: receiver noise power sigma^2.
        budget: optional power budget; when the unconstrained optimum
            exceeds it the solution is returned with feasible=False.

    The dual uplink powers are iterated via
    q_k <- (gamma_k / (1 + gamma_k)) / [G (sigma^2 I + diag(q) G)^{-1}]_kk
    with G the effective-channel Gram matrix; MMSE directions and the
    exact downlink power load follow from the converged q.
    """
    h = np.asarray(h)
    g = np.asarray(g, dtype=float)
    k_users, n_antennas = h.shape
    if k_users > n_antennas:
        raise ValueError(f"need K <= N, got K={k_users}, N={n_antennas}")
    if len(g) != k_users or len(targets.gammas) != k_users:
        raise ValueError("gains/targets must match the number of users")
    if noise_w <= 0:
        raise ValueError("noise power must be positive")
    gamma = targets.as_array()

    active = gamma > 0
    if not np.any(active):
        w = np.zeros_like(h)
        return PrecodeSolution(w=w, p_tx_w=0.0, feasible=True,
                               sinr=np.zeros(k_users), converged=True,
                               iterations=0, duality_gap=0.0)

    h_eff = h[active] * np.sqrt(g[active])[:, None]
    gam = gamma[active]
    ka = h_eff.shape[0]
    gram = h_eff.conj() @ h_eff.T  # (ka, ka), G[k, j] = h_k^H h_j
    eye = np.eye(ka)

    # Uplink power fixed point (monotone from zero).
    q = np.zeros(ka)
    scale = gam / (1.0 + gam)
    converged = False
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        m = noise_w * eye + q[:, None] * gram
        x = np.real(np.diagonal(gram @ np.linalg.inv(m)))
        q_new = scale / x
        if np.max(np.abs(q_new - q)) <= tol * max(np.max(q_new), 1e-300):
            q = q_new
            converged = True
            break
        q = q_new

    # MMSE beam directions from the converged uplink powers.
    coeffs = np.linalg.inv(noise_w * eye + q[:, None] * gram)  # columns b_k
    beam_norms = np.sqrt(np.real(np.einsum("ik,ij,jk->k", coeffs.conj(), gram, coeffs)))
    coeffs = coeffs / beam_norms
    cross = gram @ coeffs                   # cross[k, j] = h_k^H u_j
    c2 = np.abs(cross) ** 2

    # Downlink powers solving the K x K tight-SINR system.
    m_dl = -c2.astype(float)
    np.fill_diagonal(m_dl, np.diagonal(c2) / gam)
    p = np.linalg.solve(m_dl, np.full(ka, noise_w))
    p_tx = float(np.sum(p))
    duality_gap = abs(p_tx - float(np.sum(q))) / max(p_tx, 1e-300)

    w_active = (h_eff.T @ coeffs * np.sqrt(p)).T
    w = np.zeros_like(h)
    w[active] = w_active

    # Achieved SINRs recomputed from the beams (verification form).
    s = np.abs((h * np.sqrt(g)[:, None]).conj() @ w.T) ** 2
    signal = np.diagonal(s).copy()
    interference = np.sum(s, axis=1) - signal
    sinr = signal / (noise_w + interference)

    feasible = converged
    if budget is not None:
        feasible = feasible and p_tx <= budget.p_sum_max_w * (1.0 + 1e-9)
    return PrecodeSolution(w=w, p_tx_w=p_tx, feasible=feasible, sinr=sinr,
                           converged=converged, iterations=iterations,
                           duality_gap=duality_gap)


def per_bs_rfi_w(p_tx_w: float, delta: float, g_sat_linear: float) -> float:
    """Received RFI at the sensor from one BS: g_sat * delta * P_tx."""
    if min(p_tx_w, delta, g_sat_linear) < 0:
        raise ValueError("arguments must be >= 0")
    return g_sat_linear * delta * p_tx_w


def total_consumed_power_w(p_tx_w: float, pm: PowerModel, bandwidth_hz: float,
                           order: int, delta: float) -> float:
    """Total consumed power P_tx (1 + alpha(B) + beta(l) + delta)."""
    if p_tx_w < 0 or bandwidth_hz < 0 or order < 0 or delta < 0:
        raise ValueError("arguments must be >= 0")
    alpha = pm.alpha0 + pm.alpha1_per_hz * bandwidth_hz
    beta = pm.beta0 + pm.beta1_per_stage * order
    return p_tx_w * (1.0 + alpha + beta + delta)
