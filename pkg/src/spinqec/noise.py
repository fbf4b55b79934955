"""Spin-qubit error-rate formulas and readout-time optimization.

Maps device figures of merit (gate fidelities, T1/T2, readout integration
time) onto the five-parameter circuit error model: average gate error with
a one-/two-qubit bias, idling error with a dephasing/relaxation bias, and
a merged reset-readout flip rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple


@dataclass(frozen=True)
class NoiseParams:
    """Five-parameter error model.

    ``p_t`` is the total idling error probability per measurement window,
    split as p_t1 = p_t/(1+eta_t) (X-Y relaxation channel) and
    p_t2 = p_t*eta_t/(1+eta_t) (dephasing channel).
    """

    p_g: float = 0.0
    eta_g: float = 1.0
    p_t: float = 0.0
    eta_t: float = 1.0
    p_rr: float = 0.0

    def __post_init__(self):
        for name in ("p_g", "p_t", "p_rr"):
            v = getattr(self, name)
            if not (0.0 <= v < 1.0):
                raise ValueError(f"{name}={v} outside [0, 1)")
        if not self.eta_g > 0:
            raise ValueError(f"eta_g={self.eta_g} must be positive")
        if not self.eta_t >= -1:
            raise ValueError(f"eta_t={self.eta_t} below the pure-relaxation floor")

    @property
    def p_g1(self) -> float:
        return split_gate_error(self.p_g, self.eta_g)[0]

    @property
    def p_g2(self) -> float:
        return split_gate_error(self.p_g, self.eta_g)[1]

    @property
    def p_t1(self) -> float:
        if math.isinf(self.eta_t):
            return 0.0
        return max(self.p_t / (1.0 + self.eta_t), 0.0)

    @property
    def p_t2(self) -> float:
        return max(self.p_t - self.p_t1, 0.0)

    def scaled(self, factor: float) -> "NoiseParams":
        return NoiseParams(self.p_g * factor, self.eta_g, self.p_t * factor,
                           self.eta_t, self.p_rr * factor)


@dataclass(frozen=True)
class DeviceParams:
    """Physical inputs; times in microseconds."""

    T1: float = math.inf
    T2: float = math.inf
    T_1R: float = math.inf
    tau_min: float = 1.5
    tau_res: float = 0.0
    p_res: float = 0.0
    F_G1: float = 1.0
    F_G2: float = 1.0

    def __post_init__(self):
        for name in ("T1", "T2", "T_1R"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.tau_min < 0 or self.tau_res < 0:
            raise ValueError("tau_min and tau_res must be non-negative")
        for name in ("F_G1", "F_G2"):
            f = getattr(self, name)
            if not (0.0 < f <= 1.0):
                raise ValueError(f"{name}={f} outside (0, 1]")
        if not (0.0 <= self.p_res < 0.5):
            raise ValueError("p_res must lie in [0, 0.5)")


def split_gate_error(p_g: float, eta_g: float) -> tuple[float, float]:
    """Split the average gate error into one- and two-qubit rates.

    Mean is preserved, (p_g1 + p_g2)/2 == p_g, and p_g2/p_g1 == eta_g.
    """
    if not (0.0 <= p_g < 1.0):
        raise ValueError(f"p_g={p_g} outside [0, 1)")
    if math.isinf(eta_g):
        return 0.0, 2.0 * p_g
    if not eta_g > 0:
        raise ValueError(f"eta_g={eta_g} must be positive")
    p_g1 = 2.0 * p_g / (1.0 + eta_g)
    p_g2 = 2.0 * p_g * eta_g / (1.0 + eta_g)
    return p_g1, p_g2


class IdleProbs(NamedTuple):
    p_t1: float
    p_t2: float
    clamped: bool


def _raw_idle_probs(tau_i: float, T1: float, T2: float) -> tuple[float, float]:
    p_t1 = (1.0 - math.exp(-tau_i / T1)) / 4.0
    p_t2 = (1.0 - math.exp(-((tau_i / T2) ** 2))) / 2.0 - p_t1
    return p_t1, p_t2


def idle_error_probs(tau_i: float, T1: float, T2: float) -> IdleProbs:
    """X-Y relaxation and Z dephasing probabilities for an idle window.

    The dephasing closed form can go negative when T1 decay dominates;
    that regime is clamped to zero and flagged.
    """
    if tau_i < 0:
        raise ValueError("tau_i must be non-negative")
    if T1 <= 0 or T2 <= 0:
        raise ValueError("T1 and T2 must be positive")
    p_t1, p_t2 = _raw_idle_probs(tau_i, T1, T2)
    if p_t2 < 0.0:
        return IdleProbs(p_t1, 0.0, True)
    return IdleProbs(p_t1, p_t2, False)


def noise_bias(tau_i: float, T1: float, T2: float) -> float:
    """Exact dephasing/relaxation quotient (not the linearized form)."""
    if tau_i <= 0:
        raise ValueError("noise bias undefined at zero idle time (0/0)")
    p_t1, p_t2 = _raw_idle_probs(tau_i, T1, T2)
    if p_t1 == 0.0:
        return math.inf
    return p_t2 / p_t1


def noise_bias_linearized(tau_i: float, T1: float, T2: float) -> float:
    """First-order approximation 2*tau_i*T1/T2^2 - 1; diagnostic only."""
    return 2.0 * tau_i * T1 / T2**2 - 1.0


def readout_error(tau_r: float, tau_min: float, T_1R: float) -> float:
    """Readout infidelity vs integration time: signal build-up against decay."""
    if tau_r <= 0:
        return 1.0
    missed = 0.0 if tau_min == 0 else math.exp(-tau_r / tau_min)
    return 1.0 - (1.0 - missed) * math.exp(-tau_r / T_1R)


def optimal_readout_time(tau_min: float, T_1R: float) -> float:
    """Integration time minimizing the readout error alone."""
    if tau_min < 0 or T_1R <= 0:
        raise ValueError("tau_min must be non-negative and T_1R positive")
    if tau_min == 0:
        return 0.0
    return tau_min * math.log(1.0 + T_1R / tau_min)


def reset_readout_merge(p_res: float, p_r: float) -> float:
    """Merged flip rate: reset and readout errors fault the same syndrome bit."""
    for v in (p_res, p_r):
        if not (0.0 <= v <= 1.0):
            raise ValueError("probabilities must lie in [0, 1]")
    return p_res * (1.0 - p_r) + p_r * (1.0 - p_res)


def reset_flip_from_init_fidelity(f_init: float) -> float:
    """Depolarizing initialization model: p_res = 8/15 * (1 - F_init)."""
    return 8.0 / 15.0 * (1.0 - f_init)


@dataclass(frozen=True)
class ReadoutOptimum:
    tau_qec: float
    tau_star: float
    converged: bool
    iterations: int
    p_r_at_qec: float
    p_r_at_star: float
    plane_at_qec: float
    plane_at_star: float


def _idle_plane_term(tau_r: float, device: DeviceParams) -> float:
    # Dephasing-only idle error during readout + reset, relaxation neglected.
    t = (tau_r + device.tau_res) / device.T2
    return (1.0 - math.exp(-(t * t))) / 2.0


def qec_optimal_readout_time(
    device: DeviceParams,
    p_t_th: float,
    p_rr_th: float,
    p_g_term: float = 0.0,
    tol: float = 1e-4,
    max_iter: int = 100,
) -> ReadoutOptimum:
    """Readout time minimizing the distance from the threshold plane.

    Solves the fixed point
        tau = tau_star - tau_min*log(1 + (p_rr_th-normalized readout gain)
              * (tau + tau_res)*T_1R / ((1-2*p_res)*T2^2) * p_t_th^-1 ...)
    by recursion from tau = tau_star.  ``p_g_term`` is an optional constant
    gate contribution added to the reported plane distances.
    """
    if p_t_th <= 0 or p_rr_th <= 0:
        raise ValueError("thresholds must be positive")
    tau_star = optimal_readout_time(device.tau_min, device.T_1R)
    ratio = p_rr_th / p_t_th
    coeff = device.T_1R / ((1.0 - 2.0 * device.p_res) * device.T2**2)
    tau = tau_star
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        nxt = tau_star - device.tau_min * math.log(
            1.0 + ratio * (tau + device.tau_res) * coeff
        )
        if nxt < 0:
            raise ValueError("readout too slow for QEC: fixed point is negative")
        if abs(nxt - tau) < tol:
            tau = nxt
            converged = True
            break
        tau = nxt

    def plane(tau_r: float) -> float:
        p_r = readout_error(tau_r, device.tau_min, device.T_1R)
        p_rr = reset_readout_merge(device.p_res, p_r)
        return p_g_term + _idle_plane_term(tau_r, device) / p_t_th + p_rr / p_rr_th

    return ReadoutOptimum(
        tau_qec=tau,
        tau_star=tau_star,
        converged=converged,
        iterations=iterations,
        p_r_at_qec=readout_error(tau, device.tau_min, device.T_1R),
        p_r_at_star=readout_error(tau_star, device.tau_min, device.T_1R),
        plane_at_qec=plane(tau),
        plane_at_star=plane(tau_star),
    )


def compile_device(device: DeviceParams, tau_r: float) -> NoiseParams:
    """Assemble the five-parameter model for a given integration time.

    Data qubits idle for tau_r + tau_res while the ancillas are read out
    and reset, which sets the idle window of the dephasing/relaxation
    channels.
    """
    p_g1 = 1.0 - device.F_G1
    p_g2 = 1.0 - device.F_G2
    p_g = (p_g1 + p_g2) / 2.0
    if p_g == 0.0:
        eta_g = 1.0
    elif p_g1 == 0.0:
        eta_g = math.inf
    else:
        eta_g = p_g2 / p_g1

    tau_i = tau_r + device.tau_res
    idle = idle_error_probs(tau_i, device.T1, device.T2)
    p_t = idle.p_t1 + idle.p_t2
    if idle.p_t1 > 0:
        eta_t = idle.p_t2 / idle.p_t1
    else:
        eta_t = math.inf if idle.p_t2 > 0 else 1.0

    p_r = readout_error(tau_r, device.tau_min, device.T_1R)
    p_rr = reset_readout_merge(device.p_res, p_r)
    return NoiseParams(p_g=p_g, eta_g=eta_g, p_t=p_t, eta_t=eta_t, p_rr=p_rr)
