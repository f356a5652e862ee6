"""Instantaneous SNRs, per-frame achievable-rate quantities and their
closed-form averaged upper bounds.

All rates are in bits per channel use with base-2 logarithms.  The multiple
access bound and the relay SNR are written with per-user powers; at equal
powers they reduce to the single-power forms, and the per-user form is exactly
what the fair-comparison power scaling of the common-user scheme requires
(substitute P|h|^2 -> P_user |h|^2).

Scalar rate functions return raw (possibly negative at very low SNR) values;
``frame_rates`` clamps at zero for reporting.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pairing import PairingScheme, PairingSchedule, build_schedule, select_common_user


@dataclass(frozen=True)
class LinkBudget:
    """Transmit powers and noise level in consistent normalized units."""

    P_a: float = 1.0
    P_b: float = 1.0
    P_r: float = 1.0
    N0: float = 1.0

    def __post_init__(self) -> None:
        if min(self.P_a, self.P_b, self.P_r, self.N0) <= 0:
            raise ValueError("powers and noise level must be strictly positive")


@dataclass(frozen=True, eq=False)
class RateResult:
    """Reported (clamped-at-zero) rates for one frame realization."""

    common_rate: float
    sum_rate: float
    per_slot_mac: np.ndarray  # (L-1,) bits
    per_slot_bc: np.ndarray   # (L-1,) bits


def optimal_alpha(h_a, h_b, p_a: float, p_b: float, n0: float):
    """Relay scaling coefficient minimizing the effective-noise variance."""
    s = p_a * np.abs(h_a) ** 2 + p_b * np.abs(h_b) ** 2
    return s / (s + n0)


def optimal_beta(h_j, p_r: float, n0: float):
    """User scaling coefficient minimizing the effective-noise variance."""
    g = p_r * np.abs(h_j) ** 2
    return g / (g + n0)


def snr_relay_lattice(h_a, h_b, p_a: float, p_b: float, n0: float, alpha=None):
    """Effective SNR of the superimposed pair signal at the relay."""
    ga = p_a * np.abs(h_a) ** 2
    gb = p_b * np.abs(h_b) ** 2
    if alpha is None:
        alpha = (ga + gb) / (ga + gb + n0)
    denom = alpha ** 2 * n0 + (alpha - 1) ** 2 * (ga + gb)
    return np.minimum(ga, gb) / denom


def snr_user(h_j, p_r: float, n0: float, beta=None):
    """Effective SNR of the relay broadcast at one user."""
    g = p_r * np.abs(h_j) ** 2
    if beta is None:
        beta = g / (g + n0)
    denom = beta ** 2 * n0 + (beta - 1) ** 2 * g
    return g / denom


def _mac_terms(h_a, h_b, p_a, p_b, n0):
    ga = p_a * np.abs(h_a) ** 2
    gb = p_b * np.abs(h_b) ** 2
    s = ga + gb
    return ga / s + ga / n0, gb / s + gb / n0


def rate_mac_bound(h_a, h_b, p_a: float, p_b: float, n0: float):
    """Upper bound on the pair rate of one multiple-access slot (bits)."""
    ta, tb = _mac_terms(h_a, h_b, p_a, p_b, n0)
    return 0.5 * np.log2(np.minimum(ta, tb))


def rate_bc_bound(h_all, p_r: float, n0: float):
    """Upper bound on the broadcast rate of one slot: every user must decode."""
    g_min = np.min(np.abs(np.asarray(h_all)) ** 2, axis=0)
    return 0.5 * np.log2(1.0 + p_r * g_min / n0)


def _slot_powers(schedule: PairingSchedule, budget: LinkBudget, a: int, b: int):
    if schedule.tx_power is not None:
        return float(schedule.tx_power[a]), float(schedule.tx_power[b])
    return budget.P_a, budget.P_b


def per_slot_rates(h_frame: np.ndarray, schedule: PairingSchedule, budget: LinkBudget):
    """Raw per-slot MAC and BC rate bounds for one frame realization.

    ``h_frame`` has shape (L, L-1): one coefficient per user and slot, shared
    by the uplink and the downlink of that slot (reciprocity).
    """
    n_slots = len(schedule.slots)
    mac = np.empty(n_slots)
    bc = np.empty(n_slots)
    for s, (a, b) in enumerate(schedule.slots):
        p_a, p_b = _slot_powers(schedule, budget, a, b)
        mac[s] = rate_mac_bound(h_frame[a, s], h_frame[b, s], p_a, p_b, budget.N0)
        bc[s] = rate_bc_bound(h_frame[:, s], budget.P_r, budget.N0)
    return mac, bc


def common_rate(h_frame: np.ndarray, schedule: PairingSchedule, budget: LinkBudget) -> float:
    """Raw common rate: min over slots of min(MAC, BC), over the L-1 slots."""
    mac, bc = per_slot_rates(h_frame, schedule, budget)
    return float(np.min(np.minimum(mac, bc)) / (schedule.L - 1))


def sum_rate(h_frame: np.ndarray, schedule: PairingSchedule, budget: LinkBudget) -> float:
    """Raw sum rate: MAC-phase log terms of both pair members, all slots."""
    total = 0.0
    for s, (a, b) in enumerate(schedule.slots):
        p_a, p_b = _slot_powers(schedule, budget, a, b)
        ta, tb = _mac_terms(h_frame[a, s], h_frame[b, s], p_a, p_b, budget.N0)
        total += np.log2(ta) + np.log2(tb)
    return float(total / (2 * (schedule.L - 1)))


def frame_rates(h_frame: np.ndarray, schedule: PairingSchedule, budget: LinkBudget) -> RateResult:
    mac, bc = per_slot_rates(h_frame, schedule, budget)
    rc = np.min(np.minimum(mac, bc)) / (schedule.L - 1)
    rs = sum_rate(h_frame, schedule, budget)
    return RateResult(
        common_rate=float(max(rc, 0.0)),
        sum_rate=float(max(rs, 0.0)),
        per_slot_mac=np.maximum(mac, 0.0),
        per_slot_bc=np.maximum(bc, 0.0),
    )


def batch_rates(h_batch: np.ndarray, schedule: PairingSchedule, budget: LinkBudget):
    """Vectorized raw (common, sum) rates for a batch of frame realizations.

    ``h_batch`` has shape (N, L, L-1); returns two (N,) arrays.
    """
    n, L, n_slots = h_batch.shape
    g = np.abs(h_batch) ** 2  # (N, L, S)
    if schedule.tx_power is not None:
        g_p = g * np.asarray(schedule.tx_power)[None, :, None]
    else:
        g_p = g * budget.P_a
    slot_min = np.empty((n, n_slots))
    log_sum = np.zeros(n)
    for s, (a, b) in enumerate(schedule.slots):
        ga, gb = g_p[:, a, s], g_p[:, b, s]
        tot = ga + gb
        ta = ga / tot + ga / budget.N0
        tb = gb / tot + gb / budget.N0
        mac = 0.5 * np.log2(np.minimum(ta, tb))
        bc = 0.5 * np.log2(1.0 + budget.P_r * g[:, :, s].min(axis=1) / budget.N0)
        slot_min[:, s] = np.minimum(mac, bc)
        log_sum += np.log2(ta) + np.log2(tb)
    rc = slot_min.min(axis=1) / (L - 1)
    rs = log_sum / (2 * (L - 1))
    return rc, rs


def _bound_term(sig_u: float, sig_v: float, p_u: float, p_v: float, p_base: float, n0: float) -> float:
    return 1.0 / (1.0 + (p_v * sig_v) / (p_u * sig_u)) + p_u * sig_u * p_base / n0


def avg_rate_bounds(
    scheme: PairingScheme,
    sigma2: np.ndarray,
    L: int,
    P: float,
    P_r: float,
    N0: float,
    fairness: bool = False,
    common: int | None = None,
):
    """Closed-form averaged upper bounds (E[Rc] bound, E[Rs] bound).

    Obtained by moving the expectation inside the concave log of each slot
    term and replacing instantaneous gains by their averages.  For the
    common-user scheme with ``fairness`` on, the common user's gain is divided
    by L-1 and the base power multiplied by 2L-2 (the fair-comparison power
    configuration for fixed unequal gains).  ``P_r`` does not enter: the sum
    rate counts multiple-access terms only, and dropping the broadcast minimum
    can only enlarge the common-rate bound.
    """
    del P_r  # kept for interface symmetry with the instantaneous computation
    sigma2 = np.asarray(sigma2, dtype=float)
    if sigma2.shape != (L,):
        raise ValueError("need one average gain per user")
    if scheme is PairingScheme.COMMON_USER and common is None:
        common = select_common_user(sigma2)
    weights = np.ones(L)  # per-user power multipliers relative to the base P
    p_base = P
    if scheme is PairingScheme.COMMON_USER and fairness:
        p_base = (2 * L - 2) * P
        weights[common] = 1.0 / (L - 1)
    schedule = build_schedule(scheme, L, common=common)
    rc_arg = np.inf
    rs = 0.0
    for a, b in schedule.slots:
        ta = _bound_term(sigma2[a], sigma2[b], weights[a], weights[b], p_base, N0)
        tb = _bound_term(sigma2[b], sigma2[a], weights[b], weights[a], p_base, N0)
        rc_arg = min(rc_arg, ta, tb)
        rs += np.log2(ta) + np.log2(tb)
    rc_bound = np.log2(rc_arg) / (2 * (L - 1))
    rs_bound = rs / (2 * (L - 1))
    return float(rc_bound), float(rs_bound)
