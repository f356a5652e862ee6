"""Square M-QAM machinery for the symbol-level relay protocol.

A square M-QAM symbol splits into two independent sqrt(M)-PAM dimensions, and
the network-coded symbol of a user pair is the per-dimension modulo-sqrt(M)
sum of their PAM residues.  Transmission is co-phased, so effective channels
are nonnegative real amplitudes and each dimension is a real PAM chain.

Two relay decision rules are provided.  ``JOINT_ML`` minimizes the Euclidean
metric over all sqrt(M)^2 level pairs with the true per-user amplitudes.
``ANALYSIS_MATCHED`` treats both users as transmitting at the weaker of the
two amplitudes, which makes the received constellation the uniform
superimposed set {0, +-2, ..., +-(2 sqrt(M) - 2)}; this conservative model is
the one the closed-form error analysis assumes, and both rules coincide when
the amplitudes are equal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .pairing import PairingSchedule


class RelayMode(str, Enum):
    JOINT_ML = "joint_ml"
    ANALYSIS_MATCHED = "analysis_matched"


class Role(str, Enum):
    COMMON = "common"
    OTHER = "other"


def require_square(M: int) -> int:
    """Return sqrt(M) for a square constellation, else raise."""
    sqrt_m = math.isqrt(M)
    if sqrt_m * sqrt_m != M or sqrt_m < 2:
        raise ValueError(f"M must be a perfect square >= 4, got {M}")
    return sqrt_m


def pam_average_energy(sqrt_m: int) -> float:
    """Average per-dimension symbol energy of sqrt(M)-PAM levels (M-1)/3."""
    return (sqrt_m ** 2 - 1) / 3.0


def pam_level(value, sqrt_m: int):
    """Map residue value in [0, sqrt(M)) to the amplitude 2v - (sqrt(M)-1)."""
    return 2 * np.asarray(value) - (sqrt_m - 1)


@dataclass(frozen=True)
class PamClass:
    """One PAM residue and its constellation level."""

    value: int
    sqrt_m: int

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.sqrt_m:
            raise ValueError(f"residue {self.value} out of range for sqrt(M)={self.sqrt_m}")

    @property
    def level(self) -> int:
        return 2 * self.value - (self.sqrt_m - 1)


@dataclass(frozen=True)
class QamSymbol:
    i: PamClass
    q: PamClass

    @property
    def point(self) -> complex:
        return complex(self.i.level, self.q.level)


@dataclass(frozen=True)
class NcClass:
    """Per-dimension network-coded residues of one QAM symbol."""

    i: int
    q: int


def qam_residues(w, M: int):
    """Split messages in [0, M) into (I, Q) base-sqrt(M) residues."""
    sqrt_m = require_square(M)
    w = np.asarray(w)
    if np.any((w < 0) | (w >= M)):
        raise ValueError("message out of range")
    return w // sqrt_m, w % sqrt_m


def modulate(w: int, M: int) -> QamSymbol:
    sqrt_m = require_square(M)
    vi, vq = qam_residues(w, M)
    return QamSymbol(PamClass(int(vi), sqrt_m), PamClass(int(vq), sqrt_m))


def nc_class(wa, wb, sqrt_m: int):
    """Per-dimension network-coded residue (wa + wb) mod sqrt(M)."""
    return (np.asarray(wa) + np.asarray(wb)) % sqrt_m


def _tie_to_smaller_residue(lower_idx, upper_idx, sqrt_m: int):
    low_res = lower_idx % sqrt_m
    up_res = upper_idx % sqrt_m
    return np.where(low_res <= up_res, lower_idx, upper_idx)


def decode_nc_dim(r, amp_a: float, amp_b: float, sqrt_m: int, mode: RelayMode):
    """Decode one real dimension of the superimposed pair signal to an NC residue.

    Works elementwise on arrays of received samples.  Exact decision-boundary
    ties break toward the smaller NC residue.
    """
    if amp_a <= 0 or amp_b <= 0:
        raise ValueError("amplitudes must be positive")
    r = np.asarray(r, dtype=float)
    n_sum = 2 * sqrt_m - 1  # superimposed points indexed 0 .. 2 sqrt(M)-2

    if mode is RelayMode.ANALYSIS_MATCHED or amp_a == amp_b:
        amp = min(amp_a, amp_b)
        # Points at amp*(2k - (n_sum-1)); boundaries at odd multiples of amp.
        t = (r / amp + n_sum) / 2.0
        k = np.floor(t).astype(int)
        exact = t == k  # received exactly on a boundary
        k = np.clip(k, 0, n_sum - 1)
        if np.any(exact):
            k_lo = np.clip(k - 1, 0, n_sum - 1)
            k = np.where(exact, _tie_to_smaller_residue(k_lo, k, sqrt_m), k)
        return k % sqrt_m

    levels = pam_level(np.arange(sqrt_m), sqrt_m).astype(float)
    means = amp_a * levels[:, None] + amp_b * levels[None, :]  # (va, vb) grid
    residues = (np.arange(sqrt_m)[:, None] + np.arange(sqrt_m)[None, :]) % sqrt_m
    means = means.ravel()
    residues = residues.ravel()
    metric = (r[..., None] - means) ** 2
    best = metric.min(axis=-1, keepdims=True)
    candidate = np.where(metric == best, residues, sqrt_m)
    return candidate.min(axis=-1)


def relay_decode_nc(
    r: complex,
    amp_a: float,
    amp_b: float,
    sqrt_m: int,
    mode: RelayMode = RelayMode.JOINT_ML,
    noise_sigma: float | None = None,
) -> NcClass:
    """Decode a complex received sample to the pair's network-coded residues.

    ``noise_sigma`` is part of the channel contract but does not influence the
    hard decisions (equiprobable symbols, Gaussian noise).
    """
    del noise_sigma
    i = decode_nc_dim(np.real(r), amp_a, amp_b, sqrt_m, mode)
    q = decode_nc_dim(np.imag(r), amp_a, amp_b, sqrt_m, mode)
    return NcClass(int(i), int(q))


def decode_pam_dim(y, amp: float, sqrt_m: int):
    """Nearest-level sqrt(M)-PAM decision, elementwise; ties take the smaller level."""
    if amp <= 0:
        raise ValueError("amplitude must be positive")
    t = (np.asarray(y, dtype=float) / amp + sqrt_m) / 2.0
    k = np.floor(t).astype(int)
    k = k - (t == k)  # boundary samples belong to the lower level
    return np.clip(k, 0, sqrt_m - 1)


def user_decode_pam(
    y: float,
    amp: float,
    sqrt_m: int,
    noise_sigma: float | None = None,
) -> PamClass:
    del noise_sigma
    return PamClass(int(decode_pam_dim(y, amp, sqrt_m)), sqrt_m)


def extract_messages(
    role: Role,
    decoded_nc: dict[int, np.ndarray] | list,
    own: np.ndarray,
    schedule: PairingSchedule,
    sqrt_m: int,
    user: int | None = None,
) -> dict[int, np.ndarray]:
    """Self-information cancellation for the common-user schedule (one dimension).

    ``decoded_nc[slot]`` holds residue arrays of the broadcast NC messages;
    ``own`` is the decoder's own residue array.  The common user subtracts its
    own message from every slot.  Any other user first recovers the common
    user's message from its own slot, then uses that estimate for all other
    slots; an error there corrupts every remaining extraction by design.
    """
    common = schedule.common
    if common is None:
        raise ValueError("extract_messages needs a schedule with a common user")
    if len(decoded_nc) != len(schedule.slots):
        raise ValueError("need one decoded NC message per slot")
    own = np.asarray(own)
    if role is Role.COMMON:
        user = common if user is None else user
        if user != common:
            raise ValueError("role=COMMON but user is not the schedule's common user")
        out = {}
        for s, (a, b) in enumerate(schedule.slots):
            other = b if a == common else a
            out[other] = (decoded_nc[s] - own) % sqrt_m
        return out

    if user is None or user == common:
        raise ValueError("role=OTHER needs the decoding user's index")
    own_slot = schedule.slot_of(user)
    w_common = (decoded_nc[own_slot] - own) % sqrt_m
    out = {common: w_common}
    for s, (a, b) in enumerate(schedule.slots):
        if s == own_slot:
            continue
        other = b if a == common else a
        out[other] = (decoded_nc[s] - w_common) % sqrt_m
    return out


def extract_all(
    user: int,
    own: np.ndarray,
    decoded_nc: dict[int, np.ndarray] | list,
    schedule: PairingSchedule,
    sqrt_m: int,
) -> dict[int, np.ndarray]:
    """Chained self-information cancellation over any spanning-tree schedule.

    Repeatedly resolves slots with exactly one known endpoint, so extraction
    errors propagate along the pair graph exactly as they would at a real
    receiver.  For the common-user star this reproduces ``extract_messages``.
    """
    known: dict[int, np.ndarray] = {user: np.asarray(own) % sqrt_m}
    resolved = [False] * len(schedule.slots)
    progress = True
    while progress:
        progress = False
        for s, (a, b) in enumerate(schedule.slots):
            if resolved[s]:
                continue
            if a in known and b in known:
                resolved[s] = True
                continue
            if a in known or b in known:
                src, dst = (a, b) if a in known else (b, a)
                known[dst] = (decoded_nc[s] - known[src]) % sqrt_m
                resolved[s] = True
                progress = True
    if len(known) != schedule.L:
        raise ValueError("schedule's pair graph does not reach every user")
    del known[user]
    return known
