"""User-pair schedules and the transmission-fairness power policies.

Three schemes are supported (0-based user indices, L-1 slots per frame):

* ``common_user`` -- one user with the best average gain joins every slot and
  the remaining users take turns pairing with it (a star over the users);
* ``consecutive`` -- slot s pairs users (s, s+1) (a chain);
* ``mirror``      -- slot s pairs opposite ends of the index range.

Every schedule's pair graph is a spanning tree of the users, which is what
makes self-information message extraction feasible for all of them.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .channel import ScenarioFamily


class PairingScheme(str, Enum):
    COMMON_USER = "common_user"
    CONSECUTIVE = "consecutive"
    MIRROR = "mirror"


class CommonUserPolicy(str, Enum):
    """How the common user evolves over frames."""

    NONE = "none"                # schemes without a common user
    FIXED = "fixed"              # chosen once from the average gains
    ROTATE_RANDOM = "rotate_random"      # uniform re-draw each frame
    ROTATE_ROUND_ROBIN = "rotate_round_robin"
    RESELECT_EACH_FRAME = "reselect_each_frame"  # argmax of that frame's gains


@dataclass(frozen=True, eq=False)
class PairingSchedule:
    L: int
    slots: tuple[tuple[int, int], ...]
    common: int | None = None
    tx_power: np.ndarray | None = None  # (L,) per-user transmit power

    def __post_init__(self) -> None:
        if len(self.slots) != self.L - 1:
            raise ValueError("a schedule needs exactly L-1 slots")
        members = set()
        for a, b in self.slots:
            if a == b:
                raise ValueError(f"slot pairs a user with itself: {(a, b)}")
            members.update((a, b))
        if members != set(range(self.L)):
            raise ValueError("slot members must cover every user exactly")

    def slot_of(self, user: int) -> int:
        """First slot in which ``user`` transmits."""
        for s, (a, b) in enumerate(self.slots):
            if user in (a, b):
                return s
        raise ValueError(f"user {user} not in schedule")

    def power_of(self, user: int, default: float = 1.0) -> float:
        if self.tx_power is None:
            return default
        return float(self.tx_power[user])


@dataclass(frozen=True, eq=False)
class FairnessPowers:
    """Per-user transmit powers plus the common-user evolution policy.

    ``relay_scale`` multiplies the relay power; it is 2L-2 only for the
    fair-comparison configuration of the common-user scheme under fixed
    unequal gains, where the whole system power is scaled so the average
    energy spent per user matches the chain/mirror schedules.
    """

    tx_power: np.ndarray
    relay_scale: float
    common_policy: CommonUserPolicy


def select_common_user(avg_gains: np.ndarray) -> int:
    """Index of the user with the best average channel gain (ties: lowest index)."""
    gains = np.asarray(avg_gains, dtype=float)
    if gains.size == 0:
        raise ValueError("no gains supplied")
    if np.any(gains <= 0):
        raise ValueError("average gains must be positive")
    return int(np.argmax(gains))


def build_schedule(
    scheme: PairingScheme,
    L: int,
    common: int | None = None,
    tx_power: np.ndarray | None = None,
) -> PairingSchedule:
    if L < 3:
        raise ValueError("need at least 3 users")
    if scheme is PairingScheme.COMMON_USER:
        if common is None:
            raise ValueError("the common-user scheme needs a common user index")
        if not 0 <= common < L:
            raise ValueError(f"common user {common} out of range for L={L}")
        slots = tuple((common, other) for other in range(L) if other != common)
    elif scheme is PairingScheme.CONSECUTIVE:
        slots = tuple((s, s + 1) for s in range(L - 1))
        common = None
    elif scheme is PairingScheme.MIRROR:
        half = L // 2
        slots = tuple(
            (s, L - 2 - s) if s < half else (s + 1, L - 2 - s + 1)
            for s in range(L - 1)
        )
        common = None
    else:  # pragma: no cover - closed enumeration
        raise ValueError(f"unknown scheme {scheme}")
    return PairingSchedule(L=L, slots=slots, common=common, tx_power=tx_power)


def fairness_powers(
    scheme: PairingScheme,
    scenario: ScenarioFamily,
    L: int,
    P: float,
    common: int | None = None,
    fair_comparison: bool = True,
    rotation: CommonUserPolicy = CommonUserPolicy.ROTATE_RANDOM,
) -> FairnessPowers:
    """Transmit powers and common-user policy for one scheme/scenario pair.

    Fairness for the common-user scheme depends on the scenario:

    * equal gains: every user takes a turn as the common user (rotation), all
      powers stay at P;
    * fixed unequal gains: the common user transmits L-1 times, so its power
      is divided by L-1; with ``fair_comparison`` the base power (users and
      relay) is additionally multiplied by 2L-2 so the comparison against the
      other schedules spends the same average energy per user;
    * variable gains: the best user is re-selected every frame, which already
      rotates the extra duty cycle, so no power scaling is applied.

    The chain and mirror schedules always transmit at P.
    """
    tx = np.full(L, float(P))
    if scheme is not PairingScheme.COMMON_USER:
        return FairnessPowers(tx_power=tx, relay_scale=1.0, common_policy=CommonUserPolicy.NONE)

    if scenario is ScenarioFamily.EQUAL:
        return FairnessPowers(tx_power=tx, relay_scale=1.0, common_policy=rotation)

    if scenario is ScenarioFamily.UNEQUAL:
        if common is None:
            raise ValueError("fixed unequal gains need the common user index")
        p_eff = (2 * L - 2) * P if fair_comparison else P
        tx[:] = p_eff
        tx[common] = p_eff / (L - 1)
        relay_scale = float(2 * L - 2) if fair_comparison else 1.0
        return FairnessPowers(tx_power=tx, relay_scale=relay_scale,
                              common_policy=CommonUserPolicy.FIXED)

    # Variable gains: per-frame re-selection, unscaled powers.
    return FairnessPowers(tx_power=tx, relay_scale=1.0,
                          common_policy=CommonUserPolicy.RESELECT_EACH_FRAME)
