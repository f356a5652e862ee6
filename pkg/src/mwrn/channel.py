"""Average-gain scenarios and block-Rayleigh fading for an L-user relay network.

User indices are 0-based throughout.  Distances are expressed as fractions of
the reference distance d0, so the path-loss gain is simply d**-nu.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

# Distances are drawn on (DISTANCE_FLOOR, 1]; a draw of exactly 0 would give an
# unbounded gain.
DISTANCE_FLOOR = 1e-3

# Distinct per-purpose stream tags so the gain draws, the fading draws and the
# common-user rotation never consume from the same stream.
_GAIN_STREAM = 101
_FADING_STREAM = 102
ROTATION_STREAM = 103

DEFAULT_PATH_LOSS_EXPONENT = 3.0


class ScenarioFamily(str, Enum):
    EQUAL = "equal"
    UNEQUAL = "unequal"
    VARIABLE = "variable"


@dataclass(frozen=True)
class ScenarioKind:
    """Channel scenario selector.

    ``tf_prime`` is the gain refresh period in frames and only matters for the
    variable scenario (1 = redraw every frame, the worst case).
    ``cap_fraction`` optionally forces that fraction of users to distances
    below 0.1*d0 (the rest above), for robustness experiments.
    """

    family: ScenarioFamily
    tf_prime: int = 1
    cap_fraction: float | None = None

    def __post_init__(self) -> None:
        if self.tf_prime < 1:
            raise ValueError("tf_prime must be >= 1")
        if self.cap_fraction is not None and not 0.0 <= self.cap_fraction <= 1.0:
            raise ValueError("cap_fraction must lie in [0, 1]")


@dataclass(frozen=True, eq=False)
class ScenarioGains:
    """Per-user, per-frame average channel gains sigma^2 = E[|h|^2]."""

    sigma2: np.ndarray  # (L, F), strictly positive
    distances: np.ndarray | None  # (L, F) fractions of d0, None for equal gains
    nu: float

    @property
    def n_users(self) -> int:
        return self.sigma2.shape[0]

    @property
    def n_frames(self) -> int:
        return self.sigma2.shape[1]


@dataclass(frozen=True, eq=False)
class FadingRealization:
    """Complex channel coefficients h[user, slot, frame].

    Uplink and downlink coefficients are the same stored value (channel
    reciprocity); distinct (slot, frame) entries are independent draws.
    """

    h: np.ndarray  # (L, L-1, F) complex

    @property
    def n_users(self) -> int:
        return self.h.shape[0]

    @property
    def n_slots(self) -> int:
        return self.h.shape[1]

    @property
    def n_frames(self) -> int:
        return self.h.shape[2]


def path_loss_gain(distance: float, nu: float = DEFAULT_PATH_LOSS_EXPONENT) -> float:
    """Average channel gain (d0/d)**nu for a user at ``distance`` (fraction of d0)."""
    if not 0.0 < distance <= 1.0:
        raise ValueError(f"distance must lie in (0, 1] as a fraction of d0, got {distance}")
    if nu <= 0:
        raise ValueError("path-loss exponent must be positive")
    return float(distance ** -nu)


def _draw_distances(rng: np.random.Generator, L: int, cap_fraction: float | None) -> np.ndarray:
    if cap_fraction is None:
        return rng.uniform(DISTANCE_FLOOR, 1.0, size=L)
    n_close = math.ceil(cap_fraction * L)
    d = np.empty(L)
    close = rng.permutation(L)[:n_close]
    mask = np.zeros(L, dtype=bool)
    mask[close] = True
    d[mask] = rng.uniform(DISTANCE_FLOOR, 0.1, size=n_close)
    d[~mask] = rng.uniform(0.1, 1.0, size=L - n_close)
    return d


def build_scenario(
    kind: ScenarioKind,
    L: int,
    F: int,
    seed: int,
    nu: float = DEFAULT_PATH_LOSS_EXPONENT,
) -> ScenarioGains:
    """Generate the (L, F) average-gain table for one campaign.

    Equal: unit gains everywhere.  Unequal: distances drawn once, fixed over
    frames.  Variable: distances redrawn every ``tf_prime`` frames.
    """
    if L < 3:
        raise ValueError("a multi-way relay network needs at least 3 users")
    if F < 1:
        raise ValueError("frame count must be positive")
    if kind.family is ScenarioFamily.EQUAL:
        return ScenarioGains(sigma2=np.ones((L, F)), distances=None, nu=nu)

    if kind.family is ScenarioFamily.VARIABLE and kind.tf_prime > F:
        raise ValueError("tf_prime cannot exceed the frame count")

    rng = np.random.default_rng([_GAIN_STREAM, seed])
    distances = np.empty((L, F))
    if kind.family is ScenarioFamily.UNEQUAL:
        distances[:] = _draw_distances(rng, L, kind.cap_fraction)[:, None]
    else:
        for start in range(0, F, kind.tf_prime):
            stop = min(start + kind.tf_prime, F)
            distances[:, start:stop] = _draw_distances(rng, L, kind.cap_fraction)[:, None]
    sigma2 = distances ** -nu
    return ScenarioGains(sigma2=sigma2, distances=distances, nu=nu)


def draw_fading(gains: ScenarioGains, seed: int) -> FadingRealization:
    """Draw one block-Rayleigh realization for every (user, slot, frame).

    Each coefficient is a zero-mean circularly-symmetric complex Gaussian with
    E[|h|^2] = sigma2 (variance sigma2/2 per real dimension).  The result is a
    pure function of (gains, seed).
    """
    L, F = gains.sigma2.shape
    S = L - 1
    rng = np.random.default_rng([_FADING_STREAM, seed])
    z = rng.standard_normal((L, S, F)) + 1j * rng.standard_normal((L, S, F))
    h = z * np.sqrt(gains.sigma2[:, None, :] / 2.0)
    return FadingRealization(h=h)
