"""Shared state types, pulse/sequence parameter records, and constants.

Conventions used throughout the package:

* all frequencies are angular (rad/s), all phases are radians, all other
  quantities are SI;
* the phase convention is ``exp(-i E t / hbar)`` for a level of energy ``E``;
* wherever two-level amplitudes appear as a vector or matrix, the ordering is
  ``(C_b, C_a)`` -- excited amplitude first, ground amplitude second.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "HBAR",
    "DEFAULT_G",
    "RB87_MASS",
    "DEFAULT_K_EFF",
    "PhysicalConstants",
    "TwoLevelState",
    "ThreeLevelState",
    "PulseParams",
    "SequenceParams",
    "state_probability",
]

# Reduced Planck constant [J*s] (2018 CODATA exact-by-definition value).
HBAR = 1.054571817e-34
# Default local gravitational acceleration [m/s^2].
DEFAULT_G = 9.81
# Mass of a Rb-87 atom [kg].
RB87_MASS = 1.443e-25
# Default two-photon effective wavenumber for counter-propagating 780 nm
# beams [rad/m], |k_eff| ~= 2 * 2*pi/780nm.
DEFAULT_K_EFF = 1.610e7

#: Admission tolerance on |amplitudes|^2 sums when validating states.  Kept
#: loose enough to accept fixed-step integrator output at the coarsest
#: permitted step; physics tests assert much tighter norms where required.
_NORM_TOL = 1e-6


@dataclass(frozen=True)
class PhysicalConstants:
    """Bundle of physical constants used by trajectory and phase routines.

    Parameters
    ----------
    hbar : float
        Reduced Planck constant [J*s].
    default_g : float
        Gravitational acceleration assumed when none is given [m/s^2].
    atom_mass : float
        Atomic mass [kg].
    """

    hbar: float = HBAR
    default_g: float = DEFAULT_G
    atom_mass: float = RB87_MASS

    def __post_init__(self) -> None:
        if self.hbar <= 0.0 or self.atom_mass <= 0.0:
            raise ValueError("hbar and atom_mass must be positive")


@dataclass(frozen=True)
class TwoLevelState:
    """Normalized amplitudes of a two-level atom.

    Attributes
    ----------
    c_a : complex
        Ground-state amplitude.
    c_b : complex
        Excited-state amplitude.

    Notes
    -----
    The record stores ground first for readability, but every matrix in the
    package acts on the column vector ``(c_b, c_a)`` -- excited first.
    """

    c_a: complex
    c_b: complex

    def __post_init__(self) -> None:
        norm = abs(self.c_a) ** 2 + abs(self.c_b) ** 2
        if not math.isfinite(norm) or abs(norm - 1.0) > _NORM_TOL:
            from .errors import InvalidStateError

            raise InvalidStateError(
                f"|c_a|^2 + |c_b|^2 = {norm!r}, expected 1 within {_NORM_TOL}"
            )

    @classmethod
    def ground(cls) -> "TwoLevelState":
        """Atom entirely in the ground state."""
        return cls(c_a=1.0 + 0.0j, c_b=0.0j)

    @classmethod
    def excited(cls) -> "TwoLevelState":
        """Atom entirely in the excited state."""
        return cls(c_a=0.0j, c_b=1.0 + 0.0j)


@dataclass(frozen=True)
class ThreeLevelState:
    """Normalized amplitudes of a three-level (lambda) atom plus momentum.

    Attributes
    ----------
    c_g : complex
        Lower ground-state amplitude.
    c_i : complex
        Intermediate (optically excited) state amplitude.
    c_e : complex
        Upper ground-state amplitude.
    p : float
        Momentum label of the ``c_g`` component along the beam axis [kg*m/s];
        the other components are displaced by the photon recoils.
    """

    c_g: complex
    c_i: complex
    c_e: complex
    p: float = 0.0

    def __post_init__(self) -> None:
        norm = abs(self.c_g) ** 2 + abs(self.c_i) ** 2 + abs(self.c_e) ** 2
        if not math.isfinite(norm) or abs(norm - 1.0) > _NORM_TOL:
            from .errors import InvalidStateError

            raise InvalidStateError(
                f"three-level norm = {norm!r}, expected 1 within {_NORM_TOL}"
            )

    @classmethod
    def ground(cls, p: float = 0.0) -> "ThreeLevelState":
        """Atom entirely in the lower ground state with momentum ``p``."""
        return cls(c_g=1.0 + 0.0j, c_i=0.0j, c_e=0.0j, p=p)


@dataclass(frozen=True)
class PulseParams:
    """Parameters of a single square drive pulse.

    Attributes
    ----------
    rabi_mod : float
        Modulus of the (possibly complex) Rabi rate [rad/s]; must be >= 0.
    rabi_arg : float
        Argument of the complex Rabi rate [rad].  A nonzero argument is
        equivalent to shifting the laser phase by ``-rabi_arg``.
    detuning : float
        Drive detuning from resonance [rad/s].
    laser_phase : float
        Phase of the drive field at t = 0 [rad].
    start_time : float
        Time at which the pulse switches on [s].
    duration : float
        Pulse length [s]; must be > 0.
    """

    rabi_mod: float
    detuning: float
    duration: float
    rabi_arg: float = 0.0
    laser_phase: float = 0.0
    start_time: float = 0.0

    def __post_init__(self) -> None:
        if self.rabi_mod < 0.0:
            raise ValueError(f"rabi_mod must be >= 0, got {self.rabi_mod}")
        if self.duration <= 0.0:
            raise ValueError(f"duration must be > 0, got {self.duration}")

    @property
    def rabi(self) -> complex:
        """Complex Rabi rate ``rabi_mod * exp(i rabi_arg)`` [rad/s]."""
        return self.rabi_mod * complex(math.cos(self.rabi_arg), math.sin(self.rabi_arg))

    @property
    def effective_phase(self) -> float:
        """Drive phase as seen by the dynamics, ``laser_phase - rabi_arg``."""
        return self.laser_phase - self.rabi_arg


@dataclass(frozen=True)
class SequenceParams:
    """Geometry of a pi/2 -- pi -- pi/2 interferometer sequence.

    Attributes
    ----------
    t_interrogation : float
        Dark interval T between pulses [s].
    tau_p : float
        Duration of the central pi pulse [s]; the outer pi/2 pulses last
        tau_p/2 each.
    phases : tuple of float
        Laser phases (phi_1, phi_2, phi_3) of the three pulses [rad].
    k_eff : float
        Two-photon effective wavenumber [rad/m].
    beta : float
        Frequency chirp rate applied to cancel the gravity phase [rad/s^2].
    """

    t_interrogation: float
    tau_p: float
    phases: tuple[float, float, float] = (0.0, 0.0, 0.0)
    k_eff: float = DEFAULT_K_EFF
    beta: float = 0.0

    def __post_init__(self) -> None:
        from .errors import InvalidSequenceError

        if self.t_interrogation <= 0.0 or self.tau_p <= 0.0:
            raise InvalidSequenceError(
                "t_interrogation and tau_p must both be positive, got "
                f"T={self.t_interrogation}, tau_p={self.tau_p}"
            )
        if len(self.phases) != 3:
            raise InvalidSequenceError(
                f"phases must hold exactly three entries, got {len(self.phases)}"
            )

    @property
    def dphi_laser(self) -> float:
        """Interferometric laser-phase combination phi_1 - 2 phi_2 + phi_3."""
        p1, p2, p3 = self.phases
        return p1 - 2.0 * p2 + p3

    @property
    def span(self) -> float:
        """Total sequence length 2*T + 2*tau_p (pulses plus dark intervals)."""
        return 2.0 * self.t_interrogation + 2.0 * self.tau_p


def state_probability(state: TwoLevelState | ThreeLevelState, which: str) -> float:
    """Occupation probability of one component of a state.

    Parameters
    ----------
    state : TwoLevelState or ThreeLevelState
        State whose component is queried.
    which : str
        Component label: ``"a"``/``"g"`` (ground), ``"b"``/``"e"`` (excited),
        or ``"i"`` (intermediate, three-level only).

    Returns
    -------
    float
        ``|amplitude|^2`` of the requested component.
    """
    key = which.lower()
    if isinstance(state, TwoLevelState):
        if key in ("a", "g", "ground"):
            return abs(state.c_a) ** 2
        if key in ("b", "e", "excited"):
            return abs(state.c_b) ** 2
        raise ValueError(f"unknown two-level component {which!r}")
    if isinstance(state, ThreeLevelState):
        if key in ("g", "a", "ground"):
            return abs(state.c_g) ** 2
        if key in ("i", "intermediate"):
            return abs(state.c_i) ** 2
        if key in ("e", "b", "excited"):
            return abs(state.c_e) ** 2
        raise ValueError(f"unknown three-level component {which!r}")
    raise TypeError(f"unsupported state type {type(state).__name__}")
