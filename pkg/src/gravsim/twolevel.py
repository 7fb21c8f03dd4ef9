"""Two-level atom driven by a classical field: exact pulses and sequences.

The module works in the frame rotating at the drive frequency, where a square
pulse has a constant Hamiltonian and the propagator is available in closed
form.  All matrices act on the amplitude vector ``(C_b, C_a)`` -- excited
amplitude first (see :mod:`gravsim.core`).

For a drive of complex Rabi rate ``Omega = rabi_mod * exp(i rabi_arg)``,
detuning ``delta`` and laser phase ``phi``, the lab-frame coupling is
``(hbar/2) Omega exp(-i (delta t + phi))`` and everything below depends on the
phase only through ``phi_eff = phi - rabi_arg``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .core import HBAR, PulseParams, SequenceParams, TwoLevelState, state_probability
from .errors import DegenerateDriveError, InvalidSequenceError, StepSizeError

__all__ = [
    "RotatingFrameHamiltonian",
    "MixingAngle",
    "Eigensystem",
    "interaction_hamiltonian",
    "rotating_frame_hamiltonian",
    "mixing_angle",
    "eigensystem",
    "spectral_projectors",
    "propagator_matrix",
    "pulse_propagator",
    "evolve_pulse",
    "evolve_free",
    "run_sequence",
    "mach_zehnder_probability",
    "ode_oracle",
]

#: Minimum number of integrator steps per Rabi period required of the oracle.
_ORACLE_RESOLUTION = 100.0


@dataclass(frozen=True)
class RotatingFrameHamiltonian:
    """Constant Hamiltonian of a square pulse in the co-rotating frame.

    Attributes
    ----------
    delta : float
        Drive detuning [rad/s].
    rabi_mod, rabi_arg : float
        Modulus [rad/s] and argument [rad] of the complex Rabi rate.
    laser_phase : float
        Drive phase at t = 0 [rad].
    """

    delta: float
    rabi_mod: float
    rabi_arg: float
    laser_phase: float

    @property
    def effective_phase(self) -> float:
        """Phase entering the off-diagonal coupling: laser_phase - rabi_arg."""
        return self.laser_phase - self.rabi_arg

    def matrix(self, hbar: float = HBAR) -> np.ndarray:
        """2x2 matrix on (C_b, C_a): (hbar/2) [[-delta, W e^{-i phi}],
        [W e^{+i phi}, +delta]] with W = rabi_mod, phi = effective_phase."""
        off = self.rabi_mod * cmath.exp(-1j * self.effective_phase)
        return (hbar / 2.0) * np.array(
            [[-self.delta, off], [off.conjugate(), self.delta]], dtype=complex
        )


@dataclass(frozen=True)
class MixingAngle:
    """Polar decomposition of the rotating-frame Hamiltonian.

    Attributes
    ----------
    theta : float
        Mixing angle in [0, pi]; sin(theta) = rabi_mod/omega_r and
        cos(theta) = -delta/omega_r.
    omega_r : float
        Generalized Rabi rate sqrt(rabi_mod^2 + delta^2) [rad/s].
    """

    theta: float
    omega_r: float


@dataclass(frozen=True)
class Eigensystem:
    """Eigenvalues and eigenvectors of a rotating-frame pulse Hamiltonian.

    ``lambda_plus``/``lambda_minus`` are the dressed-state energies
    +/- hbar*omega_r/2 [J]; ``v_plus``/``v_minus`` are the corresponding
    normalized eigenvectors on (C_b, C_a).
    """

    lambda_plus: float
    lambda_minus: float
    v_plus: np.ndarray
    v_minus: np.ndarray


def interaction_hamiltonian(
    pulse: PulseParams, t: float, hbar: float = HBAR
) -> np.ndarray:
    """Lab-frame coupling Hamiltonian of a square pulse at time ``t``.

    Returns the 2x2 matrix on (C_b, C_a) whose off-diagonal element is
    ``(hbar/2) Omega exp(-i (delta t + laser_phase))`` (diagonal zero, the
    bare level energies being absorbed in the interaction picture).
    """
    drive = (
        pulse.rabi_mod
        * cmath.exp(-1j * (pulse.detuning * t + pulse.effective_phase))
    )
    return (hbar / 2.0) * np.array(
        [[0.0, drive], [drive.conjugate(), 0.0]], dtype=complex
    )


def rotating_frame_hamiltonian(pulse: PulseParams) -> RotatingFrameHamiltonian:
    """Hamiltonian of ``pulse`` in the frame rotating at the drive frequency.

    The frame transformation diag(e^{+i delta t/2}, e^{-i delta t/2}) removes
    the explicit time dependence; the returned record's :meth:`matrix` gives
    the constant 2x2 generator.
    """
    return RotatingFrameHamiltonian(
        delta=pulse.detuning,
        rabi_mod=pulse.rabi_mod,
        rabi_arg=pulse.rabi_arg,
        laser_phase=pulse.laser_phase,
    )


def mixing_angle(delta: float, rabi_mod: float) -> MixingAngle:
    """Mixing angle and generalized Rabi rate of a drive.

    Parameters
    ----------
    delta : float
        Detuning [rad/s].
    rabi_mod : float
        Rabi-rate modulus [rad/s], >= 0.

    Returns
    -------
    MixingAngle
        theta = atan2(rabi_mod, -delta) in [0, pi] and
        omega_r = hypot(rabi_mod, delta).

    Raises
    ------
    DegenerateDriveError
        If both ``delta`` and ``rabi_mod`` vanish (angle undefined).
    """
    if rabi_mod < 0.0:
        raise ValueError(f"rabi_mod must be >= 0, got {rabi_mod}")
    omega_r = math.hypot(rabi_mod, delta)
    if omega_r == 0.0:
        raise DegenerateDriveError("rabi_mod and delta are both zero")
    return MixingAngle(theta=math.atan2(rabi_mod, -delta), omega_r=omega_r)


def eigensystem(h: RotatingFrameHamiltonian, hbar: float = HBAR) -> Eigensystem:
    """Dressed states of a constant rotating-frame Hamiltonian.

    The eigenvalues are +/- hbar*omega_r/2.  With half-angle c = cos(theta/2),
    s = sin(theta/2) and phi the effective drive phase, the eigenvectors on
    (C_b, C_a) are::

        v_plus  = ( c e^{-i phi/2},  s e^{+i phi/2})
        v_minus = (-s e^{-i phi/2},  c e^{+i phi/2})
    """
    ang = mixing_angle(h.delta, h.rabi_mod)
    half = ang.theta / 2.0
    c, s = math.cos(half), math.sin(half)
    em = cmath.exp(-1j * h.effective_phase / 2.0)
    ep = em.conjugate()
    v_plus = np.array([c * em, s * ep], dtype=complex)
    v_minus = np.array([-s * em, c * ep], dtype=complex)
    lam = hbar * ang.omega_r / 2.0
    return Eigensystem(
        lambda_plus=lam, lambda_minus=-lam, v_plus=v_plus, v_minus=v_minus
    )


def spectral_projectors(eig: Eigensystem) -> tuple[np.ndarray, np.ndarray]:
    """Rank-1 projectors |v+><v+| and |v-><v-| built from the eigenvectors.

    They are Hermitian, idempotent, mutually orthogonal, and sum to the
    identity.
    """
    p_plus = np.outer(eig.v_plus, eig.v_plus.conj())
    p_minus = np.outer(eig.v_minus, eig.v_minus.conj())
    return p_plus, p_minus


def propagator_matrix(
    rabi_mod: float,
    effective_phase: float,
    start_time: float,
    duration: float,
    frame_delta: float,
    rot_delta: float | None = None,
    mean_shift: float = 0.0,
) -> np.ndarray:
    """Exact propagator of a square pulse on (C_b, C_a) amplitudes.

    The unitary is assembled as D^dag(t0 + tau) * exp(-i H_R tau) * D(t0)
    with frame D(t) = diag(e^{+i frame_delta t/2}, e^{-i frame_delta t/2}).
    ``rot_delta`` is the detuning entering the rotation axis (it differs from
    ``frame_delta`` when constant diagonal shifts are present, e.g. light
    shifts); ``mean_shift`` adds a global phase e^{-i mean_shift tau} from the
    mean of those diagonal shifts.

    Parameters
    ----------
    rabi_mod : float
        Coupling modulus [rad/s].
    effective_phase : float
        Drive phase entering the coupling [rad].
    start_time, duration : float
        Pulse start t0 [s] and length tau [s].
    frame_delta : float
        Frequency of the rotating frame = drive detuning [rad/s].
    rot_delta : float, optional
        Detuning along the rotation axis; defaults to ``frame_delta``.
    mean_shift : float, optional
        Mean diagonal energy shift [rad/s] contributing a global phase.

    Returns
    -------
    numpy.ndarray
        2x2 complex unitary.
    """
    if rot_delta is None:
        rot_delta = frame_delta
    omega_r = math.hypot(rabi_mod, rot_delta)
    if omega_r > 0.0:
        sin_theta = rabi_mod / omega_r
        cos_theta = -rot_delta / omega_r
    else:
        sin_theta = 0.0
        cos_theta = 0.0
    half_angle = omega_r * duration / 2.0
    c = math.cos(half_angle)
    s = math.sin(half_angle)
    frame = cmath.exp(-1j * frame_delta * duration / 2.0)
    drive = cmath.exp(-1j * (frame_delta * start_time + effective_phase))
    overall = cmath.exp(-1j * mean_shift * duration)
    u = np.array(
        [
            [frame * (c - 1j * cos_theta * s), -1j * frame * drive * sin_theta * s],
            [
                -1j * frame.conjugate() * drive.conjugate() * sin_theta * s,
                frame.conjugate() * (c + 1j * cos_theta * s),
            ],
        ],
        dtype=complex,
    )
    return overall * u


def pulse_propagator(pulse: PulseParams) -> np.ndarray:
    """Exact propagator of ``pulse`` on (C_b, C_a) amplitudes."""
    return propagator_matrix(
        rabi_mod=pulse.rabi_mod,
        effective_phase=pulse.effective_phase,
        start_time=pulse.start_time,
        duration=pulse.duration,
        frame_delta=pulse.detuning,
    )


def evolve_pulse(state: TwoLevelState, pulse: PulseParams) -> TwoLevelState:
    """Apply one square pulse to a state via the closed-form propagator."""
    u = pulse_propagator(pulse)
    c_b, c_a = u @ np.array([state.c_b, state.c_a])
    return TwoLevelState(c_a=complex(c_a), c_b=complex(c_b))


def evolve_free(state: TwoLevelState, duration: float) -> TwoLevelState:
    """Free evolution between pulses.

    In the interaction picture used throughout (phases e^{-iEt/hbar} absorbed
    into the amplitudes' frame), free flight leaves the amplitudes unchanged;
    the drive-phase bookkeeping during dark times is carried by each pulse's
    ``start_time``.  The duration argument is accepted for call-site symmetry.
    """
    if duration < 0.0:
        raise ValueError(f"duration must be >= 0, got {duration}")
    return state


def mach_zehnder_probability(delta: float, tau_p: float, dphi_laser: float) -> float:
    """Closed-form excited-state fraction of a pi/2 -- pi -- pi/2 sequence.

    For small detuning (delta much less than the Rabi rate pi/tau_p) and
    pulse starts spaced uniformly (``timing="start-to-start"`` in
    :func:`run_sequence`), the exit population is::

        P_b = (1/2) [1 - cos(dphi_laser - delta * tau_p / 2)]

    with ``tau_p`` the pi-pulse duration and ``dphi_laser`` the phase
    combination phi_1 - 2 phi_2 + phi_3.
    """
    return 0.5 * (1.0 - math.cos(dphi_laser - delta * tau_p / 2.0))


def _sequence_pulses(
    seq: SequenceParams,
    rabi_mod: float,
    detuning: float,
    t_start: float,
    timing: str,
) -> tuple[PulseParams, PulseParams, PulseParams]:
    """Build the three pulses of a pi/2 -- pi -- pi/2 sequence."""
    tau_half = seq.tau_p / 2.0
    big_t = seq.t_interrogation
    if timing == "dark-intervals":
        # A dark interval of exactly T separates pulse end from next start.
        t1 = t_start
        t2 = t1 + tau_half + big_t
        t3 = t2 + seq.tau_p + big_t
    elif timing == "start-to-start":
        # Pulse starts are spaced by exactly T.
        t1 = t_start
        t2 = t1 + big_t
        t3 = t1 + 2.0 * big_t
    else:
        raise InvalidSequenceError(
            f"timing must be 'dark-intervals' or 'start-to-start', got {timing!r}"
        )
    if timing == "start-to-start" and big_t < seq.tau_p:
        raise InvalidSequenceError(
            "start-to-start spacing makes the pulses overlap: "
            f"T={big_t} < tau_p={seq.tau_p}"
        )

    def make(phase: float, start: float, dur: float) -> PulseParams:
        return PulseParams(
            rabi_mod=rabi_mod,
            detuning=detuning,
            duration=dur,
            laser_phase=phase,
            start_time=start,
        )

    p1, p2, p3 = seq.phases
    return (
        make(p1, t1, tau_half),
        make(p2, t2, seq.tau_p),
        make(p3, t3, tau_half),
    )


def run_sequence(
    seq: SequenceParams,
    detuning: float = 0.0,
    rabi_mod: float | None = None,
    state: TwoLevelState | None = None,
    t_start: float = 0.0,
    timing: str = "dark-intervals",
) -> float:
    """Excited-state fraction after a pi/2 -- pi -- pi/2 pulse sequence.

    The three pulses have durations tau_p/2, tau_p, tau_p/2 and phases
    ``seq.phases``; free evolution between them is the identity on the
    amplitudes (see :func:`evolve_free`).

    Parameters
    ----------
    seq : SequenceParams
        Sequence geometry (T, tau_p, phases).
    detuning : float, optional
        Common drive detuning [rad/s].
    rabi_mod : float, optional
        Rabi rate [rad/s]; defaults to pi/tau_p (resonant pi-pulse condition).
    state : TwoLevelState, optional
        Input state; defaults to the ground state.
    t_start : float, optional
        Start time of the first pulse [s].
    timing : {"dark-intervals", "start-to-start"}
        Pulse placement convention.  "dark-intervals" (default) leaves a dark
        interval of exactly T between a pulse's end and the next pulse's
        start; the resulting fringe carries no detuning offset,
        P = (1/2)[1 - cos(dphi_laser)] to first order in delta.
        "start-to-start" spaces the pulse starts by exactly T and yields the
        offset fringe law of :func:`mach_zehnder_probability`.

    Returns
    -------
    float
        Probability of exiting in the excited state.
    """
    if rabi_mod is None:
        rabi_mod = math.pi / seq.tau_p
    if state is None:
        state = TwoLevelState.ground()
    for pulse in _sequence_pulses(seq, rabi_mod, detuning, t_start, timing):
        state = evolve_pulse(state, pulse)
    return state_probability(state, "b")


def _amplitude_derivatives(
    c_b: complex,
    c_a: complex,
    t: float,
    rabi: complex,
    detuning: float,
    phase: float,
) -> tuple[complex, complex]:
    """Right-hand side of the lab-frame amplitude equations."""
    drive = cmath.exp(-1j * (detuning * t + phase))
    db = -0.5j * rabi * drive * c_a
    da = -0.5j * rabi.conjugate() * drive.conjugate() * c_b
    return db, da


def ode_oracle(state: TwoLevelState, pulse: PulseParams, dt: float) -> TwoLevelState:
    """Integrate one pulse with a fixed-step RK4 scheme (reference path).

    This deliberately avoids the rotating frame and the closed-form
    propagator: it steps the explicitly time-dependent amplitude equations

        dC_b/dt = -(i/2) Omega e^{-i(delta t + phi)} C_a
        dC_a/dt = -(i/2) Omega* e^{+i(delta t + phi)} C_b

    with classic Runge-Kutta, using plain Python complex arithmetic.  The
    step is shrunk so that an integer number of steps lands exactly on the
    pulse duration.

    Parameters
    ----------
    state : TwoLevelState
        State at the pulse start.
    pulse : PulseParams
        Pulse to integrate (integration runs over [start_time,
        start_time + duration]).
    dt : float
        Requested step [s]; must resolve the generalized Rabi period by at
        least a factor of 100.

    Raises
    ------
    StepSizeError
        If ``dt`` is not positive or too coarse for the pulse.
    """
    if dt <= 0.0:
        raise StepSizeError(f"dt must be > 0, got {dt}")
    omega_r = math.hypot(pulse.rabi_mod, pulse.detuning)
    if omega_r > 0.0 and dt > 2.0 * math.pi / (_ORACLE_RESOLUTION * omega_r) * (1 + 1e-12):
        raise StepSizeError(
            f"dt={dt} too coarse: need <= {2.0 * math.pi / (_ORACLE_RESOLUTION * omega_r):.3e}"
            f" to resolve omega_r={omega_r:.3e} rad/s"
        )
    n_steps = max(1, math.ceil(pulse.duration / dt))
    h = pulse.duration / n_steps
    rabi = complex(pulse.rabi)
    phase = pulse.laser_phase
    delta = pulse.detuning
    c_b = complex(state.c_b)
    c_a = complex(state.c_a)
    t = pulse.start_time
    for _ in range(n_steps):
        kb1, ka1 = _amplitude_derivatives(c_b, c_a, t, rabi, delta, phase)
        kb2, ka2 = _amplitude_derivatives(
            c_b + 0.5 * h * kb1, c_a + 0.5 * h * ka1, t + 0.5 * h, rabi, delta, phase
        )
        kb3, ka3 = _amplitude_derivatives(
            c_b + 0.5 * h * kb2, c_a + 0.5 * h * ka2, t + 0.5 * h, rabi, delta, phase
        )
        kb4, ka4 = _amplitude_derivatives(
            c_b + h * kb3, c_a + h * ka3, t + h, rabi, delta, phase
        )
        c_b += (h / 6.0) * (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4)
        c_a += (h / 6.0) * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4)
        t += h
    return TwoLevelState(c_a=c_a, c_b=c_b)
