"""Lambda-system frame: pulse envelope, adiabatic eigensystem, rotation calibration.

Conventions used throughout the package:

* basis ordering is (|0>, |1>, |X>) with the qubit states first,
* hbar = 1, so every energy is an angular frequency in ns^-1,
* the drive is parameterized by the detuning Delta, the pulse halfwidth tau,
  the peak ratio x_max = max Omega / Delta, the relative laser phase alpha
  and the constant mixing angle beta with Omega_1 = Omega cos(beta),
  Omega_2 = Omega sin(beta).

The dimensionless time is u = t / tau and the pulse lives on u in
[-u_b, u_b].  chi = Delta * tau is the adiabaticity parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, NumericalError

_LN2 = math.log(2.0)

# 1 meV / hbar expressed in ns^-1.  The rounded value keeps chi = Delta*tau
# at round numbers for meV-scale detunings and picosecond pulses; the
# second constant is the physical conversion.
MEV_TO_INV_NS_ROUNDED = 1500.0
MEV_TO_INV_NS_PHYSICAL = 1519.3

QUADRATURE_RTOL = 1e-10


@dataclass(frozen=True)
class PhysicalUnits:
    """Energy unit conversion; energies are stored as angular frequencies."""

    mev_to_inv_ns: float = MEV_TO_INV_NS_ROUNDED

    def __post_init__(self):
        if not self.mev_to_inv_ns > 0.0:
            raise ConfigurationError("mev_to_inv_ns must be positive")

    def energy_to_rate(self, mev):
        """meV -> angular frequency [ns^-1]."""
        return mev * self.mev_to_inv_ns

    def rate_to_energy(self, inv_ns):
        """angular frequency [ns^-1] -> meV."""
        return inv_ns / self.mev_to_inv_ns


@dataclass(frozen=True)
class PulseEnvelope:
    """Truncated Gaussian envelope on u in [-u_b, u_b].

    f(u) = (g(u) - g(u_b)) / (1 - g(u_b)) with g(u) = exp(-u^2 ln 2),
    so f(0) = 1, f(+-u_b) = 0 exactly and f(+-1) is close to 1/2.
    """

    u_b: float = 3.0

    def __post_init__(self):
        if not self.u_b > 0.0:
            raise ConfigurationError("u_b must be positive")

    def _gb(self):
        return math.exp(-_LN2 * self.u_b * self.u_b)

    def _check_domain(self, u):
        if np.any(np.abs(u) > self.u_b):
            raise ConfigurationError(
                "u outside [-u_b, u_b] with u_b = %g" % self.u_b)

    def value(self, u):
        """Envelope f(u); scalar in, scalar out; array in, array out."""
        u = np.asarray(u, dtype=float)
        self._check_domain(u)
        gb = self._gb()
        out = (np.exp(-_LN2 * u * u) - gb) / (1.0 - gb)
        return float(out) if out.ndim == 0 else out

    def derivative(self, u):
        """Analytic f'(u) on the same domain."""
        u = np.asarray(u, dtype=float)
        self._check_domain(u)
        gb = self._gb()
        out = -2.0 * _LN2 * u * np.exp(-_LN2 * u * u) / (1.0 - gb)
        return float(out) if out.ndim == 0 else out


def _scalar_envelope(env):
    # fast scalar closure for the quadrature hot loop
    gb = math.exp(-_LN2 * env.u_b * env.u_b)
    norm = 1.0 - gb

    def f(u):
        return (math.exp(-_LN2 * u * u) - gb) / norm

    return f


def hamiltonian(omega1, omega2, detuning, alpha=0.0):
    """Interaction-picture Hamiltonian in the (|0>, |1>, |X>) basis [ns^-1]."""
    e = np.exp(1j * alpha)
    return np.array([
        [0.0, 0.0, omega1 * e],
        [0.0, 0.0, omega2],
        [omega1 * np.conj(e), omega2, detuning],
    ], dtype=complex)


@dataclass(frozen=True, eq=False)
class AdiabaticEigensystem:
    """Closed-form instantaneous eigensystem of the Lambda Hamiltonian.

    values holds (lambda_1, lambda_2, lambda_3) with lambda_1 = 0 and
    lambda_2 <= 0 <= lambda_3; vectors holds the eigenvectors as columns,
    Phi_1 being the dark-like state with no |X> content.
    """

    omega: float
    z: float
    phi: float
    values: np.ndarray
    vectors: np.ndarray


def eigensystem(omega1, omega2, detuning, alpha=0.0, beta=None):
    """Diagonalize the Lambda Hamiltonian in closed form.

    Parameters
    ----------
    omega1, omega2 : float
        Rabi frequencies [ns^-1], both >= 0.
    detuning : float
        Shared detuning Delta > 0 [ns^-1].
    alpha : float
        Relative laser phase [rad].
    beta : float, optional
        Mixing angle.  When omitted it is recomputed as
        arctan(omega2 / omega1); pass the stored configuration value at
        zero drive where the ratio is 0/0.

    Returns
    -------
    AdiabaticEigensystem
        Eigenvalues (0, -2 Z sin^2 phi, 2 Z cos^2 phi) and unit-norm
        eigenvectors; no numeric diagonalizer is involved.
    """
    if not detuning > 0.0:
        raise ConfigurationError("detuning must be positive")
    if omega1 < 0.0 or omega2 < 0.0:
        raise ConfigurationError("Rabi frequencies must be non-negative")

    omega = math.hypot(omega1, omega2)
    z = math.hypot(omega, 0.5 * detuning)
    phi = 0.5 * math.atan2(2.0 * omega, detuning)
    if beta is None:
        beta = math.atan2(omega2, omega1)

    sb, cb = math.sin(beta), math.cos(beta)
    sp, cp = math.sin(phi), math.cos(phi)
    ea = complex(math.cos(alpha), math.sin(alpha))

    values = np.array([0.0, -2.0 * z * sp * sp, 2.0 * z * cp * cp])
    vectors = np.array([
        [-ea * sb, -ea * cb * cp, ea * cb * sp],
        [cb, -sb * cp, sb * sp],
        [0.0, sp, cp],
    ], dtype=complex)
    return AdiabaticEigensystem(omega=omega, z=z, phi=phi,
                                values=values, vectors=vectors)


def rotation_axis(alpha, beta):
    """Unit rotation axis n = (cos a sin 2b, -sin a sin 2b, cos 2b)."""
    return np.array([
        math.cos(alpha) * math.sin(2.0 * beta),
        -math.sin(alpha) * math.sin(2.0 * beta),
        math.cos(2.0 * beta),
    ])


@dataclass(frozen=True, eq=False)
class RotationSpec:
    """Target single-qubit rotation: positive angle plus unit axis."""

    angle: float
    axis: np.ndarray

    def __post_init__(self):
        if self.angle < 0.0:
            raise ConfigurationError("rotation angle must be >= 0")
        axis = np.asarray(self.axis, dtype=float)
        if axis.shape != (3,) or abs(np.linalg.norm(axis) - 1.0) > 1e-9:
            raise ConfigurationError("axis must be a unit 3-vector")
        object.__setattr__(self, "axis", axis)

    @property
    def adiabatic_phase(self):
        """Signed accumulated phase of Phi_2; always -angle."""
        return -self.angle

    @classmethod
    def from_angles(cls, angle, alpha=0.0, beta=math.pi / 4):
        return cls(angle=angle, axis=rotation_axis(alpha, beta))

    def unitary(self):
        """2x2 qubit unitary exp(-i/2 * adiabatic_phase * sigma.n)."""
        nx, ny, nz = self.axis
        half = 0.5 * self.angle
        c, s = math.cos(half), math.sin(half)
        # exp(+i (angle/2) sigma.n) = cos I + i sin sigma.n
        return np.array([
            [c + 1j * s * nz, 1j * s * (nx - 1j * ny)],
            [1j * s * (nx + 1j * ny), c - 1j * s * nz],
        ])


def _simpson_recurse(f, a, b, fa, fm, fb, whole, eps, depth):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if abs(delta) <= 15.0 * eps:
        return left + right + delta / 15.0
    if depth <= 0:
        raise NumericalError("adaptive quadrature failed to converge")
    return (_simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
            + _simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1))


def adaptive_simpson(f, a, b, rtol=QUADRATURE_RTOL):
    """Adaptive Simpson quadrature of a smooth scalar integrand."""
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    eps = rtol * max(abs(whole), 1e-300)
    return _simpson_recurse(f, a, b, fa, fm, fb, whole, eps, depth=48)


def _adiabaticity_integral(x_max, env):
    # g(x) = int (sqrt(1 + 4 x^2 f^2) - 1) du, written to avoid the
    # cancellation of sqrt(1+s)-1 at small s
    fenv = _scalar_envelope(env)
    x2 = 4.0 * x_max * x_max

    def integrand(u):
        fv = fenv(u)
        s = x2 * fv * fv
        return s / (math.sqrt(1.0 + s) + 1.0)

    return adaptive_simpson(integrand, -env.u_b, env.u_b)


def rotation_angle(chi, x_max, env=None):
    """Rotation angle Lambda accumulated by the pulse.

    Lambda = (chi/2) * int_{-u_b}^{u_b} (sqrt(1 + 4 x_max^2 f(u)^2) - 1) du,
    evaluated by adaptive quadrature to relative tolerance 1e-10.
    """
    if not chi > 0.0:
        raise ConfigurationError("chi must be positive")
    if x_max < 0.0:
        raise ConfigurationError("x_max must be >= 0")
    if env is None:
        env = PulseEnvelope()
    if x_max == 0.0:
        return 0.0
    return 0.5 * chi * _adiabaticity_integral(x_max, env)


def solve_xmax(angle, chi, env=None, xtol=1e-12, max_iter=256):
    """Solve rotation_angle(chi, x_max) = angle for x_max.

    Brackets [0, x_hi] by doubling x_hi until the adiabaticity integral
    exceeds 2*angle/chi, then bisects to absolute tolerance xtol.  The
    result depends on (angle, chi) only through their ratio.

    Raises
    ------
    NumericalError
        If bracketing or bisection exceeds the iteration cap.
    """
    if angle < 0.0:
        raise ConfigurationError("angle must be >= 0")
    if not chi > 0.0:
        raise ConfigurationError("chi must be positive")
    if env is None:
        env = PulseEnvelope()
    if angle == 0.0:
        return 0.0

    target = 2.0 * angle / chi
    hi = 1.0
    for _ in range(64):
        if _adiabaticity_integral(hi, env) > target:
            break
        hi *= 2.0
    else:
        raise NumericalError("failed to bracket x_max")

    lo = 0.0
    for _ in range(max_iter):
        if hi - lo <= xtol:
            return 0.5 * (lo + hi)
        mid = 0.5 * (lo + hi)
        if _adiabaticity_integral(mid, env) < target:
            lo = mid
        else:
            hi = mid
    raise NumericalError("bisection for x_max did not converge")


@dataclass(frozen=True, eq=False)
class DriveConfig:
    """Complete drive specification for one gate.

    Fields
    ------
    detuning : float
        Delta > 0 [ns^-1].
    tau : float
        Pulse halfwidth [ns].
    x_max : float
        Peak ratio max Omega / Delta, >= 0.
    alpha : float
        Relative laser phase [rad].
    beta : float
        Mixing angle in [0, pi/2]; constant because both envelopes share
        one shape.
    envelope : PulseEnvelope
    """

    detuning: float
    tau: float
    x_max: float
    alpha: float = 0.0
    beta: float = math.pi / 4
    envelope: PulseEnvelope = PulseEnvelope()

    def __post_init__(self):
        if not self.detuning > 0.0:
            raise ConfigurationError("detuning must be positive")
        if not self.tau > 0.0:
            raise ConfigurationError("tau must be positive")
        if self.x_max < 0.0:
            raise ConfigurationError("x_max must be >= 0")
        if not 0.0 <= self.beta <= 0.5 * math.pi:
            raise ConfigurationError("beta must lie in [0, pi/2]")

    @property
    def chi(self):
        return self.detuning * self.tau

    @property
    def omega_peak(self):
        return self.detuning * self.x_max

    @property
    def z_max(self):
        """Z at peak drive [ns^-1]."""
        return 0.5 * self.detuning * math.sqrt(1.0 + 4.0 * self.x_max ** 2)

    @property
    def t_initial(self):
        return -self.envelope.u_b * self.tau

    @property
    def t_final(self):
        return self.envelope.u_b * self.tau

    def omega(self, t):
        """Total Rabi frequency Omega(t) [ns^-1]."""
        return self.omega_peak * self.envelope.value(t / self.tau)

    def rabi_frequencies(self, t):
        """(Omega_1, Omega_2) at time t [ns^-1]."""
        om = self.omega(t)
        return om * math.cos(self.beta), om * math.sin(self.beta)

    def hamiltonian_at(self, t):
        o1, o2 = self.rabi_frequencies(t)
        return hamiltonian(o1, o2, self.detuning, self.alpha)

    def eigensystem_at(self, t):
        o1, o2 = self.rabi_frequencies(t)
        return eigensystem(o1, o2, self.detuning, self.alpha, beta=self.beta)

    def rotation_angle(self):
        return rotation_angle(self.chi, self.x_max, self.envelope)

    def rotation(self):
        """Target rotation realized by this drive."""
        return RotationSpec.from_angles(self.rotation_angle(),
                                        self.alpha, self.beta)

    @classmethod
    def for_rotation(cls, angle, detuning, tau, alpha=0.0,
                     beta=math.pi / 4, envelope=None):
        """Calibrate x_max so the drive realizes the requested angle."""
        env = PulseEnvelope() if envelope is None else envelope
        x = solve_xmax(angle, detuning * tau, env)
        return cls(detuning=detuning, tau=tau, x_max=x,
                   alpha=alpha, beta=beta, envelope=env)
