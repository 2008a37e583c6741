"""Shared fixtures and cross-check helpers."""

import cmath
import math

import numpy as np
import pytest

from ramansim import PulseEnvelope, rotation_angle


@pytest.fixture
def rng():
    return np.random.default_rng(719364002)


def bare_final_state(a1, a2, a3, chi, x_max, alpha=0.0, beta=math.pi / 4,
                     env=None):
    """Reassemble the bare-basis state at u_f from adiabatic amplitudes.

    psi(u_f) = a1 Phi_1 + a2 e^{i Lambda} Phi_2 + a3 e^{-i theta_3} Phi_3
    with theta_3 = 2 u_b chi + Lambda; the drive is off at u_f so the
    eigenvectors take their phi = 0 form.
    """
    if env is None:
        env = PulseEnvelope()
    lam = rotation_angle(chi, x_max, env) if x_max > 0.0 else 0.0
    ea = cmath.exp(1j * alpha)
    cb, sb = math.cos(beta), math.sin(beta)
    phi1 = np.array([-ea * sb, cb, 0.0])
    phi2 = np.array([-ea * cb, -sb, 0.0])
    phi3 = np.array([0.0, 0.0, 1.0], dtype=complex)
    theta3 = 2.0 * env.u_b * chi + lam
    return (a1 * phi1
            + a2 * cmath.exp(1j * lam) * phi2
            + a3 * cmath.exp(-1j * theta3) * phi3)
