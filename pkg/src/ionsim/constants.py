"""Physical constants (CODATA, via scipy) and Yb-171 reference numbers."""

import math

from scipy import constants as _sc

H = _sc.h
HBAR = _sc.hbar
C = _sc.c
E_CHARGE = _sc.e
EPS0 = _sc.epsilon_0
M_E = _sc.m_e
M_P = _sc.m_p
AMU = _sc.atomic_mass
MU_B = _sc.physical_constants["Bohr magneton"][0]
A0 = _sc.physical_constants["Bohr radius"][0]

# Yb-171 level splittings and laser wavelengths
QUBIT_FREQ_HZ = 12.64e9
P_HALF_HYPERFINE_HZ = 2.11e9
COOLING_WAVELENGTH_M = 369.53e-9
READOUT_FREQ_HZ = 813e12
YB171_MASS_KG = 171 * AMU

TWO_PI = 2.0 * math.pi
