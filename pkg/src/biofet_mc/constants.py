"""Physical constants (CODATA 2018, SI)."""

from scipy import constants as _c

Q_E = _c.e  # elementary charge, C
K_B = _c.k  # Boltzmann constant, J/K
N_A = _c.N_A  # Avogadro constant, 1/mol
EPS_0 = _c.epsilon_0  # vacuum permittivity, F/m

# Fraction of the peak concentration regarded as stationary at the receiver.
STATIONARY_FRACTION = 0.99
