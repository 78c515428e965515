"""Physical constants (SI) shared across the toolkit.

All phasors in this package follow the exp(-i*omega*t) time convention:
passive media have Im(eps_r) >= 0 and Im(mu_r) >= 0, outgoing waves carry
exp(+i*k*r), and spectra are computed with an exp(+i*omega*t) kernel.
"""

import scipy.constants as _const

C0 = _const.c
EPS0 = _const.epsilon_0
MU0 = _const.mu_0
ETA0 = _const.value("characteristic impedance of vacuum")
