import numpy as np


__VERSION__ = '1.0'

TWO_PI = 2 * np.pi
HBAR = 1.054571817e-34
K_BOLTZMANN = 1.380649e-23

# Operating point of the two-membrane cavity, ordinary frequency (Hz)
MEAN_OMEGA_HZ = 1.2e6
GAMMA1_HZ = 0.65
GAMMA2_HZ = 0.62
CAVITY1_LINEWIDTH_HZ = 270e3
CAVITY2_LINEWIDTH_HZ = 290e3

# k_B T / (hbar omega_bar) at room temperature, rounded
THERMAL_OCCUPATION = 5.2e6

ADIABATICITY_THRESHOLD = 0.1
DARK_MODE_RATIO_THRESHOLD = 5.0
OVERLAP_THRESHOLD = 0.9
EQUAL_GAMMA_TOLERANCE = 0.05
EP_TOLERANCE = 1e-9
PSD_FLOOR = 1e-12
LYAPUNOV_RESIDUAL_TOLERANCE = 1e-10

FIT_MAX_ITERATIONS = 200
FIT_STEP_TOLERANCE = 1e-10
SPECTRUM_POINTS = 2001
SPECTRUM_HALF_SPAN_WIDTHS = 20

MAX_FAILURE_FRACTION = 0.5

MECHANICAL_MODES = ('b1', 'b2')
CAVITY_MODES = ('a1', 'a2')
MODE_ORDER = MECHANICAL_MODES + CAVITY_MODES

DARK = 'dark'
BRIGHT = 'bright'
HYBRID = 'hybrid'

PRE_EP = 'pre-EP'
AT_EP = 'at-EP'
POST_EP = 'post-EP'
NOT_APPLICABLE = 'not-applicable'

RNG_NAME = 'numpy.random.Philox'

SWEEP_COLUMNS = (
    'control_hz', 'omega_plus_hz', 'omega_minus_hz', 'gamma_plus_hz', 'gamma_minus_hz', 'n1_over_nth',
    'n2_over_nth', 'ntotal_over_nth', 'dark_limit_over_nth', 'regime', 'classification', 'omega_plus_cf_hz',
    'omega_minus_cf_hz', 'gamma_plus_cf_hz', 'gamma_minus_cf_hz', 'status', 'reason'
)

TEXT_COLUMNS = ('regime', 'classification', 'status', 'reason', 'spectrum_file')
