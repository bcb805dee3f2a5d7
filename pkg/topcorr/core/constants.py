"""Module containing constants for constructions, tolerances and budgets."""

from fractions import Fraction

# Admissible cover construction thresholds
CHART_THRESHOLD = Fraction(1, 3)
PAIR_UPPER_CUTOFF = Fraction(3, 5)
PAIR_LOWER_CUTOFF = Fraction(2, 5)
BAND_LOW = Fraction(3, 10)
BAND_HIGH = Fraction(7, 10)

COVER_METADATA = {
    "chart_threshold": "1/3",
    "pair_upper_cutoff": "3/5",
    "pair_lower_cutoff": "2/5",
    "band": ["3/10", "7/10"],
}

# Regluing levels tried in order; must lie strictly inside the pair cutoffs
CUT_LEVEL_CANDIDATES = (
    Fraction(1, 2),
    Fraction(9, 20),
    Fraction(11, 20),
    Fraction(19, 40),
    Fraction(21, 40),
    Fraction(41, 100),
    Fraction(59, 100),
)

# Tolerances
SAMPLE_TOLERANCE = 1e-12
RESIDUAL_TOLERANCE = 1e-9
NEGATIVE_CONTROL_THRESHOLD = 1e-3
BALL_TOLERANCE = 1e-12
BOUNDARY_OFFSET = Fraction(1, 10**12)
SAMPLE_DENOMINATOR = 2**20

# Sampling defaults
DEFAULT_SAMPLES_PER_SEGMENT = 512
DEFAULT_SEED = 7
DEFAULT_VERIFY_SAMPLES = 2000

# Budgets
MAX_REFINEMENT_ROUNDS = 40
MAX_COVER_ROUNDS = 64
MAX_FOCK_DIMENSION = 4096
EDGE_EQUIVALENCE_SHRINKS = 3

# Environment variables
ENV_SAMPLES = "TOPCORR_SAMPLES"
ENV_SEED = "TOPCORR_SEED"
