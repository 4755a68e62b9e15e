# wiener_lab/constants.py

from enum import Enum

import numpy as np

# ==================== Schemes ====================

class Scheme(str, Enum):
    # Tracking codecs driven by the Monte Carlo harness
    SOI = "soi"
    UNIFORM_LLOYD = "uniform_lloyd"
    UNIFORM_TEST_CHANNEL = "uniform_test_channel"

    @classmethod
    def list(cls):
        return [scheme.value for scheme in cls]


class LookaheadScheme(str, Enum):
    # SOI decoders shift each completed interval by a fraction of beta toward the next sample
    SOI_MIDPOINT = "soi_midpoint"
    SOI_SIGN_MEAN = "soi_sign_mean"
    UNIFORM_INTERPOLATION = "uniform_interpolation"

    @classmethod
    def list(cls):
        return [scheme.value for scheme in cls]


class Compressor(str, Enum):
    # Innovation compressors behind uniform sampling
    LLOYD_MAX = "lloyd_max"
    TEST_CHANNEL = "test_channel"
    NONE = "none"

    @classmethod
    def list(cls):
        return [compressor.value for compressor in cls]


class Controller(str, Enum):
    SOI = "soi"
    UNIFORM = "uniform"

    @classmethod
    def list(cls):
        return [controller.value for controller in cls]


class Frontier(str, Enum):
    # Distortion-frequency-rate objectives minimized over (f, Rs)
    ODFRF = "odfrf"
    IDFRF = "idfrf"

    @classmethod
    def list(cls):
        return [frontier.value for frontier in cls]


class BoundKind(str, Enum):
    LOWER_BOUND = "lower_bound"
    UPPER_BOUND = "upper_bound"
    LIMIT = "limit"
    CLOSED_FORM = "closed_form"

    @classmethod
    def list(cls):
        return [kind.value for kind in cls]


class Curve(str, Enum):
    # Closed-form curves emitted by the analytic command
    DOP = "dop"
    DDET = "ddet"
    NONCAUSAL = "noncausal"
    DCH = "dch"
    SOI_LOOKAHEAD = "soi_lookahead"
    UNIFORM_LOOKAHEAD = "uniform_lookahead"

    @classmethod
    def list(cls):
        return [curve.value for curve in cls]

# ==================== Discretization ====================

# Grid steps per uniform sampling interval (h = interval / 1000)
STEPS_PER_INTERVAL = 1000

# Threshold runs use h = min(MAX_THRESHOLD_STEP, beta^2 / THRESHOLD_STEP_DIVISOR)
THRESHOLD_STEP_DIVISOR = 1000
MAX_THRESHOLD_STEP = 1e-3

# Look-ahead shift, as a fraction of beta, applied toward the next SOI sample.
# 1/6 is the mean-square optimal constant shift given the sign.
SOI_LOOKAHEAD_SHIFTS = {
    LookaheadScheme.SOI_MIDPOINT: 0.5,
    LookaheadScheme.SOI_SIGN_MEAN: 1.0 / 6.0,
}

# Pdf grids span this many standard deviations on each side of the mean
PDF_SUPPORT_SIGMAS = 8.0

# Mass allowed outside a pdf grid before it is widened
PDF_OVERFLOW_MASS = 1e-6
PDF_WIDEN_FACTOR = 1.5

# ==================== Finite-N program ====================

LOG2E = float(np.log2(np.e))
LAMBDA_MAX_DOUBLINGS = 200
LAMBDA_MAX_HALVINGS = 1000
LAMBDA_REL_TOL = 1e-12
MAX_BITS_PER_SAMPLE = 8

# ==================== Statistics & Output ====================

MIN_HEADLINE_REPS = 30
CSV_SIGNIFICANT_DIGITS = 12

# ==================== Exports ====================

__all__ = [
    "Scheme",
    "LookaheadScheme",
    "Compressor",
    "Controller",
    "Frontier",
    "BoundKind",
    "Curve",
    "STEPS_PER_INTERVAL",
    "THRESHOLD_STEP_DIVISOR",
    "MAX_THRESHOLD_STEP",
    "SOI_LOOKAHEAD_SHIFTS",
    "PDF_SUPPORT_SIGMAS",
    "PDF_OVERFLOW_MASS",
    "PDF_WIDEN_FACTOR",
    "LOG2E",
    "LAMBDA_MAX_DOUBLINGS",
    "LAMBDA_MAX_HALVINGS",
    "LAMBDA_REL_TOL",
    "MAX_BITS_PER_SAMPLE",
    "MIN_HEADLINE_REPS",
    "CSV_SIGNIFICANT_DIGITS",
]
