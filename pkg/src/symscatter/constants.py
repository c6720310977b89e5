from enum import Enum

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 500
EXISTENCE_BRUTE_FORCE_CAP = 25
MEMBERSHIP_TOL = 1e-9


class SchemeKind(Enum):
    COMPLETE = "complete"
    BALANCED = "balanced"
    RANDOMIZED = "randomized"


class FunctionalKind(Enum):
    M = "m"
    TYLER = "tyler"


class DistributionKind(Enum):
    EXPONENTIAL = "iid-exponential"
    GAUSSIAN = "iid-gaussian"
    ELLIPTICAL_T = "elliptical-t"


class ExistenceStatus(Enum):
    PASS = "pass"
    FAIL = "fail"
    HEURISTIC_PASS = "heuristic-pass"
