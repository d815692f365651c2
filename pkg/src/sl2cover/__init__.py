"""Lifted circle homeomorphisms, the universal cover of PSL2(R) and its conjugacy invariants."""
from .circle import (
    CircleMap,
    Lift,
    SampledLift,
    compose,
    dist_sup,
    identity,
    invert,
    sine_lift,
    translation,
    validate,
)
from .cover import ConjClassLabel, CoverElement, InvariantReport, classify, invariant_report
from .errors import (
    CocycleNotIntegral,
    ConvergenceFailure,
    EquivalenceViolation,
    InvalidLift,
    NotCentral,
    PreconditionViolated,
)
from .invariants import DirectionType, RSharp, direction_type, length, length_sharp
from .psl2 import ProjMat, class_of, iwasawa
from .quasimorphism import TauEstimate, translation_number

__version__ = "0.1.0"
