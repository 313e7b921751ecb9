"""Line arrangements with only triple points built from the cuspidal cubic
over finite fields: construction, singularity audit, matroids, realizability."""

from .gf import FieldCtx, FieldElem, field_new
from .projplane import ProjLine, ProjPoint
from .arrange import Arrangement, SingularitySpectrum, audit
from .triples import TripleSystem
from .realize import RealizationProblem, RealizationResult, realize_over

__all__ = [
    "FieldCtx", "FieldElem", "field_new",
    "ProjLine", "ProjPoint",
    "Arrangement", "SingularitySpectrum", "audit",
    "TripleSystem",
    "RealizationProblem", "RealizationResult", "realize_over",
]
