"""Recognition of C-shaped building patterns across levels of detail."""

from .errors import CPatternError
from .geometry import Polygon, compute_sbr, overlap_area, rectangularity
from .kgraph import PropertyGraph
from .pipeline import Model, build_graph, recognize, run
from .reasoner import PatternGroup, baseline_recognize, enrich_fixpoint, recognize_c_patterns
from .relations import Thresholds, allen_classify, decode_inter_t, encode_inter_t
from .scene import Building, Road, Scene

__all__ = [
    "Building", "CPatternError", "Model", "PatternGroup", "Polygon", "PropertyGraph", "Road", "Scene",
    "Thresholds", "allen_classify", "baseline_recognize", "build_graph", "compute_sbr", "decode_inter_t",
    "encode_inter_t", "enrich_fixpoint", "overlap_area", "recognize", "recognize_c_patterns", "rectangularity",
    "run",
]
__version__ = "0.1.0"
