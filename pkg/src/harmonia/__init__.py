"""Möbius structures on the circle: harmonic pairs, lines, projections and zig-zag paths."""

from .axioms import (AxiomReport, SeventupleSample, check_increment, check_monotone, check_nonzero,
                     check_ptolemaic, sample_increment_tuple)
from .circle import Arc, CirclePoint, PointPair, cyclic_order, pair_separates_pairs, pairs_separate, strong_causal
from .errors import (DegenerateConfiguration, HarmoniaError, MonotonicityFailure, NoCommonPerpendicular,
                     NotCollinear, NotOnLine, SamplerStarvation)
from .harmonic import (HarmonicPair, HmPoint, conjugate, embed_e, harmonic_pair_through, harmonic_residual,
                       involution_j, pr1, pr2, reflection)
from .lines import Line, Segment, common_perpendicular, line_coord, line_distance, project_point
from .moebius import CrossRatioTriple, MoebiusStructure, SemiMetricSpec, Tolerances
from .projections import (ProjectionResult, equal_ratio_projection, midpoint_projection, monotone_family_check,
                          s_projection)
from .zigzag import DeltaEstimate, ZZPath, closed_path_check, connect_five, delta_upper, verify_geodesic

__version__ = "0.1.0"
