"""Free planar holonomy fields: exact loop traces and U(N) matrix models."""

__version__ = "0.1.0"

from .arrangement import (
    ArrangementError,
    EdgeWord,
    LassoBasis,
    PlanarGraph,
    SpanningTree,
    build_arrangement,
    decompose_loop,
    facial_lasso_basis,
    graph_from_json,
    graph_to_json,
    spanning_tree,
    trace_loop,
    winding_number,
)
from .braids import (
    BraidWord,
    FreeWord,
    Permutation,
    act_free_word,
    act_perm_tuple,
    act_tuple,
    perm_of_braid,
    symbol_tuple,
)
from .field import (
    BoundReport,
    FieldError,
    HolonomyContext,
    build_context,
    extension_bound_check,
    invariance_audit,
    loop_distance,
    master_trace,
)
from .geometry import Loop, LoopError, Point2, dyadic_approx, parse_loop, pt
from .levy import (
    CharTriplet,
    MomentSeries,
    SupportArc,
    TripletError,
    bm_support,
    first_moment,
    moments,
    sigma_series,
)
from .simulate import (
    SimConfig,
    SimError,
    TraceStats,
    gauss_skew,
    haar_unitary,
    levy_increment,
    mc_compare,
    sample_holonomy_trace,
    spectral_support_check,
)
from .words import (
    FixedMarginal,
    HaarMarginal,
    Marginals,
    SeriesMarginal,
    TripletMarginal,
    WordError,
    canon_word,
    format_word,
    loop_l2_distance,
    parse_word,
    word_moment,
    word_moment_nc,
)
