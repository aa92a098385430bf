"""Uniformization of Gromov hyperbolic graphs.

Hyperbolicity and starlikeness of finite metric graphs, the conformal
density e^{-ε d(·, base)}, uniformity of curves, rough isometries and the
transfer of uniform curves across them, plus the closed-form disk estimates
for ε > 2.
"""
from .disk import (
    annulus_bounds,
    circle_length,
    divergence_table,
    inequality_chain,
    required_constant_lower_bound,
    scaled_space_note,
)
from .formats import FormatError, format_graph, parse_graph, read_graph, write_graph
from .graph import (
    Curve,
    GraphError,
    MetricGraph,
    ParameterError,
    gen_comb,
    gen_hyperbolic_grid,
    gen_path,
    gen_tree,
    geodesic,
    gromov_product,
    hyperbolicity,
    perturb,
    starlikeness,
)
from .rough import (
    MapError,
    RoughMap,
    compose,
    identity_map,
    quasi_inverse,
    roughen,
    round_trip_gaps,
    verify_rough_map,
)
from .transfer import (
    ShortCurve,
    compare_d_eps,
    compare_delta_eps,
    discrete_sum,
    discretize,
    phi_sum_compare,
    transfer_uniform_curve,
)
from .uniformity import check_uniform_curve, estimate_domain_uniformity
from .uniformize import (
    UniformizedGraph,
    bilipschitz_report,
    d_eps,
    delta_eps,
    ell_eps,
    harnack_violations,
    j_metric,
    quasihyperbolic_dist,
    uniformize,
)

__version__ = "0.1.0"
