"""Spatio-temporal small area estimation for panel direct estimates.

The compiled core exposes the main operations: areal-graph and kernel
algebra, the Gibbs/Metropolis sampler (``fit``), posterior functionals
(``trend``, ``change``, ``aggregate``, ``summarize``), WAIC comparison, and
the synthetic-population generator. ``fit`` returns draw matrices whose mu
columns are area-major: ``draws["mu"].reshape(M, J, T)`` recovers the panel
layout.
"""

from ._core import (
    AreaGraph,
    StfhError,
    aggregate,
    ar1_logdet,
    build_area_graph,
    car_logdet_precision,
    change,
    direct_mean,
    direct_variance,
    effective_sample_size,
    elpd_compare,
    fit,
    generate_population,
    kron_logdet,
    kron_quadform,
    split_rhat,
    summarize,
    trend,
    waic,
)

__all__ = [
    "AreaGraph",
    "StfhError",
    "aggregate",
    "ar1_logdet",
    "build_area_graph",
    "car_logdet_precision",
    "change",
    "direct_mean",
    "direct_variance",
    "effective_sample_size",
    "elpd_compare",
    "fit",
    "generate_population",
    "grid_edges",
    "kron_logdet",
    "kron_quadform",
    "split_rhat",
    "summarize",
    "trend",
    "waic",
]

__version__ = "0.1.0"


def grid_edges(side):
    """Rook-adjacency edge list (1-based) for a side x side grid of areas."""
    edges = []
    for y in range(side):
        for x in range(side):
            node = y * side + x + 1
            if x + 1 < side:
                edges.append((node, node + 1))
            if y + 1 < side:
                edges.append((node, node + side))
    return edges
