"""Python interface to the perron C++ library."""

from ._core import (
    LocalModel,
    PerronError,
    RateLadder,
    SpectralSplit,
    c0_convergence,
    descending_sphere,
    flow_exponential,
    foliation_audit,
    graph_F_inf,
    graph_G_inf,
    graph_G_T,
    graph_point_T,
    horizon_T2,
    integrate_forward,
    lipschitz_in_T,
    load_model,
    mixed_bvp_oracle,
    model_from_json,
    split,
    stable_graph_point,
    stable_point_oracle,
    unstable_graph_point,
)

__all__ = [name for name in dir() if not name.startswith("_")]
