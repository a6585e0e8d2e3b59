"""Class-to-image attribute denoising on hyperbolic neighborhood graphs.

The heavy lifting lives in the compiled ``_core`` extension; this package
re-exports its public surface.
"""

from ._core import (
    Graph,
    PipelineError,
    build_graph,
    consistency,
    edge_weights,
    embed,
    evaluate,
    expand_class_attributes,
    generate_synthetic,
    hyperbolic_distance,
    load_graph,
    pairwise_distances,
    predict,
    propagate,
    refine,
    save_graph,
    train_map,
)

__all__ = [
    "Graph",
    "PipelineError",
    "build_graph",
    "consistency",
    "edge_weights",
    "embed",
    "evaluate",
    "expand_class_attributes",
    "generate_synthetic",
    "hyperbolic_distance",
    "load_graph",
    "pairwise_distances",
    "predict",
    "propagate",
    "refine",
    "save_graph",
    "train_map",
]

__version__ = "0.1.0"
