"""Stochastic graphlet embedding for graph classification."""

from .embedding import (
    GraphletEmbedding,
    Vocabulary,
    build_vocabulary,
    combine_orders,
    embed_dataset,
    embed_graph,
)
from .graph import AttributedGraph, Graphlet, build_graph, perturb_edges
from .hashing import HashFunction, collision_rate, enumerate_connected_graphs, hash_code
from .io import GraphDataset, load_tu_dataset
from .sampler import SamplerConfig, parse_graphlets, sample_complexity

__all__ = [
    "AttributedGraph",
    "Graphlet",
    "GraphDataset",
    "GraphletEmbedding",
    "HashFunction",
    "SamplerConfig",
    "Vocabulary",
    "build_graph",
    "build_vocabulary",
    "collision_rate",
    "combine_orders",
    "embed_dataset",
    "embed_graph",
    "enumerate_connected_graphs",
    "hash_code",
    "load_tu_dataset",
    "parse_graphlets",
    "perturb_edges",
    "sample_complexity",
]

__version__ = "0.1.0"
