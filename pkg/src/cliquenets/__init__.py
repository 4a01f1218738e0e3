"""Growth and analysis of networks assembled from cliques with defect bonds."""

from .core import (
    AssemblyState,
    BondType,
    LabeledGraph,
    PlacedSimplex,
    SimplexSpec,
    defect_concentration,
    face_subsets,
)
from .growth import GrowthConfig, grow

__all__ = [
    "AssemblyState",
    "BondType",
    "GrowthConfig",
    "LabeledGraph",
    "PlacedSimplex",
    "SimplexSpec",
    "defect_concentration",
    "face_subsets",
    "grow",
]

__version__ = "0.1.0"
