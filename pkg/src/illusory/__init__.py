"""Illusory-contour analysis: first-order contour energies, mechanized
local-minimality verification, and supervised level-set completion."""

from .geometry import (
    Configuration,
    Contour,
    GeometryError,
    JunctionRecord,
    KinkRecord,
    Region,
    decompose,
    is_admissible,
    junction_set,
    kink_set,
    min_spans,
)
from .energy import (
    EnergyWeights,
    MinimalityReport,
    check_structure,
    critical_ratio,
    energy_contour_bundle,
    energy_mixture,
    energy_object,
    verify_local_minimum,
)
from .scene import (
    ScalarField,
    SceneError,
    SceneSpec,
    edge_indicator,
    generate,
    mollify,
    rasterize,
    relaxed_energy,
    speed_field,
)
from .levelset import EvolutionError, EvolutionParams, LevelSetState, evolve_step, initialize, run
from .extraction import ExtractionResult, classify, hausdorff, zero_contour

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
