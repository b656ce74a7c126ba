"""Geodesic loop counts, ball volumes and entropy estimates on flat tori and hyperbolic surfaces."""

__version__ = "0.1.0"

from .bounds import (
    BoundReport,
    CountSeries,
    EntropyReport,
    blichfeldt_lower_bound,
    check_blichfeldt,
    entropy_estimate,
    euclidean_ball_volume,
    hyperbolic_disk_area,
    knieper_report,
    sandwich_check,
)
from .flat import (
    LatticeModel,
    LatticeVector,
    WitnessReport,
    blichfeldt_witness,
    closed_geodesic_count_flat,
    enumerate_vectors,
    loop_count_flat,
    make_lattice,
    primitive_count_flat,
)
from .groups import (
    ConjClass,
    OrbitElement,
    closed_geodesic_count_free,
    count_with_base_point,
    cyclic_canonical,
    enumerate_orbit_ball,
    is_primitive_word,
    loop_count_hyp,
    reduce_word,
)
from .hyperbolic import (
    FuchsianModel,
    GroupMatrix,
    UhpPoint,
    classify_element,
    hyp_distance,
    mobius_apply,
    preset_genus2_octagon,
    preset_punctured_torus,
    translation_length,
)

__all__ = [
    "BoundReport",
    "CountSeries",
    "EntropyReport",
    "blichfeldt_lower_bound",
    "check_blichfeldt",
    "entropy_estimate",
    "euclidean_ball_volume",
    "hyperbolic_disk_area",
    "knieper_report",
    "sandwich_check",
    "LatticeModel",
    "LatticeVector",
    "WitnessReport",
    "blichfeldt_witness",
    "closed_geodesic_count_flat",
    "enumerate_vectors",
    "loop_count_flat",
    "make_lattice",
    "primitive_count_flat",
    "ConjClass",
    "OrbitElement",
    "closed_geodesic_count_free",
    "count_with_base_point",
    "cyclic_canonical",
    "enumerate_orbit_ball",
    "is_primitive_word",
    "loop_count_hyp",
    "reduce_word",
    "FuchsianModel",
    "GroupMatrix",
    "UhpPoint",
    "classify_element",
    "hyp_distance",
    "mobius_apply",
    "preset_genus2_octagon",
    "preset_punctured_torus",
    "translation_length",
]
