"""Topological spectra of orbital-angular-momentum biphoton states.

The package builds transverse vector fields from entangled qudit
amplitudes, measures how each field wraps the sphere or the disk,
collects the wrapping numbers of all operator triples into a spectrum,
and reconstructs density matrices from simulated coincidence counts so
the same spectrum can be read off measured data.
"""

from topospec.basis import BasisElement, RootPair, build_basis, cartan_weyl, nice_pairs
from topospec.fields import (
    GridSpec,
    TermField,
    TripleSpec,
    UnitField,
    classify_map,
    component_field,
    detect_nice_pair,
    term_field,
    triple_field,
)
from topospec.invariants import (
    CANONICAL_LABELS,
    QUAD_TOL,
    AnalyticWrap,
    WrappingResult,
    accidental_pairs,
    accidental_predict,
    canonical_field,
    canonical_label,
    glue,
    monopole_charge_area,
    monopole_charge_planar,
    singularity_class,
    singularity_class_label,
    wrapping_analytic_d3,
    wrapping_analytic_triple,
    wrapping_analytic_usual,
    wrapping_numeric,
)
from topospec.spectrum import (
    Capacity,
    DependencyReport,
    SimilarityScores,
    SpectrumEntry,
    TopologicalSpectrum,
    capacity,
    compute_spectrum,
    default_workers,
    dependency_scan,
    enumerate_triples,
    independent_count,
    read_spectrum_values,
    similarity,
    svg_bar_chart,
    triple_count,
    write_spectrum_csv,
    write_spectrum_json,
)
from topospec.states import (
    QuditState,
    SubspacePerturbation,
    inject_subspace,
    load_state,
    make_state,
    radial_profile,
    sample_perturbation,
    save_state,
)
from topospec.tomography import (
    BiphotonDensity,
    CoincidenceMatrix,
    Metrics,
    NoiseModel,
    ProjectionSet,
    ReconstructionResult,
    concurrence,
    epsilon_from_crosstalk,
    fidelity,
    load_density,
    metrics,
    projection_count,
    projection_set,
    purity,
    read_coincidences_csv,
    reconstruct,
    save_density,
    simulate_coincidences,
    spectrum_from_density,
    write_coincidences_csv,
)

__version__ = "0.1.0"

__all__ = [
    "AnalyticWrap",
    "BasisElement",
    "BiphotonDensity",
    "CANONICAL_LABELS",
    "Capacity",
    "CoincidenceMatrix",
    "DependencyReport",
    "GridSpec",
    "Metrics",
    "NoiseModel",
    "ProjectionSet",
    "QUAD_TOL",
    "QuditState",
    "ReconstructionResult",
    "RootPair",
    "SimilarityScores",
    "SpectrumEntry",
    "SubspacePerturbation",
    "TermField",
    "TopologicalSpectrum",
    "TripleSpec",
    "UnitField",
    "WrappingResult",
    "accidental_pairs",
    "accidental_predict",
    "build_basis",
    "canonical_field",
    "canonical_label",
    "capacity",
    "cartan_weyl",
    "classify_map",
    "component_field",
    "compute_spectrum",
    "concurrence",
    "default_workers",
    "dependency_scan",
    "detect_nice_pair",
    "enumerate_triples",
    "epsilon_from_crosstalk",
    "fidelity",
    "glue",
    "independent_count",
    "inject_subspace",
    "load_density",
    "load_state",
    "make_state",
    "metrics",
    "monopole_charge_area",
    "monopole_charge_planar",
    "nice_pairs",
    "projection_count",
    "projection_set",
    "purity",
    "radial_profile",
    "read_coincidences_csv",
    "read_spectrum_values",
    "reconstruct",
    "sample_perturbation",
    "save_density",
    "save_state",
    "similarity",
    "simulate_coincidences",
    "singularity_class",
    "singularity_class_label",
    "spectrum_from_density",
    "svg_bar_chart",
    "term_field",
    "triple_count",
    "triple_field",
    "wrapping_analytic_d3",
    "wrapping_analytic_triple",
    "wrapping_analytic_usual",
    "wrapping_numeric",
    "write_coincidences_csv",
    "write_spectrum_csv",
    "write_spectrum_json",
]
