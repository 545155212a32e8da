"""Dynamical Markov and Lagrange spectra for symbolic horseshoes.

Modules:

- :mod:`symbolic`      subshifts of finite type, periodic orbits, higher-block graphs
- :mod:`geometry`      affine and Gauss Cantor models, dimension estimators
- :mod:`spectra`       height tables, orbit values, pruning, spectra slices, D_u/D_s curves
- :mod:`suspension`    suspension flows, fibre maxima, flow-to-map reduction
- :mod:`perturbation`  cubic perturbations and genericity diagnostics
- :mod:`config`, :mod:`commands`, :mod:`cli`  configuration and the command line
"""
from __future__ import annotations

from .errors import (
    BoundExceeded,
    ConfigError,
    DegenerateSet,
    DomainError,
    EmptyPrune,
    EmptySystem,
    HorseshoeError,
    InadmissibleWord,
    NoCycle,
)
from .geometry import (
    AffineModel,
    DimensionEstimate,
    GaussModel,
    box_count_dimension,
    cylinder_interval,
    dimension_counting,
    dimension_pressure,
    projection_dimension_experiment,
    scale_front,
    unstable_scale,
)
from .kernels import BACKEND
from .perturbation import (
    PerturbationParams,
    find_regular_params,
    perturb_fiber,
    regularity_scan,
    transversality_scan,
    unique_maximizer_fraction,
)
from .spectra import (
    DimensionCurve,
    HeightTable,
    PrunedSystem,
    SpectrumSlice,
    TwoSidedPoint,
    build_table,
    du_curve,
    geometric_table,
    lagrange_value,
    markov_value,
    prune_below,
    select_subhorseshoe,
    slice_dimension,
    spectrum_slice,
)
from .suspension import (
    FiberProfile,
    RoofFunction,
    SuspensionPoint,
    fiber_max,
    flow_lagrange,
    height_table_from_suspension,
    suspension_dimension_check,
)
from .symbolic import (
    BlockGraph,
    PeriodicOrbit,
    Sft,
    enumerate_words,
    full_shift,
    golden_mean_shift,
    higher_block,
    periodic_orbits,
    scc_decompose,
    validate_sft,
)

__version__ = "0.1.0"
