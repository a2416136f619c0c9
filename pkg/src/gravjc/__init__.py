"""Non-Markovian phase-damped Jaynes-Cummings simulator.

A two-level atom moving through a single-mode cavity in a homogeneous
gravitational field, with phase damping whose memory enters through a
quadruple-commutator dissipator.  The conserved excitation number reduces
everything to 2x2 blocks, which four engines evolve and cross-validate.
"""

__version__ = "0.1.0"

from .blocks import (
    BlockedDensity,
    BlockSpectrum,
    block_hamiltonian,
    block_propagator,
    block_spectrum,
    initial_blocked_density,
    rabi_frequency,
)
from .config import ConfigError, RunConfig, parse_config
from .engines import (
    EngineDivergenceError,
    EngineError,
    EngineMode,
    SeriesControls,
    StepSizeError,
    dephase_blocks,
    evolve_blocked,
    evolve_direct,
    evolve_series_literal,
    hermitize,
    kernel_exact,
    kernel_paper,
    quartic_rate,
    renormalize,
)
from .observables import (
    ObservableSeries,
    analytic_inversion_undamped,
    mandel_q,
    momentum_average,
    photon_distribution,
    population_inversion,
)
from .params import (
    MomentumNode,
    ParameterError,
    PhysicalParams,
    ScaledParams,
    coherent_weights,
    doppler_detuning,
    gauss_quadrature_nodes,
    validate_and_scale,
)
from .runner import compare_engines, run_scenario

__all__ = [
    "__version__",
    "BlockedDensity",
    "BlockSpectrum",
    "ConfigError",
    "EngineDivergenceError",
    "EngineError",
    "EngineMode",
    "MomentumNode",
    "ObservableSeries",
    "ParameterError",
    "PhysicalParams",
    "RunConfig",
    "ScaledParams",
    "SeriesControls",
    "StepSizeError",
    "analytic_inversion_undamped",
    "block_hamiltonian",
    "block_propagator",
    "block_spectrum",
    "coherent_weights",
    "compare_engines",
    "dephase_blocks",
    "doppler_detuning",
    "evolve_blocked",
    "evolve_direct",
    "evolve_series_literal",
    "gauss_quadrature_nodes",
    "hermitize",
    "initial_blocked_density",
    "kernel_exact",
    "kernel_paper",
    "mandel_q",
    "momentum_average",
    "parse_config",
    "photon_distribution",
    "population_inversion",
    "quartic_rate",
    "rabi_frequency",
    "renormalize",
    "run_scenario",
    "validate_and_scale",
]
