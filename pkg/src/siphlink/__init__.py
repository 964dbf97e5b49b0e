"""Link-budget models and design-space exploration for DWDM silicon-photonic interposer links."""

from .budget import (
    BudgetEvaluation,
    LinkGeometry,
    LossBreakdown,
    PenaltyBreakdown,
    channel_spacing,
    evaluate_budget,
    filter_array_penalty,
    insertion_loss,
    lorentzian_drop,
    modulator_array_penalty,
    opb_per_waveguide,
    opb_per_wavelength,
)
from .explorer import SweepResult, ViabilityClass, ViabilityGrid, build_grid, classify, sweep
from .optimizer import (
    EnergyModel,
    OptimumDuplet,
    SearchSpace,
    brute_force_optimum,
    energy_per_bit,
    error_function,
    optimize,
)
from .platforms import (
    FabricationPlatform,
    LinkVariant,
    PathwaySet,
    apply_pathways,
    builtin_platforms,
    enumerate_variants,
    platform_by_name,
)

__version__ = "0.1.0"
