"""Cylinder Hastings-Levitov laboratory: slit maps, growth processes, checks."""

from .conformal import (
    CylinderParams,
    cyl_phi_delta,
    cyl_slit,
    cyl_slit_deriv,
    cylinder_dist,
    delta_of,
    halfplane_slit,
    map_f,
    map_f_inv,
    map_g,
    map_g_inv,
    reduce_to_fundamental,
)
from .process import (
    Event,
    EventLog,
    ProcessEvaluator,
    backward_chl_trajectory,
    drift,
    eval_backward_chl,
    eval_backward_shl,
    eval_disk_hl,
    eval_forward_chl,
    eval_forward_shl,
    restrict_log,
    sample_events,
)
from .quadrature import QuadratureResult, adaptive_quadrature
from .render import ParticleTrace, RenderStyle, export_csv, export_svg, trace_cluster
from .rng import SplitMix64, mix_seed
from .verify import (
    CheckResult,
    McSummary,
    RateFit,
    farfield_expansion_check,
    mc_coupling_convergence,
    mc_growth_check,
    mean_shift_target,
    quad_mean_shift,
    quad_squared_deriv,
    quad_squared_shift,
    run_suite,
    second_deriv_decay_check,
    shift_commutation_check,
    slit_convergence_rate,
)

__version__ = "0.1.0"
