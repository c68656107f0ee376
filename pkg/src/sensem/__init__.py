"""Simulation and optimization toolkit for secure IRS-assisted sensing
plus semantic communication downlinks.

The package models a monostatic radar base station that senses a target
through an intelligent reflecting surface while serving semantic
communication users under an eavesdropper, and provides the convex
machinery (SDR beamforming, SCA phase design, alternating optimization,
golden-section threshold search) to trade target-estimation accuracy
against the worst-case semantic secrecy rate.
"""

from sensem.config import (
    ConfigError,
    PathLossModel,
    SceneLayout,
    SystemConfig,
    db_to_linear,
    dbm_to_watt,
    default_layout,
    linear_to_db,
    watt_to_dbm,
)
from sensem.channels import (
    ChannelSet,
    EchoChannel,
    SensingScene,
    cascaded_echo,
    composite_eve_channel,
    composite_scu_channel,
    lift_composite,
    path_loss_gain,
    sensing_scene_from_layout,
    steering_derivative,
    steering_vector,
    synthesize_channels,
)
from sensem.metrics import (
    BcModel,
    BeamformerSet,
    CovarianceSet,
    DegenerateFimError,
    FimMatrix,
    NonIdentifiableError,
    PhaseProfile,
    SemanticModel,
    ThresholdPair,
    bc_rate,
    bc_secrecy_worst,
    covariance_from_beamformers,
    crb_theta_closed,
    crb_theta_fim,
    fim_theta,
    semantic_rate,
    semantic_similarity,
    sinr_eve,
    sinr_scu,
    sinr_thresholds,
    ssr_worst,
)
from sensem.sdp import (
    GrmError,
    SdpProblem,
    SdpSolution,
    SolverSettings,
    randomize_rank_one_v,
    randomize_rank_one_w,
    solve_sdp,
    validate_feasibility,
)
from sensem.optimizer import (
    AoResult,
    DesignSettings,
    GssResult,
    InfeasibleError,
    ParetoPoint,
    Scenario,
    ScaState,
    Sp2Precomp,
    alternating_optimize,
    golden_section,
    golden_section_rth,
    pareto_sweep,
    sca_linearize,
    sca_objective_parts,
    solve_baseline,
    solve_sp1,
    solve_sp2,
    sp2_precompute,
)

__version__ = "0.1.0"
