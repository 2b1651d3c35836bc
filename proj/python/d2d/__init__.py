"""Simulator and solvers for D2D underlay cellular networks."""

from ._core import (
    battery_lifetime_hours,
    db_to_linear,
    dbm_to_mw,
    linear_to_db,
    los_probability,
    mw_to_dbm,
    noise_power_mw,
    ofpc_power_dbm,
    optimal_d2d_power,
    path_loss_db,
    PropagationParams,
    reverse_ica,
    run_experiment,
    slnr_beamformer,
    stackelberg_equilibrium,
    waterfill_best_response,
)

__all__ = [
    "battery_lifetime_hours",
    "db_to_linear",
    "dbm_to_mw",
    "linear_to_db",
    "los_probability",
    "mw_to_dbm",
    "noise_power_mw",
    "ofpc_power_dbm",
    "optimal_d2d_power",
    "path_loss_db",
    "PropagationParams",
    "reverse_ica",
    "run_experiment",
    "slnr_beamformer",
    "stackelberg_equilibrium",
    "waterfill_best_response",
]
