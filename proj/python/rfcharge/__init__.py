"""RF wireless charging of wearables from small base stations."""

from ._rfcharge import (
    config_keys,
    dbm_to_watt,
    energy_radius,
    feasibility_table,
    fgn,
    levy_step_lengths,
    max_beams,
    max_conducted_power,
    off_axis_factor,
    received_power,
    reference_check,
    sample_strauss,
    simulate,
    torus_distance,
    watt_to_dbm,
    wavelength,
)

__all__ = [
    "config_keys",
    "dbm_to_watt",
    "energy_radius",
    "feasibility_table",
    "fgn",
    "levy_step_lengths",
    "max_beams",
    "max_conducted_power",
    "off_axis_factor",
    "received_power",
    "reference_check",
    "sample_strauss",
    "simulate",
    "torus_distance",
    "watt_to_dbm",
    "wavelength",
]
