import math

import pytest

import rfcharge


def test_link_budget_round_trip():
    assert rfcharge.dbm_to_watt(30.0) == pytest.approx(1.0)
    assert rfcharge.watt_to_dbm(1e-5) == pytest.approx(-20.0)
    lam = rfcharge.wavelength(915e6)
    r = rfcharge.energy_radius(1.0, 1.64, 1.0, lam, 1e-5)
    assert rfcharge.received_power(1.0, 1.64, 1.0, lam, r) == pytest.approx(1e-5, rel=1e-12)


def test_regulatory_limits():
    assert rfcharge.max_conducted_power(14.51) == pytest.approx(0.631, rel=1e-3)
    assert rfcharge.max_conducted_power(2.15) == pytest.approx(1.0)
    assert rfcharge.max_beams() == 6
    assert rfcharge.off_axis_factor(3, 0.0) == pytest.approx(1.0)


def test_feasibility_table():
    rows = rfcharge.feasibility_table()
    assert len(rows) == 16
    first = rows[0]
    assert first["mode"] == "omni"
    assert first["band_hz"] == pytest.approx(915e6)
    assert first["harvested_uw"] == pytest.approx(11.17, rel=0.01)
    na = [r for r in rows if r["support_time_min"] is None]
    assert len(na) == 7
    check = rfcharge.reference_check()
    assert check["na_mismatches"] == 0
    assert check["max_support_time_deviation"] <= 0.02


def test_torus_and_strauss():
    assert rfcharge.torus_distance((1.0, 1.0), (499.0, 1.0)) == pytest.approx(2.0)
    pts = rfcharge.sample_strauss(n=15, gamma=0.0, seed=3, burn_in=200)
    assert len(pts) == 15
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            assert rfcharge.torus_distance(pts[i], pts[j]) >= 50.0


def test_mobility_generators():
    x = rfcharge.fgn(0.9, 4096, seed=5)
    assert len(x) == 4096
    assert rfcharge.fgn(0.9, 4096, seed=5) == x
    steps = rfcharge.levy_step_lengths(1.5, 20000, seed=2)
    assert sum(steps) / len(steps) == pytest.approx(3.0 / 3.6, rel=0.05)


def test_simulation_zero_sbs_oracle():
    m = rfcharge.simulate({
        "deployment.n_sbs": "0",
        "users.count": "50",
        "sim.duration_s": "4000",
        "sim.replications": "2",
        "users.discharge_rates_uw": "5",
    })
    assert m["andot_mean"][0] == pytest.approx(1e-2 / (2 * 5e-6 * 4000), rel=0.02)
    assert m["regulatory_violations"] == 0
    assert m["user_collection_rates_w"] == []


def test_simulation_summary_and_errors():
    m = rfcharge.simulate({"users.count": "20", "sim.duration_s": "2000",
                           "sim.replications": "1"})
    assert len(m["andot_mean"]) == 3
    assert all(0.0 <= a <= 1.0 for a in m["andot_mean"])
    assert m["max_active_beams"] <= 6
    assert math.isfinite(m["receiving_fraction"])
    with pytest.raises(ValueError, match="no.such"):
        rfcharge.simulate({"no.such": "1"})
