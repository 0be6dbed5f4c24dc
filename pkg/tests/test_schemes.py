import warnings

import numpy as np
import pytest

from lambdapair.hilbert import named_state
from lambdapair.rddi import couplings_for_pair
from lambdapair.schemes import (
    ValidityWarning,
    grid_points,
    make_preset,
    resonance_table,
    run_preset,
    run_pumping,
    run_raman,
    run_stirap,
    sweep,
)
from lambdapair.solvers import DegenerateSteadyStateError

pytestmark = pytest.mark.filterwarnings("ignore::lambdapair.schemes.ValidityWarning")


def test_preset_layout_relations():
    phi = 0.4
    chi13 = couplings_for_pair(make_preset("eq5", phi13=phi).system).chi13
    p = make_preset("eq5", phi13=phi)
    assert (p.scheme, p.target, p.alphas) == ("raman", "s12", (0.0, 0.0))
    assert p.nominal_deltas == (chi13 / 2, chi13 / 2)
    p = make_preset("eq6", phi13=phi)
    assert (p.target, p.alphas, p.nominal_deltas) == ("a12", (phi, 0.0), (-chi13 / 2, -chi13 / 2))
    p = make_preset("eq7", phi13=phi, f13=None)
    assert (p.scheme, p.target, p.alphas) == ("stirap", "a12", (0.0, np.pi))
    assert p.nominal_deltas == (chi13 / 2, chi13 / 2)
    p = make_preset("eq8sym", phi13=phi, freq_ratio=1.1)
    c = p.couplings()
    assert (p.alphas, p.nominal_deltas) == ((0.0, 0.0), (c.chi13 / 2, c.chi23 / 2))
    p = make_preset("eq8asym", phi13=phi, freq_ratio=1.1)
    c = p.couplings()
    assert (p.alphas, p.nominal_deltas) == ((np.pi, np.pi), (-c.chi13 / 2, -c.chi23 / 2))
    assert p.jitter.rate == 0.01


def test_preset_strength_knobs():
    p = make_preset("eq5", phi13=0.5)
    assert p.omega == pytest.approx(0.05 * abs(p.couplings().chi13))
    p = make_preset("eq7", pulse_area=3.0)
    assert p.tau_p == pytest.approx(0.05)
    assert p.omega == pytest.approx(60.0)
    assert make_preset("eq7", omega=20.0).pulse_area == pytest.approx(1.0)
    with pytest.raises(ValueError):
        make_preset("eq7", omega=1.0, pulse_area=2.0)
    with pytest.raises(ValueError):
        make_preset("eq5", bogus=1)
    with pytest.raises(ValueError):
        make_preset("eq9")


def test_preset_round_trip():
    p = make_preset("eq8asym", phi13=0.7, omega=0.01, geometry={"e1": [1, 0, 0], "e2": [1, 0, 0]})
    d = p.to_dict()
    assert make_preset(d.pop("name"), **d) == p


def test_resonance_table_doublet_splitting():
    table = resonance_table(make_preset("eq5", f13=10.0))
    to_s = table.find("13", "11", "s13").frequency
    to_a = table.find("13", "11", "a13").frequency
    assert to_s - to_a == pytest.approx(20.0, abs=1e-9)


def test_resonance_table_symmetry_selection():
    table = resonance_table(make_preset("eq5", phi13=0.5))
    assert abs(table.find("13", "11", "a13").element) < 1e-12
    assert abs(table.find("13", "11", "s13").element) > 0


def test_resonance_table_running_wave_element():
    phi = 0.3
    p = make_preset("eq6", phi13=phi)
    element = abs(resonance_table(p).find("13", "11", "a13").element)
    # |Omega1 - Omega2| / 2 = Omega sin(phi/2); with normalized Dicke states the
    # element carries an extra 1/sqrt(2)
    assert element == pytest.approx(p.omega * np.sin(phi / 2) / np.sqrt(2), rel=1e-12)
    assert element * np.sqrt(2) == pytest.approx(abs(p.omega * np.exp(1j * phi) - p.omega) / 2, rel=1e-12)


def test_auto_resonance_doubles_nominal_detuning():
    for name in ("eq5", "eq6", "eq7", "eq8sym", "eq8asym"):
        p = make_preset(name, phi13=0.5, f13=None)
        np.testing.assert_allclose(p.deltas(), 2 * np.asarray(p.nominal_deltas), rtol=1e-12)
        off = make_preset(name, phi13=0.5, f13=None, auto_resonance=False)
        assert off.deltas() == off.nominal_deltas


def test_auto_resonance_is_resonant():
    p = make_preset("eq7", phi13=0.5, f13=None)
    d13, d23 = p.deltas()
    h = p.drive(omegas=(0.0, 0.0))
    from lambdapair.dynamics import build_hamiltonian

    h = build_hamiltonian(h, p.couplings())
    e = {lbl: np.real(named_state(lbl).conj() @ h @ named_state(lbl)) for lbl in ("11", "s13", "a12")}
    assert e["11"] == pytest.approx(e["s13"], abs=1e-12)
    assert e["11"] == pytest.approx(e["a12"], abs=1e-12)


def test_raman_fidelity_grows_as_atoms_approach():
    fids = [run_raman(make_preset("eq5", phi13=phi)).final_fidelity for phi in (1.0, 0.5, 0.25, 0.125)]
    assert all(b > a for a, b in zip(fids, fids[1:])), fids
    assert fids[-1] >= 0.8


def test_raman_decay_only_lowers_fidelity():
    for ratio in (0.05, 0.02, 0.01):
        lossy = run_raman(make_preset("eq5", phi13=0.25, omega_ratio=ratio)).final_fidelity
        coherent = run_raman(make_preset("eq5", phi13=0.25, omega_ratio=ratio, dissipation=False)).final_fidelity
        assert lossy <= coherent
    assert coherent > 0.9999


def test_raman_antisymmetric_variant():
    r = run_raman(make_preset("eq6", phi13=0.125))
    assert r.target == "a12"
    assert 0 < r.final_fidelity < 1
    assert r.trajectory.validity()["trace_drift"] < 1e-7


def test_raman_weak_drive_warning():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ValidityWarning)
        run_raman(make_preset("eq5", phi13=0.5, omega_ratio=0.5))
    assert any(issubclass(w.category, ValidityWarning) for w in caught)


def test_stirap_norm_and_truncation():
    r5 = run_stirap(make_preset("eq7", pulse_area=5.0))
    assert r5.diagnostics["norm_drift"] < 1e-9
    r7 = run_stirap(make_preset("eq7", pulse_area=5.0, truncation=7.0))
    assert abs(r5.final_fidelity - r7.final_fidelity) < 1e-5


def test_stirap_strong_splitting():
    assert run_stirap(make_preset("eq7", f13=1000.0, pulse_area=5.0)).final_fidelity >= 0.95


def test_stirap_master_mode():
    r = run_stirap(make_preset("eq7", stirap_mode="master"))
    v = r.trajectory.validity()
    assert v["trace_drift"] < 1e-7 and v["hermiticity"] < 1e-9 and v["min_eigenvalue"] > -1e-7
    assert 0.9 < r.final_fidelity < run_stirap(make_preset("eq7")).final_fidelity


def test_pumping_benchmark():
    r = run_pumping(make_preset("eq8asym", phi13=1.0, omega=0.001))
    assert r.final_fidelity == pytest.approx(0.8, abs=0.1)
    assert r.diagnostics["residual"] < 1e-10 * r.diagnostics["generator_norm"]


def test_pumping_rabi_dependence():
    fid = {om: run_pumping(make_preset("eq8asym", phi13=0.5, omega=om)).final_fidelity
           for om in (0.001, 0.01, 0.1)}
    assert fid[0.001] >= fid[0.01] >= fid[0.1]
    chi = make_preset("eq8asym", phi13=0.5).couplings().chi13
    strong = run_pumping(make_preset("eq8asym", phi13=0.5, omega=chi)).final_fidelity
    assert fid[0.001] - strong > 0.3


def test_pumping_without_jitter_is_degenerate():
    with pytest.raises(DegenerateSteadyStateError) as err:
        run_pumping(make_preset("eq8asym", jitter_rate=0.0, omega=0.0))
    assert err.value.dimension > 1


def test_pumping_relaxation_trajectory():
    r = run_pumping(make_preset("eq8asym", omega=0.3, relax_time=20.0))
    assert r.trajectory is not None
    assert r.trajectory.observables["F_a12"][-1] > 0
    assert r.diagnostics["trace_drift"] < 1e-7


def test_scheme_mismatch():
    with pytest.raises(ValueError):
        run_stirap(make_preset("eq5"))
    with pytest.raises(ValueError):
        run_pumping(make_preset("eq7"))


def test_grid_points_order():
    pts = grid_points({"phi13": [1, 2], "omega": [0.1, 0.2, 0.3]})
    assert [tuple(p.values()) for p in pts] == [(1, 0.1), (1, 0.2), (1, 0.3), (2, 0.1), (2, 0.2), (2, 0.3)]
    assert grid_points({}) == []
    assert grid_points({"phi13": []}) == []


def test_single_point_sweep_matches_run():
    row, = sweep("pumping", {"phi13": [0.8]})
    assert row["final_fidelity"] == run_preset(make_preset("eq8asym", phi13=0.8)).final_fidelity
    row, = sweep("eq7", {"pulse_area": [4.0]})
    assert row["final_fidelity"] == run_preset(make_preset("eq7", pulse_area=4.0)).final_fidelity


def test_sweep_parallel_matches_serial():
    grid = {"phi13": [0.5, 1.0], "omega": [0.001, 0.01]}
    assert sweep("pumping", grid, jobs=1) == sweep("pumping", grid, jobs=4)


def test_sweep_records_failures():
    rows = sweep("pumping", {"omega": [0.0, 0.001]}, base={"jitter_rate": 0.0})
    assert "DegenerateSteadyStateError" in rows[0]["error"] and rows[0]["final_fidelity"] is None
    assert rows[1]["error"] == "" and rows[1]["final_fidelity"] is not None


def test_sweep_rejects_unknown_axis():
    with pytest.raises(ValueError):
        sweep("pumping", {"colour": [1]})


def test_pumping_distance_sweep_shape():
    phis = np.linspace(0.3, 2.0, 20)
    rows = sweep("pumping", {"phi13": list(phis)})
    fids = np.array([r["final_fidelity"] for r in rows])
    assert fids[0] > 0.99
    # flat near unity at short distance, then falling off
    assert np.all(np.diff(fids) <= 1e-9)
    assert fids[-1] < 0.7
