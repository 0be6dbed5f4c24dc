import numpy as np
import pytest

from conftest import random_density
from lambdapair.dynamics import (
    Constant,
    DriveSpec,
    Gaussian,
    JitterSpec,
    Rectangular,
    TransitionDrive,
    apply_dissipator,
    apply_jitter,
    assemble_liouvillian,
    build_hamiltonian,
    envelope_from_dict,
    pulse_envelope,
)
from lambdapair.hilbert import DICKE_LABELS, as_density, dicke_basis, flat_index, ket, named_state
from lambdapair.rddi import RDDICouplings, SystemConfig, couplings_for_pair
from lambdapair.schemes import make_preset, stirap_envelopes

VEC_I = np.eye(9).reshape(-1)


def couplings(f13=3.0, f23=2.0, g13=0.7, g23=0.6, gamma13=1.0, gamma23=0.8):
    return RDDICouplings.from_dimensionless(f13, f23, g13, g23, gamma13, gamma23)


def random_drive(rng, time_dependent=False):
    lasers = []
    for _ in range(2):
        om = rng.uniform(0, 2)
        env = Gaussian(om, rng.uniform(0.5, 2), rng.uniform(-1, 1)) if time_dependent else Constant(om)
        lasers.append(TransitionDrive(env, rng.uniform(0, 2 * np.pi), rng.uniform(-3, 3)))
    return DriveSpec(*lasers)


def direct_generator(rho, drive, c, config, jitter, t=0.0):
    h = build_hamiltonian(drive, c, t)
    return -1j * (h @ rho - rho @ h) + apply_dissipator(rho, c, config) + apply_jitter(rho, jitter)


def test_rddi_spectrum_without_drive():
    c = couplings()
    h = build_hamiltonian(DriveSpec(), c)
    expected = {"s13": c.chi13, "a13": -c.chi13, "s23": c.chi23, "a23": -c.chi23}
    for label in DICKE_LABELS:
        v = named_state(label)
        np.testing.assert_allclose(h @ v, expected.get(label, 0.0) * v, atol=1e-12)
    assert sorted(np.linalg.eigvalsh(h)) == pytest.approx(
        sorted([c.chi13, -c.chi13, c.chi23, -c.chi23, 0, 0, 0, 0, 0]), abs=1e-12
    )


def test_hamiltonian_hermitian(rng):
    for _ in range(20):
        h = build_hamiltonian(random_drive(rng, True), couplings(), t=rng.uniform(-2, 2))
        np.testing.assert_allclose(h, h.conj().T, atol=1e-12)


def test_symmetric_drive_matrix_elements():
    om = 0.8
    h = build_hamiltonian(DriveSpec(TransitionDrive.constant(om, 0.0)), couplings())
    assert np.vdot(named_state("s13"), h @ ket(1, 1)) == pytest.approx(np.sqrt(2) * om / 2, abs=1e-15)
    assert abs(np.vdot(named_state("a13"), h @ ket(1, 1))) < 1e-15


def test_phase_difference_matrix_element():
    om, alpha = 1.0, 0.9
    h = build_hamiltonian(DriveSpec(TransitionDrive.constant(om, alpha)), couplings())
    # |Omega1 - Omega2| / (2 sqrt 2) = Omega sin(alpha/2) / sqrt 2
    assert abs(np.vdot(named_state("a13"), h @ ket(1, 1))) == pytest.approx(
        om * np.sin(alpha / 2) / np.sqrt(2), abs=1e-14
    )


def test_detuning_counted_once():
    h = build_hamiltonian(DriveSpec(TransitionDrive.constant(0, 0, 0.3), TransitionDrive.constant(0, 0, 0.5)),
                          RDDICouplings.from_dimensionless(0, 0, 0, 0))
    assert np.diag(h).real[flat_index(1, 1)] == pytest.approx(0.6)
    assert np.diag(h).real[flat_index(1, 2)] == pytest.approx(0.8)
    assert np.diag(h).real[flat_index(3, 3)] == 0.0


def test_dissipator_doubly_excited_decay():
    config = SystemConfig(gamma13=1.0, gamma23=0.8, phi13=0.4)
    c = couplings_for_pair(config)
    out = apply_dissipator(as_density(ket(3, 3)), c, config)
    assert out[8, 8].real == pytest.approx(-2 * (1.0 + 0.8), abs=1e-12)


def test_dissipator_annihilates_lower_states():
    config = SystemConfig(phi13=0.4)
    c = couplings_for_pair(config)
    out = apply_dissipator(as_density(named_state("a12")), c, config)
    np.testing.assert_array_equal(out, np.zeros((9, 9)))


def test_dissipator_trace_and_hermiticity(rng):
    config = SystemConfig(gamma23=0.6, phi13=0.9)
    c = couplings_for_pair(config)
    for _ in range(20):
        out = apply_dissipator(random_density(rng), c, config)
        assert abs(np.trace(out)) < 1e-12
        np.testing.assert_allclose(out, out.conj().T, atol=1e-12)


def test_jitter_diagonal_states_untouched(rng):
    rho = np.diag(rng.dirichlet(np.ones(9))).astype(complex)
    for mode in ("collective", "independent"):
        np.testing.assert_array_equal(apply_jitter(rho, JitterSpec(0.3, mode)), np.zeros((9, 9)))


def test_jitter_coherence_rates():
    rate = 0.01
    rho = np.zeros((9, 9), dtype=complex)
    i11, i12, i21 = flat_index(1, 1), flat_index(1, 2), flat_index(2, 1)
    rho[i12, i11] = 1.0
    rho[i12, i21] = 1.0
    out = apply_jitter(rho, JitterSpec(rate))
    assert out[i12, i11] == pytest.approx(-4 * rate)
    assert out[i12, i21] == 0.0
    # independent mode: only atom 2 changes between |12> and |11>, (z diff)^2 = 4
    out = apply_jitter(rho, JitterSpec(rate, "independent"))
    assert out[i12, i11] == pytest.approx(-4 * rate)
    assert out[i12, i21] == pytest.approx(-8 * rate)


def test_liouvillian_matches_direct_formula(rng):
    config = SystemConfig(gamma23=0.7, phi13=0.6)
    c = couplings_for_pair(config)
    for n in range(50):
        drive = random_drive(rng)
        jitter = JitterSpec(rng.uniform(0, 0.1), "collective" if n % 2 else "independent")
        gen = assemble_liouvillian(drive, c, config, jitter)
        rho = random_density(rng)
        np.testing.assert_allclose(gen.apply(rho), direct_generator(rho, drive, c, config, jitter),
                                   rtol=0, atol=1e-12)


def test_time_dependent_liouvillian(rng):
    config = SystemConfig(phi13=0.6)
    c = couplings_for_pair(config)
    drive = random_drive(rng, time_dependent=True)
    gen = assemble_liouvillian(drive, c, config, JitterSpec(0.01))
    assert gen.time_dependent
    with pytest.raises(ValueError):
        gen.matrix
    for t in np.linspace(-2, 2, 7):
        rho = random_density(rng)
        np.testing.assert_allclose(gen.apply(rho, t),
                                   direct_generator(rho, drive, c, config, JitterSpec(0.01), t),
                                   atol=1e-12)


def test_trace_preservation(rng):
    for _ in range(10):
        config = SystemConfig(gamma13=rng.uniform(0.5, 2), gamma23=rng.uniform(0, 2),
                              phi13=rng.uniform(0.1, 3))
        c = couplings_for_pair(config)
        gen = assemble_liouvillian(random_drive(rng), c, config, JitterSpec(rng.uniform(0, 1)))
        scale = np.linalg.norm(gen.matrix, 2)
        assert np.max(np.abs(VEC_I.conj() @ gen.matrix)) / scale < 1e-10
        for _ in range(10):
            assert abs(np.trace(gen.apply(random_density(rng)))) / scale < 1e-12


def test_free_generator_keeps_lower_populations(rng):
    config = SystemConfig(phi13=1.0)
    gen = assemble_liouvillian(DriveSpec(), RDDICouplings.from_dimensionless(0, 0, 0, 0), config)
    lower = [flat_index(a, b) for a in (1, 2) for b in (1, 2)]
    rho = np.zeros((9, 9), dtype=complex)
    rho[lower, lower] = rng.dirichlet(np.ones(4))
    np.testing.assert_array_equal(gen.apply(rho), np.zeros((9, 9)))


def test_dicke_limit_symmetric_sector_invariant():
    c = RDDICouplings.from_dimensionless(5.0, 5.0, 1.0, 1.0)
    drive = DriveSpec(TransitionDrive.constant(0.7, 0.0, 0.3), TransitionDrive.constant(0.4, 0.0, -0.2))
    u = dicke_basis()
    h = u.conj().T @ build_hamiltonian(drive, c) @ u
    sym = [n for n, lbl in enumerate(DICKE_LABELS) if not lbl.startswith("a")]
    anti = [n for n, lbl in enumerate(DICKE_LABELS) if lbl.startswith("a")]
    assert np.max(np.abs(h[np.ix_(anti, sym)])) < 1e-12


def test_doublet_structure():
    c = couplings()
    h = build_hamiltonian(DriveSpec(), c)
    e = {lbl: np.vdot(named_state(lbl), h @ named_state(lbl)).real for lbl in DICKE_LABELS}
    assert e["s13"] - e["a13"] == pytest.approx(2 * c.chi13)
    assert e["s23"] - e["a23"] == pytest.approx(2 * c.chi23)
    assert e["s12"] == e["a12"]


def test_envelopes():
    g = Gaussian(2.0, 0.5, 1.0)
    assert pulse_envelope(g, 1.0) == 2.0
    assert pulse_envelope(g, 1.0 + 5 * 0.5) < 4e-6 * 2.0
    assert pulse_envelope(g, 1.0 - 5 * 0.5) < 4e-6 * 2.0
    r = Rectangular(1.5, 0.0, 2.0)
    assert pulse_envelope(r, 1.0) == 1.5 and pulse_envelope(r, 2.5) == 0.0
    assert pulse_envelope({"kind": "constant", "amplitude": 0.3}, 7.0) == 0.3
    assert envelope_from_dict(g.to_dict()) == g
    with pytest.raises(ValueError):
        envelope_from_dict({"kind": "sawtooth"})
    with pytest.raises(ValueError):
        Gaussian(1.0, 0.0)


def test_stirap_stokes_precedes_pump():
    preset = make_preset("eq7")
    pump, stokes, span = stirap_envelopes(preset)
    assert pump.center - stokes.center == pytest.approx(preset.tau_p)
    assert pump.width == stokes.width == preset.tau_p
    assert span[0] == stokes.center - 5 * preset.tau_p
    assert span[1] == pump.center + 5 * preset.tau_p


def test_negative_amplitude_rejected():
    with pytest.raises(ValueError):
        TransitionDrive.constant(-1.0)
    with pytest.raises(ValueError):
        JitterSpec(-0.1)
    with pytest.raises(ValueError):
        JitterSpec(0.1, "global")
