"""Entanglement schemes: resonant Raman pulses, STIRAP, optical pumping.

Every scheme starts from |11> and targets a radiatively stable Dicke-like
state of the lower levels (s12 or a12).  Presets carry nominal laser
parameters (phases and +-chi/2 detunings); by default the drivers replace the
nominal detunings with exact resonances read off the two-atom spectrum.
"""

from __future__ import annotations

import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import product

import numpy as np

from lambdapair.dynamics import (
    Constant,
    DriveSpec,
    Gaussian,
    JitterSpec,
    TransitionDrive,
    assemble_liouvillian,
    drive_operator,
    hamiltonian_terms,
    static_hamiltonian,
)
from lambdapair.hilbert import DICKE_LABELS, DIM, dicke_basis, named_state, number_op
from lambdapair.rddi import (
    GeometryConfig,
    RDDICouplings,
    SystemConfig,
    coupling_g,
    couplings_for_pair,
)
from lambdapair.solvers import (
    DegenerateSteadyStateError,
    IntegratorConfig,
    Trajectory,
    propagate_density,
    propagate_state,
    steady_state,
)

TRACKED_STATES = ("s12", "a12", "s13", "a13")
# Omega / |chi13| above this triggers a ValidityWarning.
WEAK_DRIVE_RATIO = 0.2


class ValidityWarning(UserWarning):
    """Drive strength violates the weak-drive assumption of a preset."""


# --- presets ---------------------------------------------------------------


@dataclass(frozen=True)
class SchemePreset:
    name: str
    scheme: str
    target: str
    system: SystemConfig
    alphas: tuple[float, float]
    nominal_deltas: tuple[float, float]
    # (initial, final) eigenstate labels addressed by the 1<->3 and 2<->3 lasers
    addressed: tuple[tuple[str, str], tuple[str, str]]
    omega: float
    jitter: JitterSpec = field(default_factory=JitterSpec)
    auto_resonance: bool = True
    deltas_override: tuple[float, float] | None = None
    f13: float | None = None
    pulse_width: float | None = None
    pulse_delay: float | None = None
    truncation: float = 5.0
    stirap_mode: str = "schrodinger"
    dissipation: bool = True
    relax_time: float | None = None
    params: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.scheme not in ("raman", "stirap", "pumping"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.target not in ("s12", "a12"):
            raise ValueError(f"target must be 's12' or 'a12', got {self.target!r}")
        if not self.omega >= 0:
            raise ValueError(f"Rabi amplitude must be >= 0, got {self.omega}")
        if self.stirap_mode not in ("schrodinger", "master"):
            raise ValueError(f"stirap_mode must be 'schrodinger' or 'master', got {self.stirap_mode!r}")
        if self.pulse_width is not None and not self.pulse_width > 0:
            raise ValueError(f"pulse_width must be > 0, got {self.pulse_width}")
        if not self.truncation > 0:
            raise ValueError(f"truncation must be > 0, got {self.truncation}")

    def couplings(self) -> RDDICouplings:
        if self.f13 is None:
            return couplings_for_pair(self.system)
        # Fixed splitting on both transitions; collective decay still from geometry.
        s = self.system
        return RDDICouplings.from_dimensionless(
            f13=self.f13,
            f23=self.f13,
            g13=coupling_g(s.phi13, s.geometry),
            g23=coupling_g(s.phi23, s.geometry),
            gamma13=s.gamma13,
            gamma23=s.gamma23,
        )

    @property
    def tau_p(self) -> float:
        if self.pulse_width is not None:
            return self.pulse_width
        return 0.1 / (self.system.gamma13 + self.system.gamma23)

    @property
    def pulse_area(self) -> float:
        return self.omega * self.tau_p

    def deltas(self) -> tuple[float, float]:
        if self.deltas_override is not None:
            return self.deltas_override
        if not self.auto_resonance:
            return self.nominal_deltas
        return resonance_table(self).resonant_deltas(self.addressed)

    def drive(self, omegas=(None, None), envelopes=(None, None)) -> DriveSpec:
        """Constant drive with the preset phases and detunings.

        ``omegas`` defaults to the preset amplitude on both lasers;
        ``envelopes`` overrides the constant envelope per laser.
        """
        deltas = self.deltas()
        lasers = []
        for om, env, alpha, delta in zip(omegas, envelopes, self.alphas, deltas):
            env = env if env is not None else Constant(self.omega if om is None else om)
            lasers.append(TransitionDrive(env, alpha, delta))
        return DriveSpec(*lasers)

    def to_dict(self) -> dict:
        """Preset name plus resolved parameters; ``make_preset(**d)`` rebuilds it."""
        out = {}
        for k, v in self.params.items():
            if isinstance(v, GeometryConfig):
                v = v.to_dict()
            elif isinstance(v, tuple):
                v = list(v)
            out[k] = v
        return {"name": self.name, **out}


def _raman_s(system, chi13, **kw):
    return dict(scheme="raman", target="s12", alphas=(0.0, 0.0),
                nominal_deltas=(chi13 / 2, chi13 / 2), addressed=(("11", "s13"), ("s13", "s12")))


def _raman_a(system, chi13, **kw):
    return dict(scheme="raman", target="a12", alphas=(system.phi13, 0.0),
                nominal_deltas=(-chi13 / 2, -chi13 / 2), addressed=(("11", "a13"), ("a13", "a12")))


def _stirap(system, chi13, **kw):
    return dict(scheme="stirap", target="a12", alphas=(0.0, np.pi),
                nominal_deltas=(chi13 / 2, chi13 / 2), addressed=(("11", "s13"), ("s13", "a12")))


def _pump_sym(system, chi13, chi23):
    return dict(scheme="pumping", target="a12", alphas=(0.0, 0.0),
                nominal_deltas=(chi13 / 2, chi23 / 2), addressed=(("11", "s13"), ("22", "s23")))


def _pump_asym(system, chi13, chi23):
    return dict(scheme="pumping", target="a12", alphas=(np.pi, np.pi),
                nominal_deltas=(-chi13 / 2, -chi23 / 2), addressed=(("11", "a13"), ("22", "a23")))


_LAYOUTS = {
    "eq5": _raman_s,
    "eq6": _raman_a,
    "eq7": _stirap,
    "eq8sym": _pump_sym,
    "eq8asym": _pump_asym,
}

# Defaults per preset; any of these (and the system fields) can be overridden.
PRESETS = {
    "eq5": {"phi13": 0.125, "omega_ratio": 0.05},
    "eq6": {"phi13": 0.125, "omega_ratio": 0.05},
    "eq7": {"phi13": 0.1, "f13": 1000.0, "pulse_area": 5.0},
    "eq8sym": {"phi13": 1.0, "omega": 0.001, "jitter_rate": 0.01},
    "eq8asym": {"phi13": 1.0, "omega": 0.001, "jitter_rate": 0.01},
}
SCHEME_DEFAULT_PRESET = {"raman": "eq5", "stirap": "eq7", "pumping": "eq8asym"}

_SYSTEM_KEYS = ("gamma13", "gamma23", "phi13", "freq_ratio", "geometry")
PARAM_KEYS = _SYSTEM_KEYS + (
    "omega", "omega_ratio", "pulse_area", "pulse_width", "pulse_delay", "truncation",
    "f13", "jitter_rate", "jitter_mode", "auto_resonance", "alphas", "deltas",
    "stirap_mode", "dissipation", "relax_time",
)


def make_preset(name: str, **params) -> SchemePreset:
    """Build a named preset ('eq5', 'eq6', 'eq7', 'eq8sym', 'eq8asym').

    Keyword overrides are flat: system fields (phi13, gamma13, ...), drive
    strength as ``omega`` or ``omega_ratio`` (fraction of |chi13|) or, for
    STIRAP, ``pulse_area`` (Omega_0 tau_p), plus the remaining PARAM_KEYS.
    """
    if name not in _LAYOUTS:
        raise ValueError(f"unknown preset {name!r}; expected one of {sorted(_LAYOUTS)}")
    unknown = sorted(set(params) - set(PARAM_KEYS))
    if unknown:
        raise ValueError(f"unknown preset parameters: {', '.join(unknown)}")
    knobs = ("omega", "omega_ratio", "pulse_area")
    explicit = [k for k in knobs if params.get(k) is not None]
    if len(explicit) > 1:
        raise ValueError(f"give only one of omega / omega_ratio / pulse_area, got {explicit}")
    defaults = dict(PRESETS[name])
    if explicit:
        for k in knobs:
            defaults.pop(k, None)
    # an explicit None (e.g. f13=None) clears a preset default
    merged = {**defaults, **params}

    def opt(key, default=None):
        val = merged.get(key)
        return default if val is None else val

    geometry = opt("geometry")
    if isinstance(geometry, dict):
        geometry = GeometryConfig(**geometry)
    system = SystemConfig(
        **{k: merged[k] for k in _SYSTEM_KEYS if opt(k) is not None and k != "geometry"},
        **({"geometry": geometry} if geometry is not None else {}),
    )
    f13 = opt("f13")
    base = couplings_for_pair(system)
    chi13 = f13 * system.gamma13 if f13 is not None else base.chi13
    chi23 = f13 * system.gamma23 if f13 is not None else base.chi23
    layout = _LAYOUTS[name](system, chi13=chi13, chi23=chi23)

    preset = SchemePreset(
        name=name,
        system=system,
        omega=0.0,
        jitter=JitterSpec(opt("jitter_rate", 0.0), opt("jitter_mode", "collective")),
        auto_resonance=opt("auto_resonance", True),
        deltas_override=tuple(opt("deltas")) if opt("deltas") is not None else None,
        f13=f13,
        pulse_width=opt("pulse_width"),
        pulse_delay=opt("pulse_delay"),
        truncation=opt("truncation", 5.0),
        stirap_mode=opt("stirap_mode", "schrodinger"),
        dissipation=opt("dissipation", True),
        relax_time=opt("relax_time"),
        params=dict(merged),
        **layout,
    )
    if opt("alphas") is not None:
        preset = replace(preset, alphas=tuple(float(a) for a in merged["alphas"]))
    if opt("omega") is not None:
        omega = merged["omega"]
    elif opt("omega_ratio") is not None:
        omega = merged["omega_ratio"] * abs(chi13)
    elif opt("pulse_area") is not None:
        omega = merged["pulse_area"] / preset.tau_p
    else:
        raise ValueError("no drive strength given (omega, omega_ratio or pulse_area)")
    return replace(preset, omega=float(omega))


# --- spectrum / resonances -------------------------------------------------


@dataclass(frozen=True)
class ResonanceLine:
    laser: str
    initial: str
    final: str
    frequency: float
    element: complex
    detuning: float | None

    def to_dict(self):
        return {
            "laser": self.laser,
            "initial": self.initial,
            "final": self.final,
            "frequency": self.frequency,
            "element_abs": abs(self.element),
            "element_re": self.element.real,
            "element_im": self.element.imag,
            "resonant_detuning": self.detuning,
        }


@dataclass
class ResonanceTable:
    energies: np.ndarray
    labels: list
    ambiguous: list
    lines: list

    def find(self, laser: str, initial: str, final: str) -> ResonanceLine:
        for line in self.lines:
            if line.laser == laser and line.initial == initial and line.final == final:
                return line
        for line in self.lines:
            if line.laser == laser and line.initial == final and line.final == initial:
                return line
        raise KeyError(
            f"no transition {initial}->{final} for laser {laser}"
            + (f" (ambiguous eigenstates: {self.ambiguous})" if self.ambiguous else "")
        )

    def resonant_deltas(self, addressed) -> tuple[float, float]:
        out = []
        for laser, (ini, fin) in zip(("13", "23"), addressed):
            line = self.find(laser, ini, fin)
            if line.detuning is None:
                raise ValueError(f"transition {ini}->{fin} does not change n_{laser[0]}")
            out.append(line.detuning)
        return tuple(out)


def _labelled_eigenstates(h: np.ndarray, tol: float = 1e-9):
    """Eigen-decomposition with eigenvectors aligned to Dicke-like states.

    Inside degenerate clusters the eigenbasis is arbitrary, so it is replaced
    by the Dicke states that lie in the cluster subspace whenever those span it.
    """
    u = dicke_basis()
    energies, vecs = np.linalg.eigh(h)
    scale = max(1.0, np.max(np.abs(energies)))
    vecs = vecs.copy()
    i = 0
    while i < len(energies):
        j = i + 1
        while j < len(energies) and energies[j] - energies[i] < tol * scale:
            j += 1
        if j - i > 1:
            sub = vecs[:, i:j]
            weights = np.sum(np.abs(sub.conj().T @ u) ** 2, axis=0)
            picks = np.argsort(-weights)[: j - i]
            if np.all(weights[picks] > 1 - 1e-9):
                vecs[:, i:j] = u[:, np.sort(picks)]
        i = j
    labels, ambiguous = [], []
    for n in range(len(energies)):
        w = np.abs(u.conj().T @ vecs[:, n]) ** 2
        best = int(np.argmax(w))
        if w[best] > 0.5:
            labels.append(DICKE_LABELS[best])
        else:
            labels.append(f"mixed{n}")
            ambiguous.append(n)
    return energies, vecs, labels, ambiguous


def resonance_table(preset: SchemePreset) -> ResonanceTable:
    """Drive-free spectrum (no detunings) and drive matrix elements.

    ``frequency`` is E_final - E_initial of the bare RDDI Hamiltonian and
    ``detuning`` is the delta_k3 that puts the transition on resonance for
    the listed laser in the rotating frame (None if the transition does not
    change the lower-level population n_k).
    """
    couplings = preset.couplings()
    h0 = static_hamiltonian((0.0, 0.0), couplings)
    energies, vecs, labels, ambiguous = _labelled_eigenstates(h0)
    lines = []
    for k, laser, alpha in zip((1, 2), ("13", "23"), preset.alphas):
        d = preset.omega * drive_operator(k, alpha)
        nk = number_op(1, k) + number_op(2, k)
        occ = np.real(np.einsum("in,ij,jn->n", vecs.conj(), nk, vecs))
        elements = vecs.conj().T @ d @ vecs
        for a in range(DIM):
            for b in range(DIM):
                if a == b:
                    continue
                freq = float(energies[b] - energies[a])
                dn = occ[b] - occ[a]
                detuning = -freq / dn if abs(dn) > 1e-9 else None
                lines.append(ResonanceLine(laser, labels[a], labels[b], freq, complex(elements[b, a]), detuning))
    return ResonanceTable(energies, labels, ambiguous, lines)


# --- runs ------------------------------------------------------------------


@dataclass
class RunResult:
    final_fidelity: float
    target: str
    trajectory: Trajectory | None = None
    steady_state: np.ndarray | None = None
    diagnostics: dict = field(default_factory=dict)
    preset: SchemePreset | None = None

    def summary(self) -> dict:
        out = {"final_fidelity": self.final_fidelity, "target": self.target}
        out["diagnostics"] = self.diagnostics
        if self.preset is not None:
            out["config"] = self.preset.to_dict()
        return out


def _annotate(traj: Trajectory) -> Trajectory:
    for label in TRACKED_STATES:
        traj.observables[f"F_{label}"] = np.clip(traj.target_population(named_state(label)), 0.0, 1.0)
    return traj


def _check_weak_drive(preset: SchemePreset, couplings: RDDICouplings):
    chi = abs(couplings.chi13)
    if chi == 0 or preset.omega > WEAK_DRIVE_RATIO * chi:
        warnings.warn(
            f"{preset.name}: Omega = {preset.omega:.4g} is not small compared to "
            f"|chi13| = {chi:.4g}; resonance selection rules become approximate",
            ValidityWarning,
            stacklevel=3,
        )


def _segment_cfg(cfg: IntegratorConfig) -> IntegratorConfig:
    return replace(cfg, sample_times=None)


def run_raman(preset: SchemePreset, cfg: IntegratorConfig | None = None) -> RunResult:
    """Two rectangular pi pulses under the full master equation.

    Pulse 1 (1<->3 laser) moves |11> to the transit state, pulse 2 (2<->3
    laser) moves the transit state to the target.  Each duration is
    pi / (2 |V|) with V the resonant matrix element.
    """
    if preset.scheme != "raman":
        raise ValueError(f"run_raman needs a raman preset, got {preset.scheme!r}")
    started = time.perf_counter()
    cfg = _segment_cfg(cfg or IntegratorConfig())
    couplings = preset.couplings()
    _check_weak_drive(preset, couplings)
    table = resonance_table(preset)
    (i1, f1), (i2, f2) = preset.addressed
    v1 = table.find("13", i1, f1).element
    v2 = table.find("23", i2, f2).element
    if abs(v1) == 0 or abs(v2) == 0:
        raise ValueError(f"{preset.name}: addressed transition has zero matrix element")
    durations = (np.pi / (2 * abs(v1)), np.pi / (2 * abs(v2)))
    drives = (preset.drive(omegas=(None, 0.0)), preset.drive(omegas=(0.0, None)))

    rho = np.outer(named_state("11"), named_state("11").conj())
    t0, traj = 0.0, None
    for drive, duration in zip(drives, durations):
        gen = assemble_liouvillian(drive, couplings, preset.system, preset.jitter, preset.dissipation)
        seg = propagate_density(rho, gen, (t0, t0 + duration), cfg)
        traj = seg if traj is None else traj.concat(seg)
        rho, t0 = seg.final_state, t0 + duration
    _annotate(traj)
    target = named_state(preset.target)
    fid = float(np.clip(np.real(target.conj() @ rho @ target), 0.0, 1.0))
    diag = {
        "pulse_durations": list(durations),
        "matrix_elements": [abs(v1), abs(v2)],
        "deltas": list(preset.deltas()),
        "chi13": couplings.chi13,
        "omega": preset.omega,
        **traj.validity(),
        "wall_time": time.perf_counter() - started,
    }
    return RunResult(fid, preset.target, trajectory=traj, diagnostics=diag, preset=preset)


def stirap_envelopes(preset: SchemePreset):
    """(pump 1<->3, Stokes 2<->3) Gaussians and the simulated time span.

    The Stokes pulse comes first; the pump follows after ``pulse_delay``
    (default: one pulse length).  Each pulse is kept over center +- truncation
    * tau_p.
    """
    tau = preset.tau_p
    delay = preset.pulse_delay if preset.pulse_delay is not None else tau
    t_stokes = preset.truncation * tau
    t_pump = t_stokes + delay
    pump = Gaussian(preset.omega, tau, t_pump)
    stokes = Gaussian(preset.omega, tau, t_stokes)
    return pump, stokes, (0.0, t_pump + preset.truncation * tau)


def run_stirap(preset: SchemePreset, cfg: IntegratorConfig | None = None) -> RunResult:
    """Counterintuitive Gaussian pulse pair from |11> to the target.

    Pure Schrodinger evolution by default (no decay); ``stirap_mode='master'``
    integrates the full master equation instead.
    """
    if preset.scheme != "stirap":
        raise ValueError(f"run_stirap needs a stirap preset, got {preset.scheme!r}")
    started = time.perf_counter()
    cfg = cfg or IntegratorConfig()
    couplings = preset.couplings()
    _check_weak_drive(preset, couplings)
    pump, stokes, span = stirap_envelopes(preset)
    drive = preset.drive(envelopes=(pump, stokes))
    psi0 = named_state("11")

    if preset.stirap_mode == "schrodinger":
        static, terms = hamiltonian_terms(drive, couplings)
        # remove the common rotating-frame energy of |11> (global phase only)
        static = static - np.real(psi0.conj() @ static @ psi0) * np.eye(DIM)

        def ham(t):
            out = static.copy()
            for env, op in terms:
                out += float(env(t)) * op
            return out

        traj = propagate_state(psi0, ham, span, cfg)
    else:
        gen = assemble_liouvillian(drive, couplings, preset.system, preset.jitter, preset.dissipation)
        traj = propagate_density(np.outer(psi0, psi0.conj()), gen, span, cfg)
    _annotate(traj)
    fid = float(traj.observables[f"F_{preset.target}"][-1])
    diag = {
        "tau_p": preset.tau_p,
        "pulse_area": preset.pulse_area,
        "omega0": preset.omega,
        "f13": couplings.f13,
        "deltas": list(preset.deltas()),
        "span": list(span),
        "mode": preset.stirap_mode,
        **traj.validity(),
        "wall_time": time.perf_counter() - started,
    }
    return RunResult(fid, preset.target, trajectory=traj, diagnostics=diag, preset=preset)


def pumping_generator(preset: SchemePreset):
    couplings = preset.couplings()
    return assemble_liouvillian(preset.drive(), couplings, preset.system, preset.jitter,
                                preset.dissipation)


def run_pumping(preset: SchemePreset, cfg: IntegratorConfig | None = None) -> RunResult:
    """Steady state under continuous pumping, plus an optional relaxation run.

    Raises DegenerateSteadyStateError when the stationary state is not unique
    (e.g. zero jitter, where single-atom dark states trap population).
    """
    if preset.scheme != "pumping":
        raise ValueError(f"run_pumping needs a pumping preset, got {preset.scheme!r}")
    started = time.perf_counter()
    couplings = preset.couplings()
    _check_weak_drive(preset, couplings)
    gen = pumping_generator(preset)
    ss = steady_state(gen)
    if not ss.unique:
        raise DegenerateSteadyStateError(ss.null_dimension)
    target = named_state(preset.target)
    fid = float(np.clip(np.real(target.conj() @ ss.rho @ target), 0.0, 1.0))
    traj = None
    if preset.relax_time:
        rho0 = np.outer(named_state("11"), named_state("11").conj())
        traj = _annotate(propagate_density(rho0, gen, (0.0, preset.relax_time), cfg or IntegratorConfig()))
    diag = {
        "residual": ss.residual,
        "generator_norm": float(ss.singular_values[0]),
        "null_dimension": ss.null_dimension,
        "spectral_gap": float(ss.singular_values[-2] / ss.singular_values[0]),
        "deltas": list(preset.deltas()),
        "chi13": couplings.chi13,
        "omega": preset.omega,
        "steady_populations": {
            lbl: float(np.real(named_state(lbl).conj() @ ss.rho @ named_state(lbl)))
            for lbl in DICKE_LABELS
        },
        "wall_time": time.perf_counter() - started,
    }
    if traj is not None:
        diag.update(traj.validity())
    return RunResult(fid, preset.target, trajectory=traj, steady_state=ss.rho,
                     diagnostics=diag, preset=preset)


_RUNNERS = {"raman": run_raman, "stirap": run_stirap, "pumping": run_pumping}


def run_preset(preset: SchemePreset, cfg: IntegratorConfig | None = None) -> RunResult:
    return _RUNNERS[preset.scheme](preset, cfg)


# --- sweeps ----------------------------------------------------------------


def grid_points(grid: dict) -> list[dict]:
    """Cartesian product of the axes, first axis outermost.  No axes -> no points."""
    if not grid:
        return []
    names = list(grid)
    return [dict(zip(names, values)) for values in product(*(grid[n] for n in names))]


def _sweep_point(args):
    name, base, point, cfg = args
    row = dict(point)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ValidityWarning)
            result = run_preset(make_preset(name, **{**base, **point}), cfg)
        row["final_fidelity"] = result.final_fidelity
        row["error"] = ""
    except Exception as exc:  # recorded per row; the sweep continues
        row["final_fidelity"] = None
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def sweep(scheme: str, grid: dict, jobs: int = 1, base: dict | None = None,
          cfg: IntegratorConfig | None = None) -> list[dict]:
    """Run a preset at every grid point.

    ``scheme`` is a preset name or a scheme id (raman / stirap / pumping).
    Rows come back in grid order whatever ``jobs`` is.
    """
    name = SCHEME_DEFAULT_PRESET.get(scheme, scheme)
    if name not in _LAYOUTS:
        raise ValueError(f"unknown scheme or preset {scheme!r}")
    bad = sorted(set(grid) - set(PARAM_KEYS))
    if bad:
        raise ValueError(f"grid axes are not preset parameters: {', '.join(bad)}")
    base = dict(base or {})
    tasks = [(name, base, p, cfg) for p in grid_points(grid)]
    if jobs <= 1 or len(tasks) <= 1:
        return [_sweep_point(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_sweep_point, tasks))
