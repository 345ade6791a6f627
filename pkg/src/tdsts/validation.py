"""Analytic-versus-oracle checks shared by ``tdsts validate`` and the acceptance tests.

Each check compares a closed form against an independent computation
(Gaussian covariance simulation, truncated Fock simulation, quadrature or
finite differences) over a seeded set of random states and returns a
:class:`CheckResult` holding the worst error seen.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import analytic as an
from .model import (
    Displacement,
    OscillatorParams,
    Squeeze,
    StateSpec,
    ThermalSpec,
    braid_displacement,
    temperature_for_angle,
    thermal_angle,
    thermal_angles,
)
from .oracle import (
    FockConvergenceError,
    fock_braid_overlap,
    fock_expectations,
    fock_tfd_state,
    gaussian_photon_stats,
    gaussian_tfd_state,
    quad_integrate,
    reduce_physical,
    wavefunction_from_fock,
)

DEFAULT_SEED = 20240611


@dataclass(frozen=True)
class Box:
    """Sampling ranges: |alpha| <= alpha_max, r <= r_max, tau <= tau_max, t in [0, 4 pi / omega]."""

    alpha_max: float
    r_max: float
    tau_max: float
    random_units: bool = True


FULL_BOX = Box(2.0, 1.5, 3.0)
RESTRICTED_BOX = Box(1.5, 1.0, 1.5)
# single-mode braiding states whose photon distribution fits below cutoff 60
BRAID_BOX = Box(1.0, 0.5, 0.0)


@dataclass(frozen=True)
class Case:
    spec: StateSpec
    t: float


def full_parameter_set() -> Case:
    """alpha = 0.5+0.3i, r = 0.7, phi = pi/3, theta1 = 0.3, theta2 = 0.2, omega t = 0.9."""
    osc = OscillatorParams()
    spec = StateSpec(
        osc,
        Displacement(0.5, 0.3),
        Squeeze(0.7, math.pi / 3),
        ThermalSpec([temperature_for_angle(0.3, osc)], [temperature_for_angle(0.2, osc)]),
    )
    return Case(spec, 0.9)


def draw_case(rng: np.random.Generator, box: Box) -> Case:
    if box.random_units:
        m, omega, hbar = np.exp(rng.uniform(math.log(0.5), math.log(2.0), 3))
        osc = OscillatorParams(float(m), float(omega), float(hbar))
    else:
        osc = OscillatorParams()
    alpha = Displacement.from_polar(rng.uniform(0, box.alpha_max), rng.uniform(0, 2 * math.pi))
    z = Squeeze(rng.uniform(0, box.r_max), rng.uniform(0, 2 * math.pi))
    tau1, tau2 = rng.uniform(0, box.tau_max, 2)
    thermal = ThermalSpec([osc.temperature_from_tau(tau1)], [osc.temperature_from_tau(tau2)])
    t = rng.uniform(0, 4 * math.pi / osc.omega)
    return Case(StateSpec(osc, alpha, z, thermal), float(t))


def draw_cases(seed: int, n: int, box: Box, stream: int) -> list[Case]:
    # one independent stream per check, so draw counts do not couple checks
    rng = np.random.default_rng([seed, stream])
    return [draw_case(rng, box) for _ in range(n)]


@dataclass
class CheckResult:
    name: str
    criterion: int
    metric: str
    tol: float
    cases: int = 0
    failures: int = 0
    worst: float = 0.0
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.cases > 0

    def add(self, err: float, label: str = "") -> None:
        err = float(err)
        self.cases += 1
        if not math.isfinite(err):
            self.failures += 1
            self.worst = math.inf
            self.notes.append(f"{label}non-finite error")
            return
        self.worst = max(self.worst, err)
        if err > self.tol:
            self.failures += 1

    def fail(self, note: str) -> None:
        self.cases += 1
        self.failures += 1
        self.notes.append(note)


@dataclass(frozen=True)
class SuiteOptions:
    seed: int = DEFAULT_SEED
    draws: int = 200
    fock_draws: int = 20
    wavefunction_draws: int = 10
    cutoff: int = 60
    quad_points: int = 2001
    cases: Optional[tuple[Case, ...]] = None
    faults: frozenset = frozenset()

    def sample(self, n: int, box: Box, stream: int) -> list[Case]:
        if self.cases is not None:
            return list(self.cases)
        return draw_cases(self.seed, n, box, stream)


def _corrupt(opts: SuiteOptions, name: str, value):
    """Negative-control hook: perturb the closed-form side of check ``name``."""
    return value * (1 + 1e-3) + 1e-3 if name in opts.faults else value


def _rel(a: float, b: float) -> float:
    if a == b:
        return 0.0
    return abs(a - b) / abs(b)


# -- criterion 1 -------------------------------------------------------------


def check_moments(opts: SuiteOptions) -> list[CheckResult]:
    res = CheckResult("xp_moments", 1, "rel", 1e-10)
    for case in opts.sample(opts.draws, FULL_BOX, 1):
        m = an.xp_moments(case.spec, case.t)
        g = reduce_physical(gaussian_tfd_state(case.spec, case.t))
        mx, vx = _corrupt(opts, res.name, m.mean_x), m.var_x
        # means are compared on the scale of the spread, since they can vanish
        sx = math.sqrt(g.mean[0] ** 2 + g.cov[0, 0])
        sp = math.sqrt(g.mean[1] ** 2 + g.cov[1, 1])
        res.add(
            max(
                abs(mx - g.mean[0]) / sx,
                _rel(vx, g.cov[0, 0]),
                abs(m.mean_p - g.mean[1]) / sp,
                _rel(m.var_p, g.cov[1, 1]),
            )
        )
    return [res]


# -- criterion 2 -------------------------------------------------------------


def _stats_error(a: an.PhotonStats, b: an.PhotonStats) -> float:
    if (a.g2 is None) != (b.g2 is None):
        return math.inf
    errs = [_rel(a.mean_n, b.mean_n), _rel(a.var_n, b.var_n)]
    if a.g2 is not None:
        errs.append(_rel(a.g2, b.g2))
    return max(errs)


def check_photon_gaussian(opts: SuiteOptions) -> CheckResult:
    res = CheckResult("photon_stats:gaussian", 2, "rel", 1e-10)
    for case in opts.sample(opts.draws, FULL_BOX, 2):
        ps = an.photon_stats(case.spec)
        ps = replace(ps, mean_n=_corrupt(opts, res.name, ps.mean_n))
        mode = reduce_physical(gaussian_tfd_state(case.spec, case.t))
        res.add(_stats_error(ps, gaussian_photon_stats(mode, case.spec.osc)))
    return res


def _fock(case: Case, opts: SuiteOptions, res: CheckResult, label: str):
    try:
        return fock_tfd_state(case.spec, case.t, opts.cutoff)
    except FockConvergenceError as exc:
        res.fail(f"{label}: {exc}")
        return None


def check_photon_fock(opts: SuiteOptions) -> CheckResult:
    res = CheckResult("photon_stats:fock", 2, "rel", 1e-6)
    for i, case in enumerate(opts.sample(opts.fock_draws, RESTRICTED_BOX, 3)):
        state = _fock(case, opts, res, f"draw {i}")
        if state is None:
            continue
        ps = an.photon_stats(case.spec)
        ps = replace(ps, mean_n=_corrupt(opts, res.name, ps.mean_n))
        res.add(_stats_error(ps, fock_expectations(state, case.spec.osc).photon_stats()))
    return res


def check_photon_time(opts: SuiteOptions, n_times: int = 8) -> CheckResult:
    res = CheckResult("photon_stats:time", 2, "rel", 1e-10)
    base = opts.cases[0] if opts.cases else full_parameter_set()
    period = 2 * math.pi / base.spec.osc.omega
    stats = []
    for k in range(n_times):
        t = base.t + k * period / n_times
        state = _fock(Case(base.spec, t), opts, res, f"t={t:.3g}")
        if state is None:
            return res
        fe = fock_expectations(state, base.spec.osc)
        stats.append(fe.photon_stats())
    for a, b in itertools.combinations(stats, 2):
        res.add(_stats_error(a, b))
    return res


def criterion_2(opts: SuiteOptions) -> list[CheckResult]:
    return [check_photon_gaussian(opts), check_photon_fock(opts), check_photon_time(opts)]


# -- criterion 3 -------------------------------------------------------------


def _grid(mean: float, sigma: float, halfwidth: float, n: int) -> np.ndarray:
    return np.linspace(mean - halfwidth * sigma, mean + halfwidth * sigma, n)


def check_densities(opts: SuiteOptions) -> list[CheckResult]:
    norm_x = CheckResult("prob_x:norm", 3, "abs", 1e-8)
    norm_p = CheckResult("prob_p:norm", 3, "abs", 1e-8)
    diag = CheckResult("rho_position:diagonal", 3, "abs", 1e-12)
    herm = CheckResult("rho_position:hermitian", 3, "abs", 1e-13)
    dsts = CheckResult("rho_position:dsts_reduction", 3, "abs", 1e-12)

    for case in opts.sample(opts.draws // 4 or 1, FULL_BOX, 4):
        spec, t = case.spec, case.t
        m = an.xp_moments(spec, t)
        sx, sp = math.sqrt(m.var_x), math.sqrt(m.var_p)
        ix = quad_integrate(lambda x: an.prob_x(spec, x, t), m.mean_x, sx, 10, opts.quad_points)
        ip = quad_integrate(lambda p: an.prob_p(spec, p, t), m.mean_p, sp, 10, opts.quad_points)
        norm_x.add(abs(_corrupt(opts, norm_x.name, ix) - 1))
        norm_p.add(abs(_corrupt(opts, norm_p.name, ip) - 1))

        xs = _grid(m.mean_x, sx, 6, 101)
        rho_d = _corrupt(opts, diag.name, an.rho_position(spec, xs, xs, t))
        diag.add(np.abs(rho_d - an.prob_x(spec, xs, t)).max())

        X, XP = np.meshgrid(_grid(m.mean_x, sx, 4, 41), _grid(m.mean_x, sx, 4, 41), indexing="ij")
        rho = _corrupt(opts, herm.name, an.rho_position(spec, XP, X, t))
        herm.add(np.abs(rho - np.conj(an.rho_position(spec, X, XP, t))).max())

        reduced = replace(spec, thermal=ThermalSpec(spec.thermal.input_temps, ()))
        m0 = an.xp_moments(reduced, 0.0)
        s0 = math.sqrt(m0.var_x)
        X, XP = np.meshgrid(_grid(m0.mean_x, s0, 4, 41), _grid(m0.mean_x, s0, 4, 41), indexing="ij")
        full = _corrupt(opts, dsts.name, an.rho_position(reduced, XP, X, 0.0))
        dsts.add(np.abs(full - an.rho_position_dsts(reduced, XP, X)).max())
    return [norm_x, norm_p, diag, herm, dsts]


# -- criterion 4 -------------------------------------------------------------


def _entropy(density: Callable, mean: float, sigma: float, points: int) -> float:
    def integrand(u):
        rho = density(u)
        return -rho * np.log(rho)

    return quad_integrate(integrand, mean, sigma, 10, points)


def check_uncertainty_entropy(opts: SuiteOptions, grid_points: int = 64) -> list[CheckResult]:
    bound = CheckResult("uncertainty:bound", 4, "rel deficit", 1e-14)
    minimum = CheckResult("uncertainty:minimum", 4, "rel", 1e-9)
    ident = CheckResult("entropy:identity", 4, "abs", 1e-12)
    quad = CheckResult("entropy:quadrature", 4, "abs", 1e-6)

    cases = opts.sample(opts.draws, FULL_BOX, 5)
    for i, case in enumerate(cases):
        spec = case.spec
        osc = spec.osc
        floor = 0.5 * osc.hbar * thermal_angles(spec.thermal, osc).cosh2Theta
        # one oscillator period, anchored where the squeeze phase term peaks
        t0 = spec.z.phi / (2 * osc.omega)
        products = []
        for k in range(grid_points):
            t = t0 + k * 2 * math.pi / (grid_points * osc.omega)
            m = an.xp_moments(spec, t)
            products.append(_corrupt(opts, bound.name, math.sqrt(m.var_x * m.var_p)))
            h = _corrupt(opts, ident.name, an.entropy_sum(spec, t))
            ident.add(abs(h - math.log(2 * math.pi * math.e * math.sqrt(m.var_x * m.var_p))))
        # a rounding-level deficit at the touching point is not a violation
        bound.add(max(0.0, (floor - min(products)) / floor))
        minimum.add(_rel(_corrupt(opts, minimum.name, min(products)), floor))

        if i < max(1, len(cases) // 4):
            t = case.t
            m = an.xp_moments(spec, t)
            hx = _entropy(lambda x: an.prob_x(spec, x, t), m.mean_x, math.sqrt(m.var_x), opts.quad_points)
            hp = _entropy(lambda p: an.prob_p(spec, p, t), m.mean_p, math.sqrt(m.var_p), opts.quad_points)
            quad.add(abs(_corrupt(opts, quad.name, an.entropy_sum(spec, t)) - (hx + hp)))
    return [bound, minimum, ident, quad]


# -- criterion 5 -------------------------------------------------------------


def check_thermal_identities(opts: SuiteOptions, n: int = 30) -> list[CheckResult]:
    add = CheckResult("thermal:addition", 5, "rel", 1e-12)
    quarter = CheckResult("thermal:coth_quarter", 5, "rel", 1e-12)
    osc = OscillatorParams()
    taus = np.linspace(0.05, 3.0, n)
    for tau1, tau2 in itertools.product(taus, taus):
        y1, y2 = 1.0 / tau1, 1.0 / tau2  # beta hbar omega
        ang = thermal_angles(ThermalSpec([tau1], [tau2]), osc)
        rhs = 1 / (math.tanh(y1 / 2) * math.tanh(y2 / 2)) + 1 / (math.sinh(y1 / 2) * math.sinh(y2 / 2))
        add.add(_rel(_corrupt(opts, add.name, ang.cosh2Theta), rhs))
    for tau in taus:
        th = thermal_angle(tau, osc)
        lhs = (math.cosh(th) + math.sinh(th)) ** 2
        quarter.add(_rel(_corrupt(opts, quarter.name, lhs), 1 / math.tanh(0.25 / tau)))
    return [add, quarter]


def check_braiding(opts: SuiteOptions, n: int = 5) -> CheckResult:
    res = CheckResult("braid_displacement", 5, "1 - overlap", 1e-8)
    pairs = [(Displacement(0.5, 0.3), Squeeze(0.7, math.pi / 3))]
    pairs += [(c.spec.alpha, c.spec.z) for c in draw_cases(opts.seed, n, BRAID_BOX, 6)]
    for alpha, z in pairs:
        a2 = braid_displacement(alpha, z)
        a2 = Displacement.from_complex(_corrupt(opts, res.name, a2.value))
        res.add(1.0 - fock_braid_overlap(alpha, z, a2, opts.cutoff))
    return res


def criterion_5(opts: SuiteOptions) -> list[CheckResult]:
    return check_thermal_identities(opts) + [check_braiding(opts)]


# -- criterion 6 -------------------------------------------------------------


def check_wavefunction(opts: SuiteOptions) -> list[CheckResult]:
    res = CheckResult("wavefunction", 6, "abs", 1e-6)
    for i, case in enumerate(opts.sample(opts.wavefunction_draws, RESTRICTED_BOX, 7)):
        state = _fock(case, opts, res, f"draw {i}")
        if state is None:
            continue
        m = an.xp_moments(case.spec, case.t)
        g = _grid(m.mean_x, math.sqrt(m.var_x), 3, 5)
        X, XT = np.meshgrid(g, g, indexing="ij")
        psi = _corrupt(opts, res.name, an.wavefunction(case.spec, X, XT, case.t))
        ref = wavefunction_from_fock(state, case.spec.osc, X, XT)
        k = np.unravel_index(np.abs(psi).argmax(), psi.shape)
        phase = psi[k] / ref[k]
        phase /= abs(phase)
        res.add(np.abs(psi - phase * ref).max())
    return [res]


# -- criterion 7 -------------------------------------------------------------

LAMBDAS = (-0.5, 0.3, 1.0)


def fd_derivative(
    f: Callable[[float], float], n: int, h: float, levels: int = 7, ratio: float = 1.4
) -> float:
    """n-th derivative at 0 by central differences, Richardson-extrapolated over h / ratio**j.

    A step ratio below 2 keeps the smallest step large enough that roundoff
    stays below the truncation error up to n = 6.
    """

    def central(step):
        return sum(
            (-1) ** k * math.comb(n, k) * f((n / 2 - k) * step) for k in range(n + 1)
        ) / step**n

    table = [central(h / ratio**j) for j in range(levels)]
    for order in range(1, levels):
        factor = ratio ** (2 * order)
        table = [(factor * table[j + 1] - table[j]) / (factor - 1) for j in range(len(table) - 1)]
    return table[0]


def check_mgf_moments(opts: SuiteOptions, max_n: int = 6) -> list[CheckResult]:
    quad = CheckResult("mgf:quadrature", 7, "rel", 1e-8)
    fd = CheckResult("nth_moment:finite_difference", 7, "rel", 1e-6)
    exact = CheckResult("nth_moment:exact", 7, "rel", 1e-13)

    # the lambda values are bare numbers, so these draws use unit m, omega, hbar
    box = replace(FULL_BOX, random_units=False)
    for case in opts.sample(max(1, opts.draws // 10), box, 8):
        spec, t = case.spec, case.t
        m = an.xp_moments(spec, t)
        for which, mean, var, dens in (
            ("position", m.mean_x, m.var_x, an.prob_x),
            ("momentum", m.mean_p, m.var_p, an.prob_p),
        ):
            sigma = math.sqrt(var)
            for lam in LAMBDAS:
                val = _corrupt(opts, quad.name, float(an.mgf(spec, which, lam, t)))
                ref = quad_integrate(
                    lambda u: np.exp(lam * u) * dens(spec, u, t),
                    mean + lam * var,
                    sigma,
                    10,
                    opts.quad_points,
                )
                quad.add(_rel(val, ref))

            scale = math.sqrt(mean**2 + var)
            h = 0.6 / scale
            for n in range(max_n + 1):
                val = _corrupt(opts, fd.name, an.nth_moment(spec, which, n, t))
                ref = fd_derivative(lambda lam: float(an.mgf(spec, which, lam, t)), n, h)
                fd.add(abs(val - ref) / scale**n)
            m1 = _corrupt(opts, exact.name, an.nth_moment(spec, which, 1, t))
            m2 = an.nth_moment(spec, which, 2, t)
            exact.add(max(abs(m1 - mean) / scale, abs(m2 - (var + mean**2)) / scale**2))
    return [quad, fd, exact]


# -- criterion 8 -------------------------------------------------------------


def check_quadrature_variances(opts: SuiteOptions, grid_points: int = 64) -> list[CheckResult]:
    xp = CheckResult("quadrature_variances:xp", 8, "rel", 1e-12)
    atten = CheckResult("quadrature_variances:attenuation", 8, "min/limit < 1", 1.0 - 1e-15)
    for case in opts.sample(opts.draws, FULL_BOX, 9):
        spec, t = case.spec, case.t
        osc = spec.osc
        m = an.xp_moments(spec, t)
        y1, y2 = an.quadrature_variances(spec, t, 0.0)
        y1 = _corrupt(opts, xp.name, y1)
        k = osc.m * osc.omega / (2 * osc.hbar)
        xp.add(max(_rel(y1, k * m.var_x), _rel(y2, m.var_p / (4 * k * osc.hbar**2))))
        if spec.z.r > 0:
            C = thermal_angles(spec.thermal, osc).cosh2Theta
            limit = 0.25 * C * math.cosh(2 * spec.z.r)
            phis = np.linspace(0, math.pi, grid_points, endpoint=False)
            low = min(an.quadrature_variances(spec, t, v)[1] for v in phis)
            atten.add(_corrupt(opts, atten.name, low) / limit)
    return [xp, atten]


CRITERIA: dict[int, tuple[str, Callable[[SuiteOptions], list[CheckResult]]]] = {
    1: ("moment agreement", check_moments),
    2: ("photon statistics", criterion_2),
    3: ("density integrity", check_densities),
    4: ("uncertainty and entropy", check_uncertainty_entropy),
    5: ("identities", criterion_5),
    6: ("wavefunction", check_wavefunction),
    7: ("mgf and moments", check_mgf_moments),
    8: ("quadrature variances", check_quadrature_variances),
}


def run_suite(opts: SuiteOptions, criteria: Iterable[int] = CRITERIA) -> list[CheckResult]:
    results: list[CheckResult] = []
    for c in criteria:
        results.extend(CRITERIA[c][1](opts))
    return results


def format_table(results: Sequence[CheckResult]) -> str:
    head = ("check", "crit", "cases", "fail", "metric", "max_error", "tolerance", "status")
    rows = [
        (
            r.name,
            str(r.criterion),
            str(r.cases),
            str(r.failures),
            r.metric,
            f"{r.worst:.3e}",
            f"{r.tol:.1e}",
            "PASS" if r.passed else "FAIL",
        )
        for r in results
    ]
    widths = [max(len(row[i]) for row in [head, *rows]) for i in range(len(head))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in [head, *rows]]
    for r in results:
        for note in r.notes[:3]:
            lines.append(f"  {r.name}: {note}")
        if len(r.notes) > 3:
            lines.append(f"  {r.name}: ... {len(r.notes) - 3} more")
    return "\n".join(lines)
