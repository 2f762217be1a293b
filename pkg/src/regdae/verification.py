"""Randomized verification suite over seeded families of regular pencils.

Each check runs one property over a family of instances and records, per
instance, the measured quantity and the bound it must respect.  Instance
families are deterministic functions of ``(seed, family, index)``.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .asymptotics import DICHOTOMY, STABLE, classify, split_subspaces, verify_decay
from .consistent_iv import iv_for
from .errors import DaeError, NotRegular
from .laplace import LaplaceConfig, transform_residual
from .oracles import contour_dunford_projection, determinant_roots, matched_distance
from .pencil import (
    Pencil,
    block_factorize,
    generate_regular,
    is_regular,
    resolvent,
    resolvent_bound_probe,
    spectrum,
)
from .solvers import duality_check, integrated_identity_residual, mild_evolution, solve_mild, solve_strong

__all__ = [
    "CHECKS",
    "CheckResult",
    "Instance",
    "SuiteReport",
    "instance_family",
    "run_check",
    "run_suite",
    "negative_controls",
]

SHARED_COUNT = 100
DICHOTOMY_COUNT = 50
LAPLACE_COUNT = 20
MAX_N = 8
MIN_SEPARATION = 0.25
_FAMILY_IDS = {"shared": 0, "dichotomy": 1, "laplace": 2}


@dataclass(frozen=True)
class Instance:
    index: int
    pencil: Pencil
    hint: np.ndarray
    kind: str
    seed: tuple


@dataclass
class CheckResult:
    name: str
    criterion: int
    tolerance: str
    instances: int = 0
    measured: list = field(default_factory=list)  # (instance, value, bound)
    errors: list = field(default_factory=list)

    @property
    def failures(self):
        bad = [(i, v, b) for i, v, b in self.measured if not v <= b]
        return bad + [(i, float("nan"), msg) for i, msg in self.errors]

    @property
    def passed(self):
        return not self.failures and self.instances > 0

    @property
    def worst_ratio(self):
        ratios = [v / b if b > 0 else (0.0 if v == 0 else float("inf")) for _, v, b in self.measured]
        return max(ratios) if ratios else 0.0

    @property
    def max_measured(self):
        return max((v for _, v, _ in self.measured), default=0.0)

    def summary(self):
        return {
            "criterion": self.criterion,
            "name": self.name,
            "passed": self.passed,
            "instances": self.instances,
            "measurements": len(self.measured),
            "failures": len(self.failures),
            "max_measured": self.max_measured,
            "worst_ratio_to_bound": self.worst_ratio,
            "tolerance": self.tolerance,
            "first_failures": [
                {"instance": i, "value": v, "bound": b} for i, v, b in sorted(self.failures, key=lambda x: x[0])[:5]
            ],
        }


def _separated_points(rng, count, re_lo, re_hi, im_lo=-2.0, im_hi=2.0, re_abs_min=None):
    """``count`` points with pairwise distance at least ``MIN_SEPARATION``."""
    pts = []
    while len(pts) < count:
        re = rng.uniform(re_lo, re_hi)
        if re_abs_min is not None:
            re = np.sign(re) * rng.uniform(re_abs_min, max(abs(re_lo), abs(re_hi)))
            if re == 0:
                continue
        z = complex(re, rng.uniform(im_lo, im_hi))
        if all(abs(z - w) >= MIN_SEPARATION for w in pts):
            pts.append(z)
    return np.array(pts, dtype=complex)


def _make_instance(seed, family, index):
    key = (int(seed), _FAMILY_IDS[family], int(index))
    rng = np.random.default_rng(key)
    n = int(rng.integers(1, MAX_N + 1))
    if family == "shared":
        rank = int(rng.integers(0, n + 1))
        hint = _separated_points(rng, rank, -2.0, 1.0)
    elif family == "dichotomy":
        rank = int(rng.integers(1, n + 1))
        mode = index % 3  # all stable, mixed, all unstable
        signs = {0: -1.0, 1: None, 2: 1.0}[mode]
        hint = _separated_points(rng, rank, -2.0, 2.0, re_abs_min=0.5)
        if signs is not None:
            hint = signs * np.abs(hint.real) + 1j * hint.imag
        elif rank >= 2:
            # mixed: force at least one eigenvalue on each side
            hint[0] = -abs(hint[0].real) + 1j * hint[0].imag
            hint[1] = abs(hint[1].real) + 1j * hint[1].imag
    else:
        rank = int(rng.integers(1, n + 1))
        hint = _separated_points(rng, rank, -2.0, -0.2)
    kind = "accretive" if index % 2 == 0 else "general"
    p = generate_regular(n, rank, int(rng.integers(0, 2**31)), spectrum_hint=hint, kind=kind)
    return Instance(index, p, hint, kind, key)


def instance_family(seed, family="shared", count=None):
    """Deterministic list of instances of one family."""
    default = {"shared": SHARED_COUNT, "dichotomy": DICHOTOMY_COUNT, "laplace": LAPLACE_COUNT}[family]
    count = default if count is None else count
    return [_make_instance(seed, family, i) for i in range(count)]


def _unit(rng, n):
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


# ---- per-instance measurements; each returns a list of (value, bound) ----


def _spectrum_oracle(inst):
    p = inst.pencil
    ours = spectrum(p).eigenvalues
    ref = determinant_roots(p.m0, p.m1)
    return [(matched_distance(ours, ref), 1e-7)]


def _iv_spectrum(inst):
    p = inst.pencil
    f = block_factorize(p)
    iv = iv_for(p)
    a, g, k = f.reduced_generator_a, iv.generator_g, iv.iso_k
    if a.size == 0:
        return [(0.0, 1e-8), (0.0, 0.0)]
    dist = matched_distance(np.linalg.eigvals(-g), np.linalg.eigvals(a))
    inter = float(np.linalg.norm(k @ (-g) - a @ k, 2))
    bound = 1e-10 * float(np.linalg.norm(a, 2)) * float(np.linalg.norm(k, 2))
    return [(dist, 1e-8), (inter, bound)]


def _strong(inst):
    p = inst.pencil
    f = block_factorize(p)
    iv = iv_for(p)
    t = np.linspace(0.0, 5.0, 50)
    m1n = float(np.linalg.norm(p.m1, 2))
    out = []
    q, g = iv.basis.basis, iv.generator_g
    for j in range(iv.dim):
        u0 = q[:, j]
        traj = solve_strong(iv, u0, t)
        u = traj.states
        # u' = -iota_IV G exp(-tG) iota_IV^* u0, recovered from the IV coordinates of u
        du = (u @ q.conj()) @ (-g).T @ q.T
        norms = np.linalg.norm(u, axis=1)
        res = np.linalg.norm(du @ p.m0.T + u @ p.m1.T, axis=1)
        out.extend(zip(res, 1e-9 * m1n * norms))
        # membership in IV straight from its definition: M1 u(t) in R(M0)
        defect = np.linalg.norm(u @ p.m1.T @ f.decomp.corange_m0.basis.conj(), axis=1)
        out.extend(zip(defect, 1e-9 * m1n * norms))
    return out


def _mild_identity(inst, draws=10):
    p = inst.pencil
    f = block_factorize(p)
    iv = iv_for(p)
    rng = np.random.default_rng(inst.seed + (4,))
    t = np.linspace(0.0, 5.0, 11)
    out = []
    null = f.decomp.null_m0.basis
    u_null = null @ (rng.standard_normal(null.shape[1]) + 1j * rng.standard_normal(null.shape[1]))
    if null.shape[1]:
        u_null /= np.linalg.norm(u_null)
    # u0 in N(M0): the mild solution vanishes for t > 0
    zero_traj = mild_evolution(f, iv, u_null)(t[1:])
    out.append((float(np.max(np.linalg.norm(zero_traj, axis=1))), 1e-12))
    out.append((float(np.max(integrated_identity_residual(f, u_null, t))), 1e-12))
    for _ in range(draws - 1):
        u0 = _unit(rng, p.n)
        res = integrated_identity_residual(f, u0, t)
        out.append((float(np.max(res)), 1e-7 * (1.0 + np.linalg.norm(u0))))
    return out


def _coincidence(inst):
    p = inst.pencil
    f = block_factorize(p)
    iv = iv_for(p)
    rng = np.random.default_rng(inst.seed + (5,))
    t = np.linspace(0.0, 5.0, 50)
    out = []
    if iv.dim == 0:
        return [(0.0, 1e-9)]
    starts = [iv.basis.basis[:, j] for j in range(iv.dim)]
    c = rng.standard_normal(iv.dim) + 1j * rng.standard_normal(iv.dim)
    starts.append(iv.basis.embed(c / np.linalg.norm(c)))
    for u0 in starts:
        mild = solve_mild(f, iv, u0, t)
        strong = solve_strong(iv, u0, t)
        out.append((float(np.max(np.abs(mild.states - strong.states))), 1e-9))
    return out


def _duality(inst):
    p = inst.pencil
    rng = np.random.default_rng(inst.seed + (6,))
    u0 = _unit(rng, p.n)
    f = block_factorize(p)
    t = np.linspace(0.0, 2.0, 64)
    u = solve_mild(f, iv_for(p), u0, t)
    err = duality_check(p, u0, 2.0, 64)
    return [(err, 1e-8 * u.max_norm())]


def _laplace(inst):
    p = inst.pencil
    rng = np.random.default_rng(inst.seed + (7,))
    u0 = _unit(rng, p.n)
    s0 = spectrum(p).s0
    cfg = LaplaceConfig(rho=max(0.0, s0) + 1.0, frequencies=(-10.0, -1.0, 0.0, 1.0, 10.0))
    rep = transform_residual(p, u0, cfg)
    return [(rep.max_residual, 1e-6), (rep.rho_pair_discrepancy, 1e-6)]


def _dichotomy(inst):
    p = inst.pencil
    planted = STABLE if np.all(inst.hint.real < 0) else DICHOTOMY
    rep = classify(p)
    out = [(0.0 if rep.verdict == planted else 1.0, 0.0)]
    if not rep.has_dichotomy:
        return out
    a = block_factorize(p).reduced_generator_a
    proj = rep.projector_p
    out.append((float(np.linalg.norm(proj @ proj - proj, 2)), 1e-10))
    out.append((float(np.linalg.norm(proj @ a - a @ proj, 2)), 1e-10))
    # second route for the projector
    ref = contour_dunford_projection(a)
    out.append((float(np.linalg.norm(proj - ref, 2)), 1e-8 * max(1.0, float(np.linalg.norm(ref, 2)))))
    split = split_subspaces(rep, p, samples=20, seed=inst.index)
    out.append((split.invariance_residual, 1e-9))
    rng = np.random.default_rng(inst.seed + (8,))
    for part, basis in (("S", split.s_state), ("T", split.t_state)):
        if basis.dim == 0:
            continue
        starts = [basis.basis[:, j] for j in range(basis.dim)]
        c = rng.standard_normal(basis.dim) + 1j * rng.standard_normal(basis.dim)
        starts.append(basis.embed(c / np.linalg.norm(c)))
        for u0 in starts:
            chk = verify_decay(p, rep, u0, horizon=10.0, grid=101, part=part)
            out.append((chk.max_envelope_ratio, 1.0))
            if part == "T":
                out.append((0.0 if chk.growth_ok else 1.0, 0.0))
    return out


def _resolvent_probe(inst):
    p = inst.pencil
    ev = spectrum(p).eigenvalues
    big_r = 2.0 * ((float(np.max(np.abs(ev))) if ev.size else 0.0) + 1.0)
    near = resolvent_bound_probe(p, big_r)
    far = resolvent_bound_probe(p, 4 * big_r)
    # boundedness at infinity: the far probe may decay but must not grow past 4x
    return [(far, 4.0 * near)]


def negative_controls():
    """The index-2 and singular pencils, each with the operations that must refuse it."""
    pencils = {
        "index2": Pencil(np.array([[0.0, 1.0], [0.0, 0.0]]), np.eye(2)),
        "singular": Pencil(np.diag([1.0, 0.0]), np.array([[0.0, 1.0], [0.0, 0.0]])),
    }
    return pencils


def _negative_measurements():
    u0 = np.array([1.0, 0.0])
    t = np.linspace(0.0, 1.0, 5)
    ops = {
        "block_factorize": block_factorize,
        "spectrum": spectrum,
        "resolvent": lambda p: resolvent(p, 1.0),
        "iv": iv_for,
        "classify": classify,
        "duality": lambda p: duality_check(p, u0, 1.0, 5),
        "laplace": lambda p: transform_residual(p, u0, LaplaceConfig(rho=1.0)),
        "solve_mild": lambda p: solve_mild(block_factorize(p), iv_for(p), u0, t),
        "probe": lambda p: resolvent_bound_probe(p, 10.0),
    }
    out = []
    for name, p in negative_controls().items():
        out.append((0.0 if not is_regular(p).regular else 1.0, 0.0))
        for _, op in ops.items():
            try:
                op(Pencil(p.m0, p.m1))
            except NotRegular:
                out.append((0.0, 0.0))
            else:
                out.append((1.0, 0.0))
    return out


# name, criterion number, family, measurement, tolerance description
CHECKS = {
    "spectrum": (1, "shared", _spectrum_oracle, "matched distance to det(zM0+M1) roots <= 1e-7"),
    "iv_spectrum": (2, "shared", _iv_spectrum, "sigma(-G) vs sigma(A) <= 1e-8; |K(-G)-AK| <= 1e-10|A||K|"),
    "strong": (3, "shared", _strong, "|M0u'+M1u| <= 1e-9|M1||u| and u(t) in IV, 50 times on [0,5]"),
    "mild": (4, "shared", _mild_identity, "integrated identity <= 1e-7(1+|u0|); N(M0) data exact to 1e-12"),
    "coincidence": (5, "shared", _coincidence, "max |mild - strong| <= 1e-9 for u0 in IV"),
    "duality": (6, "shared", _duality, "duality_check <= 1e-8 max|u|, T=2, 64 points"),
    "laplace": (7, "laplace", _laplace, "transform residual <= 1e-6 at rho and rho+1"),
    "dichotomy": (8, "dichotomy", _dichotomy, "planted verdict; |P^2-P|,|PA-AP| <= 1e-10; envelopes; invariance <= 1e-9"),
    "negative": (9, None, None, "both negative controls rejected by every operation"),
    "resolvent": (10, "shared", _resolvent_probe, "probe(4R) within factor 4 of probe(R)"),
}


def _measure(name, inst):
    _, _, fn, _ = CHECKS[name]
    try:
        return inst.index, [(float(v), float(b)) for v, b in fn(inst)], None
    except DaeError as exc:
        return inst.index, [], f"{type(exc).__name__}: {exc}"


def _measure_args(args):
    return _measure(*args)


def run_check(name, seed=0, count=None, inject_fault=False, workers=1):
    """Run one named check and return its :class:`CheckResult`.

    ``inject_fault`` corrupts the first measurement (harness self-test).
    """
    crit, family, _, tol = CHECKS[name]
    res = CheckResult(name, crit, tol)
    if family is None:
        rows = [(0, _negative_measurements(), None)]
    else:
        insts = instance_family(seed, family, count)
        jobs = [(name, inst) for inst in insts]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(_measure_args, jobs))
        else:
            rows = [_measure(*job) for job in jobs]
    for idx, meas, err in sorted(rows, key=lambda r: r[0]):
        res.instances += 1
        if err is not None:
            res.errors.append((idx, err))
        res.measured.extend((idx, v, b) for v, b in meas)
    if inject_fault and res.measured:
        i, v, b = res.measured[0]
        res.measured[0] = (i, v + 1.0 + 1e3 * abs(b), b)
    return res


@dataclass
class SuiteReport:
    seed: int
    results: list

    @property
    def passed(self):
        return all(r.passed for r in self.results)

    def to_dict(self):
        return {
            "seed": self.seed,
            "passed": self.passed,
            "checks": [r.summary() for r in self.results],
        }


def _resolve_names(only):
    if not only:
        return list(CHECKS)
    names = []
    for item in only:
        item = str(item).strip()
        if item.isdigit():
            match = [k for k, v in CHECKS.items() if v[0] == int(item)]
            if not match:
                raise KeyError(item)
            names.extend(match)
        elif item in CHECKS:
            names.append(item)
        else:
            raise KeyError(item)
    return list(dict.fromkeys(names))


def run_suite(seed=0, count=None, only=None, inject_fault=False, workers=1):
    """Run the selected checks (all by default); ``only`` takes names or criterion numbers."""
    names = _resolve_names(only)
    return SuiteReport(
        int(seed), [run_check(nm, seed, count, inject_fault=inject_fault, workers=workers) for nm in names]
    )
