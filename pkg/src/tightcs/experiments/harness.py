"""Seeded experiment plans, single trials and the parallel experiment runner.

A plan is a grid of cells (sweep point x method) with ``trials_per_cell``
trials each.  Trial ``(cell, trial)`` runs on
``seed = hash64(master_seed, cell, trial)``.  Frame, sensing, signal and
noise draws use ``hash64(seed, 0..3)`` unless the plan pins a seed, so
every record is a function of the plan alone.
"""

import functools
import itertools
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .. import bounds
from ..frames import build_frame, norm_11
from ..noise import NoiseSpec, ads_lambda, alasso_mu, draw_noise, l2_noise_bound
from ..rng import hash64, make_rng
from ..sensing import SensingSpec, design_low_rip, designed_sensing, draw_sensing, drip_exact
from ..solvers import RecoveryProblem, Separation, SolverConfig, solve
from .signals import SignalSpec, generate_signal

__all__ = [
    "MethodRule",
    "ExperimentPlan",
    "TrialRecord",
    "CellSummary",
    "load_plan",
    "run_trial",
    "run_experiment",
    "aggregate_records",
    "SWEEP_AXES",
]

SWEEP_AXES = ("m", "s", "sigma", "s_prime")
ALL_METHODS = ("abp", "ads", "alasso", "sabp", "sads", "salasso")
PLAN_KEYS = ("frame", "sensing", "signal", "noise", "methods", "sweep",
             "trials_per_cell", "master_seed", "outputs")
SUCCESS_RTOL = 1e-4


@dataclass(frozen=True)
class MethodRule:
    """A method and how its parameter is chosen: a fixed ``value`` or the noise formula."""

    name: str
    value: float = None

    def __post_init__(self):
        if self.name not in ALL_METHODS:
            raise ValueError(f"unknown method {self.name!r}; expected one of {ALL_METHODS}")

    @property
    def base(self):
        return self.name[1:] if self.name.startswith("s") and self.name[1:] in ALL_METHODS else self.name

    @property
    def separating(self):
        return self.name != self.base

    def to_dict(self):
        if self.value is None:
            return {"name": self.name, "rule": "paper_formula"}
        return {"name": self.name, "value": self.value}


@dataclass
class ExperimentPlan:
    """Declarative experiment description (see :func:`load_plan` for the JSON form)."""

    frame: dict
    sensing: dict
    signal: dict
    noise: dict
    methods: list
    sweep: dict = field(default_factory=dict)
    trials_per_cell: int = 1
    master_seed: int = 0
    outputs: dict = field(default_factory=dict)
    solver: dict = field(default_factory=dict)
    certify: dict = None

    def __post_init__(self):
        self.methods = [m if isinstance(m, MethodRule) else _parse_method(m) for m in self.methods]
        if not self.methods:
            raise ValueError("plan needs at least one method")
        unknown = set(self.sweep) - set(SWEEP_AXES)
        if unknown:
            raise ValueError(f"unknown sweep axes {sorted(unknown)}; allowed {SWEEP_AXES}")
        for axis, grid in self.sweep.items():
            if not isinstance(grid, (list, tuple)) or not grid:
                raise ValueError(f"sweep axis {axis!r} needs a nonempty list")
        if self.trials_per_cell < 1:
            raise ValueError("trials_per_cell must be >= 1")
        if "kind" not in self.frame or "n" not in self.frame:
            raise ValueError("frame needs 'kind' and 'n'")
        if "kind" not in self.sensing:
            raise ValueError("sensing needs 'kind'")

    @property
    def points(self):
        axes = [a for a in SWEEP_AXES if a in self.sweep]
        return [dict(zip(axes, combo)) for combo in itertools.product(*(self.sweep[a] for a in axes))]

    @property
    def cells(self):
        """``[(point, method), ...]`` with methods varying fastest."""
        return [(p, m) for p in self.points for m in self.methods]

    @property
    def n_trials(self):
        return len(self.cells) * self.trials_per_cell

    def to_dict(self):
        d = {k: getattr(self, k) for k in PLAN_KEYS}
        d["methods"] = [m.to_dict() for m in self.methods]
        if self.solver:
            d["solver"] = self.solver
        if self.certify is not None:
            d["certify"] = self.certify
        return d


def _parse_method(m):
    if isinstance(m, str):
        return MethodRule(m)
    rule = m.get("rule", "paper_formula" if "value" not in m else "explicit")
    if rule == "paper_formula":
        return MethodRule(m["name"])
    if rule != "explicit" or "value" not in m:
        raise ValueError(f"method {m!r} needs rule 'paper_formula' or an explicit 'value'")
    return MethodRule(m["name"], float(m["value"]))


def load_plan(source):
    """Build a plan from a JSON path, JSON text or a dict.

    Required top-level keys: frame, sensing, signal, noise, methods, sweep,
    trials_per_cell, master_seed, outputs.  Optional: solver (SolverConfig
    fields), certify (``{"budget": ...}`` to compute exact D-RIP constants
    and theorem bounds per trial).
    """
    if isinstance(source, dict):
        data = source
    elif isinstance(source, str) and source.lstrip().startswith("{"):
        data = json.loads(source)
    else:
        with open(source) as fh:
            data = json.load(fh)
    missing = [k for k in PLAN_KEYS if k not in data]
    if missing:
        raise ValueError(f"plan is missing keys {missing}")
    extra = set(data) - set(PLAN_KEYS) - {"solver", "certify"}
    if extra:
        raise ValueError(f"plan has unknown keys {sorted(extra)}")
    return ExperimentPlan(**data)


@dataclass
class TrialRecord:
    cell_index: int
    trial_index: int
    seed: int
    method: str
    m: int
    n: int
    d: int
    s: int
    s_prime: int
    sigma: float
    lambda_or_mu_or_eps: float
    error_l2: float
    error_e: float
    objective: float
    bound: float
    feasibility_margin: float
    converged: bool
    wall_time_ms: float = None
    certified: bool = False
    delta: float = None
    f_norm: float = None
    iterations: int = 0
    note: str = ""

    def to_dict(self):
        return asdict(self)


CSV_FIELDS = tuple(f.name for f in fields(TrialRecord))[:18]


@functools.lru_cache(maxsize=8)
def _designed_matrix(m, n, order, seed, target):
    B, _ = design_low_rip(m, n, order, seed=seed, target=target)
    return B


def _settings(plan, point):
    sensing = dict(plan.sensing)
    signal = dict(plan.signal)
    noise = dict(plan.noise)
    if "m" in point:
        sensing["m"] = int(point["m"])
    if "s" in point:
        signal["s"] = int(point["s"])
    if "sigma" in point:
        noise["sigma"] = float(point["sigma"])
    if "s_prime" in point:
        noise["s_prime"] = int(point["s_prime"])
    return sensing, signal, noise


def _sub_seed(section, seed, k):
    return int(section["seed"]) if "seed" in section else hash64(seed, k)


def _draw_frame(spec, seed):
    return build_frame(spec["kind"], int(spec["n"]), spec.get("d"), seed=seed, path=spec.get("path"))


def _draw_sensing(spec, F, seed):
    kind = spec["kind"]
    m = int(spec["m"])
    if kind == "low_rip":
        B = _designed_matrix(m, F.n, int(spec.get("order", 3)), int(spec.get("design_seed", 0)),
                             spec.get("target"))
        return designed_sensing(B, F, make_rng(seed))
    return draw_sensing(SensingSpec(kind, m, F.n, seed=seed, path=spec.get("path")))


def _parameter(rule, noise_spec, m, d_total):
    if rule.value is not None:
        return rule.value
    sigma = noise_spec.sigma
    if rule.base == "ads":
        return ads_lambda(sigma, d_total)
    if rule.base == "alasso":
        return alasso_mu(sigma, d_total)
    if noise_spec.model == "bounded":
        return noise_spec.epsilon
    return l2_noise_bound(sigma, m)[0]


def _certify(plan, rule, A, F, z, param, s, tails, s_prime):
    """Exact-delta bound and the realized noise event; ``(bound, delta, certified)``."""
    if plan.certify is None or rule.separating or rule.base == "abp":
        return math.nan, None, False
    order = min(3 * s, F.d)
    budget = int(plan.certify.get("budget", 10**5))
    if math.comb(F.d, order) > budget:
        return math.nan, None, False
    delta = drip_exact(A, F, order, budget=budget).delta
    limit = 0.5 if rule.base == "ads" else 0.25
    if delta >= limit:
        return math.nan, delta, False
    inputs = bounds.BoundInputs(delta=delta, s=s, param=param, tails=tails,
                                s_prime=s_prime, norm11=norm_11(F))
    if rule.base == "ads":
        bound = bounds.ads_bound(inputs).bound
        event = param
    else:
        bound = bounds.alasso_bound(inputs).bound
        event = param / 2.0
    corr = float(np.max(np.abs(F.D.T @ (A.T @ z))))
    return bound, delta, bool(corr <= event)


def _solver_config(plan):
    cfg = dict(plan.solver)
    if "pdhg_steps" in cfg and cfg["pdhg_steps"] is not None:
        cfg["pdhg_steps"] = tuple(cfg["pdhg_steps"])
    return SolverConfig(**cfg)


def run_trial(plan, cell_index, trial_index):
    """Run one trial; solver trouble is recorded in the record, never raised."""
    point, rule = plan.cells[cell_index]
    seed = hash64(plan.master_seed, cell_index, trial_index)
    sensing, signal, noise = _settings(plan, point)
    F = _draw_frame(plan.frame, _sub_seed(plan.frame, seed, 0))
    A = _draw_sensing(sensing, F, _sub_seed(sensing, seed, 1))
    m = A.shape[0]
    sig_spec = SignalSpec(**{k: v for k, v in signal.items() if k != "seed"})
    f, tails = generate_signal(sig_spec, F, seed=_sub_seed(signal, seed, 2))

    omega = None
    if noise.get("omega"):
        omega = _draw_frame(noise["omega"], _sub_seed(noise["omega"], seed, 4))
    noise_spec = NoiseSpec(**{k: v for k, v in noise.items() if k not in ("omega", "seed")},
                           omega=omega)
    draw = draw_noise(noise_spec, m, _sub_seed(noise, seed, 3))
    y = A @ f + draw.z + draw.e
    s_prime = noise_spec.s_prime if noise_spec.has_sparse else 0
    d_total = F.d + ((omega.d if omega is not None else m) if rule.separating else 0)
    param = float(_parameter(rule, noise_spec, m, d_total))

    record = TrialRecord(
        cell_index=cell_index, trial_index=trial_index, seed=seed, method=rule.name,
        m=m, n=F.n, d=F.d, s=sig_spec.s, s_prime=s_prime, sigma=noise_spec.sigma,
        lambda_or_mu_or_eps=param, error_l2=math.nan, error_e=None, objective=math.nan,
        bound=math.nan, feasibility_margin=math.nan, converged=False,
        f_norm=float(np.linalg.norm(f)), note=draw.warning,
    )
    start = time.perf_counter()
    try:
        separation = Separation(omega=omega, s_prime=s_prime) if rule.separating else None
        problem = RecoveryProblem(sensing=A, frame=F, y=y, method=rule.base, param=param,
                                  separation=separation)
        out = solve(problem, _solver_config(plan))
        record.error_l2 = float(np.linalg.norm(out.f_hat - f))
        if rule.separating:
            record.error_e = float(np.linalg.norm(out.e_hat - draw.e))
        record.objective = float(out.objective)
        record.feasibility_margin = float(out.feasibility_margin)
        record.converged = bool(out.converged)
        record.iterations = int(out.iterations)
        record.bound, record.delta, record.certified = _certify(
            plan, rule, A, F, draw.z + draw.e, param, sig_spec.s, tails, s_prime)
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        record.note = f"{type(exc).__name__}: {exc}"
    record.wall_time_ms = 1000.0 * (time.perf_counter() - start)
    return record


@dataclass
class CellSummary:
    cell_index: int
    method: str
    point: dict
    trials: int
    mean_error_l2: float
    median_error_l2: float
    success_rate: float
    mean_bound: float
    certified: int
    bound_violations: int
    converged: int

    def to_dict(self):
        return asdict(self)


def aggregate_records(records, plan=None):
    """Per-cell summary, folded over records sorted by ``(cell_index, trial_index)``."""
    records = sorted(records, key=lambda r: (r.cell_index, r.trial_index))
    out = []
    for cell, group in itertools.groupby(records, key=lambda r: r.cell_index):
        group = list(group)
        errs = np.array([r.error_l2 for r in group], dtype=np.float64)
        finite = errs[np.isfinite(errs)]
        bnds = np.array([r.bound for r in group], dtype=np.float64)
        bnds = bnds[np.isfinite(bnds)]
        success = sum(1 for r in group
                      if np.isfinite(r.error_l2) and r.error_l2 <= SUCCESS_RTOL * (r.f_norm or 0.0))
        cert = [r for r in group if r.certified]
        out.append(CellSummary(
            cell_index=cell,
            method=group[0].method,
            point=dict(plan.cells[cell][0]) if plan is not None else {},
            trials=len(group),
            mean_error_l2=float(finite.mean()) if finite.size else math.nan,
            median_error_l2=float(np.median(finite)) if finite.size else math.nan,
            success_rate=success / len(group),
            mean_bound=float(bnds.mean()) if bnds.size else math.nan,
            certified=len(cert),
            bound_violations=sum(1 for r in cert if not r.error_l2 <= r.bound),
            converged=sum(1 for r in group if r.converged),
        ))
    return out


def _run_chunk(plan_dict, items):
    plan = load_plan(plan_dict)
    return [run_trial(plan, c, t) for c, t in items]


def run_experiment(plan, workers=None):
    """Run every trial of ``plan`` and return ``(records, aggregate)``.

    ``workers`` defaults to ``$FR_WORKERS`` or 1.  One worker runs inline;
    more use a process pool.  Each trial is a pure function of
    ``(plan, cell, trial)`` and records are sorted before aggregation, so
    the output does not depend on the worker count.
    """
    if not isinstance(plan, ExperimentPlan):
        plan = load_plan(plan)
    if workers is None:
        workers = int(os.environ.get("FR_WORKERS", "1"))
    workers = max(1, int(workers))
    items = [(c, t) for c in range(len(plan.cells)) for t in range(plan.trials_per_cell)]
    if workers == 1:
        records = [run_trial(plan, c, t) for c, t in items]
    else:
        chunks = [c for c in (items[i::workers] for i in range(workers)) if c]
        with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
            futures = [pool.submit(_run_chunk, plan.to_dict(), chunk) for chunk in chunks]
            records = [r for fut in futures for r in fut.result()]
    records.sort(key=lambda r: (r.cell_index, r.trial_index))
    return records, aggregate_records(records, plan)
