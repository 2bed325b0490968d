"""Built-in test problems, convergence studies and perturbation studies."""
from __future__ import annotations

import csv
import enum
import io
import logging
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from math import gamma
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .core import (InvalidArgumentError, RhsFunction, TemperedOrder, TvpError,
                   TvpSpec, steps_to)
from .shooting import ShootingConfig, solve_tvp
from .solvers import BackwardDifference, MethodChoice, NonpolyCollocation, PredictorCorrector

log = logging.getLogger(__name__)

A = 0.5


# -- registry -----------------------------------------------------------------

def _example1(alpha, lam):
    c = gamma(alpha + 1) / (2 ** (1 - alpha) * math.exp(lam / 2))
    k1 = 3 * gamma(3) / (4 * gamma(3 - alpha))
    k2 = gamma(5) / gamma(5 - alpha)

    def f(t, y):
        p = t ** 4 + 0.75 * t * t
        return np.exp(-lam * t) * (k1 * t ** (2 - alpha) + k2 * t ** (4 - alpha) + c * p) - c * y

    def exact(t):
        return (t ** 4 + 0.75 * t * t) * np.exp(-lam * t)

    rhs = RhsFunction(f, lipschitz_estimate=c, exact_solution=exact)
    return TvpSpec(TemperedOrder(alpha, lam), rhs, A, 0.25, horizon=1.0)


def _example2(alpha, lam):
    k = gamma(3) / gamma(3 - alpha)

    def f(t, y):
        return np.exp(-lam * t) * k * t ** (2 - alpha) - 3 * t ** 4 * np.exp(-2 * lam * t) + 3 * y * y

    def exact(t):
        return t * t * np.exp(-lam * t)

    rhs = RhsFunction(f, exact_solution=exact)
    return TvpSpec(TemperedOrder(alpha, lam), rhs, A, 0.25, horizon=1.0)


def _example3(alpha, lam):
    k = gamma(2.5) / gamma(2.5 - alpha)

    def f(t, y):
        return np.exp(-lam * t) * k * t ** (1.5 - alpha) + 0.0 * y

    def exact(t):
        return t ** 1.5 * np.exp(-lam * t)

    rhs = RhsFunction(f, lipschitz_estimate=0.0, exact_solution=exact)
    return TvpSpec(TemperedOrder(alpha, lam), rhs, A, A ** 1.5, horizon=1.0)


def example4_coefficient(alpha, lam, a=A):
    return gamma(alpha + 1) / (3 * math.exp(lam * a) * a ** alpha)


def _example4(alpha, lam):
    k = example4_coefficient(alpha, lam)

    def f(t, y):
        return 2 * t + k * np.sin(y)

    rhs = RhsFunction(f, lipschitz_estimate=k, sup_estimate=2 * A + k)
    # y(a) = 1, stored in weighted form
    return TvpSpec(TemperedOrder(alpha, lam), rhs, A, math.exp(lam * A), horizon=A)


@dataclass(frozen=True)
class RegistryProblem:
    name: str
    builder: Callable[[float, float], TvpSpec]
    default_step_base: float


REGISTRY: Dict[str, RegistryProblem] = {
    "example1": RegistryProblem("example1", _example1, A),
    "example2": RegistryProblem("example2", _example2, 1.0),
    "example3": RegistryProblem("example3", _example3, 1.0),
    "example4": RegistryProblem("example4", _example4, A),
}


def problem_name(name) -> str:
    key = str(name).lower()
    if key.isdigit():
        key = "example" + key
    if key not in REGISTRY:
        raise InvalidArgumentError(f"unknown example {name!r}; choose from {sorted(REGISTRY)}")
    return key


def registry_build(name, alpha: float, lam: float) -> TvpSpec:
    return REGISTRY[problem_name(name)].builder(alpha, lam)


# -- tables --------------------------------------------------------------------

CONVERGENCE_COLUMNS = ("n", "h", "alpha", "y0", "err_a", "err_b", "max_err", "eoc")
PERTURB_COLUMNS = ("eps", "h", "dev")
TRAJECTORY_COLUMNS = ("eps", "alpha", "t", "y")


@dataclass(frozen=True)
class StudyRow:
    n: int
    h: float
    alpha: float
    y0: float
    err_a: float
    err_b: float
    max_err: float
    eoc: Optional[float] = None
    failure: Optional[str] = None

    def cells(self):
        return (self.n, self.h, self.alpha, self.y0, self.err_a, self.err_b, self.max_err, self.eoc)


@dataclass(frozen=True)
class PerturbRow:
    eps: float
    h: float
    dev: float
    failure: Optional[str] = None

    def cells(self):
        return (self.eps, self.h, self.dev)


@dataclass(frozen=True)
class TrajectoryRow:
    eps: float
    alpha: float
    t: float
    y: float

    def cells(self):
        return (self.eps, self.alpha, self.t, self.y)


@dataclass(frozen=True)
class PointRow:
    t: float
    y: float

    def cells(self):
        return (self.t, self.y)


@dataclass
class StudyTable:
    columns: Tuple[str, ...]
    rows: list = field(default_factory=list)

    @property
    def failures(self):
        return [r for r in self.rows if getattr(r, "failure", None)]


def trajectory_table(traj) -> StudyTable:
    table = StudyTable(("t", "y"))
    table.rows.extend(PointRow(float(t), float(v)) for t, v in zip(traj.t, traj.values))
    return table


def eoc(errors: Sequence[Tuple[int, float]]) -> List[Optional[float]]:
    """p = log2(e_N / e_2N) for each consecutive pair; None where undefined."""
    out = []
    for (n0, e0), (n1, e1) in zip(errors, errors[1:]):
        if n1 != 2 * n0:
            raise InvalidArgumentError(f"consecutive n must double, got {n0} -> {n1}")
        ok = e0 is not None and e1 is not None and e0 > 0 and e1 > 0 \
            and math.isfinite(e0) and math.isfinite(e1)
        out.append(math.log2(e0 / e1) if ok else None)
    return out


def shooting_n(tvp: TvpSpec, n: int, step_base: float) -> int:
    """Steps on [0, a] for step size h = step_base / n."""
    return steps_to(tvp.a, step_base / n)


def _convergence_cell(name, alpha, lam, n, step_base, cfg):
    tvp = registry_build(name, alpha, lam)
    h = step_base / n
    try:
        sol = solve_tvp(tvp, replace(cfg, ivp_n=shooting_n(tvp, n, step_base)))
    except TvpError as exc:
        nan = float("nan")
        return StudyRow(n, h, alpha, nan, nan, nan, nan, failure=str(exc))
    traj = sol.trajectory
    err = np.abs(traj.values - tvp.f.exact_solution(traj.t))
    k_a = steps_to(tvp.a, traj.grid.h)
    return StudyRow(n, traj.grid.h, alpha, sol.y0, float(err[k_a]), float(err[-1]),
                    float(err.max()))


def _run_cells(fn, args_list, jobs):
    if jobs and jobs > 1 and len(args_list) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, *zip(*args_list)))
    return [fn(*args) for args in args_list]


def convergence_study(name, alpha_list: Sequence[float], lam: float, method: MethodChoice,
                      n_list: Sequence[int], shooting_cfg: Optional[ShootingConfig] = None,
                      step_base: Optional[float] = None, jobs: int = 1) -> StudyTable:
    """Shoot, then compare with the exact solution on [0, horizon].

    Rows are ordered by (alpha, n).  ``step_base`` fixes h = step_base / n
    (defaults to the problem's usual convention).  Failed cells keep NaN
    errors and a ``failure`` message.
    """
    name = problem_name(name)
    if registry_build(name, alpha_list[0], lam).f.exact_solution is None:
        raise InvalidArgumentError(f"{name} has no exact solution")
    if step_base is None:
        step_base = REGISTRY[name].default_step_base
    cfg = replace(shooting_cfg or ShootingConfig(), method=method)
    n_list = sorted(int(n) for n in n_list)
    args = [(name, al, lam, n, step_base, cfg) for al in alpha_list for n in n_list]
    cells = _run_cells(_convergence_cell, args, jobs)
    table = StudyTable(CONVERGENCE_COLUMNS)
    for i, al in enumerate(alpha_list):
        rows = cells[i * len(n_list):(i + 1) * len(n_list)]
        try:
            p = eoc([(r.n, r.max_err) for r in rows])
        except InvalidArgumentError:
            p = [None] * (len(rows) - 1)
        table.rows.append(rows[0])
        table.rows.extend(replace(r, eoc=q) for r, q in zip(rows[1:], p))
    return table


# -- perturbations -------------------------------------------------------------

class PerturbKind(enum.Enum):
    TerminalValue = "bc"
    RhsShift = "f"
    Lambda = "lambda"
    Alpha = "alpha"

    @classmethod
    def parse(cls, text):
        if isinstance(text, cls):
            return text
        for k in cls:
            if text in (k.value, k.name):
                return k
        raise InvalidArgumentError(f"unknown perturbation kind {text!r}")


def perturbed_problem(tvp: TvpSpec, kind: PerturbKind, eps: float) -> TvpSpec:
    """The base problem with one ingredient perturbed by ``eps``.

    Terminal data are perturbed in the unweighted value y(a).  The source
    perturbation is eps * exp(-lam t), i.e. a constant shift of the
    transformed right-hand side.
    """
    kind = PerturbKind.parse(kind)
    if not eps > 0:
        raise InvalidArgumentError(f"perturbation must be positive, got {eps}")
    alpha, lam, a = tvp.order.alpha, tvp.order.lam, tvp.a
    if kind is PerturbKind.TerminalValue:
        return replace(tvp, ya=tvp.ya + math.exp(lam * a) * eps)
    if kind is PerturbKind.RhsShift:
        base = tvp.f.eval

        def f(t, y):
            return base(t, y) + eps * np.exp(-lam * t)

        rhs = replace(tvp.f, eval=f, exact_solution=None)
        return replace(tvp, f=rhs)
    if kind is PerturbKind.Lambda:
        return replace(tvp, order=TemperedOrder(alpha, lam + eps), ya=tvp.ya * math.exp(eps * a))
    if not alpha + eps < 1:
        raise InvalidArgumentError(f"alpha + eps = {alpha + eps} leaves (0, 1)")
    return replace(tvp, order=TemperedOrder(alpha + eps, lam))


def _perturb_cells(name, alpha, lam, kind, eps_list, n, step_base, cfg):
    tvp = registry_build(name, alpha, lam)
    h = step_base / n
    cfg = replace(cfg, ivp_n=shooting_n(tvp, n, step_base))
    try:
        y = solve_tvp(tvp, cfg).trajectory.values
    except TvpError as exc:
        return [PerturbRow(e, h, float("nan"), str(exc)) for e in eps_list]
    rows = []
    for e in eps_list:
        try:
            z = solve_tvp(perturbed_problem(tvp, kind, e), cfg).trajectory.values
            rows.append(PerturbRow(e, h, float(np.max(np.abs(y - z)))))
        except TvpError as exc:
            rows.append(PerturbRow(e, h, float("nan"), str(exc)))
    return rows


def perturbation_study(kind, eps_list: Sequence[float], n_list: Sequence[int],
                       shooting_cfg: Optional[ShootingConfig] = None, name="example4",
                       alpha: float = 0.5, lam: float = 2.0,
                       step_base: Optional[float] = None, jobs: int = 1) -> StudyTable:
    """max_i |y_i - z_i| between base and perturbed solutions on a shared grid.

    Rows are ordered by (n, eps).  For the Alpha kind use
    ``alpha_trajectories`` instead.
    """
    kind = PerturbKind.parse(kind)
    if kind is PerturbKind.Alpha:
        raise InvalidArgumentError("alpha perturbations are reported as trajectories")
    name = problem_name(name)
    if step_base is None:
        step_base = REGISTRY[name].default_step_base
    cfg = shooting_cfg or ShootingConfig()
    args = [(name, alpha, lam, kind, tuple(eps_list), int(n), step_base, cfg)
            for n in sorted(n_list)]
    table = StudyTable(PERTURB_COLUMNS)
    for rows in _run_cells(_perturb_cells, args, jobs):
        table.rows.extend(rows)
    return table


def alpha_trajectories(eps_list: Sequence[float], n: int,
                       shooting_cfg: Optional[ShootingConfig] = None, name="example4",
                       alpha: float = 0.5, lam: float = 2.0,
                       step_base: Optional[float] = None) -> StudyTable:
    """Trajectories of the base problem (eps = 0) and of each alpha + eps."""
    name = problem_name(name)
    if step_base is None:
        step_base = REGISTRY[name].default_step_base
    tvp = registry_build(name, alpha, lam)
    cfg = replace(shooting_cfg or ShootingConfig(), ivp_n=shooting_n(tvp, n, step_base))
    table = StudyTable(TRAJECTORY_COLUMNS)
    for e in [0.0] + list(eps_list):
        spec = tvp if e == 0 else perturbed_problem(tvp, PerturbKind.Alpha, e)
        traj = solve_tvp(spec, cfg).trajectory
        table.rows.extend(TrajectoryRow(e, spec.order.alpha, float(t), float(v))
                          for t, v in zip(traj.t, traj.values))
    return table


def monotonicity_check(alpha_list=(0.3, 0.7), n: int = 80, lam: float = 2.0,
                       shooting_cfg: Optional[ShootingConfig] = None) -> Dict[float, str]:
    """Classify example 4's numerical solution on [0, a] as increasing,
    decreasing or mixed, for each alpha.  Outcomes are logged, not asserted."""
    out = {}
    for al in alpha_list:
        tvp = registry_build("example4", al, lam)
        cfg = replace(shooting_cfg or ShootingConfig(), ivp_n=n)
        d = np.diff(solve_tvp(tvp, cfg).trajectory.values)
        out[al] = "increasing" if np.all(d > 0) else "decreasing" if np.all(d < 0) else "mixed"
        log.info("example4 alpha=%g: solution is %s on [0, a]", al, out[al])
    return out


# -- presets ---------------------------------------------------------------------

@dataclass(frozen=True)
class TablePreset:
    example: str
    method: MethodChoice
    alphas: Tuple[float, ...]
    n_list: Tuple[int, ...]
    step_base: float


THIRDS = (0.25, 0.5, 2.0 / 3.0)
PRESETS: Dict[str, TablePreset] = {
    "ex1-bdq": TablePreset("example1", BackwardDifference(), THIRDS, (10, 20, 40, 80, 160, 320), A),
    "ex2-abm": TablePreset("example2", PredictorCorrector(), THIRDS, (20, 40, 80, 160, 320), 1.0),
    "ex3-bdq": TablePreset("example3", BackwardDifference(), (0.5,), (20, 40, 80, 160, 320), 1.0),
    "ex3-colloc": TablePreset("example3", NonpolyCollocation(1), (0.5,), (20, 40, 80, 160, 320), 1.0),
}
PERTURB_N = (20, 40, 80, 160)
PERTURB_EPS = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5)


def run_preset(key: str, lam: float = 2.0, jobs: int = 1) -> StudyTable:
    p = PRESETS[key]
    return convergence_study(p.example, p.alphas, lam, p.method, p.n_list,
                             step_base=p.step_base, jobs=jobs)


# -- output ----------------------------------------------------------------------

def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return format(float(v), ".16e")


def table_text(table: StudyTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for r in table.rows:
        w.writerow([_fmt(v) for v in r.cells()])
    return buf.getvalue()


def emit_csv(table: StudyTable, destination) -> None:
    """Write ``table`` to a path (atomically) or to an open text stream."""
    text = table_text(table)
    if hasattr(destination, "write"):
        destination.write(text)
        return
    path = os.fspath(destination)
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
