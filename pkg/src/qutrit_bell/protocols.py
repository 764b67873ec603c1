"""Repeated-measurement protocols and their cumulative success probabilities.

Protocol 1: measure at the one-shot peak; on any failure reset every site
to |0> and start over. Success accumulates geometrically,
P(n) = 1 - (1-p)^n.

Protocol 2: after the symmetric failure outcome psi1 keep the conditional
state and measure again; reset only on the asymmetric outcomes psi2/psi3.
The measurement times t_1..t_n are chosen greedily, one step at a time,
according to one of three strategies; after a reset the same schedule is
replayed from the top (the run statistics are stationary), which is what
makes the cumulative recursion tractable:

    Pbar_n = p_S(1) + sum_j p_S(j) prod_{i<j} p_1(i)          (no reset)
    P_n    = Pbar_n + sum_j [prod_{i<j} p_1(i)] p_U(j) P_{n-j}

with p_U = p_2 + p_3 the per-step reset probability.

An explicit outcome-tree enumeration and a Monte Carlo sampler provide two
independent checks of the recursions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import measurement
from .dynamics import (DEFAULT_GRID_STEP, DEFAULT_REFINE_TOL, Eigensystem,
                       Wavefunction, amplitude_rows, enumerate_basis, evolve,
                       initial_state, refine_maximum, select_peak)
from .measurement import Outcome, outcome_distribution, post_state
from .topology import Graph

#: fraction of the window-max success probability below which a time is not
#: considered a meaningful measurement opportunity for the MinLoss strategy
MINLOSS_FLOOR = 0.1
#: per-step search window for schedule planning is [0, PLAN_WINDOW_FACTOR * N];
#: wider than the one-shot peak window because the conditional chains keep
#: re-peaking at late times
PLAN_WINDOW_FACTOR = 8.0


class Strategy(Enum):
    PEAK_SUCCESS = "peak-success"   # maximize p_S
    MIN_LOSS = "min-loss"           # minimize p_2 + p_3 where p_S is appreciable
    MAX_MARGIN = "max-margin"       # maximize p_S - (p_2 + p_3)


@dataclass(frozen=True)
class ScheduleStep:
    """One planned measurement: relative time and outcome probabilities."""

    time: float
    p_success: float       # Bell-heralded probability used in all accounting
    p1: float
    p2: float
    p3: float
    pS_projection: float

    @property
    def p_unusable(self) -> float:
        return self.p2 + self.p3


@dataclass
class Schedule:
    """Measurement plan for protocol 2 on a fixed graph.

    Times are relative to the previous measurement (or to the last reset);
    after a reset the schedule restarts from step 1. ``success_deficit``
    is nonzero only on graphs without the protocol symmetry, where the
    projection probability exceeds the Bell-heralded one; that excess is
    treated as one more way to lose the run (see ``reset_weight``).
    """

    strategy: str
    n_vertices: int
    steps: list[ScheduleStep] = field(default_factory=list)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.time for s in self.steps])

    def __len__(self) -> int:
        return len(self.steps)

    def p_success(self, k: int) -> float:
        return self.steps[k].p_success

    def p_continue(self, k: int) -> float:
        return self.steps[k].p1

    def reset_weight(self, k: int) -> float:
        """Probability that measurement k+1 forces a restart."""
        s = self.steps[k]
        return s.p_unusable + max(0.0, s.pS_projection - s.p_success)

    @property
    def success_deficit(self) -> float:
        return max(max(0.0, s.pS_projection - s.p_success) for s in self.steps)


def protocol1_cumulative(p: float, n: int) -> float:
    """Success probability within n independent repetitions, 1-(1-p)^n."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0,1], got {p}")
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return 1.0 - (1.0 - p) ** n


def protocol1_required(p: float, q: float) -> int:
    """Smallest n with 1-(1-p)^n >= q.

    Uses the logarithmic bound with an exact-boundary guard so that values
    of p landing precisely on an integer boundary round correctly.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0,1), got {p}")
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in (0,1), got {q}")
    n = int(np.ceil(np.log1p(-q) / np.log1p(-p)))
    n = max(n, 1)
    while protocol1_cumulative(p, n) < q:
        n += 1
    while n > 1 and protocol1_cumulative(p, n - 1) >= q:
        n -= 1
    return n


def _outcome_index_groups(g: Graph):
    n = g.n_vertices
    grp = measurement._index_groups(n)
    return grp["success"], grp["g1"], np.concatenate([grp["g2"], grp["g3"]])


def _pick_time(strategy: Strategy, t_grid, p_success, p_unusable) -> int:
    if strategy is Strategy.PEAK_SUCCESS:
        return int(np.argmax(p_success))
    if strategy is Strategy.MAX_MARGIN:
        return int(np.argmax(p_success - p_unusable))
    # MinLoss: the bare minimum of p_U sits at t=0 where nothing can be
    # measured; restrict to times with appreciable success probability.
    mask = p_success >= MINLOSS_FLOOR * p_success.max()
    idx = np.where(mask)[0]
    return int(idx[np.argmin(p_unusable[idx])])


def _choose_step_time(strategy: Strategy, e: Eigensystem, psi: Wavefunction,
                      t_grid: np.ndarray, grid_step: float, refine_tol: float,
                      succ_rows, u_rows) -> float:
    """Measurement time for the current conditional state, per strategy."""
    succ_amp = amplitude_rows(e, psi, succ_rows, t_grid)
    p_s = 0.5 * np.abs(succ_amp[0] + succ_amp[1]) ** 2
    if p_s.max() < 1e-15:
        raise RuntimeError("success probability identically zero over the "
                           "search window; cannot plan further measurements")
    u_amp = amplitude_rows(e, psi, u_rows, t_grid)
    p_u = np.sum(np.abs(u_amp) ** 2, axis=0)

    coeff = e.eigenvectors.T @ psi.amplitudes
    rows_s = e.eigenvectors[list(succ_rows), :]
    rows_u = e.eigenvectors[list(u_rows), :]

    def objective(t: float) -> float:
        ph = np.exp(-1j * e.eigenvalues * t) * coeff
        amp = rows_s @ ph
        ps = 0.5 * float(np.abs(amp[0] + amp[1]) ** 2)
        if strategy is Strategy.PEAK_SUCCESS:
            return ps
        pu = float(np.sum(np.abs(rows_u @ ph) ** 2))
        return -pu if strategy is Strategy.MIN_LOSS else ps - pu

    if strategy is Strategy.PEAK_SUCCESS:
        t_star, _ = select_peak(p_s, t_grid, objective, grid_step, refine_tol)
        return t_star
    k = _pick_time(strategy, t_grid, p_s, p_u)
    lo = max(0.0, float(t_grid[k]) - grid_step)
    hi = min(float(t_grid[-1]), float(t_grid[k]) + grid_step)
    t_star, f_star = refine_maximum(objective, lo, hi, refine_tol)
    if objective(float(t_grid[k])) >= f_star:
        return float(t_grid[k])
    return float(t_star)


def plan_protocol2(g: Graph, e: Eigensystem, strategy: Strategy = Strategy.PEAK_SUCCESS,
                   n_max: int = 10, t_max: float | None = None,
                   grid_step: float = DEFAULT_GRID_STEP,
                   refine_tol: float = DEFAULT_REFINE_TOL) -> Schedule:
    """Greedy per-step schedule for the conditional-reset protocol.

    Each step evolves the current conditional state from relative time 0,
    scans the strategy's objective over [0, t_max], refines the chosen
    extremum, records the outcome probabilities and conditions on psi1.
    The schedule is reused verbatim after every reset.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    if t_max is None:
        t_max = PLAN_WINDOW_FACTOR * g.n_vertices
    basis = enumerate_basis(g.n_vertices)
    succ_rows, g1_rows, u_rows = _outcome_index_groups(g)
    psi = initial_state(g, basis)
    t_grid = np.arange(0.0, t_max + grid_step, grid_step)
    sched = Schedule(strategy=strategy.value, n_vertices=g.n_vertices)
    for _ in range(n_max):
        t_star = _choose_step_time(strategy, e, psi, t_grid, grid_step,
                                   refine_tol, succ_rows, u_rows)
        phi = evolve(e, psi, t_star)
        dist = outcome_distribution(phi, g)
        sched.steps.append(ScheduleStep(
            time=float(t_star), p_success=dist.pS_bell, p1=dist.p1,
            p2=dist.p2, p3=dist.p3, pS_projection=dist.pS_projection))
        if dist.p1 < measurement.ZERO_PROB:
            break  # chain exhausted; remaining steps would condition on nothing
        psi = post_state(phi, Outcome.PSI1, g)
    return sched


def plan_regular(g: Graph, e: Eigensystem, tau: float, n_max: int) -> Schedule:
    """Fixed-interval fallback schedule: every measurement after time tau."""
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    basis = enumerate_basis(g.n_vertices)
    psi = initial_state(g, basis)
    sched = Schedule(strategy="regular", n_vertices=g.n_vertices)
    for _ in range(n_max):
        phi = evolve(e, psi, tau)
        dist = outcome_distribution(phi, g)
        sched.steps.append(ScheduleStep(
            time=tau, p_success=dist.pS_bell, p1=dist.p1,
            p2=dist.p2, p3=dist.p3, pS_projection=dist.pS_projection))
        if dist.p1 < measurement.ZERO_PROB:
            break
        psi = post_state(phi, Outcome.PSI1, g)
    return sched


def _padded(schedule: Schedule, n: int) -> list[tuple[float, float, float]]:
    """Per-step (p_success, p1, reset weight), padded with dead steps."""
    rows = [(schedule.p_success(k), schedule.p_continue(k), schedule.reset_weight(k))
            for k in range(len(schedule))]
    while len(rows) < n:
        rows.append((0.0, 1.0, 0.0))  # exhausted chain: nothing ever happens
    return rows[:n]


def protocol2_no_reset(schedule: Schedule, n: int | None = None) -> np.ndarray:
    """Cumulative success probabilities Pbar_1..Pbar_n along one run."""
    n = len(schedule) if n is None else n
    rows = _padded(schedule, n)
    out = np.empty(n)
    total, surv = 0.0, 1.0
    for k, (ps, p1, _) in enumerate(rows):
        total += ps * surv
        out[k] = total
        surv *= p1
    return out


def protocol2_total(schedule: Schedule, n: int | None = None) -> np.ndarray:
    """Total success probabilities P_1..P_n including restart branches."""
    n = len(schedule) if n is None else n
    rows = _padded(schedule, n)
    pbar = protocol2_no_reset(schedule, n)
    p = np.empty(n)
    for nn in range(1, n + 1):
        val = pbar[nn - 1]
        surv = 1.0
        for j in range(1, nn):
            val += surv * rows[j - 1][2] * p[nn - j - 1]
            surv *= rows[j - 1][1]
        p[nn - 1] = val
    return p


def enumerate_outcome_tree(schedule: Schedule, n: int) -> tuple[float, float]:
    """Brute-force check of the recursions: walk every outcome sequence.

    Returns (Pbar_n, P_n) by explicit depth-first enumeration of all
    outcome strings of length <= n, multiplying branch probabilities. Kept
    deliberately independent of the closed-form code above.
    """
    rows = _padded(schedule, n)
    totals = {"all": 0.0, "no_reset": 0.0}

    def walk(depth: int, pos: int, weight: float, had_reset: bool) -> None:
        if depth == n or weight == 0.0:
            return
        ps, p1, pu = rows[pos]
        totals["all"] += weight * ps
        if not had_reset:
            totals["no_reset"] += weight * ps
        walk(depth + 1, pos + 1, weight * p1, had_reset)
        walk(depth + 1, 0, weight * pu, True)

    walk(0, 0, 1.0, False)
    return totals["no_reset"], totals["all"]


@dataclass(frozen=True)
class LimitCheckReport:
    """Outcome of extending protocol 2 until a success target is reached."""

    target: float
    n_reached: int | None        # smallest n with P_n >= target, None if capped
    series: np.ndarray           # P_1..P_horizon
    schedule: Schedule
    one_shot_peak: float
    run_success_ok: bool         # per-run conditional success >= one-shot peak
    reset_bound_ok: bool         # geometric lower bound per reset count

    @property
    def reached(self) -> bool:
        return self.n_reached is not None


def _reset_count_masses(schedule: Schedule, n: int, m_max: int):
    """Distribution over (resets used) after n measurements.

    Returns (success_by_resets, alive_by_resets): cumulative success mass
    and still-undecided mass with at most m resets, for m = 0..m_max.
    """
    rows = _padded(schedule, n)
    horizon = len(rows)
    alive = np.zeros((horizon + 1, m_max + 1))
    alive[0, 0] = 1.0
    success = np.zeros(m_max + 1)
    for step in range(n):
        nxt = np.zeros_like(alive)
        for pos in range(horizon):
            for m in range(m_max + 1):
                w = alive[pos, m]
                if w == 0.0:
                    continue
                ps, p1, pu = rows[pos]
                success[m] += w * ps
                if pos + 1 <= horizon - 1:
                    nxt[pos + 1, m] += w * p1
                if m + 1 <= m_max:
                    nxt[0, m + 1] += w * pu
        alive = nxt
    cum_success = np.cumsum(success)
    cum_alive = np.cumsum(alive.sum(axis=0))
    return cum_success, cum_alive


def protocol2_limit_check(g: Graph, e: Eigensystem, q: float,
                          strategy: Strategy = Strategy.PEAK_SUCCESS,
                          max_measurements: int = 500,
                          t_max: float | None = None,
                          grid_step: float = DEFAULT_GRID_STEP,
                          refine_tol: float = DEFAULT_REFINE_TOL,
                          bound_resets: int = 3) -> LimitCheckReport:
    """Extend the schedule lazily until P_n >= q or the cap is hit.

    Also asserts the numerically checkable form of the convergence
    argument: every completed run succeeds with conditional probability at
    least the one-shot peak, hence success within m+1 runs is at least
    1-(1-p)^(m+1); both facts are checked on the planned horizon.
    """
    if not 0.0 < q < 1.0:
        raise ValueError(f"target q must lie in (0,1), got {q}")
    schedule = plan_protocol2(g, e, strategy, n_max=1, t_max=t_max,
                              grid_step=grid_step, refine_tol=refine_tol)
    basis = enumerate_basis(g.n_vertices)
    succ_rows, g1_rows, u_rows = _outcome_index_groups(g)
    if t_max is None:
        t_max = PLAN_WINDOW_FACTOR * g.n_vertices
    t_grid = np.arange(0.0, t_max + grid_step, grid_step)

    # conditional state after the steps planned so far
    psi = initial_state(g, basis)
    chain_alive = True
    for s in schedule.steps:
        phi = evolve(e, psi, s.time)
        psi = post_state(phi, Outcome.PSI1, g)

    n_reached = None
    series = protocol2_total(schedule, 1)
    n = 1
    while n < max_measurements:
        if series[-1] >= q:
            n_reached = n
            break
        # extend by one measurement
        if chain_alive:
            t_star = _choose_step_time(strategy, e, psi, t_grid, grid_step,
                                       refine_tol, succ_rows, u_rows)
            phi = evolve(e, psi, t_star)
            dist = outcome_distribution(phi, g)
            schedule.steps.append(ScheduleStep(
                time=t_star, p_success=dist.pS_bell, p1=dist.p1,
                p2=dist.p2, p3=dist.p3, pS_projection=dist.pS_projection))
            if dist.p1 < measurement.ZERO_PROB:
                chain_alive = False
            else:
                psi = post_state(phi, Outcome.PSI1, g)
        n += 1
        series = protocol2_total(schedule, n)
        if series[-1] >= q:
            n_reached = n
            break

    p_peak = schedule.p_success(0)
    pbar = protocol2_no_reset(schedule, n)
    surv = np.cumprod([1.0] + [schedule.p_continue(k) for k in range(min(len(schedule), n) - 1)])
    reset_mass = sum(surv[k] * schedule.reset_weight(k)
                     for k in range(min(len(schedule), n)))
    run_success_ok = pbar[-1] + 1e-9 >= p_peak and (
        pbar[-1] / max(pbar[-1] + reset_mass, 1e-300) + 1e-9 >= p_peak)
    succ_m, alive_m = _reset_count_masses(schedule, n, bound_resets)
    reset_bound_ok = all(
        succ_m[m] + alive_m[m] + 1e-9 >= 1.0 - (1.0 - p_peak) ** (m + 1)
        for m in range(bound_resets + 1))
    return LimitCheckReport(target=q, n_reached=n_reached, series=series,
                            schedule=schedule, one_shot_peak=p_peak,
                            run_success_ok=run_success_ok,
                            reset_bound_ok=reset_bound_ok)


@dataclass(frozen=True)
class TrajectoryStats:
    """Sampled outcomes of running a schedule many times."""

    trials: int
    successes_by_step: np.ndarray   # count of first successes at step k+1
    resets: int
    seed: int

    def cumulative_success(self) -> np.ndarray:
        return np.cumsum(self.successes_by_step)

    def empirical_p(self, n: int) -> float:
        return float(self.cumulative_success()[n - 1]) / self.trials


def monte_carlo(g: Graph, e: Eigensystem, schedule: Schedule, trials: int,
                seed: int, max_steps: int | None = None) -> TrajectoryStats:
    """Sample trajectories of protocol 2 from the planned schedule.

    Each trial draws an outcome per measurement from the schedule's
    recorded probabilities: success ends the trial, psi1 advances to the
    next schedule position, psi2/psi3 (and, on asymmetric graphs, the
    non-Bell part of the both-positive outcome) reset to position zero.
    Vectorized over trials; deterministic for a given seed.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if len(schedule) == 0:
        raise ValueError("schedule has no steps")
    if schedule.n_vertices != g.n_vertices:
        raise ValueError("schedule was planned for a different graph size")
    n_steps = len(schedule) if max_steps is None else max_steps
    rows = _padded(schedule, n_steps)
    ps = np.array([r[0] for r in rows])
    p1 = np.array([r[1] for r in rows])

    rng = np.random.default_rng(seed)
    pos = np.zeros(trials, dtype=np.int64)
    active = np.ones(trials, dtype=bool)
    successes = np.zeros(n_steps, dtype=np.int64)
    resets = 0
    for step in range(n_steps):
        u = rng.random(trials)
        cur = np.minimum(pos, len(rows) - 1)
        ps_k, p1_k = ps[cur], p1[cur]
        win = active & (u < ps_k)
        cont = active & ~win & (u < ps_k + p1_k)
        lose = active & ~win & ~cont
        successes[step] = int(win.sum())
        resets += int(lose.sum())
        active &= ~win
        pos[cont] += 1
        pos[lose] = 0
    return TrajectoryStats(trials=trials, successes_by_step=successes,
                           resets=resets, seed=seed)


@dataclass(frozen=True)
class ProtocolReport:
    """Protocol-2 series next to the matched protocol-1 baseline."""

    cumulative_no_reset: np.ndarray
    cumulative_total: np.ndarray
    required_measurements: dict[float, int]
    schedule: Schedule


def build_protocol_report(schedule: Schedule, targets=(0.90, 0.95, 0.99),
                          n: int | None = None) -> ProtocolReport:
    n = len(schedule) if n is None else n
    pbar = protocol2_no_reset(schedule, n)
    ptot = protocol2_total(schedule, n)
    required = {}
    p1shot = schedule.p_success(0)
    for q in targets:
        required[q] = protocol1_required(p1shot, q)
    return ProtocolReport(cumulative_no_reset=pbar, cumulative_total=ptot,
                          required_measurements=required, schedule=schedule)
