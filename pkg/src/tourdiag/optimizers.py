"""Derivative-free optimisers over projection bases, fully traced.

Three optimisers share one outer loop: find a target basis better than the
current one, then walk to it along a geodesic, logging every frame.

* ``crs``: creeping random search. Candidates are orthonormalized blends
  ``(1 - alpha) A_cur + alpha A_rand``; the first candidate beating the current
  index becomes the target; ``alpha`` is cooled once per outer iteration.
* ``sa``: the same sampling, but a worse candidate at inner try ``l`` is still
  taken with probability ``min(exp(-|dI| / T(l)), 1)``, ``T(l) = T0 / log(l + 1)``.
* ``pd``: pseudo-derivative. Probes ``2n`` bases at angle ``delta`` around the
  current basis, then line-searches the best probe's geodesic over
  ``[-pi/4, pi/4]``.

``polish`` is a finishing pass: batches of candidates, best-of-batch acceptance
and ``alpha`` shrinking inside the inner loop, stopping once the improvement is
too small to tell apart.

Each run owns three generator streams spawned from ``config.seed``: one for
candidate bases, one for noisy index evaluations and one for acceptance draws.
"""

import math
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Optional

import numpy as np

from . import indexes as _indexes
from .manifold import (
    DegenerateBasisError,
    check_basis,
    geodesic_distance,
    geodesic_path,
    geodesic_step,
    linear_blend,
    orient_match,
    random_basis,
)
from .trace import TraceLog

METHODS = ("crs", "sa", "pd", "polish")
TERMINATION_REASONS = ("l_max_exhausted", "too_close", "polish_threshold", "iteration_cap")
PD_WINDOW = math.pi / 4


@dataclass
class PolishConfig:
    candidates: int = 100
    min_dist: float = 1e-3
    min_rel_index: float = 1e-5
    min_alpha: float = 0.01
    alpha0: float = 0.5
    cooling: float = 0.9
    l_max: int = 25


@dataclass
class OptimizerConfig:
    method: str = "crs"
    alpha0: float = 0.5
    cooling: float = 0.99
    l_max: int = 25
    T0: float = 0.01
    pd_directions: int = 4
    pd_delta: float = 0.01
    pd_line_evals: int = 20
    # None resolves to on for crs/polish, off for sa/pd
    interrupt: Optional[bool] = None
    orient: bool = True
    # fresh evaluation of the current basis before each inner loop (noisy indexes only);
    # None resolves to on for sa/pd, off for crs/polish so crs anchors stay monotone
    reevaluate: Optional[bool] = None
    step_angle: float = 0.05
    seed: int = 0
    min_geodesic_dist: float = 1e-3
    max_iter: int = 5000
    polish: PolishConfig = field(default_factory=PolishConfig)

    def __post_init__(self):
        if isinstance(self.polish, dict):
            self.polish = PolishConfig(**self.polish)
        self.method = self.method.lower()
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {METHODS}")
        if not 0.0 < self.alpha0 <= 1.0:
            raise ValueError(f"alpha0 must lie in (0, 1], got {self.alpha0}")
        if not 0.0 < self.cooling <= 1.0:
            raise ValueError(f"cooling must lie in (0, 1], got {self.cooling}")
        if self.l_max < 1:
            raise ValueError("l_max must be at least 1")
        if self.T0 <= 0:
            raise ValueError("T0 must be positive")
        if self.step_angle <= 0:
            raise ValueError("step_angle must be positive")
        if self.pd_directions < 1 or self.pd_line_evals < 3 or self.pd_delta <= 0:
            raise ValueError("invalid pseudo-derivative settings")

    @property
    def interrupts(self):
        if self.interrupt is None:
            return self.method in ("crs", "polish")
        return bool(self.interrupt)

    @property
    def reevaluates(self):
        if self.reevaluate is None:
            return self.method in ("sa", "pd")
        return bool(self.reevaluate)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def updated(self, **changes):
        return replace(self, **changes)


@dataclass
class RunResult:
    final_basis: np.ndarray
    final_index: float
    trace: TraceLog
    iterations: int
    terminated_by: str
    start_basis: np.ndarray
    start_index: float


def sa_temperature(T0, l):
    return T0 / math.log(l + 1)


def sa_accept_probability(delta, T0, l):
    """``min(exp(-|delta| / T(l)), 1)`` with ``T(l) = T0 / log(l + 1)``."""
    return min(math.exp(-abs(delta) / sa_temperature(T0, l)), 1.0)


def sa_accepts(delta, T0, l, rng):
    """One annealing draw: accept a candidate worse by ``delta`` when ``P > U``."""
    return sa_accept_probability(delta, T0, l) > rng.random()


def golden_section_max(f, a, b, n_evals):
    """Maximise ``f`` on ``[a, b]`` with exactly ``n_evals`` evaluations.

    Returns ``(x, fx, extra)`` for the best point evaluated, where ``extra`` is
    whatever ``f`` returned alongside its value.
    """
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    best = None

    def probe(x):
        nonlocal best
        fx, extra = f(x)
        if best is None or fx > best[1]:
            best = (x, fx, extra)
        return fx

    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = probe(c), probe(d)
    for _ in range(n_evals - 2):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = probe(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = probe(d)
    return best


class _Run:
    """Shared state of a single optimisation: data, streams, trace, counters."""

    def __init__(self, X, index, config, method, log=None, p=None, d=None):
        self.X = np.asarray(X, dtype=float)
        self.index = _indexes.get_index(index) if isinstance(index, str) else index
        self.config = config
        self.method = method
        search, noise, accept = np.random.SeedSequence(config.seed).spawn(3)
        self.search_rng = np.random.default_rng(search)
        self.index_rng = np.random.default_rng(noise)
        self.accept_rng = np.random.default_rng(accept)
        self.p = self.X.shape[1] if p is None else p
        self.d = d
        self.log = log if log is not None else TraceLog()

    def init_metadata(self, d):
        self.d = d
        meta = self.log.metadata
        meta.setdefault("p", self.p)
        meta.setdefault("d", d)
        meta.setdefault("n", int(self.X.shape[0]))
        meta.setdefault("index", self.index.name)
        meta.setdefault("seed", self.config.seed)
        meta.setdefault("method", self.method)
        meta.setdefault("interrupt", self.config.interrupts)
        meta.setdefault("orient", self.config.orient)
        meta.setdefault("config", self.config.to_dict())

    def evaluate(self, A):
        return _indexes.evaluate(self.index, self.X, A, self.index_rng)

    def refresh(self, A, value):
        """Current value for the next comparison; redrawn for noisy indexes if configured."""
        if self.index.smooth or not self.config.reevaluates:
            return value
        return self.evaluate(A)

    def emit(self, A, value, state, j, l, alpha=math.nan):
        return self.log.append(A, value, state, j, l, self.method, alpha)

    def random_basis(self):
        return random_basis(self.p, self.d, self.search_rng)

    def blend_candidate(self, current, alpha):
        while True:
            try:
                return linear_blend(current, self.random_basis(), alpha)
            except DegenerateBasisError:
                continue

    def start(self, start, d):
        if start is None:
            if d is None:
                raise ValueError("need either a start basis or a projection dimension d")
            self.init_metadata(d)
            start = self.random_basis()
        else:
            start = check_basis(start)
            if start.shape[0] != self.p:
                raise ValueError(f"start basis has {start.shape[0]} rows, data has {self.p} columns")
            self.init_metadata(start.shape[1])
        return start

    def finish(self, A, value, j, l, alpha, reason, start, start_value):
        self.emit(A, value, "final", j, l, alpha)
        return RunResult(A.copy(), float(value), self.log, j - 1, reason, start, float(start_value))


def interpolate_leg(run, current, target, target_value, j, alpha=math.nan):
    """Walk the geodesic from ``current`` to ``target``, logging each frame.

    The target is orientation-matched first when ``config.orient`` is set. With
    interruption on, the walk stops at the best frame and only frames up to it
    are logged. Returns ``(basis, index_value)`` of where the walk ended.
    """
    config = run.config
    if config.orient:
        target = orient_match(current, target)
    path = geodesic_path(current, target, config.step_angle)
    frames = list(path.frames[1:]) or [target]
    values = [run.evaluate(F) for F in frames[:-1]] + [target_value]
    stop = len(frames) - 1
    if config.interrupts:
        stop = int(np.argmax(values))
    for l, (F, v) in enumerate(zip(frames[:stop + 1], values[:stop + 1]), start=1):
        run.emit(F, v, "interpolation", j, l, alpha)
    return frames[stop], values[stop]


def _random_search(run, start, annealing):
    config = run.config
    A_cur = start
    I_cur = run.evaluate(A_cur)
    start_value = I_cur
    alpha = config.alpha0
    run.emit(A_cur, I_cur, "start", 1, 1, alpha)
    j, l = 1, 1
    while True:
        j += 1
        if j - 1 > config.max_iter:
            return run.finish(A_cur, I_cur, j - 1, l, alpha, "iteration_cap", start, start_value)
        accepted = None
        I_cur = run.refresh(A_cur, I_cur)
        for l in range(1, config.l_max + 1):
            A_l = run.blend_candidate(A_cur, alpha)
            I_l = run.evaluate(A_l)
            if I_l > I_cur:
                accepted = (A_l, I_l)
                break
            if annealing and sa_accepts(I_cur - I_l, config.T0, l, run.accept_rng):
                accepted = (A_l, I_l)
                break
            run.emit(A_l, I_l, "random_search", j, l, alpha)
        if accepted is None:
            return run.finish(A_cur, I_cur, j, l, alpha, "l_max_exhausted", start, start_value)

        target, I_target = accepted
        if config.orient:
            target = orient_match(A_cur, target)
        run.emit(target, I_target, "new_basis", j, l, alpha)
        leg_alpha = alpha
        alpha *= config.cooling
        if geodesic_distance(A_cur, target) < config.min_geodesic_dist:
            return run.finish(target, I_target, j, l, leg_alpha, "too_close", start, start_value)
        A_cur, I_cur = interpolate_leg(run, A_cur, target, I_target, j, leg_alpha)


def crs(X, index, config=None, start=None, d=None):
    """Creeping random search. Give either a ``start`` basis or the dimension ``d``."""
    config = _resolve(config, "crs")
    run = _Run(X, index, config, "crs")
    return _random_search(run, run.start(start, d), annealing=False)


def sa(X, index, config=None, start=None, d=None):
    """Simulated annealing on top of the creeping random search sampler."""
    config = _resolve(config, "sa")
    run = _Run(X, index, config, "sa")
    return _random_search(run, run.start(start, d), annealing=True)


def _pd_try(run, A_cur, j, l):
    config = run.config
    probes = []
    for _ in range(config.pd_directions):
        while True:
            R = orient_match(A_cur, run.random_basis())
            if geodesic_distance(A_cur, R) > 1e-6:
                break
        for sign in (1.0, -1.0):
            B = geodesic_step(A_cur, R, sign * config.pd_delta)
            value = run.evaluate(B)
            run.emit(B, value, "direction_search", j, l)
            probes.append((value, B, R, sign))
    best_value, best_B, R, sign = max(probes, key=lambda pr: pr[0])
    run.emit(best_B, best_value, "best_direction_search", j, l)

    def along(s):
        B = geodesic_step(A_cur, R, sign * s)
        return run.evaluate(B), B

    _, I_line, A_star = golden_section_max(along, -PD_WINDOW, PD_WINDOW, config.pd_line_evals)
    # score the winner afresh: for a noisy index the line-search maximum is biased upward
    I_star = I_line if run.index.smooth else run.evaluate(A_star)
    run.emit(A_star, I_star, "best_line_search", j, l)
    return A_star, I_star


def pd(X, index, config=None, start=None, d=None):
    """Pseudo-derivative search: probe directions, then a 90 degree line search."""
    config = _resolve(config, "pd")
    run = _Run(X, index, config, "pd")
    start = run.start(start, d)
    A_cur = start
    I_cur = run.evaluate(A_cur)
    start_value = I_cur
    run.emit(A_cur, I_cur, "start", 1, 1)
    j, l = 1, 1
    while True:
        j += 1
        if j - 1 > config.max_iter:
            return run.finish(A_cur, I_cur, j - 1, l, math.nan, "iteration_cap", start, start_value)
        accepted = None
        I_cur = run.refresh(A_cur, I_cur)
        for l in range(1, config.l_max + 1):
            A_star, I_star = _pd_try(run, A_cur, j, l)
            p_diff = (I_star - I_cur) / I_star if I_star > 0 else -math.inf
            if p_diff > 0.001:
                accepted = (A_star, I_star)
                break
        if accepted is None:
            return run.finish(A_cur, I_cur, j, l, math.nan, "l_max_exhausted", start, start_value)
        target, I_target = accepted
        if config.orient:
            target = orient_match(A_cur, target)
        run.emit(target, I_target, "new_basis", j, l)
        if geodesic_distance(A_cur, target) < config.min_geodesic_dist:
            return run.finish(target, I_target, j, l, math.nan, "too_close", start, start_value)
        A_cur, I_cur = interpolate_leg(run, A_cur, target, I_target, j)


def polish(X, index, start, config=None):
    """Refine ``start`` with batched candidates in a shrinking neighbourhood.

    The result never has a lower index value than ``start`` (for a smooth index).
    """
    config = _resolve(config, "polish")
    pc = config.polish
    run = _Run(X, index, config, "polish")
    start = run.start(start, None)
    A_cur = start
    I_cur = run.evaluate(A_cur)
    start_value = I_cur
    alpha = pc.alpha0
    run.emit(A_cur, I_cur, "start", 1, 1, alpha)
    j, l = 1, 1
    while True:
        j += 1
        if j - 1 > config.max_iter:
            return run.finish(A_cur, I_cur, j - 1, l, alpha, "iteration_cap", start, start_value)
        best = None
        batch_alpha = alpha
        for l in range(1, pc.l_max + 1):
            batch_alpha = alpha
            for _ in range(pc.candidates):
                C = run.blend_candidate(A_cur, alpha)
                value = run.evaluate(C)
                run.emit(C, value, "polish_search", j, l, alpha)
                if best is None or value > best[1]:
                    best = (C, value)
            if best[1] > I_cur:
                break
            best = None
            alpha *= pc.cooling
            if alpha <= pc.min_alpha:
                break
        if best is None:
            reason = "polish_threshold" if alpha <= pc.min_alpha else "l_max_exhausted"
            return run.finish(A_cur, I_cur, j, l, alpha, reason, start, start_value)

        target, I_target = best
        rel_change = (I_target - I_cur) / abs(I_cur) if I_cur != 0 else math.inf
        if (geodesic_distance(A_cur, target) <= pc.min_dist
                or rel_change <= pc.min_rel_index
                or batch_alpha <= pc.min_alpha):
            return run.finish(A_cur, I_cur, j, l, alpha, "polish_threshold", start, start_value)
        if config.orient:
            target = orient_match(A_cur, target)
        run.emit(target, I_target, "new_basis", j, l, batch_alpha)
        A_cur, I_cur = interpolate_leg(run, A_cur, target, I_target, j, batch_alpha)


_RUNNERS = {"crs": crs, "sa": sa, "pd": pd}


def _resolve(config, method):
    if config is None:
        return OptimizerConfig(method=method)
    if isinstance(config, dict):
        config = OptimizerConfig.from_dict(config)
    if config.method != method:
        config = config.updated(method=method)
    return config


def optimize(X, index, config, start=None, d=None):
    """Dispatch on ``config.method``."""
    if config.method == "polish":
        if start is None:
            raise ValueError("polish needs a start basis")
        return polish(X, index, start, config)
    return _RUNNERS[config.method](X, index, config, start=start, d=d)
