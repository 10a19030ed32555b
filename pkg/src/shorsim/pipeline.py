"""End-to-end factoring runs: pre-checks, simulated experiments, order
recovery through continued fractions, and factor extraction."""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .arithmetic import ArithParams, build_modexp
from .gates import RegisterLayout
from .oracles import modpow, outcome_table_oracle
from .simulator import (Distribution, ExponentialDecay, StaticDecay,
                        distribution_ed, distribution_ned,
                        fourier_first_register, init_state, run,
                        sample_schedule)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a reproducible experiment needs."""

    n: int = 15
    x: int | str = 7
    q: int = 130
    n_events: int = 10
    law: StaticDecay | ExponentialDecay = ExponentialDecay(2.5)
    watchdog: str = "on"
    seed: int = 1
    repetitions: int = 1
    samples: int = 20
    sample_from: str = "ned"  # or "ed": post-select runs with clean scratch


@dataclass(frozen=True)
class SampleTrace:
    c: int
    r2: int
    convergents: tuple[tuple[int, int], ...]
    verified_order: int | None


@dataclass
class RepetitionResult:
    ned: Distribution
    ed: Distribution
    samples: list[SampleTrace]
    order: int | None
    factors: set[int] | None


@dataclass
class FactorReport:
    n: int
    x: int
    q: int
    order: int | None
    factors: set[int] | None
    repetitions: list[RepetitionResult] = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    def to_json(self) -> str:
        samples = [{"c": s.c, "r2": s.r2,
                    "convergents": [list(cv) for cv in s.convergents],
                    "verified_r": s.verified_order}
                   for rep in self.repetitions for s in rep.samples]
        payload = {"order": self.order,
                   "factors": sorted(self.factors) if self.factors else None,
                   "samples": samples, "stats": self.stats}
        return json.dumps(payload, sort_keys=True)


def ideal_distribution(n: int, x: int, q: int,
                       r2: int | None = None) -> Distribution | np.ndarray:
    """Noise-free outcome table from the analytic formula.

    With ``r2`` given, returns just that column; an ``r2`` that the map
    a -> x**a mod n never attains yields an empty slice.
    """
    table = outcome_table_oracle(n, x, q)
    if r2 is None:
        return Distribution(table, "exact")
    attained = {pow(x, k, n) for k in range(q)}
    if r2 not in attained:
        return np.empty(0)
    return table[:, r2]


def convergents(p: int, q: int) -> list[tuple[int, int]]:
    """All continued-fraction convergents of p/q, starting from 0/1."""
    num0, num1 = 1, 0
    den0, den1 = 0, 1
    out = []
    while q:
        k = p // q
        p, q = q, p - k * q
        num0, num1 = k * num0 + num1, num0
        den0, den1 = k * den0 + den1, den0
        out.append((num0, den0))
    return out


def continued_fraction_order(c: int, q: int, n: int, x: int,
                             ) -> tuple[int | None, list[tuple[int, int]]]:
    """Recover the order of x mod n from a measured first-register value.

    Expands c/q in continued fractions and, for every convergent denominator
    r' below n, tests multiples m*r' < n for x**(m*r') = 1.  Multiples are
    needed because a small q can park the peak on a reduced fraction (for
    instance c = q/2).  Returns (least verified order or None, convergents
    tried).  c = 0 carries no information and always fails.
    """
    if not 0 <= c < q:
        raise ValueError(f"measured value {c} outside [0, {q})")
    if c == 0:
        return None, []
    tried = convergents(c, q)
    found = set()
    for _, denom in tried:
        if denom >= n or denom == 0:
            continue
        multiple = denom
        while multiple < n:
            if modpow(x, multiple, n) == 1:
                found.add(multiple)
                break
            multiple += denom
    return (min(found) if found else None), tried


def extract_factors(x: int, r: int, n: int) -> tuple[set[int] | None, str | None]:
    """Turn a verified order into factors of n, or explain why it cannot.

    Returns (factors, None) on success; (None, reason) when r is odd or
    x**(r/2) = -1 (mod n), the two cases the gcd trick cannot use.
    """
    if modpow(x, r, n) != 1:
        raise ValueError(f"{r} is not a valid order of {x} mod {n}")
    if r % 2 == 1:
        return None, "r odd"
    half = modpow(x, r // 2, n)
    if half == n - 1:
        return None, "x^(r/2) = -1 (mod n)"
    return {math.gcd(half - 1, n), math.gcd(half + 1, n)}, None


def _sample_outcomes(dist: Distribution, q: int, count: int,
                     rng: np.random.Generator) -> list[tuple[int, int]]:
    flat = dist.table.ravel()
    total = flat.sum()
    if total <= 0:
        return []
    picks = rng.choice(flat.size, size=count, p=flat / total)
    width = dist.table.shape[1]
    return [(int(p) // width, int(p) % width) for p in picks]


def run_experiment(cfg: ExperimentConfig) -> FactorReport:
    """Full pipeline: pre-checks, simulated runs, sampling, factor extraction.

    A base sharing a factor with n short-circuits before any quantum work.
    Otherwise the exponentiation network is built once and every repetition
    gets its own derived seed, noise schedule and measurement samples.
    """
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n
    if n % 2 == 0 or _is_prime(n):
        warnings.warn(f"n={n} is even or prime; the run is only a demonstration",
                      stacklevel=2)
    x = cfg.x
    if x == "random":
        x = int(rng.integers(2, n))
    g = math.gcd(x, n)
    if g != 1:
        return FactorReport(n, x, cfg.q, None, {g, n // g},
                            stats={"shortcut": f"gcd({x}, {n}) = {g}",
                                   "success_rate": 1.0})

    params = ArithParams.create(n, x, cfg.q)
    layout = RegisterLayout.for_factoring(params.bits, q=cfg.q)
    net = build_modexp(params, layout)
    rep_seeds = [int(s.generate_state(1)[0])
                 for s in np.random.SeedSequence(cfg.seed).spawn(cfg.repetitions)]

    cached = None
    report = FactorReport(n, x, cfg.q, None, None)
    successes = 0
    orders: dict[int, int] = {}
    for rep_seed in rep_seeds:
        if cfg.n_events == 0 and cached is not None:
            ned, ed = cached
        else:
            schedule = sample_schedule(cfg.n_events, layout.qubit_count,
                                       rep_seed, cfg.law)
            state = run(init_state(cfg.q, layout), net, schedule, cfg.watchdog)
            state = fourier_first_register(state, cfg.q, layout)
            ned = distribution_ned(state, layout, cfg.q)
            ed = distribution_ed(state, layout, cfg.q)
            if cfg.n_events == 0:
                cached = (ned, ed)
        rep_rng = np.random.default_rng(rep_seed)
        source = ned if cfg.sample_from == "ned" else ed
        traces = []
        rep_order = None
        for c, r2 in _sample_outcomes(source, cfg.q, cfg.samples, rep_rng):
            order, tried = continued_fraction_order(c, cfg.q, n, x)
            traces.append(SampleTrace(c, r2, tuple(tried), order))
            if order is not None and rep_order is None:
                rep_order = order
        factors = None
        if rep_order is not None:
            orders[rep_order] = orders.get(rep_order, 0) + 1
            factors, _reason = extract_factors(x, rep_order, n)
            if factors and any(1 < f < n for f in factors):
                successes += 1
            else:
                factors = None
        report.repetitions.append(RepetitionResult(ned, ed, traces,
                                                   rep_order, factors))
    report.order = min((o for o, cnt in orders.items()
                        if cnt == max(orders.values())), default=None)
    for rep in report.repetitions:
        if rep.factors:
            report.factors = rep.factors
            break
    report.stats = {"repetitions": cfg.repetitions,
                    "samples_per_repetition": cfg.samples,
                    "success_rate": successes / max(cfg.repetitions, 1),
                    "orders_seen": orders}
    return report


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True
