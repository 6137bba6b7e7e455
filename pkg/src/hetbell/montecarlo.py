"""Trial executor, statistics, and table-row production.

Each trial owns a private counter-based RNG substream keyed by (master
seed, trial index), so results are bitwise identical for any worker count
and any chunking of the trial range. Aggregation is a commutative integer
sum; rates and means are derived once at the end.
"""

from __future__ import annotations

import concurrent.futures
import multiprocessing
from dataclasses import dataclass, field, replace
from statistics import NormalDist

from . import protocols
from .codes import CODE_NAMES, DEFAULT_BUDGETS, PHYSICAL, STEANE7, SURFACE3, get_code
from .noise import (
    NoiseModel,
    PERFECT_SOURCE,
    RawBellDistribution,
    RngStream,
    STANDARD_SOURCE,
    werner_source,
)
from .protocols import SCHEMES, TrialStats, build_pair, final_evaluate, make_context

SOURCES = ("eq4", "werner", "perfect")


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one table row bit-exactly."""

    scheme: str
    code_a: str
    code_b: str
    rounds: int
    p: float
    trials: int
    seed: int
    jobs: int = 1
    source: str = "eq4"
    source_fidelity: float = 0.85
    meas_mode: str = "pauli"
    postselect: str = "measured"
    first_round_basis: str = "z"
    unrotate_final: bool = False
    surface_budget: int = DEFAULT_BUDGETS[SURFACE3]

    def validate(self) -> None:
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        for name in (self.code_a, self.code_b):
            if name not in CODE_NAMES:
                raise ValueError(f"unknown code {name!r}; expected one of {CODE_NAMES}")
        if self.scheme == protocols.BASELINE and (
            self.code_a != PHYSICAL or self.code_b != PHYSICAL
        ):
            raise ValueError("baseline scheme requires --code-a physical --code-b physical")
        if self.rounds < 0:
            raise ValueError("rounds must be >= 0")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        if self.source not in SOURCES:
            raise ValueError(f"unknown source {self.source!r}; expected one of {SOURCES}")
        if not 0.0 <= self.source_fidelity <= 1.0:
            raise ValueError("source fidelity must lie in [0, 1]")
        if self.meas_mode not in ("pauli", "flip"):
            raise ValueError("meas_mode must be 'pauli' or 'flip'")
        if self.postselect not in ("measured", "oracle_all"):
            raise ValueError("postselect must be 'measured' or 'oracle_all'")
        if self.first_round_basis not in ("z", "x"):
            raise ValueError("first_round_basis must be 'z' or 'x'")
        if self.surface_budget < 13:
            raise ValueError("surface budget must cover the 13-qubit block")


def resolve_source(cfg: RunConfig) -> RawBellDistribution:
    if cfg.source == "eq4":
        return STANDARD_SOURCE
    if cfg.source == "perfect":
        return PERFECT_SOURCE
    return werner_source(cfg.source_fidelity)


@dataclass(frozen=True)
class TableRow:
    """One output record: raw counts plus derived rates and resource means."""

    rounds: int
    trials: int
    x_count: int
    z_count: int
    merged_count: int
    raw_pairs: int
    kq_total: int
    n_1q_total: int
    n_2q_total: int
    attempts: tuple[int, ...] = field(default=())
    successes: tuple[int, ...] = field(default=())

    @property
    def x_rate(self) -> float:
        return self.x_count / self.trials

    @property
    def z_rate(self) -> float:
        return self.z_count / self.trials

    @property
    def merged_rate(self) -> float:
        return self.merged_count / self.trials

    @property
    def inefficiency(self) -> float:
        return self.raw_pairs / self.trials

    @property
    def kq_mean(self) -> float:
        return self.kq_total / self.trials

    @property
    def n_1q_mean(self) -> float:
        return self.n_1q_total / self.trials

    @property
    def n_2q_mean(self) -> float:
        return self.n_2q_total / self.trials

    def ci(self, which: str, confidence: float = 0.95) -> tuple[float, float]:
        count = {"x": self.x_count, "z": self.z_count, "merged": self.merged_count}[which]
        return wilson_interval(count, self.trials, confidence)

    def round_success_frequency(self, level: int) -> float:
        """Observed success frequency of purification attempts at a level."""
        if level >= len(self.attempts) or self.attempts[level] == 0:
            raise ValueError(f"no attempts recorded at level {level}")
        return self.successes[level] / self.attempts[level]


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Standard Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0 <= successes <= trials:
        raise ValueError("successes must lie in [0, trials]")
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must lie in (0, 1)")
    z = NormalDist().inv_cdf(0.5 + confidence / 2.0)
    p_hat = successes / trials
    denom = 1.0 + z * z / trials
    center = (p_hat + z * z / (2.0 * trials)) / denom
    margin = (z / denom) * (p_hat * (1.0 - p_hat) / trials + z * z / (4.0 * trials * trials)) ** 0.5
    return (max(0.0, center - margin), min(1.0, center + margin))


def _trial_sums(cfg: RunConfig, start: int, count: int):
    """Run trials [start, start+count) and return commutative integer sums."""
    code_a = get_code(cfg.code_a, cfg.surface_budget)
    code_b = get_code(cfg.code_b, cfg.surface_budget)
    noise = NoiseModel(cfg.p, cfg.meas_mode)
    source = resolve_source(cfg)
    n_levels = cfg.rounds + 1
    x = z = merged = raw = kq = n1 = n2 = 0
    attempts = [0] * n_levels
    successes = [0] * n_levels
    for i in range(start, start + count):
        stats = TrialStats(cfg.rounds)
        ctx = make_context(
            RngStream(cfg.seed, i),
            noise,
            source,
            cfg.postselect,
            cfg.first_round_basis,
            stats,
        )
        pair = build_pair(ctx, cfg.scheme, cfg.rounds, code_a, code_b)
        xe, ze = final_evaluate(pair, unrotate=cfg.unrotate_final)
        x += xe
        z += ze
        merged += xe | ze
        raw += pair.ledger.raw_pairs
        kq += pair.ledger.kq
        n1 += pair.ledger.n_1q
        n2 += pair.ledger.n_2q
        for lvl in range(1, n_levels):
            attempts[lvl] += stats.attempts[lvl]
            successes[lvl] += stats.successes[lvl]
    return (x, z, merged, raw, kq, n1, n2, tuple(attempts), tuple(successes))


def run_row(cfg: RunConfig) -> TableRow:
    """Execute one configuration, optionally across worker processes.

    The result is bitwise identical for any jobs value: every trial's
    randomness is a pure function of (seed, trial index) and the
    aggregation is an order-insensitive sum.
    """
    cfg.validate()
    jobs = min(cfg.jobs, cfg.trials)
    if jobs <= 1:
        sums = _trial_sums(cfg, 0, cfg.trials)
    else:
        chunk = cfg.trials // jobs
        ranges = []
        pos = 0
        for w in range(jobs):
            n = chunk + (1 if w < cfg.trials % jobs else 0)
            ranges.append((pos, n))
            pos += n
        ctx = multiprocessing.get_context("fork")
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs, mp_context=ctx) as pool:
            parts = list(pool.map(_chunk_worker, [(cfg, s, n) for s, n in ranges]))
        sums = _merge_sums(parts)
    x, z, merged, raw, kq, n1, n2, attempts, successes = sums
    return TableRow(
        rounds=cfg.rounds,
        trials=cfg.trials,
        x_count=x,
        z_count=z,
        merged_count=merged,
        raw_pairs=raw,
        kq_total=kq,
        n_1q_total=n1,
        n_2q_total=n2,
        attempts=attempts,
        successes=successes,
    )


def _chunk_worker(args):
    cfg, start, count = args
    return _trial_sums(cfg, start, count)


def _merge_sums(parts):
    x = z = merged = raw = kq = n1 = n2 = 0
    attempts = None
    successes = None
    for part in parts:
        x += part[0]
        z += part[1]
        merged += part[2]
        raw += part[3]
        kq += part[4]
        n1 += part[5]
        n2 += part[6]
        if attempts is None:
            attempts = list(part[7])
            successes = list(part[8])
        else:
            for i, v in enumerate(part[7]):
                attempts[i] += v
            for i, v in enumerate(part[8]):
                successes[i] += v
    return (x, z, merged, raw, kq, n1, n2, tuple(attempts), tuple(successes))


# Published table layout: (scheme, code_a, code_b) per table number; each
# table sweeps p over 1e-3 (a), 1e-4 (b), 1e-5 (c) and rounds over 0..4.
TABLE_SPECS: dict[int, tuple[str, str, str]] = {
    1: (protocols.BASELINE, PHYSICAL, PHYSICAL),
    2: (protocols.BEFORE, STEANE7, SURFACE3),
    3: (protocols.AFTER, STEANE7, SURFACE3),
    4: (protocols.STRICT, STEANE7, SURFACE3),
    5: (protocols.STRICT, STEANE7, PHYSICAL),
    6: (protocols.STRICT, SURFACE3, PHYSICAL),
}

TABLE_P_VALUES: tuple[float, ...] = (1e-3, 1e-4, 1e-5)
TABLE_ROUNDS: tuple[int, ...] = (0, 1, 2, 3, 4)


def run_table(table: int, base: RunConfig) -> dict[float, list[TableRow]]:
    """All rows of one published table: {p: [row for rounds 0..4]}.

    Every row reuses the master seed, so a row is reproducible standalone
    by feeding the same seed back through ``run_row``.
    """
    if table not in TABLE_SPECS:
        raise ValueError(f"table must be one of {sorted(TABLE_SPECS)}")
    scheme, code_a, code_b = TABLE_SPECS[table]
    out: dict[float, list[TableRow]] = {}
    for p in TABLE_P_VALUES:
        rows = []
        for rounds in TABLE_ROUNDS:
            cfg = replace(base, scheme=scheme, code_a=code_a, code_b=code_b, rounds=rounds, p=p)
            rows.append(run_row(cfg))
        out[p] = rows
    return out


def run_plotdata(base: RunConfig, schemes=SCHEMES, p_values=TABLE_P_VALUES):
    """(inefficiency, merged rate) series per scheme per p for external
    plotting; the baseline series uses physical pairs, the rest the
    configured code pair."""
    series = []
    for p in p_values:
        for scheme in schemes:
            if scheme == protocols.BASELINE:
                code_a = code_b = PHYSICAL
            else:
                code_a, code_b = base.code_a, base.code_b
            for rounds in TABLE_ROUNDS:
                cfg = replace(
                    base, scheme=scheme, code_a=code_a, code_b=code_b, rounds=rounds, p=p
                )
                row = run_row(cfg)
                series.append((p, scheme, row))
    return series
