"""Sim-vs-real predictivity metrics.

SRCC is the sample Pearson correlation over a paired dataset of per-method
accuracies {(s_1, r_1), ..., (s_n, r_n)} measured in simulation and on the
reference backend. Rank reversals are discordant pairs: method pairs whose
ordering flips between the two columns. A pair strictly ordered in one
column but tied in the other counts as a reversal; this is the convention
under which the bundled benchmark reproduces its published counts (9 and 5).

The module also ships that benchmark: SPL of nine navigation models in a
real room versus two simulator configurations of its virtual replica
(challenge-style sliding=on/noise=0 and test-style sliding=off/noise=0),
plus the same models on a large scanned-scene dataset.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from nav2real.errors import CorrelationUndefinedError, DomainError


@dataclass(frozen=True)
class MethodPair:
    method: str
    sim: float
    real: float
    sim_se: float = 0.0
    real_se: float = 0.0


@dataclass
class PairedResults:
    """Per-method (sim, real) accuracy pairs for one metric."""

    pairs: list
    metric: str = "spl"

    def __post_init__(self):
        for p in self.pairs:
            if not (0.0 <= p.sim <= 1.0 and 0.0 <= p.real <= 1.0):
                raise DomainError(f"accuracies must be in [0, 1]: {p}")

    def sims(self):
        return [p.sim for p in self.pairs]

    def reals(self):
        return [p.real for p in self.pairs]


@dataclass
class SRCCReport:
    srcc: float
    discordant: int
    total_pairs: int
    reversal_fraction: float
    metric: str
    pairs: list = field(default_factory=list)


def pearson(xs, ys):
    """Sample Pearson correlation coefficient.

    Requires at least 3 points and non-constant vectors; otherwise the
    correlation is undefined and CorrelationUndefinedError is raised.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise DomainError("pearson needs two equal-length vectors")
    if len(xs) < 3:
        raise CorrelationUndefinedError("need at least 3 points")
    xm = xs - xs.mean()
    ym = ys - ys.mean()
    sx = float((xm * xm).sum())
    sy = float((ym * ym).sum())
    if sx == 0.0 or sy == 0.0:
        raise CorrelationUndefinedError("correlation undefined for a constant vector")
    return float((xm * ym).sum() / math.sqrt(sx * sy))


def discordant_pairs(xs, ys):
    """Count rank reversals between two paired vectors.

    A pair (i, j) counts when the orderings strictly oppose, or when exactly
    one of the two differences is zero (ordered in one column, tied in the
    other). Returns (count, fraction of all n*(n-1)/2 pairs).
    """
    xs = list(xs)
    ys = list(ys)
    if len(xs) != len(ys) or len(xs) < 2:
        raise DomainError("discordant_pairs needs two equal-length vectors (n >= 2)")
    n = len(xs)
    count = 0
    for i in range(n):
        for j in range(i + 1, n):
            dx = xs[i] - xs[j]
            dy = ys[i] - ys[j]
            if dx * dy < 0:
                count += 1
            elif (dx == 0) != (dy == 0):
                count += 1
    total = n * (n - 1) // 2
    return count, count / total


def srcc_report(paired):
    """Bundle Pearson SRCC with the reversal count for one paired dataset."""
    sims = paired.sims()
    reals = paired.reals()
    srcc = pearson(sims, reals)
    count, fraction = discordant_pairs(sims, reals)
    return SRCCReport(
        srcc=srcc,
        discordant=count,
        total_pairs=len(sims) * (len(sims) - 1) // 2,
        reversal_fraction=fraction,
        metric=paired.metric,
        pairs=list(paired.pairs),
    )


def pair_eval_results(sim_summary, real_summary, metric="spl"):
    """Build PairedResults from two per-agent summaries ({agent: {mean, se}}).

    The method sets must match exactly.
    """
    sim_ids = set(sim_summary)
    real_ids = set(real_summary)
    if sim_ids != real_ids:
        missing = sim_ids.symmetric_difference(real_ids)
        raise DomainError(f"method sets differ between sim and real: {sorted(missing)}")
    pairs = [
        MethodPair(
            method=agent,
            sim=sim_summary[agent]["mean"],
            real=real_summary[agent]["mean"],
            sim_se=sim_summary[agent]["se"],
            real_se=real_summary[agent]["se"],
        )
        for agent in sorted(sim_summary)
    ]
    return PairedResults(pairs=pairs, metric=metric)


# --------------------------------------------------------------------------
# Bundled benchmark: nine models, SPL in reality vs simulator configurations.
# Values are stored exactly as published; the checksum guards against edits.
# --------------------------------------------------------------------------

BENCHMARK_COLUMNS = (
    "sensor",
    "train_noise",
    "train_sliding",
    "reality_spl",
    "coda_chall_spl",
    "coda_test_spl",
    "gibson_chall_spl",
    "gibson_test_spl",
)

BENCHMARK_ROWS = (
    ("Depth", 0.5, "off", 0.59, 0.64, 0.58, 0.68, 0.59),
    ("Depth", 1.0, "off", 0.74, 0.81, 0.70, 0.78, 0.53),
    ("Pred. Depth", 0.5, "off", 0.53, 0.37, 0.37, 0.54, 0.40),
    ("Pred. Depth", 1.0, "off", 0.66, 0.75, 0.58, 0.64, 0.43),
    ("RGB", 0.5, "off", 0.33, 0.50, 0.33, 0.56, 0.43),
    ("RGB", 1.0, "off", 0.44, 0.69, 0.42, 0.58, 0.36),
    ("Depth", 0.0, "on", 0.64, 0.70, 0.63, 0.66, 0.35),
    ("Pred. Depth", 0.0, "on", 0.58, 0.80, 0.44, 0.56, 0.32),
    ("RGB", 0.0, "on", 0.61, 0.80, 0.64, 0.62, 0.36),
)

BENCHMARK_SHA256 = "499b1bf961c0ca8f55f8cd4dc6470293d19b034c16152f4211342066c4e370ed"


def _benchmark_canonical():
    return "\n".join(
        ",".join(f"{v:.2f}" if isinstance(v, float) else str(v) for v in row)
        for row in BENCHMARK_ROWS
    )


def benchmark_rows():
    """The bundled table, checksum-verified."""
    digest = hashlib.sha256(_benchmark_canonical().encode()).hexdigest()
    if digest != BENCHMARK_SHA256:
        raise DomainError("bundled benchmark table failed its integrity check")
    return BENCHMARK_ROWS


def _model_label(row):
    return f"{row[0]} n={row[1]:g} slide={row[2]}"


def benchmark_pairs(sim_column):
    """Pair reality SPL against one simulator column of the bundled table.

    sim_column is one of 'coda_chall_spl', 'coda_test_spl',
    'gibson_chall_spl', 'gibson_test_spl'.
    """
    if sim_column not in BENCHMARK_COLUMNS[4:]:
        raise DomainError(f"unknown benchmark column {sim_column!r}")
    col = BENCHMARK_COLUMNS.index(sim_column)
    pairs = [
        MethodPair(method=_model_label(row), sim=row[col], real=row[3])
        for row in benchmark_rows()
    ]
    return PairedResults(pairs=pairs, metric="spl")


def benchmark_analysis():
    """SRCC reports for the bundled table: reality vs the challenge-style
    simulator column and vs the tuned test-style column."""
    return {
        "coda_chall": srcc_report(benchmark_pairs("coda_chall_spl")),
        "coda_test": srcc_report(benchmark_pairs("coda_test_spl")),
    }
