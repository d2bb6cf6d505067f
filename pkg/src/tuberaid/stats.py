"""Two-sample Kolmogorov-Smirnov testing with Bonferroni correction, and the
three-group toxicity comparison report.

The KS p-value uses the asymptotic Kolmogorov distribution evaluated at
sqrt(n_eff) * D with effective sample size n_eff = (n_a * n_b)/(n_a + n_b).
This approximation is coarse below roughly 10 samples per group; callers at
that scale should treat borderline significance with suspicion.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import kolmogorov


@dataclass(frozen=True)
class KsResult:
    statistic: float
    p_value: float
    significant: bool = False


@dataclass
class ScoreSample:
    group: str            # attributed | non_attributed | baseline
    metric: str
    values: list[float]

    def __post_init__(self):
        for v in self.values:
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{self.metric}/{self.group}: score {v} outside [0,1]")


def ks_statistic(a, b) -> float:
    """sup over x of |ECDF_a(x) - ECDF_b(x)|."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    grid = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, grid, side="right") / len(a)
    cdf_b = np.searchsorted(b, grid, side="right") / len(b)
    return float(np.max(np.abs(cdf_a - cdf_b)))


def ks_two_sample(a, b, alpha: float | None = None) -> KsResult:
    """Two-sample KS test with the asymptotic p-value."""
    if len(a) == 0 or len(b) == 0:
        raise ValueError("both samples must be nonempty")
    d = ks_statistic(a, b)
    n_eff = len(a) * len(b) / (len(a) + len(b))
    p = float(kolmogorov(math.sqrt(n_eff) * d))
    significant = (alpha is not None) and (p < alpha)
    return KsResult(statistic=d, p_value=p, significant=significant)


def bonferroni_adjust(alpha: float, m: int) -> float:
    """Family-wise corrected per-test alpha."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    if m < 1:
        raise ValueError("m must be >= 1")
    return alpha / m


@dataclass
class GroupComparisonRow:
    metric: str
    mean_attributed: float
    mean_non_attributed: float
    mean_baseline: float
    ks1: KsResult          # attributed vs non-attributed
    ks2: KsResult          # attributed vs baseline
    warning: str | None = None


def compare_groups(samples: list[ScoreSample], alpha: float = 0.01):
    """Per-metric group means and two KS tests (attributed vs non-attributed,
    attributed vs baseline), flagged under the Bonferroni-adjusted alpha.

    Two hypotheses are tested per metric, so m = 2 * #metrics. Metrics
    missing a group are reported as warning rows and excluded from m.
    """
    by_metric = {}
    for s in samples:
        by_metric.setdefault(s.metric, {})[s.group] = s
    complete = [m for m, groups in by_metric.items()
                if {"attributed", "non_attributed", "baseline"} <= set(groups)]
    adjusted = bonferroni_adjust(alpha, 2 * len(complete)) if complete else alpha

    rows = []
    for metric, groups in by_metric.items():
        if metric not in complete:
            missing = {"attributed", "non_attributed", "baseline"} - set(groups)
            rows.append(GroupComparisonRow(
                metric=metric, mean_attributed=float("nan"),
                mean_non_attributed=float("nan"), mean_baseline=float("nan"),
                ks1=KsResult(0.0, 1.0), ks2=KsResult(0.0, 1.0),
                warning=f"missing groups: {sorted(missing)}"))
            continue
        attr = groups["attributed"].values
        non = groups["non_attributed"].values
        base = groups["baseline"].values
        rows.append(GroupComparisonRow(
            metric=metric,
            mean_attributed=float(np.mean(attr)),
            mean_non_attributed=float(np.mean(non)),
            mean_baseline=float(np.mean(base)),
            ks1=ks_two_sample(attr, non, alpha=adjusted),
            ks2=ks_two_sample(attr, base, alpha=adjusted),
        ))
    return rows, adjusted


def write_comparison_csv(rows, path):
    """Table layout: metric, group means, then each KS statistic with its
    p-value."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "attributed", "non_attributed", "baseline",
                         "ks1", "p1", "ks2", "p2"])
        for r in rows:
            if r.warning:
                writer.writerow([r.metric, "", "", "", "", "", "", r.warning])
                continue
            writer.writerow([
                r.metric, f"{r.mean_attributed:.6f}", f"{r.mean_non_attributed:.6f}",
                f"{r.mean_baseline:.6f}", f"{r.ks1.statistic:.6f}",
                f"{r.ks1.p_value:.6g}", f"{r.ks2.statistic:.6f}",
                f"{r.ks2.p_value:.6g}"])


def sample_peak_comments(comments, n: int, seed: int):
    """Seeded sampling without replacement of up to n comments per video."""
    if len(comments) <= n:
        return list(comments)
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(len(comments), size=n, replace=False))
    return [comments[i] for i in idx]
