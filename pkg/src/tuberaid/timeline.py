"""Comment-activity timelines: thread-lifetime normalization, daily binning,
mean+sigma peak detection, and source/target lag estimation.

Conventions pinned here (the source material leaves them open):

* the peak threshold uses the population standard deviation over *all*
  daily bins of the video, including materialized zero-count days;
* days are UTC calendar days;
* consecutive peaking days merge into a single window.
"""

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .ingest import Comment

SECONDS_PER_DAY = 86400


class DegenerateSpanError(ValueError):
    """Thread lifetime has zero length; normalization is undefined."""


@dataclass(frozen=True)
class ThreadSpan:
    """Thread lifetime: t_first is when the video link was posted (t=0),
    t_last the final post in the thread (t=1)."""

    t_first: float
    t_last: float

    def __post_init__(self):
        if self.t_last < self.t_first:
            raise ValueError("t_last must be >= t_first")


@dataclass
class CommentTimeline:
    video_id: str
    comments: list[Comment]
    daily_bins: list[tuple[int, int]] = field(default_factory=list)


@dataclass(frozen=True)
class PeakWindow:
    video_id: str
    start_day: int
    end_day: int
    comment_count: int
    comments: tuple[Comment, ...] = ()

    def __post_init__(self):
        if self.start_day > self.end_day:
            raise ValueError("start_day must be <= end_day")
        if self.comment_count < 1:
            raise ValueError("a peak window holds at least one comment")


@dataclass(frozen=True)
class LagEstimate:
    lag_days: int
    correlation: float


def normalize_timestamps(span: ThreadSpan, times) -> list[float]:
    """Map epoch seconds onto the thread lifetime: t_first -> 0, t_last -> 1.

    Values outside [0, 1] are legal (comments before the link was posted or
    after the thread died) and preserved.
    """
    width = span.t_last - span.t_first
    if width == 0:
        raise DegenerateSpanError("thread span has zero length")
    return [(t - span.t_first) / width for t in times]


def in_window(normalized_times) -> list[int]:
    """Indices of normalized times inside the thread lifetime, boundaries
    included."""
    return [i for i, t in enumerate(normalized_times) if 0.0 <= t <= 1.0]


def day_index(timestamp: int) -> int:
    """UTC calendar day number of an epoch timestamp."""
    return int(timestamp // SECONDS_PER_DAY)


def bin_daily(comments: list[Comment], video_id: str | None = None) -> CommentTimeline:
    """Group comments into consecutive UTC day bins, materializing empty days
    between the first and last comment."""
    ordered = sorted(comments, key=lambda c: (c.timestamp, c.comment_id))
    vid = video_id or (ordered[0].video_id if ordered else "")
    if not ordered:
        return CommentTimeline(video_id=vid, comments=[], daily_bins=[])
    first = day_index(ordered[0].timestamp)
    last = day_index(ordered[-1].timestamp)
    counts = {d: 0 for d in range(first, last + 1)}
    for c in ordered:
        counts[day_index(c.timestamp)] += 1
    bins = [(d - first, counts[d]) for d in range(first, last + 1)]
    return CommentTimeline(video_id=vid, comments=ordered, daily_bins=bins)


def detect_peaks(timeline: CommentTimeline, min_comments: int = 0) -> list[PeakWindow]:
    """Find maximal runs of days whose comment count exceeds mean + sigma.

    Mean and population standard deviation are computed over every daily bin
    of the video. Windows totalling fewer than ``min_comments`` comments are
    dropped. Timelines with fewer than 2 bins yield no peaks.
    """
    if min_comments < 0:
        raise ValueError("min_comments must be >= 0")
    bins = timeline.daily_bins
    if len(bins) < 2:
        return []
    counts = np.array([c for _, c in bins], dtype=float)
    threshold = counts.mean() + counts.std()  # population sigma

    first_day = bins[0][0]
    by_day = {}
    for c in timeline.comments:
        by_day.setdefault(day_index(c.timestamp), []).append(c)
    day_zero = day_index(timeline.comments[0].timestamp) if timeline.comments else 0

    windows = []
    run_start = None
    for i, (day, count) in enumerate(bins + [(bins[-1][0] + 1, float("-inf"))]):
        peaking = count > threshold
        if peaking and run_start is None:
            run_start = day
        elif not peaking and run_start is not None:
            end = bins[i - 1][0]
            contained = [c for d in range(run_start, end + 1)
                         for c in by_day.get(day_zero + d - first_day, [])]
            if len(contained) >= max(min_comments, 1):
                windows.append(PeakWindow(
                    video_id=timeline.video_id, start_day=run_start, end_day=end,
                    comment_count=len(contained), comments=tuple(contained)))
            run_start = None
    return windows


def estimate_lag(source_series, target_series, max_lag: int) -> LagEstimate:
    """Best integer day shift aligning target activity to source activity.

    Both series are mean-centered and L2-normalized; correlation at shift k
    pairs source[t] with target[t + k] under zero padding. A positive lag
    means the target trails the source. Ties break toward smaller absolute
    lag, then toward the negative one.
    """
    if len(source_series) == 0 or len(target_series) == 0:
        raise ValueError("series must be nonempty")
    if max_lag < 0:
        raise ValueError("max_lag must be >= 0")
    s = np.asarray(source_series, dtype=float)
    t = np.asarray(target_series, dtype=float)
    s = s - s.mean()
    t = t - t.mean()
    s_norm = np.linalg.norm(s)
    t_norm = np.linalg.norm(t)
    if s_norm == 0 or t_norm == 0:
        return LagEstimate(lag_days=0, correlation=0.0)
    s /= s_norm
    t /= t_norm

    best = LagEstimate(lag_days=0, correlation=float("-inf"))
    for lag in sorted(range(-max_lag, max_lag + 1), key=lambda k: (abs(k), k)):
        corr = 0.0
        for i, sv in enumerate(s):
            j = i + lag
            if 0 <= j < len(t):
                corr += sv * t[j]
        if corr > best.correlation:
            best = LagEstimate(lag_days=lag, correlation=float(corr))
    return best


def activity_pdf(normalized_times, bin_count: int):
    """Histogram density of normalized comment times, integrating to 1.

    Returns a list of (left_edge, right_edge, density) rows ready for
    plotting or CSV export.
    """
    if bin_count < 1:
        raise ValueError("bin_count must be >= 1")
    times = np.asarray(list(normalized_times), dtype=float)
    if times.size == 0:
        raise ValueError("cannot build a density from zero samples")
    lo, hi = times.min(), times.max()
    if (hi - lo) / bin_count < 1e-300:
        # Degenerate support (bin widths would overflow the density):
        # one unit-width bin centered on the point mass.
        return [(float(lo) - 0.5, float(lo) + 0.5, 1.0)]
    densities, edges = np.histogram(times, bins=bin_count, range=(lo, hi),
                                    density=True)
    return [(float(edges[i]), float(edges[i + 1]), float(densities[i]))
            for i in range(bin_count)]


def grid_search(objective, comment_ranges, lag_range: int):
    """Exhaustive search over (comment-count range, lag) cells.

    ``objective(comment_range, lag)`` returns a score (e.g. attribution
    accuracy); the full score grid and its argmax cell are returned so lag
    controls can be tuned the same way the peak threshold is.
    """
    cells = []
    for cr in comment_ranges:
        for lag in range(-lag_range, lag_range + 1):
            cells.append({"comment_range": cr, "lag": lag,
                          "score": float(objective(cr, lag))})
    best = max(cells, key=lambda c: c["score"])
    return cells, best


# ---------------------------------------------------------------------------
# Export helpers

def write_peaks_ndjson(windows, path):
    with open(path, "w") as fh:
        for w in windows:
            fh.write(json.dumps({
                "video_id": w.video_id, "start_day": w.start_day,
                "end_day": w.end_day, "comment_count": w.comment_count,
            }, sort_keys=True) + "\n")


def write_peaks_csv(windows, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["video_id", "start_day", "end_day", "comment_count"])
        for w in windows:
            writer.writerow([w.video_id, w.start_day, w.end_day, w.comment_count])


def write_pdf_csv(rows, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_left", "bin_right", "density"])
        for left, right, density in rows:
            writer.writerow([f"{left:.10g}", f"{right:.10g}", f"{density:.10g}"])
