#!/usr/bin/env python3
"""Estimate the day-lag between planted raids and video comment activity.

For every synthetic video, build the source-side daily series (an impulse on
the raid days) and the video-side daily comment series, then report the
cross-correlation lag distribution. Coordinated raids should concentrate at
lag 0.

    python3 scripts/run_lag_analysis.py --seed 0 --max-lag 5
"""

import argparse
import sys
from collections import Counter
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from tuberaid.synth import SynthConfig, generate_dataset
from tuberaid.timeline import SECONDS_PER_DAY, estimate_lag


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--max-lag", type=int, default=5)
    parser.add_argument("--videos-per-community", type=int, default=20)
    args = parser.parse_args()

    config = SynthConfig(videos_per_community=args.videos_per_community,
                         unrelated_videos=args.videos_per_community)
    dataset = generate_dataset(config, args.seed)

    lags = Counter()
    for timeline, label in dataset.videos:
        span = dataset.spans[timeline.video_id]
        first_day = timeline.comments[0].timestamp // SECONDS_PER_DAY
        n_days = len(timeline.daily_bins)
        source = [0.0] * n_days
        raid_start = int(span.t_first // SECONDS_PER_DAY - first_day)
        raid_end = int(span.t_last // SECONDS_PER_DAY - first_day)
        for d in range(max(0, raid_start), min(n_days, raid_end)):
            source[d] = 1.0
        target = [float(c) for _, c in timeline.daily_bins]
        est = estimate_lag(source, target, args.max_lag)
        lags[(label != "UNRELATED", est.lag_days)] += 1

    for raided, title in ((True, "raided videos"), (False, "unrelated videos")):
        total = sum(n for (r, _), n in lags.items() if r == raided)
        if not total:
            continue
        print(f"{title} (n={total}):")
        for lag in range(-args.max_lag, args.max_lag + 1):
            n = lags.get((raided, lag), 0)
            if n:
                print(f"  lag {lag:+d} days: {n:4d}  ({n / total:.0%})")


if __name__ == "__main__":
    main()
