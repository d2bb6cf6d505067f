"""Command-line front door: synth -> pretrain -> detect -> evaluate ->
attribute -> stats, plus raw-dump ingestion.

All commands take --config (JSON file matching PipelineConfig) and exit 0 on
success; flags override config values; credentials only ever come from
environment variables named in the client config.
"""

import argparse
import json
import sys

from . import pipeline
from .clients import ClientError
from .ingest import IngestError


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tuberaid",
        description="Detect comment-activity peaks and attribute them to "
                    "their source community.")
    parser.add_argument("--config", default=None,
                        help="JSON pipeline config (defaults used if omitted)")
    parser.add_argument("--seed", type=int, default=None, help="override config seed")
    parser.add_argument("--workdir", default=None, help="override output directory")
    parser.add_argument("--jobs", type=int, default=1,
                        help="parallelism bound (currently advisory)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse raw community dumps into interchange files")
    p.add_argument("--sources", required=True,
                   help="JSON file listing {path, community_id, mapping} entries")

    sub.add_parser("synth", help="generate the seeded synthetic dataset")
    sub.add_parser("pretrain", help="train and persist the cross-community TF-IDF model")
    sub.add_parser("detect", help="detect comment-activity peaks")

    p = sub.add_parser("evaluate", help="cross-validate classifiers and emit report tables")
    p.add_argument("--sweep-step", type=int, default=10)
    p.add_argument("--sweep-max", type=int, default=None)

    sub.add_parser("attribute", help="attribute peaks to source communities")
    sub.add_parser("stats", help="toxicity-score group comparison table")
    return parser


def load_config(args):
    if args.config:
        config = pipeline.PipelineConfig.from_file(args.config)
    else:
        config = pipeline.PipelineConfig()
    if args.seed is not None:
        config.seed = args.seed
    if args.workdir is not None:
        config.workdir = args.workdir
    return config


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args)
        if args.command == "synth":
            dataset = pipeline.run_synth(config)
            print(f"synth: {len(dataset.videos)} videos, "
                  f"config hash {dataset.config_hash[:12]}")
        elif args.command == "ingest":
            with open(args.sources) as fh:
                sources = json.load(fh)
            tallies = pipeline.run_ingest(config, sources)
            for cid, t in sorted(tallies.items()):
                print(f"ingest {cid}: {t['posts']} posts, {t['skipped']} skipped")
        elif args.command == "pretrain":
            model, _ = pipeline.run_pretrain(config)
            sizes = ", ".join(f"{c}={model.vocabulary_sizes[c]}"
                              for c in model.communities)
            print(f"pretrain: vocabulary sizes {sizes}")
        elif args.command == "detect":
            windows = pipeline.run_detect(config)
            print(f"detect: {len(windows)} peak windows "
                  f"(min_comments={config.min_comments})")
        elif args.command == "evaluate":
            report, cm, curve, best, _ = pipeline.run_evaluate(
                config, sweep_step=args.sweep_step, sweep_max=args.sweep_max)
            print(f"evaluate: accuracy={report.accuracy:.3f} "
                  f"f1={report.macro_f1:.3f} best_min_comments={best}")
        elif args.command == "attribute":
            report = pipeline.run_attribute(config)
            print(f"attribute: {len(report.verdicts)} verdicts, "
                  f"{report.discarded} discarded")
        elif args.command == "stats":
            rows, adjusted = pipeline.run_stats(config)
            significant = sum(1 for r in rows if not r.warning
                              and (r.ks1.significant or r.ks2.significant))
            print(f"stats: {len(rows)} metrics, adjusted alpha {adjusted:.6g}, "
                  f"{significant} with a significant difference")
        return 0
    except (IngestError, ClientError, ValueError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
