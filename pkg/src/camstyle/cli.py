"""Command-line orchestration.

Usage::

    camstyle <stage|experiment> --config cfg.yaml [--set key=value ...] --out DIR

Stages: train-cyclegan, generate, train-reid, evaluate.
Experiments: few-cameras, loss-ablation, ratio-sweep, partial-bank,
augmentation-grid (synthetic data by default).

Without --config the desk-scale defaults apply. Exit status is nonzero on
any error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from camstyle.config import load_config
from camstyle.errors import CamstyleError
from camstyle.experiments import EXPERIMENTS, run_experiment

STAGES = ("train-cyclegan", "generate", "train-reid", "evaluate")

logger = logging.getLogger(__name__)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None,
                        help="YAML config file (desk-scale defaults if omitted)")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="dotted config override (wins over file)")
    parser.add_argument("--out", type=Path, required=True, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="camstyle", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train-cyclegan", help="train one translator per camera pair")
    _add_common(p)
    p.add_argument("--pair-cameras", type=int, nargs="*", default=None,
                   help="restrict translator training to these cameras")

    p = sub.add_parser("generate", help="materialize style-transferred fakes")
    _add_common(p)
    p.add_argument("--bank", type=Path, default=None,
                   help="trained bank directory (default: OUT/bank)")

    p = sub.add_parser("train-reid", help="train the retrieval model on mixed batches")
    _add_common(p)
    p.add_argument("--fakes", type=Path, default=None,
                   help="exported fakes directory (default: OUT/fakes when needed)")

    p = sub.add_parser("evaluate", help="rank queries against the gallery")
    _add_common(p)
    p.add_argument("--checkpoint", type=Path, default=None,
                   help="re-ID checkpoint (default: OUT/reid/model.pt)")
    p.add_argument("--features-query", type=Path, default=None,
                   help="precomputed query feature matrix (.f32 + sidecar)")
    p.add_argument("--features-gallery", type=Path, default=None,
                   help="precomputed gallery feature matrix (.f32 + sidecar)")

    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment grid")
        _add_common(p)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, args.overrides)
        # import stages lazily: torch startup is slow and --help should be instant
        from camstyle import pipeline

        if args.command == "train-cyclegan":
            path = pipeline.stage_train_cyclegan(cfg, args.out,
                                                 pair_subset=args.pair_cameras)
        elif args.command == "generate":
            path = pipeline.stage_generate(cfg, args.out, bank_dir=args.bank)
        elif args.command == "train-reid":
            path = pipeline.stage_train_reid(cfg, args.out, fakes_dir=args.fakes)
        elif args.command == "evaluate":
            path = pipeline.stage_evaluate(cfg, args.out, checkpoint=args.checkpoint,
                                           features_query=args.features_query,
                                           features_gallery=args.features_gallery)
        else:
            run_experiment(args.command, cfg, args.out)
            path = Path(args.out)
        print(path)
        return 0
    except (CamstyleError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
