"""Command line entry point: ``wikiccc <stage> [options]``."""

from __future__ import annotations

import argparse
import logging
import sys

from .errors import ValidationError
from .pipeline import STAGES, Pipeline, PipelineConfig, StageError

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME = 0, 1, 2


def _date(text: str) -> int:
    if len(text) != 8 or not text.isdigit():
        raise argparse.ArgumentTypeError("expected YYYYMMDD")
    return int(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # defaults stay None so the config file only gets overridden by flags actually given
    common.add_argument("--config", help="JSON file with any of the options below")
    common.add_argument("--snapshot", help="snapshot directory of JSON Lines files")
    common.add_argument("--atlas", help="language-territory atlas CSV")
    common.add_argument("--boundaries", help="territory polygons (JSON Lines)")
    common.add_argument("--language", help="wiki language code, e.g. it")
    common.add_argument("--output", help="output directory for artifacts")
    common.add_argument("--seed", type=int)
    common.add_argument("--neg-ratio", type=int, dest="neg_ratio")
    common.add_argument("--estimators", type=int)
    common.add_argument("--crawl-depth", type=int, dest="crawl_depth")
    common.add_argument("--closure-rounds", type=int, dest="closure_rounds")
    common.add_argument("--workers", type=int)
    common.add_argument("--compress", action="store_true", default=None, help="bzip2 the dataset CSV")
    common.add_argument("--properties", help="property group catalog (JSON)")
    common.add_argument("--labels", nargs="+", help="rater label CSVs (page_id,label)")
    common.add_argument("--sample-seed", type=int, dest="sample_seed")
    common.add_argument("--toplist-spec", dest="toplist_spec", help="JSON file of named list specs")
    common.add_argument("--targets", nargs="+", help="target wiki codes for top lists")
    common.add_argument("--limit", type=int)
    common.add_argument("--reference-date", type=_date, dest="reference_date")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="wikiccc", description="Cultural context content pipeline")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in (*STAGES, "all"):
        sub.add_parser(name, parents=[common])
    return parser


_NOT_CONFIG = {"config", "verbose", "command"}


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    stage = args.command
    stages = STAGES if stage == "all" else (stage,)
    try:
        config = PipelineConfig.from_file(args.config) if args.config else PipelineConfig()
        config.update({k: v for k, v in vars(args).items() if k not in _NOT_CONFIG})
        if stage == "all" and not config.labels:
            stages = tuple(s for s in STAGES if s != "evaluate")
        config.validate(stages)
    except ValidationError as exc:
        print(f"error [{stage}]: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    pipeline = Pipeline(config)
    try:
        if stage == "all":
            pipeline.run_all()
        else:
            pipeline.run(stage)
    except StageError as exc:
        print(f"error [{exc.stage}]: {exc.cause}", file=sys.stderr)
        return EXIT_VALIDATION if isinstance(exc.cause, ValidationError) else EXIT_RUNTIME
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
