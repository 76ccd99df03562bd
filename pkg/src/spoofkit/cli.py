"""Command line front end: ``spoofkit extract|train|score|eval|run|toy``.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import pipeline
from .config import CLASSIFIERS, FEATURES, format_config, load_config
from .errors import SpoofkitError
from .metrics import report_json, report_text
from .protocol import SPLITS

log = logging.getLogger("spoofkit")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _common(p, split_default):
    p.add_argument("--config", help="INI configuration file")
    p.add_argument("--feature", choices=FEATURES)
    p.add_argument("--classifier", choices=CLASSIFIERS)
    p.add_argument("--split", choices=SPLITS, default=split_default)
    p.add_argument("--seed", type=int)
    p.add_argument("--n-per-class", type=int, dest="n_per_class")
    p.add_argument("--frames", type=int, help="frames kept for SVM/AdaBoost input vectors")
    p.add_argument("--workers", type=int)
    p.add_argument("--work-dir", dest="work_dir")
    p.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                   help="override any configuration value, e.g. --set svm.C=10")
    p.add_argument("--strict", action="store_true", help="fail if any file cannot be extracted")
    p.add_argument("-q", "--quiet", action="store_true")


def build_parser():
    parser = _Parser(prog="spoofkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, split in (("extract", "train"), ("train", "train"), ("score", "dev"), ("eval", "dev")):
        _common(sub.add_parser(name), split)
    run = sub.add_parser("run", help="extract, train, score and eval in one go")
    _common(run, "dev")
    run.add_argument("--train-split", choices=SPLITS, default="train")
    for p in (sub.choices["eval"], run):
        p.add_argument("--threshold", type=float, help="accuracy threshold (default: EER threshold)")
        p.add_argument("--report-format", choices=("text", "json"), default="text")
        p.add_argument("--det", action="store_true", help="include the DET curve in the JSON dump")
    sub.choices["eval"].add_argument("--scores", help="score file (default: derived from config)")
    toy = sub.add_parser("toy", help="write the synthetic toy corpus and a matching config")
    toy.add_argument("out_dir")
    toy.add_argument("--n-clips", type=int, default=200)
    toy.add_argument("--seed", type=int, default=0)
    toy.add_argument("-q", "--quiet", action="store_true")
    return parser


def _overrides(args):
    out = {}
    for name in ("feature", "classifier", "seed", "n_per_class", "frames", "workers"):
        value = getattr(args, name, None)
        if value is not None:
            out[name] = value
    if getattr(args, "work_dir", None):
        out["paths.work_dir"] = args.work_dir
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise SystemExit(f"--set expects SECTION.KEY=VALUE, got {item!r}")
        out[key.strip()] = value
    return out


def _print_report(report, fmt):
    if fmt == "json":
        print(report_json(report))
    else:
        sys.stdout.write(report_text(report))


def _toy(args):
    from pathlib import Path

    from .toy import generate_toy_corpus

    out = Path(args.out_dir)
    protocols = generate_toy_corpus(out, args.n_clips, args.seed)
    cfg = load_config(overrides={
        "paths.audio_dir": str(out / "wav"),
        "paths.protocol_train": str(protocols["train"]),
        "paths.protocol_dev": str(protocols["dev"]),
        "paths.work_dir": str(out / "work"),
    })
    (out / "toy.ini").write_text(format_config(cfg), encoding="utf-8")
    print(out / "toy.ini")
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if getattr(args, "quiet", False) else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        if args.command == "toy":
            return _toy(args)
        cfg = load_config(args.config, _overrides(args))
        log.info("effective config: %s", json.dumps(cfg.to_dict(), sort_keys=True))
        if args.command == "extract":
            result = pipeline.cmd_extract(cfg, args.split)
            print(result.cache_path)
            if result.failures and args.strict:
                log.error("%d files failed (see %s)", len(result.failures), result.manifest_path)
                return 2
        elif args.command == "train":
            print(pipeline.cmd_train(cfg, args.split))
        elif args.command == "score":
            print(pipeline.cmd_score(cfg, args.split))
        elif args.command == "eval":
            report, _ = pipeline.cmd_eval(cfg, args.split, args.threshold, args.report_format,
                                          args.det, args.scores)
            _print_report(report, args.report_format)
        elif args.command == "run":
            report, extracted = pipeline.cmd_run(cfg, args.train_split, args.split,
                                                 threshold=args.threshold,
                                                 report_format=args.report_format, det=args.det)
            _print_report(report, args.report_format)
            if args.strict and any(r.failures for r in extracted):
                return 2
    except SpoofkitError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return exc.exit_code
    except FileNotFoundError as exc:
        log.error("%s", exc)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
