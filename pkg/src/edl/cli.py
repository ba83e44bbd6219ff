"""Command-line driver.

Subcommands: kb-index, train-md, train-el, run, eval, diag.  All take
``--config FILE`` plus repeatable ``--set key=value`` overrides; exit
code 0 on success, 1 with a one-line machine-parseable error otherwise.
"""

from __future__ import annotations

import argparse
import sys

from . import pipeline
from .config import load_config
from .errors import EdlError


def build_parser():
    parser = argparse.ArgumentParser(
        prog="edl",
        description="Trilingual entity discovery and linking pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--set", dest="overrides", action="append",
                       default=[], metavar="KEY=VALUE",
                       help="override a config entry (repeatable)")

    common(sub.add_parser("kb-index", help="freeze the KB snapshot index"))
    common(sub.add_parser("train-md",
                          help="train the 5-member detector ensembles"))
    common(sub.add_parser("train-el",
                          help="train the 5-member ranker ensemble"))
    common(sub.add_parser("run", help="end-to-end run to a submission TSV"))

    eval_p = sub.add_parser("eval", help="score a submission against gold")
    common(eval_p)
    eval_p.add_argument("system_tsv")
    eval_p.add_argument("gold_tsv")

    diag_p = sub.add_parser("diag",
                            help="emit per-mention linking diagnostics")
    common(diag_p)
    diag_p.add_argument("gold_tsv")
    diag_p.add_argument("--out", help="write JSON lines here "
                                      "(default stdout)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.overrides)
        if args.command == "kb-index":
            path = pipeline.cmd_kb_index(cfg)
            print(f"kb index written: {path}")
        elif args.command == "train-md":
            for path in pipeline.cmd_train_md(cfg):
                print(f"checkpoint: {path}")
        elif args.command == "train-el":
            for path in pipeline.cmd_train_el(cfg):
                print(f"checkpoint: {path}")
        elif args.command == "run":
            path = pipeline.cmd_run(cfg)
            print(f"submission written: {path}")
        elif args.command == "eval":
            report, _ = pipeline.cmd_eval(cfg, args.system_tsv,
                                          args.gold_tsv)
            print(report)
        elif args.command == "diag":
            text = pipeline.cmd_diag(cfg, args.gold_tsv, args.out)
            if not args.out:
                sys.stdout.write(text)
    except EdlError as exc:
        print(f"error\t{type(exc).__name__}\t{exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error\tIoError\t{exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
