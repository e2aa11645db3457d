"""Command-line entry point: build, query, serve, and evaluate bundles."""

from __future__ import annotations

import argparse
import difflib
import json
import logging
import os
import sys

from .bundle import build_bundle, load_bundle, save_bundle
from .config import PROFILES, load_config
from .errors import EspaceError
from .evaluation import evaluate, format_report_table, load_logs, load_quiz
from .service import ServiceConfig, serve


def _add_common(parser):
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--json", action="store_true",
                        help="machine-readable output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="espace",
        description="Build and explore explanatory spaces over annotated corpora.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="run the full pipeline into a bundle file")
    p.add_argument("--manifest", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--freq", required=True)
    p.add_argument("--profile", default="yai4hu", choices=sorted(PROFILES))
    p.add_argument("--out", required=True)
    _add_common(p)

    p = sub.add_parser("serve", help="serve a bundle over HTTP")
    p.add_argument("--bundle", default=os.environ.get("ESPACE_BUNDLE"))
    p.add_argument("--bind", default=os.environ.get("ESPACE_BIND", "127.0.0.1:8080"))
    p.add_argument("--profile", choices=sorted(PROFILES))
    p.add_argument("--static-dir", help="serve the explorer UI from this directory")
    _add_common(p)

    p = sub.add_parser("ask", help="open question answering against a bundle")
    p.add_argument("--bundle", required=True)
    p.add_argument("--question", required=True)
    p.add_argument("--limit", type=int)
    _add_common(p)

    p = sub.add_parser("overview", help="print one concept's overview card")
    p.add_argument("--bundle", required=True)
    p.add_argument("--uri", required=True)
    _add_common(p)

    p = sub.add_parser("eval", help="navigation metrics and study scoring")
    p.add_argument("--bundle", required=True)
    p.add_argument("--quiz", required=True)
    p.add_argument("--logs")
    _add_common(p)
    return parser


def cmd_build(args) -> int:
    config = load_config(args.config)
    bundle = build_bundle(args.manifest, args.lexicon, args.freq,
                          profile=args.profile, config=config)
    digest = save_bundle(bundle, args.out)
    if args.json:
        print(json.dumps({"bundle": args.out, "bundle_hash": digest,
                          "stats": bundle.stats}, indent=2, sort_keys=True))
    else:
        print(f"wrote {args.out} ({digest[:12]})")
        for key, value in bundle.stats.items():
            print(f"  {key:16s} {value}")
    return 0


def cmd_serve(args) -> int:
    if not args.bundle:
        print("error: --bundle (or ESPACE_BUNDLE) is required", file=sys.stderr)
        return 2
    host, _, port = args.bind.rpartition(":")
    serve(ServiceConfig(
        bundle_path=args.bundle,
        host=host or "127.0.0.1",
        port=int(port),
        profile=args.profile,
        static_dir=args.static_dir,
    ))
    return 0


def cmd_ask(args) -> int:
    if not args.question.strip():
        print("error: empty question", file=sys.stderr)
        return 2
    bundle = load_bundle(args.bundle)
    if not bundle.open_qa_enabled():
        print(f"error: open question answering is disabled under profile "
              f"{bundle.profile!r}", file=sys.stderr)
        return 1
    answers = bundle.answer_open_question(args.question, n=args.limit)
    if args.json:
        print(json.dumps(
            {
                "question": args.question,
                "answers": [
                    {"snippet": a.snippet, "context": a.context,
                     "score": a.score, "source_triple": a.source_triple}
                    for a in answers
                ],
            },
            indent=2, sort_keys=True,
        ))
    else:
        if not answers:
            print("no answers above the threshold")
        for a in answers:
            print(f"{a.score:6.3f}  [{a.context}]  {a.snippet}")
    return 0


def cmd_overview(args) -> int:
    bundle = load_bundle(args.bundle)
    card = bundle.es.nodes.get(args.uri)
    if card is None:
        labels = {u: bundle.es.nodes[u].label for u in bundle.es.nodes}
        near = difflib.get_close_matches(args.uri, list(labels), n=5, cutoff=0.3)
        hint = ", ".join(near) if near else "none"
        print(f"error: no overview for uri {args.uri!r}; nearest: {hint}",
              file=sys.stderr)
        return 2
    from .bundle import card_to_dict

    data = card_to_dict(card)
    if args.json:
        print(json.dumps(data, indent=2, sort_keys=True))
        return 0
    print(f"{card.label}  ({card.uri})")
    if card.abstract:
        print(f"  abstract: {card.abstract}")
    if card.type_labels:
        print(f"  type: {', '.join(card.type_labels)}")
    for name, refs in (("super", card.super_classes),
                       ("sub", card.sub_classes),
                       ("sub-types", card.sub_types)):
        if refs:
            print(f"  {name}: {', '.join(refs)}")
    for aid, section in card.sections.items():
        units = section["units"]
        if not units:
            continue
        print(f"  [{aid}] {len(units)} answers")
        for unit in units[:5]:
            print(f"    {unit.score:6.3f}  {unit.snippet}")
    return 0


def cmd_eval(args) -> int:
    bundle = load_bundle(args.bundle)
    quiz = load_quiz(args.quiz)
    logs = load_logs(args.logs) if args.logs else None
    report = evaluate(bundle, quiz, logs)
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(format_report_table(report))
    return 0


COMMANDS = {
    "build": cmd_build,
    "serve": cmd_serve,
    "ask": cmd_ask,
    "overview": cmd_overview,
    "eval": cmd_eval,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except EspaceError as exc:
        print(f"error [{args.command}]: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error [{args.command}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
