"""Command line interface.

    llmg2p convert   --backend replay --fixture f.jsonl --dict d.tsv --text "..."
    llmg2p evaluate  --dataset bench.tsv --backend replay --fixture f.jsonl --dict d.tsv
    llmg2p score     --predictions preds.tsv --dataset bench.tsv --dict d.tsv
    llmg2p dict merge --inputs a.tsv b.tsv --out merged.tsv
    llmg2p normalize "ʔin ɡole zibɑst"

Exit codes: 0 success, 1 dataset/input errors, 2 every backend call failed.
The API key of the http backend is only ever read from the environment.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .backends import BackendError, ReplayMiss
from .bench import (
    DatasetError,
    MissingPrediction,
    RunConfig,
    load_dictionaries,
    make_backend,
    render_markdown,
    run_eval,
    score_external,
    write_outputs,
)
from .lexicon import FormatUnknown, UnreadableFile, ingest, merge, save_store
from .orchestrator import DEFAULT_STRATEGY, DEFAULT_THRESHOLD, EmptyResponse, PromptStrategy, StrategyKind, convert
from .phonemes import NormalizationTable, normalize_raw

EXIT_OK = 0
EXIT_DATA = 1
EXIT_BACKEND = 2


def _add_backend_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--strategy", default=DEFAULT_STRATEGY.value, choices=[k.value for k in StrategyKind])
    p.add_argument("--backend", default="replay", choices=["replay", "http"])
    p.add_argument("--fixture", help="replay fixture (JSONL of prompt_sha256/response)")
    p.add_argument("--endpoint", help="chat-completions URL for the http backend")
    p.add_argument("--model", help="model name sent to the http backend")
    p.add_argument("--api-key-env", default="LLMG2P_API_KEY", help="environment variable holding the API key")
    p.add_argument("--timeout", type=float, default=60.0)
    p.add_argument("--dict", dest="dictionaries", nargs="*", default=[], help="dictionary TSV files")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD, help="rule-correction similarity threshold")
    p.add_argument("--prompt-dir", help="directory overriding the shipped prompt templates")
    p.add_argument("--transcript", help="append every prompt/response to this JSONL file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="llmg2p", description="LLM-based Persian G2P toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="convert Persian sentences to canonical phonemes")
    _add_backend_args(p)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--text", help="a single sentence")
    src.add_argument("--input", help="file with one sentence per line")

    p = sub.add_parser("evaluate", help="run a strategy over a benchmark dataset")
    _add_backend_args(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--parallelism", type=int, default=4)
    p.add_argument("--no-gap-penalty", action="store_true", help="count Ezafe on unaligned words as tn")
    p.add_argument("--out-json")
    p.add_argument("--out-md")

    p = sub.add_parser("score", help="score an external tool's predictions")
    p.add_argument("--predictions", required=True, help="TSV of grapheme<TAB>phonemes")
    p.add_argument("--dataset", required=True)
    p.add_argument("--dict", dest="dictionaries", nargs="*", default=[])
    p.add_argument("--name", help="system name for the markdown table")
    p.add_argument("--no-gap-penalty", action="store_true")
    p.add_argument("--out-json")
    p.add_argument("--out-md")

    p = sub.add_parser("dict", help="dictionary tools")
    dsub = p.add_subparsers(dest="dict_command", required=True)
    m = dsub.add_parser("merge", help="normalize and merge dictionaries")
    m.add_argument("--inputs", nargs="+", required=True)
    m.add_argument("--out", required=True)
    m.add_argument("--format", default="tsv", help="input format id (tsv, merged)")
    m.add_argument("--table", help="normalization table TSV")

    p = sub.add_parser("normalize", help="map raw phonetic text to canonical phonemes")
    p.add_argument("text", nargs="*", help="text to normalize (stdin when absent)")
    p.add_argument("--table", help="normalization table TSV")
    return parser


def _cmd_convert(args) -> int:
    config = RunConfig(
        dataset="",
        strategy=args.strategy,
        backend=args.backend,
        fixture=args.fixture,
        endpoint=args.endpoint,
        model=args.model,
        api_key_env=args.api_key_env,
        timeout=args.timeout,
        threshold=args.threshold,
        transcript=args.transcript,
    )
    backend = make_backend(config)
    store = load_dictionaries(args.dictionaries)
    strategy = PromptStrategy.load(args.strategy, args.prompt_dir)
    if args.text is not None:
        sentences = [args.text]
    else:
        sentences = [ln for ln in Path(args.input).read_text(encoding="utf-8").splitlines() if ln.strip()]
    failures = 0
    for s in sentences:
        try:
            result = convert(s, strategy, backend, store, threshold=args.threshold)
        except (BackendError, ReplayMiss, EmptyResponse) as exc:
            failures += 1
            print(f"error: {exc}", file=sys.stderr)
            print("")
            continue
        print(result.phonemes)
    return EXIT_BACKEND if sentences and failures == len(sentences) else EXIT_OK


def _cmd_evaluate(args) -> int:
    config = RunConfig(
        dataset=args.dataset,
        strategy=args.strategy,
        backend=args.backend,
        fixture=args.fixture,
        endpoint=args.endpoint,
        model=args.model,
        api_key_env=args.api_key_env,
        timeout=args.timeout,
        dictionaries=tuple(args.dictionaries),
        parallelism=args.parallelism,
        threshold=args.threshold,
        penalize_gaps=not args.no_gap_penalty,
        prompt_dir=args.prompt_dir,
        transcript=args.transcript,
        out_json=args.out_json,
        out_md=args.out_md,
    )
    report = run_eval(config)
    name = f"{report.meta.get('model')} ({config.strategy})"
    sys.stdout.write(render_markdown([(name, report)]))
    if report.failed_rows:
        print(f"{report.failed_rows} row(s) failed and were excluded", file=sys.stderr)
    if report.per_sentence and report.failed_rows == len(report.per_sentence):
        return EXIT_BACKEND
    return EXIT_OK


def _cmd_score(args) -> int:
    store = load_dictionaries(args.dictionaries)
    report = score_external(
        args.predictions, args.dataset, store, penalize_gaps=not args.no_gap_penalty, name=args.name
    )
    name = report.meta["system"]
    write_outputs(report, name, args.out_json, args.out_md)
    sys.stdout.write(render_markdown([(name, report)]))
    return EXIT_OK


def _cmd_dict(args) -> int:
    table = NormalizationTable.from_tsv(args.table) if args.table else None
    lists = [ingest(p, args.format, table) for p in args.inputs]
    for p, entries in zip(args.inputs, lists):
        print(f"{p}: {len(entries)} entries, {entries.skipped} skipped rows", file=sys.stderr)
    store = merge(lists)
    save_store(store, args.out)
    poly = sum(1 for g in store if store.is_polyphone(g))
    print(f"wrote {len(store)} entries ({poly} polyphone) to {args.out}", file=sys.stderr)
    return EXIT_OK


def _cmd_normalize(args) -> int:
    table = NormalizationTable.from_tsv(args.table) if args.table else None
    lines = [" ".join(args.text)] if args.text else sys.stdin.read().splitlines()
    for line in lines:
        ps = normalize_raw(line, table)
        print(ps)
        if ps.dropped:
            print(f"dropped {ps.dropped} character(s)", file=sys.stderr)
    return EXIT_OK


COMMANDS = {
    "convert": _cmd_convert,
    "evaluate": _cmd_evaluate,
    "score": _cmd_score,
    "dict": _cmd_dict,
    "normalize": _cmd_normalize,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s"
    )
    try:
        return COMMANDS[args.command](args)
    except (DatasetError, MissingPrediction, UnreadableFile, FormatUnknown, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (BackendError, ReplayMiss) as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND


if __name__ == "__main__":
    sys.exit(main())
