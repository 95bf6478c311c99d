"""Sentence-level benchmark: dataset loading, scoring and report output."""

from __future__ import annotations

import csv
import json
import logging
import os
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

from .backends import HttpBackend, LlmBackend, ReplayBackend, TranscriptBackend, identity
from .lexicon import DictStore, grapheme_key, ingest, merge, split_graphemes
from .metrics import EzafeStats, align_words, per_counts, polyphone_correct, sentence_ezafe_stats
from .orchestrator import DEFAULT_STRATEGY, DEFAULT_THRESHOLD, PromptStrategy, StrategyKind, convert_many
from .phonemes import NormalizationTable, PhonemeString, UnknownSymbol, normalize_raw, parse_canonical

logger = logging.getLogger(__name__)

HEADER = ("grapheme", "phonemes", "polyphone_word", "pronunciation", "source")
REPORT_VERSION = 1

MARKDOWN_COLUMNS = (
    ("PER (%)", "per"),
    ("Polyphone Acc. (%)", "polyphone_accuracy"),
    ("Ezafe Accuracy (%)", "ezafe_accuracy"),
    ("Ezafe Precision (%)", "ezafe_precision"),
    ("Ezafe Recall (%)", "ezafe_recall"),
    ("Ezafe F1 (%)", "ezafe_f1"),
)
NOT_DEFINED = "N/D"


class DatasetError(ValueError):
    pass


class ParseError(DatasetError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class InvariantViolation(DatasetError):
    def __init__(self, line: int, field_name: str, detail: str = ""):
        self.line = line
        self.field = field_name
        super().__init__(f"line {line}: invalid {field_name}" + (f" ({detail})" if detail else ""))


class MissingPrediction(KeyError):
    def __init__(self, row: int, grapheme: str = ""):
        self.row = row
        super().__init__(f"no prediction for dataset row {row} {grapheme!r}")


@dataclass(frozen=True)
class BenchRow:
    grapheme: str
    phonemes: PhonemeString
    polyphone_word: str | None = None
    pronunciation: PhonemeString | None = None
    source: str = ""
    line: int = 0

    @property
    def words(self) -> list[str]:
        return split_graphemes(self.grapheme)


def load_dataset(path: str | Path) -> list[BenchRow]:
    """Read a Sentence-Bench style TSV. Row ``line`` numbers count the header as 1."""
    try:
        with open(path, encoding="utf-8", newline="") as f:
            lines = f.read().splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(0, f"cannot read {path}: {exc}") from exc
    if not lines:
        raise ParseError(1, "missing header")
    header = tuple(h.strip() for h in lines[0].split("\t"))
    if header != HEADER:
        raise ParseError(1, f"header must be {'/'.join(HEADER)}, got {'/'.join(header)}")
    rows = []
    for lineno, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != len(HEADER):
            raise ParseError(lineno, f"expected {len(HEADER)} columns, got {len(cols)}")
        grapheme, phon, word, pron, source = (c.strip() for c in cols)
        if not split_graphemes(grapheme):
            raise InvariantViolation(lineno, "grapheme", "empty sentence")
        try:
            phonemes = parse_canonical(phon)
        except UnknownSymbol as exc:
            raise InvariantViolation(lineno, "phonemes", str(exc)) from None
        if not phonemes.words:
            raise InvariantViolation(lineno, "phonemes", "empty")
        if bool(word) != bool(pron):
            raise InvariantViolation(
                lineno, "polyphone_word" if not word else "pronunciation", "both or neither must be set"
            )
        pron_ps = None
        if word:
            keys = [grapheme_key(w) for w in split_graphemes(grapheme)]
            if grapheme_key(word) not in keys:
                raise InvariantViolation(lineno, "polyphone_word", f"{word!r} not in sentence")
            try:
                pron_ps = parse_canonical(pron)
            except UnknownSymbol as exc:
                raise InvariantViolation(lineno, "pronunciation", str(exc)) from None
            if len(pron_ps.words) != 1:
                raise InvariantViolation(lineno, "pronunciation", "must be a single word")
        rows.append(BenchRow(grapheme, phonemes, word or None, pron_ps, source, lineno))
    return rows


@dataclass
class RunConfig:
    dataset: str
    strategy: str = DEFAULT_STRATEGY.value
    backend: str = "replay"
    fixture: str | None = None
    endpoint: str | None = None
    model: str | None = None
    api_key_env: str = "LLMG2P_API_KEY"
    timeout: float = 60.0
    dictionaries: tuple[str, ...] = ()
    parallelism: int = 4
    threshold: float = DEFAULT_THRESHOLD
    penalize_gaps: bool = True
    prompt_dir: str | None = None
    transcript: str | None = None
    out_json: str | None = None
    out_md: str | None = None

    def __post_init__(self):
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must lie in [0, 1]")
        StrategyKind(self.strategy)
        self.dictionaries = tuple(self.dictionaries)


@dataclass
class EvalReport:
    per: float | None
    per_errors: int
    per_ref_len: int
    polyphone_accuracy: float | None
    polyphone_correct: int
    polyphone_total: int
    ezafe: EzafeStats
    per_sentence: list[dict] = field(default_factory=list)
    failed_rows: int = 0
    meta: dict = field(default_factory=dict)

    def summary(self) -> dict:
        """Aggregate metrics; undefined ratios appear as "N/D"."""
        ezafe = {k: NOT_DEFINED if v is None else v for k, v in self.ezafe.as_dict().items()}
        return {
            "per": NOT_DEFINED if self.per is None else self.per,
            "per_errors": self.per_errors,
            "per_ref_len": self.per_ref_len,
            "polyphone_accuracy": NOT_DEFINED if self.polyphone_accuracy is None else self.polyphone_accuracy,
            "polyphone_correct": self.polyphone_correct,
            "polyphone_total": self.polyphone_total,
            "ezafe": ezafe,
            "rows": len(self.per_sentence),
            "failed_rows": self.failed_rows,
        }

    def to_dict(self) -> dict:
        return {
            "report_version": REPORT_VERSION,
            "meta": self.meta,
            "aggregate": self.summary(),
            "per_sentence": self.per_sentence,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2, sort_keys=True) + "\n"

    def percentages(self) -> dict[str, float | None]:
        def pct(x):
            return None if x is None else 100.0 * x

        return {
            "per": pct(self.per),
            "polyphone_accuracy": pct(self.polyphone_accuracy),
            "ezafe_accuracy": pct(self.ezafe.accuracy),
            "ezafe_precision": pct(self.ezafe.precision),
            "ezafe_recall": pct(self.ezafe.recall),
            "ezafe_f1": pct(self.ezafe.f1),
        }


def _fmt(value: float | None) -> str:
    return NOT_DEFINED if value is None else f"{value:.2f}"


def render_markdown(reports: Sequence[tuple[str, EvalReport]]) -> str:
    """One table row per system, one column per metric (percentages)."""
    head = "| System | " + " | ".join(h for h, _ in MARKDOWN_COLUMNS) + " |"
    sep = "|---|" + "|".join("---:" for _ in MARKDOWN_COLUMNS) + "|"
    lines = [head, sep]
    for name, report in reports:
        pct = report.percentages()
        lines.append(f"| {name} | " + " | ".join(_fmt(pct[k]) for _, k in MARKDOWN_COLUMNS) + " |")
    return "\n".join(lines) + "\n"


def score_rows(
    rows: Sequence[BenchRow],
    predictions: Sequence[PhonemeString | BaseException | None],
    store: DictStore | None,
    penalize_gaps: bool = True,
) -> EvalReport:
    """Score predictions against rows. Exceptions/None mark failed rows, which are excluded."""
    errors = ref_len = 0
    poly_ok = poly_total = 0
    ezafe = EzafeStats()
    records = []
    failed = 0
    for idx, (row, pred) in enumerate(zip(rows, predictions)):
        rec = {"row": idx, "line": row.line, "grapheme": row.grapheme, "reference": str(row.phonemes)}
        if pred is None or isinstance(pred, BaseException):
            failed += 1
            rec["error"] = "missing prediction" if pred is None else f"{type(pred).__name__}: {pred}"
            records.append(rec)
            continue
        dist, n = per_counts(pred, row.phonemes)
        errors += dist
        ref_len += n
        alignment = align_words(row.phonemes, pred)
        stats = sentence_ezafe_stats(row.phonemes, pred, row.words, store, penalize_gaps, alignment)
        ezafe = ezafe + stats
        rec.update(
            prediction=str(pred),
            per=dist / n,
            edit_distance=dist,
            ref_len=n,
            ezafe={"tp": stats.tp, "fp": stats.fp, "fn": stats.fn, "tn": stats.tn},
        )
        if row.polyphone_word:
            ok = polyphone_correct(
                pred, row.words, row.polyphone_word, row.pronunciation, row.phonemes, store, alignment
            )
            poly_total += 1
            poly_ok += ok
            rec["polyphone"] = {"word": row.polyphone_word, "target": str(row.pronunciation), "correct": ok}
        records.append(rec)
    return EvalReport(
        per=errors / ref_len if ref_len else None,
        per_errors=errors,
        per_ref_len=ref_len,
        polyphone_accuracy=poly_ok / poly_total if poly_total else None,
        polyphone_correct=poly_ok,
        polyphone_total=poly_total,
        ezafe=ezafe,
        per_sentence=records,
        failed_rows=failed,
    )


def load_dictionaries(paths: Sequence[str | Path], table: NormalizationTable | None = None) -> DictStore:
    """Merge dictionary files; merged TSVs (3 columns) and raw TSVs are both accepted."""
    lists = []
    for p in paths:
        with open(p, encoding="utf-8") as f:
            first = next((ln for ln in f if ln.strip() and not ln.startswith("#")), "")
        fmt = "merged" if first.count("\t") >= 2 else "tsv"
        lists.append(ingest(p, fmt, table))
    return merge(lists)


def _timestamp(deterministic: bool) -> str | None:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch:
        return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(int(epoch)))
    if deterministic:
        return None
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


def make_backend(config: RunConfig) -> LlmBackend:
    if config.backend == "replay":
        if not config.fixture:
            raise ValueError("the replay backend needs a fixture file")
        backend: LlmBackend = ReplayBackend.from_jsonl(config.fixture, model=config.model)
    elif config.backend == "http":
        if not (config.endpoint and config.model):
            raise ValueError("the http backend needs an endpoint and a model")
        backend = HttpBackend(config.endpoint, config.model, config.api_key_env, config.timeout)
    else:
        raise ValueError(f"unknown backend {config.backend!r}")
    if config.transcript:
        backend = TranscriptBackend(backend, config.transcript)
    return backend


def write_outputs(report: EvalReport, name: str, out_json: str | None, out_md: str | None) -> None:
    if out_json:
        Path(out_json).write_text(report.to_json(), encoding="utf-8")
    if out_md:
        Path(out_md).write_text(render_markdown([(name, report)]), encoding="utf-8")


def run_eval(
    config: RunConfig,
    backend: LlmBackend | None = None,
    store: DictStore | None = None,
) -> EvalReport:
    rows = load_dataset(config.dataset)
    if store is None:
        store = load_dictionaries(config.dictionaries)
    if backend is None:
        backend = make_backend(config)
    strategy = PromptStrategy.load(config.strategy, config.prompt_dir)
    deterministic = isinstance(getattr(backend, "inner", backend), ReplayBackend)
    started = _timestamp(deterministic)

    results = convert_many(
        [r.grapheme for r in rows],
        strategy,
        backend,
        store,
        parallelism=config.parallelism,
        return_exceptions=True,
        threshold=config.threshold,
    )
    preds = [r if isinstance(r, BaseException) else r.phonemes for r in results]
    report = score_rows(rows, preds, store, config.penalize_gaps)
    for rec, res in zip(report.per_sentence, results):
        if not isinstance(res, BaseException):
            rec["raw_responses"] = list(res.raw_responses)
            rec["corrections_applied"] = res.corrections_applied
            rec["dropped_chars"] = res.dropped_chars
    report.meta = {
        "mode": "evaluate",
        "config": asdict(config),
        **identity(backend),
        "strategy": strategy.kind.value,
        "dictionary_entries": len(store),
        "started_at": started,
        "finished_at": _timestamp(deterministic),
    }
    write_outputs(report, f"{backend.model} ({strategy.kind.value})", config.out_json, config.out_md)
    return report


def load_predictions(path: str | Path) -> list[tuple[str, str]]:
    with open(path, encoding="utf-8", newline="") as f:
        rows = [r for r in csv.reader(f, delimiter="\t", quoting=csv.QUOTE_NONE) if r and any(c.strip() for c in r)]
    if rows and [c.strip() for c in rows[0][:2]] == ["grapheme", "phonemes"]:
        rows = rows[1:]
    return [(r[0], r[1] if len(r) > 1 else "") for r in rows]


def score_external(
    predictions_file: str | Path,
    dataset: str | Path,
    store: DictStore | None = None,
    table: NormalizationTable | None = None,
    penalize_gaps: bool = True,
    name: str | None = None,
) -> EvalReport:
    """Score another tool's predictions (``grapheme<TAB>phonemes``) on a dataset.

    Predictions line up with dataset rows by order when the graphemes match
    row for row, otherwise they are matched by grapheme. Phonemes go through
    the normalizer, so any notation it covers is accepted.
    """
    rows = load_dataset(dataset)
    preds = load_predictions(predictions_file)
    by_order = len(preds) == len(rows) and all(
        grapheme_key(p[0]) == grapheme_key(r.grapheme) for p, r in zip(preds, rows)
    )
    if by_order:
        texts = [p[1] for p in preds]
    else:
        by_key = {}
        for g, ph in preds:
            by_key.setdefault(grapheme_key(g), ph)
        texts = []
        for i, r in enumerate(rows):
            key = grapheme_key(r.grapheme)
            if key not in by_key:
                raise MissingPrediction(i, r.grapheme)
            texts.append(by_key[key])
    parsed = [normalize_raw(t, table) for t in texts]
    report = score_rows(rows, parsed, store or DictStore(), penalize_gaps)
    report.meta = {
        "mode": "score",
        "predictions": str(predictions_file),
        "dataset": str(dataset),
        "system": name or Path(predictions_file).stem,
        "dictionary_entries": len(store) if store is not None else 0,
    }
    return report
