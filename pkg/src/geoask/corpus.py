"""Gold corpus loading and the exact-match evaluation harness."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .pipeline import Engine
from .sparql import ResultSet, parse
from .sparql.ast import queries_equal_modulo_renaming, term_from_json
from .terms import GeoAskError


class CorpusError(GeoAskError):
    pass


@dataclass
class CorpusEntry:
    id: str
    question: str
    category: str
    gold_query: str | None = None
    gold_answers: dict | None = None


def load_corpus(path: str | Path) -> list[CorpusEntry]:
    """JSON Lines, one entry per line; every entry needs a gold query or answers."""
    entries = []
    path = Path(path)
    if not path.exists():
        raise CorpusError(f"corpus file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            for key in ("id", "question", "category"):
                if key not in obj:
                    raise CorpusError(f"{path}:{lineno}: missing field {key!r}")
            if obj.get("goldQuery") is None and obj.get("goldAnswers") is None:
                raise CorpusError(f"{path}:{lineno}: entry needs goldQuery or goldAnswers")
            entries.append(
                CorpusEntry(
                    id=str(obj["id"]),
                    question=obj["question"],
                    category=str(obj["category"]),
                    gold_query=obj.get("goldQuery"),
                    gold_answers=obj.get("goldAnswers"),
                )
            )
    if not entries:
        raise CorpusError(f"{path}: corpus is empty")
    return entries


def result_set_from_json(obj: dict) -> ResultSet:
    if "boolean" in obj:
        return ResultSet(boolean=bool(obj["boolean"]))
    rows = [{k: term_from_json(v) for k, v in row.items()} for row in obj.get("rows", [])]
    return ResultSet(variables=list(obj.get("vars", [])), rows=rows)


def _result_sets_match(got: ResultSet, gold: ResultSet) -> bool:
    from .sparql import result_sets_equal

    return result_sets_equal(got, gold)


def evaluate_corpus(engine: Engine, entries: list[CorpusEntry]) -> dict:
    """Exact-match scoring: no partial credit, supersets fail.

    The report is independent of entry order and contains no timings, so two
    runs over the same corpus are byte-identical.
    """
    report_entries = []
    for entry in sorted(entries, key=lambda e: e.id):
        record = {
            "id": entry.id,
            "category": entry.category,
            "question": entry.question,
            "passed": False,
        }
        try:
            response = engine.ask(entry.question, execute=True, include_trace=True)
            record["sparql"] = response.sparql
            record["rewrittenSparql"] = response.rewritten_sparql
            record["trace"] = response.trace
            got = response.answers
            if entry.gold_answers is not None:
                gold = result_set_from_json(entry.gold_answers)
                record["passed"] = _result_sets_match(got, gold)
                if not record["passed"]:
                    record["diff"] = {
                        "expected": gold.to_json(),
                        "got": got.to_json() if got is not None else None,
                    }
            else:
                gold_q = parse(entry.gold_query)
                got_q = parse(response.sparql)
                record["passed"] = queries_equal_modulo_renaming(gold_q, got_q)
                if not record["passed"]:
                    record["diff"] = {"expectedQuery": entry.gold_query, "gotQuery": response.sparql}
        except GeoAskError as exc:
            record["error"] = str(exc)
        report_entries.append(record)

    categories: dict[str, dict] = {}
    for record in report_entries:
        bucket = categories.setdefault(record["category"], {"total": 0, "passed": 0})
        bucket["total"] += 1
        bucket["passed"] += int(record["passed"])
    for bucket in categories.values():
        bucket["accuracy"] = round(100.0 * bucket["passed"] / bucket["total"], 2)
    total = len(report_entries)
    passed = sum(int(r["passed"]) for r in report_entries)
    return {
        "total": total,
        "passed": passed,
        "accuracy": round(100.0 * passed / total, 2) if total else 0.0,
        "categories": {k: categories[k] for k in sorted(categories)},
        "entries": report_entries,
    }


def report_table(report: dict) -> str:
    """Human-readable per-category table in the style of an accuracy summary."""
    lines = ["Category  Passed  Total  Accuracy", "--------  ------  -----  --------"]
    for cat, bucket in report["categories"].items():
        lines.append(f"{cat:<8}  {bucket['passed']:>6}  {bucket['total']:>5}  {bucket['accuracy']:>7.2f}%")
    lines.append("--------  ------  -----  --------")
    lines.append(f"{'ALL':<8}  {report['passed']:>6}  {report['total']:>5}  {report['accuracy']:>7.2f}%")
    failures = [r for r in report["entries"] if not r["passed"]]
    if failures:
        lines.append("")
        lines.append("Failures:")
        for r in failures:
            lines.append(f"  [{r['id']}] {r['question']}")
            if "error" in r:
                lines.append(f"    error: {r['error']}")
            elif "diff" in r:
                lines.append(f"    diff: {json.dumps(r['diff'], sort_keys=True)}")
    return "\n".join(lines) + "\n"
