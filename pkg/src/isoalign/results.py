"""Experiment record rows: the one CSV schema everything speaks.

Every measurement taken anywhere in the pipeline becomes one row of
``pair,kind,value,preproc,dict,selflearn,seed,metric,score`` so that runs,
bundled reference tables and ad-hoc measurements can be concatenated,
plotted and diffed with the same tooling.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

PathLike = Union[str, Path]

RECORD_FIELDS = (
    "pair", "kind", "value", "preproc", "dict", "selflearn", "seed",
    "metric", "score",
)


def make_record(
    pair, kind, value, preproc, dict_label, selflearn, seed, metric, score
) -> dict:
    return {
        "pair": str(pair),
        "kind": str(kind),
        "value": str(value),
        "preproc": str(preproc),
        "dict": str(dict_label),
        "selflearn": str(selflearn),
        "seed": str(seed),
        "metric": str(metric),
        "score": float(score),
    }


def write_records(records: Iterable[dict], path: PathLike, append: bool = False) -> None:
    path = Path(path)
    fresh = not (append and path.exists() and path.stat().st_size > 0)
    mode = "a" if append else "w"
    with path.open(mode, encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=RECORD_FIELDS)
        if fresh:
            writer.writeheader()
        for rec in records:
            row = dict(rec)
            row["score"] = "%.10g" % float(row["score"])
            writer.writerow(row)


def read_records(path: PathLike) -> list[dict]:
    path = Path(path)
    records = []
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(RECORD_FIELDS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(
                f"{path}: missing record columns: {', '.join(sorted(missing))}"
            )
        for row in reader:
            row["score"] = float(row["score"])
            records.append(row)
    return records


def gap_report(
    records: Sequence[dict],
    pair_a: str,
    pair_b: str,
    metric: str = "mrr",
) -> list[dict]:
    """Per-condition score gap between two language pairs.

    Conditions are the distinct (kind, value) combinations, in order of first
    appearance; scores are averaged over seeds (and any other replicated
    rows). The gap is ``score(pair_a) - score(pair_b)``, signed. Conditions
    covered on only one side get a ``None`` gap rather than an error, so
    partial result files still produce a report.
    """
    sums: dict[tuple, list] = {}
    order: list[tuple] = []
    for rec in records:
        if rec["metric"] != metric or rec["pair"] not in (pair_a, pair_b):
            continue
        cond = (rec["kind"], rec["value"])
        if cond not in sums:
            sums[cond] = [0.0, 0, 0.0, 0]  # sum_a, n_a, sum_b, n_b
            order.append(cond)
        slot = 0 if rec["pair"] == pair_a else 2
        sums[cond][slot] += rec["score"]
        sums[cond][slot + 1] += 1

    rows = []
    for cond in order:
        sum_a, n_a, sum_b, n_b = sums[cond]
        a: Optional[float] = sum_a / n_a if n_a else None
        b: Optional[float] = sum_b / n_b if n_b else None
        gap = a - b if (a is not None and b is not None) else None
        rows.append(
            {"kind": cond[0], "value": cond[1], "a": a, "b": b, "gap": gap}
        )
    return rows


def format_gap_table(rows: Sequence[dict], pair_a: str, pair_b: str) -> str:
    """Render a gap report as CSV text (three decimals, matching the
    precision the scores are usually reported at)."""
    def fmt(x):
        return "" if x is None else "%.3f" % x

    lines = [f"kind,value,{pair_a},{pair_b},gap"]
    for row in rows:
        lines.append(
            f"{row['kind']},{row['value']},{fmt(row['a'])},{fmt(row['b'])},{fmt(row['gap'])}"
        )
    return "\n".join(lines) + "\n"
