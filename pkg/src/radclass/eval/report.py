"""Human-readable tables and machine-readable JSON/CSV for evaluation results."""

from __future__ import annotations

import csv
import io
import json
from typing import Mapping, Sequence

from .cv import CvReport
from .metrics import MetricsReport

FORMATS = ("table", "json", "csv")


def dumps(obj) -> str:
    """Stable JSON: sorted keys, full float precision."""
    return json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=False)


def _table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
    line = "+" + "+".join("-" * (w + 2) for w in widths) + "+"
    fmt = "|" + "|".join(f" {{:{'<' if i == 0 else '>'}{w}}} " for i, w in enumerate(widths)) + "|"
    out = [line, fmt.format(*header), line]
    out += [fmt.format(*map(str, r)) for r in rows]
    out.append(line)
    return "\n".join(out)


def _csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def format_metrics(report: MetricsReport, fmt: str = "table", digits: int = 4) -> str:
    if fmt == "json":
        return dumps(report.to_dict())
    header = ["class", "precision", "recall", "f1", "support"]
    rows = [[r["class"], r["precision"], r["recall"], r["f1"], r["support"]] for r in report.rows()]
    if fmt == "csv":
        return _csv(header, rows)
    if fmt != "table":
        raise ValueError(f"unknown format {fmt!r}")
    text = _table(header, [[c, f"{p:.{digits}f}", f"{r:.{digits}f}", f"{f:.{digits}f}", s]
                           for c, p, r, f, s in rows])
    extras = [f"accuracy: {report.accuracy:.{digits}f}"]
    extras += [f"AUC ({name}): {v:.{digits}f}" for name, v in sorted(report.auc.items())]
    return text + "\n" + "\n".join(extras)


def format_cv(reports: Mapping[str, CvReport], fmt: str = "table", digits: int = 2) -> str:
    """One row per classifier: precision and recall as mean ± 1.96·std."""
    if fmt == "json":
        return dumps({name: r.to_dict() for name, r in reports.items()})
    if fmt == "csv":
        header = ["classifier", "metric", "mean", "std", "ci95_low", "ci95_high", "se_ci95_low", "se_ci95_high"]
        rows = []
        for name, r in reports.items():
            for metric in ("precision", "recall", "f1"):
                s = getattr(r, metric)
                rows.append([name, metric, s.mean, s.std, *s.ci95, *s.se_ci95])
        return _csv(header, rows)
    if fmt != "table":
        raise ValueError(f"unknown format {fmt!r}")
    rows = [[name, r.precision.display(digits), r.recall.display(digits)] for name, r in reports.items()]
    k = next(iter(reports.values())).k if reports else 0
    return _table(["Classifier", "Precision", "Recall"], rows) + \
        f"\n{k}-fold cross validation; intervals are avg ± 1.96*std. dev over folds."
