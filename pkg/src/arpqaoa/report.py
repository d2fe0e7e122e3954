"""Benchmark report: per-repeat CSV, aggregate JSON, gnuplot data and PNG figures."""

from __future__ import annotations

import csv
import json
import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .bench import FORMS, Row
from .qaoa import normalized_distance

CSV_HEADER = ("test", "repeat", "circuit_depth", "two_qubit_gates", "found_solution")
HIT_TOL = 1e-9


class EmptyReportError(ValueError):
    """No rows survived the filter."""


def save_rows(rows: Sequence[Row], path, skipped: Sequence[dict] = ()) -> None:
    doc = {"rows": [r.to_dict() for r in rows], "skipped": list(skipped)}
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def load_rows(paths: Iterable) -> list[Row]:
    rows = []
    for path in paths:
        doc = json.loads(Path(path).read_text())
        rows.extend(Row(**r) for r in doc["rows"])
    return rows


def filter_rows(rows: Sequence[Row], tests: Sequence[str] = (), forms: Sequence[str] = ()) -> list[Row]:
    return [r for r in rows if (not tests or r.test in tests) and (not forms or r.form in forms)]


@dataclass(frozen=True)
class Aggregate:
    test: str
    form: str
    repeats: int
    qubits: int
    depth: int
    two_qubit_gates: int
    optimal_cost: float
    mean_found: float
    std_found: float  # population standard deviation
    hits: int
    normalized_distance: float | None  # None when the optimum is 0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _form_order(form: str) -> tuple:
    return (FORMS.index(form) if form in FORMS else len(FORMS), form)


def aggregate(rows: Sequence[Row]) -> list[Aggregate]:
    groups: dict[tuple[str, str], list[Row]] = {}
    for r in rows:
        groups.setdefault((r.test, r.form), []).append(r)
    out = []
    for (test, form), rs in sorted(groups.items(), key=lambda kv: (kv[0][0], _form_order(kv[0][1]))):
        rs = sorted(rs, key=lambda r: r.repeat)
        opt = rs[0].optimal_cost
        found = [r.found_cost for r in rs]
        nd = normalized_distance(found, opt) if opt != 0 else None
        out.append(Aggregate(test, form, len(rs), rs[0].qubits, rs[0].depth, rs[0].two_qubit_gates,
                             opt, statistics.fmean(found), statistics.pstdev(found),
                             sum(abs(x - opt) <= HIT_TOL for x in found), nd))
    return out


def _fmt(x) -> str:
    return str(x) if isinstance(x, int) else repr(float(x))


def write_csv(rows: Sequence[Row], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in sorted(rows, key=lambda r: (r.test, r.repeat)):
            w.writerow([r.test, r.repeat, r.depth, r.two_qubit_gates, _fmt(r.found_cost)])


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"unexpected CSV header in {path}")
        return list(reader)


def _series(aggs: Sequence[Aggregate], field: str) -> tuple[list[str], list[str], dict]:
    tests = sorted({a.test for a in aggs})
    forms = sorted({a.form for a in aggs}, key=_form_order)
    table = {(a.test, a.form): getattr(a, field) for a in aggs}
    return tests, forms, table


def write_dat(aggs: Sequence[Aggregate], field: str, path) -> None:
    """One row per test, one column per form; missing cells are ``NaN``."""
    tests, forms, table = _series(aggs, field)
    lines = ["# test " + " ".join(forms)]
    for t in tests:
        cells = []
        for f in forms:
            v = table.get((t, f))
            cells.append("NaN" if v is None else _fmt(v))
        lines.append(" ".join([t, *cells]))
    Path(path).write_text("\n".join(lines) + "\n")


def write_scatter_dat(rows: Sequence[Row], path) -> None:
    lines = ["# test form repeat found_solution optimal"]
    for r in sorted(rows, key=lambda r: (r.test, _form_order(r.form), r.repeat)):
        lines.append(f"{r.test} {r.form} {r.repeat} {_fmt(r.found_cost)} {_fmt(r.optimal_cost)}")
    Path(path).write_text("\n".join(lines) + "\n")


def _bar_chart(aggs, field, ylabel, path, log=False) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import numpy as np

    tests, forms, table = _series(aggs, field)
    width = 0.8 / max(len(forms), 1)
    x = np.arange(len(tests))
    fig, ax = plt.subplots(figsize=(6, 4))
    for k, form in enumerate(forms):
        vals = [table.get((t, form)) for t in tests]
        vals = [np.nan if v is None else v for v in vals]
        ax.bar(x + (k - (len(forms) - 1) / 2) * width, vals, width, label=form)
    ax.set_xticks(x, tests)
    ax.set_ylabel(ylabel)
    if log:
        ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _scatter_chart(rows: Sequence[Row], path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    tests = sorted({r.test for r in rows})
    forms = sorted({r.form for r in rows}, key=_form_order)
    fig, axes = plt.subplots(1, len(tests), figsize=(4 * len(tests), 3.5), squeeze=False)
    for ax, t in zip(axes[0], tests):
        sub = [r for r in rows if r.test == t]
        for k, form in enumerate(forms):
            pts = [r for r in sub if r.form == form]
            ax.scatter([k] * len(pts), [r.found_cost for r in pts], label=form, alpha=0.6)
        ax.axhline(sub[0].optimal_cost, color="black", linestyle="--", linewidth=1, label="optimum")
        ax.set_xticks(range(len(forms)), forms, rotation=20)
        ax.set_title(t)
        ax.set_ylabel("found solution")
    axes[0][0].legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_report(rows: Sequence[Row], outdir, plots: bool = True) -> list[Path]:
    """Write every report artifact into ``outdir`` and return their paths.

    The aggregate normalized distance is checked against a recomputation
    from the CSV files just written.
    """
    if not rows:
        raise EmptyReportError("no rows to report (check the --test/--form filter)")
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    aggs = aggregate(rows)

    for form in sorted({r.form for r in rows}, key=_form_order):
        path = out / f"{form}.csv"
        write_csv([r for r in rows if r.form == form], path)
        written.append(path)

    path = out / "aggregate.json"
    path.write_text(json.dumps([a.to_dict() for a in aggs], indent=2, sort_keys=True) + "\n")
    written.append(path)

    for field in ("depth", "two_qubit_gates", "normalized_distance"):
        path = out / f"{field}.dat"
        write_dat(aggs, field, path)
        written.append(path)
    path = out / "found_solutions.dat"
    write_scatter_dat(rows, path)
    written.append(path)

    check_aggregate(out)

    if plots:
        for field, label, log in (("depth", "circuit depth", True),
                                  ("two_qubit_gates", "two-qubit gates", False),
                                  ("normalized_distance", "normalized distance", False)):
            path = out / f"{field}.png"
            _bar_chart(aggs, field, label, path, log)
            written.append(path)
        path = out / "found_solutions.png"
        _scatter_chart(rows, path)
        written.append(path)
    return written


def check_aggregate(outdir) -> None:
    """Recompute N_D from the per-form CSVs and compare with ``aggregate.json``."""
    out = Path(outdir)
    for a in json.loads((out / "aggregate.json").read_text()):
        found = [float(r["found_solution"]) for r in read_csv(out / f"{a['form']}.csv")
                 if r["test"] == a["test"]]
        if len(found) != a["repeats"]:
            raise ValueError(f"{a['test']}/{a['form']}: {len(found)} CSV rows, {a['repeats']} expected")
        if a["normalized_distance"] is None:
            continue
        nd = normalized_distance(found, a["optimal_cost"])
        if abs(nd - a["normalized_distance"]) > 1e-12:
            raise ValueError(f"{a['test']}/{a['form']}: stored N_D {a['normalized_distance']} != {nd}")
