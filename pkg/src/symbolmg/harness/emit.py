"""Flat-file output: one CSV table plus one residual-history file per run."""
from __future__ import annotations

import csv
import io
from pathlib import Path

HEADER = ("experiment", "n", "cycle", "nu_pre", "nu_post", "iterations", "converged",
          "final_rel_res", "work_units")


def history_name(row) -> str:
    return f"{row.experiment}_n{row.n}_{row.cycle}_{row.nu_pre}_{row.nu_post}.txt"


def format_table(rows) -> str:
    """CSV text with the fixed header (wall time is left out so tables are reproducible)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for r in rows:
        writer.writerow([r.experiment, r.n, r.cycle, r.nu_pre, r.nu_post, r.iterations,
                         int(bool(r.converged)), f"{r.final_rel_res:.15e}",
                         f"{r.work_units:.15e}"])
    return buf.getvalue()


def format_history(history) -> str:
    return "".join(f"{v:.15e}\n" for v in history)


def emit(rows, out_dir, fmt: str = "csv", table_name: str = "results.csv") -> list[Path]:
    """Write the table and the residual histories under ``out_dir``; return the written paths."""
    if fmt != "csv":
        raise ValueError(f"unsupported format {fmt!r}")
    rows = list(rows)
    out = Path(out_dir)
    written = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        table = out / table_name
        table.write_text(format_table(rows), encoding="utf-8")
        written.append(table)
        hist_dir = out / "histories"
        for r in rows:
            if not r.history:
                continue
            hist_dir.mkdir(exist_ok=True)
            path = hist_dir / history_name(r)
            path.write_text(format_history(r.history), encoding="utf-8")
            written.append(path)
    except OSError as exc:
        raise OSError(f"cannot write results under {out}: {exc}") from exc
    return written
