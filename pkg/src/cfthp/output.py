"""Results CSV, plot series files and the run manifest.

Layout of an output directory::

    manifest.json       status, schema version, seed, config hash, files
    config.ini          the exact configuration used
    <kind>_sweep.csv    one row per (sweep value, precoder)
    series/<label>.dat  whitespace-delimited: sweep_value esr esr_stderr
    series/manifest.json

``manifest.json`` is written with ``"status": "incomplete"`` before any
computation and rewritten as ``"complete"`` only after every other file is
in place.
"""

import csv
import io
import json
import os
from pathlib import Path

from .errors import EmptyResultError

SCHEMA_VERSION = 1
CSV_COLUMNS = ("sweep", "sweep_value", "precoder", "esr", "esr_stderr",
               "excluded_draw_fraction", "n_outer", "n_inner", "seed", "config_hash")
SERIES_COLUMNS = ("sweep_value", "esr", "esr_stderr")


def _num(x):
    return repr(float(x))


def results_csv(result):
    """Render a sweep result as CSV text (UTF-8, ``\\n`` line endings)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in result.rows:
        writer.writerow([result.kind, _num(r.sweep_value), r.label, _num(r.esr),
                         _num(r.esr_stderr), _num(r.excluded_fraction),
                         result.n_outer, result.n_inner, result.seed, result.config_hash])
    return buf.getvalue()


def read_results_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        return list(reader)


def _write_text(path, text):
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from exc


def emit_plot_data(result, path):
    """One series file per precoder plus a small manifest; returns the paths."""
    labels = result.labels
    if not labels:
        raise EmptyResultError("sweep result has no precoder rows")
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot create {out}: {exc.strerror}") from exc
    files = []
    for label in labels:
        lines = [" ".join(_num(v) for v in (r.sweep_value, r.esr, r.esr_stderr))
                 for r in result.series(label)]
        target = out / f"{label}.dat"
        _write_text(target, "\n".join(lines) + "\n")
        files.append(target)
    manifest = {"schema_version": SCHEMA_VERSION, "sweep": result.kind,
                "columns": list(SERIES_COLUMNS),
                "series": {label: f.name for label, f in zip(labels, files)}}
    _write_text(out / "manifest.json", json.dumps(manifest, indent=2) + "\n")
    return files


def read_series(path):
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                rows.append(tuple(float(tok) for tok in line.split()))
    return rows


class RunWriter:
    """Owns one output directory for the lifetime of a sweep."""

    def __init__(self, directory, config, kind):
        self.dir = Path(directory)
        self.config = config
        self.kind = kind
        try:
            self.dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise OSError(exc.errno, f"cannot create {self.dir}: {exc.strerror}") from exc
        if not os.access(self.dir, os.W_OK):
            raise PermissionError(f"output directory {self.dir} is not writable")
        self._manifest("incomplete", [])
        _write_text(self.dir / "config.ini", config.to_text())

    @property
    def csv_path(self):
        return self.dir / f"{self.kind}_sweep.csv"

    def _manifest(self, status, files):
        manifest = {
            "schema_version": SCHEMA_VERSION,
            "status": status,
            "sweep": self.kind,
            "seed": self.config.seed,
            "config_hash": self.config.digest(),
            "csv_columns": list(CSV_COLUMNS),
            "files": files,
        }
        _write_text(self.dir / "manifest.json", json.dumps(manifest, indent=2) + "\n")

    def finish(self, result):
        _write_text(self.csv_path, results_csv(result))
        series = emit_plot_data(result, self.dir / "series")
        files = ["config.ini", self.csv_path.name, "series/manifest.json"]
        files += [f"series/{p.name}" for p in series]
        self._manifest("complete", files)
