"""CSV ingestion and deterministic result emission.

Series files use the header ``date,close``.  Results are written through a
:class:`RunDirectory`, which hashes every file it writes and finishes with a
``manifest.json``.  Wall-clock times go to a separate ``timings.json`` so the
manifest itself is byte-identical across reruns.
"""

from __future__ import annotations

import csv
import datetime as dt
import hashlib
import io
import json
import math
import platform
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import IngestError
from .series import PriceSeries

SCHEMA_VERSION = 1
SYNTHETIC_T0 = dt.date(2000, 1, 1)


def read_price_csv(path) -> PriceSeries:
    """Read a ``date,close`` file.

    Dates must be ISO-8601 and strictly ascending, closes decimal and > 0.
    Any violation raises :class:`IngestError` naming the file and line.
    """
    path = Path(path)
    try:
        handle = path.open(newline="")
    except OSError as exc:
        raise IngestError(f"cannot open: {exc.strerror}", str(path)) from exc
    labels, closes = [], []
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError("empty file", str(path), 1) from None
        if [h.strip().lower() for h in header] != ["date", "close"]:
            raise IngestError(f"expected header 'date,close', got {','.join(header)!r}", str(path), 1)
        previous = None
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise IngestError(f"expected 2 fields, got {len(row)}", str(path), line)
            raw_date, raw_close = row[0].strip(), row[1].strip()
            try:
                day = dt.date.fromisoformat(raw_date)
            except ValueError:
                raise IngestError(f"bad ISO-8601 date {raw_date!r}", str(path), line) from None
            try:
                close = float(raw_close)
            except ValueError:
                raise IngestError(f"bad close value {raw_close!r}", str(path), line) from None
            if not (math.isfinite(close) and close > 0):
                raise IngestError(f"close must be a finite number > 0, got {raw_close!r}", str(path), line)
            if previous is not None and day <= previous:
                raise IngestError(f"date {raw_date} is not after {previous.isoformat()}", str(path), line)
            previous = day
            labels.append(raw_date)
            closes.append(close)
    if len(closes) < 2:
        raise IngestError(f"need at least 2 rows, got {len(closes)}", str(path))
    return PriceSeries(np.array(closes), tuple(labels))


def fmt(value) -> str:
    """Shortest round-tripping text for a number."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    return repr(value)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([c if isinstance(c, str) else fmt(c) for c in row])
    return buf.getvalue()


def series_csv_text(series: PriceSeries) -> str:
    labels = series.labels
    if labels is None:
        labels = [(SYNTHETIC_T0 + dt.timedelta(days=i)).isoformat() for i in range(len(series))]
    return csv_text(["date", "close"], zip(labels, series.values))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, Path):
        return str(obj)
    return obj


def json_text(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def versions() -> dict:
    import numba
    import scipy
    import sklearn

    return {
        "gainloss": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "scikit-learn": sklearn.__version__,
        "numba": numba.__version__,
        "python": platform.python_version(),
    }


class RunDirectory:
    """Collects the outputs of one experiment run under ``root``."""

    def __init__(self, root, experiment: str, config: dict):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.experiment = experiment
        self.config = dict(config)
        self.files: dict[str, str] = {}
        self.failures: list[dict] = []
        self.timings: dict[str, float] = {}
        self._started = time.perf_counter()

    def write_text(self, name: str, text: str) -> Path:
        path = self.root / name
        path.parent.mkdir(parents=True, exist_ok=True)
        data = text.encode()
        path.write_bytes(data)
        self.files[name] = hashlib.sha256(data).hexdigest()
        return path

    def write_csv(self, name, header, rows) -> Path:
        return self.write_text(name, csv_text(header, rows))

    def write_json(self, name, obj) -> Path:
        return self.write_text(name, json_text(obj))

    def record_failure(self, where: str, error: BaseException) -> None:
        self.failures.append({"where": where, "error": type(error).__name__, "message": str(error)})

    def timed(self, label: str):
        run = self

        class _Timer:
            def __enter__(self):
                self.t0 = time.perf_counter()

            def __exit__(self, *exc):
                run.timings[label] = run.timings.get(label, 0.0) + time.perf_counter() - self.t0
                return False

        return _Timer()

    def finish(self) -> dict:
        manifest = {
            "schema_version": SCHEMA_VERSION,
            "experiment": self.experiment,
            "config": self.config,
            "files": dict(sorted(self.files.items())),
            "failures": self.failures,
            "versions": versions(),
        }
        (self.root / "manifest.json").write_text(json_text(manifest))
        self.timings["total"] = time.perf_counter() - self._started
        (self.root / "timings.json").write_text(json_text(self.timings))
        return manifest


def verify_manifest(root) -> list[str]:
    """Names of manifest entries that are missing or whose hash differs."""
    root = Path(root)
    manifest = json.loads((root / "manifest.json").read_text())
    bad = []
    for name, digest in manifest["files"].items():
        path = root / name
        if not path.exists() or sha256_file(path) != digest:
            bad.append(name)
    return bad
