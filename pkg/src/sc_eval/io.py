"""Record files and report emission.

Record files are CSV (with header) or JSON lines with the columns::

    csf_id, run_id, sample_id, confidence, error              # variant "error"
    csf_id, run_id, sample_id, confidence, label, prediction  # variant "labels"

Sets are stored in sorted ``sample_id`` order, so bootstrap index ``i`` means
the same test case for every CSF and run. Reals are written with their
shortest round-trip representation.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from pathlib import Path
from typing import Any, Iterator, Literal

import numpy as np

from . import __version__
from .core import make_evaluation_set
from .errors import AlignmentError, DuplicateSample, ParseError, ValidationError
from .ranking import ExperimentGrid

Format = Literal["csv", "jsonl"]
Variant = Literal["error", "labels"]

BASE_COLUMNS = ("csf_id", "run_id", "sample_id", "confidence")
VARIANT_COLUMNS = {"error": ("error",), "labels": ("label", "prediction")}


def infer_format(path: str | Path) -> Format:
    suffix = Path(path).suffix.lower()
    if suffix in (".jsonl", ".ndjson"):
        return "jsonl"
    return "csv"


def _iter_rows(path: Path, fmt: Format) -> Iterator[tuple[int, dict[str, Any]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        if fmt == "csv":
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise ParseError("empty file", line=1)
            yield 1, {name: None for name in reader.fieldnames}
            for row in reader:
                yield reader.line_num, row
        else:
            header_sent = False
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ParseError(f"invalid JSON: {exc.msg}", line=lineno) from None
                if not isinstance(obj, dict):
                    raise ParseError("each line must be a JSON object", line=lineno)
                if not header_sent:
                    header_sent = True
                    yield 0, {name: None for name in obj}
                yield lineno, obj


def _as_float(value: Any, column: str, line: int) -> float:
    if isinstance(value, bool):
        raise ParseError(f"{column}: expected a number, got {value!r}", line=line)
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ParseError(f"{column}: expected a number, got {value!r}", line=line) from None
    if not math.isfinite(out):
        raise ParseError(f"{column}: value must be finite, got {value!r}", line=line)
    return out


def _as_int(value: Any, column: str, line: int) -> int:
    if isinstance(value, bool):
        raise ParseError(f"{column}: expected an integer, got {value!r}", line=line)
    if isinstance(value, int):
        return value
    try:
        return int(str(value).strip())
    except ValueError:
        raise ParseError(f"{column}: expected an integer, got {value!r}", line=line) from None


def load_records(
    path: str | Path,
    fmt: Format | None = None,
    variant: Variant = "error",
) -> ExperimentGrid:
    """Read a record file into an aligned :class:`ExperimentGrid`."""
    path = Path(path)
    fmt = fmt or infer_format(path)
    if variant not in VARIANT_COLUMNS:
        raise ValueError(f"unknown variant {variant!r}")
    required = BASE_COLUMNS + VARIANT_COLUMNS[variant]

    data: dict[str, dict[str, dict[str, tuple[float, float]]]] = {}
    rows = _iter_rows(path, fmt)
    try:
        _, header = next(rows)
    except StopIteration:
        raise ParseError("empty file", line=1) from None
    missing = [c for c in required if c not in header]
    if missing:
        raise ParseError(f"missing column(s) {', '.join(missing)} for variant {variant!r}", line=1)

    for line, row in rows:
        absent = [c for c in required if row.get(c) in (None, "")]
        if absent:
            raise ParseError(f"missing value(s) for {', '.join(absent)}", line=line)
        csf, run, sample = str(row["csf_id"]), str(row["run_id"]), str(row["sample_id"])
        conf = _as_float(row["confidence"], "confidence", line)
        if variant == "error":
            err = _as_float(row["error"], "error", line)
            if err < 0:
                raise ParseError(f"error must be >= 0, got {err!r}", line=line)
        else:
            label = _as_int(row["label"], "label", line)
            pred = _as_int(row["prediction"], "prediction", line)
            err = float(label != pred)
        samples = data.setdefault(csf, {}).setdefault(run, {})
        if sample in samples:
            raise DuplicateSample(f"line {line}: sample {sample!r} repeated for csf {csf!r}, run {run!r}")
        samples[sample] = (conf, err)

    if not data:
        raise ParseError("file contains no records", line=1)

    universe: set[str] | None = None
    for csf, runs in data.items():
        for run, samples in runs.items():
            if universe is None:
                universe = set(samples)
            elif set(samples) != universe:
                diff = sorted(universe.symmetric_difference(samples))[:5]
                raise AlignmentError(
                    f"csf {csf!r}, run {run!r} covers a different sample set (e.g. {diff})"
                )
    sample_ids = tuple(sorted(universe or ()))

    runs_out = {}
    run_ids = {}
    for csf, runs in data.items():
        sets = []
        for run, samples in runs.items():
            pairs = np.array([samples[s] for s in sample_ids], dtype=np.float64)
            sets.append(make_evaluation_set(confidence=pairs[:, 0], error=pairs[:, 1]))
        runs_out[csf] = tuple(sets)
        run_ids[csf] = tuple(runs)
    return ExperimentGrid(csf_ids=tuple(data), runs=runs_out, run_ids=run_ids, sample_ids=sample_ids)


def _default_ids(grid: ExperimentGrid) -> tuple[dict[str, tuple[str, ...]], tuple[str, ...]]:
    run_ids = {
        c: tuple(grid.run_ids.get(c) or (str(i) for i in range(len(grid.runs[c]))))
        for c in grid.csf_ids
    }
    if grid.sample_ids is not None:
        return run_ids, grid.sample_ids
    width = len(str(grid.n - 1))
    return run_ids, tuple(f"s{i:0{width}d}" for i in range(grid.n))


def write_records(grid: ExperimentGrid, path: str | Path, fmt: Format | None = None) -> None:
    """Write ``grid`` in the ``error`` variant; :func:`load_records` restores it bit-exactly."""
    path = Path(path)
    fmt = fmt or infer_format(path)
    run_ids, sample_ids = _default_ids(grid)
    columns = BASE_COLUMNS + ("error",)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n") if fmt == "csv" else None
        if writer:
            writer.writerow(columns)
        for csf in grid.csf_ids:
            for run, es in zip(run_ids[csf], grid.runs[csf]):
                conf, err = es.input_order()
                for sample, c, e in zip(sample_ids, conf.tolist(), err.tolist()):
                    if writer:
                        writer.writerow([csf, run, sample, repr(c), repr(e)])
                    else:
                        row = dict(zip(columns, (csf, run, sample, c, e)))
                        fh.write(json.dumps(row) + "\n")


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def provenance(command: str, inputs: list[str | Path], **parameters: Any) -> dict[str, Any]:
    return {
        "tool": "sc-eval",
        "version": __version__,
        "command": command,
        "parameters": parameters,
        "inputs": {str(p): file_digest(p) for p in inputs},
    }


def write_json(path: str | Path, obj: Any) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True, allow_nan=False)
    Path(path).write_text(text + "\n", encoding="utf-8")


def write_csv(path: str | Path, header: list[str], rows: list[list[Any]]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def fmt_real(x: float) -> str:
    return repr(float(x))


def safe_name(identifier: str) -> str:
    out = "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in identifier)
    return out or "_"


def write_curve(path: str | Path, coverage: np.ndarray, risk: np.ndarray) -> None:
    write_csv(path, ["coverage", "risk"], [[fmt_real(c), fmt_real(r)] for c, r in zip(coverage, risk)])


def write_significance_csv(path: str | Path, csf_ids: tuple[str, ...], sig: np.ndarray) -> None:
    """Row ``x``, column ``y``: 1 when ``y`` is significantly better than ``x``."""
    rows = [[csf] + [int(v) for v in row] for csf, row in zip(csf_ids, sig)]
    write_csv(path, ["csf_id"] + list(csf_ids), rows)


def ensure_dir(path: str | Path) -> Path:
    out = Path(path)
    if out.exists() and not out.is_dir():
        raise ValidationError(f"output path {out} exists and is not a directory")
    out.mkdir(parents=True, exist_ok=True)
    return out
