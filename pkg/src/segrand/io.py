"""File formats: PGM / plain-text label maps, pairing manifests, and reports.

Label maps travel as either binary PGM (``P5``, maxval up to 65535,
big-endian two-byte samples above 255, pixel value = label id) or a
plain-text format whose first line is ``rows cols`` followed by row-major
whitespace-separated integers.  A directory stands for a multi-frame
sample: its files are read in lexicographic order and stacked along a
leading frame axis.

Report rendering is deterministic: fixed column order, ``repr`` (shortest
round-trip) float formatting, ``\\n`` line endings.  Identical inputs give
byte-identical output.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .core import SegmentationMap
from .errors import (
    DuplicateSampleIdError,
    EmptyManifestError,
    IoFailureError,
    LabelOutOfRangeError,
    MalformedHeaderError,
    ShapeMismatchError,
    TruncatedDataError,
    UnsupportedFormatError,
)
from .metrics import REPORT_METRIC_KEYS, MetricReport, MetricValue, SummaryRow
from .synth import SweepCurve

#: fixed column order of the per-sample report table
REPORT_COLUMNS = (
    "sample_id",
    "m",
    "fg_m",
    "truth_object_count",
    "ari",
    "arp",
    "arr",
    "fg_ari",
    "fg_arp",
    "fg_arr",
    "rp",
    "rr",
    "degeneracy",
)

_PGM_WS = b" \t\r\n\x0b\x0c"


@dataclass(frozen=True)
class ManifestEntry:
    sample_id: str
    truth_path: Path
    pred_path: Path


@dataclass(frozen=True)
class Manifest:
    """Ordered (sample_id, truth, pred) triples with unique sample ids."""

    entries: tuple[ManifestEntry, ...]
    base_dir: Path


# ---------------------------------------------------------------------------
# label maps


def _parse_pgm(data: bytes) -> np.ndarray:
    pos = 2  # past the b"P5" magic
    fields: list[int] = []
    n = len(data)
    while len(fields) < 3:
        while pos < n and (data[pos : pos + 1] in (b"#",) or data[pos] in _PGM_WS):
            if data[pos : pos + 1] == b"#":
                nl = data.find(b"\n", pos)
                pos = n if nl < 0 else nl + 1
            else:
                pos += 1
        start = pos
        while pos < n and data[pos] not in _PGM_WS and data[pos : pos + 1] != b"#":
            pos += 1
        if pos == start:
            raise MalformedHeaderError("PGM header ended before width/height/maxval")
        try:
            fields.append(int(data[start:pos]))
        except ValueError as exc:
            raise MalformedHeaderError(f"bad PGM header token {data[start:pos]!r}") from exc
    if pos >= n or data[pos] not in _PGM_WS:
        raise MalformedHeaderError("missing whitespace after PGM maxval")
    pos += 1

    width, height, maxval = fields
    if width < 1 or height < 1:
        raise MalformedHeaderError(f"bad PGM dimensions {width}x{height}")
    if not 1 <= maxval <= 65535:
        raise MalformedHeaderError(f"PGM maxval {maxval} outside [1, 65535]")
    two_byte = maxval > 255
    need = width * height * (2 if two_byte else 1)
    if n - pos < need:
        raise TruncatedDataError(f"PGM payload has {n - pos} bytes, needs {need}")
    dtype = np.dtype(">u2") if two_byte else np.dtype(np.uint8)
    samples = np.frombuffer(data, dtype=dtype, count=width * height, offset=pos)
    return samples.astype(np.int32).reshape(height, width)


def _parse_text(text: str) -> np.ndarray:
    head, _, body = text.partition("\n")
    head_tokens = head.split()
    if len(head_tokens) != 2:
        raise MalformedHeaderError(f"first line must be 'rows cols', got {head!r}")
    try:
        rows, cols = int(head_tokens[0]), int(head_tokens[1])
    except ValueError as exc:
        raise MalformedHeaderError(f"first line must be 'rows cols', got {head!r}") from exc
    if rows < 1 or cols < 1:
        raise MalformedHeaderError(f"bad dimensions {rows}x{cols}")
    tokens = body.split()
    if len(tokens) < rows * cols:
        raise TruncatedDataError(f"found {len(tokens)} values, need {rows * cols}")
    if len(tokens) > rows * cols:
        raise MalformedHeaderError(f"found {len(tokens)} values, expected {rows * cols}")
    try:
        values = np.array(tokens).astype(np.int64)
    except (ValueError, OverflowError) as exc:
        raise MalformedHeaderError(f"non-integer label value: {exc}") from exc
    if values.size and int(values.min()) < 0:
        raise MalformedHeaderError("labels must be non-negative")
    return values.reshape(rows, cols)


def _looks_like_text(data: bytes) -> Optional[str]:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        return None
    head_tokens = text.partition("\n")[0].split()
    if len(head_tokens) != 2:
        return None
    try:
        int(head_tokens[0])
        int(head_tokens[1])
    except ValueError:
        return None
    return text


def _read_frame(path: Path) -> np.ndarray:
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise IoFailureError(f"cannot read {path}: {exc}") from exc
    if data.startswith(b"P5"):
        return _parse_pgm(data)
    text = _looks_like_text(data)
    if text is None:
        raise UnsupportedFormatError(f"{path}: neither binary PGM (P5) nor 'rows cols' text")
    return _parse_text(text)


def read_label_map(path: Union[str, Path]) -> SegmentationMap:
    """Read a label map from a PGM or text file, or a directory of frames.

    Raises:
        UnsupportedFormatError, MalformedHeaderError, TruncatedDataError,
        IoFailureError; ShapeMismatchError for inconsistent frame shapes.
    """
    p = Path(path)
    if p.is_dir():
        files = sorted(child for child in p.iterdir() if child.is_file())
        if not files:
            raise UnsupportedFormatError(f"{p}: directory contains no frame files")
        frames = [_read_frame(f) for f in files]
        shapes = {f.shape for f in frames}
        if len(shapes) > 1:
            raise ShapeMismatchError(f"{p}: frame shapes differ: {sorted(shapes)}")
        return SegmentationMap(np.stack(frames, axis=0))
    return SegmentationMap(_read_frame(p))


def _encode_pgm(labels: np.ndarray) -> bytes:
    max_label = int(labels.max())
    if max_label > 65535:
        raise LabelOutOfRangeError(f"label {max_label} exceeds the PGM maxval 65535")
    maxval = 255 if max_label <= 255 else 65535
    height, width = labels.shape
    header = f"P5\n{width} {height}\n{maxval}\n".encode("ascii")
    dtype = np.dtype(np.uint8) if maxval == 255 else np.dtype(">u2")
    return header + labels.astype(dtype).tobytes(order="C")


def _encode_text(labels: np.ndarray) -> bytes:
    rows, cols = labels.shape
    lines = [f"{rows} {cols}"]
    lines.extend(" ".join(str(int(v)) for v in row) for row in labels)
    return ("\n".join(lines) + "\n").encode("ascii")


def write_label_map(seg: SegmentationMap, path: Union[str, Path], fmt: str = "pgm") -> None:
    """Write a label map; a 3-D map becomes a directory of frame files.

    ``fmt`` is ``"pgm"`` (maxval 255 or 65535 chosen from the largest
    label) or ``"text"``.  Round trip through :func:`read_label_map` is the
    identity.

    Raises:
        LabelOutOfRangeError: a label does not fit PGM's 16-bit samples.
        IoFailureError: the underlying write failed.
    """
    if fmt not in ("pgm", "text"):
        raise ValueError(f"unknown format {fmt!r}")
    p = Path(path)
    try:
        if seg.ndim == 3:
            p.mkdir(parents=True, exist_ok=True)
            ext = "pgm" if fmt == "pgm" else "txt"
            for idx in range(seg.shape[0]):
                frame = SegmentationMap(seg.labels[idx])
                write_label_map(frame, p / f"frame_{idx:04d}.{ext}", fmt)
            return
        encoded = _encode_pgm(seg.labels) if fmt == "pgm" else _encode_text(seg.labels)
        p.write_bytes(encoded)
    except OSError as exc:
        raise IoFailureError(f"cannot write {p}: {exc}") from exc


# ---------------------------------------------------------------------------
# manifests


def read_manifest(path: Union[str, Path]) -> Manifest:
    """Read a ``sample_id,truth,pred`` CSV; relative paths resolve against it.

    Raises:
        MalformedHeaderError, DuplicateSampleIdError, EmptyManifestError,
        IoFailureError.
    """
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8-sig")
    except OSError as exc:
        raise IoFailureError(f"cannot read {p}: {exc}") from exc
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if not rows:
        raise MalformedHeaderError(f"{p}: empty file, expected 'sample_id,truth,pred' header")
    header = [h.strip() for h in rows[0]]
    if header != ["sample_id", "truth", "pred"]:
        raise MalformedHeaderError(f"{p}: header must be 'sample_id,truth,pred', got {header}")
    if len(rows) == 1:
        raise EmptyManifestError(f"{p}: no entries")

    base = p.resolve().parent
    entries = []
    seen: set[str] = set()
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise MalformedHeaderError(f"{p}:{lineno}: expected 3 fields, got {len(row)}")
        sample_id, truth, pred = (f.strip() for f in row)
        if not sample_id or not truth or not pred:
            raise MalformedHeaderError(f"{p}:{lineno}: empty field")
        if sample_id in seen:
            raise DuplicateSampleIdError(f"{p}:{lineno}: duplicate sample_id {sample_id!r}")
        seen.add(sample_id)
        entries.append(
            ManifestEntry(
                sample_id=sample_id,
                truth_path=base / truth if not Path(truth).is_absolute() else Path(truth),
                pred_path=base / pred if not Path(pred).is_absolute() else Path(pred),
            )
        )
    return Manifest(entries=tuple(entries), base_dir=base)


# ---------------------------------------------------------------------------
# reports


def _fmt_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, MetricValue):
        return repr(value.value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _report_cells(sample_id: str, report: MetricReport) -> dict[str, object]:
    return {
        "sample_id": sample_id,
        "m": report.pixel_count,
        "fg_m": report.fg_pixel_count,
        "truth_object_count": report.truth_object_count,
        "ari": report.ari,
        "arp": report.arp,
        "arr": report.arr,
        "fg_ari": report.fg_ari,
        "fg_arp": report.fg_arp,
        "fg_arr": report.fg_arr,
        "rp": report.rp_unadj,
        "rr": report.rr_unadj,
        "degeneracy": report.degeneracy.value,
    }


def _csv_lines(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _json_value(value):
    if isinstance(value, MetricValue):
        return value.value
    return value


def render_reports(items: Sequence[tuple[str, MetricReport]], fmt: str = "csv") -> str:
    """Per-sample table; degenerate values appear as their resolved value and
    the ``degeneracy`` column carries the report flag."""
    cells = [_report_cells(sid, rep) for sid, rep in items]
    if fmt == "csv":
        rows = [[_fmt_value(c[col]) for col in REPORT_COLUMNS] for c in cells]
        return _csv_lines(REPORT_COLUMNS, rows)
    if fmt == "json":
        payload = [{col: _json_value(c[col]) for col in REPORT_COLUMNS} for c in cells]
        return json.dumps(payload, indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def _summary_columns() -> list[str]:
    cols = ["group", "count"]
    for key in REPORT_METRIC_KEYS:
        cols.extend([f"{key}_mean", f"{key}_std", f"{key}_finite", f"{key}_degenerate"])
    return cols


def render_summary(rows: Sequence[SummaryRow], fmt: str = "csv") -> str:
    """Grouped summary table: count, mean, std, and degenerate count per metric."""
    columns = _summary_columns()
    records = []
    for row in rows:
        rec: dict[str, object] = {"group": row.group, "count": row.count}
        for key in REPORT_METRIC_KEYS:
            stat = row.metrics[key]
            rec[f"{key}_mean"] = stat.mean
            rec[f"{key}_std"] = stat.std
            rec[f"{key}_finite"] = stat.finite_count
            rec[f"{key}_degenerate"] = stat.degenerate_count
        records.append(rec)
    if fmt == "csv":
        table = [[_fmt_value(rec[col]) for col in columns] for rec in records]
        return _csv_lines(columns, table)
    if fmt == "json":
        return json.dumps(records, indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def render_sweep(curve: SweepCurve, fmt: str = "csv") -> str:
    """Sweep table with columns ``k,ari,arp,arr`` (resolved values)."""
    if fmt == "csv":
        rows = [
            [str(r.k), repr(r.ari.value), repr(r.arp.value), repr(r.arr.value)]
            for r in curve.rows
        ]
        return _csv_lines(("k", "ari", "arp", "arr"), rows)
    if fmt == "json":
        payload = [
            {"k": r.k, "ari": r.ari.value, "arp": r.arp.value, "arr": r.arr.value}
            for r in curve.rows
        ]
        return json.dumps(payload, indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def render_report(obj, fmt: str = "csv") -> str:
    """Render per-sample reports, a summary, or a sweep curve to CSV/JSON."""
    if isinstance(obj, SweepCurve):
        return render_sweep(obj, fmt)
    items = list(obj)
    if items and isinstance(items[0], SummaryRow):
        return render_summary(items, fmt)
    return render_reports(items, fmt)


def write_report(obj, path: Union[str, Path], fmt: str = "csv") -> None:
    """Render and write a report table.

    Raises:
        IoFailureError: the underlying write failed.
    """
    content = render_report(obj, fmt)
    try:
        Path(path).write_text(content, encoding="utf-8")
    except OSError as exc:
        raise IoFailureError(f"cannot write {path}: {exc}") from exc
