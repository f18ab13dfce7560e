"""Frame-deviation scoring against manually (or synthetically) labelled
endpoints, and the sidecar label CSV."""
from __future__ import annotations

import csv
import os
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

LABEL_HEADER = ["path", "start_frame", "end_frame", "group"]


@dataclass(frozen=True)
class GroundTruthLabel:
    start_frame: int
    end_frame: int
    speaker_group: str = ""

    def __post_init__(self):
        if self.start_frame > self.end_frame:
            raise ValueError("label start_frame must not exceed end_frame")


@dataclass
class DeviationReport:
    items: list  # (name, group, start_pct, end_pct)
    groups: "OrderedDict[str, tuple]" = field(default_factory=OrderedDict)
    overall: tuple = (0.0, 0.0)

    def table_rows(self):
        """Rows in the layout group, average start deviation %, average end deviation %."""
        rows = [(g, s, e) for g, (s, e) in self.groups.items()]
        rows.append(("Average % of deviation", *self.overall))
        return rows

    def to_dict(self) -> dict:
        return {
            "items": [dict(name=n, group=g, start_pct=s, end_pct=e) for n, g, s, e in self.items],
            "groups": {g: {"start_pct": s, "end_pct": e} for g, (s, e) in self.groups.items()},
            "overall": {"start_pct": self.overall[0], "end_pct": self.overall[1]},
        }


def frame_deviation(truth: GroundTruthLabel, detected) -> tuple:
    """Absolute start/end frame errors as a percentage of the true segment length."""
    length = truth.end_frame - truth.start_frame + 1
    if length <= 0:
        raise ValueError("true segment has zero length")
    start = 100.0 * abs(detected.start_frame - truth.start_frame) / length
    end = 100.0 * abs(detected.end_frame - truth.end_frame) / length
    return start, end


def aggregate_report(items) -> DeviationReport:
    """Average deviations per speaker group and over all items.

    ``items`` holds ``(label, result)`` or ``(name, label, result)`` tuples.
    """
    items = list(items)
    if not items:
        raise ValueError("cannot aggregate an empty list")
    rows = []
    for i, it in enumerate(items):
        name, label, result = it if len(it) == 3 else (str(i), *it)
        s, e = frame_deviation(label, result)
        rows.append((name, label.speaker_group, s, e))
    groups = OrderedDict()
    for g in sorted({r[1] for r in rows}):
        sel = [r for r in rows if r[1] == g]
        groups[g] = (float(np.mean([r[2] for r in sel])), float(np.mean([r[3] for r in sel])))
    overall = (float(np.mean([r[2] for r in rows])), float(np.mean([r[3] for r in rows])))
    return DeviationReport(rows, groups, overall)


def read_labels(path) -> list:
    """Parse a label CSV into ``(audio_path, GroundTruthLabel)`` pairs.

    Relative audio paths resolve against the CSV's directory.
    """
    base = os.path.dirname(os.path.abspath(path))
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"label file {path} is empty")
        if [h.strip() for h in header] != LABEL_HEADER:
            raise ValueError(f"label file {path}: header must be {','.join(LABEL_HEADER)}, got {','.join(header)}")
        out = []
        for lineno, row in enumerate(reader, start=2):
            if not row or not "".join(row).strip():
                continue
            if len(row) != 4:
                raise ValueError(f"{path}:{lineno}: expected 4 fields, got {len(row)}")
            audio = row[0] if os.path.isabs(row[0]) else os.path.join(base, row[0])
            out.append((audio, GroundTruthLabel(int(row[1]), int(row[2]), row[3])))
    if not out:
        raise ValueError(f"label file {path} has no rows")
    return out


def write_labels(path, rows) -> None:
    """``rows``: iterable of ``(audio_path, GroundTruthLabel)``."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(LABEL_HEADER)
        for audio, lab in rows:
            w.writerow([audio, lab.start_frame, lab.end_frame, lab.speaker_group])
