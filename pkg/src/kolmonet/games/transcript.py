"""Line-delimited JSON transcripts; the scripted adversary reads the same format."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable


def dumps_records(records: Iterable[dict]) -> str:
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)


def write_transcript(path, records: Iterable[dict]) -> Path:
    path = Path(path)
    path.write_text(dumps_records(records), encoding="utf-8")
    return path


def read_transcript(path) -> list[dict]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                out.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    return out


def event_records(records: Iterable[dict]) -> list[dict]:
    """Adversary events of a transcript; bare ``{u, v, bound}`` lines count too."""
    out = []
    for rec in records:
        kind = rec.get("type", "event")
        if kind != "event":
            continue
        missing = {"u", "v", "bound"} - rec.keys()
        if missing:
            raise ValueError(f"event record lacks {sorted(missing)}: {rec}")
        out.append({"u": str(rec["u"]), "v": str(rec["v"]), "bound": int(rec["bound"])})
    return out
