"""Report envelopes and atomic artifact emission.

Every artifact (JSON or CSV) carries the envelope: tool version, the exact
command, the config snapshot, and timing.  In exact mode the timing field
is left null so that identical runs produce identical bytes; wall-clock
numbers go to stderr instead.  Numbers born exact are emitted as exact
strings (integers in decimal, rationals as p/q); floats carry shortest
round-trip representations (at most 17 significant digits).
"""

from __future__ import annotations

import json
import os
import tempfile

from .config import RunConfig

SCHEMA_VERSION = 1
TOOL_NAME = "vpwalsh"
TOOL_VERSION = "0.1.0"


def make_envelope(command: list[str], config: RunConfig, elapsed: float | None) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": f"{TOOL_NAME} {TOOL_VERSION}",
        "command": list(command),
        "config": config.snapshot(),
        "seed": config.seed,
        "timing": (
            None
            if config.number_mode == "exact" or elapsed is None
            else {"elapsed_seconds": round(elapsed, 6)}
        ),
    }


def _atomic_write(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-artifact-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json_artifact(path: str, envelope: dict, payload) -> None:
    doc = dict(envelope)
    doc["payload"] = payload
    _atomic_write(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def write_csv_artifact(path: str, envelope: dict, header: list[str], rows) -> None:
    lines = ["# " + json.dumps(envelope, sort_keys=True)]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(str(c) for c in row))
    _atomic_write(path, "\n".join(lines) + "\n")
