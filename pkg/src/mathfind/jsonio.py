"""One canonical JSON encoding, shared by the CLI, service and snapshots.

Compact separators, UTF-8, no ASCII escaping, insertion-ordered keys.
Everything that promises byte-identical output funnels through here.
"""

from __future__ import annotations

import json


def dumps(obj: object) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def dump_bytes(obj: object) -> bytes:
    return dumps(obj).encode("utf-8")
