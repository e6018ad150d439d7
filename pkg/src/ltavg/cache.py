"""Optional on-disk memo spill, activated by the LT_AVG_CACHE_DIR environment variable.

One file per table, named <table>.kv. Layout: a flat sequence of records

    [u32 key length][key bytes][u32 value length][value bytes]

little-endian lengths, ASCII payloads (keys like b"-163", values like b"4/3"),
appended in arrival order; on load, later records for a key win. A torn final
record (e.g. from an interrupted run) is ignored. Only the parent process
writes; workers always recompute into their own memory.
"""
from __future__ import annotations

import os
import struct

_U32 = struct.Struct("<I")


def cache_dir() -> str | None:
    d = os.environ.get("LT_AVG_CACHE_DIR")
    return d if d else None


class DiskTable:
    """Append-only key/value spill for one memo table; silently inactive without the env var."""

    def __init__(self, name: str):
        base = cache_dir()
        self.path = os.path.join(base, name + ".kv") if base else None
        self._fh = None

    def load(self) -> dict[bytes, bytes]:
        out: dict[bytes, bytes] = {}
        if self.path is None or not os.path.exists(self.path):
            return out
        with open(self.path, "rb") as fh:
            blob = fh.read()
        pos = 0
        while pos + 4 <= len(blob):
            (klen,) = _U32.unpack_from(blob, pos)
            pos += 4
            if pos + klen + 4 > len(blob):
                break  # torn record
            key = blob[pos : pos + klen]
            pos += klen
            (vlen,) = _U32.unpack_from(blob, pos)
            pos += 4
            if pos + vlen > len(blob):
                break
            out[key] = blob[pos : pos + vlen]
            pos += vlen
        return out

    def append(self, key: bytes, val: bytes) -> None:
        if self.path is None:
            return
        if self._fh is None:
            os.makedirs(os.path.dirname(self.path), exist_ok=True)
            self._fh = open(self.path, "ab")
        self._fh.write(_U32.pack(len(key)) + key + _U32.pack(len(val)) + val)
        self._fh.flush()

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None
