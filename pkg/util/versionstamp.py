"""
Run identifiers for experiment reports.
A run id only appears in a report's provenance block, which is never part of
the determinism comparison between two runs of the same config.
"""
from random import getrandbits
from struct import pack
from threading import Lock
from time import time_ns

versionid = str  # 24 hex digits

_COUNTER_MAX = 0xFFFF


class versionstamp:
    def __init__(self) -> None:
        self._last_us = 0
        self._seq = 0
        self._lock = Lock()

    def _tick(self) -> tuple[int, int]:
        now = time_ns() // 1_000
        if now > self._last_us:
            self._last_us, self._seq = now, 0
        elif self._seq < _COUNTER_MAX:
            self._seq += 1
        else:
            # counter exhausted within one microsecond: borrow the next one
            self._last_us, self._seq = self._last_us + 1, 0
        return self._last_us, self._seq

    def __call__(self) -> versionid:
        """
        New run id: microseconds since the epoch (8 bytes), a counter for ids
        minted in the same microsecond (2 bytes) and 2 random bytes.
        Thread-safe, so concurrent experiment runs never share an id, and ids
        from one generator sort in creation order.
        """
        with self._lock:
            us, seq = self._tick()
        return pack(">QHH", us, seq, getrandbits(16)).hex()


def stamp_time(stamp: versionid) -> int:
    """Microsecond timestamp encoded in a run id."""
    if len(stamp) != 24:
        raise ValueError(f"not a run id: {stamp!r}")
    return int(stamp[:16], 16)
