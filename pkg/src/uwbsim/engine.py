"""Discrete-event core: event queue, simulation clock and seeded RNG streams.

Time is a float in seconds. Events firing at the same instant are
dispatched in scheduling order (a monotonically increasing sequence
number breaks ties), which is what makes whole runs reproducible.
"""

import heapq
import zlib

import numpy as np


class SchedulingInPastError(RuntimeError):
    """Raised when an event is scheduled before the current clock."""


class Event:
    """A pending callback. The object doubles as its cancellation handle."""

    __slots__ = ("fire_time", "seq", "kind", "target", "payload", "fn",
                 "cancelled", "fired")

    def __init__(self, fire_time, seq, kind, target, payload, fn):
        self.fire_time = fire_time
        self.seq = seq
        self.kind = kind
        self.target = target
        self.payload = payload
        self.fn = fn
        self.cancelled = False
        self.fired = False

    def __repr__(self):
        return f"Event(t={self.fire_time:.6f}, seq={self.seq}, kind={self.kind!r})"


class Scheduler:
    """Single-threaded event loop owning the simulation clock."""

    def __init__(self, trace=False):
        self.now = 0.0
        self._seq = 0
        self._heap = []
        self.trace = [] if trace else None

    def schedule(self, fire_time, kind, fn, target=None, payload=None):
        if fire_time < self.now:
            raise SchedulingInPastError(
                f"event {kind!r} at t={fire_time} scheduled in the past (now={self.now})")
        ev = Event(fire_time, self._seq, kind, target, payload, fn)
        self._seq += 1
        heapq.heappush(self._heap, (fire_time, ev.seq, ev))
        return ev

    def cancel(self, ev):
        """True if the event was still pending; it will not be dispatched."""
        if ev is None or ev.cancelled or ev.fired:
            return False
        ev.cancelled = True
        return True

    def run(self, until):
        """Dispatch every event with fire_time <= until, in order."""
        heap = self._heap
        while heap and heap[0][0] <= until:
            _, _, ev = heapq.heappop(heap)
            if ev.cancelled:
                continue
            self.now = ev.fire_time
            ev.fired = True
            if self.trace is not None:
                self.trace.append((ev.fire_time, ev.seq, ev.kind, ev.target))
            ev.fn()
        self.now = until
        return until


def _key_to_entropy(part):
    if isinstance(part, int):
        return part & 0xFFFFFFFF
    return zlib.crc32(str(part).encode())


class RngStreams:
    """One independent generator per (purpose, node, ...) key.

    The same (seed, key) always yields the same draw sequence, and
    distinct keys are statistically independent, so adding a node or a
    purpose never perturbs the draws of the others.
    """

    def __init__(self, seed):
        self.seed = int(seed)
        self._streams = {}

    def stream(self, *key):
        if key not in self._streams:
            entropy = [self.seed & 0xFFFFFFFFFFFFFFFF] + [_key_to_entropy(p) for p in key]
            self._streams[key] = np.random.default_rng(entropy)
        return self._streams[key]
