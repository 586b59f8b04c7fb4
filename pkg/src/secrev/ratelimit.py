"""Token-bucket rate limiting shared by the mining and LLM clients.

One bucket per host/provider, safe for concurrent use. Server-issued
retry-after hints push back all callers via penalize(). Clock and sleep are
injectable so tests run instantly.
"""

import threading
import time
from typing import Callable


class TokenBucket:
    def __init__(
        self,
        rate_per_minute: float,
        capacity: float | None = None,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if rate_per_minute <= 0:
            raise ValueError("rate_per_minute must be positive")
        self._rate = rate_per_minute / 60.0
        self._capacity = capacity if capacity is not None else max(1.0, rate_per_minute / 60.0)
        self._tokens = self._capacity
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._last = clock()
        self._not_before = 0.0

    def _refill(self, now: float) -> None:
        self._tokens = min(self._capacity, self._tokens + (now - self._last) * self._rate)
        self._last = now

    def acquire(self) -> None:
        """Block until a token is available and the penalty window has passed."""
        while True:
            with self._lock:
                now = self._clock()
                self._refill(now)
                wait = self._not_before - now
                if wait <= 0 and self._tokens >= 1.0:
                    self._tokens -= 1.0
                    return
                if wait <= 0:
                    wait = (1.0 - self._tokens) / self._rate
            self._sleep(min(wait, 5.0))

    def penalize(self, seconds: float) -> None:
        """Honor a server retry-after: nobody proceeds for the given window."""
        with self._lock:
            now = self._clock()
            self._not_before = max(self._not_before, now + max(0.0, seconds))
