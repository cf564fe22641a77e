"""SMS-over-IP gateway stub and the delivery worker pool.

The stub is a local sink: every delivered message becomes one line
`ISO8601<TAB>recipient<TAB>payload` in the sink file. A configurable
failure rate simulates an unreachable gateway for retry/backoff testing.

Delivery is at-least-once: workers drain the queued notification log,
retry with exponential backoff, and a startup recovery pass re-drives
anything a previous process left queued.
"""

from __future__ import annotations

import logging
import queue
import random
import threading
import time
from pathlib import Path

from .clock import iso
from .errors import GatewayUnreachable
from .registry import Registry

log = logging.getLogger("pregcare.gateway")


class GatewayStub:
    """Local stand-in for a carrier gateway; thread-safe."""

    def __init__(self, sink_path, failure_rate: float = 0.0, seed=None):
        self.sink_path = Path(sink_path)
        self.failure_rate = failure_rate
        self._rng = random.Random(seed)
        self._lock = threading.Lock()
        self.sink_path.parent.mkdir(parents=True, exist_ok=True)

    def send(self, recipient: str, payload: str, now) -> None:
        with self._lock:
            if self._rng.random() < self.failure_rate:
                raise GatewayUnreachable("simulated gateway failure")
            line = f"{iso(now)}\t{recipient}\t{payload}\n"
            with self.sink_path.open("a", encoding="utf-8") as f:
                f.write(line)


class DeliveryService:
    """Small worker pool pushing queued notifications through the gateway."""

    def __init__(self, registry: Registry, gateway: GatewayStub, clock,
                 workers: int = 2, retry_count: int = 2, backoff_base_s: float = 0.05):
        self.registry = registry
        self.gateway = gateway
        self.clock = clock
        self.workers = workers
        self.retry_count = retry_count
        self.backoff_base_s = backoff_base_s
        self._queue: queue.Queue = queue.Queue()
        self._threads: list[threading.Thread] = []
        self._stop = threading.Event()
        self._inflight: set = set()
        self._inflight_lock = threading.Lock()

    # -- lifecycle ---------------------------------------------------------

    def start(self) -> None:
        if self.workers <= 0:
            return
        self.recover()
        for i in range(self.workers):
            t = threading.Thread(target=self._worker, name=f"delivery-{i}", daemon=True)
            t.start()
            self._threads.append(t)

    def stop(self) -> None:
        self._stop.set()
        for t in self._threads:
            t.join(timeout=2)
        self._threads.clear()

    def recover(self) -> int:
        """Re-enqueue every notification a previous run left queued."""
        count = 0
        for n in self.registry.notifications(status="queued"):
            self.enqueue(n.notification_id)
            count += 1
        if count:
            log.info("recovery re-queued %d notifications", count)
        return count

    # -- delivery ----------------------------------------------------------

    def enqueue(self, notification_id: str) -> None:
        with self._inflight_lock:
            if notification_id in self._inflight:
                return
            self._inflight.add(notification_id)
        self._queue.put(notification_id)

    def _worker(self) -> None:
        while not self._stop.is_set():
            try:
                nid = self._queue.get(timeout=0.1)
            except queue.Empty:
                continue
            try:
                self.deliver(nid)
            finally:
                with self._inflight_lock:
                    self._inflight.discard(nid)
                self._queue.task_done()

    def deliver(self, notification_id: str) -> str:
        """Attempt delivery with retries; returns terminal status."""
        record = self.registry.get_notification(notification_id)
        if record.status != "queued":
            return record.status
        attempts = self.retry_count + 1
        for attempt in range(attempts):
            try:
                self.gateway.send(record.recipient_phone, record.payload, self.clock.now())
                self.registry.mark_notification(notification_id, "sent")
                return "sent"
            except GatewayUnreachable:
                if attempt + 1 < attempts:
                    time.sleep(self.backoff_base_s * (2 ** attempt))
        self.registry.mark_notification(notification_id, "failed")
        log.warning("notification %s failed after %d attempts", notification_id, attempts)
        return "failed"

    def drain(self, timeout_s: float = 10.0) -> bool:
        """Block until nothing is queued or in flight (test helper)."""
        deadline = time.monotonic() + timeout_s
        while time.monotonic() < deadline:
            with self._inflight_lock:
                busy = bool(self._inflight)
            if not busy and self._queue.empty():
                if not self.registry.notifications(status="queued"):
                    return True
                self.recover()
            time.sleep(0.02)
        return False
