"""Ordered worker fan-out for kernel grids and verification suites."""

import threading
from collections import deque
from collections.abc import Callable, Iterable, Iterator
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import islice
from typing import TypeVar

from step2heat.config import worker_count
from step2heat.kernel.carnot import Triple
from step2heat.logging import get_logger
from step2heat.models import KernelValue
from step2heat.protocols import HeatKernel

logger = get_logger(__name__)

ItemT = TypeVar("ItemT")
ResultT = TypeVar("ResultT")


def _chunks(items: Iterable[ItemT], size: int) -> Iterator[list[ItemT]]:
    iterator = iter(items)
    while chunk := list(islice(iterator, size)):
        yield chunk


def ordered_map(
    function: Callable[[ItemT], ResultT],
    items: Iterable[ItemT],
    workers: int | None = None,
    max_pending: int | None = None,
) -> Iterator[ResultT]:
    """Apply ``function`` on a thread pool and yield results in input order.

    At most ``max_pending`` calls are in flight, so a lazy ``items`` iterable is
    consumed no faster than results are yielded.
    """
    count = workers or worker_count()
    limit = max_pending or 2 * count
    with ThreadPoolExecutor(max_workers=count) as executor:
        pending: deque[Future[ResultT]] = deque()
        for item in items:
            pending.append(executor.submit(function, item))
            if len(pending) >= limit:
                yield pending.popleft().result()
        while pending:
            yield pending.popleft().result()


@dataclass
class GridPipeline:
    """Evaluate a stream of (g, g', t) triples on worker threads.

    Every worker owns a kernel built by ``kernel_factory``, so spectral caches are
    never shared between threads. Rows come back in input order, chunk by chunk.

    Attributes:
        kernel_factory: Builds one evaluation context per worker thread
        workers: Worker threads; ``worker_count()`` when omitted
        chunk_size: Triples per ``evaluate_many`` call
    """

    kernel_factory: Callable[[], HeatKernel]
    workers: int = field(default_factory=worker_count)
    chunk_size: int = 256

    _local: threading.local = field(default_factory=threading.local, init=False, repr=False)

    def __post_init__(self) -> None:
        """Validate pipeline settings."""
        if self.workers <= 0:
            raise ValueError(f"Workers must be positive, got {self.workers}")
        if self.chunk_size <= 0:
            raise ValueError(f"Chunk size must be positive, got {self.chunk_size}")

    def _kernel(self) -> HeatKernel:
        kernel: HeatKernel | None = getattr(self._local, "kernel", None)
        if kernel is None:
            kernel = self.kernel_factory()
            self._local.kernel = kernel
            logger.debug("Built kernel for worker %s", threading.current_thread().name)
        return kernel

    def _evaluate(self, chunk: list[Triple]) -> list[tuple[Triple, KernelValue]]:
        values = self._kernel().evaluate_many(chunk)
        return list(zip(chunk, values, strict=True))

    def run(self, triples: Iterable[Triple]) -> Iterator[tuple[Triple, KernelValue]]:
        """Yield ``(triple, value)`` pairs in the order the triples arrive."""
        for rows in ordered_map(
            self._evaluate, _chunks(triples, self.chunk_size), workers=self.workers
        ):
            yield from rows
