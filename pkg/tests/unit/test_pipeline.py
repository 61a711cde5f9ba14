"""Unit tests for the ordered worker pipeline."""

import threading
import time
from collections.abc import Iterator, Sequence

import pytest

from step2heat.kernel.heisenberg import HeisenbergTypeKernel
from step2heat.models import GroupPoint, GroupSpec, KernelValue
from step2heat.pipeline import GridPipeline, ordered_map


class MockKernel:
    """Kernel that returns t + z₁ and records the thread it ran on."""

    def __init__(self, spec: GroupSpec, calls: list[str]) -> None:
        self.spec = spec
        self.calls = calls

    def evaluate(self, g: GroupPoint, gp: GroupPoint, t: float) -> KernelValue:
        """Mock evaluate method."""
        return KernelValue(value=t + float(g.z[0]))

    def evaluate_many(
        self, triples: Sequence[tuple[GroupPoint, GroupPoint, float]]
    ) -> list[KernelValue]:
        """Mock batched evaluation."""
        self.calls.append(threading.current_thread().name)
        return [self.evaluate(g, gp, t) for g, gp, t in triples]

    def diagonal(self, t: float) -> float:
        """Mock diagonal."""
        return 1.0

    def t_min(self, g: GroupPoint, gp: GroupPoint) -> float:
        """Mock resolvable time."""
        return 0.0


def triples(count: int) -> list[tuple[GroupPoint, GroupPoint, float]]:
    identity = GroupPoint.identity(2, 1)
    return [(GroupPoint([float(i), 0.0], [0.0]), identity, 1.0) for i in range(count)]


class TestOrderedMap:
    """Tests for the order-preserving thread fan-out."""

    def test_keeps_input_order(self) -> None:
        """Test that slow early items do not let later results overtake them."""

        def slow_for_small(x: int) -> int:
            time.sleep(0.001 * (10 - x))
            return x * x

        assert list(ordered_map(slow_for_small, range(10), workers=4)) == [
            x * x for x in range(10)
        ]

    def test_bounded_look_ahead(self) -> None:
        """Test that a lazy input is not drained ahead of the consumer."""
        pulled: list[int] = []

        def source() -> Iterator[int]:
            for x in range(100):
                pulled.append(x)
                yield x

        results = ordered_map(lambda x: x, source(), workers=2, max_pending=3)
        assert next(results) == 0
        assert len(pulled) <= 4
        assert list(results) == list(range(1, 100))

    def test_propagates_errors(self) -> None:
        """Test that a worker exception surfaces in the consumer."""

        def fail_on_three(x: int) -> int:
            if x == 3:
                raise ValueError("three")
            return x

        with pytest.raises(ValueError, match="three"):
            list(ordered_map(fail_on_three, range(6), workers=2))


class TestGridPipeline:
    """Tests for streaming kernel grids."""

    def test_rows_in_input_order(self, heisenberg1: GroupSpec) -> None:
        """Test that chunks come back in order with their triples."""
        calls: list[str] = []
        pipeline = GridPipeline(
            kernel_factory=lambda: MockKernel(heisenberg1, calls), workers=3, chunk_size=4
        )
        rows = list(pipeline.run(iter(triples(25))))
        assert [value.value for _, value in rows] == [1.0 + i for i in range(25)]
        assert [float(triple[0].z[0]) for triple, _ in rows] == [float(i) for i in range(25)]
        assert len(calls) == 7

    def test_one_kernel_per_worker(self, heisenberg1: GroupSpec) -> None:
        """Test that the factory is called at most once per worker thread."""
        built: list[str] = []
        calls: list[str] = []

        def factory() -> MockKernel:
            built.append(threading.current_thread().name)
            return MockKernel(heisenberg1, calls)

        pipeline = GridPipeline(kernel_factory=factory, workers=2, chunk_size=2)
        list(pipeline.run(triples(20)))
        assert 1 <= len(built) <= 2
        assert len(set(built)) == len(built)

    def test_real_kernel(self, heisenberg1: GroupSpec) -> None:
        """Test the pipeline against direct evaluation."""
        kernel = HeisenbergTypeKernel(heisenberg1)
        pipeline = GridPipeline(
            kernel_factory=lambda: HeisenbergTypeKernel(heisenberg1), workers=2, chunk_size=2
        )
        identity = GroupPoint.identity(2, 1)
        items = [(GroupPoint([0.1 * i, 0.2], [0.3]), identity, 0.5) for i in range(5)]
        for (g, gp, t), value in pipeline.run(items):
            assert value.value == pytest.approx(kernel.evaluate(g, gp, t).value, rel=1e-10)

    def test_validation(self, heisenberg1: GroupSpec) -> None:
        """Test worker and chunk size validation."""
        with pytest.raises(ValueError, match="Workers"):
            GridPipeline(kernel_factory=lambda: MockKernel(heisenberg1, []), workers=0)
        with pytest.raises(ValueError, match="Chunk size"):
            GridPipeline(kernel_factory=lambda: MockKernel(heisenberg1, []), chunk_size=0)
