"""Test tensor re-scheduling between layouts"""

import itertools

import pytest

from tradeoff.graph.models import default_device_graph
from tradeoff.planner.collectives import all_gather_bytes, all_to_all_bytes, collective_time
from tradeoff.planner.configs import DeviceMesh, ParallelConfig, TensorMap
from tradeoff.planner.rescheduling import (
    Rescheduler, SplitState, canonical, project_layout, replicated_state, reschedule_time,
)
from tradeoff.utils.errors import InvalidConfig

VECTOR = (1024,)


@pytest.fixture
def dev():
    return default_device_graph(4)


def _layouts():
    return [
        replicated_state(VECTOR, 4),
        SplitState(DeviceMesh((4,)), TensorMap((0,))),
        SplitState(DeviceMesh((2, 2)), TensorMap((0,))),
        SplitState(DeviceMesh((2, 2)), TensorMap((1,))),
    ]


class TestLayouts:
    """Test layout helpers"""

    def test_canonical_replicated(self):
        """Test that replicated layouts on any mesh are the same state"""
        on_grid = SplitState(DeviceMesh((2, 2)), TensorMap((-1, -1)))
        assert canonical(on_grid, (8, 8)) == replicated_state((8, 8), 4)

    def test_project_layout(self):
        """Test that dimensions the mesh cannot split stay unsplit"""
        config = ParallelConfig(DeviceMesh((2, 2)), (TensorMap((1, 0)),))
        layout = project_layout((16, 3), config)
        assert layout == SplitState(DeviceMesh((2, 2)), TensorMap((1, -1)))


class TestRescheduleTime:
    """Test shortest collective sequences"""

    def test_same_layout_is_free(self, dev):
        """Test that nothing moves when layouts agree"""
        for layout in _layouts():
            assert reschedule_time(layout, layout, VECTOR, dev) == 0.0

    def test_slicing_is_free(self, dev):
        """Test that a replicated tensor can be split locally"""
        source = replicated_state(VECTOR, 4)
        for layout in _layouts():
            assert reschedule_time(source, layout, VECTOR, dev) == 0.0

    def test_gather(self, dev):
        """Test that unsplitting costs one all-gather"""
        split = SplitState(DeviceMesh((4,)), TensorMap((0,)))
        expected = collective_time(dev, 4, all_gather_bytes(1024, 4))
        assert reschedule_time(split, replicated_state(VECTOR, 4), VECTOR, dev) == pytest.approx(expected)

    def test_all_to_all(self, dev):
        """Test that moving a split between dimensions takes one all-to-all"""
        src = SplitState(DeviceMesh((4,)), TensorMap((0, -1)))
        dst = SplitState(DeviceMesh((4,)), TensorMap((-1, 0)))
        expected = collective_time(dev, 4, all_to_all_bytes(64, 4))
        assert Rescheduler(dev).reschedule_time(src, dst, (8, 8)) == pytest.approx(expected)

    def test_triangle_inequality(self, dev):
        """Test that no detour through a third layout is cheaper"""
        rescheduler = Rescheduler(dev)
        layouts = _layouts()
        for a, b, c in itertools.product(layouts, repeat=3):
            direct = rescheduler.reschedule_time(a, c, VECTOR)
            detour = rescheduler.reschedule_time(a, b, VECTOR) + rescheduler.reschedule_time(b, c, VECTOR)
            assert direct <= detour + 1e-15

    def test_comm_scale(self, dev):
        """Test that comm_scale multiplies every collective"""
        split = SplitState(DeviceMesh((4,)), TensorMap((0,)))
        target = replicated_state(VECTOR, 4)
        base = Rescheduler(dev).reschedule_time(split, target, VECTOR)
        assert Rescheduler(dev, comm_scale=0.0).reschedule_time(split, target, VECTOR) == 0.0
        assert Rescheduler(dev, comm_scale=2.0).reschedule_time(split, target, VECTOR) == pytest.approx(2 * base)

    def test_invalid_layout(self, dev):
        """Test a layout that does not fit the tensor"""
        bad = SplitState(DeviceMesh((4,)), TensorMap((0,)))
        with pytest.raises(InvalidConfig):
            reschedule_time(bad, replicated_state((6,), 4), (6,), dev)
