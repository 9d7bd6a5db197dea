import numpy as np
import pytest

from rootdensity.errors import IllegalState
from rootdensity.pipeline_model import (
    REFERENCE_CONSTANTS,
    PHASE_ADD,
    PHASE_DONE,
    PHASE_LEFT,
    PHASE_RIGHT,
    PHASE_SUBTRACT,
    PipelineConfig,
    TaskState,
    efficiency_gain,
    efficiency_ratio,
    iteration_passes,
    passes_per_task,
    phase_of,
    scheduler_next,
    simulate,
    throughput_model,
    throughput_ratio,
)


class TestPassesPerTask:
    def test_wide_reference_point(self):
        assert passes_per_task(6, 10, "wide") == 300

    def test_narrow_reference_point(self):
        assert passes_per_task(6, 10, "narrow") == 1000

    def test_minimum_size(self):
        assert passes_per_task(2, 1, "wide") == 2

    def test_wide_closed_form(self):
        for n in range(2, 10):
            for t in (1, 3, 7, 12):
                assert passes_per_task(n, t, "wide") == n * (n - 1) * t

    def test_narrow_closed_form(self):
        # T/3 * n * (n^2 + 3n - 4), integer for every T because the pass
        # sum is integral
        for n in range(2, 10):
            for t in (1, 2, 3, 10):
                expected = t * n * (n**2 + 3 * n - 4) / 3
                assert passes_per_task(n, t, "narrow") == expected

    def test_narrow_iteration_split(self):
        # left sweep: sum of (m-i+1); right sweep: sum of (i+1); their sum
        # is the per-iteration micro-pass total
        for m in range(2, 9):
            left = sum(m - i + 1 for i in range(1, m))
            right = sum(i + 1 for i in range(1, m))
            assert left + right == iteration_passes(m, "narrow")
            assert left == right  # both equal sum_{k=2..m} k


class TestSimulate:
    @pytest.mark.parametrize("depth", [1, 4, 16, 64])
    def test_batch_formula(self, depth):
        cfg = PipelineConfig(degree=6, iterations=10, pipeline_depth=depth)
        report = simulate(cfg, depth)
        assert report.total_cycles == (report.passes_per_task + 1) * depth

    def test_single_task_wait_through(self):
        # a lone occupant gets no overlap: fetched at cycle 1, K transits
        # of pipeline_depth cycles each
        cfg = PipelineConfig(degree=6, iterations=10, pipeline_depth=8)
        report = simulate(cfg, 1)
        assert report.total_cycles == 1 + report.passes_per_task * 8

    def test_steady_state_approaches_k(self):
        cfg = PipelineConfig(degree=6, iterations=10, pipeline_depth=8)
        report = simulate(cfg, 1500)
        assert report.steady_state_cycles_per_input == 300
        assert abs(report.measured_cycles_per_input - 300) < 1.0

    def test_total_cycles_bounds(self):
        # C*tasks <= total <= (K+1)*Np*ceil(tasks/Np)
        for tasks in (1, 3, 8, 33):
            cfg = PipelineConfig(degree=4, iterations=2, pipeline_depth=4)
            report = simulate(cfg, tasks)
            k = report.passes_per_task
            assert k * tasks <= report.total_cycles
            assert report.total_cycles <= (k + 1) * 4 * -(-tasks // 4)

    def test_formula_simulation_agreement(self):
        for n in range(2, 9):
            for t in (1, 5, 12):
                for variant in ("wide", "narrow"):
                    cfg = PipelineConfig(degree=n, iterations=t, variant=variant,
                                         pipeline_depth=3)
                    report = simulate(cfg, 3)
                    assert report.passes_per_task == passes_per_task(n, t, variant)

    def test_fifo_safety_with_adequate_drain(self):
        cfg = PipelineConfig(degree=6, iterations=10, pipeline_depth=16,
                             fifo_depth=4, fifo_drain_per_cycle=1)
        report = simulate(cfg, 64)
        assert report.stall_cycles == 0
        assert report.fifo_max_occupancy <= 4

    def test_fifo_congestion_counts_stalls(self):
        # a throttled FIFO with multiple cores completing simultaneously
        # must record contention
        cfg = PipelineConfig(degree=2, iterations=1, pipeline_depth=4,
                             core_count=4, fifo_depth=1, fifo_drain_per_cycle=1)
        report = simulate(cfg, 64)
        assert report.stall_cycles > 0
        assert report.fifo_max_occupancy <= 1

    def test_multi_core_scales_throughput(self):
        one = PipelineConfig(degree=6, iterations=10, core_count=1)
        four = PipelineConfig(degree=6, iterations=10, core_count=4)
        assert throughput_model(four) == 4 * throughput_model(one)

    def test_invalid_config(self):
        with pytest.raises(ValueError):
            PipelineConfig(degree=1)
        with pytest.raises(ValueError):
            PipelineConfig(degree=6, variant="medium")
        with pytest.raises(ValueError):
            simulate(PipelineConfig(degree=6), 0)


class TestThroughput:
    def test_reference_wide(self):
        cfg = PipelineConfig(degree=6, iterations=10, clock_hz=100e6)
        np.testing.assert_allclose(throughput_model(cfg), 1e8 / 300)
        # three significant figures match the reference figure 3.33e5
        assert float(f"{throughput_model(cfg):.3g}") == 3.33e5

    def test_narrow_is_thirty_percent(self):
        assert throughput_ratio(6, 10) == 0.3
        narrow = PipelineConfig(degree=6, iterations=10, variant="narrow")
        np.testing.assert_allclose(throughput_model(narrow), 1e5)

    def test_unit_case(self):
        cfg = PipelineConfig(degree=6, iterations=10, clock_hz=300.0)
        assert throughput_model(cfg) == 1.0


class TestEfficiency:
    def test_reference_narrow_ratio(self):
        # 0.3 / round(0.68/1.43, 2) = 0.3 / 0.48 = 0.625
        assert efficiency_ratio(1.43, 0.68) == 0.625

    def test_identity(self):
        assert efficiency_ratio(1.0, 1.0, degree=6, iterations=10) == pytest.approx(0.3)
        # equal powers and equal throughputs give exactly 1
        assert efficiency_ratio(2.0, 2.0) / throughput_ratio(6, 10) == 1.0

    def test_accelerator_over_cpu(self):
        gain = efficiency_gain(REFERENCE_CONSTANTS["efficiency_fpga_gflops_per_w"],
                               REFERENCE_CONSTANTS["efficiency_cpu_gflops_per_w"])
        assert float(f"{gain:.3g}") == 64.9
        assert round(gain) == 65

    def test_positive_power_required(self):
        with pytest.raises(ValueError):
            efficiency_ratio(0.0, 1.0)


class TestScheduler:
    def test_increment_within_sweep(self):
        s = TaskState(task_id=0, level=6, iteration=1, pass_index=1)
        nxt, events = scheduler_next(s, degree=6, iterations=10)
        assert (nxt.level, nxt.iteration, nxt.pass_index) == (6, 1, 2)
        assert events == ()
        assert nxt.phase == PHASE_LEFT

    def test_level_transition_extracts(self):
        s = TaskState(task_id=0, level=6, iteration=10, pass_index=10,
                      phase=PHASE_ADD)
        nxt, events = scheduler_next(s, degree=6, iterations=10)
        assert (nxt.level, nxt.iteration, nxt.pass_index) == (5, 1, 1)
        assert events == (5,)

    def test_final_double_extraction(self):
        s = TaskState(task_id=0, level=2, iteration=10, pass_index=2,
                      phase=PHASE_ADD)
        nxt, events = scheduler_next(s, degree=6, iterations=10)
        assert nxt.phase == PHASE_DONE
        assert events == (1, 0)

    def test_totality_in_exactly_k_steps(self):
        for variant in ("wide", "narrow"):
            for n in (2, 4, 6, 8):
                for t in (1, 4, 10):
                    state = TaskState.initial(0, n)
                    steps = 0
                    extracted = []
                    while state.phase != PHASE_DONE:
                        state, events = scheduler_next(state, n, t, variant)
                        steps += 1
                        extracted.extend(events)
                    assert steps == passes_per_task(n, t, variant)
                    assert sorted(extracted) == list(range(n))

    def test_phase_classification_wide(self):
        # m=6: pass 1 subtract, 2..5 left, 6..9 right, 10 add
        assert phase_of(6, 1, "wide") == PHASE_SUBTRACT
        assert phase_of(6, 2, "wide") == PHASE_LEFT
        assert phase_of(6, 5, "wide") == PHASE_LEFT
        assert phase_of(6, 6, "wide") == PHASE_RIGHT
        assert phase_of(6, 9, "wide") == PHASE_RIGHT
        assert phase_of(6, 10, "wide") == PHASE_ADD

    def test_phase_classification_order2(self):
        assert phase_of(2, 1, "wide") == PHASE_SUBTRACT
        assert phase_of(2, 2, "wide") == PHASE_ADD

    def test_illegal_states(self):
        done = TaskState(task_id=0, level=2, iteration=1, pass_index=2,
                         phase=PHASE_DONE)
        with pytest.raises(IllegalState):
            scheduler_next(done, 6, 10)
        bad = TaskState(task_id=0, level=9, iteration=1, pass_index=1)
        with pytest.raises(IllegalState):
            scheduler_next(bad, 6, 10)
        bad_pass = TaskState(task_id=0, level=6, iteration=1, pass_index=11)
        with pytest.raises(IllegalState):
            scheduler_next(bad_pass, 6, 10)


class TestReportOutput:
    def test_key_values_parse(self):
        report = simulate(PipelineConfig(degree=6, iterations=10), 8)
        kv = dict(line.split("=", 1) for line in report.key_values())
        assert kv["K"] == "300"
        assert kv["C"] == "300"
        assert int(kv["total_cycles"]) == report.total_cycles

    def test_table_aligns(self):
        report = simulate(PipelineConfig(degree=6, iterations=10), 8)
        lines = report.table().splitlines()
        assert len(lines) == len(report.key_values())
