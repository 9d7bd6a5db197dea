"""Cycle model of the pipelined processing-element core.

The model works at pass granularity: a task (one polynomial's matrix)
transits the pipeline once per pass, each transit taking pipeline_depth
cycles, and a scheduler decides after every pass whether the task starts
another pass, another iteration, a smaller deflation level, or emits its
results. Two datapath variants are modeled:

* wide   - 2n complex mul-add units update a full row/column pair per
           pass: 2m-2 passes per iteration at level m;
* narrow - 2 units touch two positions per pass, so a rotation costs one
           pass per updated column (left) or row (right).

Both variants describe identical arithmetic; only the pass counts (and
hence cycle counts) differ.

Timing convention, chosen so a batch of exactly pipeline_depth tasks
finishes in (K+1)*pipeline_depth cycles: cycles are numbered from 1, the
input port admits one matrix per cycle (re-entering tasks take priority
over fresh input), a task fetched at cycle c exits its pass at cycle
c + pipeline_depth, and finished results are written to the FIFO in the
exit cycle. A lone task therefore sees 1 + K*pipeline_depth cycles of
wait-through latency.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import IllegalState

PHASE_SUBTRACT = "subtract-shift"
PHASE_LEFT = "left-sweep"
PHASE_RIGHT = "right-sweep"
PHASE_ADD = "add-shift"
PHASE_DONE = "done"

# Fixed figures quoted from the reference hardware implementation's
# evaluation, used only for ratio arithmetic and context lines; nothing
# here is measured.
REFERENCE_CONSTANTS = {
    "clock_hz": 100e6,
    "video_clock_hz": 148.5e6,
    "pe_core_wide_power_w": 1.43,
    "pe_core_narrow_power_w": 0.68,
    "total_power_w": 2.22,
    "cpu_power_w": 34.6,
    "gpu_power_w": 70.0,
    "throughput_cpu_per_s": 1.22e5,
    "throughput_gpu_per_s": 5.01e7,
    "throughput_fpga_per_s": 3.33e5,
    "gflops_cpu": 5.11,
    "gflops_gpu": 2089.50,
    "gflops_fpga_avg": 13.93,
    "gflops_fpga_ceiling": 20.40,
    "efficiency_cpu_gflops_per_w": 0.15,
    "efficiency_gpu_gflops_per_w": 29.85,
    "efficiency_fpga_gflops_per_w": 9.74,
}


@dataclass(frozen=True)
class PipelineConfig:
    degree: int
    iterations: int = 10
    pipeline_depth: int = 4
    clock_hz: float = 100e6
    variant: str = "wide"
    fifo_depth: int = 16
    fifo_drain_per_cycle: int = 1
    core_count: int = 1

    def __post_init__(self):
        if self.degree < 2:
            raise ValueError("degree must be >= 2")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.pipeline_depth < 1:
            raise ValueError("pipeline_depth must be >= 1")
        if self.variant not in ("wide", "narrow"):
            raise ValueError(f"variant must be 'wide' or 'narrow', got {self.variant!r}")
        if self.fifo_depth < 1 or self.fifo_drain_per_cycle < 1:
            raise ValueError("fifo_depth and fifo_drain_per_cycle must be >= 1")
        if self.clock_hz <= 0:
            raise ValueError("clock_hz must be positive")
        if self.core_count < 1:
            raise ValueError("core_count must be >= 1")


def iteration_passes(m: int, variant: str) -> int:
    """Passes one QR iteration at level m needs through the pipeline."""
    if variant == "wide":
        return 2 * m - 2
    # narrow: left rotation i updates m-i+1 columns, right rotation i
    # updates i+1 rows, two entries per pass
    return m * m + m - 2


def passes_per_task(n: int, iterations: int, variant: str = "wide") -> int:
    """Total pipeline transits for one degree-n polynomial."""
    if n < 2 or iterations < 1:
        raise ValueError("need n >= 2 and iterations >= 1")
    return iterations * sum(iteration_passes(m, variant) for m in range(2, n + 1))


@dataclass(frozen=True)
class TaskState:
    """Scheduler-visible progress of one task.

    ``pass_index`` counts within the current iteration: 1..2m-2 in the
    wide variant, 1..m*m+m-2 micro-passes in the narrow one. Eigenvalue
    extraction is reported through transition events rather than a
    resident state, so stepping consumes exactly one pass each time.
    """

    task_id: int
    level: int
    iteration: int
    pass_index: int
    phase: str = PHASE_SUBTRACT

    @classmethod
    def initial(cls, task_id: int, degree: int) -> "TaskState":
        return cls(task_id=task_id, level=degree, iteration=1, pass_index=1,
                   phase=PHASE_SUBTRACT)


def phase_of(level: int, pass_index: int, variant: str) -> str:
    total = iteration_passes(level, variant)
    if variant == "wide":
        left_last = level - 1
    else:
        left_last = sum(level - i + 1 for i in range(1, level))
    if pass_index == 1:
        return PHASE_SUBTRACT
    if pass_index == total:
        return PHASE_ADD
    return PHASE_LEFT if pass_index <= left_last else PHASE_RIGHT


def scheduler_next(state: TaskState, degree: int, iterations: int,
                   variant: str = "wide"):
    """Advance one pass; returns (next_state, extracted_levels).

    ``extracted_levels`` lists the eigenvalue slots written during the
    transition: (m-1,) when a level finishes, (1, 0) when the order-2
    block finishes and the task completes.
    """
    if state.phase == PHASE_DONE:
        raise IllegalState("task already done")
    m, t, p = state.level, state.iteration, state.pass_index
    total = iteration_passes(m, variant) if 2 <= m <= degree else 0
    if not (2 <= m <= degree and 1 <= t <= iterations and 1 <= p <= total):
        raise IllegalState(f"out-of-range state level={m} iteration={t} pass={p}")
    if p < total:
        nxt = TaskState(state.task_id, m, t, p + 1, phase_of(m, p + 1, variant))
        return nxt, ()
    if t < iterations:
        nxt = TaskState(state.task_id, m, t + 1, 1, phase_of(m, 1, variant))
        return nxt, ()
    if m > 2:
        nxt = TaskState(state.task_id, m - 1, 1, 1, phase_of(m - 1, 1, variant))
        return nxt, (m - 1,)
    done = TaskState(state.task_id, m, t, p, PHASE_DONE)
    return done, (1, 0)


@dataclass
class SimReport:
    """Cycle accounting from one simulation run."""

    degree: int
    iterations: int
    variant: str
    pipeline_depth: int
    core_count: int
    clock_hz: float
    task_count: int
    total_cycles: int
    passes_per_task: int
    steady_state_cycles_per_input: float
    batch_formula_cycles: int
    measured_cycles_per_input: float
    throughput_per_s: float
    fifo_max_occupancy: int
    stall_cycles: int

    def key_values(self) -> list[str]:
        return [
            f"degree={self.degree}",
            f"iterations={self.iterations}",
            f"variant={self.variant}",
            f"pipeline_depth={self.pipeline_depth}",
            f"core_count={self.core_count}",
            f"clock_hz={self.clock_hz:g}",
            f"task_count={self.task_count}",
            f"total_cycles={self.total_cycles}",
            f"K={self.passes_per_task}",
            f"C={self.steady_state_cycles_per_input:g}",
            f"C_batch={self.batch_formula_cycles}",
            f"measured_cycles_per_input={self.measured_cycles_per_input:.3f}",
            f"throughput_per_s={self.throughput_per_s:.1f}",
            f"fifo_max_occupancy={self.fifo_max_occupancy}",
            f"stall_cycles={self.stall_cycles}",
        ]

    def table(self) -> str:
        rows = [kv.replace("=", " ", 1).split(" ", 1) for kv in self.key_values()]
        width = max(len(name) for name, _ in rows)
        return "\n".join(f"{name:<{width}}  {value}" for name, value in rows)


@dataclass
class _Slot:
    task_id: int
    state: TaskState
    exit_cycle: int


def simulate(cfg: PipelineConfig, task_count: int) -> SimReport:
    """Discrete-cycle simulation of the core(s), scheduler, and FIFO.

    Each core admits at most one matrix per cycle, preferring a task
    re-issued by the scheduler over fresh input. Completed results are
    written to the shared FIFO at most one per cycle (round-robin across
    cores); a write deferred by contention or a full FIFO counts one
    stall cycle per waiting cycle. The run ends when every result has
    been written.
    """
    if task_count < 1:
        raise ValueError("task_count must be >= 1")
    k_passes = passes_per_task(cfg.degree, cfg.iterations, cfg.variant)

    next_fresh = 0
    in_flight: list[list[_Slot]] = [[] for _ in range(cfg.core_count)]
    pending_writes: deque[int] = deque()  # task ids awaiting the FIFO bus
    pass_counts = np.zeros(task_count, dtype=np.int64)
    fifo_occupancy = 0
    fifo_max = 0
    stall_cycles = 0
    written = 0
    last_write_cycle = 0
    cycle = 0

    while written < task_count:
        cycle += 1
        # 1. per-core exits and (re-)admissions
        for core in range(cfg.core_count):
            slots = in_flight[core]
            exiting = None
            for slot in slots:
                if slot.exit_cycle == cycle:
                    exiting = slot
                    break
            admitted_reentry = False
            if exiting is not None:
                pass_counts[exiting.task_id] += 1
                nxt, _events = scheduler_next(
                    exiting.state, cfg.degree, cfg.iterations, cfg.variant
                )
                if nxt.phase == PHASE_DONE:
                    slots.remove(exiting)
                    pending_writes.append(exiting.task_id)
                else:
                    exiting.state = nxt
                    exiting.exit_cycle = cycle + cfg.pipeline_depth
                    admitted_reentry = True
            if not admitted_reentry and next_fresh < task_count and len(slots) < cfg.pipeline_depth:
                state = TaskState.initial(next_fresh, cfg.degree)
                slots.append(_Slot(next_fresh, state, cycle + cfg.pipeline_depth))
                next_fresh += 1
        # 2. FIFO drain
        fifo_occupancy = max(0, fifo_occupancy - cfg.fifo_drain_per_cycle)
        # 3. one FIFO write per cycle across all cores
        if pending_writes:
            if fifo_occupancy < cfg.fifo_depth:
                pending_writes.popleft()
                fifo_occupancy += 1
                written += 1
                last_write_cycle = cycle
            stall_cycles += len(pending_writes)
        fifo_max = max(fifo_max, fifo_occupancy)
        # conservation: every fetched task is in flight, awaiting its
        # FIFO write, or already written
        flying = sum(len(slots) for slots in in_flight)
        if next_fresh != flying + len(pending_writes) + written:
            raise AssertionError("task conservation violated")

    if not np.all(pass_counts == k_passes):
        raise AssertionError("simulated pass counts diverged from the closed form")

    return SimReport(
        degree=cfg.degree,
        iterations=cfg.iterations,
        variant=cfg.variant,
        pipeline_depth=cfg.pipeline_depth,
        core_count=cfg.core_count,
        clock_hz=cfg.clock_hz,
        task_count=task_count,
        total_cycles=last_write_cycle,
        passes_per_task=k_passes,
        steady_state_cycles_per_input=k_passes / cfg.core_count,
        batch_formula_cycles=(k_passes + 1) * cfg.pipeline_depth,
        measured_cycles_per_input=last_write_cycle / task_count,
        throughput_per_s=cfg.clock_hz * cfg.core_count / k_passes,
        fifo_max_occupancy=fifo_max,
        stall_cycles=stall_cycles,
    )


def throughput_model(cfg: PipelineConfig) -> float:
    """Steady-state polynomials per second: clock over cycles-per-input."""
    return cfg.clock_hz * cfg.core_count / passes_per_task(
        cfg.degree, cfg.iterations, cfg.variant
    )


def throughput_ratio(degree: int, iterations: int) -> float:
    """Narrow-over-wide throughput, computed from pass counts (exact)."""
    return passes_per_task(degree, iterations, "wide") / passes_per_task(
        degree, iterations, "narrow"
    )


def efficiency_ratio(wide_power_w: float, narrow_power_w: float,
                     degree: int = 6, iterations: int = 10) -> float:
    """Narrow-variant energy-efficiency relative to wide.

    (throughput_narrow / throughput_wide) divided by the power fraction.
    The power fraction is rounded to two decimals before dividing, which
    reproduces the reference evaluation's arithmetic (0.68 W / 1.43 W quoted as 48%,
    giving 0.3 / 0.48 = 62.5%).
    """
    if wide_power_w <= 0 or narrow_power_w <= 0:
        raise ValueError("powers must be positive")
    power_fraction = round(narrow_power_w / wide_power_w, 2)
    return throughput_ratio(degree, iterations) / power_fraction


def efficiency_gain(efficiency_a: float, efficiency_b: float) -> float:
    """Plain ratio of two energy-efficiency figures (e.g. accelerator over CPU)."""
    if efficiency_b == 0:
        raise ValueError("reference efficiency must be nonzero")
    return efficiency_a / efficiency_b
