"""Cycle-level model of the streaming memory architecture.

The memory unit is a circular buffer of node records fed in schedule
order; the neighborhood memory collects the stencil of the node being
processed.  The simulator replays a labeling or an access pattern and
reports misses, traffic, cycles and peak window occupancy.  An analytic
throughput model covers the arithmetic-unit side.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass

import numpy as np

from .accesspattern import AccessPattern, replay_window
from .errors import NeighborhoodOverflowError, PreconditionError, \
    WorkloadMismatchError
from .meshcore.graph import Labeling, c_bw, classical_bandwidth, \
    serial_bandwidth

#: Published feasibility reference for the prototype workload's memory
#: bandwidth demand (GB/s), single vs double precision.  Reported next
#: to our transparent byte accounting, which uses a different breakdown.
REFERENCE_REQUIRED_BANDWIDTH_GBPS = {"single": 10.3, "double": 19.7}

#: Default node record sizes for the flow-solver workload: four state
#: values plus area, pressure and sound speed.
NODE_RECORD_BYTES = {"single": 28, "double": 56}


@dataclass(frozen=True)
class MemoryUnitConfig:
    """Circular-buffer memory unit parameters."""

    capacity: int
    node_record_bytes: int = NODE_RECORD_BYTES["double"]
    miss_penalty_cycles: int = 10
    precision: str = "double"

    def __post_init__(self):
        if self.capacity < 1:
            raise PreconditionError("memory unit capacity must be positive")


@dataclass(frozen=True)
class NeighborhoodConfig:
    capacity: int = 64


def capacity_for(g, f, rule="serial"):
    """Window size that guarantees miss-free streaming of labeling ``f``.

    ``serial`` sizes by the serial bandwidth (+1 slot for the node
    itself); ``classical`` applies the 2*B+1 rule.
    """
    if rule == "serial":
        return serial_bandwidth(g, f) + 1
    if rule == "classical":
        return c_bw(classical_bandwidth(g, f))
    raise PreconditionError(f"unknown sizing rule {rule!r}")


@dataclass
class SimReport:
    """Outcome of one streaming replay."""

    schedule: str
    n: int
    entries: int
    processed: int
    misses: int
    cycles: int
    peak_occupancy: int
    capacity: int
    node_bytes: int
    connectivity_bytes: int
    element_bytes: int

    @property
    def off_chip_bytes(self):
        return self.node_bytes

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    CSV_FIELDS = ("schedule", "n", "entries", "processed", "misses", "cycles",
                  "peak_occupancy", "capacity", "node_bytes",
                  "connectivity_bytes", "element_bytes")

    def to_csv(self):
        buf = io.StringIO()
        buf.write("# meshstream-csv v1 simreport\n")
        w = csv.DictWriter(buf, fieldnames=self.CSV_FIELDS)
        w.writeheader()
        w.writerow({k: getattr(self, k) for k in self.CSV_FIELDS})
        return buf.getvalue()


def simulate_stream(g, schedule, mem, neighborhood=NeighborhoodConfig(),
                    trace=False):
    """Replay a labeling or access pattern through the memory unit.

    Prefetch runs until the buffer is half full, then one connectivity
    record is consumed per cycle and a stencil issues once its
    neighborhood is complete.  A stencil read that is not resident
    counts as a miss and stalls for the configured reload penalty.
    """
    if g.max_degree + 1 > neighborhood.capacity:
        raise NeighborhoodOverflowError(
            f"stencil of {g.max_degree + 1} exceeds neighborhood memory "
            f"of {neighborhood.capacity}")

    if isinstance(schedule, Labeling):
        vertices = schedule.order()
        ex = np.ones(vertices.size, dtype=bool)
        name = "labeling"
    elif isinstance(schedule, AccessPattern):
        vertices = schedule.vertices
        ex = schedule.ex
        name = "pattern"
    else:
        raise PreconditionError("schedule must be a Labeling or AccessPattern")

    result = replay_window(g, vertices, ex, mem.capacity, trace=trace)

    fsize = 4 if mem.precision == "single" else 8
    # one connectivity word and one face record per stencil edge
    stencil_records = sum(max(s, 1) for s in result.stencil_sizes)
    conn_bytes = 4 * stencil_records
    elem_bytes = (3 * fsize + 4) * stencil_records
    stencil_cycles = stencil_records
    prefetch = min(mem.capacity // 2, len(vertices))
    cycles = prefetch + stencil_cycles \
        + mem.miss_penalty_cycles * len(result.misses)
    if len(vertices) == 0:
        cycles = 0

    report = SimReport(
        schedule=name,
        n=g.n,
        entries=int(len(vertices)),
        processed=result.processed,
        misses=len(result.misses),
        cycles=int(cycles),
        peak_occupancy=result.peak_occupancy,
        capacity=mem.capacity,
        node_bytes=int(len(vertices)) * mem.node_record_bytes,
        connectivity_bytes=int(conn_bytes),
        element_bytes=int(elem_bytes),
    )
    if trace:
        report.trace = result.trace
        report.miss_events = result.misses
    return report


# ---------------------------------------------------------------------------
# analytic performance model

@dataclass(frozen=True)
class PerfConfig:
    """Arithmetic-unit throughput parameters."""

    clock_hz: float
    cycles_per_update: int = 3
    flops_per_update: int = 213
    num_pes: int = 1
    bytes_in_per_update: int = 80
    bytes_out_per_update: int = 32
    precision: str = "double"

    def __post_init__(self):
        for name in ("clock_hz", "cycles_per_update", "flops_per_update",
                     "num_pes", "bytes_in_per_update", "bytes_out_per_update"):
            if getattr(self, name) <= 0:
                raise PreconditionError(f"{name} must be positive")


@dataclass
class PerfReport:
    updates_per_sec: float
    gflops: float
    aggregate_gflops: float
    bandwidth_bytes_per_sec: float
    flops_per_update: int
    num_pes: int
    reference_bandwidth_gbps: float

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    CSV_FIELDS = ("updates_per_sec", "gflops", "aggregate_gflops",
                  "bandwidth_bytes_per_sec", "flops_per_update", "num_pes",
                  "reference_bandwidth_gbps")

    def to_csv(self):
        buf = io.StringIO()
        buf.write("# meshstream-csv v1 perfreport\n")
        w = csv.DictWriter(buf, fieldnames=self.CSV_FIELDS)
        w.writeheader()
        w.writerow({k: getattr(self, k) for k in self.CSV_FIELDS})
        return buf.getvalue()


def perf_model(cfg):
    """Throughput, arithmetic rate and bandwidth demand of one design."""
    ups = cfg.clock_hz / cfg.cycles_per_update
    gflops = ups * cfg.flops_per_update / 1e9
    bw = (cfg.bytes_in_per_update + cfg.bytes_out_per_update) * ups
    return PerfReport(
        updates_per_sec=ups,
        gflops=gflops,
        aggregate_gflops=gflops * cfg.num_pes,
        bandwidth_bytes_per_sec=bw,
        flops_per_update=cfg.flops_per_update,
        num_pes=cfg.num_pes,
        reference_bandwidth_gbps=REFERENCE_REQUIRED_BANDWIDTH_GBPS.get(
            cfg.precision, float("nan")),
    )


def measured_perf(updates_per_sec, flops_per_update=213):
    """PerfReport for an empirically measured update rate."""
    return PerfReport(
        updates_per_sec=updates_per_sec,
        gflops=updates_per_sec * flops_per_update / 1e9,
        aggregate_gflops=updates_per_sec * flops_per_update / 1e9,
        bandwidth_bytes_per_sec=float("nan"),
        flops_per_update=flops_per_update,
        num_pes=1,
        reference_bandwidth_gbps=float("nan"),
    )


def speedup(model, baseline, aggregate=True):
    """Ratio of update rates between two reports on the same workload."""
    if model.flops_per_update != baseline.flops_per_update:
        raise WorkloadMismatchError(
            "speedup is only meaningful for matching workloads")
    a = model.updates_per_sec * (model.num_pes if aggregate else 1)
    b = baseline.updates_per_sec * (baseline.num_pes if aggregate else 1)
    return a / b
