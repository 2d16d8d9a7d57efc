#!/usr/bin/env python3
"""
Performance benchmarks for mubqkd-mcp.

Times MUB construction across the certified dimensions, the structured
controlled shift against the dense gate, and simulated rounds per second for
each eavesdropping strategy.
"""

import sys
import time
from pathlib import Path
from typing import Any, Callable, Dict, List

import numpy as np

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from mubqkd_mcp.config import ProtocolConfig
from mubqkd_mcp.galois_field import field_tables, make_field
from mubqkd_mcp.mub_builder import build_mub, mub_deviation
from mubqkd_mcp.protocol_sim import run_session
from mubqkd_mcp.qudit_engine import apply, apply_controlled_shift, controlled_shift, make_state

CERTIFIED_FIELDS = [(3, 1), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1), (5, 2), (3, 3), (7, 2)]

# Targets in milliseconds per call
TARGETS = {
    "MUB build + certify (all d)": 10_000.0,
    "Structured shift d=9": 1.0,
    "Simulate 1000 rounds d=3 controlled_shift": 2_000.0,
}


class PerformanceBenchmark:
    """Collects timings and compares them with targets."""

    def __init__(self) -> None:
        self.results: List[Dict[str, Any]] = []

    def run(self, name: str, func: Callable[[], Any], iterations: int = 10) -> float:
        print(f"\n{'='*60}")
        print(f"Benchmarking: {name}")
        print(f"Iterations: {iterations}")
        print(f"{'='*60}")

        func()  # warmup
        times = []
        for _ in range(iterations):
            start = time.perf_counter()
            func()
            times.append((time.perf_counter() - start) * 1000)

        avg = sum(times) / len(times)
        self.results.append({"name": name, "avg_ms": avg, "min_ms": min(times), "max_ms": max(times)})
        print(f"Average: {avg:.3f}ms  Min: {min(times):.3f}ms  Max: {max(times):.3f}ms")
        return avg

    def benchmark_mub(self) -> None:
        def build_all() -> None:
            field_tables.cache_clear()
            for p, m in CERTIFIED_FIELDS:
                assert mub_deviation(build_mub(make_field(p, m))) < 1e-9

        self.run("MUB build + certify (all d)", build_all, iterations=1)

    def benchmark_shift(self) -> None:
        table = build_mub(make_field(3, 2))
        gen = np.random.default_rng(0)
        vec = gen.normal(size=81) + 1j * gen.normal(size=81)
        joint = make_state(vec / np.linalg.norm(vec))
        dense = controlled_shift(table, "backward")

        self.run("Dense shift d=9", lambda: apply(dense, joint), iterations=200)
        self.run("Structured shift d=9", lambda: apply_controlled_shift(joint, table), iterations=200)

    def benchmark_rounds(self) -> None:
        for strategy in ("none", "intercept_resend", "controlled_shift"):
            cfg = ProtocolConfig(p=3, rounds=1000, eve_strategy=strategy)
            self.run(f"Simulate 1000 rounds d=3 {strategy}", lambda cfg=cfg: run_session(cfg), iterations=3)

    def print_summary(self) -> int:
        print(f"\n{'='*60}")
        print("BENCHMARK SUMMARY")
        print(f"{'='*60}")
        print(f"{'Benchmark':<46} {'Avg (ms)':<12} {'Status'}")
        print(f"{'-'*60}")

        failures = 0
        for result in self.results:
            name, avg = result["name"], result["avg_ms"]
            status = "ok"
            if name in TARGETS and avg > TARGETS[name]:
                status = "SLOW"
                failures += 1
            print(f"{name:<46} {avg:>10.3f}  {status}")

        print(f"{'='*60}")
        if failures:
            print(f"{failures} benchmark(s) exceeded target")
            return 1
        print("All benchmarks within target")
        return 0


def main() -> int:
    benchmark = PerformanceBenchmark()
    print("mubqkd-mcp - Performance Benchmarks")
    print("=" * 60)

    benchmark.benchmark_mub()
    benchmark.benchmark_shift()
    benchmark.benchmark_rounds()
    return benchmark.print_summary()


if __name__ == "__main__":
    sys.exit(main())
