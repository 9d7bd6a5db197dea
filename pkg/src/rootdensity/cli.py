"""Command-line front end.

Subcommands mirror the processing stages so each is independently
scriptable: ``solve`` (batch file or family to a roots file), ``render``
(roots file to a density image), ``sweep`` (family to image in one
streaming pass), ``simulate`` (pipeline cycle model), and ``bench``
(host throughput measurement with the instrumented FLOP counter).

Exit codes: 0 ok, 2 malformed input format, 3 degenerate input
(non-normalizable leading coefficient, mixed degrees, degenerate fit),
4 invalid configuration, 5 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import __version__, approximator, batchio, raster
from .eigensolver import SolveConfig, batch_solve, flops_per_solve
from .errors import (
    BatchFormatError,
    DegenerateFit,
    DegenerateLeadingCoefficient,
    FamilyFormatError,
    IllegalState,
    MixedDegreeBatch,
)
from .oracle import random_separated_roots
from .pipeline_model import REFERENCE_CONSTANTS, PipelineConfig, simulate
from .polynomial import from_roots

EXIT_OK = 0
EXIT_FORMAT = 2
EXIT_DEGENERATE = 3
EXIT_CONFIG = 4
EXIT_IO = 5

SOLVE_CHUNK = 8192


class ConfigError(ValueError):
    """CLI-level configuration problem (exit code 4)."""


def _parse_viewport(text: str) -> tuple:
    parts = text.split(",")
    if len(parts) != 4:
        raise ConfigError(f"--viewport needs xmin,xmax,ymin,ymax, got {text!r}")
    try:
        x0, x1, y0, y1 = (float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"--viewport values must be numeric: {text!r}") from exc
    return x0, x1, y0, y1


def _parse_size(text: str) -> tuple:
    try:
        w_text, h_text = text.lower().split("x")
        return int(w_text), int(h_text)
    except ValueError as exc:
        raise ConfigError(f"--size must look like 512x512, got {text!r}") from exc


def _write_manifest(out_path: str, subcommand: str, settings: dict) -> None:
    manifest = {
        "tool": "rootdensity",
        "version": __version__,
        "numpy_version": np.__version__,
        "subcommand": subcommand,
        "settings": settings,
    }
    with open(f"{out_path}.manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_inputs(paths) -> np.ndarray:
    batches = [batchio.read_batch(p) for p in paths]
    degree = batches[0].shape[1]
    for path, batch in zip(paths, batches):
        if batch.shape[1] != degree:
            raise MixedDegreeBatch(
                f"{path} has degree {batch.shape[1]}, expected {degree}"
            )
    return np.vstack(batches)


def _family_chunks(family, chunk: int = SOLVE_CHUNK):
    """Yield (coeff_matrix, skipped_count) over the family grid in order."""
    total = family.sample_count
    for start in range(0, total, chunk):
        stop = min(start + chunk, total)
        coeffs, skipped = approximator.family_coefficients(family, start, stop)
        yield coeffs, len(skipped)


def cmd_solve(args) -> int:
    cfg = SolveConfig(iterations=args.iterations, precision=args.precision)
    text_out = args.out.endswith((".txt", ".tsv"))
    settings = {
        "input": args.input,
        "family": args.family,
        "out": args.out,
        "precision": args.precision,
        "iterations": args.iterations,
        "workers": args.workers,
    }

    if args.input:
        coeffs = _load_inputs(args.input)
        roots = batch_solve(coeffs, cfg, worker_count=args.workers)
        if text_out:
            batchio.write_roots_text(args.out, roots)
        else:
            batchio.write_roots(args.out, roots)
        _write_manifest(args.out, "solve", settings)
        print(f"solved {roots.shape[0]} polynomials of degree {roots.shape[1]} -> {args.out}")
        return EXIT_OK

    family = approximator.load_family(args.family)
    skipped_total = 0
    count = 0
    if text_out:
        with open(args.out, "w") as fh:
            for coeffs, skipped in _family_chunks(family):
                skipped_total += skipped
                roots = batch_solve(coeffs, cfg, worker_count=args.workers)
                count += roots.shape[0]
                for row in roots:
                    fh.write("\t".join(batchio.format_complex(z) for z in row) + "\n")
    else:
        with batchio.RootsStreamWriter(args.out, family.degree) as writer:
            for coeffs, skipped in _family_chunks(family):
                skipped_total += skipped
                roots = batch_solve(coeffs, cfg, worker_count=args.workers)
                count += roots.shape[0]
                writer.append(roots.astype(np.complex128))
    settings["skipped_samples"] = skipped_total
    _write_manifest(args.out, "solve", settings)
    print(f"solved {count} family samples (skipped {skipped_total}) -> {args.out}")
    return EXIT_OK


def _render_to_files(grid: raster.DensityGrid, tone: raster.ToneMap, out: str,
                     extra_stats: dict | None = None) -> None:
    image = raster.render(grid, tone)
    raster.write_image(image, out)
    stats_path = f"{out}.stats.txt"
    raster.write_stats(grid, stats_path)
    if extra_stats:
        with open(stats_path, "a") as fh:
            for key, value in extra_stats.items():
                fh.write(f"{key}={value}\n")


def cmd_render(args) -> int:
    if args.input.endswith((".txt", ".tsv")):
        roots = batchio.read_roots_text(args.input)
    else:
        roots = batchio.read_roots(args.input)
    width, height = _parse_size(args.size)
    x0, x1, y0, y1 = _parse_viewport(args.viewport)
    viewport = raster.Viewport(x0, x1, y0, y1, width, height)
    tone = raster.ToneMap(mode=args.tone, gamma=args.gamma, palette=args.palette)
    grid = raster.DensityGrid(width=width, height=height)
    raster.accumulate(grid, viewport, roots)
    _render_to_files(grid, tone, args.out)
    _write_manifest(args.out, "render", {
        "input": args.input, "out": args.out, "viewport": args.viewport,
        "size": args.size, "tone": args.tone, "gamma": args.gamma,
        "palette": args.palette,
    })
    print(f"rendered {grid.total_streamed} roots ({grid.dropped} dropped) -> {args.out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    family = approximator.load_family(args.family)
    cfg = SolveConfig(iterations=args.iterations, precision=args.precision)
    width, height = _parse_size(args.size)
    x0, x1, y0, y1 = _parse_viewport(args.viewport)
    viewport = raster.Viewport(x0, x1, y0, y1, width, height)
    tone = raster.ToneMap(mode=args.tone, gamma=args.gamma, palette=args.palette)
    grid = raster.DensityGrid(width=width, height=height)
    skipped_total = 0
    solved = 0
    for coeffs, skipped in _family_chunks(family):
        skipped_total += skipped
        roots = batch_solve(coeffs, cfg, worker_count=args.workers)
        solved += roots.shape[0]
        raster.accumulate(grid, viewport, roots)
    _render_to_files(grid, tone, args.out, extra_stats={
        "samples": family.sample_count,
        "solved": solved,
        "skipped_samples": skipped_total,
    })
    _write_manifest(args.out, "sweep", {
        "family": args.family, "out": args.out, "viewport": args.viewport,
        "size": args.size, "tone": args.tone, "gamma": args.gamma,
        "palette": args.palette, "precision": args.precision,
        "iterations": args.iterations, "workers": args.workers,
    })
    print(f"swept {solved} samples (skipped {skipped_total}), "
          f"{grid.in_view} in view, {grid.dropped} dropped -> {args.out}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = PipelineConfig(
        degree=args.degree,
        iterations=args.iterations,
        pipeline_depth=args.pipeline_depth,
        clock_hz=args.clock_hz,
        variant=args.variant,
        fifo_depth=args.fifo_depth,
        fifo_drain_per_cycle=args.fifo_drain,
        core_count=args.cores,
    )
    tasks = args.tasks if args.tasks else 4 * cfg.pipeline_depth
    report = simulate(cfg, tasks)
    print(report.table())
    print()
    for line in report.key_values():
        print(line)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("\n".join(report.key_values()) + "\n")
        _write_manifest(args.out, "simulate", {
            "degree": args.degree, "iterations": args.iterations,
            "pipeline_depth": args.pipeline_depth, "clock_hz": args.clock_hz,
            "variant": args.variant, "tasks": tasks,
            "fifo_depth": args.fifo_depth, "fifo_drain": args.fifo_drain,
            "cores": args.cores,
        })
    return EXIT_OK


def cmd_bench(args) -> int:
    print(f"bench: count={args.count} degree={args.degree} "
          f"precision={args.precision} iterations={args.iterations} workers={args.workers}")
    if args.count == 0:
        print("empty batch; nothing to measure")
        return EXIT_OK
    rng = np.random.RandomState(args.seed)
    coeffs = np.vstack([
        from_roots(random_separated_roots(rng, args.degree)).coeffs
        for _ in range(args.count)
    ])
    cfg = SolveConfig(iterations=args.iterations, precision=args.precision)
    start = time.perf_counter()
    roots = batch_solve(coeffs, cfg, worker_count=args.workers)
    elapsed = time.perf_counter() - start
    throughput = args.count / elapsed
    flops = flops_per_solve(args.degree, args.iterations)
    print(f"measured_throughput_per_s={throughput:.1f}")
    print(f"elapsed_s={elapsed:.3f}")
    print(f"flops_per_polynomial={flops}")
    print(f"implied_gflops={throughput * flops / 1e9:.3f}")
    print(f"checksum={complex(roots.sum()):.6g}")
    print("# reference hardware context (constants, not asserted):")
    fpga_tp = REFERENCE_CONSTANTS["throughput_fpga_per_s"]
    print(f"# fpga_throughput_per_s={fpga_tp:.3g} "
          f"cpu_throughput_per_s={REFERENCE_CONSTANTS['throughput_cpu_per_s']:.3g} "
          f"gpu_throughput_per_s={REFERENCE_CONSTANTS['throughput_gpu_per_s']:.3g}")
    print(f"# fpga_gflops_avg={REFERENCE_CONSTANTS['gflops_fpga_avg']} "
          f"fpga_gflops_ceiling={REFERENCE_CONSTANTS['gflops_fpga_ceiling']} "
          f"implied_flop_per_poly={REFERENCE_CONSTANTS['gflops_fpga_avg'] * 1e9 / fpga_tp:.0f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rootdensity",
        description="Batch polynomial root solver, density plotter, and pipeline cycle model",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_solver_flags(p):
        p.add_argument("--precision", choices=("fp32", "fp64"), default="fp64")
        p.add_argument("--iterations", type=int, default=10,
                       help="QR iterations per deflation level")
        p.add_argument("--workers", type=int, default=1)

    def add_image_flags(p):
        p.add_argument("--viewport", default="-2,2,-2,2",
                       help="xmin,xmax,ymin,ymax (use --viewport=-2,2,-2,2 "
                            "for values starting with a minus sign)")
        p.add_argument("--size", default="512x512", help="WxH pixels")
        p.add_argument("--tone", choices=("linear", "log1p"), default="log1p")
        p.add_argument("--gamma", type=float, default=1.0)
        p.add_argument("--palette", choices=("grayscale", "fire", "ice"),
                       default="grayscale")

    p_solve = sub.add_parser("solve", help="solve a batch file or family to a roots file")
    group = p_solve.add_mutually_exclusive_group(required=True)
    group.add_argument("--input", nargs="+", help="CPLY batch file(s)")
    group.add_argument("--family", help="family definition file")
    p_solve.add_argument("--out", required=True,
                         help="roots file (.crts binary, .txt/.tsv text)")
    add_solver_flags(p_solve)
    p_solve.set_defaults(func=cmd_solve)

    p_render = sub.add_parser("render", help="render a roots file to a density image")
    p_render.add_argument("--input", required=True, help="roots file (.crts or .txt)")
    p_render.add_argument("--out", required=True, help="image file (PGM/PPM)")
    add_image_flags(p_render)
    p_render.set_defaults(func=cmd_render)

    p_sweep = sub.add_parser("sweep", help="family -> solve -> image in one pass")
    p_sweep.add_argument("--family", required=True)
    p_sweep.add_argument("--out", required=True)
    add_solver_flags(p_sweep)
    add_image_flags(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_sim = sub.add_parser("simulate", help="run the pipeline cycle model")
    p_sim.add_argument("--degree", type=int, default=6)
    p_sim.add_argument("--iterations", type=int, default=10)
    p_sim.add_argument("--variant", choices=("wide", "narrow"), default="wide")
    p_sim.add_argument("--pipeline-depth", type=int, default=4)
    p_sim.add_argument("--clock-hz", type=float, default=100e6)
    p_sim.add_argument("--tasks", type=int, default=0,
                       help="task count (default: 4x pipeline depth)")
    p_sim.add_argument("--fifo-depth", type=int, default=16)
    p_sim.add_argument("--fifo-drain", type=int, default=1)
    p_sim.add_argument("--cores", type=int, default=1)
    p_sim.add_argument("--out", help="optional key=value report file")
    p_sim.set_defaults(func=cmd_simulate)

    p_bench = sub.add_parser("bench", help="measure host solve throughput")
    p_bench.add_argument("--count", type=int, default=100000)
    p_bench.add_argument("--degree", type=int, default=6)
    p_bench.add_argument("--seed", type=int, default=0)
    add_solver_flags(p_bench)
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (BatchFormatError, FamilyFormatError) as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except (DegenerateLeadingCoefficient, MixedDegreeBatch, DegenerateFit) as exc:
        print(f"degenerate input: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (ConfigError, IllegalState, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
