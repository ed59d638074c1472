"""Command-line entry point ``shamp``.

Exit codes: 0 success, 2 an acceptance check failed, 1 runtime error,
64 unknown subcommand or bad usage.
"""
import argparse
from dataclasses import dataclass
from pathlib import Path
import sys
import traceback

from . import __version__
from .acceptance import run_all
from .config import ExperimentConfig, parse_config
from .experiments import ANCHORS, RUNNERS
from .report import write_csv, write_svg

EXIT_OK, EXIT_RUNTIME, EXIT_FAILED, EXIT_USAGE = 0, 1, 2, 64
SUBCOMMANDS = tuple(RUNNERS) + ("all-acceptance",)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


@dataclass(frozen=True)
class RunManifest:
    subcommand: str
    config_path: str
    out_dir: Path
    root_seed: int
    config_hash: str


def build_parser():
    p = _Parser(prog="shamp", description="Spectral simulation and verification of the linear "
                "stochastic Swift-Hohenberg amplitude approximation.")
    p.add_argument("--version", action="version", version=f"shamp {__version__}")
    p.add_argument("subcommand", choices=SUBCOMMANDS, metavar="subcommand",
                   help="one of: " + ", ".join(SUBCOMMANDS))
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--out", default="out", help="output directory (default: out)")
    p.add_argument("--seed", type=_u64, help="root seed, overrides the config")
    p.add_argument("--replicas", type=_positive_int, help="Monte-Carlo replicas, overrides n_replicas")
    return p


def _u64(s):
    v = int(s, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive_int(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("replicas must be >= 1")
    return v


def load_config(args):
    cfg = parse_config(args.config) if args.config else ExperimentConfig()
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.replicas is not None:
        changes["n_replicas"] = args.replicas
    return cfg.with_(**changes) if changes else cfg


def _print_checks(name, checks, out):
    for key, chk in checks.items():
        print(f"{'PASS' if chk.passed else 'FAIL'}  {name}:{key}  {chk.detail}", file=out)


def dispatch(manifest, cfg, out=sys.stdout):
    manifest.out_dir.mkdir(parents=True, exist_ok=True)
    if manifest.subcommand == "all-acceptance":
        return _acceptance(manifest, cfg, out)
    result = RUNNERS[manifest.subcommand](cfg)
    path = write_csv(result, manifest.out_dir, ANCHORS[manifest.subcommand])
    svg = write_svg(result, manifest.out_dir)
    print(f"wrote {path}" + (f" and {svg}" if svg else ""), file=out)
    for key, fit in result.fits.items():
        print(f"fit {key}: slope={fit.slope:.4f} r2={fit.r_squared:.4f}", file=out)
    _print_checks(manifest.subcommand, result.checks, out)
    return EXIT_OK if result.passed else EXIT_FAILED


def _acceptance(manifest, cfg, out):
    cache = {}

    def report(i, title, chk, dt):
        print(f"[{'PASS' if chk.passed else 'FAIL'}] {i:2d}  {title}  ({dt:.1f} s)  {chk.detail}",
              file=out, flush=True)

    rows = run_all(cfg, report=report, cache=cache)
    for name, result in cache.items():
        write_csv(result, manifest.out_dir, ANCHORS[name])
        write_svg(result, manifest.out_dir)
    lines = ["criterion,passed,seconds,title,detail"]
    for i, title, chk, dt in rows:
        detail = chk.detail.replace('"', "'")
        lines.append(f'{i},{str(chk.passed).lower()},{dt:.3f},"{title}","{detail}"')
    header = (f"# experiment: all-acceptance\n# config_hash: {manifest.config_hash}\n"
              f"# seed: {manifest.root_seed}\n# version: shamp {__version__}\n")
    (manifest.out_dir / "all-acceptance.csv").write_text(header + "\n".join(lines) + "\n",
                                                         encoding="utf-8", newline="\n")
    n_pass = sum(c.passed for _, _, c, _ in rows)
    print(f"{n_pass}/{len(rows)} criteria passed", file=out)
    return EXIT_OK if n_pass == len(rows) else EXIT_FAILED


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = load_config(args)
        manifest = RunManifest(args.subcommand, args.config or "", Path(args.out), int(cfg.seed),
                               cfg.hash())
        return dispatch(manifest, cfg)
    except (ValueError, FileNotFoundError) as exc:
        print(f"shamp: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception:
        traceback.print_exc()
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
