"""Run every config in configs/ through the CLI and print one status line each.

    python3 scripts/run_configs.py [--out out] [--only verify-iso regularity]
"""
import argparse
import json
import sys
import time
from pathlib import Path

from hoermander_lab.cli import main as cli_main

ROOT = Path(__file__).resolve().parents[1]


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", type=Path, default=ROOT / "out")
    p.add_argument("--configs", type=Path, default=ROOT / "configs")
    p.add_argument("--only", nargs="*", default=None)
    p.add_argument("--jobs", type=int, default=1)
    args = p.parse_args(argv)

    worst = 0
    for cfg in sorted(args.configs.glob("*.json")):
        command = json.loads(cfg.read_text())["command"]
        if args.only and command not in args.only:
            continue
        t0 = time.perf_counter()
        code = cli_main([command, "--config", str(cfg), "--out", str(args.out),
                         "--jobs", str(args.jobs)])
        print(f"{command:14s} exit {code}  {time.perf_counter() - t0:6.2f} s")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
