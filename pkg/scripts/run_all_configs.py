"""Run every experiment config in configs/ through the CLI and summarize exit codes.

usage: python3 scripts/run_all_configs.py [--out out] [--threads N]
"""

import argparse
import sys
import time
from pathlib import Path

from bslab.cli import main as bslab_main

ROOT = Path(__file__).resolve().parent.parent

# config stem prefix -> CLI subcommand
COMMANDS = {
    "euclid": ["euclid", "scan"],
    "schreier": ["schreier", "scan"],
    "hyp_injrad": ["hyp", "injrad"],
    "hyp_bsprob": ["hyp", "bsprob"],
    "hyp_conjugation": ["hyp", "prop24"],
    "zcover": ["zcover", "check"],
}


def command_for(stem: str) -> list[str]:
    for prefix, cmd in sorted(COMMANDS.items(), key=lambda kv: -len(kv[0])):
        if stem.startswith(prefix):
            return cmd
    raise SystemExit(f"no command known for config {stem}")


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default=str(ROOT / "out"))
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--only", help="substring filter on config names")
    args = p.parse_args()
    worst = 0
    for cfg in sorted((ROOT / "configs").glob("*.json")):
        if args.only and args.only not in cfg.stem:
            continue
        argv = command_for(cfg.stem) + ["--config", str(cfg), "--out", str(Path(args.out) / cfg.stem)]
        if args.threads:
            argv += ["--threads", str(args.threads)]
        t0 = time.perf_counter()
        code = bslab_main(argv)
        print(f"{cfg.stem:28s} exit {code}  {time.perf_counter() - t0:6.1f}s", flush=True)
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
