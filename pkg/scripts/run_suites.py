#!/usr/bin/env python3
"""
Run the verification suites over a folder of measure configs.

A plan file (YAML) can pick configs and suites:

    runs:
      - config: cantor.json
        suite: all
      - config: menger.json
        suite: classify

Without a plan every *.json config in the folder gets the full suite.

Usage:
    python scripts/run_suites.py configs --out-dir reports
    python scripts/run_suites.py configs --plan plan.yaml --dry-run
"""

import argparse
import sys
from pathlib import Path

import yaml


def load_plan(plan: Path) -> list[dict]:
    """Read the runs list from a YAML plan."""
    try:
        data = yaml.safe_load(plan.read_text(encoding="utf-8")) or {}
    except yaml.YAMLError as e:
        print(f"Error: cannot parse {plan}: {e}", file=sys.stderr)
        sys.exit(1)
    runs = data.get("runs") or []
    if not isinstance(runs, list):
        print(f"Error: 'runs' in {plan} must be a list", file=sys.stderr)
        sys.exit(1)
    return runs


def find_runs(folder: Path, plan: Path | None) -> list[tuple[Path, str]]:
    """(config path, suite) pairs, sorted by config name when no plan is given."""
    if plan is None:
        return [(path, "all") for path in sorted(folder.glob("*.json"))]
    runs = []
    for entry in load_plan(plan):
        if "config" not in entry:
            print(f"Skipping plan entry without a config: {entry}", file=sys.stderr)
            continue
        runs.append((folder / entry["config"], entry.get("suite", "all")))
    return runs


def main():
    parser = argparse.ArgumentParser(
        description="Run verification suites over measure configs"
    )
    parser.add_argument(
        "folder",
        type=Path,
        help="Folder containing measure configs"
    )
    parser.add_argument(
        "--plan",
        type=Path,
        help="YAML plan of {config, suite} runs"
    )
    parser.add_argument(
        "--out-dir",
        type=Path,
        default=None,
        help="Folder for the JSON reports (default: <folder>/reports)"
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=0,
        help="Seed for randomized checks (default: 0)"
    )
    parser.add_argument(
        "--workers",
        type=int,
        default=1,
        help="Worker threads per run (default: 1)"
    )
    parser.add_argument(
        "--dry-run",
        action="store_true",
        help="Just show what would be run"
    )

    args = parser.parse_args()

    if not args.folder.exists():
        print(f"Error: Folder not found: {args.folder}", file=sys.stderr)
        sys.exit(1)

    runs = find_runs(args.folder, args.plan)
    if not runs:
        print(f"No configs found in {args.folder}", file=sys.stderr)
        sys.exit(1)

    print(f"Found {len(runs)} runs:\n")
    for path, suite in runs:
        print(f"  {path.name}: {suite}")

    if args.dry_run:
        return

    from slicefourier.errors import NumericBudgetError, ValidationError
    from slicefourier.runner import cmd_verify

    out_dir = args.out_dir or args.folder / "reports"

    def progress(current, total, message):
        print(f"  [{current}/{total}] {message}")

    failures = []
    for path, suite in runs:
        print(f"\nVerifying {path.name} ({suite})")
        out = out_dir / f"{path.stem}-{suite}.json"
        try:
            _, passed = cmd_verify(
                path, suite, seed=args.seed, out=out, progress_callback=progress, workers=args.workers
            )
        except (ValidationError, NumericBudgetError) as e:
            print(f"  Error: {e}", file=sys.stderr)
            failures.append(path.name)
            continue
        print(f"  {'passed' if passed else 'FAILED'}: {out}")
        if not passed:
            failures.append(path.name)

    if failures:
        print(f"\n{len(failures)} of {len(runs)} runs failed: {', '.join(failures)}")
        sys.exit(1)
    print(f"\nSuccess! All {len(runs)} runs passed")


if __name__ == "__main__":
    main()
