#!/usr/bin/env python3
"""
Run every report command for each shipped (q, n, r) triple, then the
acceptance suites once.

Reports land in GOPPA_REPORT_DIR (default data/reports) as
<cmd>_p<p>_m<m>_n<n>_r<r>.json. Exits with the first nonzero CLI status.
"""

import os
import sys
from pathlib import Path

from dotenv import load_dotenv

sys.path.insert(0, str(Path(__file__).parent.parent))

from cli import EXIT_OK, main as cli_main  # noqa: E402
from suites import CLASSIFICATION_PARAMS  # noqa: E402

load_dotenv()

REPORT_COMMANDS = ('tower', 'enumerate', 'orbits', 'classify')


def report_dir() -> Path:
    default = Path(__file__).parent.parent / 'data' / 'reports'
    return Path(os.getenv('GOPPA_REPORT_DIR', str(default)))


def run_triple(params, out_dir: Path, workers: int) -> int:
    """Run each report command for one parameter set; return the worst exit code."""
    p, m, n, r = params
    worst = EXIT_OK
    for cmd in REPORT_COMMANDS:
        out = out_dir / f"{cmd}_p{p}_m{m}_n{n}_r{r}.json"
        status = cli_main(['--p', str(p), '--m', str(m), '--n', str(n), '--r', str(r),
                           '--cmd', cmd, '--out', str(out), '--workers', str(workers),
                           '--no-timings'])
        if status == EXIT_OK:
            print(f"  ✓ {cmd}")
        else:
            print(f"  ❌ {cmd} exited with {status}")
            worst = worst or status
    return worst


def run_all_checks() -> int:
    out_dir = report_dir()
    out_dir.mkdir(parents=True, exist_ok=True)
    workers = int(os.getenv('GOPPA_WORKERS', '1'))

    statuses = {}
    for params in CLASSIFICATION_PARAMS:
        print(f"\n### p={params[0]} m={params[1]} n={params[2]} r={params[3]} ###")
        statuses[params] = run_triple(params, out_dir, workers)

    print("\n### Acceptance suites ###")
    verify_status = cli_main(['--cmd', 'verify', '--out', str(out_dir / 'verify.json'),
                              '--workers', str(workers)])

    print("\nSummary:")
    for params, status in statuses.items():
        marker = '✓' if status == EXIT_OK else '❌'
        print(f"  {marker} {params}")
    print(f"  {'✓' if verify_status == EXIT_OK else '❌'} verify")

    for status in list(statuses.values()) + [verify_status]:
        if status != EXIT_OK:
            return status
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(run_all_checks())
