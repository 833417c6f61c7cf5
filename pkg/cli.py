#!/usr/bin/env python3
"""
Goppa Orbit Explorer - command line

Builds the field tower, enumerates the maximal irreducible Goppa codes for
(q, n, r), reports semiaffine orbits, classifies the codes up to coordinate
permutation and runs the acceptance suites.

Usage:
    python cli.py --p 2 --m 1 --n 3 --r 2 --cmd classify
    python cli.py --cmd verify --suite parity --suite agl-embedding
    python cli.py --list

Exit codes: 0 success, 1 suite falsification, 2 invalid parameters,
3 size-guard refusal.
"""

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd
from dotenv import load_dotenv

from actions import (
    correspondence_check, orbit_report, orbit_table, orbits_on_P, orbits_on_S, poly_set, root_set,
)
from equiv import classify_omega, headline_table
from ff_tower import (
    InternalError, ParameterError, Params, SizeGuardError, build_tower, poly_to_json,
)
from goppa import cached_code, weight_enumerator
from suites import SUITES, run_suites

load_dotenv()

logger = logging.getLogger(__name__)

COMMANDS = ('tower', 'enumerate', 'orbits', 'classify', 'verify')

EXIT_OK = 0
EXIT_FALSIFIED = 1
EXIT_BAD_PARAMS = 2
EXIT_GUARD = 3


@dataclass
class RunConfig:
    p: int = 2
    m: int = 1
    n: int = 3
    r: int = 2
    command: str = 'tower'
    out: Optional[str] = None
    fmt: str = 'json'
    workers: int = 1
    force: bool = False
    suites: List[str] = field(default_factory=list)
    timings: bool = True
    seed: Optional[str] = None

    @property
    def params(self) -> Params:
        return Params(self.p, self.m, self.n, self.r)

    def validate(self) -> 'RunConfig':
        if self.command not in COMMANDS:
            raise ParameterError(f"unknown command {self.command!r}")
        if self.fmt not in ('json', 'csv'):
            raise ParameterError(f"unknown format {self.fmt!r}")
        if self.workers < 1:
            raise ParameterError("--workers must be at least 1")
        unknown = [s for s in self.suites if s not in SUITES]
        if unknown:
            raise ParameterError(f"unknown suite(s): {', '.join(unknown)}")
        self.params.validate()
        return self

    def echo(self) -> Dict:
        doc = asdict(self)
        doc.pop('timings')
        doc.pop('out')
        return doc


@dataclass
class Report:
    config: Dict
    tower: Optional[Dict] = None
    payload: Dict = field(default_factory=dict)
    table: Optional[pd.DataFrame] = None
    suites: List[Dict] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)
    falsified: bool = False

    def to_json(self, include_timings: bool = True) -> Dict:
        doc = {'config': self.config, 'tower': self.tower, 'payload': self.payload}
        if self.suites:
            doc['suites'] = self.suites
        if include_timings:
            doc['timings'] = {k: round(v, 3) for k, v in self.timings.items()}
        return doc


def _timed(report: Report, name: str, start: float) -> None:
    report.timings[name] = time.perf_counter() - start


def cmd_tower(config: RunConfig) -> Report:
    """Moduli, primitive elements and embedding images of the tower."""
    start = time.perf_counter()
    tower = build_tower(config.params)
    report = Report(config=config.echo())
    report.payload = tower.describe()
    report.table = pd.DataFrame([
        {'field': ctx.name, 'size': ctx.size, 'degree': ctx.degree,
         'modulus': ' '.join(str(c) for c in ctx.modulus)}
        for ctx in (tower.fq, tower.fqn, tower.top)
    ])
    _timed(report, 'tower', start)
    return report


def cmd_enumerate(config: RunConfig) -> Report:
    """Every code of the family with its Goppa polynomial and weight enumerator."""
    start = time.perf_counter()
    tower = build_tower(config.params)
    roots = root_set(tower, force=config.force)
    polys = poly_set(tower, roots)
    records, rows = [], []
    for alpha in polys.reps:
        goppa_code = cached_code(tower, alpha)
        enumerator = weight_enumerator(goppa_code.code, force=config.force)
        records.append(goppa_code.to_json(tower, enumerator))
        d = next((w for w, count in enumerate(enumerator) if w and count), None)
        rows.append({'alpha': int(tower.top.log_table[alpha]),
                     'g': json.dumps(poly_to_json(tower.fqn, goppa_code.g)),
                     'N': goppa_code.code.length, 'k': goppa_code.code.k, 'd': d,
                     'weight_enumerator': ' '.join(str(w) for w in enumerator)})
    report = Report(config=config.echo(), tower=tower.describe())
    report.payload = {'S': len(roots), 'P': len(polys), 'codes': records}
    report.table = pd.DataFrame(rows)
    _timed(report, 'enumerate', start)
    return report


def cmd_orbits(config: RunConfig) -> Report:
    """T-orbits on S, induced orbits on P and the correspondence between them."""
    start = time.perf_counter()
    tower = build_tower(config.params)
    roots = root_set(tower, force=config.force)
    polys = poly_set(tower, roots)
    orbits_S = orbits_on_S(tower, roots)
    orbits_P = orbits_on_P(tower, polys)
    matched = correspondence_check(orbits_S, orbits_P, polys)
    report = Report(config=config.echo(), tower=tower.describe(), falsified=not matched)
    report.payload = {
        'S': orbit_report(tower, orbits_S),
        'P': orbit_report(tower, orbits_P, polys),
        'correspondence': matched,
    }
    report.table = pd.concat([orbit_table(tower, orbits_S), orbit_table(tower, orbits_P)],
                             ignore_index=True)
    _timed(report, 'orbits', start)
    return report


def cmd_classify(config: RunConfig) -> Report:
    """Permutation-equivalence classes against the orbit count."""
    start = time.perf_counter()
    tower = build_tower(config.params)
    classification = classify_omega(tower, workers=config.workers, force=config.force)
    report = Report(config=config.echo(), tower=tower.describe())
    report.payload = classification.to_json(tower)
    report.table = headline_table([classification])
    _timed(report, 'classify', start)
    return report


def cmd_verify(config: RunConfig) -> Report:
    """Run the acceptance suites (all, or those named with --suite)."""
    report = Report(config=config.echo())
    progress = sys.stderr.isatty()
    results = run_suites(config.suites or None, workers=config.workers, progress=progress)
    for suite in results:
        report.suites.append(suite.to_json(include_timings=config.timings))
        report.timings[suite.name] = suite.seconds
        marker = '✓' if suite.passed else '❌'
        print(f"{marker} {suite.name}: {suite.checks} checks, {len(suite.failures)} failures",
              file=sys.stderr)
    report.falsified = not all(s.passed for s in results)
    report.payload = {'passed': not report.falsified,
                      'suites': {s.name: s.passed for s in results}}
    if len(results) == 1 and results[0].table is not None:
        report.table = results[0].table
    else:
        report.table = pd.DataFrame([{'suite': s.name, 'passed': s.passed, 'checks': s.checks,
                                      'failures': len(s.failures)} for s in results])
    return report


HANDLERS = {
    'tower': cmd_tower,
    'enumerate': cmd_enumerate,
    'orbits': cmd_orbits,
    'classify': cmd_classify,
    'verify': cmd_verify,
}


def emit(report: Report, config: RunConfig) -> None:
    """JSON (sorted keys) or CSV to --out, or stdout."""
    if config.fmt == 'csv':
        text = report.table.to_csv(index=False) if report.table is not None else ''
    else:
        text = json.dumps(report.to_json(include_timings=config.timings),
                          indent=2, sort_keys=True, ensure_ascii=False) + '\n'
    if config.out:
        path = Path(config.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding='utf-8')
        print(f"✓ Wrote {path}", file=sys.stderr)
    else:
        sys.stdout.write(text)


def workers_from_env() -> int:
    raw = os.getenv('GOPPA_WORKERS', '1')
    try:
        return int(raw)
    except ValueError:
        raise ParameterError(f"GOPPA_WORKERS must be an integer, got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description='Maximal irreducible Goppa codes: orbits and permutation equivalence')
    parser.add_argument('--p', type=int, default=2, help='characteristic')
    parser.add_argument('--m', type=int, default=1, help='q = p^m')
    parser.add_argument('--n', type=int, default=3, help='code length N = q^n')
    parser.add_argument('--r', type=int, default=2, help='Goppa polynomial degree')
    parser.add_argument('--cmd', choices=COMMANDS, default='tower')
    parser.add_argument('--out', help='output file (default: stdout)')
    parser.add_argument('--format', dest='fmt', choices=('json', 'csv'), default='json')
    parser.add_argument('--workers', type=int, default=None,
                        help='worker threads (default: GOPPA_WORKERS or 1)')
    parser.add_argument('--force', action='store_true', help='override desk-scale size guards')
    parser.add_argument('--suite', action='append', default=[], dest='suites',
                        help='suite to run with --cmd verify (repeatable)')
    parser.add_argument('--list', action='store_true', help='list the acceptance suites and exit')
    parser.add_argument('--no-timings', action='store_true', help='drop wall-clock timings')
    parser.add_argument('--verbose', '-v', action='store_true')
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format='[%(asctime)s %(levelname)s] %(message)s', stream=sys.stderr)

    if args.list:
        for name, suite in SUITES.items():
            print(f"{name:20s} {suite.__doc__.strip().splitlines()[0]}")
        return EXIT_OK

    try:
        workers = args.workers if args.workers is not None else workers_from_env()
        config = RunConfig(p=args.p, m=args.m, n=args.n, r=args.r, command=args.cmd,
                           out=args.out, fmt=args.fmt, workers=workers, force=args.force,
                           suites=args.suites, timings=not args.no_timings,
                           seed=os.getenv('GOPPA_SEED'))
        config.validate()
        report = HANDLERS[config.command](config)
    except ParameterError as e:
        print(f"❌ Invalid parameters: {e}", file=sys.stderr)
        return EXIT_BAD_PARAMS
    except SizeGuardError as e:
        print(f"⚠️  Size guard: {e} (use --force to override)", file=sys.stderr)
        return EXIT_GUARD
    except InternalError as e:
        logger.error("Internal check failed: %s", e)
        report = Report(config=config.echo(), falsified=True)
        report.payload = {'failure': {'error': type(e).__name__, 'message': str(e)}}

    emit(report, config)
    if report.falsified:
        print("❌ Falsification recorded; see the report for failure records", file=sys.stderr)
        return EXIT_FALSIFIED
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
