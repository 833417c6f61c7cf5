#!/usr/bin/env python3
"""
Consolidate the classify reports into one headline table.

Reads classify_*.json from GOPPA_REPORT_DIR (default data/reports) and writes
data/headline.csv plus data/headline.json with summary statistics.
"""

import json
import os
import sys
from datetime import datetime
from pathlib import Path

import pandas as pd
from dotenv import load_dotenv

sys.path.insert(0, str(Path(__file__).parent.parent))

from equiv import HEADLINE_COLUMNS  # noqa: E402

load_dotenv()

DATA_DIR = Path(__file__).parent.parent / 'data'


def load_classifications(report_dir: Path):
    """Load the classification payload of every classify report."""
    payloads = []
    for report_file in sorted(report_dir.glob('classify_*.json')):
        try:
            with open(report_file, 'r', encoding='utf-8') as f:
                payload = json.load(f)['payload']
            payloads.append(payload)
            print(f"✓ Loaded {report_file.name}")
        except (OSError, KeyError, json.JSONDecodeError) as e:
            print(f"❌ Error loading {report_file.name}: {e}")
    return payloads


def headline_frame(payloads) -> pd.DataFrame:
    rows = []
    for payload in payloads:
        params = payload['params']
        rows.append({
            'p': params['p'], 'm': params['m'], 'n': params['n'], 'r': params['r'],
            '|S|': payload['S'],
            '|P|': payload['P'],
            'orbit_count': payload['orbit_count'],
            'class_count': payload['class_count'],
            'gap': payload['gap'],
        })
    frame = pd.DataFrame(rows, columns=HEADLINE_COLUMNS)
    return frame.sort_values(['p', 'm', 'n', 'r']).reset_index(drop=True)


def calculate_statistics(frame: pd.DataFrame, payloads):
    return {
        'triples': int(len(frame)),
        'total_polys': int(frame['|P|'].sum()),
        'total_distinct_codes': int(sum(p['distinct_codes'] for p in payloads)),
        'total_orbits': int(frame['orbit_count'].sum()),
        'total_classes': int(frame['class_count'].sum()),
        'triples_with_gap': int((frame['gap'] > 0).sum()),
        'orbits_within_classes': all(p['orbits_within_classes'] for p in payloads),
    }


def consolidate_reports() -> int:
    report_dir = Path(os.getenv('GOPPA_REPORT_DIR', str(DATA_DIR / 'reports')))
    print(f"Loading classify reports from {report_dir}...\n")
    payloads = load_classifications(report_dir)
    if not payloads:
        print("❌ No classify reports found! Run scripts/run_all_checks.py first.")
        return 1

    frame = headline_frame(payloads)
    stats = calculate_statistics(frame, payloads)

    csv_file = DATA_DIR / 'headline.csv'
    frame.to_csv(csv_file, index=False)
    json_file = DATA_DIR / 'headline.json'
    with open(json_file, 'w', encoding='utf-8') as f:
        json.dump({
            'metadata': {'generated_at': datetime.now().isoformat(), 'statistics': stats},
            'rows': frame.to_dict(orient='records'),
        }, f, indent=2, ensure_ascii=False)

    print(f"\n✅ Headline written: {csv_file}, {json_file}")
    print("\nStatistics:")
    print(f"  Parameter triples: {stats['triples']}")
    print(f"  Goppa polynomials: {stats['total_polys']}")
    print(f"  Orbits: {stats['total_orbits']}")
    print(f"  Equivalence classes: {stats['total_classes']}")
    print(f"  Triples with orbit count > class count: {stats['triples_with_gap']}")
    if not stats['orbits_within_classes']:
        print("  ⚠️  Some orbit spans more than one class")
    print("\n" + frame.to_string(index=False))
    return 0


if __name__ == '__main__':
    sys.exit(consolidate_reports())
