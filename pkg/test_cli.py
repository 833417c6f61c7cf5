#!/usr/bin/env python3
"""
Unit tests for the command line surface and the acceptance-suite runner
"""

import contextlib
import io
import json
import os
import tempfile
import unittest
from pathlib import Path
from unittest import mock

import pandas as pd

import cli
from cli import EXIT_BAD_PARAMS, EXIT_FALSIFIED, EXIT_OK, main
from ff_tower import InternalError
from suites import SUITES, run_suites


def run_cli(*argv):
    stdout, stderr = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
        status = main(list(argv))
    return status, stdout.getvalue(), stderr.getvalue()


class CommandLineTests(unittest.TestCase):

    def test_invalid_characteristic(self):
        status, out, err = run_cli('--p', '4', '--cmd', 'tower')
        self.assertEqual(status, EXIT_BAD_PARAMS)
        self.assertEqual(out, '')
        self.assertIn('❌', err)

    def test_invalid_r_and_workers(self):
        self.assertEqual(run_cli('--r', '1')[0], EXIT_BAD_PARAMS)
        self.assertEqual(run_cli('--workers', '0')[0], EXIT_BAD_PARAMS)
        self.assertEqual(run_cli('--cmd', 'verify', '--suite', 'nonsense')[0], EXIT_BAD_PARAMS)

    def test_list(self):
        status, out, _ = run_cli('--list')
        self.assertEqual(status, EXIT_OK)
        for name in SUITES:
            self.assertIn(name, out)

    def test_tower_json(self):
        status, out, _ = run_cli('--cmd', 'tower', '--no-timings')
        self.assertEqual(status, EXIT_OK)
        doc = json.loads(out)
        self.assertEqual(doc['payload']['fields']['qn']['modulus'], [1, 1, 0, 1])
        self.assertEqual(doc['config']['command'], 'tower')
        self.assertNotIn('timings', doc)

    def test_output_is_deterministic(self):
        first = run_cli('--cmd', 'orbits', '--no-timings')[1]
        second = run_cli('--cmd', 'orbits', '--no-timings')[1]
        self.assertEqual(first, second)
        self.assertTrue(json.loads(first)['payload']['correspondence'])

    def test_enumerate(self):
        status, out, _ = run_cli('--cmd', 'enumerate', '--no-timings')
        self.assertEqual(status, EXIT_OK)
        payload = json.loads(out)['payload']
        self.assertEqual(payload['S'], 56)
        self.assertEqual(payload['P'], 28)
        self.assertEqual(len(payload['codes']), 28)
        for record in payload['codes']:
            self.assertEqual(record['k'], 2)
            self.assertEqual(record['weight_enumerator'][:5], [1, 0, 0, 0, 0])

    def test_csv_to_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            target = Path(tmp) / 'reports' / 'enumerate.csv'
            status, out, err = run_cli('--cmd', 'enumerate', '--format', 'csv', '--out', str(target))
            self.assertEqual(status, EXIT_OK)
            self.assertEqual(out, '')
            self.assertIn('✓', err)
            frame = pd.read_csv(target)
            self.assertEqual(len(frame), 28)
            self.assertTrue((frame['d'] == 5).all())

    def test_classify(self):
        status, out, _ = run_cli('--cmd', 'classify', '--n', '2', '--no-timings')
        self.assertEqual(status, EXIT_OK)
        payload = json.loads(out)['payload']
        self.assertLessEqual(payload['class_count'], payload['orbit_count'])

    def test_verify_parity_suite(self):
        status, out, err = run_cli('--cmd', 'verify', '--suite', 'parity', '--no-timings')
        self.assertEqual(status, EXIT_OK)
        doc = json.loads(out)
        self.assertTrue(doc['payload']['passed'])
        self.assertEqual(doc['suites'][0]['name'], 'parity')
        self.assertIn('✓ parity', err)


    def test_verify_parity_csv(self):
        status, out, _ = run_cli('--cmd', 'verify', '--suite', 'parity', '--format', 'csv')
        self.assertEqual(status, EXIT_OK)
        frame = pd.read_csv(io.StringIO(out))
        self.assertEqual(list(frame.columns), ['q', 'n', 'generator', 'cycle_type', 'sign'])
        self.assertEqual(len(frame), 18)
        sigma = frame[(frame['q'] == 2) & (frame['n'] == 2) & (frame['generator'] == 'sigma')]
        self.assertEqual(sigma['sign'].tolist(), [-1])

    def test_internal_failure_is_a_falsification(self):
        with mock.patch.object(cli, 'classify_omega',
                               side_effect=InternalError('witness does not map the code')):
            status, out, err = run_cli('--cmd', 'classify', '--n', '2', '--no-timings')
        self.assertEqual(status, EXIT_FALSIFIED)
        failure = json.loads(out)['payload']['failure']
        self.assertEqual(failure['error'], 'InternalError')
        self.assertIn('witness', failure['message'])
        self.assertIn('❌', err)

    def test_workers_from_environment(self):
        with mock.patch.dict(os.environ, {'GOPPA_WORKERS': 'many'}):
            self.assertEqual(run_cli('--cmd', 'tower')[0], EXIT_BAD_PARAMS)
            self.assertEqual(run_cli('--cmd', 'tower', '--workers', '2')[0], EXIT_OK)
        with mock.patch.dict(os.environ, {'GOPPA_WORKERS': '3'}):
            status, out, _ = run_cli('--cmd', 'tower', '--no-timings')
        self.assertEqual(status, EXIT_OK)
        self.assertEqual(json.loads(out)['config']['workers'], 3)


class SuiteRunnerTests(unittest.TestCase):

    def test_construction_suite(self):
        [result] = run_suites(['construction'])
        self.assertTrue(result.passed, result.failures)
        self.assertEqual(result.details, {'S': 56, 'P': 28})
        self.assertGreater(result.seconds, 0)

    def test_unknown_suite(self):
        with self.assertRaises(KeyError):
            run_suites(['nonsense'])


if __name__ == '__main__':
    unittest.main(verbosity=2)
