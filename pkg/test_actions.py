#!/usr/bin/env python3
"""
Unit tests for the semiaffine actions on roots and polynomials, and the
orbits they produce.
"""

import itertools
import unittest

import galois
import numpy as np

from actions import (
    GROUP_T, SemiaffineMap, act_on_poly, act_on_root, compose_maps,
    correspondence_check, group_generators, group_order_T, inverse_map, orbit_report,
    orbit_stabilizer_sizes, orbit_table, orbits_by_full_group, orbits_on_P, orbits_on_S,
    poly_set, root_of, root_set,
)
from ff_tower import ParameterError, Params, build_tower
from perms import FieldGroup


class SemiaffineMapTests(unittest.TestCase):
    """Composition, inverses and the action laws"""

    @classmethod
    def setUpClass(cls):
        cls.tower = build_tower(Params(2, 1, 3, 2))
        cls.roots = root_set(cls.tower)
        cls.sample_maps = [
            SemiaffineMap.create(cls.tower, 3, 5, 0),
            SemiaffineMap.create(cls.tower, 6, 1, 2),
            SemiaffineMap.create(cls.tower, 1, 7, 5),
            SemiaffineMap.create(cls.tower, 2, 0, 3),
        ]

    def test_create_validates(self):
        with self.assertRaises(ParameterError):
            SemiaffineMap.create(self.tower, 0, 1)
        with self.assertRaises(ParameterError):
            SemiaffineMap.create(self.tower, 8, 0)
        with self.assertRaises(ParameterError):
            SemiaffineMap.create(self.tower, 1, 0, on='columns')
        self.assertEqual(SemiaffineMap.create(self.tower, 1, 0, 7).frob_exp, 1)
        self.assertEqual(SemiaffineMap.create(self.tower, 1, 0, 7, on='field').frob_exp, 1)
        self.assertEqual(SemiaffineMap.create(self.tower, 1, 0, 4, on='field').frob_exp, 1)

    def test_inverse(self):
        identity = SemiaffineMap.identity(self.tower)
        for psi in self.sample_maps:
            with self.subTest(psi=psi):
                self.assertEqual(compose_maps(self.tower, psi, inverse_map(self.tower, psi)), identity)
                self.assertEqual(compose_maps(self.tower, inverse_map(self.tower, psi), psi), identity)

    def test_action_law_on_roots(self):
        """(a ∘ b)(alpha) = a(b(alpha))"""
        alphas = self.roots.roots[:10]
        for a, b in itertools.product(self.sample_maps, repeat=2):
            composed = act_on_root(self.tower, compose_maps(self.tower, a, b), alphas)
            stepwise = act_on_root(self.tower, a, act_on_root(self.tower, b, alphas))
            np.testing.assert_array_equal(composed.view(np.ndarray), stepwise.view(np.ndarray))

    def test_action_law_on_field(self):
        everything = self.tower.fqn.elements()
        group = FieldGroup.of_tower(self.tower)
        maps = [psi.on_field(self.tower) for psi in self.sample_maps]
        for a, b in itertools.product(maps, repeat=2):
            composed = group.evaluate(compose_maps(self.tower, a, b), everything)
            stepwise = group.evaluate(a, group.evaluate(b, everything))
            np.testing.assert_array_equal(composed.view(np.ndarray), stepwise.view(np.ndarray))

    def test_roots_keep_their_degree(self):
        for tau in list(group_generators(self.tower).values()) + self.sample_maps:
            images = act_on_root(self.tower, tau, self.roots.roots)
            for beta in images:
                self.assertIn(int(beta), self.roots)

    def test_compose_rejects_mixed_periods(self):
        with self.assertRaises(ParameterError):
            compose_maps(self.tower, self.sample_maps[0], self.sample_maps[0].on_field(self.tower))


class PolynomialActionTests(unittest.TestCase):
    """g -> g^psi by roots and by coefficients"""

    @classmethod
    def setUpClass(cls):
        cls.tower = build_tower(Params(2, 1, 3, 2))
        cls.polys = poly_set(cls.tower, root_set(cls.tower))

    def test_routes_agree(self):
        maps = list(group_generators(self.tower, on='field').values())
        maps.append(SemiaffineMap.create(self.tower, 5, 3, 2, on='field'))
        for g in self.polys.polys:
            for psi in maps:
                with self.subTest(g=str(g), psi=psi):
                    by_roots = act_on_poly(self.tower, psi, g, method='roots')
                    by_coefficients = act_on_poly(self.tower, psi, g, method='coefficients')
                    self.assertEqual(by_roots, by_coefficients)

    def test_shift_substitutes(self):
        """x -> x + b sends g(x) to g(x + b)"""
        F = self.tower.fqn.GF
        b = 3
        psi = SemiaffineMap.create(self.tower, 1, b, 0, on='field')
        for g in self.polys.polys[:6]:
            expected = galois.Poly.Zero(F)
            power = galois.Poly.One(F)
            for coefficient in g.coeffs[::-1]:
                expected = expected + galois.Poly(F([int(coefficient)])) * power
                power = power * galois.Poly(F([1, b]))
            self.assertEqual(act_on_poly(self.tower, psi, g), expected)

    def test_identity_fixes_every_polynomial(self):
        identity = SemiaffineMap.identity(self.tower, on='field')
        for g in self.polys.polys:
            self.assertEqual(act_on_poly(self.tower, identity, g, method='coefficients'), g)

    def test_root_of_is_dlog_minimal(self):
        for alpha, g in zip(self.polys.reps, self.polys.polys):
            self.assertEqual(int(root_of(self.tower, g)), alpha)
            self.assertEqual(self.polys.lookup(g), self.polys.reps.index(alpha))

    def test_unknown_method(self):
        psi = SemiaffineMap.identity(self.tower, on='field')
        with self.assertRaises(ParameterError):
            act_on_poly(self.tower, psi, self.polys.polys[0], method='matrix')


class OrbitTests(unittest.TestCase):
    """Orbits on S and P for the shipped parameter sets"""

    PARAMS = [(2, 1, 3, 2), (2, 1, 2, 2), (3, 1, 2, 2)]

    @classmethod
    def setUpClass(cls):
        cls.cases = {}
        for params in cls.PARAMS:
            tower = build_tower(Params(*params))
            roots = root_set(tower)
            polys = poly_set(tower, roots)
            cls.cases[params] = (tower, roots, polys, orbits_on_S(tower, roots), orbits_on_P(tower, polys))
        print(f"\n✓ Computed orbits for {len(cls.cases)} parameter sets")

    def test_orbits_partition_S(self):
        for params, (tower, roots, _, orbits, _) in self.cases.items():
            with self.subTest(params=params):
                members = [a for orbit in orbits for a in orbit.members]
                self.assertEqual(len(members), len(set(members)))
                self.assertEqual(set(members), set(roots))

    def test_orbit_sizes_divide_group_order(self):
        for params, (tower, _, _, orbits, _) in self.cases.items():
            order = group_order_T(tower)
            for orbit, stabilizer in zip(orbits, orbit_stabilizer_sizes(tower, orbits)):
                with self.subTest(params=params, rep=orbit.rep):
                    self.assertEqual(order % orbit.size, 0)
                    self.assertEqual(orbit.size * stabilizer, order)

    def test_S_and_P_orbits_correspond(self):
        for params, (_, _, polys, orbits_S, orbits_P) in self.cases.items():
            with self.subTest(params=params):
                self.assertEqual(len(orbits_S), len(orbits_P))
                self.assertTrue(correspondence_check(orbits_S, orbits_P, polys))

    def test_root_and_coefficient_orbits_on_P_agree(self):
        tower, _, polys, _, orbits_P = self.cases[(2, 1, 3, 2)]
        by_roots = orbits_on_P(tower, polys, method='roots')
        self.assertEqual(sorted(o.members for o in by_roots), sorted(o.members for o in orbits_P))

    def test_closure_matches_full_group(self):
        for params, (tower, roots, _, orbits, _) in self.cases.items():
            with self.subTest(params=params):
                full = orbits_by_full_group(tower, roots)
                self.assertEqual(sorted(o.members for o in full), sorted(o.members for o in orbits))

    def test_report_and_table(self):
        tower, _, polys, orbits_S, orbits_P = self.cases[(2, 1, 3, 2)]
        report = orbit_report(tower, orbits_S)
        self.assertEqual(report['set'], 'S')
        self.assertEqual(report['orbit_count'], len(orbits_S))
        self.assertEqual(sum(o['size'] for o in report['orbits']), 56)
        p_report = orbit_report(tower, orbits_P, polys)
        self.assertEqual(len(p_report['orbits'][0]['rep']), 3)
        table = orbit_table(tower, orbits_S)
        self.assertEqual(list(table.columns), ['set', 'group', 'rep', 'size', 'stabilizer'])
        self.assertTrue((table['group'] == GROUP_T).all())


if __name__ == '__main__':
    unittest.main(verbosity=2)
