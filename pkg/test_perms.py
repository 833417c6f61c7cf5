#!/usr/bin/env python3
"""
Unit tests for column permutations, FG membership, rho and the AGL embedding
"""

import itertools
import unittest

import numpy as np

import perms
from actions import group_generators, poly_set, root_set
from ff_tower import (
    IncompatibleQuadrupleError, ParameterError, Params, SizeGuardError, build_tower,
)
from goppa import cached_code
from perms import (
    ColumnPerm, FieldGroup, affine_embed, all_permutations, build_rho, compatible_quadruples,
    conjugation_check, cycle_type_str, exhaustive_row_matches, fg_in_alternating,
    membership_in_FG, parity_table, perm_of_semiaffine, rho_map, rho_target, sign,
    transvection_perm,
)


class ColumnPermTests(unittest.TestCase):

    def test_identity(self):
        pi = ColumnPerm.identity(5)
        self.assertTrue(pi.is_identity())
        self.assertEqual(pi.fixed_points(), [0, 1, 2, 3, 4])
        self.assertEqual(pi.sign(), 1)

    def test_gather_convention(self):
        pi = ColumnPerm.from_array([2, 0, 1])
        np.testing.assert_array_equal(pi.apply([10, 20, 30]), [30, 10, 20])
        self.assertEqual(pi.to_json(), [3, 1, 2])

    def test_compose_and_inverse(self):
        a = ColumnPerm.from_array([1, 2, 0, 3])
        b = ColumnPerm.from_array([3, 1, 0, 2])
        self.assertEqual(a.compose(b).image, tuple(a(b(c)) for c in range(4)))
        self.assertTrue(a.compose(a.inverse()).is_identity())
        # gathering twice composes in this order
        v = np.array([5, 6, 7, 8])
        np.testing.assert_array_equal(b.apply(a.apply(v)), a.compose(b).apply(v))

    def test_rejects_non_permutations(self):
        with self.assertRaises(ParameterError):
            ColumnPerm.from_array([0, 0, 1])
        with self.assertRaises(ParameterError):
            ColumnPerm.from_array([1, 2, 3])

    def test_sign_and_cycle_type(self):
        transposition = ColumnPerm.from_array([1, 0, 2, 3])
        three_cycle = ColumnPerm.from_array([1, 2, 0, 3])
        self.assertEqual(sign(transposition), -1)
        self.assertEqual(sign(three_cycle), 1)
        self.assertEqual(transposition.cycle_type(), (2, 1, 1))
        self.assertEqual(cycle_type_str((3, 3, 1, 1)), '3^2 1^2')

    def test_sign_is_a_homomorphism(self):
        rng = np.random.default_rng(11)
        for N in (2, 5, 9, 16):
            for _ in range(25):
                a = ColumnPerm.from_array(rng.permutation(N))
                b = ColumnPerm.from_array(rng.permutation(N))
                with self.subTest(N=N, a=a.image, b=b.image):
                    self.assertEqual(a.compose(b).sign(), a.sign() * b.sign())
                    self.assertEqual(a.inverse().sign(), a.sign())


class FieldGroupTests(unittest.TestCase):
    """AΓL(1,8) acting on the eight columns"""

    @classmethod
    def setUpClass(cls):
        cls.group = FieldGroup.of_field(2, 3)
        cls.elements = list(cls.group.elements())

    def test_size(self):
        self.assertEqual(self.group.size, 168)
        self.assertEqual(len(self.elements), 168)

    def test_translation_has_no_fixed_points(self):
        tau = self.group.generators()['tau']
        self.assertEqual(perm_of_semiaffine(self.group, tau).fixed_points(), [])

    def test_mu_is_a_shift_of_the_exponents(self):
        mu = perm_of_semiaffine(self.group, self.group.generators()['mu'])
        self.assertEqual(mu.image, (1, 2, 3, 4, 5, 6, 0, 7))

    def test_homomorphism(self):
        generators = list(self.group.generators().values())
        for g1, g2 in itertools.product(generators, repeat=2):
            composed = perm_of_semiaffine(self.group, self.group.compose(g1, g2))
            product = perm_of_semiaffine(self.group, g1).compose(perm_of_semiaffine(self.group, g2))
            self.assertEqual(composed, product)

    def test_membership_round_trip(self):
        for psi in self.elements:
            with self.subTest(psi=psi):
                decoded = membership_in_FG(self.group, perm_of_semiaffine(self.group, psi))
                self.assertIsNotNone(decoded)
                self.assertEqual(decoded.as_map(self.group), psi)
                self.assertEqual(decoded.in_F, psi.frob_exp == 0)

    def test_transposition_is_not_a_member(self):
        self.assertIsNone(membership_in_FG(self.group, ColumnPerm.from_array([1, 0, 2, 3, 4, 5, 6, 7])))
        self.assertIsNone(membership_in_FG(self.group, ColumnPerm.identity(4)))

    def test_faithful_on_sixteen_points(self):
        """Distinct maps give distinct column permutations on GF(16)"""
        for q, n in [(2, 4), (4, 2)]:
            group = FieldGroup.of_field(q, n)
            with self.subTest(q=q, n=n):
                images = {perm_of_semiaffine(group, psi) for psi in group.elements()}
                self.assertEqual(len(images), group.size)
                self.assertEqual(group.size, 16 * 15 * n)

    def test_group_caches_are_bounded(self):
        self.assertIsNotNone(perms._group_of_tower.cache_info().maxsize)
        self.assertIsNotNone(perms._group_of_field.cache_info().maxsize)

    def test_parity(self):
        self.assertTrue(fg_in_alternating(2, 3))
        self.assertTrue(fg_in_alternating(4, 2))
        self.assertFalse(fg_in_alternating(2, 2))
        self.assertFalse(fg_in_alternating(3, 2))
        table = parity_table([(2, 3), (3, 2)])
        self.assertEqual(len(table), 6)
        self.assertEqual(set(table.loc[table['q'] == 2, 'sign']), {1})

    def test_affine_embedding(self):
        reps = {psi: affine_embed(self.group, psi) for psi in self.elements}
        for psi, rep in reps.items():
            self.assertEqual(rep.is_translation(), psi.scale == 1 and psi.frob_exp == 0)
        g1, g2 = self.elements[17], self.elements[101]
        self.assertEqual(affine_embed(self.group, self.group.compose(g1, g2)),
                         reps[g1].compose(reps[g2]))

    def test_transvection(self):
        group = FieldGroup.of_field(2, 4)
        pi = transvection_perm(group, 1, [0, 1, 0, 0])
        self.assertEqual(pi.cycle_type().count(2), 4)
        self.assertEqual(pi.sign(), 1)
        with self.assertRaises(ParameterError):
            transvection_perm(group, 1, [1, 0, 0, 0])
        with self.assertRaises(ParameterError):
            transvection_perm(FieldGroup.of_field(3, 2), 1, [0, 1])


class RhoTests(unittest.TestCase):
    """rho carries C(alpha) onto C(beta)"""

    @classmethod
    def setUpClass(cls):
        cls.tower = build_tower(Params(2, 1, 3, 2))
        cls.roots = root_set(cls.tower)
        cls.group = FieldGroup.of_tower(cls.tower)
        cls.alpha = int(cls.roots.roots[0])

    def _check(self, zeta, j, beta):
        rho = build_rho(self.tower, zeta, j, self.alpha, beta)
        code_alpha = cached_code(self.tower, self.alpha).code
        self.assertEqual(code_alpha.permuted(rho.image), cached_code(self.tower, beta).code)
        return rho

    def test_frobenius_case(self):
        top = self.tower.top.GF
        beta = int(self.tower.frobenius(top(self.alpha), 5))
        rho = self._check(1, 1, beta)
        self.assertFalse(membership_in_FG(self.group, rho).in_F)

    def test_shift_case(self):
        beta = int(self.tower.top.GF(self.alpha) + self.tower.top.GF(1))
        psi, v = rho_map(self.tower, 1, 0, self.alpha, beta)
        self.assertEqual(psi.shift, 1)
        self.assertEqual(v, 7)
        rho = self._check(1, 0, beta)
        self.assertTrue(membership_in_FG(self.group, rho).in_F)

    def test_scale_case(self):
        zeta = int(self.tower.fqn.primitive_elem)
        beta = int(self.tower.qn_to_top(zeta) * self.tower.top.GF(self.alpha))
        psi, v = rho_map(self.tower, zeta, 0, self.alpha, beta)
        self.assertEqual(psi.shift, 0)
        self.assertEqual(v, float('-inf'))
        self._check(zeta, 0, beta)

    def test_incompatible_quadruple(self):
        beta = next(int(b) for b in self.roots.roots
                    if not self.tower.qn_to_top.contains(
                        self.tower.top.GF(self.alpha) - self.tower.top.GF(int(b))))
        with self.assertRaises(IncompatibleQuadrupleError):
            build_rho(self.tower, 1, 0, self.alpha, beta)
        self.assertNotIn((1, 0), compatible_quadruples(self.tower, self.alpha, beta))

    def test_compatible_quadruples_are_buildable(self):
        beta = int(self.roots.roots[9])
        for zeta, j in compatible_quadruples(self.tower, self.alpha, beta)[:5]:
            self._check(zeta, j, beta)

    def test_exhaustive_scan_finds_rho(self):
        beta = int(self.tower.top.GF(self.alpha) + self.tower.top.GF(1))
        row = cached_code(self.tower, self.alpha).row.as_ints()
        target = rho_target(self.tower, 1, 0, beta).view(np.ndarray)
        matches = exhaustive_row_matches(row, target, workers=2)
        self.assertEqual(matches, [build_rho(self.tower, 1, 0, self.alpha, beta)])

    def test_conjugation(self):
        polys = poly_set(self.tower, self.roots)
        generators = list(group_generators(self.tower, on='field').values())
        for g in polys.polys:
            for psi in generators:
                with self.subTest(g=str(g), psi=psi):
                    self.assertTrue(conjugation_check(self.tower, psi, g))

    def test_conjugation_over_the_whole_group(self):
        polys = poly_set(self.tower, self.roots)
        for g in polys.polys[::4]:
            for psi in self.group.elements():
                self.assertTrue(conjugation_check(self.tower, psi, g), f"{psi} on {g}")


class ExhaustiveScanTests(unittest.TestCase):

    def test_small_scan(self):
        matches = exhaustive_row_matches([1, 2, 3, 4], [3, 1, 4, 2])
        self.assertEqual([m.image for m in matches], [(2, 0, 3, 1)])
        self.assertEqual(exhaustive_row_matches([1, 1, 2], [1, 1, 2]),
                         [ColumnPerm((0, 1, 2)), ColumnPerm((1, 0, 2))])

    def test_guard(self):
        self.assertEqual(all_permutations(4).shape, (24, 4))
        with self.assertRaises(SizeGuardError):
            all_permutations(9)


if __name__ == '__main__':
    unittest.main(verbosity=2)
