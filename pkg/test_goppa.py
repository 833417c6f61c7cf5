#!/usr/bin/env python3
"""
Unit tests for the Goppa code construction and linear-code plumbing
"""

import unittest
from unittest import mock

import galois
import numpy as np

import goppa
from actions import poly_set, root_set
from ff_tower import ParameterError, Params, SizeGuardError, as_ints, build_tower
from goppa import (
    LinearCode, build_parity_row, cached_code, check_goppa_condition, check_r_equations,
    codewords, dual_code, evaluation_order, full_space, macwilliams_transform, min_distance,
    subfield_subcode, weight_enumerator,
)

GF2 = galois.GF(2)


class EvaluationOrderTests(unittest.TestCase):

    def test_layout(self):
        """L = (eps, ..., eps^7 = 1, 0) on GF(8)"""
        tower = build_tower(Params(2, 1, 3, 2))
        order = evaluation_order(tower)
        self.assertEqual(order.N, 8)
        self.assertEqual(order.one_position, 6)
        self.assertEqual(order.zero_position, 7)
        self.assertEqual(int(order.elements[6]), 1)
        self.assertEqual(int(order.elements[7]), 0)
        self.assertEqual(int(order.elements[0]), int(tower.fqn.primitive_elem))
        self.assertEqual(sorted(order.elements.tolist()), list(range(8)))
        np.testing.assert_array_equal(order.index[order.elements], np.arange(8))

    def test_cache_is_bounded(self):
        self.assertIsNotNone(evaluation_order.cache_info().maxsize)
        self.assertIsNotNone(cached_code.cache_info().maxsize)


class GoppaConstructionTests(unittest.TestCase):
    """The 28 codes for (q, n, r) = (2, 3, 2)"""

    @classmethod
    def setUpClass(cls):
        cls.tower = build_tower(Params(2, 1, 3, 2))
        cls.roots = root_set(cls.tower)
        cls.polys = poly_set(cls.tower, cls.roots)
        cls.codes = {alpha: cached_code(cls.tower, alpha) for alpha in cls.polys.reps}
        print(f"\n✓ Built {len(cls.codes)} Goppa codes")

    def test_parity_row(self):
        alpha = self.polys.reps[0]
        row = build_parity_row(self.tower, alpha)
        self.assertEqual(len(row.entries), 8)
        self.assertTrue(np.all(row.as_ints() != 0))
        self.assertEqual(len(set(row.as_ints().tolist())), 8)
        support = self.tower.qn_to_top(evaluation_order(self.tower).elements)
        np.testing.assert_array_equal(
            (row.entries * (self.tower.top.GF(alpha) - support)).view(np.ndarray), np.ones(8))

    def test_parity_row_rejects_subfield_element(self):
        with self.assertRaises(ParameterError):
            build_parity_row(self.tower, 1)

    def test_parameters(self):
        """[8, 2, 5] for every alpha"""
        for alpha, goppa_code in self.codes.items():
            with self.subTest(alpha=alpha):
                self.assertEqual(goppa_code.code.length, 8)
                self.assertEqual(goppa_code.code.k, 2)
                self.assertEqual(min_distance(goppa_code.code), 5)
                self.assertTrue(goppa_code.code.is_rref())

    def test_generator_rows_satisfy_both_tests(self):
        for alpha, goppa_code in self.codes.items():
            for row in goppa_code.code.generator:
                with self.subTest(alpha=alpha, row=row):
                    self.assertTrue(check_goppa_condition(self.tower, row, goppa_code.g))
                    self.assertTrue(check_r_equations(self.tower, row, alpha))

    def test_tests_agree_off_the_code(self):
        goppa_code = self.codes[self.polys.reps[3]]
        for vector in np.eye(8, dtype=np.int64):
            self.assertFalse(check_goppa_condition(self.tower, vector, goppa_code.g))
            self.assertFalse(check_r_equations(self.tower, vector, goppa_code.alpha))

    def test_conjugate_roots_give_equal_codes(self):
        alpha = self.polys.reps[5]
        conjugate = int(self.tower.conjugates(alpha)[1])
        self.assertEqual(cached_code(self.tower, conjugate).code, self.codes[alpha].code)

    def test_linearity(self):
        code = self.codes[self.polys.reps[0]].code
        rows = np.array(code.generator)
        self.assertTrue(code.contains((rows[0] + rows[1]) % 2))
        self.assertTrue(code.contains(np.zeros(8, dtype=np.int64)))
        for vector in np.eye(8, dtype=np.int64):
            self.assertFalse(code.contains(vector))

    def test_support_permutation_commutes(self):
        """Reordering the support permutes the code the same way"""
        alpha = self.polys.reps[2]
        image = np.array([3, 0, 7, 1, 6, 2, 5, 4])
        support = evaluation_order(self.tower).elements[image]
        permuted = subfield_subcode(self.tower, build_parity_row(self.tower, alpha, support))
        self.assertEqual(permuted, self.codes[alpha].code.permuted(image))

    def test_json(self):
        goppa_code = self.codes[self.polys.reps[0]]
        doc = goppa_code.to_json(self.tower, weight_enumerator(goppa_code.code))
        self.assertEqual(doc['k'], 2)
        self.assertEqual(len(doc['generator']), 16)
        self.assertEqual(len(doc['g']), 3)
        self.assertEqual(doc['weight_enumerator'][0], 1)
        self.assertEqual(sum(doc['weight_enumerator']), 4)


class QuaternaryConstructionTests(unittest.TestCase):
    """C(alpha) over F_4 for (q, n, r) = (4, 2, 2)"""

    @classmethod
    def setUpClass(cls):
        cls.tower = build_tower(Params(2, 2, 2, 2))
        cls.polys = poly_set(cls.tower, root_set(cls.tower))
        cls.codes = [cached_code(cls.tower, alpha) for alpha in cls.polys.reps[:3]]
        print(f"\n✓ Built {len(cls.codes)} codes over GF({cls.tower.params.q})")

    def test_parameters(self):
        for goppa_code in self.codes:
            code = goppa_code.code
            with self.subTest(alpha=goppa_code.alpha):
                self.assertEqual(code.q, 4)
                self.assertEqual(code.length, 16)
                self.assertGreaterEqual(code.k, 16 - 2 * 2)
                self.assertLess(code.k, 16)
                self.assertTrue(code.is_rref())

    def test_closed_under_scaling(self):
        """F_4-multiples of generator rows stay in the code"""
        GF4 = self.tower.fq.GF
        for goppa_code in self.codes:
            for row in goppa_code.code.generator:
                for scalar in (2, 3):
                    scaled = as_ints(GF4(list(row)) * GF4(scalar))
                    with self.subTest(alpha=goppa_code.alpha, scalar=scalar):
                        self.assertTrue(goppa_code.code.contains(scaled))
                        self.assertTrue(check_goppa_condition(self.tower, scaled, goppa_code.g))
                        self.assertTrue(check_r_equations(self.tower, scaled, goppa_code.alpha))


class LinearCodeTests(unittest.TestCase):
    """Duals, enumeration and weight enumerators"""

    def test_macwilliams_repetition(self):
        """Repetition [3, 1] gives the even-weight [3, 2] code"""
        self.assertEqual(macwilliams_transform([1, 0, 0, 1], 3, 2), [1, 0, 3, 0])
        repetition = LinearCode.from_matrix(GF2, [[1, 1, 1]])
        self.assertEqual(weight_enumerator(dual_code(repetition)), [1, 0, 3, 0])

    def test_full_and_zero_codes(self):
        full = full_space(GF2, 2)
        self.assertEqual(weight_enumerator(full), [1, 2, 1])
        zero = LinearCode.from_matrix(GF2, np.zeros((0, 4), dtype=np.int64), 4)
        self.assertEqual(zero.k, 0)
        self.assertIsNone(min_distance(zero))
        self.assertEqual(weight_enumerator(zero), [1, 0, 0, 0, 0])
        self.assertEqual(dual_code(zero), full_space(GF2, 4))
        self.assertEqual(dual_code(full_space(GF2, 4)).k, 0)

    def test_rref_equality_is_row_space_equality(self):
        first = LinearCode.from_matrix(GF2, [[1, 1, 0, 0], [0, 1, 1, 0]])
        second = LinearCode.from_matrix(GF2, [[1, 0, 1, 0], [1, 1, 0, 0], [0, 1, 1, 0]])
        self.assertEqual(first, second)
        self.assertEqual(hash(first), hash(second))
        self.assertEqual(first.pivots, (0, 1))

    def test_dual_of_dual(self):
        code = LinearCode.from_matrix(GF2, [[1, 0, 1, 1, 0], [0, 1, 1, 0, 1]])
        self.assertEqual(dual_code(dual_code(code)), code)
        self.assertEqual(dual_code(code).k, 3)

    def test_enumerator_by_either_side(self):
        """The enumerator via the dual matches direct enumeration"""
        code = LinearCode.from_matrix(GF2, [[1, 0, 0, 1, 1, 0], [0, 1, 0, 1, 0, 1],
                                            [0, 0, 1, 0, 1, 1], [1, 1, 1, 1, 1, 1]])
        words = codewords(code)
        direct = np.bincount(np.count_nonzero(words, axis=1), minlength=7).tolist()
        self.assertEqual(weight_enumerator(code), direct)

    def test_ternary_codewords(self):
        GF3 = galois.GF(3)
        code = LinearCode.from_matrix(GF3, [[1, 2, 0], [0, 1, 1]])
        words = codewords(code)
        self.assertEqual(words.shape, (9, 3))
        self.assertEqual(len({tuple(w) for w in words.tolist()}), 9)
        self.assertEqual(sum(weight_enumerator(code)), 9)

    def test_enumeration_guard(self):
        code = LinearCode.from_matrix(GF2, np.eye(4, dtype=np.int64))
        with mock.patch.object(goppa, 'MAX_ENUM_DIM', 2):
            with self.assertRaises(SizeGuardError):
                codewords(code)
            self.assertEqual(len(codewords(code, force=True)), 16)


if __name__ == '__main__':
    unittest.main(verbosity=2)
