import unittest
from fractions import Fraction

import mermin_args as ma
from mermin_args.abelian import FiniteAbelianGroup, GroupElement, PhaseSolution


class TestRegistry(unittest.TestCase):
    def test_unknown_type(self):
        with self.assertRaises(ValueError):
            ma.jsonify(object())
        with self.assertRaises(ValueError):
            ma.objectify(complex, "1j")

    def test_empty_sequence(self):
        with self.assertRaises(ValueError):
            ma.jsonify([])

    def test_none(self):
        self.assertIsNone(ma.jsonify(None))

    def test_fractions(self):
        self.assertEqual(ma.jsonify(Fraction(3, 12)), "1/4")
        self.assertEqual(ma.jsonify(Fraction(0)), "0")
        self.assertEqual(ma.objectify(Fraction, "2/8"), Fraction(1, 4))
        self.assertEqual(ma.objectify(Fraction, 3), Fraction(3))
        with self.assertRaises(TypeError):
            ma.objectify(Fraction, 0.25)

    def test_elements(self):
        group = FiniteAbelianGroup((2, 3))
        gs = ma.objectify(GroupElement, [[1, 2], [0, 4]], group, plural=True)
        self.assertEqual(gs, (group.element(1, 2), group.element(0, 1)))
        self.assertEqual(ma.jsonify(list(gs)), [[1, 2], [0, 1]])
        self.assertEqual(ma.objectify(GroupElement, 5, FiniteAbelianGroup((3,))).residues, (2,))

    def test_groups(self):
        self.assertEqual(ma.jsonify(FiniteAbelianGroup((2, 4))), [2, 4])
        with self.assertRaises(TypeError):
            ma.objectify(FiniteAbelianGroup, 4)

    def test_phases(self):
        group = FiniteAbelianGroup((2,))
        beta = ma.objectify(PhaseSolution, [["0", "5/4"]], group)
        self.assertEqual(beta.table, ((Fraction(0), Fraction(1, 4)),))
        self.assertEqual(ma.jsonify(beta), [["0", "1/4"]])

    def test_phases_use_fraction_converters(self):
        group = FiniteAbelianGroup((4,))
        beta = PhaseSolution(group, (tuple(Fraction(k, 8) for k in range(4)),))
        self.assertEqual(ma.jsonify(beta), [[ma.jsonify(p) for p in beta.table[0]]])
        parsed = ma.objectify(PhaseSolution, [[0, 1, "1/3", 2]], group)
        self.assertEqual(parsed.table[0][2], Fraction(1, 3))
        with self.assertRaisesRegex(TypeError, "inexact phase 0.5"):
            ma.objectify(PhaseSolution, [["0", 0.5, "1/4", "3/8"]], group)


if __name__ == "__main__":
    unittest.main()
