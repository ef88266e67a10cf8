import math
import unittest

from mermin_args.abelian import EquationSystem, FiniteAbelianGroup, solve_in_group
from mermin_args.contextuality import (
    Contextual,
    Local,
    avn_equations,
    avn_system,
    build_lhv,
    classify,
    find_global_section,
    hierarchy_witness,
    is_avn,
    lhv_assignment,
    lhv_predicted_model,
    reduce_avn_solution,
)
from mermin_args.errors import NotASolution, SearchSpaceTooLarge
from mermin_args.fixtures import corpus, cyclic_example, mermin, minimal_parties
from mermin_args.scenario import contexts, expected_model


def least_prime_factor(n):
    return next(p for p in range(2, n + 1) if n % p == 0)


def restricts_into_support(model, section):
    for i, context in enumerate(model.contexts):
        outcome = tuple(section[(j, m)] for j, m in enumerate(context.choices))
        if outcome not in model.support(i):
            return False
    return True


class TestClassify(unittest.TestCase):
    def test_mermin(self):
        argument = mermin()
        self.assertEqual(classify(argument), Contextual())
        self.assertIsNone(find_global_section(expected_model(argument)))
        self.assertTrue(is_avn(argument, oracle=True))

    def test_z3_is_local(self):
        argument = cyclic_example(3, 2, 4)
        self.assertEqual(classify(argument), Local((argument.group.element(2),)))

    def test_z4_is_contextual(self):
        self.assertEqual(classify(cyclic_example(4, 2, 5)), Contextual())

    def test_locality_boundary(self):
        for d in range(2, 10):
            for t in range(1, d):
                argument = cyclic_example(d, t, minimal_parties(d, t))
                local = isinstance(classify(argument), Local)
                self.assertEqual(local, math.gcd(t, d) == 1, (d, t))


class TestLhv(unittest.TestCase):
    def test_z3_model(self):
        argument = cyclic_example(3, 2, 4)
        group = argument.group
        lhv = build_lhv(argument, (group.element(2),))
        self.assertEqual(len(lhv.hidden), 27)
        self.assertEqual(lhv.weight * len(lhv.hidden), 1)
        for h in lhv.hidden:
            for j in range(4):
                self.assertEqual(lhv.respond(j, 0, h), h[j])
                self.assertEqual(lhv.respond(j, 1, h), h[j] + group.element(2))

    def test_refuses_non_solutions(self):
        argument = mermin()
        for g in argument.group.elements():
            with self.assertRaises(NotASolution):
                build_lhv(argument, (g,))

    def test_predicted_model_is_exact(self):
        checked = 0
        for d in range(2, 10):
            for t in range(1, d):
                parties = minimal_parties(d, t)
                if math.gcd(t, d) != 1 or d ** (parties - 1) > 10**4:
                    continue
                argument = cyclic_example(d, t, parties)
                lhv = build_lhv(argument, classify(argument).solution)
                ctxs = contexts(argument)
                predicted = lhv_predicted_model(lhv, ctxs)
                self.assertEqual(predicted.distributions, expected_model(argument).distributions)
                checked += 1
        self.assertGreater(checked, 10)

    def test_deterministic_branch_satisfies_avn(self):
        argument = cyclic_example(3, 2, 4)
        lhv = build_lhv(argument, classify(argument).solution)
        branch = lhv_assignment(lhv, lhv.hidden[5])
        for equation in avn_equations(argument).equations:
            total = argument.group.zero
            for v in equation.variables:
                total = total + branch[v]
            self.assertEqual(total, equation.rhs)


class TestGlobalSections(unittest.TestCase):
    def test_local_model_has_section(self):
        model = expected_model(cyclic_example(3, 2, 4))
        section = find_global_section(model)
        self.assertIsNotNone(section)
        self.assertTrue(restricts_into_support(model, section))

    def test_single_context(self):
        model = expected_model(mermin())
        model = type(model)(model.group, model.parties, model.contexts[:1], model.distributions[:1])
        self.assertTrue(restricts_into_support(model, find_global_section(model)))

    def test_cap(self):
        with self.assertRaises(SearchSpaceTooLarge):
            find_global_section(expected_model(mermin()), cap=10)

    def test_three_way_agreement(self):
        arguments = dict(corpus())
        arguments["z3_n4"] = cyclic_example(3, 2, 4)
        arguments["z5_t3_n3"] = cyclic_example(5, 3, 3)
        arguments["z4_t3_n3"] = cyclic_example(4, 3, 3)
        checked = 0
        for name, argument in arguments.items():
            size = argument.group.order ** (argument.parties * (argument.unknowns + 1))
            if size > 10**6:
                continue
            contextual = classify(argument) == Contextual()
            section = find_global_section(expected_model(argument))
            self.assertEqual(contextual, section is None, name)
            self.assertEqual(contextual, is_avn(argument, oracle=True, cap=10**6), name)
            checked += 1
        self.assertGreaterEqual(checked, 5)


class TestAvn(unittest.TestCase):
    def test_mermin_equations(self):
        theory = avn_equations(mermin())
        self.assertEqual(len(theory), 4)
        self.assertEqual(theory.equations[0].variables, ((0, 0), (1, 0), (2, 0)))
        one = mermin().group.element(1)
        for equation in theory.equations[1:]:
            self.assertEqual(equation.rhs, one)
            self.assertEqual(sorted(m for _, m in equation.variables), [0, 1, 1])

    def test_equation_count(self):
        argument = cyclic_example(4, 2, 5)
        self.assertEqual(len(avn_equations(argument)), 1 + 5 * 1)
        system, variables = avn_system(avn_equations(argument))
        self.assertEqual(system.equations, 6)
        self.assertEqual(len(variables), 5 * 2)

    def test_each_equation_is_satisfiable(self):
        for argument in corpus().values():
            system, variables = avn_system(avn_equations(argument))
            for row, rhs in zip(system.coefficients, system.rhs):
                alone = EquationSystem(argument.group, (row,), (rhs,))
                solution = solve_in_group(alone)
                self.assertIsNotNone(solution)
                self.assertEqual(len(solution), len(variables))
                total = argument.group.zero
                for n, g in zip(row, solution):
                    total = total + g * n
                self.assertEqual(total, rhs)

    def test_reduction(self):
        argument = cyclic_example(3, 2, 4)
        b = classify(argument).solution
        joint = {(j, r): ([argument.group.zero] + list(b))[r] for j in range(4) for r in range(2)}
        self.assertEqual(reduce_avn_solution(argument, joint), b)

    def test_verdicts(self):
        self.assertTrue(is_avn(cyclic_example(4, 2, 5)))
        self.assertFalse(is_avn(cyclic_example(3, 2, 4), oracle=True))

    def test_hierarchy_does_not_collapse(self):
        for n in (4, 6, 8, 9):
            witness = hierarchy_witness(n, least_prime_factor(n))
            self.assertTrue(witness.avn, n)
            coprime = [m for m in range(2, 21) if math.gcd(m, n) == 1]
            self.assertEqual(sorted(witness.solutions), coprime)
            for m, solution in witness.solutions.items():
                self.assertIsNotNone(solution, (n, m))

    def test_hierarchy_example(self):
        witness = hierarchy_witness(4, 2)
        group = FiniteAbelianGroup((3,))
        self.assertEqual(witness.solutions[3], (group.element(2),))


if __name__ == "__main__":
    unittest.main()
