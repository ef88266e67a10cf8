"""
Deciding locality of a generalised Mermin-type argument three independent
ways: solvability of its system in K, an explicit local hidden variable
model, and a search for a global section of the possibilistic model.
Contextual arguments are All-vs-Nothing; the linear equations witnessing it
are extracted here too.

Parties are numbered from 0, matching positions in a context's choices.
"""

import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

from .abelian import EquationSystem, FiniteAbelianGroup, solve_in_group
from .config import DEFAULT_LIMITS
from .errors import NotASolution, SearchSpaceTooLarge
from .fixtures import cyclic_example, minimal_parties
from .registry import converts_to_json, jsonify
from .scenario import EmpiricalModel, contexts, coset, outcome_key

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Local:
    solution: tuple


@dataclass(frozen=True)
class Contextual:
    pass


def classify(argument):
    solution = solve_in_group(argument.system)
    if solution is None:
        return Contextual()
    return Local(solution)


@dataclass(frozen=True)
class LhvModel:
    """
    Hidden values h uniform on H_0 = {sum h_j = 0}; party j answers choice m
    with h_j + b_m.
    """

    group: FiniteAbelianGroup
    parties: int
    solution: tuple
    hidden: tuple
    weight: Fraction

    def respond(self, j, m, h):
        return h[j] + self.solution[m]


def build_lhv(argument, solution):
    solution = tuple(solution)
    if not argument.system.is_solution(solution):
        raise NotASolution(
            "{} does not solve the system in {}".format(
                [str(b) for b in solution], argument.group
            )
        )
    group, N = argument.group, argument.parties
    return LhvModel(
        group=group,
        parties=N,
        solution=(group.zero,) + solution,
        hidden=tuple(coset(group, N, group.zero)),
        weight=Fraction(1, group.order ** (N - 1)),
    )


def lhv_predicted_model(lhv, ctxs):
    ctxs = tuple(ctxs)
    distributions = []
    for context in ctxs:
        counts = defaultdict(Fraction)
        for h in lhv.hidden:
            outcome = tuple(lhv.respond(j, m, h) for j, m in enumerate(context.choices))
            counts[outcome] += lhv.weight
        distributions.append(dict(sorted(counts.items(), key=lambda item: outcome_key(item[0]))))
    return EmpiricalModel(lhv.group, lhv.parties, ctxs, tuple(distributions))


def lhv_assignment(lhv, h):
    """Deterministic branch of the LHV at hidden value h."""
    return {
        (j, m): lhv.respond(j, m, h)
        for j in range(lhv.parties)
        for m in range(len(lhv.solution))
    }


def _backtrack(variables, constraints, elements):
    """
    Depth-first search over values of variables in order. A constraint is
    (positions, allowed): once every position but the last one is fixed,
    allowed(values of the others) gives the admissible values of the last.
    """
    closing = defaultdict(list)
    for positions, allowed in constraints:
        ordered = sorted(positions)
        closing[ordered[-1]].append((ordered[:-1], allowed))
    assignment = [None] * len(variables)

    def candidates(depth):
        admissible = None
        for others, allowed in closing[depth]:
            values = allowed(tuple(assignment[p] for p in others))
            admissible = set(values) if admissible is None else admissible & set(values)
        if admissible is None:
            return elements
        return [g for g in elements if g in admissible]

    def extend(depth):
        if depth == len(variables):
            return True
        for g in candidates(depth):
            assignment[depth] = g
            if extend(depth + 1):
                return True
        assignment[depth] = None
        return False

    if extend(0):
        return dict(zip(variables, assignment))
    return None


def _check_search_size(group, variables, cap):
    size = group.order ** len(variables)
    if size > cap:
        raise SearchSpaceTooLarge(
            "Search over {}^{} assignments exceeds the cap of {}".format(
                group.order, len(variables), cap
            )
        )
    logger.debug("Searching %d assignments of %d variables", size, len(variables))


def find_global_section(model, cap=None):
    """
    An assignment (party, choice) -> outcome whose restriction to every
    context is in that context's support, or None.
    """
    cap = DEFAULT_LIMITS.search_cap if cap is None else cap
    variables = sorted({(j, m) for c in model.contexts for j, m in enumerate(c.choices)})
    _check_search_size(model.group, variables, cap)
    position = {v: i for i, v in enumerate(variables)}

    constraints = []
    for i, context in enumerate(model.contexts):
        positions = [position[(j, m)] for j, m in enumerate(context.choices)]
        # index the support by everything except the party decided last
        last = positions.index(max(positions))
        order = sorted(range(len(positions)), key=lambda p: positions[p])[:-1]
        table = defaultdict(set)
        for outcome in model.support(i):
            table[tuple(outcome[p] for p in order)].add(outcome[last])
        constraints.append((positions, lambda key, table=table: table.get(key, ())))
    return _backtrack(variables, constraints, model.group.elements())


@dataclass(frozen=True)
class AvnEquation:
    """Sum of the outcomes x_(j, choice_j) over all parties equals rhs."""

    context: object
    variables: tuple
    rhs: object


@dataclass(frozen=True)
class AvnTheory:
    group: FiniteAbelianGroup
    parties: int
    choices: int
    equations: tuple

    def __len__(self):
        return len(self.equations)


def avn_equations(argument):
    equations = tuple(
        AvnEquation(
            context=context,
            variables=tuple(enumerate(context.choices)),
            rhs=argument.rhs(context.s),
        )
        for context in contexts(argument)
    )
    return AvnTheory(argument.group, argument.parties, argument.unknowns + 1, equations)


def avn_system(theory):
    """The theory as an integer system over K in the variables x_(j, r)."""
    variables = [(j, r) for j in range(theory.parties) for r in range(theory.choices)]
    position = {v: i for i, v in enumerate(variables)}
    rows = []
    for equation in theory.equations:
        row = [0] * len(variables)
        for v in equation.variables:
            row[position[v]] += 1
        rows.append(tuple(row))
    system = EquationSystem(
        theory.group, tuple(rows), tuple(e.rhs for e in theory.equations)
    )
    return system, variables


def reduce_avn_solution(argument, assignment):
    """
    Turn a joint solution of the AvN theory into a solution of the original
    system: y_r = N^-1 * sum_j x_(j, r), with N inverted modulo exp K.
    """
    inverse = pow(argument.parties, -1, argument.group.exponent)
    ys = []
    for r in range(1, argument.unknowns + 1):
        total = argument.group.zero
        for j in range(argument.parties):
            total = total + assignment[(j, r)]
        ys.append(total * inverse)
    return tuple(ys)


def _avn_oracle(theory, cap):
    variables = [(j, r) for j in range(theory.parties) for r in range(theory.choices)]
    _check_search_size(theory.group, variables, cap)
    position = {v: i for i, v in enumerate(variables)}

    def completer(rhs):
        def allowed(others):
            total = rhs
            for g in others:
                total = total - g
            return (total,)

        return allowed

    constraints = [
        ([position[v] for v in equation.variables], completer(equation.rhs))
        for equation in theory.equations
    ]
    return _backtrack(variables, constraints, theory.group.elements())


def is_avn(argument, oracle=False, cap=None):
    """
    True iff the AvN theory has no joint solution over K.

    Any joint solution reduces to a solution of the system in K (sum the N
    variations of each equation, drop the control, divide by N), and any
    solution b in K gives the joint solution x_(j, r) = b_r. So the verdict is
    decided on the system itself; the theory is also solved directly, and with
    oracle=True searched exhaustively, as cross-checks.
    """
    verdict = solve_in_group(argument.system) is None

    theory = avn_equations(argument)
    system, variables = avn_system(theory)
    joint = solve_in_group(system)
    if joint is not None:
        reduced = reduce_avn_solution(argument, dict(zip(variables, joint)))
        if not argument.system.is_solution(reduced):
            raise RuntimeError("AvN solution {} does not reduce to a solution".format(joint))
    if verdict != (joint is None):
        raise RuntimeError("Reduction and direct AvN solve disagree")

    if oracle:
        cap = DEFAULT_LIMITS.search_cap if cap is None else cap
        if verdict != (_avn_oracle(theory, cap) is None):
            raise RuntimeError("Exhaustive AvN search disagrees with the reduction")
    return verdict


@dataclass(frozen=True)
class HierarchyWitness:
    modulus: int
    coefficient: int
    avn: bool
    solutions: dict


def hierarchy_witness(n, t, moduli=range(2, 21)):
    """
    The equation t*y = 1 is AvN over Z/n yet solvable over every Z/m with m
    coprime to n whenever t is: the AvN hierarchy over modular rings does
    not collapse.
    """
    argument = cyclic_example(n, t, minimal_parties(n, t))
    solutions = {}
    for m in moduli:
        if math.gcd(m, n) != 1:
            continue
        over_m = argument.system.with_group(FiniteAbelianGroup((m,)))
        solutions[m] = solve_in_group(over_m)
    return HierarchyWitness(n, t, is_avn(argument), solutions)


# JSON converters


@converts_to_json(AvnTheory)
def theory_to_json(theory):
    return {
        "group": jsonify(theory.group),
        "parties": theory.parties,
        "equations": [
            {
                "context": equation.context.label,
                "coeffs": [
                    {"party": j, "choice": m, "coefficient": 1}
                    for j, m in equation.variables
                ],
                "rhs": list(equation.rhs.residues),
            }
            for equation in theory.equations
        ],
    }


@converts_to_json(LhvModel)
def lhv_to_json(lhv):
    return {
        "group": jsonify(lhv.group),
        "parties": lhv.parties,
        "solution": [list(b.residues) for b in lhv.solution],
        "hidden_values": len(lhv.hidden),
        "weight": str(lhv.weight),
        "rule": "party j answers choice m with h_j + solution[m]",
    }
