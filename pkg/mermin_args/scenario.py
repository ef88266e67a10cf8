"""
Generalised Mermin-type arguments: the validated (K, system, beta, N) data,
its zero-padded system, the control and cyclic-variation measurement
contexts, and the exact empirical model they give rise to.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .abelian import (
    EquationSystem,
    FiniteAbelianGroup,
    PhaseSolution,
    solve_in_torus,
    verify_phase_solution,
    is_consistent,
)
from .errors import (
    CoefficientBound,
    GcdViolation,
    InconsistentSystem,
    PhaseNotASolution,
    ShapeMismatch,
    ValidationError,
)
from .registry import converts_from_json, converts_to_json, jsonify, objectify

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MerminArgument:
    group: FiniteAbelianGroup
    system: EquationSystem
    beta: PhaseSolution
    parties: int

    def __post_init__(self):
        if self.system.group != self.group:
            raise ShapeMismatch(
                "System is over {}, argument over {}".format(self.system.group, self.group)
            )
        if self.parties < 2:
            raise ValidationError("Need at least 2 parties, got {}".format(self.parties))
        if math.gcd(self.parties, self.group.exponent) != 1:
            raise GcdViolation(
                "gcd(N={}, exp {}={}) = {}, must be 1".format(
                    self.parties,
                    self.group,
                    self.group.exponent,
                    math.gcd(self.parties, self.group.exponent),
                )
            )
        for s, row in enumerate(self.system.coefficients, start=1):
            if sum(row) > self.parties:
                raise CoefficientBound(
                    "Equation {} uses {} phases but there are only N={} parties".format(
                        s, sum(row), self.parties
                    )
                )
        if not is_consistent(self.system):
            raise InconsistentSystem(
                "The system has no solution in the phases of {}".format(self.group)
            )
        if not verify_phase_solution(self.system, self.beta):
            raise PhaseNotASolution(
                "The given phases do not solve the system for every character of {}".format(
                    self.group
                )
            )

    @property
    def equations(self):
        return self.system.equations

    @property
    def unknowns(self):
        return self.system.unknowns

    def rhs(self, s):
        """Right-hand side of padded equation s, with a^0 = 0."""
        return self.group.zero if s == 0 else self.system.rhs[s - 1]


def validate_argument(group, system, beta=None, parties=None):
    """
    Build a MerminArgument, checking every condition on the data. Without
    beta the phases are solved for.
    """
    if parties is None:
        raise ValidationError("The number of parties N is required")
    if beta is None:
        if not is_consistent(system):
            raise InconsistentSystem(
                "The system has no solution in the phases of {}".format(group)
            )
        beta = solve_in_torus(system)
    return MerminArgument(group=group, system=system, beta=beta, parties=int(parties))


@dataclass(frozen=True)
class PaddedSystem:
    coefficients: tuple
    rhs: tuple


def zero_pad(argument):
    """Prepend y_0 and the control row so that every row sums to N."""
    N, M = argument.parties, argument.unknowns
    rows = [(N,) + (0,) * M]
    rows += [(N - sum(row),) + row for row in argument.system.coefficients]
    return PaddedSystem(
        coefficients=tuple(rows),
        rhs=tuple(argument.rhs(s) for s in range(argument.equations + 1)),
    )


def measurement_choices(padded_row, parties):
    """
    Base pattern of one padded equation: the first n_0 parties choose 0, the
    next n_1 choose 1 and so on (party j counted from 0).
    """
    starts = list(itertools.accumulate(padded_row, initial=0))[:-1]
    return tuple(
        max(m for m, start in enumerate(starts) if j >= start and padded_row[m] > 0)
        for j in range(parties)
    )


@dataclass(frozen=True)
class Context:
    choices: tuple
    s: int = 0
    k: int = 0

    @property
    def is_control(self):
        return self.s == 0

    @property
    def label(self):
        if self.is_control:
            return "control"
        return "variation(s={},k={})".format(self.s, self.k)


def contexts(argument):
    """The control, then for each equation its N cyclic variations."""
    N = argument.parties
    padded = zero_pad(argument)
    result = [Context((0,) * N)]
    for s in range(1, argument.equations + 1):
        base = measurement_choices(padded.coefficients[s], N)
        for k in range(1, N + 1):
            result.append(Context(tuple(base[(j + k - 1) % N] for j in range(N)), s, k))
    return result


def context_index(argument):
    """Joint input -> first context carrying it."""
    index = {}
    for context in contexts(argument):
        index.setdefault(context.choices, context)
    return index


def context_for(argument, choices):
    return context_index(argument).get(tuple(choices))


@dataclass(frozen=True)
class EmpiricalModel:
    group: FiniteAbelianGroup
    parties: int
    contexts: tuple
    distributions: tuple = field(compare=True)

    def __len__(self):
        return len(self.contexts)

    def support(self, i):
        return frozenset(g for g, p in self.distributions[i].items() if p)

    def possibilistic(self):
        return [self.support(i) for i in range(len(self.contexts))]

    def total(self, i):
        return sum(self.distributions[i].values())

    def marginal(self, i, positions):
        result = {}
        for outcome, p in self.distributions[i].items():
            key = tuple(outcome[j] for j in positions)
            result[key] = result.get(key, 0) + p
        return result


def outcome_key(outcome):
    return tuple(g.group.index(g) for g in outcome)


def coset(group, parties, a):
    """All joint outcomes summing to a, in lexicographic order."""
    members = []
    for head in itertools.product(group.elements(), repeat=parties - 1):
        last = a
        for g in head:
            last = last - g
        members.append(head + (last,))
    members.sort(key=outcome_key)
    return members


def expected_model(argument):
    group, N = argument.group, argument.parties
    mass = Fraction(1, group.order ** (N - 1))
    cosets = {}
    distributions = []
    ctxs = contexts(argument)
    for context in ctxs:
        if context.s not in cosets:
            cosets[context.s] = coset(group, N, argument.rhs(context.s))
        distributions.append({outcome: mass for outcome in cosets[context.s]})
    logger.debug(
        "Expected model: %d contexts, support size %d", len(ctxs), group.order ** (N - 1)
    )
    return EmpiricalModel(group, N, tuple(ctxs), tuple(distributions))


def check_no_signalling(model, atol=0):
    """Marginals agree wherever two contexts share choices (exact unless atol > 0)."""
    for a, b in itertools.combinations(range(len(model.contexts)), 2):
        positions = [
            j
            for j, (x, y) in enumerate(
                zip(model.contexts[a].choices, model.contexts[b].choices)
            )
            if x == y
        ]
        if not positions:
            continue
        left, right = model.marginal(a, positions), model.marginal(b, positions)
        for key in set(left) | set(right):
            if abs(left.get(key, 0) - right.get(key, 0)) > atol:
                logger.debug(
                    "Signalling between %s and %s at parties %s",
                    model.contexts[a].label,
                    model.contexts[b].label,
                    positions,
                )
                return False
    return True


def max_deviation(model_a, model_b):
    """Largest absolute probability difference, context by context."""
    if [c.choices for c in model_a.contexts] != [c.choices for c in model_b.contexts]:
        raise ShapeMismatch("Models are over different contexts")
    worst = 0.0
    for left, right in zip(model_a.distributions, model_b.distributions):
        for key in set(left) | set(right):
            worst = max(worst, abs(float(left.get(key, 0)) - float(right.get(key, 0))))
    return worst


# JSON converters


@converts_to_json(MerminArgument)
def argument_to_json(argument):
    return {
        "group": jsonify(argument.group),
        "system": jsonify(argument.system),
        "parties": argument.parties,
        "beta": jsonify(argument.beta),
    }


@converts_from_json(MerminArgument)
def json_to_argument(data):
    for key in ("group", "system", "parties"):
        if key not in data:
            raise TypeError("Argument file lacks '{}'".format(key))
    group = objectify(FiniteAbelianGroup, data["group"])
    system = objectify(EquationSystem, data["system"], group)
    beta = data.get("beta")
    if beta is not None:
        beta = objectify(PhaseSolution, beta, group)
    return validate_argument(group, system, beta, data["parties"])


@converts_to_json(Context)
def context_to_json(context):
    return {"label": context.label, "choices": list(context.choices)}


def _probability_to_json(p):
    return jsonify(p) if isinstance(p, Fraction) else float(p)


@converts_to_json(EmpiricalModel)
def model_to_json(model):
    return {
        "group": jsonify(model.group),
        "parties": model.parties,
        "contexts": [
            dict(
                context_to_json(context),
                distribution=[
                    {
                        "outcome": [list(g.residues) for g in outcome],
                        "probability": _probability_to_json(p),
                    }
                    for outcome, p in distribution.items()
                ],
            )
            for context, distribution in zip(model.contexts, model.distributions)
        ],
    }


def model_rows(model):
    """Flat (context, label, choices, outcome, probability) rows for tables."""
    for i, (context, distribution) in enumerate(zip(model.contexts, model.distributions)):
        for outcome, p in distribution.items():
            yield (
                i,
                context.label,
                " ".join(str(m) for m in context.choices),
                " ".join(str(g) for g in outcome),
                _probability_to_json(p),
            )
