"""
Exact arithmetic in finite abelian groups K = Z/d1 x ... x Z/dn, their
characters, and Smith normal form for the integer systems solved over K and
over the torus of phases.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    CoefficientBound,
    InconsistentSystem,
    SearchSpaceTooLarge,
    ShapeMismatch,
)
from .config import DEFAULT_LIMITS
from .registry import converts_from_json, converts_to_json, jsonify, objectify

logger = logging.getLogger(__name__)

# a phase theta stands for exp(2*pi*i*theta), kept reduced into [0, 1)
RationalPhase = Fraction


def to_phase(value):
    return RationalPhase(value) % 1


@dataclass(frozen=True)
class FiniteAbelianGroup:
    factor_orders: tuple

    def __post_init__(self):
        orders = tuple(int(d) for d in self.factor_orders)
        if not orders:
            raise ValueError("A group needs at least one cyclic factor")
        if any(d < 2 for d in orders):
            raise ValueError("Cyclic factor orders must be >= 2, got {}".format(orders))
        object.__setattr__(self, "factor_orders", orders)

    @property
    def order(self):
        return math.prod(self.factor_orders)

    @property
    def exponent(self):
        return math.lcm(*self.factor_orders)

    @property
    def zero(self):
        return GroupElement(self, (0,) * len(self.factor_orders))

    def element(self, *residues):
        if len(residues) == 1 and isinstance(residues[0], (tuple, list)):
            residues = tuple(residues[0])
        if len(residues) != len(self.factor_orders):
            raise ShapeMismatch(
                "{} has {} cyclic factors, got residues {}".format(
                    self, len(self.factor_orders), residues
                )
            )
        return GroupElement(
            self, tuple(int(r) % d for r, d in zip(residues, self.factor_orders))
        )

    def elements(self):
        """All elements, lexicographic on residue tuples."""
        return [
            GroupElement(self, residues)
            for residues in itertools.product(*(range(d) for d in self.factor_orders))
        ]

    def index(self, g):
        # mixed-radix position of g in elements()
        position = 0
        for r, d in zip(g.residues, self.factor_orders):
            position = position * d + r
        return position

    def characters(self):
        return [Character(k) for k in self.elements()]

    def __str__(self):
        return "×".join("ℤ/{}".format(d) for d in self.factor_orders)


@dataclass(frozen=True)
class GroupElement:
    group: FiniteAbelianGroup
    residues: tuple

    def __post_init__(self):
        if len(self.residues) != len(self.group.factor_orders) or any(
            not 0 <= r < d for r, d in zip(self.residues, self.group.factor_orders)
        ):
            raise ShapeMismatch(
                "Residues {} do not describe an element of {}".format(
                    self.residues, self.group
                )
            )

    def __add__(self, other):
        return element_add(self, other)

    def __sub__(self, other):
        return element_sub(self, other)

    def __neg__(self):
        return element_neg(self)

    def __mul__(self, n):
        return element_scale(self, n)

    __rmul__ = __mul__

    def __bool__(self):
        return any(self.residues)

    def __str__(self):
        if len(self.residues) == 1:
            return str(self.residues[0])
        return "({})".format(",".join(str(r) for r in self.residues))


def _check_same_group(g, h):
    if g.group != h.group:
        raise ShapeMismatch(
            "Elements of {} and {} cannot be combined".format(g.group, h.group)
        )


def element_add(g, h):
    _check_same_group(g, h)
    return GroupElement(
        g.group,
        tuple((a + b) % d for a, b, d in zip(g.residues, h.residues, g.group.factor_orders)),
    )


def element_neg(g):
    return GroupElement(
        g.group, tuple(-a % d for a, d in zip(g.residues, g.group.factor_orders))
    )


def element_sub(g, h):
    return element_add(g, element_neg(h))


def element_scale(g, n):
    return GroupElement(
        g.group, tuple(n * a % d for a, d in zip(g.residues, g.group.factor_orders))
    )


def order_of(g):
    return math.lcm(
        *(d // math.gcd(a, d) for a, d in zip(g.residues, g.group.factor_orders))
    )


@dataclass(frozen=True)
class Character:
    index: GroupElement

    def __call__(self, g):
        return character_eval(self.index, g)


def character_eval(k, g):
    _check_same_group(k, g)
    return to_phase(
        sum(
            Fraction(a * b, d)
            for a, b, d in zip(k.residues, g.residues, k.group.factor_orders)
        )
    )


def embed(h):
    """Phase table k -> chi_k(h) of the classical state h, in character order."""
    return tuple(chi(h) for chi in h.group.characters())


@dataclass(frozen=True)
class EquationSystem:
    """Rows sum_r n[s][r] * y_r = rhs[s] over the group."""

    group: FiniteAbelianGroup
    coefficients: tuple
    rhs: tuple

    def __post_init__(self):
        rows = tuple(tuple(int(n) for n in row) for row in self.coefficients)
        if not rows or not rows[0]:
            raise ShapeMismatch("A system needs at least one equation and one unknown")
        if any(len(row) != len(rows[0]) for row in rows):
            raise ShapeMismatch("Coefficient rows have different lengths")
        if len(self.rhs) != len(rows):
            raise ShapeMismatch(
                "{} equations but {} right-hand sides".format(len(rows), len(self.rhs))
            )
        if any(a.group != self.group for a in self.rhs):
            raise ShapeMismatch("Right-hand sides must be elements of {}".format(self.group))
        negative = [n for row in rows for n in row if n < 0]
        if negative:
            raise CoefficientBound(
                "Coefficients must be nonnegative, got {}; reduce them modulo the "
                "exponent {} yourself if that is what you meant".format(
                    negative, self.group.exponent
                )
            )
        object.__setattr__(self, "coefficients", rows)
        object.__setattr__(self, "rhs", tuple(self.rhs))

    @property
    def equations(self):
        return len(self.coefficients)

    @property
    def unknowns(self):
        return len(self.coefficients[0])

    def matrix(self):
        return np.array(self.coefficients, dtype=object)

    def with_group(self, group):
        if len(group.factor_orders) != len(self.group.factor_orders):
            raise ShapeMismatch(
                "Cannot move a system over {} to {}".format(self.group, group)
            )
        return EquationSystem(
            group, self.coefficients, tuple(group.element(a.residues) for a in self.rhs)
        )

    def is_solution(self, ys):
        if len(ys) != self.unknowns:
            return False
        for row, a in zip(self.coefficients, self.rhs):
            total = self.group.zero
            for n, y in zip(row, ys):
                total = total + y * n
            if total != a:
                return False
        return True


@dataclass(frozen=True)
class SmithDecomposition:
    U: np.ndarray
    D: np.ndarray
    V: np.ndarray

    @property
    def diagonal(self):
        return [self.D[i, i] for i in range(min(self.D.shape))]

    @property
    def rank(self):
        return sum(1 for d in self.diagonal if d != 0)


def _min_pivot(A, t):
    best = None
    for i in range(t, A.shape[0]):
        for j in range(t, A.shape[1]):
            if A[i, j] != 0 and (best is None or abs(A[i, j]) < abs(A[best])):
                best = (i, j)
    return best


def smith_normal_form(matrix):
    """
    Compute U * matrix * V = D with U, V unimodular and d1 | d2 | ... on the
    diagonal of D, zeros last.

    Pivots are the nonzero entry of least absolute value in the remaining
    block, ties broken by (row, column), so U and V are reproducible.
    """
    A = np.array(matrix, dtype=object)
    if A.ndim != 2:
        raise ValueError("Matrix must be two dimensional, got shape {}".format(A.shape))
    rows, cols = A.shape
    # python ints throughout, numpy scalars would overflow silently
    A = np.array([[int(x) for x in row] for row in A], dtype=object).reshape(rows, cols)
    U = np.identity(rows, dtype=int).astype(object)
    V = np.identity(cols, dtype=int).astype(object)

    for t in range(min(rows, cols)):
        if _min_pivot(A, t) is None:
            break
        while True:
            i, j = _min_pivot(A, t)
            A[[t, i]] = A[[i, t]]
            U[[t, i]] = U[[i, t]]
            A[:, [t, j]] = A[:, [j, t]]
            V[:, [t, j]] = V[:, [j, t]]
            p = A[t, t]

            clean = True
            for i in range(t + 1, rows):
                q = A[i, t] // p
                if q:
                    A[i, :] = A[i, :] - q * A[t, :]
                    U[i, :] = U[i, :] - q * U[t, :]
                if A[i, t]:
                    clean = False
            for j in range(t + 1, cols):
                q = A[t, j] // p
                if q:
                    A[:, j] = A[:, j] - q * A[:, t]
                    V[:, j] = V[:, j] - q * V[:, t]
                if A[t, j]:
                    clean = False
            if not clean:
                continue

            offender = next(
                (
                    i
                    for i in range(t + 1, rows)
                    for j in range(t + 1, cols)
                    if A[i, j] % p
                ),
                None,
            )
            if offender is None:
                break
            A[t, :] = A[t, :] + A[offender, :]
            U[t, :] = U[t, :] + U[offender, :]

        if A[t, t] < 0:
            A[t, :] = -A[t, :]
            U[t, :] = -U[t, :]

    return SmithDecomposition(U=U, D=A, V=V)


def _combine(system, weights):
    total = system.group.zero
    for c, a in zip(weights, system.rhs):
        total = total + a * int(c)
    return total


def is_consistent(system):
    """
    True iff every integer relation between the rows also holds between the
    right-hand sides. The rows of U past the rank span the left kernel.
    """
    snf = smith_normal_form(system.matrix())
    for i in range(snf.rank, system.equations):
        if _combine(system, snf.U[i, :]):
            logger.debug("Left kernel vector %s breaks consistency", list(snf.U[i, :]))
            return False
    return True


def solve_in_group(system):
    """Some solution (y_1, ..., y_M) in K, or None when there is none."""
    snf = smith_normal_form(system.matrix())
    rank, diagonal = snf.rank, snf.diagonal
    per_factor = []
    for f, d in enumerate(system.group.factor_orders):
        b = snf.U.dot(np.array([a.residues[f] for a in system.rhs], dtype=object))
        z = [0] * system.unknowns
        for i in range(system.equations):
            if i < rank:
                g = math.gcd(diagonal[i], d)
                if b[i] % g:
                    logger.debug("No solution modulo %d at diagonal entry %d", d, i)
                    return None
                z[i] = (b[i] // g) * pow(diagonal[i] // g, -1, d // g) % (d // g)
            elif b[i] % d:
                logger.debug("No solution modulo %d, kernel row %d", d, i)
                return None
        per_factor.append([y % d for y in snf.V.dot(np.array(z, dtype=object))])
    ys = tuple(
        system.group.element(tuple(residues[r] for residues in per_factor))
        for r in range(system.unknowns)
    )
    assert system.is_solution(ys)
    return ys


def solve_exhaustively(system, cap=None):
    """Brute-force oracle: first solution in element-enumeration order."""
    cap = DEFAULT_LIMITS.oracle_cap if cap is None else cap
    size = system.group.order**system.unknowns
    if size > cap:
        raise SearchSpaceTooLarge(
            "Exhaustive search over {} assignments exceeds the cap of {}".format(size, cap)
        )
    for ys in itertools.product(system.group.elements(), repeat=system.unknowns):
        if system.is_solution(ys):
            return ys
    return None


@dataclass(frozen=True)
class PhaseSolution:
    """Phases beta_r(chi_k) for r = 1..M, each row indexed in character order."""

    group: FiniteAbelianGroup
    table: tuple

    def __post_init__(self):
        table = tuple(tuple(to_phase(p) for p in row) for row in self.table)
        if any(len(row) != self.group.order for row in table):
            raise ShapeMismatch(
                "Every phase row needs {} entries, one per character".format(
                    self.group.order
                )
            )
        object.__setattr__(self, "table", table)

    @property
    def unknowns(self):
        return len(self.table)

    def beta(self, m):
        """Phase row of measurement choice m; choice 0 carries the zero phase."""
        if m == 0:
            return (Fraction(0),) * self.group.order
        return self.table[m - 1]

    def phase(self, r, k):
        return self.beta(r)[self.group.index(k)]


def verify_phase_solution(system, beta):
    if beta.group != system.group or beta.unknowns != system.unknowns:
        return False
    for chi in system.group.characters():
        column = [beta.phase(r + 1, chi.index) for r in range(system.unknowns)]
        for row, a in zip(system.coefficients, system.rhs):
            lhs = sum((n * p for n, p in zip(row, column)), Fraction(0))
            if to_phase(lhs - chi(a)) != 0:
                return False
    return True


def solve_in_torus(system):
    """
    Solve the system in the phases, one character at a time: after Smith
    reduction every nonzero diagonal entry divides into an exact rational,
    and rows past the rank are satisfied by consistency.
    """
    if not is_consistent(system):
        raise InconsistentSystem(
            "The system over {} has an integer relation its right-hand sides "
            "violate, so it has no solution in the phases".format(system.group)
        )
    snf = smith_normal_form(system.matrix())
    rank, diagonal = snf.rank, snf.diagonal
    columns = []
    for chi in system.group.characters():
        c = [chi(a) for a in system.rhs]
        b = [
            sum((int(u) * x for u, x in zip(snf.U[i, :], c)), Fraction(0))
            for i in range(system.equations)
        ]
        z = [Fraction(0)] * system.unknowns
        for i in range(rank):
            z[i] = b[i] / diagonal[i]
        columns.append(
            [
                to_phase(sum((int(v) * x for v, x in zip(snf.V[r, :], z)), Fraction(0)))
                for r in range(system.unknowns)
            ]
        )
    beta = PhaseSolution(
        system.group,
        tuple(tuple(col[r] for col in columns) for r in range(system.unknowns)),
    )
    assert verify_phase_solution(system, beta)
    return beta


# JSON converters


@converts_to_json(FiniteAbelianGroup)
def group_to_json(group):
    return list(group.factor_orders)


@converts_from_json(FiniteAbelianGroup)
def json_to_group(data):
    if not isinstance(data, list):
        raise TypeError("A group is a list of cyclic factor orders, got {!r}".format(data))
    return FiniteAbelianGroup(tuple(data))


@converts_to_json(GroupElement)
def element_to_json(g):
    return list(g.residues)


@converts_to_json(GroupElement, plural=True)
def elements_to_json(gs):
    return [list(g.residues) for g in gs]


@converts_from_json(GroupElement)
def json_to_element(data, group):
    if isinstance(data, int):
        data = [data]
    return group.element(tuple(data))


@converts_from_json(GroupElement, plural=True)
def json_to_elements(data, group):
    return tuple(json_to_element(item, group) for item in data)


@converts_to_json(EquationSystem)
def system_to_json(system):
    return {
        "coefficients": [list(row) for row in system.coefficients],
        "rhs": elements_to_json(system.rhs),
    }


@converts_from_json(EquationSystem)
def json_to_system(data, group):
    return EquationSystem(
        group, tuple(data["coefficients"]), json_to_elements(data["rhs"], group)
    )


@converts_to_json(PhaseSolution)
def phases_to_json(beta):
    return [[jsonify(p) for p in row] for row in beta.table]


@converts_from_json(PhaseSolution)
def json_to_phases(data, group):
    return PhaseSolution(
        group, tuple(tuple(objectify(Fraction, p) for p in row) for row in data)
    )
