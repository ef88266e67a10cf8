"""
Reference arguments: Mermin's original one and the single-equation family
t*y = 1 over Z/d.
"""

import math

from .abelian import EquationSystem, FiniteAbelianGroup
from .scenario import validate_argument


def cyclic_system(d, t):
    group = FiniteAbelianGroup((d,))
    return EquationSystem(group, ((t,),), (group.element(1),))


def mermin():
    """Z/2, 2y = 1, three parties: the phase pi/2 is a solution, no bit is."""
    return cyclic_example(2, 2, 3)


def cyclic_example(d, t, parties=None):
    """t*y = 1 over Z/d, with N = d + 1 parties unless given."""
    system = cyclic_system(d, t)
    return validate_argument(system.group, system, None, d + 1 if parties is None else parties)


def minimal_parties(d, t):
    return next(n for n in range(max(t, 2), max(t, 2) + d + 1) if math.gcd(n, d) == 1)


def corpus():
    """Named arguments shipped with the package."""
    arguments = {"mermin": mermin()}
    for d, t in ((2, 2), (3, 2), (4, 2), (6, 2), (9, 3)):
        arguments["cyclic_d{}_t{}".format(d, t)] = cyclic_example(d, t, minimal_parties(d, t))
    return arguments
