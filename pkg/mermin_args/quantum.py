"""
Dense state-vector realisation of a generalised Mermin-type argument on
|K|-dimensional qudits.

The computational basis |g> is labelled by the elements of K, the character
basis by |chi_k> = |K|^-1/2 sum_g conj(chi_k(g)) |g>. Phase gates are
diagonal in the character basis; with this convention the gate built from
the phases k -> chi_k(h) of a classical state h is the shift |g> -> |g + h>.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .abelian import PhaseSolution, embed
from .config import DEFAULT_LIMITS
from .errors import StateSpaceTooLarge
from .scenario import EmpiricalModel, contexts

logger = logging.getLogger(__name__)

# Born probabilities below this are numerical zeros
PROBABILITY_CUTOFF = 1e-12


@dataclass
class QuditState:
    group: object
    sites: int
    amplitudes: np.ndarray

    @property
    def norm(self):
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def vector(self):
        return self.amplitudes.reshape(-1)


def character_basis(group):
    """Unitary whose k-th column is the normalised character vector |chi_k>."""
    F = np.ones((1, 1), dtype=complex)
    for d in group.factor_orders:
        idx = np.arange(d)
        F = np.kron(F, np.exp(-2j * np.pi * np.outer(idx, idx) / d) / np.sqrt(d))
    return F


def ghz_state(group, N):
    if N < 2:
        raise ValueError("A GHZ state needs at least 2 sites, got {}".format(N))
    shape = (group.order,) * N
    residues = np.array([g.residues for g in group.elements()])
    support = np.ones(shape, dtype=bool)
    for f, d in enumerate(group.factor_orders):
        total = np.zeros(shape, dtype=int)
        for j in range(N):
            axis_shape = [1] * N
            axis_shape[j] = group.order
            total = total + residues[:, f].reshape(axis_shape)
        support &= total % d == 0
    amplitude = 1.0 / math.sqrt(group.order ** (N - 1))
    return QuditState(group, N, support * complex(amplitude))


def phase_gate(group, phases):
    """Unitary with eigenvalue exp(2 pi i phases[k]) on |chi_k>."""
    if len(phases) != group.order:
        raise ValueError(
            "Need one phase per character ({}), got {}".format(group.order, len(phases))
        )
    F = character_basis(group)
    diagonal = np.exp(2j * np.pi * np.array([float(p) for p in phases]))
    return F @ np.diag(diagonal) @ F.conj().T


def apply_gate(state, gate, site):
    amplitudes = np.tensordot(gate, state.amplitudes, axes=([1], [site]))
    return QuditState(state.group, state.sites, np.moveaxis(amplitudes, 0, site))


def probabilities(state):
    return np.abs(state.amplitudes) ** 2


def context_state(argument, choices, gates=None):
    """GHZ state after party j applies the phase gate of its choice m_j."""
    if gates is None:
        gates = {}
    state = ghz_state(argument.group, argument.parties)
    for j, m in enumerate(choices):
        if m not in gates:
            gates[m] = phase_gate(argument.group, argument.beta.beta(m))
        state = apply_gate(state, gates[m], j)
    return state


def _distribution(state):
    elements = state.group.elements()
    probs = probabilities(state)
    return {
        tuple(elements[i] for i in idx): float(probs[idx])
        for idx in np.ndindex(probs.shape)
        if probs[idx] > PROBABILITY_CUTOFF
    }


def simulate_context(argument, context, gates=None):
    choices = getattr(context, "choices", context)
    return _distribution(context_state(argument, choices, gates))


def _check_state_size(argument, cap):
    size = argument.group.order**argument.parties
    if size > cap:
        raise StateSpaceTooLarge(
            "{} amplitudes for {} parties over {} exceed the cap of {}".format(
                size, argument.parties, argument.group, cap
            )
        )


def simulate_model(argument, cap=None):
    cap = DEFAULT_LIMITS.state_cap if cap is None else cap
    _check_state_size(argument, cap)
    gates = {}
    ctxs = tuple(contexts(argument))
    logger.debug("Simulating %d contexts on %d qudits", len(ctxs), argument.parties)
    return EmpiricalModel(
        argument.group,
        argument.parties,
        ctxs,
        tuple(simulate_context(argument, context, gates) for context in ctxs),
    )


def context_distributions(argument, cap=None):
    """Born probabilities per distinct joint input, as flat arrays over K^N."""
    cap = DEFAULT_LIMITS.state_cap if cap is None else cap
    _check_state_size(argument, cap)
    gates = {}
    result = {}
    for context in contexts(argument):
        if context.choices not in result:
            probs = probabilities(context_state(argument, context.choices, gates)).reshape(-1)
            result[context.choices] = probs / probs.sum()
    return result


def classical_phases(group, solution):
    """Phases of the classical states b_1..b_M, as a PhaseSolution."""
    return PhaseSolution(group, tuple(embed(b) for b in solution))
