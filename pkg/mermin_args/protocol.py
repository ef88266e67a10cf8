"""
Quantum-classical secret sharing driven by a generalised Mermin-type
argument: a dealer holding the last N - N' devices shares a plaintext over K
with N' players, spends a fraction tau of the rounds testing the devices
against the promised distribution, and accepts the run when the noise
parameter stays below a threshold.

Random streams: attempt w (counting from 0, invalid attempts included) uses
numpy.random.default_rng(SeedSequence(seed, spawn_key=(w,))) and draws, in
this order, the N party inputs (party 0 first) or the context in
context-direct mode, the test coin, the device outputs, and Eve's hidden
value. The ephemeral key of share_secret uses spawn_key (0, 1).
"""

import enum
import json
import logging
import os
from abc import ABC, abstractmethod
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .abelian import GroupElement, solve_in_group
from .errors import InsufficientCoverage, NotASolution, ValidationError
from .quantum import context_distributions
from .registry import converts_from_json, converts_to_json, jsonify, objectify
from .scenario import MerminArgument, context_index, contexts, coset, outcome_key

logger = logging.getLogger(__name__)


def round_rng(seed, w):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(w,)))


class InputMode(enum.Enum):
    INDEPENDENT_UNIFORM = "independent"
    CONTEXT_DIRECT = "context"


class DeviceBackend(ABC):
    """The N measurement devices and the state they share, one round at a time."""

    kind = None

    def prepare(self, argument):
        self.argument = argument
        self.elements = argument.group.elements()
        self.shape = (argument.group.order,) * argument.parties

    @abstractmethod
    def sample(self, choices, rng):
        """Joint output for the joint input, and what Eve learns (or None)."""

    def eve_keys(self, choices, eve_info):
        """Player keys as Eve reconstructs them, or None when she cannot."""
        return None

    def _outcome(self, flat):
        return tuple(self.elements[i] for i in np.unravel_index(flat, self.shape))


class IdealQuantum(DeviceBackend):
    """GHZ state and phase gates, sampled from the simulator's Born rule."""

    kind = "ideal"

    def prepare(self, argument):
        super().prepare(argument)
        self._cdfs = {
            choices: np.cumsum(probs)
            for choices, probs in context_distributions(argument).items()
        }

    def sample(self, choices, rng):
        cdf = self._cdfs[choices]
        flat = min(int(np.searchsorted(cdf, rng.random(), side="right")), len(cdf) - 1)
        return self._outcome(flat), None


class MixedNoise(IdealQuantum):
    """Ideal with probability 1 - delta, uniform over K^N with probability delta."""

    kind = "mixed"

    def __init__(self, delta):
        if not 0 <= delta <= 1:
            raise ValueError("Noise probability must lie in [0, 1], got {}".format(delta))
        self.delta = delta

    def sample(self, choices, rng):
        if rng.random() < self.delta:
            return self._outcome(int(rng.integers(np.prod(self.shape)))), None
        return super().sample(choices, rng)


class AdversarialClassical(DeviceBackend):
    """
    Eve's perfect attack on a local argument: she draws h uniformly from
    {sum h_j = 0} and hands party j the product state |h_j>; device j shifts
    it by b_(m_j) for a classical solution b of the system.
    """

    kind = "adversarial"

    def __init__(self, solution=None):
        self.solution = solution

    def prepare(self, argument):
        super().prepare(argument)
        solution = self.solution
        if solution is None:
            solution = solve_in_group(argument.system)
        if solution is None or not argument.system.is_solution(tuple(solution)):
            raise NotASolution(
                "The classical attack needs a solution of the system in {}".format(
                    argument.group
                )
            )
        self._shifts = (argument.group.zero,) + tuple(solution)

    def sample(self, choices, rng):
        group = self.argument.group
        head = [self.elements[i] for i in rng.integers(group.order, size=len(choices) - 1)]
        last = group.zero
        for h in head:
            last = last - h
        hidden = tuple(head) + (last,)
        return self.eve_keys(choices, hidden), hidden

    def eve_keys(self, choices, eve_info):
        return tuple(h + self._shifts[m] for h, m in zip(eve_info, choices))


@dataclass(frozen=True)
class ProtocolConfig:
    argument: MerminArgument
    players: int
    test_probability: float
    rounds: int
    max_noise: float
    backend: DeviceBackend
    seed: int = 0
    input_mode: InputMode = InputMode.INDEPENDENT_UNIFORM

    def __post_init__(self):
        N = self.argument.parties
        if not 2 <= self.players < N:
            raise ValidationError(
                "Need 2 <= players < N={}, got {} players".format(N, self.players)
            )
        if not 0 < self.test_probability < 1:
            raise ValidationError(
                "Test probability must lie in (0, 1), got {}".format(self.test_probability)
            )
        if self.rounds < 1:
            raise ValidationError("Need at least one valid round, got {}".format(self.rounds))
        if not 0 <= self.max_noise <= 1:
            raise ValidationError(
                "Noise threshold must lie in [0, 1], got {}".format(self.max_noise)
            )


@dataclass(frozen=True)
class RoundRecord:
    attempt: int
    choices: tuple
    s: int
    test: bool
    outcomes: tuple
    ciphertext: object = None


@dataclass(frozen=True)
class ProtocolReport:
    counts: dict
    epsilon: Fraction
    success: bool
    coverage_complete: bool
    sent: tuple
    decoded: tuple
    decode_success_fraction: float
    eve_success_fraction: float
    off_support_fraction: float
    valid_rounds: int
    invalid_rounds: int
    test_rounds: int
    secret_rounds: int
    context_counts: dict
    trace: tuple = field(default=(), repr=False)

    @property
    def test_fraction(self):
        return self.test_rounds / self.valid_rounds


def encode_round(plaintext, dealer_outcomes):
    c = plaintext
    for g in dealer_outcomes:
        c = c + g
    return c


def decode_round(ciphertext, keys, a):
    p = ciphertext
    for g in keys:
        p = p + g
    return p - a


def promised_distribution(argument, choices):
    context = context_index(argument).get(tuple(choices))
    if context is None:
        return None
    group, N = argument.group, argument.parties
    mass = Fraction(1, group.order ** (N - 1))
    return {outcome: mass for outcome in coset(group, N, argument.rhs(context.s))}


def noise_parameter(counts, argument):
    """
    1 - |K|^(N-1) * the least observed conditional probability on the
    promised support, over every joint input of the argument.
    """
    group, N = argument.group, argument.parties
    cosets = {}
    smallest = None
    for choices, context in context_index(argument).items():
        tally = counts.get(choices, {})
        total = sum(tally.values())
        if not total:
            raise InsufficientCoverage(
                "Context {} {} was never tested".format(context.label, list(choices))
            )
        if context.s not in cosets:
            cosets[context.s] = coset(group, N, argument.rhs(context.s))
        for outcome in cosets[context.s]:
            p = Fraction(tally.get(outcome, 0), total)
            if smallest is None or p < smallest:
                smallest = p
    return 1 - group.order ** (N - 1) * smallest


def run_protocol(config, plaintext, keep_trace=False):
    argument, backend = config.argument, config.backend
    group, N, M = argument.group, argument.parties, argument.unknowns
    backend.prepare(argument)
    index = context_index(argument)
    ctxs = contexts(argument)
    plaintext = list(plaintext)

    counts = {}
    context_counts = Counter()
    trace = []
    sent, decoded = [], []
    eve_hits = off_support = 0
    valid = invalid = tests = 0
    attempt = 0

    while valid < config.rounds:
        rng = round_rng(config.seed, attempt)
        attempt += 1
        if config.input_mode is InputMode.CONTEXT_DIRECT:
            choices = ctxs[int(rng.integers(len(ctxs)))].choices
        else:
            choices = tuple(int(m) for m in rng.integers(0, M + 1, size=N))
        context = index.get(choices)
        if context is None:
            invalid += 1
            continue
        valid += 1
        context_counts[context.label] += 1
        a = argument.rhs(context.s)

        test = rng.random() < config.test_probability
        outcomes, eve_info = backend.sample(choices, rng)
        if test:
            tests += 1
            counts.setdefault(choices, Counter())[outcomes] += 1
            if encode_round(group.zero, outcomes) != a:
                off_support += 1
            ciphertext = None
        else:
            p = plaintext[len(sent)] if len(sent) < len(plaintext) else group.zero
            ciphertext = encode_round(p, outcomes[config.players :])
            sent.append(p)
            decoded.append(decode_round(ciphertext, outcomes[: config.players], a))
            keys = backend.eve_keys(choices, eve_info) if eve_info is not None else None
            if keys is not None:
                guess = decode_round(ciphertext, keys[: config.players], a)
            else:
                guess = ciphertext - a
            eve_hits += guess == p
        if keep_trace:
            trace.append(RoundRecord(attempt - 1, choices, context.s, test, outcomes, ciphertext))

    try:
        epsilon = noise_parameter(counts, argument)
        coverage = True
    except InsufficientCoverage as err:
        logger.warning("%s; reporting noise parameter 1", err)
        epsilon, coverage = Fraction(1), False

    secrets = len(sent)
    report = ProtocolReport(
        counts=counts,
        epsilon=epsilon,
        success=coverage and epsilon <= config.max_noise,
        coverage_complete=coverage,
        sent=tuple(sent),
        decoded=tuple(decoded),
        decode_success_fraction=(
            sum(p == q for p, q in zip(sent, decoded)) / secrets if secrets else 1.0
        ),
        eve_success_fraction=eve_hits / secrets if secrets else 0.0,
        off_support_fraction=off_support / tests if tests else 0.0,
        valid_rounds=valid,
        invalid_rounds=invalid,
        test_rounds=tests,
        secret_rounds=secrets,
        context_counts=dict(context_counts),
        trace=tuple(trace),
    )
    logger.info(
        "%d valid rounds (%d invalid), %d test, epsilon %.4f, %s",
        valid,
        invalid,
        tests,
        float(epsilon),
        "accepted" if report.success else "rejected",
    )
    return report


def seal_secret(secret, rng):
    """One-time pad over K: returns (plaintext, ephemeral key)."""
    secret = list(secret)
    if not secret:
        return (), ()
    group = secret[0].group
    elements = group.elements()
    key = tuple(elements[i] for i in rng.integers(group.order, size=len(secret)))
    return tuple(q + k for q, k in zip(secret, key)), key


def unseal_secret(plaintext, key):
    return tuple(p - k for p, k in zip(plaintext, key))


def share_secret(config, secret, keep_trace=False):
    """
    Seal the secret, run the protocol on the plaintext, and release the
    ephemeral key only if the run is accepted. Returns (report, recovered
    secret or None). The secret is withheld as well when too few secret
    rounds ran to carry all of it.
    """
    rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(0, 1)))
    plaintext, key = seal_secret(secret, rng)
    report = run_protocol(config, plaintext, keep_trace)
    if not report.success:
        return report, None
    if report.secret_rounds < len(key):
        logger.warning(
            "Only %d secret rounds for a secret of length %d; withholding the key",
            report.secret_rounds,
            len(key),
        )
        return report, None
    return report, unseal_secret(report.decoded[: len(key)], key)


# JSON converters


@converts_from_json(DeviceBackend)
def json_to_backend(data, group):
    kind = data.get("kind", "ideal")
    if kind == "ideal":
        return IdealQuantum()
    if kind == "mixed":
        return MixedNoise(float(data["delta"]))
    if kind == "adversarial":
        solution = data.get("solution")
        if solution is not None:
            solution = objectify(GroupElement, solution, group, plural=True)
        return AdversarialClassical(solution)
    raise ValueError(
        "Unknown backend kind {!r} - only supports ideal, mixed, adversarial".format(kind)
    )


@converts_to_json(IdealQuantum)
def ideal_to_json(backend):
    return {"kind": backend.kind}


@converts_to_json(MixedNoise)
def mixed_to_json(backend):
    return {"kind": backend.kind, "delta": backend.delta}


@converts_to_json(AdversarialClassical)
def adversarial_to_json(backend):
    data = {"kind": backend.kind}
    if backend.solution is not None:
        data["solution"] = [list(b.residues) for b in backend.solution]
    return data


@converts_from_json(ProtocolConfig)
def json_to_config(data, base_dir="."):
    source = data["argument"]
    if isinstance(source, str):
        with open(os.path.join(base_dir, source)) as argument_file:
            source = json.load(argument_file)
    argument = objectify(MerminArgument, source)
    return ProtocolConfig(
        argument=argument,
        players=int(data["players"]),
        test_probability=float(data["test_probability"]),
        rounds=int(data["rounds"]),
        max_noise=float(data["max_noise"]),
        backend=objectify(DeviceBackend, data.get("backend", {}), argument.group),
        seed=int(data.get("seed", 0)),
        input_mode=InputMode(data.get("input_mode", "independent")),
    )


@converts_to_json(ProtocolConfig)
def config_to_json(config):
    return {
        "argument": jsonify(config.argument),
        "players": config.players,
        "test_probability": config.test_probability,
        "rounds": config.rounds,
        "max_noise": config.max_noise,
        "backend": jsonify(config.backend),
        "seed": config.seed,
        "input_mode": config.input_mode.value,
    }


def _residues(gs):
    return [list(g.residues) for g in gs]


@converts_to_json(ProtocolReport)
def report_to_json(report, include_trace=False):
    data = {
        "epsilon": str(report.epsilon),
        "epsilon_float": float(report.epsilon),
        "success": report.success,
        "coverage_complete": report.coverage_complete,
        "rounds": {
            "valid": report.valid_rounds,
            "invalid": report.invalid_rounds,
            "test": report.test_rounds,
            "secret": report.secret_rounds,
        },
        "decode_success_fraction": report.decode_success_fraction,
        "eve_success_fraction": report.eve_success_fraction,
        "off_support_fraction": report.off_support_fraction,
        "context_counts": dict(sorted(report.context_counts.items())),
        "counts": [
            {
                "choices": list(choices),
                "outcomes": [
                    {"outcome": _residues(outcome), "count": tally[outcome]}
                    for outcome in sorted(tally, key=outcome_key)
                ],
            }
            for choices, tally in sorted(report.counts.items())
        ],
        "sent": _residues(report.sent),
        "decoded": _residues(report.decoded),
    }
    if include_trace:
        data["trace"] = [
            {
                "attempt": r.attempt,
                "choices": list(r.choices),
                "s": r.s,
                "kind": "test" if r.test else "secret",
                "outcomes": _residues(r.outcomes),
                "ciphertext": None if r.ciphertext is None else list(r.ciphertext.residues),
            }
            for r in report.trace
        ]
    return data


def summarize(report):
    """Human-readable table of a report."""
    rows = [
        ("valid rounds", report.valid_rounds),
        ("invalid rounds", report.invalid_rounds),
        ("test rounds", "{} ({:.4f})".format(report.test_rounds, report.test_fraction)),
        ("secret rounds", report.secret_rounds),
        ("noise parameter", "{:.6f}".format(float(report.epsilon))),
        ("off-support tests", "{:.6f}".format(report.off_support_fraction)),
        ("accepted", "yes" if report.success else "no"),
        ("decoded correctly", "{:.4f}".format(report.decode_success_fraction)),
        ("Eve's correct guesses", "{:.4f}".format(report.eve_success_fraction)),
    ]
    width = max(len(name) for name, _ in rows)
    return "\n".join("{}  {}".format(name.ljust(width), value) for name, value in rows)
