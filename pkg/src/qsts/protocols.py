"""Protocol runners: joint states, measurements, corrections, branch records.

Two base protocols are implemented, plus their many-party extensions:

* ``run_protocol1`` — the input qubit is shared over a three-party GHZ-type
  channel of weight n; Alice measures her two qubits in the weight-m Bell
  family, the helper X-measures, the receiver applies a Pauli correction.
* ``run_protocol2`` — two Bell-type channels of weights n1 (to Bob) and n2
  (to Charlie); Alice measures her three qubits in the weight-m GHZ family.

Every runner enumerates all branches exactly (no sampling), recording per
branch the outcome labels, joint probability, the receiver's corrected state
and its fidelity with the input.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from functools import reduce
from operator import mul
from typing import Mapping, Sequence

import numpy as np

from .bases import (
    channel_bell,
    channel_ghz,
    generalized_bell_basis,
    generalized_ghz_basis,
    generalized_pair_basis,
    pair_anchors,
    x_basis,
)
from .measurement import MeasurementOutcome, measure
from .states import (
    IDENTITY,
    SIGMA_X,
    SIGMA_X_SIGMA_Z,
    SIGMA_Z,
    SIGMA_Z_SIGMA_X,
    ZERO_NORM_THRESHOLD,
    InputQubit,
    PureState,
    SingleQubitUnitary,
    apply_unitary,
    fidelity,
    tensor,
)

#: Branches at or above this fidelity count as exact transfers.
SUCCESS_FIDELITY = 1.0 - 1e-9


class DegenerateChannelError(ValueError):
    """An m-strategy rule would divide by a vanishing channel weight."""


class Receiver(Enum):
    BOB = "bob"
    CHARLIE = "charlie"


# Receiver corrections keyed on (Alice outcome, helper X outcome).  Matrix
# products read left to right, rightmost factor applied first.
TABLE1_CORRECTIONS: dict[tuple[str, str], SingleQubitUnitary] = {
    ("PhiPlus", "XPlus"): IDENTITY,
    ("PhiPlus", "XMinus"): SIGMA_Z,
    ("PhiMinus", "XPlus"): SIGMA_Z,
    ("PhiMinus", "XMinus"): IDENTITY,
    ("PsiPlus", "XPlus"): SIGMA_X,
    ("PsiPlus", "XMinus"): SIGMA_X_SIGMA_Z,
    ("PsiMinus", "XPlus"): SIGMA_Z_SIGMA_X,
    ("PsiMinus", "XMinus"): SIGMA_X,
}

TABLE2_CORRECTIONS: dict[tuple[str, str], SingleQubitUnitary] = {
    ("GHZPlus", "XPlus"): IDENTITY,
    ("GHZPlus", "XMinus"): SIGMA_Z,
    ("GHZMinus", "XPlus"): SIGMA_Z,
    ("GHZMinus", "XMinus"): IDENTITY,
    ("GPlus", "XPlus"): IDENTITY,
    ("GPlus", "XMinus"): SIGMA_Z,
    ("GMinus", "XPlus"): SIGMA_Z,
    ("GMinus", "XMinus"): IDENTITY,
    ("HPlus", "XPlus"): SIGMA_X,
    ("HPlus", "XMinus"): SIGMA_X_SIGMA_Z,
    ("HMinus", "XPlus"): SIGMA_X_SIGMA_Z,
    ("HMinus", "XMinus"): SIGMA_X,
    ("ZPlus", "XPlus"): SIGMA_X,
    ("ZPlus", "XMinus"): SIGMA_Z_SIGMA_X,
    ("ZMinus", "XPlus"): SIGMA_X_SIGMA_Z,
    ("ZMinus", "XMinus"): SIGMA_X,
}

# Receiver correction for the many-party runners, keyed on
# (relative-sign flip needed, bit flip needed).
_PAULI_BY_FLAGS = {
    (False, False): IDENTITY,
    (False, True): SIGMA_X,
    (True, False): SIGMA_Z,
    (True, True): SIGMA_Z_SIGMA_X,
}


@dataclass(frozen=True, eq=False)
class BranchRecord:
    """One joint outcome: labels, probability, and the receiver's final qubit.

    ``precorrection_state`` is the receiver's qubit right after all
    measurements, before the correction; both states are None on
    zero-probability branches.  ``classical_bits`` counts the classical
    communication needed to close this branch.
    """

    alice_label: str
    helper_labels: tuple[str, ...]
    probability: float
    receiver_state: PureState | None
    fidelity: float
    correction: SingleQubitUnitary
    precorrection_state: PureState | None
    classical_bits: int

    @property
    def bob_label(self) -> str:
        if len(self.helper_labels) != 1:
            raise ValueError("bob_label is defined for single-helper branches only")
        return self.helper_labels[0]


@dataclass(frozen=True, eq=False)
class ProtocolRun:
    """Complete branch-by-branch record of one protocol execution."""

    protocol: str
    source: InputQubit
    params: dict
    receiver: str
    branches: tuple[BranchRecord, ...]

    @property
    def success_probability(self) -> float:
        return sum(b.probability for b in self.branches if b.fidelity > SUCCESS_FIDELITY)

    @property
    def total_probability(self) -> float:
        return sum(b.probability for b in self.branches)


# ── m-strategies ─────────────────────────────────────────────────────────

@dataclass(frozen=True)
class MStrategy:
    """A named rule fixing the basis weight m from the channel weights.

    ``solo_target`` is the single outcome driven to fidelity 1 for complex
    channel weights (single-channel protocol only); with real weights the
    outcomes pair up and ``paired_targets`` apply.
    """

    name: str
    protocol: str  # "p1" | "p2"
    solo_target: str | None
    paired_targets: tuple[str, ...]


STRATEGIES: dict[str, MStrategy] = {
    s.name: s
    for s in (
        MStrategy("phi-plus", "p1", "PhiPlus", ("PhiPlus", "PsiMinus")),
        MStrategy("phi-minus", "p1", "PhiMinus", ("PhiMinus", "PsiPlus")),
        MStrategy("psi-plus", "p1", "PsiPlus", ("PhiMinus", "PsiPlus")),
        MStrategy("psi-minus", "p1", "PsiMinus", ("PhiPlus", "PsiMinus")),
        MStrategy("ghz-plus", "p2", None, ("GHZPlus", "HPlus")),
        MStrategy("h-plus", "p2", None, ("GHZPlus", "HPlus")),
        MStrategy("ghz-minus", "p2", None, ("GHZMinus", "HMinus")),
        MStrategy("h-minus", "p2", None, ("GHZMinus", "HMinus")),
        MStrategy("z-plus", "p2", None, ("ZPlus", "GPlus")),
        MStrategy("g-plus", "p2", None, ("ZPlus", "GPlus")),
        MStrategy("z-minus", "p2", None, ("ZMinus", "GMinus")),
        MStrategy("g-minus", "p2", None, ("ZMinus", "GMinus")),
    )
}


def _resolve_strategy(strategy: MStrategy | str) -> MStrategy:
    if isinstance(strategy, MStrategy):
        return strategy
    try:
        return STRATEGIES[strategy]
    except KeyError:
        raise ValueError(f"unknown strategy {strategy!r}") from None


def choose_m(
    strategy: MStrategy | str,
    *,
    n: complex | float | None = None,
    n1: complex | float | None = None,
    n2: complex | float | None = None,
    ns: Sequence[complex | float] | None = None,
) -> complex:
    """Resolve the basis weight mandated by a named strategy.

    Single-channel rules take ``n``; two-channel rules take ``n1``/``n2`` or,
    for the product rules of the many-party extension, the full sequence
    ``ns``.  Conjugations are applied literally: a rule written m* = 1/n
    yields conj(1/n).
    """
    s = _resolve_strategy(strategy)
    try:
        if s.protocol == "p1":
            if n is None:
                raise ValueError(f"strategy {s.name!r} needs the channel weight n")
            n = complex(n)
            if s.name == "phi-plus":
                return (1.0 / n).conjugate()
            if s.name == "phi-minus":
                return n
            if s.name == "psi-plus":
                return n.conjugate()
            return 1.0 / n  # psi-minus

        if ns is None:
            if n1 is None or n2 is None:
                raise ValueError(f"strategy {s.name!r} needs channel weights n1 and n2")
            ns = (n1, n2)
        weights = tuple(complex(x) for x in ns)
        product = reduce(mul, weights, complex(1.0))
        if s.name in ("ghz-plus", "h-plus"):
            return (1.0 / product).conjugate()
        if s.name in ("ghz-minus", "h-minus"):
            return product
        if len(weights) != 2:
            raise ValueError(f"strategy {s.name!r} applies to exactly two channels")
        first, second = weights
        if s.name in ("z-plus", "g-plus"):
            return (first / second).conjugate()
        return second / first  # z-minus / g-minus
    except ZeroDivisionError:
        raise DegenerateChannelError(
            f"strategy {s.name!r} is undefined for a vanishing channel weight"
        ) from None


def strategy_targets(strategy: MStrategy | str, *, real: bool = True) -> frozenset[str]:
    """Alice outcomes driven to fidelity 1 by a strategy.

    Single-channel strategies hit one outcome for complex weights and a pair
    for real weights; two-channel strategies always hit their pair.
    """
    s = _resolve_strategy(strategy)
    if s.protocol == "p1" and not real:
        return frozenset((s.solo_target,))
    return frozenset(s.paired_targets)


def nparty_bell_targets(strategy: MStrategy | str, num_parties: int) -> frozenset[str]:
    """Outcome labels targeted by a product rule in the Bell-channel extension.

    Generalises the all-zero / leading-one anchor pairs; at three parties
    these are exactly the labels of ``strategy_targets``.
    """
    s = _resolve_strategy(strategy)
    if s.name not in ("ghz-plus", "h-plus", "ghz-minus", "h-minus"):
        raise ValueError(f"strategy {s.name!r} has no many-party generalisation")
    minus = s.name.endswith("minus")
    labels = []
    anchors_wanted = {(0,) * num_parties, (1,) + (0,) * (num_parties - 1)}
    basis = generalized_ghz_basis(1) if num_parties == 3 else generalized_pair_basis(num_parties, 1)
    for label, (anchor, is_minus) in zip(basis.labels, pair_anchors(num_parties)):
        if anchor in anchors_wanted and is_minus == minus:
            labels.append(label)
    return frozenset(labels)


# ── branch assembly ──────────────────────────────────────────────────────

def _helper_positions(parties: list[int], helpers: list[int]) -> list[int]:
    # position of each helper within the shrinking post-state register
    remaining = list(parties)
    positions = []
    for h in helpers:
        positions.append(remaining.index(h))
        remaining.remove(h)
    return positions


def _expand_helpers(
    alice_outcome: MeasurementOutcome, positions: list[int]
) -> list[tuple[tuple[str, ...], float, PureState | None]]:
    """Cascade X-measurements over the helpers, enumerating every branch."""
    xb = x_basis()
    branches: list[tuple[tuple[str, ...], float, PureState | None]] = [
        ((), alice_outcome.probability, alice_outcome.post_state)
    ]
    for pos in positions:
        grown = []
        for labels, prob, state in branches:
            if state is None:
                # dead branch: the X outcomes stay equiprobable by symmetry
                grown.append((labels + ("XPlus",), 0.5 * prob, None))
                grown.append((labels + ("XMinus",), 0.5 * prob, None))
            else:
                for out in measure(state, [pos], xb):
                    grown.append((labels + (out.label,), prob * out.probability, out.post_state))
        branches = grown
    return branches


def _finish_branch(
    input_state: PureState,
    alice_label: str,
    helper_labels: tuple[str, ...],
    probability: float,
    raw: PureState | None,
    correction: SingleQubitUnitary,
    classical_bits: int,
) -> BranchRecord:
    if raw is None:
        return BranchRecord(alice_label, helper_labels, probability, None, 0.0,
                            correction, None, classical_bits)
    corrected = apply_unitary(raw, correction, 0)
    return BranchRecord(alice_label, helper_labels, probability, corrected,
                        fidelity(input_state, corrected), correction, raw, classical_bits)


# ── runners ──────────────────────────────────────────────────────────────

def run_protocol1(
    source: InputQubit,
    n: complex | float,
    m: complex | float,
    receiver: Receiver | str = Receiver.CHARLIE,
) -> ProtocolRun:
    """Share ``source`` over the weight-n GHZ-type channel.

    Joint register order: (input, Alice's channel qubit, Bob, Charlie).
    Alice measures qubits 0-1 in the weight-m Bell family, the helper
    X-measures, and the receiver applies the frozen correction.  The channel
    is symmetric in Bob and Charlie, so choosing Bob as receiver simply makes
    Charlie the helper.
    """
    n, m = complex(n), complex(m)
    receiver = Receiver(receiver)
    input_state = source.as_state()
    joint = tensor(input_state, channel_ghz(n))
    alice_outcomes = measure(joint, [0, 1], generalized_bell_basis(m))
    helper_pos = 0 if receiver is Receiver.CHARLIE else 1
    records = []
    for out in alice_outcomes:
        for labels, prob, raw in _expand_helpers(out, [helper_pos]):
            correction = TABLE1_CORRECTIONS[(out.label, labels[0])]
            records.append(_finish_branch(input_state, out.label, labels, prob, raw,
                                          correction, 3))
    return ProtocolRun("p1", source, {"n": n, "m": m}, receiver.value, tuple(records))


def run_protocol2(
    source: InputQubit,
    n1: complex | float,
    n2: complex | float,
    m: complex | float,
    receiver: Receiver | str = Receiver.CHARLIE,
) -> ProtocolRun:
    """Share ``source`` over two Bell-type channels (n1 to Bob, n2 to Charlie).

    Joint register order: (input, Alice-1, Bob, Alice-2, Charlie).  Alice
    measures qubits 0, 1, 3 in the weight-m GHZ family, ordering her kets
    (input, helper channel, receiver channel); a Bob receiver is handled by
    swapping the (channel, party) pairs, which leaves the pipeline identical.
    """
    n1, n2, m = complex(n1), complex(n2), complex(m)
    receiver = Receiver(receiver)
    helper_n, receiver_n = (n1, n2) if receiver is Receiver.CHARLIE else (n2, n1)
    input_state = source.as_state()
    joint = tensor(tensor(input_state, channel_bell(helper_n)), channel_bell(receiver_n))
    alice_outcomes = measure(joint, [0, 1, 3], generalized_ghz_basis(m))
    records = []
    for out in alice_outcomes:
        for labels, prob, raw in _expand_helpers(out, [0]):
            correction = TABLE2_CORRECTIONS[(out.label, labels[0])]
            records.append(_finish_branch(input_state, out.label, labels, prob, raw,
                                          correction, 4))
    return ProtocolRun("p2", source, {"n1": n1, "n2": n2, "m": m},
                       receiver.value, tuple(records))


def run_nparty_ghz(
    source: InputQubit,
    num_parties: int,
    n: complex | float,
    m: complex | float,
    receiver_index: int | None = None,
) -> ProtocolRun:
    """Share ``source`` over a weight-n GHZ-type channel among N-1 parties.

    Parties are indexed 1..N-1; all but the receiver X-measure, and the
    receiver's correction is the base table entry at the parity of the
    helpers' XMinus outcomes.  Reduces to ``run_protocol1`` at N = 3.
    """
    if not 3 <= num_parties <= 10:
        raise ValueError("num_parties must be between 3 and 10")
    r = num_parties - 1 if receiver_index is None else int(receiver_index)
    if not 1 <= r <= num_parties - 1:
        raise ValueError(f"receiver_index {r} out of range for {num_parties} parties")
    n, m = complex(n), complex(m)
    input_state = source.as_state()
    joint = tensor(input_state, channel_ghz(n, num_qubits=num_parties))
    alice_outcomes = measure(joint, [0, 1], generalized_bell_basis(m))
    parties = list(range(1, num_parties))
    positions = _helper_positions(parties, [p for p in parties if p != r])
    bits = num_parties  # 2 from Alice plus one per helper
    records = []
    for out in alice_outcomes:
        for labels, prob, raw in _expand_helpers(out, positions):
            odd_parity = sum(lbl == "XMinus" for lbl in labels) % 2 == 1
            correction = TABLE1_CORRECTIONS[(out.label, "XMinus" if odd_parity else "XPlus")]
            records.append(_finish_branch(input_state, out.label, labels, prob, raw,
                                          correction, bits))
    return ProtocolRun("nparty-ghz", source,
                       {"n": n, "m": m, "parties": num_parties},
                       f"party{r}", tuple(records))


def run_nparty_bell(
    source: InputQubit,
    ns: Sequence[complex | float],
    m: complex | float,
    receiver_index: int | None = None,
) -> ProtocolRun:
    """Share ``source`` over N-1 Bell-type channels, one per party.

    Alice measures her N qubits (input plus one half of each channel, in
    party order) in the weight-m paired family.  The receiver's correction
    follows from the measured pair's anchor bits: a bit flip when the input
    anchor bit differs from the receiver's, a sign flip at odd helper parity
    xor a minus-family outcome.  Reduces to ``run_protocol2`` at N = 3.
    """
    weights = tuple(complex(x) for x in ns)
    num_parties = len(weights) + 1
    if not 3 <= num_parties <= 6:
        raise ValueError("need 2..5 channel weights (3..6 parties)")
    r = num_parties - 1 if receiver_index is None else int(receiver_index)
    if not 1 <= r <= num_parties - 1:
        raise ValueError(f"receiver_index {r} out of range for {num_parties} parties")
    m = complex(m)
    input_state = source.as_state()
    joint = input_state
    for w in weights:
        joint = tensor(joint, channel_bell(w))
    alice_targets = [0] + [2 * i - 1 for i in range(1, num_parties)]
    basis = (generalized_ghz_basis(m) if num_parties == 3
             else generalized_pair_basis(num_parties, m))
    alice_outcomes = measure(joint, alice_targets, basis)
    anchors = dict(zip(basis.labels, pair_anchors(num_parties)))
    parties = list(range(1, num_parties))
    positions = _helper_positions(parties, [p for p in parties if p != r])
    bits = 2 * num_parties - 2  # N from Alice plus one per helper
    records = []
    for out in alice_outcomes:
        anchor, is_minus = anchors[out.label]
        bit_flip = bool(anchor[0] ^ anchor[r])
        for labels, prob, raw in _expand_helpers(out, positions):
            odd_parity = sum(lbl == "XMinus" for lbl in labels) % 2 == 1
            correction = _PAULI_BY_FLAGS[(odd_parity ^ is_minus, bit_flip)]
            records.append(_finish_branch(input_state, out.label, labels, prob, raw,
                                          correction, bits))
    return ProtocolRun("nparty-bell", source, {"ns": weights, "m": m},
                       f"party{r}", tuple(records))


# ── verification against the frozen outcome tables ──────────────────────

@dataclass(frozen=True)
class TableRowCheck:
    """Result of checking one outcome row against its expected receiver state.

    ``fidelity_to_expected`` is None when the branch cannot occur for the
    given input (zero probability), in which case the row passes vacuously.
    """

    alice_label: str
    helper_label: str
    fidelity_to_expected: float | None
    ok: bool


def _check_rows(
    run: ProtocolRun,
    expected: Mapping[str, tuple[complex, complex]],
    tolerance: float,
    corrupt_row: tuple[str, str] | None,
) -> list[TableRowCheck]:
    checks = []
    for branch in run.branches:
        helper_label = branch.helper_labels[0]
        target = np.array(expected[branch.alice_label], dtype=np.complex128)
        norm = float(np.linalg.norm(target))
        if branch.receiver_state is None or norm <= ZERO_NORM_THRESHOLD:
            checks.append(TableRowCheck(branch.alice_label, helper_label, None, True))
            continue
        state = branch.receiver_state
        if corrupt_row == (branch.alice_label, helper_label):
            state = apply_unitary(state, SIGMA_X, 0)  # deliberate negative control
        fid = min(abs(np.vdot(target / norm, state.amplitudes)) ** 2, 1.0)
        checks.append(TableRowCheck(branch.alice_label, helper_label, fid, fid >= 1.0 - tolerance))
    return checks


def verify_table1(
    n: complex | float,
    m: complex | float,
    source: InputQubit,
    tolerance: float = 1e-10,
    corrupt_row: tuple[str, str] | None = None,
) -> list[TableRowCheck]:
    """Check all 8 outcome rows of the GHZ-channel protocol.

    The expected receiver states (up to normalisation) are
    PhiPlus: a|0> + m*n b|1>, PhiMinus: m a|0> + n b|1>,
    PsiPlus: n a|0> + m* b|1>, PsiMinus: m n a|0> + b|1>.
    """
    n, m = complex(n), complex(m)
    a, b = source.alpha, source.beta
    mc = m.conjugate()
    expected = {
        "PhiPlus": (a, mc * n * b),
        "PhiMinus": (m * a, n * b),
        "PsiPlus": (n * a, mc * b),
        "PsiMinus": (m * n * a, b),
    }
    return _check_rows(run_protocol1(source, n, m), expected, tolerance, corrupt_row)


def verify_table2(
    n1: complex | float,
    n2: complex | float,
    m: complex | float,
    source: InputQubit,
    tolerance: float = 1e-10,
    corrupt_row: tuple[str, str] | None = None,
) -> list[TableRowCheck]:
    """Check all 16 outcome rows of the two-Bell-channel protocol."""
    n1, n2, m = complex(n1), complex(n2), complex(m)
    a, b = source.alpha, source.beta
    mc = m.conjugate()
    expected = {
        "GHZPlus": (a, mc * n1 * n2 * b),
        "GHZMinus": (m * a, n1 * n2 * b),
        "GPlus": (n1 * a, mc * n2 * b),
        "GMinus": (m * n1 * a, n2 * b),
        "HPlus": (mc * n1 * n2 * a, b),
        "HMinus": (n1 * n2 * a, m * b),
        "ZPlus": (mc * n2 * a, n1 * b),
        "ZMinus": (n2 * a, m * n1 * b),
    }
    return _check_rows(run_protocol2(source, n1, n2, m), expected, tolerance, corrupt_row)


# ── derived diagnostics ──────────────────────────────────────────────────

def bob_bit_withheld_state(run: ProtocolRun, alice_label: str) -> np.ndarray:
    """Receiver's 2x2 density matrix when the helper's X outcome is withheld.

    The receiver corrects as if the helper had reported XPlus; the result is
    the probability-weighted mixture over the helper's actual outcomes,
    conditioned on Alice's outcome.
    """
    branches = [b for b in run.branches if b.alice_label == alice_label]
    if not branches:
        raise ValueError(f"unknown Alice outcome {alice_label!r}")
    if any(len(b.helper_labels) != 1 for b in branches):
        raise ValueError("defined for single-helper protocols only")
    total = sum(b.probability for b in branches)
    if total < ZERO_NORM_THRESHOLD:
        raise ValueError(f"Alice outcome {alice_label!r} has zero probability")
    plus_correction = next(b.correction for b in branches if b.helper_labels[0] == "XPlus")
    rho = np.zeros((2, 2), dtype=np.complex128)
    for branch in branches:
        if branch.precorrection_state is None:
            continue
        vec = plus_correction.matrix @ branch.precorrection_state.amplitudes
        rho += (branch.probability / total) * np.outer(vec, vec.conj())
    return rho


def apply_bitflip_and_recover(run: ProtocolRun, branch: BranchRecord, flip: bool) -> BranchRecord:
    """Model unitary bit-flip noise on the receiver's qubit plus its recovery.

    With ``flip`` the receiver's raw qubit is flipped and an extra flip is
    appended (applied first) to the correction, so the recovered branch has
    the same fidelity as the noiseless one.
    """
    if not flip or branch.precorrection_state is None:
        return branch
    flipped = apply_unitary(branch.precorrection_state, SIGMA_X, 0)
    recovery = branch.correction @ SIGMA_X
    corrected = apply_unitary(flipped, recovery, 0)
    return replace(
        branch,
        precorrection_state=flipped,
        correction=recovery,
        receiver_state=corrected,
        fidelity=fidelity(run.source.as_state(), corrected),
    )
