"""Protocol efficiencies: closed forms, concurrence, and Monte-Carlo averages.

The efficiency of a protocol is the average qubit transmission rate
sum_j <P_j F_j>, the expectation taken over Bloch-uniform inputs.  For real
weights it has the closed forms implemented here; the Monte-Carlo estimator
computes the inner sum exactly per sampled input (all branches enumerated),
so sampling noise comes only from the input average.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .protocols import (
    ProtocolRun,
    run_nparty_bell,
    run_nparty_ghz,
    run_protocol1,
    run_protocol2,
)
from .states import InputQubit


@dataclass(frozen=True)
class EfficiencyReport:
    """Monte-Carlo transmission-rate estimate, with the closed form if defined.

    ``analytic`` is None for complex channel or basis weights, where only the
    estimate is meaningful.  ``std_error`` is the sample standard deviation
    over inputs divided by sqrt(samples).
    """

    analytic: float | None
    estimate: float
    samples: int
    std_error: float
    seed: int


def concurrence(m: float) -> float:
    """Pairwise entanglement 2|m|/(1+|m|^2) of the weight-m two-qubit states."""
    m = float(m)
    return 2.0 * abs(m) / (1.0 + m * m)


def _sorted_product(*factors: float) -> float:
    # multiply in ascending order so the result is bitwise invariant under
    # permutation of the arguments
    out = 1.0
    for f in sorted(factors):
        out *= f
    return out


def cpro1_analytic(n: float, m: float) -> float:
    """Average transmission rate of the GHZ-channel protocol, real weights.

    (2/3)(1 + 2mn/((1+m^2)(1+n^2))) = (2/3)(1 + c(m)c(n)/2); equals 1 only
    at m = n = 1.
    """
    n, m = float(n), float(m)
    return (2.0 / 3.0) * (1.0 + _sorted_product(2.0, m, n) / ((1.0 + m * m) * (1.0 + n * n)))


def cpro2_analytic(n1: float, n2: float, m: float) -> float:
    """Average transmission rate of the two-Bell-channel protocol, real weights.

    (2/3)(1 + 4 m n1 n2 / ((1+m^2)(1+n1^2)(1+n2^2))); invariant under any
    permutation of (m, n1, n2) and equal to 1 only at m = n1 = n2 = 1.
    """
    n1, n2, m = float(n1), float(n2), float(m)
    num = _sorted_product(4.0, m, n1, n2)
    den = _sorted_product(1.0 + m * m, 1.0 + n1 * n1, 1.0 + n2 * n2)
    return (2.0 / 3.0) * (1.0 + num / den)


def haar_sample(rng: np.random.Generator) -> InputQubit:
    """Draw a Bloch-uniform input qubit.

    (alpha, beta) = (cos(t/2), e^{i phi} sin(t/2)) with cos t uniform on
    [-1, 1] and phi uniform on [0, 2pi); |alpha|^2 is then uniform on [0, 1],
    reproducing <|a|^2> = 1/2, <|a|^4> = 1/3, <|ab|^2> = 1/6.  Exactly two
    uniform variates are consumed per call.
    """
    weight = 0.5 * (1.0 + rng.uniform(-1.0, 1.0))
    phase = rng.uniform(0.0, 2.0 * math.pi)
    return InputQubit(
        math.sqrt(weight),
        math.sqrt(1.0 - weight) * complex(math.cos(phase), math.sin(phase)),
    )


def transmission_sum(run: ProtocolRun) -> float:
    """Exact sum of branch probability times fidelity for one run."""
    return sum(b.probability * b.fidelity for b in run.branches)


def _make_runner(protocol: str, params: Mapping) -> Callable[[InputQubit], ProtocolRun]:
    if protocol == "p1":
        n, m = params["n"], params["m"]
        return lambda q: run_protocol1(q, n, m)
    if protocol == "p2":
        n1, n2, m = params["n1"], params["n2"], params["m"]
        return lambda q: run_protocol2(q, n1, n2, m)
    if protocol == "nparty-ghz":
        parties, n, m = params["parties"], params["n"], params["m"]
        receiver = params.get("receiver_index")
        return lambda q: run_nparty_ghz(q, parties, n, m, receiver)
    if protocol == "nparty-bell":
        ns, m = params["ns"], params["m"]
        receiver = params.get("receiver_index")
        return lambda q: run_nparty_bell(q, ns, m, receiver)
    raise ValueError(f"unknown protocol {protocol!r}")


def analytic_rate(protocol: str, params: Mapping) -> float | None:
    """Closed-form rate for a runner parameter set, None where undefined.

    Defined for "p1" and "p2" with real weights only; the many-party
    extensions and complex weights have no closed form here.
    """
    def real(value) -> float | None:
        value = complex(value)
        return value.real if value.imag == 0.0 else None

    if protocol == "p1":
        n, m = real(params["n"]), real(params["m"])
        if n is not None and m is not None:
            return cpro1_analytic(n, m)
    elif protocol == "p2":
        n1, n2, m = real(params["n1"]), real(params["n2"]), real(params["m"])
        if None not in (n1, n2, m):
            return cpro2_analytic(n1, n2, m)
    return None


def cpro_monte_carlo(
    protocol: str,
    params: Mapping,
    samples: int,
    seed: int,
    threads: int = 1,
) -> EfficiencyReport:
    """Average the exact per-input transmission sum over Haar-random inputs.

    ``params`` holds the runner arguments: {n, m} for "p1", {n1, n2, m} for
    "p2", {parties, n, m} for "nparty-ghz", {ns, m} for "nparty-bell".  Each
    sample gets its own generator spawned from the master seed and writes
    into a fixed slot, so the report is identical for any thread count.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    run_fn = _make_runner(protocol, params)
    children = np.random.SeedSequence(seed).spawn(samples)
    values = np.empty(samples, dtype=float)

    def fill(lo: int, hi: int) -> None:
        for i in range(lo, hi):
            qubit = haar_sample(np.random.default_rng(children[i]))
            values[i] = transmission_sum(run_fn(qubit))

    threads = max(1, int(threads))
    if threads == 1 or samples < 2 * threads:
        fill(0, samples)
    else:
        bounds = np.linspace(0, samples, threads + 1).astype(int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(lambda span: fill(*span), zip(bounds[:-1], bounds[1:])))

    estimate = float(values.mean())
    std_error = float(values.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return EfficiencyReport(analytic_rate(protocol, params), estimate, samples,
                            std_error, seed)


@dataclass(frozen=True)
class ProtocolComparison:
    """Closed-form comparison of the two protocols sharing a channel weight."""

    cpro1: float
    cpro2: float
    cpro2_swapped: float
    first_at_least_second: bool
    equal: bool
    equality_expected: bool


def compare_protocols(
    n: float, m: float, n_other: float, tolerance: float = 1e-12
) -> ProtocolComparison:
    """Evaluate both closed forms with the shared weight n in either slot.

    The single-channel protocol is never the less efficient one; equality
    holds exactly when the other channel is maximal (c(n_other) = 1) or the
    shared concurrence product c(m)c(n) vanishes.
    """
    c1 = cpro1_analytic(n, m)
    c2 = cpro2_analytic(n, n_other, m)
    c2_swapped = cpro2_analytic(n_other, n, m)
    equal = abs(c1 - c2) <= tolerance
    equality_expected = (
        abs(concurrence(n_other) - 1.0) <= tolerance
        or concurrence(m) * concurrence(n) <= tolerance
    )
    return ProtocolComparison(
        c1, c2, c2_swapped,
        c1 >= c2 - tolerance and c1 >= c2_swapped - tolerance,
        equal, equality_expected,
    )
