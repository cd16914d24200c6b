import numpy as np
import pytest

from qsts import InputQubit, haar_sample


def generic_haar(rng: np.random.Generator, min_weight: float = 0.05) -> InputQubit:
    """Bloch-uniform input away from the poles (|alpha|, |beta| > min_weight)."""
    while True:
        qubit = haar_sample(rng)
        if abs(qubit.alpha) > min_weight and abs(qubit.beta) > min_weight:
            return qubit


def assert_run_matches_oracle(run, oracle_rows, atol: float = 1e-12) -> None:
    """Branch-for-branch comparison of an engine run with the brute-force oracle."""
    assert len(run.branches) == len(oracle_rows)
    for branch, (alice, helpers, prob, state) in zip(run.branches, oracle_rows):
        assert branch.alice_label == alice
        assert branch.helper_labels == tuple(helpers)
        assert abs(branch.probability - prob) <= atol
        if state is None:
            assert branch.receiver_state is None
        else:
            assert branch.receiver_state is not None
            np.testing.assert_allclose(branch.receiver_state.amplitudes, state, atol=atol)


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
