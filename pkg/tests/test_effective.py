import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cavitygates.effective import (
    Partition,
    closed_form_params,
    iswap_exact_params,
    reduce_preset,
    schur_reduce,
    solve_resonance,
)
from cavitygates.errors import DegenerateError, IllConditionedPartitionError
from cavitygates.hamiltonian import OperatorMatrix, preset_hamiltonian
from cavitygates.hilbert import Basis, BasisState

from conftest import random_hermitian

FIVE = {k: 1.0 for k in ("g_ab", "g_bc", "g_cd", "g_de", "g_ef", "g_fa")} | {f"Delta{i}": 20.0 for i in range(1, 6)}


def dummy_basis(n):
    return Basis(tuple(BasisState((i,), "a") for i in range(n)))


def operator(m):
    return OperatorMatrix(dummy_basis(len(m)), np.asarray(m, dtype=complex))


def brute_force(m, p):
    """Column-by-column solve of A x = B^dagger, then H0 - B x."""
    q = [i for i in range(len(m)) if i not in p]
    a, b = m[np.ix_(q, q)], m[np.ix_(p, q)]
    x = np.column_stack([np.linalg.solve(a, col) for col in b.conj().T.T]) if q else np.zeros((0, len(p)))
    return m[np.ix_(p, p)] - b @ x


def test_keep_everything_is_identity(rng):
    m = random_hermitian(rng, 6)
    model = schur_reduce(operator(m), Partition.keep(6, range(6)))
    np.testing.assert_allclose(model.h_eff, m, atol=1e-15)


def test_three_state_ladder():
    g1, g2, big, small = 0.3, 0.7, 9.0, 0.01
    m = [[0, g1, 0], [g1, big, g2], [0, g2, small]]
    model = schur_reduce(operator(m), Partition.keep(3, [0, 2]))
    expected = [[-g1**2 / big, -g1 * g2 / big], [-g1 * g2 / big, small - g2**2 / big]]
    np.testing.assert_allclose(model.h_eff, expected, atol=1e-15)
    assert model.residual_detunings[0] == 0
    np.testing.assert_allclose(model.shifts, [-g1**2 / big, -g2**2 / big], atol=1e-15)


def test_iswap_symmetric_example():
    p = {"g_ab": 1, "g_bc": 1, "g_cd": 1, "g_da": 1, "Delta1": 10, "Delta2": 10, "Delta3": 10, "Delta4": 0}
    model = reduce_preset("iswap", p)
    assert model.g_eff == pytest.approx(-1 / 980, abs=1e-15)
    assert iswap_exact_params(p)["g_eff"] == pytest.approx(-1 / 980, abs=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 12), st.integers(0, 2**32 - 1))
def test_matches_column_solve(n, seed):
    rng = np.random.default_rng(seed)
    m = random_hermitian(rng, n)
    m[np.diag_indices(n)] += 10 * np.sign(rng.normal(size=n))  # keep A away from singular
    k = int(rng.integers(1, n))
    p = sorted(rng.choice(n, size=k, replace=False).tolist())
    model = schur_reduce(operator(m), Partition.keep(n, p))
    np.testing.assert_allclose(model.h_eff, brute_force(m, p), atol=1e-12, rtol=0)


def test_singular_block_raises():
    m = [[0, 1, 0], [1, 1, 1], [0, 1, 1]]  # eliminated block [[1, 1], [1, 1]] is singular
    with pytest.raises(IllConditionedPartitionError):
        schur_reduce(operator(m), Partition.keep(3, [0]))
    near = [[0, 1, 0], [1, 1, 1], [0, 1, 1 + 1e-14]]
    with pytest.raises(IllConditionedPartitionError):
        schur_reduce(operator(near), Partition.keep(3, [0]))


def test_asymmetric_input_warns():
    m = np.array([[0, 1, 1e-3], [1, 5, 1], [0, 1, 0]], dtype=complex)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        model = schur_reduce(operator(m), Partition.keep(3, [0, 2]))
    assert any(issubclass(w.category, RuntimeWarning) for w in caught)
    assert model.max_asymmetry > 1e-10
    np.testing.assert_allclose(model.h_eff, model.h_eff.conj().T)


def test_partition_validation():
    with pytest.raises(ValueError):
        Partition((0, 1), (1, 2))
    with pytest.raises(ValueError):
        Partition((0,), (2,))


def test_closed_form_examples():
    slow = closed_form_params("fredkin2", FIVE | {"Delta6": 0.0})
    assert slow["g_eff"] == pytest.approx(-3.125e-7, rel=1e-14)
    assert slow["Delta_eff"] == pytest.approx(-0.05)
    fast = closed_form_params("fredkin3", FIVE | {"Delta3": 0.05, "Delta6": 0.05})
    assert fast["g1"] == pytest.approx(2.5e-3) and fast["g2"] == pytest.approx(2.5e-3)
    assert fast["g_prime"] == pytest.approx(2.5e-3 * np.sqrt(2))
    x = closed_form_params("xrot", {"g_ab": 1, "g_bc": 1, "omega": 2, "Delta1": 50, "Delta2": 50, "Delta3": 0})
    assert abs(x["g_eff"]) == pytest.approx(4e-4)


def test_zero_denominator():
    with pytest.raises(DegenerateError):
        closed_form_params("fredkin3", FIVE | {"Delta1": 0.0, "Delta3": 0.0, "Delta6": 0.0})
    with pytest.raises(DegenerateError):
        solve_resonance("xrot", {"g_ab": 1, "g_bc": 1, "omega": 2, "Delta1": 0.0, "Delta2": 50})


def test_resonance_examples():
    fast = solve_resonance("fredkin3", FIVE)
    assert fast.params["Delta3"] == pytest.approx(0.05) and fast.params["Delta6"] == pytest.approx(0.05)
    iswap = solve_resonance("iswap", {"g_ab": 1, "g_bc": 1, "g_cd": 1, "g_da": 1, "Delta1": 10, "Delta2": 10, "Delta3": 10})
    assert iswap.params["Delta4"] == 0.0
    assert abs(iswap.residuals).max() < 1e-15  # exactly resonant by symmetry
    xrot = solve_resonance("xrot", {"g_ab": 1, "g_bc": 1, "omega": 2, "Delta1": 50, "Delta2": 50})
    assert xrot.params["Delta3"] == pytest.approx(-0.02)


def test_numeric_xrot_coupling_is_positive():
    x = solve_resonance("xrot", {"g_ab": 1, "g_bc": 1, "omega": 2, "Delta1": 50, "Delta2": 50})
    assert x.model.g_eff > 0


def test_newton_polish_zeroes_residuals():
    p = {"g_ab": 1, "g_bc": 1, "g_cd": 1, "g_da": 1, "Delta1": 5, "Delta2": 7, "Delta3": 9}
    direct = solve_resonance("iswap", p)
    polished = solve_resonance("iswap", p, polish="newton")
    assert abs(polished.residuals).max() < 1e-9 < abs(direct.residuals).max()
    fast = solve_resonance("fredkin", FIVE, polish="newton")
    assert abs(fast.residuals).max() < 1e-9


def test_spectral_polish_finds_the_crossing():
    res = solve_resonance("fredkin-slow", FIVE, polish="spectral")
    h = preset_hamiltonian("fredkin-slow", res.params)
    energies, vectors = np.linalg.eigh(h.matrix)
    i, j = (h.basis.index(s) for s in res.model.p_states)
    weights = np.abs(vectors[i]) ** 2 + np.abs(vectors[j]) ** 2
    lower = min(np.argsort(weights)[-2:])
    # the lower dressed state is an even superposition of the two kept states
    assert abs(vectors[i, lower]) ** 2 == pytest.approx(abs(vectors[j, lower]) ** 2, rel=1e-6)


def test_spectral_polish_needs_one_free_detuning():
    with pytest.raises(Exception):
        solve_resonance("fredkin", FIVE, polish="spectral")


def test_slow_fredkin_coupling_error_scaling():
    errors = []
    for d in (20.0, 40.0, 80.0):
        p = {k: 1.0 for k in FIVE if k.startswith("g")} | {f"Delta{i}": d for i in range(1, 6)} | {"Delta6": 1 / d}
        errors.append(abs(reduce_preset("fredkin-slow", p).g_eff / closed_form_params("fredkin2", p)["g_eff"] - 1))
    for a, b in zip(errors, errors[1:]):
        assert 2.0 <= a / b <= 8.0


def test_effective_spectrum_converges():
    errs = []
    for d in (20.0, 40.0, 80.0):
        p = {"g_ab": 1, "g_bc": 1, "g_cd": 1, "g_da": 1, "Delta1": d, "Delta2": d, "Delta3": d, "Delta4": 0.0}
        h = preset_hamiltonian("iswap", p)
        full = np.linalg.eigvalsh(h.matrix)
        near = np.sort(full[np.argsort(np.abs(full))[:2]])
        eff = np.linalg.eigvalsh(reduce_preset("iswap", p).h_eff)
        errs.append(np.max(np.abs(near - eff)))
    assert errs[0] > errs[1] > errs[2]
