import pytest
from hypothesis import given, settings, strategies as st

from cavitygates.errors import CutoffError, DimensionCapError, SpecError
from cavitygates.gates import encode
from cavitygates.hamiltonian import preset_spec, standard_seed
from cavitygates.hilbert import BasisState, enumerate_basis, index_of, neighbours, total_excitation
from cavitygates.system import Coupling, Diagonal, Mode, SystemSpec

FREDKIN = {**{k: 1.0 for k in ("g_ab", "g_bc", "g_cd", "g_de", "g_ef", "g_fa")},
           **{f"Delta{i}": 20.0 for i in range(1, 7)}}
ISWAP = {**{k: 1.0 for k in ("g_ab", "g_bc", "g_cd", "g_da")}, **{f"Delta{i}": 10.0 for i in range(1, 5)}}


def fredkin_basis():
    spec = preset_spec("fredkin", FREDKIN)
    return spec, enumerate_basis(spec, standard_seed("fredkin"))


def test_fredkin_sector_has_nine_states():
    _, basis = fredkin_basis()
    assert len(basis) == 9
    expected = [
        ((1, 0, 1, 1, 0), "a"),
        ((0, 0, 1, 1, 0), "b"),
        ((0, 1, 1, 1, 0), "c"),
        ((0, 1, 0, 1, 0), "d"),
        ((1, 1, 0, 1, 0), "e"),
        ((1, 1, 0, 0, 0), "f"),
        ((1, 1, 0, 0, 1), "a"),
        ((0, 1, 0, 0, 1), "b"),
        ((0, 2, 0, 0, 1), "c"),  # two photons in mode 2
    ]
    assert [(s.photons, s.level) for s in basis] == expected


def test_iswap_sector_order():
    spec = preset_spec("iswap", ISWAP)
    basis = enumerate_basis(spec, standard_seed("iswap"))
    assert [str(s) for s in basis] == ["|1010,a>", "|0010,b>", "|0110,c>", "|0100,d>", "|0101,a>"]


def test_zero_couplings_give_single_state():
    spec = preset_spec("fredkin", {**FREDKIN, **{k: 0.0 for k in ("g_ab", "g_bc", "g_cd", "g_de", "g_ef", "g_fa")}})
    basis = enumerate_basis(spec, standard_seed("fredkin"))
    assert list(basis) == [standard_seed("fredkin")]


def test_index_of():
    _, basis = fredkin_basis()
    seed = standard_seed("fredkin")
    assert index_of(basis, seed) == 0
    i = index_of(basis, encode("fredkin", (1, 1, 0)))
    assert i is not None and 0 <= i < 9
    assert index_of(basis, BasisState((1, 1, 1, 1, 1), "f", (1,))) is None


def test_total_excitation_examples():
    spec, _ = fredkin_basis()
    assert spec.weights == {"a": 0, "b": 1, "c": 0, "d": 1, "e": 0, "f": 1}
    assert total_excitation(spec, standard_seed("fredkin")) == 3
    assert total_excitation(spec, BasisState((0, 1, 0, 1, 0), "d", (0,))) == 3
    assert total_excitation(spec, BasisState((0, 0, 0, 0, 0), "a")) == 0


def test_seed_outside_cutoff():
    spec = preset_spec("iswap", ISWAP)
    with pytest.raises(CutoffError):
        enumerate_basis(spec, BasisState((3, 0, 1, 0), "a"))


def test_dimension_cap():
    spec = preset_spec("fredkin", FREDKIN)
    with pytest.raises(DimensionCapError):
        enumerate_basis(spec, standard_seed("fredkin"), max_dimension=4)


def test_odd_cycle_rejected():
    # a triangle of cavity couplings cannot carry consistent weights
    with pytest.raises(SpecError):
        SystemSpec(
            ("a", "b", "c"),
            (Mode("1"),),
            (Coupling("b", "a", 0, 1.0), Coupling("c", "b", 0, 1.0), Coupling("a", "c", 0, 1.0)),
            Diagonal((0.0,)),
        )


def test_basis_is_deterministic():
    spec, basis = fredkin_basis()
    assert enumerate_basis(spec, standard_seed("fredkin")).states == basis.states


@pytest.mark.parametrize("gate, params", [("fredkin", FREDKIN), ("iswap", ISWAP)])
def test_closure_and_idempotence(gate, params):
    spec = preset_spec(gate, params)
    basis = enumerate_basis(spec, standard_seed(gate))
    members = set(basis)
    for s in basis:
        assert all(t in members for _, t in neighbours(spec, s))
        assert set(enumerate_basis(spec, s)) == members


xrot_params = {"g_ab": 1.0, "g_bc": 1.0, "omega": 2.0, "Delta1": 50.0, "Delta2": 50.0, "Delta3": -0.02}


@settings(max_examples=30, deadline=None)
@given(
    gate=st.sampled_from(["iswap", "fredkin", "xrot"]),
    data=st.data(),
)
def test_total_excitation_constant_on_sector(gate, data):
    arity = {"iswap": 2, "fredkin": 3, "xrot": 1}[gate]
    bits = data.draw(st.tuples(*[st.integers(0, 1)] * arity))
    params = {"iswap": ISWAP, "fredkin": FREDKIN, "xrot": xrot_params}[gate]
    spec = preset_spec(gate, params)
    basis = enumerate_basis(spec, encode(gate, bits))
    assert len({total_excitation(spec, s) for s in basis}) == 1
