"""Interaction-picture Hamiltonians over a reachable basis, and gate presets.

All presets are built directly in their time-independent rotating frame;
the frame transformations that lead there are not performed at runtime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ConfigurationError, SpecError, StructureError
from .hilbert import Basis, BasisState, check_state, enumerate_basis, neighbours
from .system import Coupling, Diagonal, Mode, SystemSpec

HERMITIAN_TOL = 1e-12

GATES = ("iswap", "fredkin", "fredkin-slow", "xrot", "zrot")

COUPLING_NAMES: dict[str, tuple[str, ...]] = {
    "iswap": ("g_ab", "g_bc", "g_cd", "g_da"),
    "fredkin": ("g_ab", "g_bc", "g_cd", "g_de", "g_ef", "g_fa"),
    "xrot": ("g_ab", "g_bc", "omega"),
    "zrot": ("g",),
}
DETUNING_NAMES: dict[str, tuple[str, ...]] = {
    "iswap": ("Delta1", "Delta2", "Delta3", "Delta4"),
    "fredkin": ("Delta1", "Delta2", "Delta3", "Delta4", "Delta5", "Delta6"),
    "xrot": ("Delta1", "Delta2", "Delta3"),
    "zrot": ("Delta1",),
}
COUPLING_NAMES["fredkin-slow"] = COUPLING_NAMES["fredkin"]
DETUNING_NAMES["fredkin-slow"] = DETUNING_NAMES["fredkin"]


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense Hermitian matrix over a basis."""

    basis: Basis
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        n = len(self.basis)
        if m.shape != (n, n):
            raise StructureError(f"matrix shape {m.shape} does not match basis of size {n}")
        if not np.all(np.isfinite(m)):
            raise SpecError("operator has non-finite entries")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def asymmetry(self) -> float:
        m = self.matrix
        return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.matrix)))) if self.matrix.size else 1.0
        return self.asymmetry() <= tol * scale

    def restricted(self, rows: Sequence[int], cols: Sequence[int] | None = None) -> np.ndarray:
        cols = rows if cols is None else cols
        return self.matrix[np.ix_(list(rows), list(cols))]


def build_hamiltonian(spec: SystemSpec, basis: Basis) -> OperatorMatrix:
    """Matrix of ``spec`` over ``basis``, re-zeroed so the first state has energy 0.

    Cavity couplings contribute ``g sqrt(n) e^{i phase}`` between the upper
    level state and the lower level state, ``n`` being the occupation of the
    coupled mode in the lower level (higher photon) state.  Classical couplings
    contribute ``g e^{i phase}``.

    Raises
    ------
    StructureError
        If ``basis`` is not closed under the couplings of ``spec`` or contains
        states foreign to it.
    """
    n = len(basis)
    h = np.zeros((n, n), dtype=complex)
    for i, state in enumerate(basis):
        try:
            check_state(spec, state)
        except SpecError as exc:
            raise StructureError(f"basis does not belong to spec: {exc}") from None
        h[i, i] = spec.diagonal.energy(state.photons, state.level)
        for k, other in neighbours(spec, state):
            c = spec.couplings[k]
            j = basis.index(other)
            if j is None:
                raise StructureError(f"basis is not closed: {state} couples to {other}")
            if state.level != c.upper:
                continue  # the entry is filled from the upper-level side
            amp = c.strength * np.exp(1j * c.phase)
            if not c.classical:
                amp *= math.sqrt(other.photons[c.mode])
            h[i, j] += amp
            h[j, i] += np.conj(amp)
    if n:
        h -= h[0, 0].real * np.eye(n)
    return OperatorMatrix(basis, h)


def excitation_operator(spec: SystemSpec, basis: Basis) -> OperatorMatrix:
    """Diagonal total-excitation operator over ``basis``."""
    diag = [sum(s.photons) + spec.weights[s.level] for s in basis]
    return OperatorMatrix(basis, np.diag(np.asarray(diag, dtype=complex)))


def detuning_chain(direction: str, values: Sequence[float]) -> np.ndarray:
    """Convert per-transition detunings to cumulative ones or back.

    ``"small_to_big"`` returns ``Delta_j = sum_{i<=j} (-1)^(i+1) delta_i``;
    ``"big_to_small"`` is its exact inverse.

    >>> detuning_chain("small_to_big", [1, 2, 3, 4]).tolist()
    [1.0, -1.0, 2.0, -2.0]
    """
    v = np.asarray(values, dtype=float)
    signs = np.where(np.arange(v.size) % 2 == 0, 1.0, -1.0)
    if direction == "small_to_big":
        return np.cumsum(signs * v)
    if direction == "big_to_small":
        return signs * np.diff(v, prepend=0.0)
    raise ValueError(f"unknown direction {direction!r}")


def require(params: Mapping[str, float], names: Sequence[str]) -> list[float]:
    missing = [k for k in names if k not in params or params[k] is None]
    if missing:
        raise ConfigurationError(f"missing parameter(s): {', '.join(missing)}")
    out = []
    for k in names:
        try:
            out.append(float(params[k]))
        except (TypeError, ValueError):
            raise ConfigurationError(f"parameter {k} is not a number: {params[k]!r}") from None
    return out


def fredkin_eta(params: Mapping[str, float]) -> float:
    """Residual frame rotation rate ``Delta1 - Delta3 + Delta4`` of the Fredkin frame."""
    d1, d3, d4 = require(params, ("Delta1", "Delta3", "Delta4"))
    return d1 - d3 + d4


def fredkin_frame_charge(state: BasisState) -> int:
    """Eigenvalue of ``n1 + n2 + n3 + n6 - |a><a| - |c><c|`` on a Fredkin state.

    Multiplying each amplitude by ``exp(i * charge * eta * t)`` undoes the
    second frame rotation and exposes the coupling phase ``e^{i eta t}``.
    """
    n1, n2, n3, _n5, n6 = state.photons
    return n1 + n2 + n3 + n6 - (state.level in ("a", "c"))


def preset_spec(gate: str, params: Mapping[str, float], cutoff: int = 2) -> SystemSpec:
    """Interaction-picture :class:`SystemSpec` of one of the gate schemes.

    ``params`` maps the names in :data:`COUPLING_NAMES` and
    :data:`DETUNING_NAMES` to values in units of ``g``.  ``Delta*`` are the
    cumulative multiphoton detunings.
    """
    if gate not in GATES:
        raise ConfigurationError(f"unknown gate {gate!r}; expected one of {', '.join(GATES)}")
    couplings = dict(zip(COUPLING_NAMES[gate], require(params, COUPLING_NAMES[gate])))
    deltas = require(params, DETUNING_NAMES[gate])
    builder = _BUILDERS["fredkin" if gate.startswith("fredkin") else gate]
    return builder(couplings, deltas, cutoff)


def _iswap(g, d, cutoff):
    d1, d2, d3, d4 = d
    modes = tuple(Mode(str(i), cutoff) for i in (1, 2, 3, 4))
    couplings = (
        Coupling("b", "a", 0, g["g_ab"]),
        Coupling("b", "c", 1, g["g_bc"]),
        Coupling("d", "c", 2, g["g_cd"]),
        Coupling("d", "a", 3, g["g_da"]),
    )
    diag = Diagonal((-d1, d2 - d1, d2 - d3, d4 - d3))
    return SystemSpec(("a", "b", "c", "d"), modes, couplings, diag, name="iswap")


def _fredkin(g, d, cutoff):
    d1, d2, d3, d4, d5, d6 = d
    eta = d1 - d3 + d4
    # dynamical modes 1, 2, 3, 5, 6; mode 4 never couples
    modes = tuple(Mode(str(i), cutoff) for i in (1, 2, 3, 5, 6))
    couplings = (
        Coupling("b", "a", 0, g["g_ab"]),
        Coupling("b", "c", 1, g["g_bc"]),
        Coupling("d", "c", 2, g["g_cd"]),
        Coupling("d", "e", 0, g["g_de"]),
        Coupling("f", "e", 3, g["g_ef"]),
        Coupling("f", "a", 4, g["g_fa"]),
    )
    diag = Diagonal(
        (-d1 + eta, d2 - d1 + eta, d2 - d3 + eta, d4 - d5, d6 - d5 + eta),
        {"a": -eta, "c": -eta},
    )
    return SystemSpec(("a", "b", "c", "d", "e", "f"), modes, couplings, diag, name="fredkin")


def _xrot(g, d, cutoff):
    s1, s2, s3 = detuning_chain("big_to_small", d)
    modes = (Mode("1", cutoff), Mode("2", cutoff))
    couplings = (
        Coupling("b", "a", 0, g["g_ab"]),
        Coupling("b", "c", 1, g["g_bc"]),
        Coupling("a", "c", None, g["omega"] / 2),
    )
    diag = Diagonal(
        (-s1 - s3 / 2, -s2 + s3 / 2),
        {"a": s1 + s3 / 2, "b": s1, "c": s1 - s3 / 2},
    )
    return SystemSpec(("a", "b", "c"), modes, couplings, diag, name="xrot")


def _zrot(g, d, cutoff):
    (delta,) = d
    modes = (Mode("1", cutoff),)
    couplings = (Coupling("b", "a", 0, g["g"]),)
    return SystemSpec(("a", "b"), modes, couplings, Diagonal((-delta,)), name="zrot")


_BUILDERS = {"iswap": _iswap, "fredkin": _fredkin, "xrot": _xrot, "zrot": _zrot}


def standard_seed(gate: str) -> BasisState:
    """Seed state whose sector holds the gate's resonant transition."""
    return _SEEDS[_family(gate)]


def resonant_states(gate: str) -> tuple[BasisState, ...]:
    """Near-resonant states kept when reducing the standard-seed sector.

    The first entry is always :func:`standard_seed`.
    """
    return _RESONANT[gate if gate in _RESONANT else _family(gate)]


def _family(gate: str) -> str:
    if gate not in GATES:
        raise ConfigurationError(f"unknown gate {gate!r}")
    return "fredkin" if gate.startswith("fredkin") else gate


_SEEDS = {
    "iswap": BasisState((1, 0, 1, 0), "a"),
    "fredkin": BasisState((1, 0, 1, 1, 0), "a", (0,)),
    "xrot": BasisState((1, 0), "a"),
    "zrot": BasisState((1,), "a", (0,)),
}
_RESONANT = {
    "iswap": (_SEEDS["iswap"], BasisState((0, 1, 0, 1), "a")),
    "fredkin-slow": (_SEEDS["fredkin"], BasisState((1, 1, 0, 0, 1), "a", (0,))),
    "fredkin": (
        _SEEDS["fredkin"],
        BasisState((0, 1, 0, 1, 0), "d", (0,)),
        BasisState((1, 1, 0, 0, 1), "a", (0,)),
    ),
    "xrot": (_SEEDS["xrot"], BasisState((0, 1), "a")),
    "zrot": (_SEEDS["zrot"],),
}


def preset_hamiltonian(
    gate: str, params: Mapping[str, float], seed: BasisState | None = None
) -> OperatorMatrix:
    """Convenience: preset spec, reachable basis from ``seed`` and its matrix."""
    spec = preset_spec(gate, params)
    basis = enumerate_basis(spec, standard_seed(gate) if seed is None else seed)
    return build_hamiltonian(spec, basis)
