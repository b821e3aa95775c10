"""Reachable product basis of cavity Fock states and atomic levels."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .errors import CutoffError, DimensionCapError, SpecError
from .system import SystemSpec

DEFAULT_MAX_DIMENSION = 4096


@dataclass(frozen=True, order=True)
class BasisState:
    """Photon numbers of the dynamical modes plus one atomic level.

    ``spectators`` holds occupations of modes that never couple to the atom
    (such as a dual-rail partner mode that is far off resonance).  They are
    carried along unchanged so that logical states can be decoded, but they
    do not enter any Hamiltonian.
    """

    photons: tuple[int, ...]
    level: str
    spectators: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "photons", tuple(int(n) for n in self.photons))
        object.__setattr__(self, "spectators", tuple(int(n) for n in self.spectators))
        if any(n < 0 for n in self.photons + self.spectators):
            raise CutoffError(f"negative photon number in {self}")

    def __str__(self):
        occ = "".join(map(str, self.photons))
        if self.spectators:
            occ += "|" + "".join(map(str, self.spectators))
        return f"|{occ},{self.level}>"


@dataclass(frozen=True)
class Basis:
    """Ordered, duplicate-free list of basis states; the seed comes first."""

    states: tuple[BasisState, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        index = {s: i for i, s in enumerate(self.states)}
        if len(index) != len(self.states):
            raise SpecError("basis contains duplicate states")
        object.__setattr__(self, "_index", index)

    def __len__(self):
        return len(self.states)

    def __iter__(self) -> Iterator[BasisState]:
        return iter(self.states)

    def __getitem__(self, i: int) -> BasisState:
        return self.states[i]

    def __contains__(self, state):
        return state in self._index

    def index(self, state: BasisState) -> int | None:
        return self._index.get(state)


def index_of(basis: Basis, state: BasisState) -> int | None:
    """Position of ``state`` in ``basis`` or ``None`` when it is absent."""
    return basis.index(state)


def total_excitation(spec: SystemSpec, state: BasisState) -> int:
    """Photons in the dynamical modes plus the excitation weight of the level."""
    try:
        weight = spec.weights[state.level]
    except KeyError:
        raise SpecError(f"unknown level {state.level!r}") from None
    return sum(state.photons) + weight


def check_state(spec: SystemSpec, state: BasisState) -> None:
    if state.level not in spec.weights:
        raise SpecError(f"unknown level {state.level!r}")
    if len(state.photons) != len(spec.modes):
        raise SpecError(
            f"state {state} has {len(state.photons)} occupations for {len(spec.modes)} modes"
        )
    for n, mode in zip(state.photons, spec.modes):
        if n > mode.cutoff:
            raise CutoffError(f"state {state}: mode {mode.label!r} holds {n} > cutoff {mode.cutoff}")


def neighbours(spec: SystemSpec, state: BasisState) -> Iterator[tuple[int, BasisState]]:
    """Yield ``(coupling index, state)`` for every state one coupling away."""
    cutoffs = spec.cutoffs
    for k, c in enumerate(spec.couplings):
        if c.strength == 0.0:
            continue
        if state.level == c.lower:
            if c.classical:
                yield k, BasisState(state.photons, c.upper, state.spectators)
            elif state.photons[c.mode] >= 1:
                yield k, _shifted(state, c.mode, -1, c.upper)
        elif state.level == c.upper:
            if c.classical:
                yield k, BasisState(state.photons, c.lower, state.spectators)
            elif state.photons[c.mode] < cutoffs[c.mode]:
                yield k, _shifted(state, c.mode, +1, c.lower)


def _shifted(state: BasisState, mode: int, dn: int, level: str) -> BasisState:
    photons = list(state.photons)
    photons[mode] += dn
    return BasisState(tuple(photons), level, state.spectators)


def enumerate_basis(
    spec: SystemSpec, seed: BasisState, max_dimension: int = DEFAULT_MAX_DIMENSION
) -> Basis:
    """Connected component of ``seed`` under the off-diagonal couplings of ``spec``.

    The search is breadth first.  States discovered in the same generation
    are ordered by the declaration index of the coupling that first reached
    them, then by photon vector, then by level order.  Couplings of strength
    zero do not connect anything.

    Raises
    ------
    CutoffError
        If the seed exceeds a Fock cutoff.
    DimensionCapError
        If more than ``max_dimension`` states are reachable.
    """
    check_state(spec, seed)
    found = {seed}
    order = [seed]
    generation = [seed]
    while generation:
        discovered: dict[BasisState, int] = {}
        for state in generation:
            for k, new in neighbours(spec, state):
                if new in found:
                    continue
                if new not in discovered or k < discovered[new]:
                    discovered[new] = k
        generation = sorted(
            discovered,
            key=lambda s: (discovered[s], s.photons, spec.level_index(s.level)),
        )
        found.update(generation)
        order.extend(generation)
        if len(order) > max_dimension:
            raise DimensionCapError(
                f"reachable subspace exceeds the maximum dimension {max_dimension}"
            )
    return Basis(tuple(order))
