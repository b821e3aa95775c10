"""Declarative description of an atom coupled to several cavity modes.

A :class:`SystemSpec` lists the atomic levels, the cavity modes (each with a
Fock cutoff), the dipole couplings and the interaction-picture diagonal.  It
carries no basis; :mod:`cavitygates.hilbert` enumerates one from a seed state.

Energies are in units of a reference coupling ``g`` throughout.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import SpecError

CLASSICAL = None
"""Mode value marking a coupling driven by a classical field."""


@dataclass(frozen=True)
class Mode:
    label: str
    cutoff: int = 2

    def __post_init__(self):
        if self.cutoff < 0:
            raise SpecError(f"mode {self.label!r}: negative cutoff {self.cutoff}")


@dataclass(frozen=True)
class Coupling:
    """Dipole coupling ``g (a sigma_{upper,lower} + h.c.)``.

    With a cavity mode, the lower level plus one photon in ``mode`` is
    exchanged with the upper level.  With ``mode=None`` the transition is
    driven classically and ``strength`` is the half Rabi frequency.
    """

    upper: str
    lower: str
    mode: int | None
    strength: float
    phase: float = 0.0

    def __post_init__(self):
        if self.upper == self.lower:
            raise SpecError(f"coupling {self.upper!r}-{self.lower!r} joins a level to itself")
        if not math.isfinite(self.strength) or not math.isfinite(self.phase):
            raise SpecError(f"coupling {self.upper!r}-{self.lower!r} has a non-finite value")

    @property
    def classical(self) -> bool:
        return self.mode is None


@dataclass(frozen=True)
class Diagonal:
    """Linear energy function ``sum_i c_i n_i + e[level] + constant``."""

    mode_coefficients: tuple[float, ...]
    level_coefficients: Mapping[str, float] = field(default_factory=dict)
    constant: float = 0.0

    def energy(self, photons: Sequence[int], level: str) -> float:
        e = self.constant + self.level_coefficients.get(level, 0.0)
        for c, n in zip(self.mode_coefficients, photons):
            e += c * n
        return e


@dataclass(frozen=True)
class SystemSpec:
    """Levels, modes, couplings and diagonal of one atom-cavity system.

    Excitation weights of the levels are derived on construction: the first
    level gets weight 0 and every cavity coupling forces
    ``weight(upper) = weight(lower) + 1`` (classical couplings force equal
    weights).  A contradiction raises :class:`SpecError`.
    """

    levels: tuple[str, ...]
    modes: tuple[Mode, ...]
    couplings: tuple[Coupling, ...]
    diagonal: Diagonal
    name: str = ""
    weights: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        object.__setattr__(self, "modes", tuple(self.modes))
        object.__setattr__(self, "couplings", tuple(self.couplings))
        if not self.levels:
            raise SpecError("a system needs at least one atomic level")
        if len(set(self.levels)) != len(self.levels):
            raise SpecError(f"duplicate level names in {self.levels}")
        known = set(self.levels)
        for c in self.couplings:
            if c.upper not in known or c.lower not in known:
                raise SpecError(f"coupling {c.upper!r}-{c.lower!r} references an undeclared level")
            if c.mode is not None and not 0 <= c.mode < len(self.modes):
                raise SpecError(f"coupling {c.upper!r}-{c.lower!r} references undeclared mode {c.mode}")
        d = self.diagonal
        if len(d.mode_coefficients) != len(self.modes):
            raise SpecError(
                f"diagonal has {len(d.mode_coefficients)} mode coefficients for {len(self.modes)} modes"
            )
        for lvl in d.level_coefficients:
            if lvl not in known:
                raise SpecError(f"diagonal references undeclared level {lvl!r}")
        values = [*d.mode_coefficients, *d.level_coefficients.values(), d.constant]
        if not all(math.isfinite(v) for v in values):
            raise SpecError("diagonal coefficients must be finite")
        object.__setattr__(self, "weights", _derive_weights(self.levels, self.couplings))

    @property
    def cutoffs(self) -> tuple[int, ...]:
        return tuple(m.cutoff for m in self.modes)

    def level_index(self, level: str) -> int:
        try:
            return self.levels.index(level)
        except ValueError:
            raise SpecError(f"unknown level {level!r}") from None


def _derive_weights(levels: Sequence[str], couplings: Sequence[Coupling]) -> dict[str, int]:
    adjacency: dict[str, list[tuple[str, int]]] = {lvl: [] for lvl in levels}
    for c in couplings:
        step = 0 if c.classical else 1
        adjacency[c.lower].append((c.upper, step))
        adjacency[c.upper].append((c.lower, -step))

    weights: dict[str, int] = {}
    for root in levels:
        if root in weights:
            continue
        weights[root] = 0
        queue = deque([root])
        while queue:
            lvl = queue.popleft()
            for other, step in adjacency[lvl]:
                w = weights[lvl] + step
                if other not in weights:
                    weights[other] = w
                    queue.append(other)
                elif weights[other] != w:
                    raise SpecError(
                        f"couplings do not conserve excitation: level {other!r} "
                        f"needs weight {weights[other]} and {w}"
                    )
    # disconnected components are shifted so that no weight is negative
    low = min(weights.values())
    return {lvl: w - low for lvl, w in weights.items()}
