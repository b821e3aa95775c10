"""Unitary propagation, analytic few-level solutions and atomic post-selection."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateError, StructureError, ValidationError
from .hamiltonian import OperatorMatrix
from .hilbert import Basis, BasisState

NORM_TOL = 1e-10
DEFAULT_PROBABILITY_FLOOR = 1e-12


@dataclass(frozen=True)
class StateVector:
    """Amplitudes over a basis.  Normalized unless ``normalized=False``."""

    basis: Basis
    amplitudes: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (len(self.basis),):
            raise StructureError(f"{amps.shape[0]} amplitudes for a basis of size {len(self.basis)}")
        if self.normalized and abs(np.linalg.norm(amps) - 1.0) > NORM_TOL:
            raise ValidationError(f"state norm {np.linalg.norm(amps)!r} differs from 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis_state(cls, basis: Basis, state: BasisState) -> "StateVector":
        i = basis.index(state)
        if i is None:
            raise StructureError(f"{state} is not in the basis")
        amps = np.zeros(len(basis), dtype=complex)
        amps[i] = 1.0
        return cls(basis, amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def amplitude(self, state: BasisState) -> complex:
        i = self.basis.index(state)
        return 0j if i is None else complex(self.amplitudes[i])

    def population(self, state: BasisState) -> float:
        return abs(self.amplitude(state)) ** 2

    def level_population(self, level: str) -> float:
        mask = np.array([s.level == level for s in self.basis], dtype=bool)
        return float(np.sum(np.abs(self.amplitudes[mask]) ** 2))


@dataclass(frozen=True)
class MeasurementOutcome:
    projected: StateVector | None
    success_probability: float
    target_level: str

    @property
    def succeeded(self) -> bool:
        return self.projected is not None


class Propagator:
    """``exp(-i H t)`` for a fixed Hermitian ``H`` via one eigendecomposition.

    Reusing the eigenbasis makes time grids and repeated gate times cheap.
    """

    def __init__(self, h: OperatorMatrix, tol: float = 1e-12):
        if not h.is_hermitian(tol):
            raise ValidationError(f"operator is not Hermitian (asymmetry {h.asymmetry():.3g})")
        self.basis = h.basis
        self.energies, self.vectors = np.linalg.eigh(h.matrix)

    def unitary(self, t: float) -> np.ndarray:
        v = self.vectors
        return (v * np.exp(-1j * self.energies * t)) @ v.conj().T

    def evolve(self, psi0: StateVector, t: float) -> StateVector:
        _same_basis(self.basis, psi0.basis)
        coeffs = self.vectors.conj().T @ psi0.amplitudes
        # written as a correction to psi0 so that t = 0 is reproduced exactly
        amps = psi0.amplitudes + self.vectors @ ((np.exp(-1j * self.energies * t) - 1.0) * coeffs)
        return StateVector(self.basis, amps, normalized=psi0.normalized)

    def trajectory(self, psi0: StateVector, times: Sequence[float]) -> np.ndarray:
        """Amplitudes at every time; shape ``(len(times), dim)``."""
        _same_basis(self.basis, psi0.basis)
        coeffs = self.vectors.conj().T @ psi0.amplitudes
        phases = np.exp(-1j * np.outer(np.asarray(times, dtype=float), self.energies)) - 1.0
        return psi0.amplitudes + (phases * coeffs) @ self.vectors.T


def evolve(h: OperatorMatrix, psi0: StateVector, t: float, method: str = "eigh", steps: int | None = None) -> StateVector:
    """Propagate ``psi0`` for time ``t`` (units of ``1/g``).

    ``method="eigh"`` is exact for time-independent ``h``.  ``method="rk4"``
    is a fixed-step fourth-order Runge-Kutta integrator kept as an
    independent cross-check; it is not norm-preserving to machine precision.
    """
    _same_basis(h.basis, psi0.basis)
    if method == "eigh":
        return Propagator(h).evolve(psi0, t)
    if method == "rk4":
        if not h.is_hermitian():
            raise ValidationError("operator is not Hermitian")
        return StateVector(h.basis, _rk4(h.matrix, psi0.amplitudes, t, steps), normalized=False)
    raise ValueError(f"unknown method {method!r}")


def _rk4(m: np.ndarray, y: np.ndarray, t: float, steps: int | None) -> np.ndarray:
    scale = float(np.linalg.norm(m, 2)) if m.size else 0.0
    if steps is None:
        steps = max(1, math.ceil(abs(t) * scale / 0.02))
    dt = t / steps
    f = lambda v: -1j * (m @ v)  # noqa: E731
    y = np.array(y, dtype=complex)
    for _ in range(steps):
        k1 = f(y)
        k2 = f(y + dt / 2 * k1)
        k3 = f(y + dt / 2 * k2)
        k4 = f(y + dt * k3)
        y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def analytic_two_level(g_eff: float, delta_eff: float, eta: float, t: float) -> np.ndarray:
    """Propagator of ``[[0, g_eff], [g_eff, delta_eff]]`` with the frame phase applied.

    Column ``k`` is the image of state ``k``.  Both transfer amplitudes are
    multiplied by ``exp(i eta t)``; at ``delta_eff = 0`` this gives
    ``|0> -> cos(g t)|0> - i sin(g t) e^{i eta t}|1>`` and the mirror image.
    The map is unitary only for ``eta t`` a multiple of pi; the phase is
    bookkeeping for a frame rotation, not dynamics.
    """
    half = delta_eff / 2
    rabi = math.hypot(g_eff, half)
    c = math.cos(rabi * t)
    s_over = t * np.sinc(rabi * t / math.pi)  # sin(rabi t)/rabi, finite at rabi = 0
    common = np.exp(-1j * half * t)
    transfer = -1j * g_eff * s_over * common * np.exp(1j * eta * t)
    return np.array(
        [
            [common * (c + 1j * half * s_over), transfer],
            [transfer, common * (c - 1j * half * s_over)],
        ]
    )


def analytic_three_level(g1: float, g2: float, eta: float, t: float) -> np.ndarray:
    """Amplitudes of (initial, intermediate, transferred) states for a resonant chain.

    Implements::

        [g2b^2 + g1b^2 cos(g' t)],  i g1b sin(g' t),  g1b g2b [cos(g' t) - 1] e^{i eta t}

    with ``g' = sqrt(g1^2 + g2^2)`` and ``gkb = gk / g'``.  The intermediate
    amplitude carries ``+i``; exact propagation of ``[[0,g1,0],[g1,0,g2],[0,g2,0]]``
    gives ``-i``, i.e. the intermediate state here is defined with opposite sign.
    """
    gp = math.hypot(g1, g2)
    if gp == 0.0:
        raise DegenerateError("both effective couplings vanish")
    b1, b2 = g1 / gp, g2 / gp
    c, s = math.cos(gp * t), math.sin(gp * t)
    return np.array([b2 * b2 + b1 * b1 * c, 1j * b1 * s, b1 * b2 * (c - 1) * np.exp(1j * eta * t)])


def project_atom(
    psi: StateVector, level: str, floor: float = DEFAULT_PROBABILITY_FLOOR
) -> MeasurementOutcome:
    """Post-select the atom in ``level`` and renormalize.

    A success probability below ``floor`` yields a failed outcome with
    ``projected=None`` (the operation has to be aborted).
    """
    mask = np.array([s.level == level for s in psi.basis], dtype=bool)
    if not mask.any():
        raise ValidationError(f"level {level!r} does not occur in the basis")
    kept = np.where(mask, psi.amplitudes, 0)
    prob = float(np.sum(np.abs(kept) ** 2))
    if prob < floor:
        return MeasurementOutcome(None, prob, level)
    return MeasurementOutcome(StateVector(psi.basis, kept / math.sqrt(prob)), prob, level)


def overlap(psi: StateVector, target: StateVector) -> complex:
    """``<target|psi>``."""
    _same_basis(psi.basis, target.basis)
    return complex(np.vdot(target.amplitudes, psi.amplitudes))


def fidelity(psi: StateVector, target: StateVector, squared: bool = True) -> float:
    """``|<target|psi>|^2`` or, with ``squared=False``, ``|<target|psi>|``.

    The unsquared form is the pure-state fidelity of Nielsen and Chuang and
    is what gate runs report.  Both are insensitive to global phase.
    """
    f = abs(overlap(psi, target))
    f = min(f, 1.0)
    return f * f if squared else f


def _same_basis(a: Basis, b: Basis) -> None:
    if a is not b and a.states != b.states:
        raise StructureError("operands are defined over different bases")
