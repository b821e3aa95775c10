"""Adiabatic elimination of far-detuned states and multiphoton resonance conditions.

The numeric reduction ``H_eff = H0 - B A^{-1} B^dagger`` is the primary
path.  The closed forms in :func:`closed_form_params` are the leading-order
expressions, useful as oracles and for fast sweeps.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg
from scipy.optimize import brentq

from .errors import ConfigurationError, DegenerateError, IllConditionedPartitionError
from .hamiltonian import (
    OperatorMatrix,
    build_hamiltonian,
    preset_spec,
    require,
    resonant_states,
    standard_seed,
)
from .hilbert import BasisState, enumerate_basis

DEFAULT_CONDITION_BOUND = 1e12
ASYMMETRY_WARNING = 1e-10

# canonical gate ids for the effective-model helpers
ALIASES = {
    "fredkin2": "fredkin-slow",
    "fredkin3": "fredkin",
    "fredkin-fast": "fredkin",
}
FREE_DETUNINGS = {
    "iswap": ("Delta4",),
    "fredkin-slow": ("Delta6",),
    "fredkin": ("Delta3", "Delta6"),
    "xrot": ("Delta3",),
}


def canonical_gate(gate: str) -> str:
    return ALIASES.get(gate, gate)


@dataclass(frozen=True)
class Partition:
    """Indices of kept (near-resonant) and eliminated (far-detuned) states."""

    p_indices: tuple[int, ...]
    q_indices: tuple[int, ...]

    def __post_init__(self):
        p, q = tuple(self.p_indices), tuple(self.q_indices)
        object.__setattr__(self, "p_indices", p)
        object.__setattr__(self, "q_indices", q)
        if set(p) & set(q):
            raise ValueError("P and Q overlap")
        if len(set(p)) != len(p) or len(set(q)) != len(q):
            raise ValueError("repeated index in partition")
        if sorted(p + q) != list(range(len(p) + len(q))):
            raise ValueError("P and Q must together cover 0..n-1")

    @classmethod
    def keep(cls, dim: int, p_indices: Sequence[int]) -> "Partition":
        p = tuple(p_indices)
        return cls(p, tuple(i for i in range(dim) if i not in p))

    @classmethod
    def from_states(cls, h: OperatorMatrix, states: Sequence[BasisState]) -> "Partition":
        idx = []
        for s in states:
            i = h.basis.index(s)
            if i is None:
                raise ValueError(f"state {s} is not in the basis")
            idx.append(i)
        return cls.keep(h.dim, idx)


@dataclass(frozen=True)
class EffectiveModel:
    """Reduced Hamiltonian on the kept states.

    ``shifts`` are the level shifts ``diag(H_eff) - diag(H0)``;
    ``residual_detunings`` are ``diag(H_eff) - H_eff[0, 0]`` and vanish at
    multiphoton resonance.
    """

    h_eff: np.ndarray
    p_states: tuple[BasisState, ...]
    shifts: np.ndarray
    residual_detunings: np.ndarray
    max_asymmetry: float
    condition: float

    @property
    def dim(self) -> int:
        return self.h_eff.shape[0]

    @property
    def g_eff(self) -> float:
        """First off-diagonal coupling (real part); the two-state effective coupling."""
        if self.dim < 2:
            raise DegenerateError("a one-state model has no effective coupling")
        return float(self.h_eff[0, 1].real)

    @property
    def delta_eff(self) -> float:
        return float(self.residual_detunings[-1])

    def couplings(self) -> np.ndarray:
        """Superdiagonal of ``h_eff`` (chain couplings)."""
        return np.diag(self.h_eff, 1).real.copy()


def schur_reduce(
    h: OperatorMatrix,
    partition: Partition,
    condition_bound: float = DEFAULT_CONDITION_BOUND,
) -> EffectiveModel:
    """Schur complement of the Q block: ``H0 - B A^{-1} B^dagger``.

    ``A^{-1} B^dagger`` is obtained with an LU solve, never an explicit
    inverse.  The result is symmetrized; an asymmetry above 1e-10 triggers a
    :class:`RuntimeWarning`.

    Raises
    ------
    IllConditionedPartitionError
        If the Q block is singular or its 2-norm condition number exceeds
        ``condition_bound``.
    """
    m = h.matrix
    p, q = list(partition.p_indices), list(partition.q_indices)
    if len(p) + len(q) != h.dim:
        raise ValueError("partition does not match the operator dimension")
    h0 = m[np.ix_(p, p)]
    if q:
        a = m[np.ix_(q, q)]
        b = m[np.ix_(p, q)]
        cond = float(np.linalg.cond(a))
        if not math.isfinite(cond) or cond > condition_bound:
            raise IllConditionedPartitionError(
                f"eliminated block has condition number {cond:.3g} > {condition_bound:.3g}; "
                "a near-resonant state is probably in Q"
            )
        x = scipy.linalg.solve(a, b.conj().T)
        raw = h0 - b @ x
    else:
        cond = 1.0
        raw = h0.copy()
    asym = float(np.max(np.abs(raw - raw.conj().T))) if raw.size else 0.0
    if asym > ASYMMETRY_WARNING:
        warnings.warn(f"effective Hamiltonian asymmetry {asym:.3g}", RuntimeWarning, stacklevel=2)
    heff = (raw + raw.conj().T) / 2
    diag = np.diag(heff).real
    return EffectiveModel(
        h_eff=heff,
        p_states=tuple(h.basis[i] for i in p),
        shifts=diag - np.diag(h0).real,
        residual_detunings=diag - diag[0],
        max_asymmetry=asym,
        condition=cond,
    )


def reduce_preset(
    gate: str, params: Mapping[str, float], condition_bound: float = DEFAULT_CONDITION_BOUND
) -> EffectiveModel:
    """Reduce the standard-seed sector of a gate onto its resonant states.

    Raises
    ------
    DegenerateError
        If a vanishing coupling disconnects a resonant state from the seed.
    """
    gate = canonical_gate(gate)
    spec = preset_spec(gate, params)
    h = build_hamiltonian(spec, enumerate_basis(spec, standard_seed(gate)))
    missing = [s for s in resonant_states(gate) if s not in h.basis]
    if missing:
        raise DegenerateError(f"{gate}: {missing[0]} is decoupled from the seed (a coupling vanishes)")
    return schur_reduce(h, Partition.from_states(h, resonant_states(gate)), condition_bound)


def _ratio(num: float, den: float) -> float:
    if den == 0.0:
        raise DegenerateError("zero detuning in a closed-form denominator")
    return num / den


def closed_form_params(gate: str, params: Mapping[str, float]) -> dict[str, float]:
    """Leading-order effective parameters.

    ========== ===================================================================
    gate       returned keys
    ========== ===================================================================
    iswap      ``g_eff = -g_ab g_bc g_cd g_da / (D1 D2 D3)``,
               ``Delta_eff = D4 + g_ab^2/D1 - g_da^2/D3``
    fredkin2   ``g_eff = -g_ab g_bc g_cd g_de g_ef g_fa / (D1 D2 D3 D4 D5)``,
               ``Delta_eff = D6 - g_fa^2/D5``
    fredkin3   ``g1 = g_ab g_bc g_cd/(D1 D2)``, ``g2 = g_de g_ef g_fa/(D4 D5)``,
               ``g_prime``, ``Delta1_eff``, ``Delta2_eff``
    xrot       ``g_eff = g_ab g_bc Omega / (2 D1 D2)``, ``Delta_eff = D3 + g_ab^2/D1``
    ========== ===================================================================

    The x-rotation coupling is returned with the sign that the numeric
    reduction produces (positive for positive parameters).

    Raises
    ------
    DegenerateError
        If a denominator vanishes.
    """
    gate = canonical_gate(gate)
    if gate == "iswap":
        gab, gbc, gcd, gda, d1, d2, d3, d4 = require(
            params, ("g_ab", "g_bc", "g_cd", "g_da", "Delta1", "Delta2", "Delta3", "Delta4")
        )
        return {
            "g_eff": -_ratio(gab * gbc * gcd * gda, d1 * d2 * d3),
            "Delta_eff": d4 + _ratio(gab**2, d1) - _ratio(gda**2, d3),
        }
    if gate == "fredkin-slow":
        g = require(params, ("g_ab", "g_bc", "g_cd", "g_de", "g_ef", "g_fa"))
        d1, d2, d3, d4, d5, d6 = require(params, [f"Delta{i}" for i in range(1, 7)])
        return {
            "g_eff": -_ratio(math.prod(g), d1 * d2 * d3 * d4 * d5),
            "Delta_eff": d6 - _ratio(g[5] ** 2, d5),
        }
    if gate == "fredkin":
        gab, gbc, gcd, gde, gef, gfa = require(params, ("g_ab", "g_bc", "g_cd", "g_de", "g_ef", "g_fa"))
        d1, d2, d3, d4, d5, d6 = require(params, [f"Delta{i}" for i in range(1, 7)])
        g1 = _ratio(gab * gbc * gcd, d1 * d2)
        g2 = _ratio(gde * gef * gfa, d4 * d5)
        return {
            "g1": g1,
            "g2": g2,
            "g_prime": math.hypot(g1, g2),
            "Delta1_eff": d3 + _ratio(gab**2, d1) - _ratio(gcd**2, d2) - _ratio(gde**2, d4),
            "Delta2_eff": d6 - _ratio(gfa**2, d5),
        }
    if gate == "xrot":
        gab, gbc, omega, d1, d2, d3 = require(params, ("g_ab", "g_bc", "omega", "Delta1", "Delta2", "Delta3"))
        return {
            "g_eff": _ratio(gab * gbc * omega, 2 * d1 * d2),
            "Delta_eff": d3 + _ratio(gab**2, d1),
        }
    raise ConfigurationError(f"no closed form for gate {gate!r}")


def iswap_exact_params(params: Mapping[str, float]) -> dict[str, float]:
    """Unapproximated two-state parameters of the iSWAP five-state chain."""
    gab, gbc, gcd, gda, d1, d2, d3, d4 = require(
        params, ("g_ab", "g_bc", "g_cd", "g_da", "Delta1", "Delta2", "Delta3", "Delta4")
    )
    det = d1 * d2 * d3 - d3 * gbc**2 - d1 * gcd**2
    return {
        "g_eff": -_ratio(gab * gbc * gcd * gda, det),
        "Delta_eff": d4 + _ratio(gab**2 * (d2 * d3 - gcd**2) - gda**2 * (d1 * d2 - gbc**2), det),
    }


def _direct_resonance(gate: str, params: Mapping[str, float]) -> dict[str, float]:
    if gate == "iswap":
        gab, gda, d1, d3 = require(params, ("g_ab", "g_da", "Delta1", "Delta3"))
        return {"Delta4": _ratio(gda**2, d3) - _ratio(gab**2, d1)}
    if gate == "fredkin-slow":
        gfa, d5 = require(params, ("g_fa", "Delta5"))
        return {"Delta6": _ratio(gfa**2, d5)}
    if gate == "fredkin":
        gab, gcd, gde, gfa, d1, d2, d4, d5 = require(
            params, ("g_ab", "g_cd", "g_de", "g_fa", "Delta1", "Delta2", "Delta4", "Delta5")
        )
        return {
            "Delta3": _ratio(gcd**2, d2) + _ratio(gde**2, d4) - _ratio(gab**2, d1),
            "Delta6": _ratio(gfa**2, d5),
        }
    if gate == "xrot":
        gab, d1 = require(params, ("g_ab", "Delta1"))
        return {"Delta3": -_ratio(gab**2, d1)}
    raise ConfigurationError(f"no resonance condition for gate {gate!r}")


@dataclass(frozen=True)
class Resonance:
    """Completed parameter set plus the verification reduction at that point."""

    gate: str
    params: dict[str, float]
    free: tuple[str, ...]
    model: EffectiveModel
    polish: str | None

    @property
    def residuals(self) -> np.ndarray:
        return self.model.residual_detunings[1:]


def solve_resonance(
    gate: str, params: Mapping[str, float], polish: str | None = None
) -> Resonance:
    """Set the free detunings of ``gate`` so that the kept states are degenerate.

    Without ``polish`` the leading-order conditions are evaluated directly.
    ``polish="newton"`` applies one Newton step on the numeric residual
    detunings of :func:`reduce_preset`.  ``polish="spectral"`` (gates with a
    single free detuning only) places the free detuning on the exact avoided
    crossing of the full sector, where both resonant states carry equal weight
    in the lower dressed state; this is needed for the six-photon Fredkin
    chain, whose coupling is far below the accuracy of any fixed-energy
    reduction.

    Values given for the free detunings in ``params`` are ignored.
    """
    gate = canonical_gate(gate)
    if gate not in FREE_DETUNINGS:
        raise ConfigurationError(f"no resonance condition for gate {gate!r}")
    free = FREE_DETUNINGS[gate]
    fixed = {k: v for k, v in params.items() if k not in free}
    solved = dict(fixed)
    solved.update(_direct_resonance(gate, fixed))
    if polish == "newton":
        solved = _newton_polish(gate, solved, free)
    elif polish == "spectral":
        solved = _spectral_polish(gate, solved, free)
    elif polish is not None:
        raise ValueError(f"unknown polish mode {polish!r}")
    model = reduce_preset(gate, solved)
    return Resonance(gate, solved, free, model, polish)


def _residuals(gate, params, free, x):
    p = dict(params)
    p.update(zip(free, x))
    return reduce_preset(gate, p).residual_detunings[1:]


def _newton_polish(gate, params, free):
    x0 = np.array([params[k] for k in free])
    r0 = _residuals(gate, params, free, x0)
    jac = np.empty((r0.size, x0.size))
    for j in range(x0.size):
        step = 1e-6 * max(1.0, abs(x0[j]))
        up, dn = x0.copy(), x0.copy()
        up[j] += step
        dn[j] -= step
        jac[:, j] = (_residuals(gate, params, free, up) - _residuals(gate, params, free, dn)) / (2 * step)
    try:
        x1 = x0 - np.linalg.solve(jac, r0)
    except np.linalg.LinAlgError:
        raise DegenerateError("resonance Jacobian is singular") from None
    out = dict(params)
    out.update(zip(free, x1.tolist()))
    return out


def _spectral_polish(gate, params, free):
    if len(free) != 1 or len(resonant_states(gate)) != 2:
        raise ConfigurationError("spectral polish needs exactly one free detuning and two resonant states")
    (name,) = free
    spec0 = preset_spec(gate, params)
    seed = standard_seed(gate)
    partner = resonant_states(gate)[1]

    def imbalance(x):
        p = dict(params)
        p[name] = x
        h = build_hamiltonian(preset_spec(gate, p), enumerate_basis(spec0, seed))
        i0, i1 = h.basis.index(seed), h.basis.index(partner)
        _, vecs = np.linalg.eigh(h.matrix)
        w0, w1 = np.abs(vecs[i0]) ** 2, np.abs(vecs[i1]) ** 2
        pair = np.sort(np.argsort(w0 + w1)[-2:])
        lower = pair[0]
        return float(w0[lower] - w1[lower])

    x0 = params[name]
    g_scale = abs(reduce_preset(gate, params).g_eff)
    width = max(g_scale, 1e-300)
    f0 = imbalance(x0)
    for _ in range(200):
        lo, hi = x0 - width, x0 + width
        flo, fhi = imbalance(lo), imbalance(hi)
        if flo * fhi < 0:
            break
        if flo * f0 < 0:
            hi, fhi = x0, f0
            break
        if fhi * f0 < 0:
            lo, flo = x0, f0
            break
        width *= 2
    else:
        raise DegenerateError(f"no avoided crossing found for {name} near {x0}")
    root = brentq(imbalance, lo, hi, xtol=1e-15 * max(1.0, abs(x0)), rtol=4 * np.finfo(float).eps, maxiter=200)
    out = dict(params)
    out[name] = float(root)
    return out
