"""Dual-rail logical encoding and the gate catalogue.

Each logical qubit is one photon shared between two cavity modes: the
photon in the first mode of the pair is logical 1, in the second mode
logical 0.  The ancilla atom enters and should leave in level ``a``.

Qubit pairs per gate (physical mode numbers)::

    iswap         q1 = (1, 2)   q2 = (4, 3)
    fredkin       q1 = (1, 4)   q2 = (2, 3)   q3 = (5, 6)    mode 4 is a spectator
    xrot          q  = (1, 2)
    zrot          q  = (1, 2)                                mode 2 is a spectator
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Mapping, Sequence

import numpy as np

from .dynamics import MeasurementOutcome, Propagator, StateVector, fidelity, overlap, project_atom
from .effective import closed_form_params, reduce_preset, solve_resonance
from .errors import ConfigurationError, DegenerateError, StructureError, ValidationError
from .hamiltonian import (
    COUPLING_NAMES,
    DETUNING_NAMES,
    GATES,
    build_hamiltonian,
    fredkin_eta,
    fredkin_frame_charge,
    preset_spec,
    resonant_states,
)
from .hilbert import BasisState, enumerate_basis

PHASE_MODES = ("population", "strict")
ANCILLA_LEVEL = "a"

# (active mode count, spectator count, qubit pairs); a slot is ("m", i) or ("s", i)
_LAYOUT = {
    "iswap": (4, 0, ((("m", 0), ("m", 1)), (("m", 3), ("m", 2)))),
    "fredkin": (5, 1, ((("m", 0), ("s", 0)), (("m", 1), ("m", 2)), (("m", 3), ("m", 4)))),
    "xrot": (2, 0, ((("m", 0), ("m", 1)),)),
    "zrot": (1, 1, ((("m", 0), ("s", 0)),)),
}
_LAYOUT["fredkin-slow"] = _LAYOUT["fredkin"]


def _gate(gate: str) -> str:
    if gate in ("fredkin-fast", "fredkin3"):
        return "fredkin"
    if gate == "fredkin2":
        return "fredkin-slow"
    if gate not in GATES:
        raise ConfigurationError(f"unknown gate {gate!r}; expected one of {', '.join(GATES)}")
    return gate


def arity(gate: str) -> int:
    return len(_LAYOUT[_gate(gate)][2])


def _check_bits(gate: str, bits: Sequence[int]) -> tuple[int, ...]:
    bits = tuple(int(b) for b in bits)
    if len(bits) != arity(gate):
        raise ValidationError(f"{gate} acts on {arity(gate)} qubit(s), got {len(bits)} bit(s)")
    if any(b not in (0, 1) for b in bits):
        raise ValidationError(f"logical bits must be 0 or 1, got {bits}")
    return bits


def encode(gate: str, bits: Sequence[int]) -> BasisState:
    """Physical state of logical ``bits`` with the atom in level ``a``.

    >>> str(encode("fredkin", (1, 0, 1)))
    '|10110|0,a>'
    """
    gate = _gate(gate)
    bits = _check_bits(gate, bits)
    n_active, n_spec, pairs = _LAYOUT[gate]
    slots = {"m": [0] * n_active, "s": [0] * n_spec}
    for b, (first, second) in zip(bits, pairs):
        slots[first[0]][first[1]] = b
        slots[second[0]][second[1]] = 1 - b
    return BasisState(tuple(slots["m"]), ANCILLA_LEVEL, tuple(slots["s"]))


def decode(gate: str, state: BasisState) -> tuple[int, ...] | None:
    """Logical bits of ``state``, or ``None`` if it is not a valid codeword.

    A codeword needs exactly one photon in every pair and the atom in ``a``.
    """
    gate = _gate(gate)
    n_active, n_spec, pairs = _LAYOUT[gate]
    if state.level != ANCILLA_LEVEL or len(state.photons) != n_active or len(state.spectators) != n_spec:
        return None
    slots = {"m": state.photons, "s": state.spectators}
    bits = []
    for first, second in pairs:
        occ = (slots[first[0]][first[1]], slots[second[0]][second[1]])
        if occ == (1, 0):
            bits.append(1)
        elif occ == (0, 1):
            bits.append(0)
        else:
            return None
    return tuple(bits)


def logical_amplitudes(gate: str, psi: StateVector) -> dict[tuple[int, ...], complex]:
    """Amplitudes of ``psi`` on the valid codewords, keyed by logical bits."""
    out = {}
    for state, amp in zip(psi.basis, psi.amplitudes):
        bits = decode(gate, state)
        if bits is not None:
            out[bits] = complex(amp)
    return out


def physical_label(gate: str, state: BasisState) -> str:
    """Occupations in physical mode order, grouped per qubit, e.g. ``10,01,10,a``."""
    gate = _gate(gate)
    _, _, pairs = _LAYOUT[gate]
    slots = {"m": state.photons, "s": state.spectators}
    groups = ["".join(str(slots[k][i]) for k, i in pair) for pair in pairs]
    return ",".join(groups + [state.level])


def ideal_output(gate: str, bits: Sequence[int], theta: float | None = None) -> list[tuple[complex, tuple[int, ...]]]:
    """Truth-table image of ``bits`` as ``[(amplitude, bits), ...]``.

    For ``xrot`` the image is ``cos(theta)|b> - i sin(theta)|1-b>``; for
    ``zrot`` logical 1 picks up ``exp(i theta)``.
    """
    gate = _gate(gate)
    bits = _check_bits(gate, bits)
    if gate == "iswap":
        if bits in ((0, 1), (1, 0)):
            return [(1j, bits[::-1])]
        return [(1.0, bits)]
    if gate.startswith("fredkin"):
        if bits[0] == 1:
            return [(1.0, (1, bits[2], bits[1]))]
        return [(1.0, bits)]
    if theta is None:
        raise ConfigurationError(f"{gate} needs a rotation angle")
    if gate == "xrot":
        (b,) = bits
        out = [(math.cos(theta), (b,)), (-1j * math.sin(theta), (1 - b,))]
        return [(a, s) for a, s in out if a != 0]
    return [(np.exp(1j * theta) if bits[0] else 1.0, bits)]


def reference_params(gate: str, delta: float = 20.0, g: float = 1.0, **overrides: float) -> dict[str, float]:
    """Fully resolved parameters with equal couplings and equal large detunings.

    Free detunings are resonance-solved: by the leading-order conditions for
    ``iswap``, ``fredkin`` and ``xrot``, and on the exact avoided crossing for
    ``fredkin-slow``.  ``xrot`` uses ``omega = 2 g``.
    """
    gate = _gate(gate)
    params: dict[str, float] = {name: g for name in COUPLING_NAMES[gate]}
    if gate == "xrot":
        params["omega"] = 2 * g
    for name in DETUNING_NAMES[gate]:
        params[name] = delta
    params.update(overrides)
    if gate == "zrot":
        return params
    polish = "spectral" if gate == "fredkin-slow" else None
    return solve_resonance(gate, params, polish=polish).params


def effective_couplings(gate: str, params: Mapping[str, float]) -> dict[str, float]:
    """Effective parameters that set the gate time (see :func:`interaction_time`)."""
    gate = _gate(gate)
    if gate == "fredkin":
        return closed_form_params("fredkin3", params)
    if gate == "zrot":
        g, delta = float(params["g"]), float(params["Delta1"])
        return {"shift": dressed_shift(g, delta)}
    model = reduce_preset(gate, params)
    return {"g_eff": model.g_eff, "Delta_eff": model.delta_eff}


def interaction_time(
    gate: str, params: Mapping[str, float], theta: float | None = None, phase_mode: str = "population"
) -> float:
    """Gate time in units of ``1/g``.

    ``fredkin``
        ``pi / g'`` with ``g'`` from the leading-order three-state couplings.
    ``fredkin-slow``, ``iswap``
        ``pi / (2 |g_eff|)`` with ``g_eff`` from the numeric reduction.
    ``xrot``
        ``theta / |g_eff|``.
    ``zrot``
        ``theta / shift`` with the exact dispersive shift.

    With ``phase_mode="strict"`` the Fredkin times are moved by less than
    ``pi/eta`` so that ``eta t`` makes the transferred amplitude real and
    positive.
    """
    gate = _gate(gate)
    eff = effective_couplings(gate, params)
    if gate == "fredkin":
        rate, angle = eff["g_prime"], math.pi
    elif gate == "zrot":
        rate, angle = eff["shift"], theta
    else:
        rate = abs(eff["g_eff"])
        angle = math.pi / 2 if gate in ("iswap", "fredkin-slow") else theta
    if angle is None:
        raise ConfigurationError(f"{gate} needs a rotation angle")
    if rate == 0.0:
        raise DegenerateError(f"{gate}: effective coupling vanishes")
    t = abs(angle / rate)
    if phase_mode == "strict" and gate.startswith("fredkin"):
        t = _tune_eta(gate, params, eff, t)
    return t


def _tune_eta(gate, params, eff, t0):
    eta = fredkin_eta(params)
    if eta == 0.0:
        return t0
    if gate == "fredkin":
        wanted = math.pi if eff["g1"] * eff["g2"] > 0 else 0.0
    else:
        # -i sin(g_eff t) e^{i eta t} = 1 in the |101> -> |110> direction
        wanted = math.copysign(math.pi / 2, eff["g_eff"])
    shift = math.remainder(wanted - eta * t0, 2 * math.pi)
    return t0 + shift / eta


def dressed_shift(g: float, delta: float) -> float:
    """Exact level shift of ``|1,a>`` in the detuned two-level block, ``(sqrt(D^2+4g^2)-|D|)/2`` signed by ``D``."""
    if delta == 0.0:
        raise ValidationError("z-rotation needs a nonzero detuning")
    return math.copysign((math.sqrt(delta * delta + 4 * g * g) - abs(delta)) / 2, delta)


def zrot_phase(g: float, delta: float, t: float) -> float:
    """Phase of the logical-1 amplitude relative to logical 0 after time ``t``.

    The detuned block ``[[0, g], [g, delta]]`` on ``{|1,a>, |0,b>}`` is
    propagated exactly; the phase is unwrapped around the dressed-state
    energy so that it accumulates continuously (about ``g^2 t / delta``).
    """
    if delta == 0.0:
        raise ValidationError("z-rotation needs a nonzero detuning (no dispersive regime at resonance)")
    if g == 0.0:
        return 0.0
    energies, vectors = np.linalg.eigh(np.array([[0.0, g], [g, delta]]))
    k = int(np.argmax(np.abs(vectors[0])))
    amp = vectors[0] @ (np.exp(-1j * energies * t) * vectors[0].conj())
    return float(-energies[k] * t + np.angle(amp * np.exp(1j * energies[k] * t)))


@dataclass
class GateRun:
    """One logical input propagated through a gate."""

    gate: str
    params: dict[str, float]
    input: tuple[int, ...]
    t_gate: float
    final: StateVector
    target: StateVector
    phase_mode: str
    fidelity_raw: float
    transfer_probability: float
    measurement: MeasurementOutcome | None = None
    fidelity_conditional: float | None = None
    populations: dict[str, float] = field(default_factory=dict)

    @property
    def expected(self) -> list[tuple[complex, tuple[int, ...]]]:
        out = []
        for amp, state in zip(self.target.amplitudes, self.target.basis):
            if amp != 0:
                out.append((complex(amp), decode(self.gate, state)))
        return out

    def to_record(self) -> dict:
        """JSON-serializable summary."""
        return {
            "gate": self.gate,
            "params": dict(self.params),
            "input": list(self.input),
            "expected": [
                {"bits": list(bits), "amplitude": [a.real, a.imag]} for a, bits in self.expected
            ],
            "t_gate": self.t_gate,
            "phase_mode": self.phase_mode,
            "fidelity_raw": self.fidelity_raw,
            "transfer_probability": self.transfer_probability,
            "measured": self.measurement is not None,
            "success_probability": None if self.measurement is None else self.measurement.success_probability,
            "fidelity_conditional": self.fidelity_conditional,
            "populations": dict(self.populations),
            "final_state": [
                {"label": physical_label(self.gate, s), "re": float(a.real), "im": float(a.imag)}
                for s, a in zip(self.final.basis, self.final.amplitudes)
            ],
        }


def _sector(gate: str, params: Mapping[str, float], seed: BasisState):
    spec = preset_spec(gate, params)
    basis = enumerate_basis(spec, seed)
    return spec, build_hamiltonian(spec, basis)


def _target_state(gate, basis, image) -> StateVector:
    amps = np.zeros(len(basis), dtype=complex)
    for amp, bits in image:
        i = basis.index(encode(gate, bits))
        if i is None:
            raise StructureError(f"target {bits} is not reachable from the input")
        amps[i] += amp
    return StateVector(basis, amps)


def _reference_energy(prop: Propagator, p_indices: Sequence[int], seed_index: int) -> float:
    """Seed-weighted energy of the dressed states that live on the kept states."""
    vecs = prop.vectors
    weight = np.sum(np.abs(vecs[list(p_indices)]) ** 2, axis=0)
    chosen = np.argsort(weight)[-len(p_indices):]
    w = np.abs(vecs[seed_index, chosen]) ** 2
    return float(np.sum(w * prop.energies[chosen]) / np.sum(w))


def _strict_overlap(gate, params, prop, psi: StateVector, target: StateVector, t: float) -> complex:
    basis = psi.basis
    amps = psi.amplitudes.copy()
    seed = basis[0]
    if gate.startswith("fredkin"):
        eta = fredkin_eta(params)
        charge = np.array([fredkin_frame_charge(s) - fredkin_frame_charge(seed) for s in basis])
        amps = amps * np.exp(1j * charge * eta * t)
    kept = [basis.index(s) for s in resonant_states(gate)]
    p = kept if 0 in kept and None not in kept else [0]
    amps = amps * np.exp(1j * _reference_energy(prop, p, 0) * t)
    return complex(np.vdot(target.amplitudes, amps))


def _populations(gate: str, psi: StateVector) -> dict[str, float]:
    pops = {"valid": 0.0, "invalid": 0.0, "ancilla_excited": 0.0}
    for s, a in zip(psi.basis, psi.amplitudes):
        p = abs(a) ** 2
        if s.level != ANCILLA_LEVEL:
            pops["ancilla_excited"] += p
        elif decode(gate, s) is None:
            pops["invalid"] += p
        else:
            pops["valid"] += p
    return pops


def run_gate(
    gate: str,
    params: Mapping[str, float],
    bits: Sequence[int],
    measure: bool = False,
    phase_mode: str = "population",
    t: float | None = None,
    theta: float | None = None,
) -> GateRun:
    """Encode ``bits``, propagate the full sector for the gate time, score it.

    Fidelities are ``|<target|psi>|``.  In ``"strict"`` phase mode the
    overlap is taken after removing the dynamical phase of the input's
    dressed manifold (and, for Fredkin, the frame rotation at rate ``eta``);
    the score is then ``max(Re <target|psi>, 0)`` so a wrong phase counts
    against it.  A failed measurement leaves ``fidelity_conditional=None``.
    """
    gate = _gate(gate)
    if phase_mode not in PHASE_MODES:
        raise ConfigurationError(f"phase_mode must be one of {PHASE_MODES}")
    bits = _check_bits(gate, bits)
    params = {k: float(v) for k, v in params.items()}
    if t is None:
        t = interaction_time(gate, params, theta=theta, phase_mode=phase_mode)
    if gate == "xrot" and theta is None:
        theta = reduce_preset(gate, params).g_eff * t
    if gate == "zrot" and theta is None:
        theta = zrot_phase(params["g"], params["Delta1"], t)

    seed = encode(gate, bits)
    _, h = _sector(gate, params, seed)
    prop = Propagator(h)
    psi = prop.evolve(StateVector.basis_state(h.basis, seed), t)
    target = _target_state(gate, h.basis, ideal_output(gate, bits, theta))

    def score(state: StateVector) -> float:
        if phase_mode == "strict":
            return min(1.0, max(0.0, _strict_overlap(gate, params, prop, state, target, t).real))
        return fidelity(state, target, squared=False)

    run = GateRun(
        gate=gate,
        params=params,
        input=bits,
        t_gate=t,
        final=psi,
        target=target,
        phase_mode=phase_mode,
        fidelity_raw=score(psi),
        transfer_probability=abs(overlap(psi, target)) ** 2,
        populations=_populations(gate, psi),
    )
    if measure:
        outcome = project_atom(psi, ANCILLA_LEVEL)
        run.measurement = outcome
        if outcome.succeeded:
            run.fidelity_conditional = score(outcome.projected)
    return run


@dataclass
class TruthTable:
    gate: str
    rows: list[GateRun]

    @property
    def worst(self) -> GateRun:
        return min(self.rows, key=lambda r: r.fidelity_conditional if r.fidelity_conditional is not None else r.fidelity_raw)

    def fidelities(self, conditional: bool = False) -> dict[tuple[int, ...], float | None]:
        return {r.input: (r.fidelity_conditional if conditional else r.fidelity_raw) for r in self.rows}


def truth_table(
    gate: str,
    params: Mapping[str, float],
    measure: bool = False,
    phase_mode: str = "population",
    theta: float | None = None,
    threads: int = 1,
) -> TruthTable:
    """:func:`run_gate` over all ``2**arity`` inputs at one common gate time."""
    gate = _gate(gate)
    t = interaction_time(gate, params, theta=theta, phase_mode=phase_mode)
    inputs = list(product((0, 1), repeat=arity(gate)))

    def one(bits):
        return run_gate(gate, params, bits, measure=measure, phase_mode=phase_mode, t=t, theta=theta)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, inputs))
    else:
        rows = [one(b) for b in inputs]
    return TruthTable(gate, rows)
