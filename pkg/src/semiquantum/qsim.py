"""State-vector simulation of small labeled qubit registers.

The simulator covers exactly what the protocol runners and attack models
need: Bell-state and computational-basis preparation, a three-qubit
controlled-branch state, CNOT and X gates, and destructive measurements in
the Z basis, the Bell basis, and an arbitrary orthonormal single-qubit
basis.

Conventions
-----------
Amplitudes are indexed big-endian in label order: ``amplitudes[i]`` is the
coefficient of ``|b0 b1 ... b_{k-1}>`` where ``b0`` is the qubit at
``labels[0]`` and ``i = sum(b_j << (k-1-j))``.  Measured qubits are removed
from the register; measuring the last qubit leaves ``post_state=None``.
Registers are hard-capped at ``MAX_QUBITS`` so an accidental global-state
blowup fails loudly instead of silently going quadratic.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .errors import (
    DuplicateLabel,
    EqualBellKinds,
    NonOrthonormalBasis,
    RegisterTooLarge,
    UnknownLabel,
)
from .rng import RandomSource

NORM_TOL = 1e-12
MAX_QUBITS = 6
_INV_SQRT2 = 1.0 / np.sqrt(2.0)


class BellKind(Enum):
    """The four Bell states. psi = equal bits, phi = unequal bits."""

    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"
    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"

    @property
    def parity(self) -> int:
        """0 for the equal-bits (psi) class, 1 for the unequal-bits (phi) class."""
        return 0 if self in (BellKind.PSI_PLUS, BellKind.PSI_MINUS) else 1

    @property
    def sign(self) -> int:
        """0 for the + superposition, 1 for the - superposition."""
        return 0 if self in (BellKind.PSI_PLUS, BellKind.PHI_PLUS) else 1


BELL_ORDER: tuple[BellKind, ...] = (
    BellKind.PSI_PLUS,
    BellKind.PSI_MINUS,
    BellKind.PHI_PLUS,
    BellKind.PHI_MINUS,
)

BELL_VECTORS: dict[BellKind, np.ndarray] = {
    BellKind.PSI_PLUS: np.array([1, 0, 0, 1], dtype=complex) * _INV_SQRT2,
    BellKind.PSI_MINUS: np.array([1, 0, 0, -1], dtype=complex) * _INV_SQRT2,
    BellKind.PHI_PLUS: np.array([0, 1, 1, 0], dtype=complex) * _INV_SQRT2,
    BellKind.PHI_MINUS: np.array([0, 1, -1, 0], dtype=complex) * _INV_SQRT2,
}

# Rows are Bell bras in BELL_ORDER; real here, conj kept for clarity.
_BELL_BASIS = np.stack([BELL_VECTORS[k].conj() for k in BELL_ORDER])


@dataclass(frozen=True)
class OrthonormalPair:
    """An orthonormal single-qubit basis {|a>, |b>} for controller measurements."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=complex).reshape(-1)
        b = np.asarray(self.b, dtype=complex).reshape(-1)
        if a.shape != (2,) or b.shape != (2,):
            raise NonOrthonormalBasis("basis vectors must be single-qubit (length 2)")
        if (
            abs(np.vdot(a, a) - 1.0) > NORM_TOL
            or abs(np.vdot(b, b) - 1.0) > NORM_TOL
            or abs(np.vdot(a, b)) > NORM_TOL
        ):
            raise NonOrthonormalBasis("basis vectors must be orthonormal within 1e-12")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def matrix(self) -> np.ndarray:
        """2x2 matrix whose rows are the <a| and <b| bras."""
        return np.stack([self.a.conj(), self.b.conj()])


COMPUTATIONAL = OrthonormalPair(np.array([1.0, 0.0]), np.array([0.0, 1.0]))
HADAMARD = OrthonormalPair(
    np.array([_INV_SQRT2, _INV_SQRT2]), np.array([_INV_SQRT2, -_INV_SQRT2])
)


class StateVector:
    """Complex amplitudes over an ordered, labeled register of 1..6 qubits.

    Treated as immutable after construction; every operation returns a new
    value and re-checks the norm invariant.
    """

    __slots__ = ("amplitudes", "labels")

    def __init__(self, amplitudes, labels):
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        labels = tuple(labels)
        k = len(labels)
        if k < 1 or k > MAX_QUBITS:
            raise RegisterTooLarge(f"register size {k} outside [1, {MAX_QUBITS}]")
        if len(set(labels)) != k:
            raise DuplicateLabel(f"labels not unique: {labels}")
        if amps.size != 2**k:
            raise ValueError(f"need {2**k} amplitudes for {k} qubits, got {amps.size}")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: sum |amp|^2 = {norm2!r}")
        self.amplitudes = amps
        self.labels = labels

    def __repr__(self):
        return f"StateVector(labels={self.labels!r})"

    @property
    def num_qubits(self) -> int:
        return len(self.labels)

    def position(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownLabel(label) from None

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amplitudes, self.amplitudes).real))


@dataclass(frozen=True)
class MeasurementRecord:
    """Outcome of a destructive measurement with its Born probability."""

    outcome: object  # int bit, BellKind, or basis index 0/1
    probability: float
    post_state: StateVector | None


# ---------------------------------------------------------------------------
# preparation


def prepare_z(bit: int, label: str = "q0") -> StateVector:
    """Single qubit |0> or |1>."""
    if bit not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {bit!r}")
    amps = np.zeros(2, dtype=complex)
    amps[bit] = 1.0
    return StateVector(amps, (label,))


def prepare_bell(kind: BellKind, labels: tuple[str, str] = ("q0", "q1")) -> StateVector:
    """Two-qubit Bell state of the requested kind."""
    return StateVector(BELL_VECTORS[kind].copy(), tuple(labels))


def prepare_ghz_like(
    psi1: BellKind,
    psi2: BellKind,
    basis: OrthonormalPair = COMPUTATIONAL,
    labels: tuple[str, str, str] = ("q0", "q1", "q2"),
) -> StateVector:
    """Three-qubit state (|psi1>|a> + |psi2>|b>)/sqrt(2).

    Qubits 1 and 2 carry the Bell component, qubit 3 is the controller slot.
    The two Bell kinds must differ or the controller bit would be inert.
    """
    if psi1 is psi2:
        raise EqualBellKinds("psi1 and psi2 must be distinct Bell states")
    v = (
        np.kron(BELL_VECTORS[psi1], basis.a) + np.kron(BELL_VECTORS[psi2], basis.b)
    ) * _INV_SQRT2
    return StateVector(v, tuple(labels))


def merge_registers(s1: StateVector, s2: StateVector) -> StateVector:
    """Tensor product of two disjoint registers; s1's labels become the high bits."""
    common = set(s1.labels) & set(s2.labels)
    if common:
        raise DuplicateLabel(f"labels shared between registers: {sorted(common)}")
    k = s1.num_qubits + s2.num_qubits
    if k > MAX_QUBITS:
        raise RegisterTooLarge(f"merged register would hold {k} > {MAX_QUBITS} qubits")
    # outer-product kron; much cheaper than np.kron on these tiny vectors
    amps = (s1.amplitudes[:, None] * s2.amplitudes[None, :]).reshape(-1)
    return StateVector(amps, s1.labels + s2.labels)


# ---------------------------------------------------------------------------
# gates


@lru_cache(maxsize=None)
def _cnot_index(k: int, c: int, t: int) -> np.ndarray:
    idx = np.arange(2**k)
    cbit = (idx >> (k - 1 - c)) & 1
    out = idx ^ (cbit << (k - 1 - t))
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def _x_index(k: int, t: int) -> np.ndarray:
    out = np.arange(2**k) ^ (1 << (k - 1 - t))
    out.setflags(write=False)
    return out


def apply_cnot(state: StateVector, control: str, target: str) -> StateVector:
    """Standard CNOT; a pure index permutation, so exactly norm-preserving."""
    c = state.position(control)
    t = state.position(target)
    if c == t:
        raise ValueError("control and target must differ")
    return StateVector(state.amplitudes[_cnot_index(state.num_qubits, c, t)], state.labels)


def apply_x(state: StateVector, label: str) -> StateVector:
    """Pauli X on one qubit."""
    t = state.position(label)
    return StateVector(state.amplitudes[_x_index(state.num_qubits, t)], state.labels)


def reordered(state: StateVector, new_labels: tuple[str, ...]) -> StateVector:
    """The same physical state with register slots listed in a new order."""
    if set(new_labels) != set(state.labels) or len(new_labels) != state.num_qubits:
        raise UnknownLabel(f"{new_labels} is not a reordering of {state.labels}")
    k = state.num_qubits
    perm = [state.position(l) for l in new_labels]
    arr = state.amplitudes.reshape([2] * k).transpose(perm).reshape(-1)
    return StateVector(arr, tuple(new_labels))


# ---------------------------------------------------------------------------
# projections (deterministic branches) and sampled measurements


def _front(state: StateVector, positions: list[int]) -> np.ndarray:
    """Amplitudes reshaped with the given qubit axes moved to the front."""
    k = state.num_qubits
    arr = state.amplitudes.reshape([2] * k)
    rest = [i for i in range(k) if i not in positions]
    return arr.transpose(positions + rest).reshape(2 ** len(positions), -1)


def _post(state: StateVector, removed: tuple[str, ...], branch: np.ndarray, prob: float) -> StateVector | None:
    if prob <= 0.0:
        raise ValueError("cannot collapse onto a zero-probability branch")
    remaining = tuple(l for l in state.labels if l not in removed)
    if not remaining:
        return None
    return StateVector(branch / np.sqrt(prob), remaining)


def z_probabilities(state: StateVector, label: str) -> np.ndarray:
    rows = _front(state, [state.position(label)])
    return np.sum(np.abs(rows) ** 2, axis=1)


def project_z(state: StateVector, label: str, outcome: int) -> tuple[float, StateVector | None]:
    """Born probability of a Z outcome and the collapsed remainder."""
    rows = _front(state, [state.position(label)])
    prob = float(np.sum(np.abs(rows[outcome]) ** 2))
    return prob, _post(state, (label,), rows[outcome], prob)


def measure_z(state: StateVector, label: str, rng: RandomSource) -> MeasurementRecord:
    """Sample a computational-basis measurement of one qubit."""
    probs = z_probabilities(state, label)
    outcome = _sample(probs, rng)
    prob, post = project_z(state, label, outcome)
    return MeasurementRecord(outcome, prob, post)


def bell_probabilities(state: StateVector, q1: str, q2: str) -> np.ndarray:
    """Born probabilities of the four Bell outcomes on (q1, q2), in BELL_ORDER."""
    rows = _front(state, [state.position(q1), state.position(q2)])
    bell_rows = _BELL_BASIS @ rows
    return np.sum(np.abs(bell_rows) ** 2, axis=1)


def project_bell(state: StateVector, q1: str, q2: str, kind: BellKind) -> tuple[float, StateVector | None]:
    rows = _front(state, [state.position(q1), state.position(q2)])
    bell_rows = _BELL_BASIS @ rows
    i = BELL_ORDER.index(kind)
    prob = float(np.sum(np.abs(bell_rows[i]) ** 2))
    return prob, _post(state, (q1, q2), bell_rows[i], prob)


def measure_bell(state: StateVector, q1: str, q2: str, rng: RandomSource) -> MeasurementRecord:
    """Sample a Bell-basis measurement of two qubits; both leave the register."""
    probs = bell_probabilities(state, q1, q2)
    kind = BELL_ORDER[_sample(probs, rng)]
    prob, post = project_bell(state, q1, q2, kind)
    return MeasurementRecord(kind, prob, post)


def ab_probabilities(state: StateVector, label: str, basis: OrthonormalPair) -> np.ndarray:
    rows = basis.matrix() @ _front(state, [state.position(label)])
    return np.sum(np.abs(rows) ** 2, axis=1)


def project_ab(
    state: StateVector, label: str, basis: OrthonormalPair, outcome: int
) -> tuple[float, StateVector | None]:
    rows = basis.matrix() @ _front(state, [state.position(label)])
    prob = float(np.sum(np.abs(rows[outcome]) ** 2))
    return prob, _post(state, (label,), rows[outcome], prob)


def measure_ab(
    state: StateVector, label: str, basis: OrthonormalPair, rng: RandomSource
) -> MeasurementRecord:
    """Sample a measurement in an arbitrary orthonormal basis; outcome 0=|a>, 1=|b>."""
    probs = ab_probabilities(state, label, basis)
    outcome = _sample(probs, rng)
    prob, post = project_ab(state, label, basis, outcome)
    return MeasurementRecord(outcome, prob, post)


def _sample(probs: np.ndarray, rng: RandomSource) -> int:
    r = rng.random()
    acc = 0.0
    for i, p in enumerate(probs):
        acc += float(p)
        if r < acc:
            return i
    return len(probs) - 1  # guard against fp shortfall


# ---------------------------------------------------------------------------
# register bookkeeping


class RegisterBank:
    """Tracks disjoint registers addressed by qubit label.

    Operations that span registers merge them first (subject to the qubit
    cap); measurements drop consumed labels.  This is where travel qubits,
    home qubits, ancillas and fresh preparations all live during a session.
    """

    def __init__(self):
        self._states: dict[str, StateVector] = {}

    def labels(self) -> set[str]:
        return set(self._states)

    def state_of(self, label: str) -> StateVector:
        try:
            return self._states[label]
        except KeyError:
            raise UnknownLabel(label) from None

    def add(self, state: StateVector) -> None:
        for l in state.labels:
            if l in self._states:
                raise DuplicateLabel(l)
        for l in state.labels:
            self._states[l] = state

    def prepare_z(self, bit: int, label: str) -> str:
        self.add(prepare_z(bit, label))
        return label

    def prepare_bell(self, kind: BellKind, l1: str, l2: str) -> tuple[str, str]:
        self.add(prepare_bell(kind, (l1, l2)))
        return l1, l2

    def prepare_ghz_like(
        self, psi1: BellKind, psi2: BellKind, basis: OrthonormalPair, labels: tuple[str, str, str]
    ) -> tuple[str, str, str]:
        self.add(prepare_ghz_like(psi1, psi2, basis, labels))
        return labels

    def _merged(self, *labels: str) -> StateVector:
        states = []
        for l in labels:
            s = self.state_of(l)
            if not any(s is t for t in states):
                states.append(s)
        merged = states[0]
        for s in states[1:]:
            merged = merge_registers(merged, s)
        if len(states) > 1:
            self._replace(merged)
        return merged

    def _replace(self, state: StateVector | None, removed: tuple[str, ...] = ()) -> None:
        for l in removed:
            self._states.pop(l, None)
        if state is not None:
            for l in state.labels:
                self._states[l] = state

    def cnot(self, control: str, target: str) -> None:
        state = apply_cnot(self._merged(control, target), control, target)
        self._replace(state)

    def x(self, label: str) -> None:
        self._replace(apply_x(self.state_of(label), label))

    def measure_z(self, label: str, rng: RandomSource) -> int:
        rec = measure_z(self.state_of(label), label, rng)
        self._replace(rec.post_state, removed=(label,))
        return int(rec.outcome)

    def measure_bell(self, q1: str, q2: str, rng: RandomSource) -> BellKind:
        rec = measure_bell(self._merged(q1, q2), q1, q2, rng)
        self._replace(rec.post_state, removed=(q1, q2))
        return rec.outcome

    def measure_ab(self, label: str, basis: OrthonormalPair, rng: RandomSource) -> int:
        rec = measure_ab(self.state_of(label), label, basis, rng)
        self._replace(rec.post_state, removed=(label,))
        return int(rec.outcome)
