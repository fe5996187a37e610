"""Pluggable eavesdropper strategies wired into channel legs.

Three attacks are modeled:

* entangle-probe (CNOT): Eve entangles a fresh |0> ancilla with each qubit
  on the distribution leg and applies the same CNOT again on the return
  leg, then reads the ancillas.
* intercept-resend with Bell pairs: Eve swaps her own Bell-pair halves into
  the distribution leg, Bell-measures her retained halves against the
  returned qubits to classify each slot, and resends reconstructed qubits.
* measure-resend: Eve measures every qubit on a leg in the computational
  basis and forwards a fresh copy of the outcome.

Eve always pairs her bookkeeping by wire arrival order; she has no access
to the honest parties' secret permutations.  All her quantum work goes
through a quantum :class:`~semiquantum.parties.PartyContext`, so it is
norm-checked like everything else.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .parties import PartyContext
from .qsim import BellKind


class AttackKind(Enum):
    NONE = "none"
    CNOT = "cnot"
    INTERCEPT_RESEND = "intercept-resend"
    MEASURE_RESEND = "measure-resend"


@dataclass(frozen=True)
class AttackStrategy:
    """Which adversary model is active and which channel legs it touches.

    ``legs=None`` means the protocol-specific default for the attack kind.
    ``eve_rng_seed=None`` derives Eve's stream from the session seed.
    """

    kind: AttackKind = AttackKind.NONE
    legs: frozenset[str] | None = None
    eve_rng_seed: int | None = None

    @staticmethod
    def none() -> "AttackStrategy":
        return AttackStrategy(AttackKind.NONE, frozenset())


# Channel legs per protocol: "forward" is the quantum-to-classical
# distribution leg, "return" the classical sender's outgoing leg.  The
# controller-to-receiver leg of the controlled protocols is secured by a
# separate subroutine and is not attackable here.
PROTOCOL_LEGS: dict[str, frozenset[str]] = {
    "sqka": frozenset({"forward", "return"}),
    "sqkd": frozenset({"forward", "return"}),
    "sqd": frozenset({"forward", "return"}),
    "cdssqc-ghz": frozenset({"forward", "return"}),
    "cdssqc-switch": frozenset({"forward", "return"}),
}

_DEFAULT_LEGS: dict[AttackKind, dict[str, frozenset[str]]] = {
    AttackKind.NONE: {},
    AttackKind.CNOT: {p: frozenset({"forward", "return"}) for p in PROTOCOL_LEGS},
    AttackKind.INTERCEPT_RESEND: {
        "sqka": frozenset({"forward", "return"}),
        "sqkd": frozenset({"forward", "return"}),
        "sqd": frozenset({"forward", "return"}),
        "cdssqc-ghz": frozenset({"forward"}),
        "cdssqc-switch": frozenset({"forward"}),
    },
    AttackKind.MEASURE_RESEND: {
        "sqka": frozenset({"forward"}),
        "sqkd": frozenset({"forward"}),
        "sqd": frozenset({"forward"}),
        "cdssqc-ghz": frozenset({"forward", "return"}),
        "cdssqc-switch": frozenset({"forward", "return"}),
    },
}


def default_legs(kind: AttackKind, protocol: str) -> frozenset[str]:
    if kind is AttackKind.NONE:
        return frozenset()
    return _DEFAULT_LEGS[kind][protocol]


@dataclass
class EveState:
    """Eve's accumulated qubits and per-slot inferences."""

    ancillas: dict[int, str] = field(default_factory=dict)
    retained_travel: dict[int, str] = field(default_factory=dict)
    retained_pairs: dict[int, tuple[str, str]] = field(default_factory=dict)
    forward_bits: dict[int, int] = field(default_factory=dict)
    wire_bits: dict[int, int | None] = field(default_factory=dict)
    wire_classifications: dict[int, str] = field(default_factory=dict)
    inferred_bits: tuple[int | None, ...] | None = None
    inferred_positions: tuple[str, ...] | None = None


# ---------------------------------------------------------------------------
# primitive attack steps (shared by the batch API and the per-wire hooks)


def _cnot_attach(eve: PartyContext, state: EveState, i: int, label: str) -> None:
    anc = f"_EA{i}"
    eve.prepare_z(0, anc)
    eve.cnot(label, anc)
    state.ancillas[i] = anc


def _cnot_return(eve: PartyContext, state: EveState, j: int, label: str) -> None:
    anc = state.ancillas.get(j)
    if anc is not None:
        eve.cnot(label, anc)


def _cnot_read(eve: PartyContext, state: EveState, j: int) -> int | None:
    anc = state.ancillas.pop(j, None)
    if anc is None:
        return None
    bit = eve.measure_z(anc)
    state.wire_bits[j] = bit
    state.wire_classifications[j] = "unknown"
    return bit


def _ir_substitute(eve: PartyContext, state: EveState, i: int, label: str) -> str:
    state.retained_travel[i] = label
    kept, fwd = f"_ER{i}", f"_EF{i}"
    eve.prepare_bell(BellKind.PSI_PLUS, kept, fwd)
    state.retained_pairs[i] = (kept, fwd)
    return fwd


def _ir_return(eve: PartyContext, state: EveState, j: int, label: str) -> str:
    kept = state.retained_pairs[j][0]
    outcome = eve.measure_bell(kept, label)
    if outcome is BellKind.PSI_MINUS:
        cls, bit = "measured", 0
    elif outcome.parity == 1:  # phi+/phi-
        cls, bit = "measured", 1
    else:  # psi+ is consistent with a reflection; recorded as unknown
        cls, bit = "unknown", None
    original = state.retained_travel[j]
    u = eve.measure_z(original)
    # Identified wires are resent mimicking the sender's encoding; the
    # ambiguous psi+ wires are resent as the complement of the collapsed
    # original.
    forwarded = u ^ (bit if bit is not None else 1)
    new = f"_ES{j}"
    eve.prepare_z(forwarded, new)
    state.wire_classifications[j] = cls
    state.wire_bits[j] = bit
    return new


def _mr_tap(eve: PartyContext, state: EveState, record: dict[int, int], i: int, label: str, prefix: str) -> str:
    u = eve.measure_z(label)
    record[i] = u
    new = f"{prefix}{i}"
    eve.prepare_z(u, new)
    return new


# ---------------------------------------------------------------------------
# batch API (whole-sequence form, used directly in tests and small scenarios)


def cnot_forward(eve: PartyContext, travel: list[str], state: EveState) -> list[str]:
    """Entangle one fresh ancilla with each travel qubit; qubits pass through."""
    for i, label in enumerate(travel):
        _cnot_attach(eve, state, i, label)
    return list(travel)


def cnot_backward(eve: PartyContext, returned: list[str], state: EveState) -> list[int | None]:
    """Second CNOT per wire, then read the ancillas; returns per-wire bits."""
    for j, label in enumerate(returned):
        _cnot_return(eve, state, j, label)
    return [_cnot_read(eve, state, j) for j in range(len(returned))]


def intercept_resend_forward(eve: PartyContext, travel: list[str], state: EveState) -> list[str]:
    """Keep the real travel qubits, forward halves of Eve's own Bell pairs."""
    return [_ir_substitute(eve, state, i, label) for i, label in enumerate(travel)]


def intercept_resend_backward(eve: PartyContext, returned: list[str], state: EveState) -> list[str]:
    """Bell-classify each wire against the retained half, then resend."""
    return [_ir_return(eve, state, j, label) for j, label in enumerate(returned)]


def measure_resend_z(eve: PartyContext, qubits: list[str], state: EveState) -> list[str]:
    """Measure each qubit in Z and forward a fresh copy of the outcome."""
    return [_mr_tap(eve, state, state.forward_bits, i, label, "_EM") for i, label in enumerate(qubits)]


# ---------------------------------------------------------------------------
# channel hooks used by the protocol runners


class ChannelAttack:
    """Base hook: pass-through on every leg."""

    kind = AttackKind.NONE

    def __init__(self, eve: PartyContext | None, legs: frozenset[str]):
        self.eve = eve
        self.legs = legs
        self.state = EveState()

    def forward_leg(self, leg: str, labels: list[str]) -> list[str]:
        return labels

    def wire(self, leg: str, j: int, label: str) -> str:
        return label

    def after_wire(self, leg: str, j: int) -> None:
        pass

    def reindex(self, remaining: list[int]) -> None:
        """Advance Eve's per-slot queues past publicly checked positions.

        Spot-check positions are announced and never return, so a wire-order
        adversary re-keys her ancillas and retained qubits to the surviving
        slots: new index j maps to old index ``remaining[j]``.
        """
        st = self.state
        for attr in ("ancillas", "retained_travel", "retained_pairs", "forward_bits"):
            old = getattr(st, attr)
            setattr(
                st,
                attr,
                {j: old[p] for j, p in enumerate(remaining) if p in old},
            )

    def finalize(self, encoded_wires: list[int]) -> None:
        """Fix Eve's per-slot inferences once the wire roles are public."""
        self.state.inferred_bits = tuple(self.state.wire_bits.get(w) for w in encoded_wires)
        self.state.inferred_positions = tuple(
            self.state.wire_classifications.get(w, "unknown") for w in encoded_wires
        )


class NoAttack(ChannelAttack):
    def finalize(self, encoded_wires):
        pass  # no adversary, no inferences


class CnotAttack(ChannelAttack):
    kind = AttackKind.CNOT

    def forward_leg(self, leg, labels):
        if leg == "forward" and "forward" in self.legs:
            for i, label in enumerate(labels):
                _cnot_attach(self.eve, self.state, i, label)
        return labels

    def wire(self, leg, j, label):
        if leg == "return" and "return" in self.legs:
            _cnot_return(self.eve, self.state, j, label)
        return label

    def after_wire(self, leg, j):
        if leg == "return" and "return" in self.legs:
            _cnot_read(self.eve, self.state, j)


class InterceptResendAttack(ChannelAttack):
    kind = AttackKind.INTERCEPT_RESEND

    def forward_leg(self, leg, labels):
        if leg == "forward" and "forward" in self.legs:
            return [_ir_substitute(self.eve, self.state, i, l) for i, l in enumerate(labels)]
        return labels

    def wire(self, leg, j, label):
        if leg == "return" and "return" in self.legs:
            return _ir_return(self.eve, self.state, j, label)
        return label


class SubstituteSinglesAttack(ChannelAttack):
    """Distribution-leg intercept-resend: keep the originals, forward fresh
    random computational-basis singles.  Used against the controlled
    protocols, where the forwarded qubits have no partner in Eve's hands."""

    kind = AttackKind.INTERCEPT_RESEND

    def forward_leg(self, leg, labels):
        if leg == "forward" and "forward" in self.legs:
            out = []
            for i, label in enumerate(labels):
                self.state.retained_travel[i] = label
                bit = self.eve.rng.bit()
                new = f"_EX{i}"
                self.eve.prepare_z(bit, new)
                self.state.forward_bits[i] = bit
                out.append(new)
            return out
        return labels


class MeasureResendAttack(ChannelAttack):
    kind = AttackKind.MEASURE_RESEND

    def forward_leg(self, leg, labels):
        if leg == "forward" and "forward" in self.legs:
            return [
                _mr_tap(self.eve, self.state, self.state.forward_bits, i, l, "_EM")
                for i, l in enumerate(labels)
            ]
        return labels

    def wire(self, leg, j, label):
        if leg == "return" and "return" in self.legs:
            u = self.eve.measure_z(label)
            self.state.wire_bits[j] = u
            self.state.wire_classifications[j] = "unknown"
            new = f"_EW{j}"
            self.eve.prepare_z(u, new)
            return new
        return label

    def finalize(self, encoded_wires):
        # Wire-order decode guess: XOR the value seen on the return wire with
        # the distribution-leg outcome at the same slot index.
        bits: list[int | None] = []
        for w in encoded_wires:
            v = self.state.wire_bits.get(w)
            r = self.state.forward_bits.get(w)
            bits.append(None if v is None or r is None else v ^ r)
        self.state.inferred_bits = tuple(bits)
        self.state.inferred_positions = tuple(
            self.state.wire_classifications.get(w, "unknown") for w in encoded_wires
        )


def build_attack(strategy: AttackStrategy, protocol: str, eve: PartyContext | None) -> ChannelAttack:
    """Instantiate the channel hooks for a strategy in a given protocol."""
    legs = strategy.legs if strategy.legs is not None else default_legs(strategy.kind, protocol)
    available = PROTOCOL_LEGS[protocol]
    if not legs <= available:
        raise ValueError(f"legs {sorted(legs)} not available in {protocol}: {sorted(available)}")
    if strategy.kind is AttackKind.NONE:
        return NoAttack(eve, legs)
    if strategy.kind is AttackKind.CNOT:
        return CnotAttack(eve, legs)
    if strategy.kind is AttackKind.INTERCEPT_RESEND:
        if protocol in ("cdssqc-ghz", "cdssqc-switch"):
            return SubstituteSinglesAttack(eve, legs)
        return InterceptResendAttack(eve, legs)
    if strategy.kind is AttackKind.MEASURE_RESEND:
        return MeasureResendAttack(eve, legs)
    raise ValueError(f"unhandled attack kind {strategy.kind}")
