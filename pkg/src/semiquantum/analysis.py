"""Monte Carlo driver, detection statistics, qubit-efficiency accounting,
and transcript/stats serialization.

Efficiency is eta = c / (q + b): message bits over transmitted qubits
(message-carrying plus decoy) plus non-check classical bits.  The cost
coefficients for the four protocols are fixed data; for the switch variant
the exact ratio is 1/21 (~4.76%) while the commonly quoted figure is
4.72% — the reports carry that discrepancy explicitly rather than
papering over it.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction

from .adversary import AttackKind
from .errors import SemiQuantumError, UnknownAttack
from .protocols import SessionConfig, SessionOutcome, protocol_id, run_session
from .rng import derive_seed

TRANSCRIPT_SCHEMA = "semiquantum.transcript/1"
STATS_SCHEMA = "semiquantum.stats/1"
Z99 = 2.5758293035489004  # two-sided 99% normal quantile

CSV_COLUMNS = (
    "protocol",
    "attack",
    "n",
    "m",
    "trials",
    "abort_rate",
    "key_match_rate",
    "eve_accuracy",
    "eve_position_id_rate",
    "eta",
)


# ---------------------------------------------------------------------------
# qubit efficiency


@dataclass(frozen=True)
class EfficiencyInput:
    """Raw counts: message bits, message qubits, decoy qubits, classical bits."""

    c: int
    q_c: int
    d: int
    b: int

    def __post_init__(self):
        if min(self.c, self.q_c, self.d, self.b) < 0:
            raise ValueError("efficiency inputs must be nonnegative")

    @property
    def q(self) -> int:
        return self.q_c + self.d


def qubit_efficiency(inp: EfficiencyInput) -> float:
    denom = inp.q + inp.b
    if denom == 0:
        raise ZeroDivisionError("q + b must be positive")
    return inp.c / denom


@dataclass(frozen=True)
class ProtocolCostRow:
    """Per-protocol cost coefficients, all linear in the message length n."""

    protocol: str
    c: int
    q_c: int
    d: int
    b: int

    @property
    def q(self) -> int:
        return self.q_c + self.d

    def efficiency(self) -> Fraction:
        return Fraction(self.c, self.q + self.b)

    def inputs(self, n: int = 1) -> EfficiencyInput:
        return EfficiencyInput(self.c * n, self.q_c * n, self.d * n, self.b * n)


TABLE3: dict[str, ProtocolCostRow] = {
    "sqka": ProtocolCostRow("sqka", c=1, q_c=2, d=3, b=5),
    "cdssqc-ghz": ProtocolCostRow("cdssqc-ghz", c=1, q_c=4, d=13, b=8),
    "cdssqc-switch": ProtocolCostRow("cdssqc-switch", c=1, q_c=3, d=10, b=8),
    "sqd": ProtocolCostRow("sqd", c=2, q_c=2, d=3, b=5),
}
# The reduction runs the same channel as sqka, so it shares the cost row.
TABLE3["sqkd"] = replace(TABLE3["sqka"], protocol="sqkd")

# Quoted switch-variant efficiency vs the exact coefficient ratio; reports
# flag the difference instead of asserting the quoted number.
SWITCH_ETA_QUOTED = 0.0472
SWITCH_ETA_NOTE = (
    "switch-variant efficiency is reported as the exact ratio 1/21 (~4.76%); "
    "the commonly quoted 4.72% does not match the cost coefficients"
)


def efficiency_report(protocol: str) -> dict:
    row = TABLE3[protocol]
    eta = row.efficiency()
    report = {
        "protocol": protocol,
        "c": row.c,
        "q_c": row.q_c,
        "d": row.d,
        "q": row.q,
        "b": row.b,
        "eta_exact": [eta.numerator, eta.denominator],
        "eta": float(eta),
    }
    if protocol == "cdssqc-switch":
        report["eta_quoted"] = SWITCH_ETA_QUOTED
        report["discrepancy"] = SWITCH_ETA_NOTE
    return report


# ---------------------------------------------------------------------------
# closed-form detection companion


_PER_DECOY_MISMATCH = {
    AttackKind.INTERCEPT_RESEND: 0.75,
    AttackKind.MEASURE_RESEND: 0.5,
    AttackKind.CNOT: 0.0,
}


def detection_model(attack: AttackKind, m: int) -> float:
    """Predicted abort probability 1-(1-p)^m with the per-decoy mismatch p.

    p refers to each attack in its analyzed setting: intercept-resend under
    the default secret permutation, measure-resend on any leg, and the
    entangle-probe attack on reflected qubits with matched pairing (where it
    is trace-free).
    """
    if attack not in _PER_DECOY_MISMATCH:
        raise UnknownAttack(f"no per-decoy mismatch probability for {attack!r}")
    if m < 0:
        raise ValueError("decoy count must be nonnegative")
    p = _PER_DECOY_MISMATCH[attack]
    return 1.0 - (1.0 - p) ** m


# ---------------------------------------------------------------------------
# Monte Carlo driver


@dataclass(frozen=True)
class TrialStats:
    """Aggregated session statistics with 99% binomial half-widths."""

    protocol: str
    attack: str
    n: int
    m: int
    trials: int
    failures: int
    abort_rate: float
    key_match_rate: float
    eve_accuracy: float
    eve_position_id_rate: float
    decoy_detection_rate: float
    halfwidth99: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "attack": self.attack,
            "n": self.n,
            "m": self.m,
            "trials": self.trials,
            "failures": self.failures,
            "abort_rate": self.abort_rate,
            "key_match_rate": self.key_match_rate,
            "eve_accuracy": self.eve_accuracy,
            "eve_position_id_rate": self.eve_position_id_rate,
            "decoy_detection_rate": self.decoy_detection_rate,
            "halfwidth99": dict(self.halfwidth99),
            "eta": float(TABLE3[self.protocol].efficiency()),
        }


def _halfwidth(successes: float, total: float) -> float:
    if total <= 0:
        return 0.0
    p = successes / total
    return Z99 * math.sqrt(max(p * (1.0 - p), 0.0) / total)


def trial_record(out: SessionOutcome | None) -> dict[str, float]:
    """Exact per-session counts (a commutative-monoid element for the fold).

    Every value is an integer or a multiple of 0.5, so summation is exact
    and the aggregate does not depend on fold order.
    """
    if out is None:
        return {"failures": 1}
    rec = {
        "completed": 1,
        "aborts": int(out.aborted),
        "decoy_bad": out.details.get("decoy_mismatches", 0),
        "decoy_total": out.details.get("decoy_checked", 0),
    }
    match = out.details.get("match_bits")
    if match is not None:
        expected, actual = match
        rec["match_total"] = len(expected)
        rec["match_hits"] = sum(1 for e, a in zip(expected, actual) if e == a)
    if out.eve_inferences is not None:
        truth = out.details.get("eve_truth")
        if truth is not None and len(truth) == len(out.eve_inferences):
            rec["acc_total"] = len(truth)
            rec["acc_sum"] = sum(
                0.5 if b is None else float(b == t) for b, t in zip(out.eve_inferences, truth)
            )
    cls = out.details.get("eve_wire_classifications")
    if cls:
        wires = out.details.get("encoded_wires", [])
        rec["id_total"] = len(wires)
        rec["id_hits"] = sum(1 for w in wires if cls.get(w) == "measured")
    return rec


def aggregate_records(
    template: SessionConfig, trials: int, records: list[dict[str, float]]
) -> TrialStats:
    """Fold per-session records into TrialStats; order-independent."""
    tot: dict[str, float] = {}
    for rec in records:
        for key, value in rec.items():
            tot[key] = tot.get(key, 0) + value

    def rate(hits: str, total: str) -> float:
        t = tot.get(total, 0)
        return tot.get(hits, 0) / t if t else 0.0

    return TrialStats(
        protocol=protocol_id(template),
        attack=template.attack.kind.value,
        n=template.n,
        m=template.decoy_count(),
        trials=trials,
        failures=int(tot.get("failures", 0)),
        abort_rate=rate("aborts", "completed"),
        key_match_rate=rate("match_hits", "match_total"),
        eve_accuracy=rate("acc_sum", "acc_total"),
        eve_position_id_rate=rate("id_hits", "id_total"),
        decoy_detection_rate=rate("decoy_bad", "decoy_total"),
        halfwidth99={
            "abort_rate": _halfwidth(tot.get("aborts", 0), tot.get("completed", 0)),
            "key_match_rate": _halfwidth(tot.get("match_hits", 0), tot.get("match_total", 0)),
            "eve_accuracy": _halfwidth(tot.get("acc_sum", 0), tot.get("acc_total", 0)),
            "eve_position_id_rate": _halfwidth(tot.get("id_hits", 0), tot.get("id_total", 0)),
            "decoy_detection_rate": _halfwidth(tot.get("decoy_bad", 0), tot.get("decoy_total", 0)),
        },
    )


def run_trials(template: SessionConfig, trials: int, master_seed: int) -> TrialStats:
    """Run independent sessions with derived per-trial seeds and aggregate.

    Identical (template, trials, master_seed) gives bit-identical stats;
    per-trial seeds make the sessions independent of execution order, and
    the record fold is commutative, so a parallel schedule would produce the
    same result.  Session errors are counted, not raised.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    records = []
    for t in range(trials):
        config = replace(template, seed=derive_seed(master_seed, t))
        try:
            records.append(trial_record(run_session(config)))
        except SemiQuantumError:
            records.append(trial_record(None))
    return aggregate_records(template, trials, records)


# ---------------------------------------------------------------------------
# serialization


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, bytes):
        return value.hex()
    return value


def emit_transcript(outcome: SessionOutcome, fmt: str = "json") -> bytes:
    """Schema-versioned JSON of a session: summary fields plus event list."""
    if fmt != "json":
        raise ValueError("transcripts serialize to json only")
    doc = {
        "schema": TRANSCRIPT_SCHEMA,
        "protocol": outcome.protocol,
        "aborted": outcome.aborted,
        "abort_reason": outcome.abort_reason.value,
        "error_rate_observed": outcome.error_rate_observed,
        "keys": {k: list(v) for k, v in outcome.keys.items()},
        "eve_inferences": None
        if outcome.eve_inferences is None
        else [b for b in outcome.eve_inferences],
        "events": [
            {
                "index": e.index,
                "actor": e.actor,
                "action": e.action,
                "payload": _jsonable(e.payload),
            }
            for e in outcome.transcript.events
        ],
    }
    return (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode()


def parse_transcript(data: bytes) -> dict:
    doc = json.loads(data.decode())
    if doc.get("schema") != TRANSCRIPT_SCHEMA:
        raise ValueError(f"unexpected transcript schema {doc.get('schema')!r}")
    return doc


def emit_stats(stats: TrialStats, fmt: str = "json") -> bytes:
    """CSV has the fixed documented columns; JSON carries the full record."""
    if fmt == "json":
        doc = {"schema": STATS_SCHEMA, **stats.to_dict()}
        if stats.protocol == "cdssqc-switch":
            doc["eta_quoted"] = SWITCH_ETA_QUOTED
            doc["eta_note"] = SWITCH_ETA_NOTE
        return (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        writer.writerow(
            [
                stats.protocol,
                stats.attack,
                stats.n,
                stats.m,
                stats.trials,
                f"{stats.abort_rate:.6f}",
                f"{stats.key_match_rate:.6f}",
                f"{stats.eve_accuracy:.6f}",
                f"{stats.eve_position_id_rate:.6f}",
                f"{float(TABLE3[stats.protocol].efficiency()):.6f}",
            ]
        )
        return buf.getvalue().encode()
    raise ValueError(f"unknown stats format {fmt!r}")


def parse_stats(data: bytes, fmt: str = "json") -> dict:
    if fmt == "json":
        doc = json.loads(data.decode())
        if doc.get("schema") != STATS_SCHEMA:
            raise ValueError(f"unexpected stats schema {doc.get('schema')!r}")
        return doc
    if fmt == "csv":
        rows = list(csv.reader(io.StringIO(data.decode())))
        if not rows or tuple(rows[0]) != CSV_COLUMNS:
            raise ValueError("unexpected csv header")
        row = rows[1]
        out: dict = dict(zip(CSV_COLUMNS, row))
        for key in ("n", "m", "trials"):
            out[key] = int(out[key])
        for key in ("abort_rate", "key_match_rate", "eve_accuracy", "eve_position_id_rate", "eta"):
            out[key] = float(out[key])
        return out
    raise ValueError(f"unknown stats format {fmt!r}")
