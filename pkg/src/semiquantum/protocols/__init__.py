"""Protocol session runners and their configuration records."""
from __future__ import annotations

from .cdssqc import CdssqcConfig, CdssqcVariant, run_cdssqc_ghz, run_cdssqc_switch
from .common import (
    AbortReason,
    Bits,
    Event,
    RawKeys,
    SessionOutcome,
    Transcript,
    bits_to_hex,
    hex_to_bits,
    xor_bits,
)
from .sqd import SqdConfig, decode_dialogue, run_sqd
from .sqka import SqkaConfig, detection_disabled, extract_bob_key_bit, run_sqka, run_sqkd

SessionConfig = SqkaConfig | CdssqcConfig | SqdConfig


def run_session(config: SessionConfig) -> SessionOutcome:
    """Dispatch a config record to its runner."""
    if isinstance(config, SqkaConfig):
        if config.protocol == "sqkd":
            return run_sqkd(config)
        return run_sqka(config)
    if isinstance(config, CdssqcConfig):
        if config.variant is CdssqcVariant.GHZ_LIKE:
            return run_cdssqc_ghz(config)
        return run_cdssqc_switch(config)
    if isinstance(config, SqdConfig):
        return run_sqd(config)
    raise TypeError(f"unknown config type {type(config)!r}")


def protocol_id(config: SessionConfig) -> str:
    if isinstance(config, SqkaConfig):
        return config.protocol
    if isinstance(config, CdssqcConfig):
        return "cdssqc-ghz" if config.variant is CdssqcVariant.GHZ_LIKE else "cdssqc-switch"
    if isinstance(config, SqdConfig):
        return "sqd"
    raise TypeError(f"unknown config type {type(config)!r}")


__all__ = [
    "AbortReason",
    "Bits",
    "CdssqcConfig",
    "CdssqcVariant",
    "Event",
    "RawKeys",
    "SessionConfig",
    "SessionOutcome",
    "SqdConfig",
    "SqkaConfig",
    "Transcript",
    "bits_to_hex",
    "decode_dialogue",
    "detection_disabled",
    "extract_bob_key_bit",
    "hex_to_bits",
    "protocol_id",
    "run_cdssqc_ghz",
    "run_cdssqc_switch",
    "run_session",
    "run_sqd",
    "run_sqka",
    "run_sqkd",
    "xor_bits",
]
