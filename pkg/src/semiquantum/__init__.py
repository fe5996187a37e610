"""Simulator and verification harness for semi-quantum secure communication.

Four protocols share one toolkit: key agreement between a quantum and a
classical party, two controlled direct-communication variants, and a
two-way dialogue.  The package enforces the classical/quantum capability
split, models three eavesdropping attacks, and reproduces the protocols'
detection statistics and qubit-efficiency figures under seeded Monte Carlo.
"""

from .adversary import AttackKind, AttackStrategy
from .protocols import (
    CdssqcConfig,
    CdssqcVariant,
    SessionOutcome,
    SqdConfig,
    SqkaConfig,
    run_cdssqc_ghz,
    run_cdssqc_switch,
    run_session,
    run_sqd,
    run_sqka,
    run_sqkd,
)
from .qsim import BellKind, OrthonormalPair, StateVector
from .rng import RandomSource, derive_seed

__version__ = "0.1.0"

__all__ = [
    "AttackKind",
    "AttackStrategy",
    "BellKind",
    "CdssqcConfig",
    "CdssqcVariant",
    "OrthonormalPair",
    "RandomSource",
    "SessionOutcome",
    "SqdConfig",
    "SqkaConfig",
    "StateVector",
    "derive_seed",
    "run_cdssqc_ghz",
    "run_cdssqc_switch",
    "run_session",
    "run_sqd",
    "run_sqka",
    "run_sqkd",
    "__version__",
]
