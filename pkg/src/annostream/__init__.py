"""Annotated data streams: small-space verifiers that check a helper's proof.

Importing the package registers every protocol in :data:`REGISTRY`.
"""

from . import (  # noqa: F401  (imported for registration)
    dag,
    labels,
    lp,
    matching,
    matvec,
    memcheck,
    power,
    simulate,
    traversal,
    tum,
)
from .core import (
    REGISTRY,
    Accept,
    Bottom,
    Context,
    CostReport,
    Protocol,
    Value,
    attack,
    run_protocol,
)
from .field import F61, Fingerprint, PrimeField, TupleFingerprint

__all__ = [
    "REGISTRY", "Accept", "Bottom", "Context", "CostReport", "Protocol", "Value",
    "attack", "run_protocol", "F61", "Fingerprint", "PrimeField", "TupleFingerprint",
]
