"""Unitary equivalences of correspondences built from admissible covers."""

from topcorr.core.equiv.chain import EquivalenceChain, full_equivalence
from topcorr.core.equiv.regluing import Regluing, intermediate_graph
from topcorr.core.equiv.unitary import (
    ComposedUnitary,
    CorrUnitary,
    FlipSpec,
    FlipUnitary,
    PullbackUnitary,
    gamma_flip,
    gamma_identity,
)
from topcorr.core.equiv.verify import VerificationReport, verify_unitary

__all__ = [
    "ComposedUnitary",
    "CorrUnitary",
    "EquivalenceChain",
    "FlipSpec",
    "FlipUnitary",
    "PullbackUnitary",
    "Regluing",
    "VerificationReport",
    "full_equivalence",
    "gamma_flip",
    "gamma_identity",
    "intermediate_graph",
    "verify_unitary",
]
