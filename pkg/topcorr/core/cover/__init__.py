"""Local conjugacy certificates, admissible covers and permutation data."""

from topcorr.core.cover.admissible import (
    AdmissibleCover,
    AdmissibleReport,
    build_admissible_cover,
    check_admissible,
)
from topcorr.core.cover.certificate import (
    CertificatePiece,
    CertificateReport,
    ConjugacyCertificate,
    identity_certificate,
    invert_certificate,
    verify_certificate,
)
from topcorr.core.cover.discrete import (
    NotConjugate,
    decide_local_conjugacy_discrete,
    fock_intertwines,
    transport_element,
)
from topcorr.core.cover.permutations import (
    Permutation,
    PermutationData,
    permutation_data,
    sigma_data,
    transpositions,
)

__all__ = [
    "AdmissibleCover",
    "AdmissibleReport",
    "CertificatePiece",
    "CertificateReport",
    "ConjugacyCertificate",
    "NotConjugate",
    "Permutation",
    "PermutationData",
    "build_admissible_cover",
    "check_admissible",
    "decide_local_conjugacy_discrete",
    "fock_intertwines",
    "identity_certificate",
    "invert_certificate",
    "permutation_data",
    "sigma_data",
    "transport_element",
    "transpositions",
    "verify_certificate",
]
