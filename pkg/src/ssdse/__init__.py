"""Sequential unsharp discrimination of two entangled two-qubit states.

Submodules: ``linalg`` (small Hermitian algebra), ``states`` (ensemble
families), ``measurement`` (LOCC POVMs), ``protocol`` (the sequential chain),
``entanglement`` (negativity and witnesses), ``analysis`` (coefficient
recursions and positivity scans) and ``cli``.
"""
from .protocol import ProtocolTrace, SharpnessSchedule, run
from .states import EnsembleSpec, GeneralFamilyParams, SpecialFamilyParams

__all__ = [
    "EnsembleSpec",
    "GeneralFamilyParams",
    "ProtocolTrace",
    "SharpnessSchedule",
    "SpecialFamilyParams",
    "run",
]
__version__ = "0.1.0"
