"""
crspectra: exact bound states and scattering for the Coulomb problem with
inverse-square barriers on the positive octant, with independent numerical
checks of every closed form.
"""

from .bound import BoundState, energy, psi
from .errors import CRError
from .qnum import BoundLabels, ModelParams, enumerate_states
from .scatter import AmplitudeResult, ScatterConfig

__version__ = "0.1.0"

__all__ = ["AmplitudeResult", "BoundLabels", "BoundState", "CRError", "ModelParams", "ScatterConfig",
           "energy", "enumerate_states", "psi"]
