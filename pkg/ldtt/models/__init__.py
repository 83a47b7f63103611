from .families import FamiliesModel, check_soundness, interp_ctx
from .groupoids import FinGroupoid, GpdDiagram, VectDiagram, grothendieck
from .kan import lan, ran
from .univalence import Universe, ua_backward, ua_forward

__all__ = [
    "FamiliesModel", "check_soundness", "interp_ctx", "FinGroupoid",
    "GpdDiagram", "VectDiagram", "grothendieck", "lan", "ran", "Universe",
    "ua_backward", "ua_forward"
]
