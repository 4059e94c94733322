"""Classical simulation of entanglement swapping with bounded communication.

Three parties (Alice, a Referee and Bob) reproduce the singlet correlation
E(x, y) = -x.y using two independent shared-randomness sources and exactly
9 bits of communication per round.
"""

from swapsim.geometry import (
    MeasurementDirection,
    equatorial_agreement,
    normalize_angle,
    sector_index,
    singlet_correlation,
)
from swapsim.protocol_full import RoundOutcome, RoundTranscript, run_full, run_protocol2
from swapsim.protocol_one import HiddenVariables, run_protocol1, weight

__all__ = [
    "HiddenVariables",
    "MeasurementDirection",
    "RoundOutcome",
    "RoundTranscript",
    "equatorial_agreement",
    "normalize_angle",
    "run_full",
    "run_protocol1",
    "run_protocol2",
    "sector_index",
    "singlet_correlation",
    "weight",
]

__version__ = "0.1.0"
