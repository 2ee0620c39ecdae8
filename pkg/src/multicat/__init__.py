"""Group-covariant multimode bosonic codes: construction, gates, loss and recovery."""

from .channels import kl_matrix, kl_theta_scan, kraus
from .codes import BosonicCode, CovariantEncoder, coherent_code, encode, load_code, projector, save_code
from .errors import MulticatError, NumericalFailure
from .fock import FockOperator, FockSpace, FockStateVector, cat2, cat4, coherent
from .gates import single_qubit_gate, verify_cp_omega
from .gaussian import crot, lift
from .groups import FiniteUnitaryGroup, builtin_group, close_group, is_unitary_1_design
from .recovery import effective_channel, fidelity_optimal, fidelity_transpose, sweep
from .transversal import haar_projector_estimate, transversal_code, transversal_projector

__version__ = "0.1.0"

__all__ = [
    "BosonicCode", "CovariantEncoder", "FiniteUnitaryGroup", "FockOperator", "FockSpace",
    "FockStateVector", "MulticatError", "NumericalFailure", "builtin_group", "cat2", "cat4",
    "close_group", "coherent", "coherent_code", "crot", "effective_channel", "encode",
    "fidelity_optimal", "fidelity_transpose", "haar_projector_estimate", "is_unitary_1_design",
    "kl_matrix", "kl_theta_scan", "kraus", "lift", "load_code", "projector", "save_code",
    "single_qubit_gate", "sweep", "transversal_code", "transversal_projector", "verify_cp_omega",
]
