"""belltensor: tensor norms linking measurement incompatibility and Bell
non-locality.

The package computes the game-locality norm ||A||_M, the compatibility norm
||A||_c, classical and quantum game biases, and the white-noise robustness
threshold Gamma, together with joint-POVM compatibility certificates and
parameter sweeps over the deformed and biased CHSH families.
"""

from .bellnorm import (SeesawResult, is_bell_local, m_bell_norm, seesaw_bias,
                       vector_m_dual_norm, vector_m_norm)
from .compat import (JointPovm, compatibility_norm, epsilon_star_dual,
                     epsilon_star_primal, gamma_from_epsilon, gamma_threshold,
                     is_compatible, joint_povm_from_decomposition)
from .errors import (BellTensorError, CertificateError, DegenerateGameError,
                     SingularMatrixError, SizeError, SolverError,
                     ValidationError)
from .games import (GameMatrix, biased_chsh, chsh, classical_bias,
                    deformed_chsh, game_from_id, i3322, is_scaled_hadamard,
                    linf_injective_norm, normalize, quantum_bias_sdp,
                    uncertainty_product)
from .measurements import (MeasurementTuple, PAULI_X, PAULI_Y, PAULI_Z,
                           add_noise, effect_from_observable,
                           observable_from_effect, pauli_tuple,
                           tuple_from_shorthand)
from .scan import (biased_closed_form, deformed_closed_form, emit_csv,
                   emit_svg, pauli_pair_compat_norm, scan_biased_chsh,
                   scan_deformed_chsh)

__version__ = "1.0.0"

__all__ = [
    "BellTensorError", "CertificateError", "DegenerateGameError",
    "GameMatrix", "JointPovm", "MeasurementTuple", "PAULI_X", "PAULI_Y",
    "PAULI_Z", "SeesawResult", "SingularMatrixError", "SizeError",
    "SolverError", "ValidationError", "add_noise", "biased_chsh",
    "biased_closed_form", "chsh", "classical_bias", "compatibility_norm",
    "deformed_chsh", "deformed_closed_form", "effect_from_observable",
    "emit_csv", "emit_svg", "epsilon_star_dual", "epsilon_star_primal",
    "game_from_id", "gamma_from_epsilon", "gamma_threshold", "i3322",
    "is_bell_local", "is_compatible", "is_scaled_hadamard",
    "joint_povm_from_decomposition", "linf_injective_norm", "m_bell_norm",
    "normalize", "observable_from_effect", "pauli_pair_compat_norm",
    "pauli_tuple", "quantum_bias_sdp", "scan_biased_chsh",
    "scan_deformed_chsh", "seesaw_bias", "tuple_from_shorthand",
    "uncertainty_product", "vector_m_dual_norm", "vector_m_norm",
]
