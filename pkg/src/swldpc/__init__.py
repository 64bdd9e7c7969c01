"""LDPC coset codes for lossless source coding with decoder side information.

Syndrome encoding, MAP belief-propagation decoding, quantized density
evolution, and the conversion between joint sources and binary-input
output-symmetric channels.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .bp_decoder import (DecodeResult, MessageState, bp_messages, check_node_op,
                         count_incorrect_messages, decode, gamma, gamma_mag,
                         variable_node_op)
from .density_evolution import (DeSettings, DeTrajectory, QuantizedDensity,
                                bec_de_oracle, de_iterate, error_probability,
                                evolve_source, find_threshold, quantize, run_de)
from .ldpc import (AWGN_IRREGULAR_R12, DegreeDistribution, Syndrome, TannerGraph,
                   design_rates, sample_graph, sample_source_pairs,
                   syndrome_encode)
from .source_model import (BiosChannel, DiscreteLlrDensity, JointSource,
                           SolverError, StochasticMap, are_equivalent,
                           channel_capacity, check_symmetry,
                           conditional_entropy, degrade_source,
                           densities_close, equivalence_class_source,
                           initial_density, initial_llr, is_degraded,
                           mismatch_initial_density, ml_mismatch_source,
                           parse_source, source_to_channel)

__version__ = "0.1.0"
