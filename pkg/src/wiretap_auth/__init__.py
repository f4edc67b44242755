"""Multi-message authentication over binary symmetric wiretap channels.

Library plus CLI: balanced universal hashing of messages to short tags,
strong-secrecy polar coding of the tags, successive-cancellation
decoding, restricted adversaries, and batch experiments.
"""

__version__ = "0.1.0"

from .bits import BitVector, RngSeed, random_bits, xor
from .channel import (BscParam, WiretapChannel, binary_entropy,
                      secrecy_capacity, transmit)
from .errors import (DomainError, InsufficientSecureCapacityError,
                     LengthMismatchError, MalformedInputError,
                     NoPositiveSecrecyError, NotPowerOfTwoError,
                     TooLargeError, ZeroStateError)
from .lfsr_hash import (GenPoly, HashParams, LfsrHashKey, epsilon_bound,
                        generate_key, hash_message, lfsr_stream,
                        validate_poly)
from .polar import (FrozenSpec, PolarParams, QualityProfile,
                    base_bhattacharyya, bit_reversal_permutation,
                    exact_bitchannel_quality, polar_transform,
                    quality_profile, sc_decode)
from .protocol import (ProtocolConfig, RoundTranscript, authenticate_send,
                       authentication_rate, build_config, run_session,
                       verify)
from .secure_code import (IndexPartition, PartitionParams, SecurePolarCode,
                          export_partition, good_set, partition, poor_set,
                          secrecy_rate, secure_decode, secure_encode)
from .adversary import (AttackOutcome, AttackStrategy, all_strategies,
                        estimate_success, impersonate, substitute_type1,
                        substitute_type2, wilson_interval)

__all__ = [
    "BitVector", "RngSeed", "random_bits", "xor",
    "BscParam", "WiretapChannel", "binary_entropy", "secrecy_capacity",
    "transmit",
    "DomainError", "InsufficientSecureCapacityError", "LengthMismatchError",
    "MalformedInputError", "NoPositiveSecrecyError", "NotPowerOfTwoError",
    "TooLargeError", "ZeroStateError",
    "GenPoly", "HashParams", "LfsrHashKey", "epsilon_bound", "generate_key",
    "hash_message", "lfsr_stream", "validate_poly",
    "FrozenSpec", "PolarParams", "QualityProfile", "base_bhattacharyya",
    "bit_reversal_permutation", "exact_bitchannel_quality", "polar_transform",
    "quality_profile", "sc_decode",
    "ProtocolConfig", "RoundTranscript", "authenticate_send",
    "authentication_rate", "build_config", "run_session", "verify",
    "IndexPartition", "PartitionParams", "SecurePolarCode",
    "export_partition", "good_set", "partition", "poor_set", "secrecy_rate",
    "secure_decode", "secure_encode",
    "AttackOutcome", "AttackStrategy", "all_strategies", "estimate_success",
    "impersonate", "substitute_type1", "substitute_type2", "wilson_interval",
]
