"""Lossless XOR-delta compression for precision-quantized household load data."""

from ._backend import BACKEND
from .bitstream import BitReader, BitWriter
from .codec import (
    EncodedStream,
    XorParts,
    XorWindow,
    decode_array,
    decode_next,
    decode_sequence,
    encode_array,
    encode_next,
    encode_sequence,
    xor_parts,
)
from .container import ContainerHeader, read_container, timestamp_of, write_container
from .errors import (
    BadMagic,
    CorruptStream,
    LcpError,
    OutOfRange,
    ParseError,
    TruncatedStream,
    UnsupportedVersion,
)
from .obfuscate import ObfuscationPlan, decode_obfuscated, encode_obfuscated, splice, unsplice
from .quantize import ChannelSpec, dequantize, lca_round, quantize

__version__ = "0.1.0"
