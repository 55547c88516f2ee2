from .base import (
    BoxLayout,
    Encoding,
    EncodingError,
    Layout1D,
    Layout2D,
    Orientation,
    edge_obj,
    vertex_obj,
)
from .boxicity import decode_boxicity, encode_boxicity
from .linear import (
    decode_bandwidth,
    decode_orientation,
    decode_pathwidth,
    encode_bandwidth,
    encode_pathwidth,
    encode_st_orientation,
)
from .visibility import decode_layout2d, encode_bar_k_visibility, encode_bar_visibility

__all__ = [
    "BoxLayout",
    "Encoding",
    "EncodingError",
    "Layout1D",
    "Layout2D",
    "Orientation",
    "decode_bandwidth",
    "decode_boxicity",
    "decode_layout2d",
    "decode_orientation",
    "decode_pathwidth",
    "edge_obj",
    "encode_bandwidth",
    "encode_bar_k_visibility",
    "encode_bar_visibility",
    "encode_boxicity",
    "encode_pathwidth",
    "encode_st_orientation",
    "vertex_obj",
]
