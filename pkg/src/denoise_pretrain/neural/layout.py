""" denoise_pretrain.neural.layout

    parameter naming for the graph network

        encoder/embedding            118 x latent
        encoder/mask_token           latent
        encoder/edge/linear_0/{w,b}  n_basis -> latent, then encoder/edge/norm
        processor/mp{l}/edge/...     edge update MLP of message-passing step l
        processor/mp{l}/vertex/...   vertex update MLP of message-passing step l
        decoder/noise, decoder/noise_edge, decoder/atom_type, decoder/graph_vertex, decoder/graph_readout

    processor names carry no block-iteration index: blocks share them

"""

from __future__ import annotations

ENCODER = "encoder"
PROCESSOR = "processor"
DECODER = "decoder"

EMBEDDING = "encoder/embedding"
MASK_TOKEN = "encoder/mask_token"
EDGE_ENCODER = "encoder/edge"

NOISE_HEAD = "decoder/noise"
NOISE_EDGE_HEAD = "decoder/noise_edge"
TYPE_HEAD = "decoder/atom_type"
GRAPH_VERTEX_HEAD = "decoder/graph_vertex"
GRAPH_READOUT_HEAD = "decoder/graph_readout"
GRAPH_HEADS = (GRAPH_VERTEX_HEAD, GRAPH_READOUT_HEAD)


def edge_mlp(step: int) -> str:
    return f"{PROCESSOR}/mp{step}/edge"


def vertex_mlp(step: int) -> str:
    return f"{PROCESSOR}/mp{step}/vertex"


def linear(prefix: str, index: int) -> tuple[str, str]:
    return f"{prefix}/linear_{index}/w", f"{prefix}/linear_{index}/b"


def norm(prefix: str, part: str = "norm") -> tuple[str, str]:
    return f"{prefix}/{part}/gain", f"{prefix}/{part}/bias"


def is_backbone(name: str) -> bool:
    return not name.startswith(DECODER + "/")
