"""
Model checkpoint format (little-endian):

    magic       b"ONN1"
    version     u16
    encoding    u8      EncodingScheme tag the network was trained with
    channels    u32     input planes
    name        u8 length + utf-8 bytes
    layers      u16 count, then per layer:
                    tag u8, n_ints u8, ints u32 x n, n_reals u8, reals f64 x n
    tensors     float32 values of every parameter and BatchNorm buffer in spec order
    checksum    u32     crc32 of every preceding byte
"""

import logging
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np
import torch

from othellonet.dataset import EncodingScheme
from othellonet.nn.errors import BadMagic, ChecksumMismatch, ShapeMismatch, TruncatedCheckpoint, VersionMismatch
from othellonet.nn.layers import layer_from_table
from othellonet.nn.network import NetworkSpec, Parameters

logger = logging.getLogger(__name__)

MAGIC = b"ONN1"
VERSION = 1


@dataclass
class Checkpoint:
    spec: NetworkSpec
    params: Parameters
    scheme: EncodingScheme


class _Reader:
    def __init__(self, blob: bytes, offset: int = 0):
        self.blob = blob
        self.offset = offset

    def take(self, fmt: str):
        try:
            values = struct.unpack_from("<" + fmt, self.blob, self.offset)
        except struct.error as e:
            raise TruncatedCheckpoint(f"Checkpoint ends inside its header at byte {self.offset}") from e
        self.offset += struct.calcsize("<" + fmt)
        return values


def to_bytes(spec: NetworkSpec, params: Parameters, scheme: EncodingScheme = EncodingScheme.PIECES) -> bytes:
    if scheme.channels != spec.input_channels:
        raise ShapeMismatch(f"{scheme.value} has {scheme.channels} planes, network expects {spec.input_channels}")
    name = spec.name.encode("utf-8")[:255]
    parts = [
        MAGIC,
        struct.pack("<HBI", VERSION, scheme.tag, spec.input_channels),
        struct.pack("<B", len(name)) + name,
        struct.pack("<H", len(spec.layers)),
    ]
    for layer in spec.layers:
        ints, reals = layer.ints(), layer.reals()
        parts.append(struct.pack(f"<BB{len(ints)}I", layer.tag, len(ints), *ints))
        parts.append(struct.pack(f"<B{len(reals)}d", len(reals), *reals))
    for tensor_name in spec.tensor_shapes():
        array = params[tensor_name].detach().to(torch.float32).contiguous().numpy()
        parts.append(array.astype("<f4").tobytes())
    body = b"".join(parts)
    return body + struct.pack("<I", zlib.crc32(body))


def from_bytes(blob: bytes, expected_spec: Optional[NetworkSpec] = None) -> Checkpoint:
    if blob[:4] != MAGIC:
        raise BadMagic(f"Not a model checkpoint (magic {blob[:4]!r})")
    reader = _Reader(blob, 4)
    (version,) = reader.take("H")
    if version != VERSION:
        raise VersionMismatch(f"Checkpoint version {version}, expected {VERSION}")
    body, (stored_crc,) = blob[:-4], struct.unpack("<I", blob[-4:])
    if zlib.crc32(body) != stored_crc:
        raise ChecksumMismatch("Checkpoint checksum does not match its contents")
    reader.blob = body

    tag, channels = reader.take("BI")
    (name_len,) = reader.take("B")
    if reader.offset + name_len > len(body):
        raise TruncatedCheckpoint("Checkpoint ends inside the network name")
    name = blob[reader.offset : reader.offset + name_len].decode("utf-8")
    reader.offset += name_len
    (layer_count,) = reader.take("H")
    layers = []
    for _ in range(layer_count):
        layer_tag, n_ints = reader.take("BB")
        ints = reader.take(f"{n_ints}I")
        (n_reals,) = reader.take("B")
        reals = reader.take(f"{n_reals}d")
        layers.append(layer_from_table(layer_tag, ints, reals))
    spec = NetworkSpec(tuple(layers), channels, name)

    if expected_spec is not None and (
        expected_spec.layers != spec.layers or expected_spec.input_channels != spec.input_channels
    ):
        raise ShapeMismatch(f"Checkpoint holds {spec.describe()}, expected {expected_spec.describe()}")

    tensors = {}
    for tensor_name, shape in spec.tensor_shapes().items():
        count = int(np.prod(shape))
        end = reader.offset + 4 * count
        if end > len(body):
            raise TruncatedCheckpoint(f"Checkpoint ends inside tensor {tensor_name}")
        values = np.frombuffer(body, dtype="<f4", count=count, offset=reader.offset)
        tensors[tensor_name] = torch.from_numpy(values.astype(np.float32).reshape(shape))
        reader.offset = end
    if reader.offset != len(body):
        raise ShapeMismatch(f"{len(body) - reader.offset} unexpected trailing bytes in checkpoint")
    return Checkpoint(spec, Parameters(spec, tensors), EncodingScheme.from_tag(tag))


def save_model(
    spec: NetworkSpec,
    params: Parameters,
    path: Union[str, Path],
    scheme: EncodingScheme = EncodingScheme.PIECES,
) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(to_bytes(spec, params, scheme))
    logger.info(f"Saved {spec.name} checkpoint to {path}")


def load_model(path: Union[str, Path], expected_spec: Optional[NetworkSpec] = None) -> Checkpoint:
    checkpoint = from_bytes(Path(path).read_bytes(), expected_spec)
    logger.info(f"Loaded {checkpoint.spec.name} ({checkpoint.spec.describe()}) from {path}")
    return checkpoint
