"""Test the model checkpoint format."""

import struct
import zlib

import pytest
import torch

from othellonet.dataset import EncodingScheme
from othellonet.nn import (
    BadMagic,
    ChecksumMismatch,
    ShapeMismatch,
    TrainConfig,
    TruncatedCheckpoint,
    VersionMismatch,
    forward,
    he_init,
    load_model,
    predict,
    preset,
    save_model,
    train,
)
from othellonet.nn.checkpoint import from_bytes, to_bytes


def _trained_bn_network():
    spec = preset("conv4", input_channels=3, batch_norm=True, dropout=0.5, width=4, fc_units=16)
    params = he_init(spec, 0)
    # move BatchNorm running statistics away from their initial values
    batch = torch.rand((8, 3, 8, 8), generator=torch.Generator().manual_seed(1))
    forward(spec, params, batch, train=True, generator=torch.Generator().manual_seed(2))
    return spec, params, batch


def test_round_trip_is_bit_exact(tmp_path):
    spec, params, batch = _trained_bn_network()
    path = tmp_path / "net.onn"
    save_model(spec, params, path, EncodingScheme.VMOVES)
    checkpoint = load_model(path)
    assert checkpoint.spec == spec
    assert checkpoint.scheme is EncodingScheme.VMOVES
    assert checkpoint.params.equal(params)
    assert torch.equal(predict(checkpoint.spec, checkpoint.params, batch), predict(spec, params, batch))


def test_wrong_architecture_rejected(tmp_path):
    conv4 = preset("conv4", width=2, fc_units=8)
    conv8 = preset("conv8", width=2, fc_units=8)
    path = tmp_path / "conv4.onn"
    save_model(conv4, he_init(conv4, 0), path)
    with pytest.raises(ShapeMismatch):
        load_model(path, expected_spec=conv8)
    assert load_model(path, expected_spec=conv4).spec == conv4


def test_encoding_must_match_channels():
    spec = preset("linear", input_channels=2)
    with pytest.raises(ShapeMismatch):
        to_bytes(spec, he_init(spec, 0), EncodingScheme.ONES)


def test_corruption_detected():
    spec = preset("linear")
    blob = to_bytes(spec, he_init(spec, 0))
    with pytest.raises(BadMagic):
        from_bytes(b"NOPE" + blob[4:])
    with pytest.raises(VersionMismatch):
        from_bytes(blob[:4] + struct.pack("<H", 2) + blob[6:])
    damaged = bytearray(blob)
    damaged[len(blob) // 2] ^= 0x01
    with pytest.raises(ChecksumMismatch):
        from_bytes(bytes(damaged))


def test_trained_parameters_survive(tmp_path):
    from tests.test_nn_training import consistent_examples

    data = consistent_examples(64)
    spec = preset("conv4", width=2, fc_units=8)
    params, _ = train(spec, data, TrainConfig(epochs=1, batch_size=32))
    path = tmp_path / "trained.onn"
    save_model(spec, params, path)
    assert load_model(path).params.equal(params)


def test_truncated_header_rejected():
    spec = preset("linear")
    blob = to_bytes(spec, he_init(spec, 0))
    with pytest.raises(TruncatedCheckpoint):
        from_bytes(blob[:5])

    body = blob[:-4]
    layers_start = 4 + 7 + 1 + len(spec.name.encode("utf-8")) + 2
    # cut inside the fixed fields, the name, the layer table and the tensors, with a valid checksum
    for cut in (8, 12, layers_start, len(body) - 4):
        short = body[:cut]
        with pytest.raises(TruncatedCheckpoint):
            from_bytes(short + struct.pack("<I", zlib.crc32(short)))
