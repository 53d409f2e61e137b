import numpy as np
import pytest

from warpgen.core import (
    DimensionMismatch,
    NonContiguousLabels,
    PrimitiveKind,
    SegmentationMap,
    UnsupportedChannels,
)
from warpgen.primitives import (
    EdgeParams,
    MissingPaletteEntry,
    compose_combined,
    decode_segmentation,
    encode_segmentation,
    extract_edges,
    primitive_to_display,
    split_combined,
)


def step_image(h=16, w=16, col=8):
    img = np.zeros((h, w, 1), np.float32)
    img[:, col:] = 1.0
    return img


def test_edges_constant_image():
    out = extract_edges(np.full((16, 16, 3), 0.3, np.float32))
    assert out.kind is PrimitiveKind.EDGE
    assert np.all(out.data == 0.0)


def test_edges_vertical_step():
    img = step_image()
    out = extract_edges(img, EdgeParams(gaussian_sigma=1.0))
    edge_cols = np.where(out.data[:, :, 0].any(axis=0))[0]
    assert edge_cols.size > 0
    # oracle: per-row argmax of raw gradient magnitude marks the step
    grad = np.abs(np.diff(img[:, :, 0], axis=1))
    oracle_cols = grad.argmax(axis=1)  # transition between col and col+1
    lo, hi = oracle_cols.min(), oracle_cols.max() + 1
    assert edge_cols.min() >= lo - 1 and edge_cols.max() <= hi + 1
    # one response per row, a single vertical line
    for r in range(img.shape[0]):
        row_hits = np.where(out.data[r, :, 0] == 1.0)[0]
        assert 1 <= row_hits.size <= 2


def test_edges_saturated_thresholds():
    img = np.random.default_rng(0).random((16, 16, 3)).astype(np.float32)
    out = extract_edges(img, EdgeParams(low_threshold=1.0, high_threshold=1.0))
    assert np.all(out.data == 0.0)


def test_edges_scale_invariant():
    img = step_image()
    a = extract_edges(img)
    b = extract_edges((img * 0.25).astype(np.float32))
    assert np.array_equal(a.data, b.data)


def test_edges_unsupported_channels():
    with pytest.raises(UnsupportedChannels):
        extract_edges(np.zeros((8, 8, 4), np.float32))


def test_edges_output_is_binary():
    img = np.random.default_rng(1).random((20, 20, 3)).astype(np.float32)
    out = extract_edges(img)
    assert np.isin(out.data, (0.0, 1.0)).all()


def test_encode_single_label():
    seg = SegmentationMap(np.zeros((4, 4), np.int64), {0: (0, 0, 0)})
    out = encode_segmentation(seg)
    assert out.data.shape == (4, 4, 1)
    assert np.all(out.data == 1.0)


def test_encode_two_labels():
    seg = SegmentationMap(np.array([[0], [1]]), {0: (0, 0, 0), 1: (1, 1, 1)})
    out = encode_segmentation(seg)
    assert np.array_equal(out.data[:, :, 0], [[1], [0]])
    assert np.array_equal(out.data[:, :, 1], [[0], [1]])


def test_encode_decode_roundtrip():
    rng = np.random.default_rng(2)
    labels = rng.integers(0, 4, (16, 16)).astype(np.int64)
    palette = {i: (i, i, i) for i in range(4)}
    seg = SegmentationMap(labels, palette)
    back = decode_segmentation(encode_segmentation(seg), palette)
    assert np.array_equal(back.labels, labels)


def test_encode_noncontiguous_labels():
    seg = SegmentationMap(np.array([[0, 2]]), {0: (0, 0, 0), 1: (1, 1, 1), 2: (2, 2, 2)})
    with pytest.raises(NonContiguousLabels):
        encode_segmentation(seg)


def test_compose_channel_arithmetic(combined_pair):
    assert combined_pair.primitive.data.shape[2] == 4  # 3 labels + edge


def test_compose_projection_recovers_parts(combined_pair):
    edge, seg = split_combined(combined_pair.primitive)
    recomposed = compose_combined(edge, seg)
    assert np.array_equal(recomposed.data, combined_pair.primitive.data)
    assert np.array_equal(seg.data, combined_pair.primitive.data[:, :, :3])


def test_compose_dimension_mismatch():
    from warpgen.core import PrimitiveTensor
    edge = PrimitiveTensor(PrimitiveKind.EDGE, np.zeros((4, 4, 1), np.float32))
    seg = encode_segmentation(SegmentationMap(np.zeros((5, 5), np.int64), {0: (0, 0, 0)}))
    with pytest.raises(DimensionMismatch):
        compose_combined(edge, seg)


def test_display_edge_only():
    from warpgen.core import PrimitiveTensor
    data = np.zeros((4, 4, 1), np.float32)
    data[1, 2, 0] = 1.0
    out = primitive_to_display(PrimitiveTensor(PrimitiveKind.EDGE, data))
    assert np.all(out[1, 2] == 1.0)
    assert np.all(out[0, 0] == 0.0)


def test_display_single_label_blue():
    seg = encode_segmentation(SegmentationMap(np.zeros((4, 4), np.int64),
                                              {0: (0, 0, 255)}))
    out = primitive_to_display(seg, {0: (0, 0, 255)})
    assert np.allclose(out, np.broadcast_to([0, 0, 1.0], (4, 4, 3)))


def test_display_combined_edges_over_labels(combined_pair):
    from pair_fixtures import PALETTE
    out = primitive_to_display(combined_pair.primitive, PALETTE)
    edge_mask = combined_pair.primitive.data[:, :, -1] == 1.0
    assert np.all(out[edge_mask] == 1.0)
    labels = np.argmax(combined_pair.primitive.data[:, :, :3], axis=2)
    sample = np.argwhere(~edge_mask & (labels == 0))[0]
    assert np.allclose(out[sample[0], sample[1]],
                       np.array(PALETTE[0], np.float32) / 255.0)


def test_display_missing_palette_entry(combined_pair):
    with pytest.raises(MissingPaletteEntry):
        primitive_to_display(combined_pair.primitive, {0: (1, 2, 3)})
