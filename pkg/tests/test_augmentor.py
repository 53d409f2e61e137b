import urllib.error
import urllib.request

import numpy as np
import pytest

from pair_fixtures import PALETTE, make_combined_pair
from warpgen import server
from warpgen.augmentor import (
    IndexOutOfRange,
    SampleManifest,
    fresh_sample,
    generate_dataset,
    get_sample,
    load_primitive,
    pair_from_zip,
    pair_to_zip,
)
from warpgen.core import AugmentConfig, SeedSpec, load_image


def quant(img):
    return np.clip(np.rint(img * 255.0), 0, 255).astype(np.uint8)


def tree_bytes(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


def test_n1_identity_only(tmp_path, combined_pair):
    m = generate_dataset(combined_pair, 1, SeedSpec(7), AugmentConfig(),
                         tmp_path / "d", palette=PALETTE)
    assert m.n == 1
    out = load_image(tmp_path / "d" / "image_00000.png")
    assert np.array_equal(quant(out), quant(combined_pair.image))
    prim = load_primitive(m.samples[0]["primitive_files"], m.base_dir)
    assert np.array_equal(prim.data, combined_pair.primitive.data)


def test_generation_deterministic(tmp_path, combined_pair):
    cfg = AugmentConfig()
    generate_dataset(combined_pair, 20, SeedSpec(7), cfg, tmp_path / "a",
                     palette=PALETTE)
    generate_dataset(combined_pair, 20, SeedSpec(7), cfg, tmp_path / "b",
                     palette=PALETTE)
    assert tree_bytes(tmp_path / "a") == tree_bytes(tmp_path / "b")


def test_recorded_grids_satisfy_cap(tmp_path, combined_pair):
    m = generate_dataset(combined_pair, 50, SeedSpec(3), AugmentConfig(),
                         tmp_path / "d", palette=PALETTE)
    h, w = combined_pair.image.shape[:2]
    cap_px = 0.1 * min(h, w)
    for rec in m.samples:
        src = np.asarray(rec["warp_grid"]["sources"])
        tgt = np.asarray(rec["warp_grid"]["targets"])
        d_px = (tgt - src) * [w, h]
        assert np.abs(d_px).max() <= cap_px + 1e-12


def test_get_sample_regenerates_bit_identical(tmp_path, combined_pair):
    m = generate_dataset(combined_pair, 6, SeedSpec(5), AugmentConfig(),
                         tmp_path / "d", palette=PALETTE)
    loaded = SampleManifest.load(tmp_path / "d" / "manifest.json")
    for i in range(6):
        pair = get_sample(loaded, i)
        persisted_img = load_image(tmp_path / "d" / f"image_{i:05d}.png")
        assert np.array_equal(quant(pair.image), quant(persisted_img))
        persisted_prim = load_primitive(loaded.samples[i]["primitive_files"],
                                        loaded.base_dir)
        assert np.array_equal(pair.primitive.data, persisted_prim.data)


def test_get_sample_index_zero_is_source(tmp_path, combined_pair):
    m = generate_dataset(combined_pair, 3, SeedSpec(5), AugmentConfig(),
                         tmp_path / "d", palette=PALETTE)
    pair = get_sample(m, 0)
    assert np.array_equal(quant(pair.image), quant(combined_pair.image))


def test_get_sample_out_of_range(tmp_path, combined_pair):
    m = generate_dataset(combined_pair, 2, SeedSpec(5), AugmentConfig(),
                         tmp_path / "d", palette=PALETTE)
    with pytest.raises(IndexOutOfRange):
        get_sample(m, 2)


def test_pair_zip_roundtrip(combined_pair):
    data = pair_to_zip(combined_pair, PALETTE)
    back = pair_from_zip(data)
    assert np.array_equal(quant(back.image), quant(combined_pair.image))
    assert np.array_equal(back.primitive.data, combined_pair.primitive.data)
    # deterministic serialization
    assert data == pair_to_zip(combined_pair, PALETTE)


def test_fresh_sample_deterministic(combined_pair):
    cfg = AugmentConfig()
    a = fresh_sample(combined_pair, cfg, 42, PALETTE)
    b = fresh_sample(combined_pair, cfg, 42, PALETTE)
    assert np.array_equal(a.image, b.image)
    c = fresh_sample(combined_pair, cfg, 43, PALETTE)
    assert not np.array_equal(a.image, c.image)


@pytest.fixture(scope="module")
def running_server(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("srv")
    pair = make_combined_pair()
    generate_dataset(pair, 4, SeedSpec(7), AugmentConfig(), tmp / "d",
                     palette=PALETTE)
    manifest = SampleManifest.load(tmp / "d" / "manifest.json")
    srv = server.serve(manifest, "127.0.0.1:0", background=True)
    yield f"http://127.0.0.1:{srv.server_address[1]}"
    srv.shutdown()


def get(url):
    return urllib.request.urlopen(url, timeout=10).read()


def test_server_health(running_server):
    assert get(running_server + "/health") == b"ok"


def test_server_config(running_server):
    import json
    cfg = json.loads(get(running_server + "/config"))
    assert cfg["grid_n"] == 3 and cfg["max_shift_frac"] == 0.1


def test_server_sample_byte_stable(running_server):
    a = get(running_server + "/sample?index=0")
    b = get(running_server + "/sample?index=0")
    assert a == b
    pair = pair_from_zip(a)
    assert pair.image.shape == (24, 24, 3)


def test_server_fresh_deterministic(running_server):
    assert get(running_server + "/fresh?seed=42") == get(running_server + "/fresh?seed=42")


def test_server_bad_requests(running_server):
    for path in ("/sample?index=zzz", "/sample?index=99", "/fresh?seed=x",
                 "/sample", "/fresh"):
        with pytest.raises(urllib.error.HTTPError) as exc:
            get(running_server + path)
        assert exc.value.code == 400
    with pytest.raises(urllib.error.HTTPError) as exc:
        get(running_server + "/nope")
    assert exc.value.code == 404
