import numpy as np
import pytest

from tvlevelset.core import extract_level_set
from tvlevelset.pgm import PGMError, load_image, parse_pgm, save_image, save_mask
from tvlevelset.phantom import (
    PhantomSpec,
    Shape,
    default_phantom_spec,
    load_phantom_spec,
    render_phantom,
    shape_mask,
)


def test_no_shapes_is_constant():
    img = render_phantom(PhantomSpec(5, 7, 33.0))
    assert img.shape == (5, 7)
    assert np.all(img == 33.0)


def test_single_rectangle_level_set():
    spec = PhantomSpec(20, 20, 50.0, (Shape("rectangle", (3, 5, 10, 10), 200.0),))
    mask = extract_level_set(render_phantom(spec), 70.0)
    assert mask.sum() == 100
    assert mask[3:13, 5:15].all()


def test_overlap_last_writer_wins():
    spec = PhantomSpec(16, 16, 10.0, (
        Shape("rectangle", (2, 2, 8, 8), 100.0),
        Shape("disk", (8, 8, 4), 200.0),
        Shape("rectangle", (7, 7, 3, 3), 50.0),
    ))
    img = render_phantom(spec)
    for i in range(16):
        for j in range(16):
            expected = 10.0
            if 2 <= i < 10 and 2 <= j < 10:
                expected = 100.0
            if (i - 8) ** 2 + (j - 8) ** 2 <= 16:
                expected = 200.0
            if 7 <= i < 10 and 7 <= j < 10:
                expected = 50.0
            assert img[i, j] == expected, (i, j)


def test_out_of_canvas_is_clipped():
    spec = PhantomSpec(8, 8, 0.0, (Shape("rectangle", (-3, 6, 5, 10), 90.0),))
    img = render_phantom(spec)
    assert img.sum() == 90.0 * 2 * 2


def test_default_phantom_analytic_level_sets():
    spec = default_phantom_spec()
    img = render_phantom(spec)
    assert img.shape == (32, 32)
    assert set(np.unique(img)) == {40.0, 90.0, 120.0}
    rect, disk = (shape_mask(s, 32, 32) for s in spec.shapes)
    assert rect.sum() == 12 * 20
    assert not (rect & disk).any()
    # gamma strictly between intensities -> union of the shapes above it
    np.testing.assert_array_equal(extract_level_set(img, 70.0), rect | disk)
    np.testing.assert_array_equal(extract_level_set(img, 100.0), rect)
    assert not extract_level_set(img, 130.0).any()


def test_shape_validation():
    with pytest.raises(ValueError):
        Shape("triangle", (1, 2, 3), 10.0)
    with pytest.raises(ValueError):
        Shape("disk", (1, 2), 10.0)
    with pytest.raises(ValueError):
        Shape("disk", (1, 2, 3), 300.0)


def test_spec_json_round_trip(tmp_path):
    import json

    spec = default_phantom_spec()
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec.to_dict()))
    assert load_phantom_spec(path) == spec


def test_load_p2(tmp_path):
    path = tmp_path / "a.pgm"
    path.write_bytes(b"P2\n# a comment\n2 2\n255\n0 10\n20 30\n")
    np.testing.assert_array_equal(load_image(path), [[0, 10], [20, 30]])


def test_p2_p5_equivalent(tmp_path, rng):
    img = rng.integers(0, 256, size=(3, 5))
    p2 = b"P2\n5 3\n255\n" + " ".join(str(v) for v in img.ravel()).encode()
    p5 = b"P5\n5 3\n255\n" + img.astype(np.uint8).tobytes()
    np.testing.assert_array_equal(parse_pgm(p2), parse_pgm(p5))
    np.testing.assert_array_equal(parse_pgm(p5), img)


def test_save_load_round_trip(tmp_path, rng):
    img = rng.integers(0, 256, size=(7, 4)).astype(float)
    save_image(img, tmp_path / "x.pgm")
    back = load_image(tmp_path / "x.pgm")
    np.testing.assert_array_equal(back, img)
    assert (tmp_path / "x.pgm").read_bytes().startswith(b"P5\n4 7\n255\n")


def test_save_rounds_half_up_and_clamps(tmp_path):
    save_image(np.array([[254.6, -3.0, 2.5, 300.0, 1.49]]), tmp_path / "x.pgm")
    np.testing.assert_array_equal(load_image(tmp_path / "x.pgm"), [[255, 0, 3, 255, 1]])


def test_mask_files(tmp_path, rng):
    save_mask(np.ones((3, 3), bool), tmp_path / "all.pgm")
    assert np.all(load_image(tmp_path / "all.pgm") == 255)
    save_mask(np.zeros((3, 3), bool), tmp_path / "none.pgm")
    assert np.all(load_image(tmp_path / "none.pgm") == 0)
    m = rng.random((6, 5)) < 0.5
    save_mask(m, tmp_path / "m.pgm")
    np.testing.assert_array_equal(load_image(tmp_path / "m.pgm") >= 128, m)


@pytest.mark.parametrize("data, offset", [
    (b"P6\n2 2\n255\n" + bytes(12), 0),
    (b"P5\n2 2\n65535\n" + bytes(8), 7),
    (b"P5\n2 x\n255\n" + bytes(4), 5),
    (b"P5\n2 2\n255\n" + bytes(3), 14),
    (b"P2\n2 2\n255\n1 2 3", 16),
    (b"P2\n2 1\n255\n1 300", 13),
    (b"P5\n2 2", 6),
])
def test_malformed_files_report_offsets(data, offset):
    with pytest.raises(PGMError) as info:
        parse_pgm(data)
    assert info.value.offset == offset


def test_load_error_mentions_path(tmp_path):
    path = tmp_path / "bad.pgm"
    path.write_bytes(b"garbage")
    with pytest.raises(PGMError, match="bad.pgm"):
        load_image(path)


def test_save_to_missing_directory(tmp_path):
    with pytest.raises(OSError, match="nowhere"):
        save_image(np.zeros((2, 2)), tmp_path / "nowhere" / "x.pgm")
