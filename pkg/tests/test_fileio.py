import struct

import numpy as np
import pytest

from nlrt.fileio import (
    MAGIC,
    TensorFileError,
    export_raw,
    fmt,
    import_raw,
    read_labels,
    read_tensor,
    write_csv,
    write_tensor,
)


def test_roundtrip_bit_identical(tmp_path, rng):
    t = rng.standard_normal((4, 5, 6))
    write_tensor(tmp_path / "t.nlrt", t)
    back = read_tensor(tmp_path / "t.nlrt")
    assert back.tobytes() == t.tobytes()


def test_header_layout(tmp_path):
    t = np.arange(6.0).reshape(2, 3)
    write_tensor(tmp_path / "t.nlrt", t)
    raw = (tmp_path / "t.nlrt").read_bytes()
    assert raw[:4] == MAGIC
    assert struct.unpack_from("<HBB2Q", raw, 4) == (1, 0, 2, 2, 3)
    # column-major payload
    assert np.frombuffer(raw, "<f8", offset=24).tolist() == [0.0, 3.0, 1.0, 4.0, 2.0, 5.0]


def test_f32_widening(tmp_path, rng):
    t = rng.standard_normal((3, 4)).astype(np.float32)
    write_tensor(tmp_path / "t.nlrt", t, dtype="f32")
    back = read_tensor(tmp_path / "t.nlrt")
    assert back.dtype == np.float64
    for a, b in zip(back.ravel(), t.ravel()):
        assert a == float(b)


def test_bad_magic(tmp_path):
    write_tensor(tmp_path / "t.nlrt", np.ones(3))
    raw = bytearray((tmp_path / "t.nlrt").read_bytes())
    raw[0:4] = b"XXXX"
    (tmp_path / "bad.nlrt").write_bytes(bytes(raw))
    with pytest.raises(TensorFileError, match="bad magic"):
        read_tensor(tmp_path / "bad.nlrt")


@pytest.mark.parametrize("cut", [10, 30])
def test_truncated(tmp_path, cut):
    write_tensor(tmp_path / "t.nlrt", np.ones((2, 2)))
    raw = (tmp_path / "t.nlrt").read_bytes()
    (tmp_path / "cut.nlrt").write_bytes(raw[:cut])
    with pytest.raises(TensorFileError):
        read_tensor(tmp_path / "cut.nlrt")


def test_bad_version_and_dtype(tmp_path):
    write_tensor(tmp_path / "t.nlrt", np.ones(2))
    raw = bytearray((tmp_path / "t.nlrt").read_bytes())
    raw[4] = 9
    (tmp_path / "v.nlrt").write_bytes(bytes(raw))
    with pytest.raises(TensorFileError, match="version"):
        read_tensor(tmp_path / "v.nlrt")
    raw[4] = 1
    raw[6] = 7
    (tmp_path / "d.nlrt").write_bytes(bytes(raw))
    with pytest.raises(TensorFileError, match="dtype"):
        read_tensor(tmp_path / "d.nlrt")


def test_raw_roundtrip(tmp_path, rng):
    t = rng.random((4, 3, 5)).astype(np.float32).astype(np.float64)
    export_raw(tmp_path / "x.raw", t, "f32")
    np.testing.assert_array_equal(import_raw(tmp_path / "x.raw", t.shape, "f32"), t)


def test_raw_size_mismatch(tmp_path):
    (tmp_path / "x.raw").write_bytes(b"\0" * 10)
    with pytest.raises(ValueError, match="expected 24 bytes.*got 10"):
        import_raw(tmp_path / "x.raw", (2, 3), "f32")


def test_raw_normalize(tmp_path, rng):
    t = rng.random((5, 6)) * 37.0
    export_raw(tmp_path / "x.raw", t, "f64")
    out = import_raw(tmp_path / "x.raw", t.shape, "f64", normalize=True)
    assert out.max() == 1.0
    assert np.max(out) == max(out.ravel().tolist())


def test_raw_negative(tmp_path):
    export_raw(tmp_path / "x.raw", np.array([1.0, -2.0, 3.0]), "f64")
    with pytest.raises(ValueError, match="negative"):
        import_raw(tmp_path / "x.raw", (3,), "f64")
    out = import_raw(tmp_path / "x.raw", (3,), "f64", clamp=True)
    assert out.tolist() == [1.0, 0.0, 3.0]


def test_raw_integer_dtype(tmp_path):
    (tmp_path / "x.raw").write_bytes(np.array([0, 500, 65535], dtype="<u2").tobytes())
    assert import_raw(tmp_path / "x.raw", (3,), "u16").tolist() == [0.0, 500.0, 65535.0]


def test_csv_round_trip_precision(tmp_path):
    vals = [0.1, 1 / 3, 2.0**-40, np.float64(1e300)]
    write_csv(tmp_path / "x.csv", ["a", "b"], [(i, v) for i, v in enumerate(vals)])
    lines = (tmp_path / "x.csv").read_text().splitlines()
    assert lines[0] == "a,b"
    assert [float(line.split(",")[1]) for line in lines[1:]] == [float(v) for v in vals]
    assert fmt(np.int64(3)) == "3" and fmt(float("nan")) == "nan"


def test_read_labels(tmp_path):
    (tmp_path / "l.csv").write_text("pixel_index,class\n0,1\n5,2\n")
    idx, cls = read_labels(tmp_path / "l.csv")
    assert idx.tolist() == [0, 5] and cls.tolist() == [1, 2]
    (tmp_path / "bad.csv").write_text("i,c\n0,1\n")
    with pytest.raises(ValueError, match="header"):
        read_labels(tmp_path / "bad.csv")


def test_atomic_write_leaves_no_temp(tmp_path):
    write_tensor(tmp_path / "t.nlrt", np.ones(2))
    assert [p.name for p in tmp_path.iterdir()] == ["t.nlrt"]
