import zlib

import numpy as np
import pytest

from lanepost import ImageIOError, load_mask, read_gray, write_pgm, write_ppm


def png_chunk(ctype: bytes, payload: bytes) -> bytes:
    return (
        len(payload).to_bytes(4, "big")
        + ctype
        + payload
        + zlib.crc32(ctype + payload).to_bytes(4, "big")
    )


def paeth(left, up, diag):
    p = left + up - diag
    pa, pb, pc = abs(p - left), abs(p - up), abs(p - diag)
    if pa <= pb and pa <= pc:
        return left
    if pb <= pc:
        return up
    return diag


def make_gray_png(gray: np.ndarray, row_filters=None) -> bytes:
    """Independent PNG encoder for test fixtures (grayscale, 8-bit)."""
    gray = np.asarray(gray, dtype=np.uint8)
    height, width = gray.shape
    if row_filters is None:
        row_filters = [0] * height
    raw = bytearray()
    prev = [0] * width
    for r, ftype in zip(range(height), row_filters):
        row = [int(v) for v in gray[r]]
        raw.append(ftype)
        for i in range(width):
            left = row[i - 1] if i else 0
            if ftype == 0:
                enc = row[i]
            elif ftype == 1:
                enc = row[i] - left
            elif ftype == 2:
                enc = row[i] - prev[i]
            elif ftype == 3:
                enc = row[i] - ((left + prev[i]) >> 1)
            else:
                enc = row[i] - paeth(left, prev[i], prev[i - 1] if i else 0)
            raw.append(enc & 0xFF)
        prev = row
    ihdr = (
        width.to_bytes(4, "big")
        + height.to_bytes(4, "big")
        + bytes([8, 0, 0, 0, 0])  # depth 8, grayscale, no interlace
    )
    return (
        b"\x89PNG\r\n\x1a\n"
        + png_chunk(b"IHDR", ihdr)
        + png_chunk(b"IDAT", zlib.compress(bytes(raw)))
        + png_chunk(b"IEND", b"")
    )


class TestPgm:
    def test_p5_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        gray = rng.integers(0, 256, (17, 23), dtype=np.uint8)
        path = tmp_path / "img.pgm"
        write_pgm(path, gray)
        assert np.array_equal(read_gray(path), gray)

    def test_p2_with_comments(self, tmp_path):
        path = tmp_path / "ascii.pgm"
        path.write_bytes(b"P2\n# a comment\n3 2 # trailing\n255\n0 128 255\n10 20 30\n")
        assert read_gray(path).tolist() == [[0, 128, 255], [10, 20, 30]]

    def test_all_zero_mask(self, tmp_path):
        path = tmp_path / "zero.pgm"
        write_pgm(path, np.zeros((5, 7), np.uint8))
        assert not load_mask(path, 127).any()

    def test_all_saturated_mask(self, tmp_path):
        path = tmp_path / "full.pgm"
        write_pgm(path, np.full((5, 7), 255, np.uint8))
        assert load_mask(path, 127).all()

    def test_checkerboard_threshold(self, tmp_path):
        board = np.indices((6, 6)).sum(axis=0) % 2
        path = tmp_path / "board.pgm"
        write_pgm(path, (board * 255).astype(np.uint8))
        assert np.array_equal(load_mask(path, 127), board.astype(bool))

    def test_sixteen_bit_rejected(self, tmp_path):
        path = tmp_path / "deep.pgm"
        path.write_bytes(b"P5\n2 2\n65535\n" + b"\x00" * 8)
        with pytest.raises(ImageIOError):
            read_gray(path)

    def test_truncated_rejected(self, tmp_path):
        path = tmp_path / "short.pgm"
        path.write_bytes(b"P5\n4 4\n255\n\x00\x01")
        with pytest.raises(ImageIOError):
            read_gray(path)

    def test_unknown_magic_rejected(self, tmp_path):
        path = tmp_path / "weird.img"
        path.write_bytes(b"XY whatever")
        with pytest.raises(ImageIOError):
            read_gray(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ImageIOError):
            read_gray(tmp_path / "nope.pgm")


class TestPng:
    @pytest.mark.parametrize("ftype", [0, 1, 2, 3, 4])
    def test_each_filter_type(self, tmp_path, ftype):
        rng = np.random.default_rng(ftype)
        gray = rng.integers(0, 256, (9, 13), dtype=np.uint8)
        path = tmp_path / f"f{ftype}.png"
        path.write_bytes(make_gray_png(gray, [ftype] * 9))
        assert np.array_equal(read_gray(path), gray)

    def test_mixed_filters(self, tmp_path):
        rng = np.random.default_rng(99)
        gray = rng.integers(0, 256, (10, 16), dtype=np.uint8)
        filters = [0, 1, 2, 3, 4, 4, 3, 2, 1, 0]
        path = tmp_path / "mixed.png"
        path.write_bytes(make_gray_png(gray, filters))
        assert np.array_equal(read_gray(path), gray)

    def test_threshold_applies(self, tmp_path):
        gray = np.array([[0, 127, 128, 255]], dtype=np.uint8)
        path = tmp_path / "thresh.png"
        path.write_bytes(make_gray_png(gray))
        assert load_mask(path, 127).tolist() == [[False, False, True, True]]

    def test_non_grayscale_rejected(self, tmp_path):
        ihdr = (2).to_bytes(4, "big") + (2).to_bytes(4, "big") + bytes([8, 2, 0, 0, 0])
        blob = (
            b"\x89PNG\r\n\x1a\n"
            + png_chunk(b"IHDR", ihdr)
            + png_chunk(b"IDAT", zlib.compress(b"\x00" * 14))
            + png_chunk(b"IEND", b"")
        )
        path = tmp_path / "rgb.png"
        path.write_bytes(blob)
        with pytest.raises(ImageIOError):
            read_gray(path)

    def test_interlaced_rejected(self, tmp_path):
        ihdr = (2).to_bytes(4, "big") + (2).to_bytes(4, "big") + bytes([8, 0, 0, 0, 1])
        blob = b"\x89PNG\r\n\x1a\n" + png_chunk(b"IHDR", ihdr) + png_chunk(b"IEND", b"")
        path = tmp_path / "adam7.png"
        path.write_bytes(blob)
        with pytest.raises(ImageIOError):
            read_gray(path)

    def test_corrupt_data_rejected(self, tmp_path):
        ihdr = (2).to_bytes(4, "big") + (2).to_bytes(4, "big") + bytes([8, 0, 0, 0, 0])
        blob = (
            b"\x89PNG\r\n\x1a\n"
            + png_chunk(b"IHDR", ihdr)
            + png_chunk(b"IDAT", b"not zlib at all")
            + png_chunk(b"IEND", b"")
        )
        path = tmp_path / "corrupt.png"
        path.write_bytes(blob)
        with pytest.raises(ImageIOError):
            read_gray(path)


class TestPpm:
    def test_header_and_payload(self, tmp_path):
        rgb = np.zeros((2, 3, 3), np.uint8)
        rgb[0, 0] = (255, 0, 0)
        path = tmp_path / "overlay.ppm"
        write_ppm(path, rgb)
        blob = path.read_bytes()
        assert blob.startswith(b"P6\n3 2\n255\n")
        assert blob[len(b"P6\n3 2\n255\n") :] == rgb.tobytes()

    def test_shape_validated(self, tmp_path):
        with pytest.raises(ValueError):
            write_ppm(tmp_path / "bad.ppm", np.zeros((2, 3), np.uint8))
