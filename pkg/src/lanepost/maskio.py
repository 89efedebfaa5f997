"""Mask and overlay file I/O: portable graymaps (P2/P5), portable pixmaps
(P6), and 8-bit grayscale PNG reading. No image library dependency; masks
are small and load time is not on the per-frame path.
"""

from __future__ import annotations

import zlib

import numpy as np

from .errors import ImageIOError

__all__ = ["read_gray", "load_mask", "write_pgm", "write_ppm"]

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
_MAX_PIXELS = 100_000_000


def read_gray(path) -> np.ndarray:
    """Read a grayscale image as a (H, W) uint8 array.

    Accepts P2/P5 graymaps and 8-bit grayscale PNG, dispatched on the file
    signature.
    """
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise ImageIOError(path, f"cannot read file: {exc}") from exc
    if data.startswith(_PNG_SIGNATURE):
        return _decode_png_gray(path, data)
    if data[:2] in (b"P2", b"P5"):
        return _decode_pgm(path, data)
    raise ImageIOError(path, "unsupported format (want P2/P5 graymap or grayscale PNG)")


def load_mask(path, threshold: int = 127) -> np.ndarray:
    """Boolean lane mask: true where the gray value exceeds threshold."""
    return read_gray(path) > threshold


def write_pgm(path, gray) -> None:
    arr = np.ascontiguousarray(gray, dtype=np.uint8)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2D gray image, got shape {arr.shape}")
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (arr.shape[1], arr.shape[0]))
        fh.write(arr.tobytes())


def write_ppm(path, rgb) -> None:
    arr = np.ascontiguousarray(rgb, dtype=np.uint8)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected an (H, W, 3) RGB image, got shape {arr.shape}")
    with open(path, "wb") as fh:
        fh.write(b"P6\n%d %d\n255\n" % (arr.shape[1], arr.shape[0]))
        fh.write(arr.tobytes())


# ---------------------------------------------------------------------------
# portable graymap
# ---------------------------------------------------------------------------

def _pgm_tokens(data):
    """Yield whitespace-separated header tokens, skipping # comments."""
    i = 0
    n = len(data)
    while i < n:
        ch = data[i : i + 1]
        if ch.isspace():
            i += 1
        elif ch == b"#":
            while i < n and data[i : i + 1] not in (b"\n", b"\r"):
                i += 1
        else:
            start = i
            while i < n and not data[i : i + 1].isspace() and data[i : i + 1] != b"#":
                i += 1
            yield data[start:i], i
    return


def _decode_pgm(path, data) -> np.ndarray:
    magic = data[:2]
    tokens = _pgm_tokens(data[2:])

    def next_int(what):
        try:
            token, end = next(tokens)
        except StopIteration:
            raise ImageIOError(path, f"truncated header: missing {what}") from None
        try:
            return int(token), end
        except ValueError:
            raise ImageIOError(path, f"bad {what} {token!r}") from None

    width, _ = next_int("width")
    height, _ = next_int("height")
    maxval, header_end = next_int("maxval")
    if width < 1 or height < 1:
        raise ImageIOError(path, f"bad dimensions {width}x{height}")
    if width * height > _MAX_PIXELS:
        raise ImageIOError(path, f"dimension overflow: {width}x{height}")
    if not 0 < maxval <= 255:
        raise ImageIOError(path, f"unsupported maxval {maxval} (8-bit only)")

    if magic == b"P5":
        start = 2 + header_end + 1  # single whitespace byte after maxval
        raw = data[start : start + width * height]
        if len(raw) != width * height:
            raise ImageIOError(path, f"truncated pixel data: {len(raw)} of {width * height} bytes")
        return np.frombuffer(raw, dtype=np.uint8).reshape(height, width).copy()

    values = data[2 + header_end :].split()
    if len(values) != width * height:
        raise ImageIOError(path, f"expected {width * height} samples, found {len(values)}")
    try:
        arr = np.array([int(v) for v in values], dtype=np.int64)
    except ValueError as exc:
        raise ImageIOError(path, f"bad sample value: {exc}") from exc
    if arr.min() < 0 or arr.max() > maxval:
        raise ImageIOError(path, "sample value out of range")
    return arr.astype(np.uint8).reshape(height, width)


# ---------------------------------------------------------------------------
# grayscale PNG
# ---------------------------------------------------------------------------

def _decode_png_gray(path, data) -> np.ndarray:
    pos = len(_PNG_SIGNATURE)
    ihdr = None
    idat = bytearray()
    while pos + 8 <= len(data):
        length = int.from_bytes(data[pos : pos + 4], "big")
        ctype = data[pos + 4 : pos + 8]
        chunk = data[pos + 8 : pos + 8 + length]
        if len(chunk) != length:
            raise ImageIOError(path, "truncated chunk")
        pos += 12 + length  # length + type + data + crc
        if ctype == b"IHDR":
            ihdr = chunk
        elif ctype == b"IDAT":
            idat.extend(chunk)
        elif ctype == b"IEND":
            break
    if ihdr is None or len(ihdr) != 13:
        raise ImageIOError(path, "missing or malformed IHDR")

    width = int.from_bytes(ihdr[0:4], "big")
    height = int.from_bytes(ihdr[4:8], "big")
    bit_depth, color_type, compression, filt, interlace = ihdr[8:13]
    if width < 1 or height < 1 or width * height > _MAX_PIXELS:
        raise ImageIOError(path, f"bad or oversized dimensions {width}x{height}")
    if bit_depth != 8 or color_type != 0:
        raise ImageIOError(
            path, f"only 8-bit grayscale PNG supported (depth {bit_depth}, color type {color_type})"
        )
    if compression != 0 or filt != 0:
        raise ImageIOError(path, "unsupported compression/filter method")
    if interlace != 0:
        raise ImageIOError(path, "interlaced PNG not supported")

    try:
        raw = zlib.decompress(bytes(idat))
    except zlib.error as exc:
        raise ImageIOError(path, f"corrupt image data: {exc}") from exc
    if len(raw) != height * (width + 1):
        raise ImageIOError(path, f"decompressed size {len(raw)} != expected {height * (width + 1)}")

    out = np.empty((height, width), dtype=np.uint8)
    prev = bytearray(width)
    for r in range(height):
        offset = r * (width + 1)
        ftype = raw[offset]
        row = bytearray(raw[offset + 1 : offset + 1 + width])
        if ftype == 0:
            pass
        elif ftype == 1:  # Sub
            for i in range(1, width):
                row[i] = (row[i] + row[i - 1]) & 0xFF
        elif ftype == 2:  # Up
            for i in range(width):
                row[i] = (row[i] + prev[i]) & 0xFF
        elif ftype == 3:  # Average
            for i in range(width):
                left = row[i - 1] if i else 0
                row[i] = (row[i] + ((left + prev[i]) >> 1)) & 0xFF
        elif ftype == 4:  # Paeth
            for i in range(width):
                left = row[i - 1] if i else 0
                up = prev[i]
                diag = prev[i - 1] if i else 0
                p = left + up - diag
                pa, pb, pc = abs(p - left), abs(p - up), abs(p - diag)
                if pa <= pb and pa <= pc:
                    pred = left
                elif pb <= pc:
                    pred = up
                else:
                    pred = diag
                row[i] = (row[i] + pred) & 0xFF
        else:
            raise ImageIOError(path, f"unknown row filter {ftype}")
        out[r] = np.frombuffer(bytes(row), dtype=np.uint8)
        prev = row
    return out
