"""Minimal 8-bit grayscale PGM (P2 ASCII / P5 binary) reading and writing."""

import numpy as np

__all__ = ["PGMError", "load_image", "save_image", "save_mask", "quantize"]

_WHITESPACE = b" \t\r\n\v\f"


class PGMError(ValueError):
    """Malformed PGM data; ``offset`` is the byte position of the problem."""

    def __init__(self, message, offset, path=None):
        where = f"{path}: " if path else ""
        super().__init__(f"{where}{message} (byte offset {offset})")
        self.offset = offset
        self.path = path


def _next_token(data, pos, path):
    n = len(data)
    while pos < n:
        c = data[pos : pos + 1]
        if c == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif c in _WHITESPACE:
            pos += 1
        else:
            break
    if pos >= n:
        raise PGMError("unexpected end of header", pos, path)
    start = pos
    while pos < n and data[pos : pos + 1] not in _WHITESPACE and data[pos : pos + 1] != b"#":
        pos += 1
    return data[start:pos], start, pos


def _int_token(data, pos, path, what):
    tok, start, pos = _next_token(data, pos, path)
    try:
        value = int(tok)
    except ValueError:
        raise PGMError(f"invalid {what} {tok!r}", start, path) from None
    if value <= 0:
        raise PGMError(f"{what} must be positive, got {value}", start, path)
    return value, start, pos


def parse_pgm(data, path=None):
    """Decode PGM bytes into a float64 image."""
    magic, _, pos = _next_token(data, 0, path)
    if magic not in (b"P2", b"P5"):
        raise PGMError(f"unsupported magic {magic!r}", 0, path)
    width, _, pos = _int_token(data, pos, path, "width")
    height, _, pos = _int_token(data, pos, path, "height")
    maxval, at, pos = _int_token(data, pos, path, "maxval")
    if maxval != 255:
        raise PGMError(f"unsupported maxval {maxval}", at, path)
    count = width * height

    if magic == b"P5":
        # exactly one whitespace byte separates the header from the raster
        if pos >= len(data) or data[pos : pos + 1] not in _WHITESPACE:
            raise PGMError("missing whitespace after maxval", pos, path)
        pos += 1
        raster = data[pos : pos + count]
        if len(raster) < count:
            raise PGMError(
                f"truncated raster: expected {count} bytes, found {len(raster)}",
                pos + len(raster),
                path,
            )
        pixels = np.frombuffer(raster, dtype=np.uint8)
    else:
        values = []
        for _ in range(count):
            try:
                tok, start, pos = _next_token(data, pos, path)
            except PGMError as exc:
                raise PGMError(
                    f"truncated raster: expected {count} values, found {len(values)}",
                    exc.offset,
                    path,
                ) from None
            try:
                v = int(tok)
            except ValueError:
                raise PGMError(f"invalid pixel value {tok!r}", start, path) from None
            if not 0 <= v <= maxval:
                raise PGMError(f"pixel value {v} outside [0, {maxval}]", start, path)
            values.append(v)
        pixels = np.array(values)
    return pixels.reshape(height, width).astype(np.float64)


def load_image(path):
    with open(path, "rb") as fh:
        data = fh.read()
    return parse_pgm(data, path=str(path))


def quantize(img):
    """Round half up to integers and clamp to [0, 255]."""
    img = np.asarray(img, dtype=np.float64)
    return np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8)


def _write_p5(pixels, path):
    h, w = pixels.shape
    try:
        with open(path, "wb") as fh:
            fh.write(b"P5\n%d %d\n255\n" % (w, h))
            fh.write(pixels.tobytes())
    except OSError as exc:
        raise OSError(f"cannot write PGM to {path}: {exc}") from exc


def save_image(img, path):
    img = np.asarray(img)
    if img.ndim != 2:
        raise ValueError(f"image must be 2-D, got shape {img.shape}")
    _write_p5(quantize(img), path)


def save_mask(mask, path):
    """Write members as 255 and non-members as 0."""
    mask = np.asarray(mask, dtype=bool)
    _write_p5(np.where(mask, 255, 0).astype(np.uint8), path)
