"""Binary file formats (all little-endian) and the key=value config format.

CIMG v1   b"CIMG", u32 version=1, u32 height, u32 width, then h*w pairs of
          float64 (real, imag), row-major.
MASK v1   b"MSK1", u32 height, u32 width, then ceil(h*w/8) bytes of
          row-major booleans, bit 0 of byte 0 = location (0, 0).
UTFS      b"UTFS", u32 K, u32 n, then K blocks of n*n complex128
          (row-major per block).
labels    u32 N, then N u16 labels (0-based).
"""
import struct

import numpy as np

from .errors import ConfigError, InvalidInputError

_U32 = struct.Struct("<I")


def _read(path):
    with open(path, "rb") as fh:
        return fh.read()


def _need(buf, size, what, path):
    if len(buf) != size:
        raise InvalidInputError(f"{path}: truncated or oversized {what} file "
                                f"({len(buf)} bytes, expected {size})")


def write_cimg(path, img):
    a = np.asarray(img, dtype=np.complex128)
    if a.ndim != 2:
        raise InvalidInputError("CIMG holds 2D images only")
    h, w = a.shape
    with open(path, "wb") as fh:
        fh.write(b"CIMG" + struct.pack("<III", 1, h, w))
        fh.write(np.ascontiguousarray(a).astype("<c16").tobytes())


def read_cimg(path):
    buf = _read(path)
    if buf[:4] != b"CIMG":
        raise InvalidInputError(f"{path}: not a CIMG file")
    version, h, w = struct.unpack_from("<III", buf, 4)
    if version != 1:
        raise InvalidInputError(f"{path}: unsupported CIMG version {version}")
    _need(buf, 16 + 16 * h * w, "CIMG", path)
    return np.frombuffer(buf, dtype="<c16", offset=16).reshape(h, w).astype(np.complex128)


def write_mask(path, mask):
    m = np.asarray(mask, dtype=bool)
    h, w = m.shape
    bits = np.packbits(m.ravel(), bitorder="little")
    with open(path, "wb") as fh:
        fh.write(b"MSK1" + struct.pack("<II", h, w) + bits.tobytes())


def read_mask(path):
    buf = _read(path)
    if buf[:4] != b"MSK1":
        raise InvalidInputError(f"{path}: not a MASK v1 file")
    h, w = struct.unpack_from("<II", buf, 4)
    _need(buf, 12 + -(-h * w // 8), "MASK", path)
    bits = np.unpackbits(np.frombuffer(buf, dtype=np.uint8, offset=12), bitorder="little")
    return bits[: h * w].astype(bool).reshape(h, w)


def write_transforms(path, transforms):
    W = np.asarray(transforms, dtype=np.complex128)
    K, n, _ = W.shape
    with open(path, "wb") as fh:
        fh.write(b"UTFS" + struct.pack("<II", K, n))
        fh.write(np.ascontiguousarray(W).astype("<c16").tobytes())


def read_transforms(path):
    buf = _read(path)
    if buf[:4] != b"UTFS":
        raise InvalidInputError(f"{path}: not a UTFS file")
    K, n = struct.unpack_from("<II", buf, 4)
    _need(buf, 12 + 16 * K * n * n, "UTFS", path)
    return np.frombuffer(buf, dtype="<c16", offset=12).reshape(K, n, n).astype(np.complex128)


def write_labels(path, labels):
    lab = np.asarray(labels)
    if lab.size and (lab.min() < 0 or lab.max() > 0xFFFF):
        raise InvalidInputError("labels must fit in u16")
    with open(path, "wb") as fh:
        fh.write(_U32.pack(lab.size) + lab.astype("<u2").tobytes())


def read_labels(path):
    buf = _read(path)
    (N,) = _U32.unpack_from(buf, 0)
    _need(buf, 4 + 2 * N, "labels", path)
    return np.frombuffer(buf, dtype="<u2", offset=4).astype(np.intp)


def read_config(path):
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key] = value
    return out
