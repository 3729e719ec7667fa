"""NRRD scalar volumes: parsing, writing, index/world geometry, and sampling.

Voxel memory order is x-fastest (flat index ``i + nx*(j + ny*k)``); the
continuous index convention is node-centered, i.e. voxel centers sit at
integer indices.
"""
from __future__ import annotations

import gzip
import zlib
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadMagic,
    BadRange,
    MissingField,
    NonFiniteVoxel,
    OutOfBounds,
    SizeMismatch,
    UnsupportedDimension,
    UnsupportedType,
)

SCALAR_KINDS = {
    "uint8": np.uint8,
    "int16": np.int16,
    "uint16": np.uint16,
    "float32": np.float32,
}

# NRRD type spellings accepted on input, normalized to our four kinds.
_TYPE_ALIASES = {
    "uint8": "uint8", "uchar": "uint8", "unsigned char": "uint8",
    "uint8_t": "uint8",
    "int16": "int16", "short": "int16", "short int": "int16",
    "signed short": "int16", "signed short int": "int16", "int16_t": "int16",
    "uint16": "uint16", "ushort": "uint16", "unsigned short": "uint16",
    "unsigned short int": "uint16", "uint16_t": "uint16",
    "float": "float32", "float32": "float32",
}

_ENCODINGS = {"raw", "gzip", "gz"}

# Header fields we interpret; everything else is preserved verbatim.
_KNOWN_FIELDS = {
    "dimension", "sizes", "type", "encoding", "endian",
    "space directions", "space origin",
}


@dataclass
class VolumeHeader:
    sizes: tuple[int, int, int]
    scalar_kind: str
    encoding: str = "raw"
    endianness: str = "little"
    space_directions: np.ndarray = None  # (3,3), columns are index steps in mm
    space_origin: np.ndarray = None      # (3,)
    value_range_hint: tuple[float, float] | None = None
    extra_fields: dict = field(default_factory=dict)
    dimension: int = 3

    def __post_init__(self):
        if self.dimension != 3:
            raise UnsupportedDimension(f"dimension must be 3, got {self.dimension}")
        if self.scalar_kind not in SCALAR_KINDS:
            raise UnsupportedType(f"unsupported scalar kind {self.scalar_kind!r}")
        if self.encoding not in ("raw", "gzip"):
            raise UnsupportedType(f"unsupported encoding {self.encoding!r}")
        if any(int(n) < 1 for n in self.sizes):
            raise SizeMismatch(f"sizes must be >= 1, got {self.sizes}")
        self.sizes = tuple(int(n) for n in self.sizes)
        if self.space_directions is None:
            self.space_directions = np.eye(3)
        self.space_directions = np.asarray(self.space_directions, dtype=float)
        if abs(np.linalg.det(self.space_directions)) < 1e-15:
            raise SizeMismatch("space_directions matrix is singular")
        if self.space_origin is None:
            self.space_origin = np.zeros(3)
        self.space_origin = np.asarray(self.space_origin, dtype=float)

    @property
    def dtype(self):
        return np.dtype(SCALAR_KINDS[self.scalar_kind])


class Volume:
    """Immutable 3D scalar grid with index<->world geometry."""

    def __init__(self, header: VolumeHeader, voxels: np.ndarray):
        nx, ny, nz = header.sizes
        voxels = np.asarray(voxels, dtype=header.dtype).ravel()
        if voxels.size != nx * ny * nz:
            raise SizeMismatch(
                f"voxel count {voxels.size} != {nx}*{ny}*{nz}")
        if header.scalar_kind == "float32" and not np.all(np.isfinite(voxels)):
            raise NonFiniteVoxel("float32 volume contains non-finite voxels")
        self.header = header
        self.voxels = voxels
        self.voxels.setflags(write=False)
        # [k, j, i] view over the x-fastest flat buffer
        self._grid = voxels.reshape(nz, ny, nx)
        self.map = IndexWorldMap(header.space_directions, header.space_origin)

    @property
    def sizes(self) -> tuple[int, int, int]:
        return self.header.sizes

    def value_range(self) -> tuple[float, float]:
        return float(self.voxels.min()), float(self.voxels.max())

    def grid(self) -> np.ndarray:
        """Voxels as a (nz, ny, nx) array indexed [k, j, i]."""
        return self._grid


class IndexWorldMap:
    """4x4 affine pair mapping continuous voxel indices to world mm and back."""

    def __init__(self, directions: np.ndarray, origin: np.ndarray):
        fwd = np.eye(4)
        fwd[:3, :3] = directions
        fwd[:3, 3] = origin
        self.forward = fwd
        self.inverse = np.linalg.inv(fwd)

    def index_to_world(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return self.forward[:3, :3] @ p + self.forward[:3, 3]

    def world_to_index(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return self.inverse[:3, :3] @ p + self.inverse[:3, 3]


def map_point(m: IndexWorldMap, p, direction: str) -> np.ndarray:
    if direction == "index_to_world":
        return m.index_to_world(p)
    if direction == "world_to_index":
        return m.world_to_index(p)
    raise ValueError(f"unknown direction {direction!r}")


# ---------------------------------------------------------------------------
# NRRD parsing / writing

def _parse_vector(text: str) -> np.ndarray:
    text = text.strip()
    if not (text.startswith("(") and text.endswith(")")):
        raise MissingField(f"malformed vector {text!r}")
    return np.array([float(x) for x in text[1:-1].split(",")])


def _format_vector(v) -> str:
    return "(" + ",".join(repr(float(x)) for x in v) + ")"


def parse_nrrd(data: bytes) -> Volume:
    """Parse an NRRD byte stream into a validated Volume."""
    newline = data.find(b"\n")
    if newline < 0 or not data[:newline].rstrip(b"\r").startswith(b"NRRD000"):
        raise BadMagic("input does not start with NRRD000N magic")
    magic = data[:newline].rstrip(b"\r")
    if len(magic) != 8 or magic[7:8] not in b"12345":
        raise BadMagic(f"bad NRRD magic {magic!r}")

    # header = ASCII lines up to the first blank line
    end = data.find(b"\n\n")
    end_len = 2
    crlf_end = data.find(b"\r\n\r\n")
    if crlf_end >= 0 and (end < 0 or crlf_end < end):
        end, end_len = crlf_end, 4
    if end < 0:
        raise MissingField("no blank line terminating the header")
    header_text = data[newline + 1:end].decode("ascii", errors="replace")
    payload = data[end + end_len:]

    fields = {}
    extra = {}
    for line in header_text.splitlines():
        line = line.rstrip("\r")
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise MissingField(f"malformed header line {line!r}")
        key, _, value = line.partition(":")
        key = key.strip().lower()
        value = value.lstrip("= ").strip()
        if key in _KNOWN_FIELDS:
            fields[key] = value
        else:
            extra[key] = value

    if "dimension" not in fields:
        raise MissingField("dimension field missing")
    dimension = int(fields["dimension"])
    if dimension != 3:
        raise UnsupportedDimension(f"dimension {dimension} unsupported")
    for required in ("sizes", "type", "encoding"):
        if required not in fields:
            raise MissingField(f"{required} field missing")

    sizes = tuple(int(x) for x in fields["sizes"].split())
    if len(sizes) != 3:
        raise UnsupportedDimension(f"sizes has {len(sizes)} entries")

    type_name = fields["type"].strip().lower()
    if type_name not in _TYPE_ALIASES:
        raise UnsupportedType(f"unsupported NRRD type {fields['type']!r}")
    scalar_kind = _TYPE_ALIASES[type_name]

    encoding = fields["encoding"].strip().lower()
    if encoding not in _ENCODINGS:
        raise UnsupportedType(f"unsupported encoding {fields['encoding']!r}")
    encoding = "gzip" if encoding in ("gzip", "gz") else "raw"

    endianness = fields.get("endian", "little").strip().lower()
    if endianness not in ("little", "big"):
        raise UnsupportedType(f"unsupported endian {endianness!r}")

    directions = None
    if "space directions" in fields:
        # vectors come as "(a,b,c) (d,e,f) (g,h,i)"
        raw = fields["space directions"].replace(") ", ")|").split("|")
        cols = [_parse_vector(t) for t in raw]
        if len(cols) != 3 or any(c.size != 3 for c in cols):
            raise MissingField("space directions must hold 3 3-vectors")
        directions = np.column_stack(cols)
    origin = None
    if "space origin" in fields:
        origin = _parse_vector(fields["space origin"])
        if origin.size != 3:
            raise MissingField("space origin must be a 3-vector")

    header = VolumeHeader(
        sizes=sizes, scalar_kind=scalar_kind, encoding=encoding,
        endianness=endianness, space_directions=directions,
        space_origin=origin, extra_fields=extra,
    )

    if encoding == "gzip":
        try:
            payload = gzip.decompress(payload)
        except (OSError, zlib.error, EOFError) as exc:
            raise SizeMismatch(f"gzip payload failed to decompress: {exc}") from exc

    expected = sizes[0] * sizes[1] * sizes[2] * header.dtype.itemsize
    if len(payload) != expected:
        raise SizeMismatch(
            f"payload is {len(payload)} bytes, expected {expected}")

    dtype = header.dtype.newbyteorder("<" if endianness == "little" else ">")
    voxels = np.frombuffer(payload, dtype=dtype).astype(header.dtype)
    return Volume(header, voxels)


def write_nrrd(v: Volume) -> bytes:
    """Serialize a Volume as NRRD0004 with a raw little-endian payload."""
    h = v.header
    lines = [
        "NRRD0004",
        "dimension: 3",
        f"type: {h.scalar_kind}",
        "sizes: " + " ".join(str(n) for n in h.sizes),
        "encoding: raw",
    ]
    if h.dtype.itemsize > 1:
        lines.append("endian: little")
    dirs = " ".join(_format_vector(h.space_directions[:, c]) for c in range(3))
    lines.append(f"space directions: {dirs}")
    lines.append(f"space origin: {_format_vector(h.space_origin)}")
    for key, value in h.extra_fields.items():
        lines.append(f"{key}: {value}")
    header = "\n".join(lines) + "\n\n"
    payload = v.voxels.astype(h.dtype.newbyteorder("<"), copy=False).tobytes()
    return header.encode("ascii") + payload


# ---------------------------------------------------------------------------
# Access and sampling

def voxel_at(v: Volume, i: int, j: int, k: int):
    nx, ny, nz = v.sizes
    if not (0 <= i < nx and 0 <= j < ny and 0 <= k < nz):
        raise OutOfBounds(f"index ({i},{j},{k}) outside {v.sizes}")
    return v.grid()[k, j, i]


def sample(v: Volume, world_point, mode: str = "trilinear",
           background: float = 0.0) -> float:
    """Sample the volume at a world-space point.

    Points whose continuous index falls outside [0, n-1] on any axis
    return ``background``.
    """
    p = v.map.world_to_index(world_point)
    nx, ny, nz = v.sizes
    if (p < 0).any() or p[0] > nx - 1 or p[1] > ny - 1 or p[2] > nz - 1:
        return float(background)
    grid = v.grid()
    if mode == "nearest":
        i, j, k = (int(np.floor(c + 0.5)) for c in p)
        i, j, k = min(i, nx - 1), min(j, ny - 1), min(k, nz - 1)
        return float(grid[k, j, i])
    if mode != "trilinear":
        raise ValueError(f"unknown sampling mode {mode!r}")
    i0 = min(int(np.floor(p[0])), nx - 2) if nx > 1 else 0
    j0 = min(int(np.floor(p[1])), ny - 2) if ny > 1 else 0
    k0 = min(int(np.floor(p[2])), nz - 2) if nz > 1 else 0
    fx, fy, fz = p[0] - i0, p[1] - j0, p[2] - k0
    i1, j1, k1 = min(i0 + 1, nx - 1), min(j0 + 1, ny - 1), min(k0 + 1, nz - 1)
    c00 = grid[k0, j0, i0] * (1 - fx) + grid[k0, j0, i1] * fx
    c10 = grid[k0, j1, i0] * (1 - fx) + grid[k0, j1, i1] * fx
    c01 = grid[k1, j0, i0] * (1 - fx) + grid[k1, j0, i1] * fx
    c11 = grid[k1, j1, i0] * (1 - fx) + grid[k1, j1, i1] * fx
    c0 = c00 * (1 - fy) + c10 * fy
    c1 = c01 * (1 - fy) + c11 * fy
    return float(c0 * (1 - fz) + c1 * fz)


def histogram(v: Volume, bins: int, value_range: tuple[float, float]) -> np.ndarray:
    """Per-bin counts over [lo, hi); voxels outside the range are dropped."""
    lo, hi = value_range
    if hi <= lo:
        raise BadRange(f"hi ({hi}) must exceed lo ({lo})")
    if bins < 1:
        raise BadRange(f"bins must be >= 1, got {bins}")
    vals = v.voxels.astype(np.float64)
    idx = np.floor((vals - lo) / (hi - lo) * bins).astype(np.int64)
    keep = (vals >= lo) & (vals < hi)
    return np.bincount(idx[keep], minlength=bins)[:bins]


def min_voxel_pitch(v: Volume) -> float:
    """Smallest column norm of space_directions, the default MIP step."""
    return float(np.linalg.norm(v.header.space_directions, axis=0).min())
