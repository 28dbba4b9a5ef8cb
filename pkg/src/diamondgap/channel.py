"""Diamond-channel data model, derived parameters, random ensembles,
and JSON serialization.

Random generation uses a counter-based generator (documented in the
README) so ensembles are reproducible bit-for-bit across runs, worker
counts, and implementations:

    key(seed, tag) = mix64((seed * K_GOLDEN + tag * K_TAG) mod 2^64)
    word(key, i)   = mix64((key + (i + 1) * K_GOLDEN) mod 2^64)
    uniform_i      = (word(key, i) >> 11) * 2^-53
    normals        = Box-Muller on consecutive uniform pairs:
                     r = sqrt(-2 ln(1 - u1)); (r cos 2*pi*u2, r sin 2*pi*u2)

mix64 is the SplitMix64 finalizer.  Tags 0..3 are the four channel
matrices H01, H02, H13, H23; other tags are free for harness use.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .capacity import waterfill
from .errors import DomainError, ParseError, SchemaError
from .linalg import as_matrix, symmetrize

K_GOLDEN = 0x9E3779B97F4A7C15
K_TAG = 0xD1B54A32D192ED03
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_MASK = (1 << 64) - 1
_TWO_PI = 2.0 * math.pi


def _mix64(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * _M1) & _MASK
    z = ((z ^ (z >> 27)) * _M2) & _MASK
    return z ^ (z >> 31)


def _mix64_u64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def stream_key(seed: int, tag: int) -> int:
    """Derive an independent stream key from a user seed and a site tag."""
    return _mix64((seed & _MASK) * K_GOLDEN + (tag & _MASK) * K_TAG)


def uniforms(key: int, count: int) -> np.ndarray:
    """count i.i.d. uniforms on [0, 1) from the keyed counter stream."""
    idx = np.arange(1, count + 1, dtype=np.uint64)
    z = np.uint64(key) + idx * np.uint64(K_GOLDEN)
    return (_mix64_u64(z) >> np.uint64(11)) * 2.0 ** -53


def normals(key: int, count: int) -> np.ndarray:
    """count i.i.d. standard normals (Box-Muller over the keyed stream)."""
    pairs = (count + 1) // 2
    u = uniforms(key, 2 * pairs)
    u1 = u[0::2]
    u2 = u[1::2]
    r = np.sqrt(-2.0 * np.log(1.0 - u1))
    theta = _TWO_PI * u2
    out = np.empty(2 * pairs)
    out[0::2] = r * np.cos(theta)
    out[1::2] = r * np.sin(theta)
    return out[:count]


def gaussian_matrix(rows: int, cols: int, seed: int, tag: int,
                    scale: float = 1.0) -> np.ndarray:
    """rows x cols matrix of i.i.d. Gaussian(0, scale^2) entries,
    filled row-major from stream (seed, tag)."""
    return scale * normals(stream_key(seed, tag), rows * cols).reshape(rows, cols)


def random_psd(n: int, seed: int, tag: int, trace: float | None = None) -> np.ndarray:
    """Random PSD matrix G G^T from an n x n Gaussian G; optionally
    rescaled to the given trace."""
    g = gaussian_matrix(n, n, seed, tag)
    s = symmetrize(g @ g.T)
    if trace is not None:
        t = float(np.trace(s))
        if t <= 0.0:
            return (trace / n) * np.eye(n)
        s = s * (trace / t)
    return s


@dataclass(frozen=True)
class DiamondChannel:
    """Source -> {relay 1, relay 2} -> destination, four n x n real links."""
    h01: np.ndarray
    h02: np.ndarray
    h13: np.ndarray
    h23: np.ndarray

    def __post_init__(self):
        mats = {}
        n = None
        for field in ("h01", "h02", "h13", "h23"):
            m = as_matrix(getattr(self, field), field.upper())
            if m.shape[0] != m.shape[1]:
                raise DomainError(f"{field.upper()}: must be square, got {m.shape}")
            if n is None:
                n = m.shape[0]
            elif m.shape[0] != n:
                raise DomainError(
                    f"{field.upper()}: dimension {m.shape[0]} != {n} of H01")
            m = m.copy()
            m.flags.writeable = False
            mats[field] = m
        for field, m in mats.items():
            object.__setattr__(self, field, m)

    @property
    def n(self) -> int:
        return self.h01.shape[0]

    def swapped(self) -> "DiamondChannel":
        """Relay-swapped channel (1 <-> 2): H01<->H02, H13<->H23."""
        return DiamondChannel(self.h02, self.h01, self.h23, self.h13)


@dataclass(frozen=True)
class DiamondParams:
    """Link/cut capacities (bits), their covariances, and delta."""
    c01: float
    c02: float
    c13: float
    c23: float
    c012: float
    c123: float
    delta: float            # c01*c02 - c13*c23
    k01: np.ndarray
    k02: np.ndarray
    k13: np.ndarray
    k23: np.ndarray
    k012: np.ndarray
    k123: np.ndarray


def derive_params(dc: DiamondChannel) -> DiamondParams:
    """All six capacities with the fixed power budgets: individual links
    and the joint receive cut at P=1, the joint transmit cut at P=2."""
    r01 = waterfill(dc.h01, 1.0, "H01")
    r02 = waterfill(dc.h02, 1.0, "H02")
    r13 = waterfill(dc.h13, 1.0, "H13")
    r23 = waterfill(dc.h23, 1.0, "H23")
    h012 = np.vstack([dc.h01, dc.h02])
    h123 = np.hstack([dc.h13, dc.h23])
    r012 = waterfill(h012, 1.0, "H012")
    r123 = waterfill(h123, 2.0, "H123")
    delta = r01.capacity_bits * r02.capacity_bits - r13.capacity_bits * r23.capacity_bits
    return DiamondParams(
        c01=r01.capacity_bits, c02=r02.capacity_bits,
        c13=r13.capacity_bits, c23=r23.capacity_bits,
        c012=r012.capacity_bits, c123=r123.capacity_bits,
        delta=delta,
        k01=r01.covariance, k02=r02.covariance,
        k13=r13.covariance, k23=r23.covariance,
        k012=r012.covariance, k123=r123.covariance)


def random_diamond(n: int, seed: int, scale: float = 1.0) -> DiamondChannel:
    """Random channel with i.i.d. Gaussian(0, scale^2) entries.

    Deterministic in (n, seed, scale); matrix tags are 0..3 in the order
    H01, H02, H13, H23.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if not scale > 0.0:
        raise DomainError(f"scale must be positive, got {scale}")
    return DiamondChannel(*(gaussian_matrix(n, n, seed, tag, scale)
                            for tag in range(4)))


_FIELDS = ("H01", "H02", "H13", "H23")


def _fmt17(x: float) -> str:
    return format(float(x), ".17g")


def save_channel(dc: DiamondChannel, path) -> None:
    """Write the channel as JSON with 17-significant-digit decimals
    (lossless round-trip for float64)."""
    mats = (dc.h01, dc.h02, dc.h13, dc.h23)
    parts = [f'  "n": {dc.n}']
    for name, m in zip(_FIELDS, mats):
        rows = ", ".join(
            "[" + ", ".join(_fmt17(x) for x in row) + "]" for row in m)
        parts.append(f'  "{name}": [{rows}]')
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("{\n" + ",\n".join(parts) + "\n}\n")


def load_channel(path) -> DiamondChannel:
    """Read a channel JSON document; ParseError on malformed content,
    SchemaError on shape violations."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(
            f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(doc, dict):
        raise ParseError("top-level document must be a JSON object")
    if "n" not in doc:
        raise ParseError("missing field 'n'")
    n = doc["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ParseError(f"field 'n' must be a positive integer, got {n!r}")
    mats = []
    for name in _FIELDS:
        if name not in doc:
            raise ParseError(f"missing field '{name}'")
        try:
            m = np.asarray(doc[name], dtype=np.float64)
        except (TypeError, ValueError) as e:
            raise ParseError(f"field '{name}' is not a numeric matrix: {e}") from e
        if m.ndim != 2:
            raise SchemaError(f"field '{name}' must be 2-D, got shape {m.shape}")
        if m.shape != (n, n):
            raise SchemaError(
                f"field '{name}' has shape {m.shape[0]}x{m.shape[1]}, expected {n}x{n}")
        if not np.all(np.isfinite(m)):
            raise ParseError(f"field '{name}' contains non-finite values")
        mats.append(m)
    return DiamondChannel(*mats)
