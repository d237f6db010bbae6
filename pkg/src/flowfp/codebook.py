"""The secret fingerprint codebook shared between the two endpoints.

A fingerprint is one instantiation of a Poisson process on [0, T2],
stored as sorted release offsets measured from the start of the
fingerprinting phase.  A codebook is ``m`` independent fingerprints
drawn at a common rate (the minimum flow rate when rates differ).

File format (little-endian throughout)::

    magic   4 bytes  b"FPCB"
    version u32      currently 1
    m       u64
    rate    f64      packets/second
    t2      f64      horizon in seconds
    then, m times:
        index   u64
        count   u64
        offsets count * f64

Timestamps are stored bit-exactly, so a saved codebook reloads
value-identical on any platform.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CodebookFormatError, DomainError
from .stochastic import PacketTrain, RngState, sample_poisson_process

__all__ = ["Fingerprint", "Codebook", "generate_codebook", "scale_fingerprint",
           "save_codebook", "load_codebook", "export_codebook_text"]

_MAGIC = b"FPCB"
_VERSION = 1


@dataclass(frozen=True)
class Fingerprint:
    """One codeword: release offsets within [0, T2], possibly empty."""

    index: int
    offsets: np.ndarray

    def __post_init__(self) -> None:
        if self.index < 1:
            raise DomainError("fingerprint index must be >= 1")
        off = np.asarray(self.offsets, dtype=np.float64)
        if off.ndim != 1:
            raise DomainError("offsets must be a 1-D sequence")
        if off.size:
            if not np.all(np.isfinite(off)):
                raise DomainError("offsets must be finite")
            if off[0] <= 0:
                raise DomainError("offsets must be > 0")
            if np.any(np.diff(off) <= 0):
                raise DomainError("offsets must be strictly increasing")
        off = off.copy()
        off.setflags(write=False)
        object.__setattr__(self, "offsets", off)

    def __len__(self) -> int:
        return int(self.offsets.size)

    @property
    def delays(self) -> np.ndarray:
        """Inter-packet delays, the first measured from the phase anchor."""
        if not len(self):
            return np.empty(0, dtype=np.float64)
        return np.diff(self.offsets, prepend=0.0)

    @property
    def duration(self) -> float:
        return float(self.offsets[-1]) if len(self) else 0.0


@dataclass(frozen=True)
class Codebook:
    """m fingerprints at a common rate on a common horizon."""

    rate: float
    t2: float
    fingerprints: tuple

    def __post_init__(self) -> None:
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise DomainError("codebook rate must be positive")
        if not (math.isfinite(self.t2) and self.t2 > 0):
            raise DomainError("codebook horizon t2 must be positive")
        fps = tuple(self.fingerprints)
        if not fps:
            raise DomainError("codebook must contain at least one fingerprint")
        indices = [fp.index for fp in fps]
        if sorted(indices) != list(range(1, len(fps) + 1)):
            raise DomainError("fingerprint indices must be exactly 1..m and distinct")
        for fp in fps:
            if len(fp) and fp.offsets[-1] > self.t2:
                raise DomainError(f"fingerprint {fp.index} exceeds horizon t2")
        object.__setattr__(self, "fingerprints", fps)

    @property
    def m(self) -> int:
        return len(self.fingerprints)

    def __iter__(self):
        return iter(self.fingerprints)

    def __getitem__(self, index: int) -> Fingerprint:
        """Fingerprint by its 1-based codeword index."""
        fp = self.fingerprints[index - 1]
        if fp.index != index:
            fp = next(f for f in self.fingerprints if f.index == index)
        return fp

    def mean_count(self) -> float:
        return float(np.mean([len(fp) for fp in self.fingerprints]))


def generate_codebook(m: int, rate: float, t2: float, rng: RngState) -> Codebook:
    """Generate ``m`` independent Poisson(rate) codewords on [0, t2]."""
    if m < 1:
        raise DomainError(f"codebook size m must be >= 1, got {m!r}")
    fps = []
    for l in range(1, m + 1):
        train = sample_poisson_process(rate, t2, rng.substream(0x_C0DE, l))
        fps.append(Fingerprint(l, train.timestamps))
    return Codebook(rate, t2, tuple(fps))


def scale_fingerprint(fp: Fingerprint, lambda_min: float, lambda_i: float) -> Fingerprint:
    """Scale a rate-``lambda_min`` codeword to a flow of rate ``lambda_i``.

    Every delay is multiplied by ``lambda_min / lambda_i``; a Poisson
    codeword of rate lambda_min becomes one of rate lambda_i.  The
    packet count is preserved exactly.
    """
    if not (lambda_min > 0 and lambda_i > 0):
        raise DomainError("rates must be positive")
    if lambda_min > lambda_i:
        raise DomainError("codebook rate lambda_min must not exceed the flow rate")
    if lambda_min == lambda_i:
        return fp
    return Fingerprint(fp.index, fp.offsets * (lambda_min / lambda_i))


def save_codebook(cb: Codebook, path) -> None:
    """Persist a codebook in the binary format described in the module docs."""
    buf = bytearray()
    buf += _MAGIC
    buf += struct.pack("<IQdd", _VERSION, cb.m, cb.rate, cb.t2)
    for fp in cb.fingerprints:
        buf += struct.pack("<QQ", fp.index, len(fp))
        buf += np.asarray(fp.offsets, dtype="<f8").tobytes()
    Path(path).write_bytes(bytes(buf))


def load_codebook(path) -> Codebook:
    """Load a codebook, validating magic, version, counts and invariants."""
    data = Path(path).read_bytes()
    if len(data) < 4 or data[:4] != _MAGIC:
        raise CodebookFormatError("not a codebook file (bad magic)")
    pos = 4
    try:
        version, m, rate, t2 = struct.unpack_from("<IQdd", data, pos)
    except struct.error as exc:
        raise CodebookFormatError("truncated codebook header") from exc
    pos += struct.calcsize("<IQdd")
    if version != _VERSION:
        raise CodebookFormatError(f"unsupported codebook version {version}")
    fps = []
    for _ in range(m):
        try:
            index, count = struct.unpack_from("<QQ", data, pos)
        except struct.error as exc:
            raise CodebookFormatError("truncated codebook record") from exc
        pos += 16
        end = pos + 8 * count
        if end > len(data):
            raise CodebookFormatError("truncated codebook offsets")
        offsets = np.frombuffer(data[pos:end], dtype="<f8")
        pos = end
        try:
            fps.append(Fingerprint(int(index), offsets))
        except DomainError as exc:
            raise CodebookFormatError(f"invalid fingerprint record: {exc}") from exc
    if pos != len(data):
        raise CodebookFormatError("trailing bytes after codebook payload")
    try:
        return Codebook(rate, t2, tuple(fps))
    except DomainError as exc:
        raise CodebookFormatError(f"invalid codebook: {exc}") from exc


def export_codebook_text(cb: Codebook, path) -> None:
    """Diagnostic plain-text export: one offset list per line."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# codebook m={cb.m} rate={cb.rate!r} t2={cb.t2!r}\n")
        for fp in cb.fingerprints:
            fh.write(" ".join(repr(float(x)) for x in fp.offsets))
            fh.write("\n")
