import logging
from pathlib import Path
from typing import List, Optional

import numpy as np

from models.errors import CodebookCacheError
from models.schemas import ArrayConfig, Codebook, CodebookKind, PolarSamplingParams
from tools.codebooks import build_dft_codebook, build_polar_codebook

logger = logging.getLogger(__name__)

MAGIC = b"NFCB"
FORMAT_VERSION = 1

# Packed little-endian header: magic, version u32, kind u8, N u32, S u32.
HEADER_DTYPE = np.dtype([
    ("magic", "S4"),
    ("version", "<u4"),
    ("kind", "u1"),
    ("n_antennas", "<u4"),
    ("n_ranges", "<u4"),
])

_KIND_CODES = {CodebookKind.DFT: 0, CodebookKind.POLAR: 1}
_CODE_KINDS = {code: kind for kind, code in _KIND_CODES.items()}


def write_codebook(codebook: Codebook, path: Path) -> Path:
    """
    Serialize as header followed by one record per codeword:
    f64 angle, f64 range (NaN when absent), then N interleaved (re, im) f64 pairs.
    """
    path = Path(path)
    header = np.array(
        [(MAGIC, FORMAT_VERSION, _KIND_CODES[codebook.kind], codebook.n_antennas, codebook.n_ranges)],
        dtype=HEADER_DTYPE,
    )
    body = np.empty((codebook.size, 2 + 2 * codebook.n_antennas), dtype="<f8")
    body[:, 0] = codebook.angles
    body[:, 1] = codebook.ranges
    body[:, 2:] = np.ascontiguousarray(codebook.vectors, dtype="<c16").view("<f8")

    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(header.tobytes())
        fh.write(body.tobytes())
    return path


def read_codebook(path: Path) -> Codebook:
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < HEADER_DTYPE.itemsize:
        raise CodebookCacheError(f"{path}: truncated header")
    header = np.frombuffer(raw, dtype=HEADER_DTYPE, count=1)[0]
    if header["magic"] != MAGIC:
        raise CodebookCacheError(f"{path}: bad magic {header['magic']!r}")
    if int(header["version"]) != FORMAT_VERSION:
        raise CodebookCacheError(f"{path}: unsupported version {int(header['version'])}")
    code = int(header["kind"])
    if code not in _CODE_KINDS:
        raise CodebookCacheError(f"{path}: unknown codebook kind {code}")

    n = int(header["n_antennas"])
    s = int(header["n_ranges"])
    kind = _CODE_KINDS[code]
    rows = n * s if kind == CodebookKind.POLAR else n
    record = 2 + 2 * n
    body = np.frombuffer(raw, dtype="<f8", offset=HEADER_DTYPE.itemsize)
    if body.size != rows * record:
        raise CodebookCacheError(f"{path}: expected {rows} records, found {body.size / record:.1f}")
    body = body.reshape(rows, record)

    return Codebook(
        kind=kind,
        n_antennas=n,
        n_ranges=s,
        vectors=body[:, 2:].copy().view("<c16").astype(np.complex128),
        angles=body[:, 0].astype(np.float64),
        ranges=body[:, 1].astype(np.float64),
    )


class CodebookCache:
    """
    Directory of serialized codebooks keyed by array geometry and sampling
    parameters. Files are only written on request.
    """

    def __init__(self, cache_dir: str = "storage/codebooks"):
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        logger.info(f"🗄️ Codebook cache at {self.cache_dir}")

    def path_for(self, cfg: ArrayConfig, kind: CodebookKind,
                 params: Optional[PolarSamplingParams] = None) -> Path:
        tag = f"{kind.value}_N{cfg.n_antennas}_f{cfg.carrier_freq / 1e9:g}GHz_d{cfg.element_spacing:.6g}"
        if kind == CodebookKind.POLAR:
            params = params or PolarSamplingParams()
            tag += f"_S{params.n_ranges}_b{params.beta_delta:g}"
        return self.cache_dir / f"{tag}.nfcb"

    def save(self, codebook: Codebook, path: Path) -> Path:
        logger.info(f"💾 Writing {codebook.kind.value} codebook ({codebook.size} entries) to {path}")
        return write_codebook(codebook, path)

    def load(self, path: Path) -> Codebook:
        logger.debug(f"Loading codebook from {path}")
        return read_codebook(path)

    def _get_or_build(self, path: Path, build, expected_size: int) -> Codebook:
        if path.exists():
            codebook = self.load(path)
            if codebook.size != expected_size:
                raise CodebookCacheError(f"{path}: holds {codebook.size} entries, expected {expected_size}")
            return codebook
        codebook = build()
        self.save(codebook, path)
        return codebook

    def get_dft(self, cfg: ArrayConfig) -> Codebook:
        path = self.path_for(cfg, CodebookKind.DFT)
        return self._get_or_build(path, lambda: build_dft_codebook(cfg), cfg.n_antennas)

    def get_polar(self, cfg: ArrayConfig, params: Optional[PolarSamplingParams] = None) -> Codebook:
        params = params or PolarSamplingParams()
        path = self.path_for(cfg, CodebookKind.POLAR, params)
        return self._get_or_build(
            path, lambda: build_polar_codebook(cfg, params), cfg.n_antennas * params.n_ranges
        )

    def verify(self, path: Path, reference: Codebook) -> bool:
        """True when the file reproduces reference bit for bit (NaN labels compare equal)."""
        stored = self.load(path)
        return (
            stored.kind == reference.kind
            and stored.n_ranges == reference.n_ranges
            and np.array_equal(stored.angles, reference.angles)
            and np.array_equal(stored.ranges, reference.ranges, equal_nan=True)
            and np.array_equal(stored.vectors, reference.vectors)
        )

    def list_entries(self) -> List[Path]:
        return sorted(self.cache_dir.glob("*.nfcb"))

    def clear(self) -> int:
        removed = 0
        for path in self.list_entries():
            path.unlink()
            removed += 1
        logger.info(f"🧹 Removed {removed} cached codebooks")
        return removed


def get_cache(cache_dir: Optional[str] = None) -> CodebookCache:
    """Cache rooted at cache_dir, or the configured default directory."""
    if cache_dir is None:
        from config import get_settings
        cache_dir = get_settings().codebook_cache_dir
    return CodebookCache(cache_dir)


def describe(codebook: Codebook) -> str:
    finite = codebook.ranges[~np.isnan(codebook.ranges)]
    span = f", ranges {finite.min():.3f}..{finite.max():.3f} m" if finite.size else ""
    return f"{codebook.kind.value}: {codebook.size} codewords, N={codebook.n_antennas}{span}"


__all__ = [
    "CodebookCache", "get_cache", "write_codebook", "read_codebook", "describe",
    "MAGIC", "FORMAT_VERSION", "HEADER_DTYPE",
]
