"""Dataset ingestion: LIBSVM-format parsing, seeded subsampling, and seeded
synthetic instances with a controllable spread of row norms.

Real datasets (a9a, w7a, rcv1.binary) are never downloaded by this package;
fetch them manually from the LIBSVM binary collection
(https://www.csie.ntu.edu.tw/~cjlin/libsvmtools/datasets/binary.html) and
point the benchmark at the directory.  Tests rely only on bundled tiny
fixtures and synthetic data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ParseError
from .model import SparseRow
from .sampling import Rng

# substream ids for synthetic generation
_STREAM_FEATURES = 10
_STREAM_PLANE = 11
_STREAM_NOISE = 12


@dataclass(frozen=True)
class Dataset:
    rows: tuple
    d: int
    name: str = "unnamed"

    @property
    def n(self) -> int:
        return len(self.rows)

    def labels(self) -> np.ndarray:
        return np.array([r.label for r in self.rows])


@dataclass(frozen=True)
class SyntheticSpec:
    n: int
    d: int
    spread: float = 1.0      # max/min target row norm; 1 = homogeneous
    noise_rate: float = 0.0  # label flip probability
    seed: int = 0
    base_norm: float = 2.0   # smallest row norm (L_i floor = base^2/4)

    def __post_init__(self):
        if self.n < 1 or self.d < 1:
            raise ConfigError("need n >= 1 and d >= 1")
        if self.spread < 1.0:
            raise ConfigError("spread must be >= 1")
        if not 0.0 <= self.noise_rate <= 0.5:
            raise ConfigError("noise_rate must be in [0, 0.5]")


def parse_libsvm(source, d: int | None = None, name: str = "unnamed") -> Dataset:
    """Parse LIBSVM text ("label idx:val ...", 1-based indices).

    Labels may follow any one of the conventions {-1,+1}, {0,1} or {1,2};
    they are normalized to -1/+1 (0 -> -1, and for {1,2} files 2 -> -1).
    Explicit zero values are dropped (they carry no information and sparse
    rows store nonzeros only).  The dimension is max(declared d, largest
    index + 1).
    """
    if isinstance(source, bytes):
        text = source.decode("ascii")
    elif isinstance(source, str):
        text = source
    else:
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("ascii")

    raw = []  # (line_no, label, idx array, val array)
    max_idx = -1
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        tokens = line.split()
        try:
            label = float(tokens[0])
        except ValueError:
            raise ParseError(f"bad label token {tokens[0]!r}", line_no) from None
        idx = []
        val = []
        prev = 0
        for tok in tokens[1:]:
            try:
                k, v = tok.split(":", 1)
                k = int(k)
                v = float(v)
            except ValueError:
                raise ParseError(f"bad feature token {tok!r}", line_no) from None
            if k < 1:
                raise ParseError(f"index {k} must be >= 1", line_no)
            if k <= prev:
                raise ParseError(
                    f"indices must be strictly increasing ({k} after {prev})",
                    line_no,
                )
            prev = k
            if not math.isfinite(v):
                raise ParseError(f"non-finite value {v!r}", line_no)
            if v == 0.0:
                continue
            idx.append(k - 1)
            val.append(v)
        if idx:
            max_idx = max(max_idx, idx[-1])
        raw.append((line_no, label, idx, val))

    if not raw:
        raise ParseError("no data lines found")

    labels = {lab for _, lab, _, _ in raw}
    if labels <= {-1.0, 1.0}:
        remap = {-1.0: -1.0, 1.0: 1.0}
    elif labels <= {0.0, 1.0}:
        remap = {0.0: -1.0, 1.0: 1.0}
    elif labels <= {1.0, 2.0}:
        remap = {1.0: 1.0, 2.0: -1.0}
    else:
        bad = sorted(labels - {-1.0, 0.0, 1.0, 2.0}) or sorted(labels)
        raise ParseError(f"unsupported label set (saw {bad})")

    dim = max_idx + 1
    if d is not None:
        dim = max(dim, int(d))
    rows = tuple(
        SparseRow(
            indices=np.asarray(idx, dtype=np.int64),
            values=np.asarray(val, dtype=np.float64),
            label=remap[lab],
        )
        for _, lab, idx, val in raw
    )
    return Dataset(rows=rows, d=dim, name=name)


def write_libsvm(dataset: Dataset) -> str:
    """Serialize with round-trip-exact float formatting (repr)."""
    lines = []
    for r in dataset.rows:
        parts = ["+1" if r.label > 0 else "-1"]
        parts.extend(f"{k + 1}:{float(v)!r}" for k, v in zip(r.indices, r.values))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def subsample(dataset: Dataset, n_sub: int, seed: int) -> Dataset:
    """Uniform sample of n_sub rows without replacement, seed-deterministic.

    Partial Fisher-Yates on the index array; row order follows the draw.
    """
    n = dataset.n
    if not 1 <= n_sub <= n:
        raise ConfigError(f"need 1 <= n_sub <= {n}, got {n_sub}")
    if n_sub == n:
        return Dataset(rows=dataset.rows, d=dataset.d,
                       name=f"{dataset.name}[n={n_sub}]")
    rng = Rng(seed, stream=20)
    pool = list(range(n))
    picked = []
    for i in range(n_sub):
        j = i + rng.below(n - i)
        pool[i], pool[j] = pool[j], pool[i]
        picked.append(pool[i])
    rows = tuple(dataset.rows[i] for i in picked)
    return Dataset(rows=rows, d=dataset.d, name=f"{dataset.name}[n={n_sub}]")


def _standard_normals(rng: Rng, size: int) -> np.ndarray:
    """Box-Muller pairs from the stream's uniforms."""
    half = (size + 1) // 2
    u1 = (rng.u64_block(half) >> np.uint64(11)).astype(np.float64)
    u1 = (u1 + 1.0) * (1.0 / (1 << 53))  # (0, 1]
    u2 = rng.random_block(half)
    r = np.sqrt(-2.0 * np.log(u1))
    out = np.concatenate([r * np.cos(2.0 * np.pi * u2),
                          r * np.sin(2.0 * np.pi * u2)])
    return out[:size]


def generate_synthetic(spec: SyntheticSpec) -> Dataset:
    """Gaussian rows rescaled to a controlled norm spread, labels from a
    planted hyperplane with optional flip noise.

    Target norms ramp from base_norm to spread*base_norm following
    spread**(q**2) with q in [0, 1]: a quadratic ramp leaves most rows near
    the floor and a pronounced heavy tail, so max L_i / mean L_i grows
    with the spread (>= 5 at spread = 10).
    """
    n, d = spec.n, spec.d
    frng = Rng(spec.seed, stream=_STREAM_FEATURES)
    G = _standard_normals(frng, n * d).reshape(n, d)
    # avoid degenerate all-zero rows
    norms = np.sqrt((G * G).sum(axis=1))
    norms[norms == 0] = 1.0

    if n == 1:
        ramp = np.array([1.0])
    else:
        q = np.arange(n) / (n - 1)
        ramp = spec.spread ** (q * q)
    target = spec.base_norm * ramp
    A = G * (target / norms)[:, None]

    prng = Rng(spec.seed, stream=_STREAM_PLANE)
    w_star = _standard_normals(prng, d)
    margins = A @ w_star
    labels = np.where(margins >= 0.0, 1.0, -1.0)

    if spec.noise_rate > 0.0:
        nrng = Rng(spec.seed, stream=_STREAM_NOISE)
        flips = nrng.random_block(n) < spec.noise_rate
        labels = np.where(flips, -labels, labels)

    rows = []
    cols = np.arange(d, dtype=np.int64)
    for i in range(n):
        vals = A[i].copy()
        # keep the sparse-row invariant: exact zeros are not representable
        vals[vals == 0.0] = 1e-12
        rows.append(SparseRow(indices=cols, values=vals, label=float(labels[i])))
    return Dataset(rows=tuple(rows), d=d,
                   name=f"synthetic(n={n},d={d},seed={spec.seed})")
