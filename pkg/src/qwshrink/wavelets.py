"""Orthogonal periodic wavelet transforms.

Two independent routes compute the same decomposition: an explicit
``N x N`` matrix assembled level by level (:func:`build_wavelet_matrix`) and
the recursive filter-and-decimate pyramid (:func:`mallat_forward`).  A third
route, a Givens rotation cascade, lives in :mod:`qwshrink.givens`.

Coefficients are always laid out as::

    [approx J | detail J | detail J-1 | ... | detail 1]

with periodic (circular) boundary handling, so every transform is exactly
orthogonal for any power-of-two length.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvariantViolation

FILTER_TOL = 1e-12

_SQRT2 = math.sqrt(2.0)
_SQRT3 = math.sqrt(3.0)

_NAMED_FILTERS = {
    "haar": (1.0 / _SQRT2, 1.0 / _SQRT2),
    "daub2": (1.0 / _SQRT2, 1.0 / _SQRT2),
    "daub4": tuple(
        v / (4.0 * _SQRT2) for v in (1.0 + _SQRT3, 3.0 + _SQRT3, 3.0 - _SQRT3, 1.0 - _SQRT3)
    ),
}


def quadrature_mirror(h: np.ndarray) -> np.ndarray:
    """High-pass partner ``g_k = (-1)^k h_{L-1-k}`` of a low-pass filter."""
    h = np.asarray(h, dtype=float)
    signs = np.where(np.arange(h.size) % 2 == 0, 1.0, -1.0)
    return signs * h[::-1]


def filter_residuals(h) -> dict[str, float]:
    """Residuals of the three orthonormal low-pass conditions."""
    h = np.asarray(h, dtype=float)
    L = h.size
    shifts = [abs(float(np.dot(h[: L - 2 * m], h[2 * m :]))) for m in range(1, L // 2)]
    return {
        "unit_energy": abs(float(np.dot(h, h)) - 1.0),
        "even_shift_orthogonality": max(shifts, default=0.0),
        "dc_gain": abs(float(h.sum()) - _SQRT2),
    }


@dataclass(frozen=True)
class WaveletFilter:
    name: str
    h: np.ndarray
    g: np.ndarray = field(repr=False)

    @property
    def length(self) -> int:
        return int(self.h.size)


def build_filter(spec, name: str | None = None) -> WaveletFilter:
    """Build a wavelet filter from a family name or explicit low-pass taps.

    Named families are ``haar`` (alias ``daub2``) and ``daub4``.  Custom taps
    must have even length and satisfy unit energy, orthogonality of even
    shifts and ``sum(h) == sqrt(2)``, all to 1e-12.  A violated condition
    raises :class:`InvariantViolation` naming it with its residual.
    """
    if isinstance(spec, str):
        key = spec.lower()
        if key not in _NAMED_FILTERS:
            raise ValueError(
                f"unknown wavelet family {spec!r}; expected one of {sorted(_NAMED_FILTERS)}"
            )
        h = np.array(_NAMED_FILTERS[key], dtype=float)
        name = name or key
    else:
        h = np.asarray(spec, dtype=float).ravel()
        name = name or "custom"
        if h.size < 2 or h.size % 2:
            raise ValueError(f"filter length must be even and >= 2, got {h.size}")
        for invariant, residual in filter_residuals(h).items():
            if residual > FILTER_TOL:
                raise InvariantViolation(invariant, residual, f"filter {name!r}")
    h.setflags(write=False)
    g = quadrature_mirror(h)
    g.setflags(write=False)
    return WaveletFilter(name=name, h=h, g=g)


def load_filter_json(source) -> WaveletFilter:
    """Load a filter from a ``{"name": ..., "h": [...]}`` document.

    ``source`` may be a path or an already-parsed mapping.
    """
    if isinstance(source, (str, Path)):
        doc = json.loads(Path(source).read_text())
    else:
        doc = dict(source)
    unknown = set(doc) - {"name", "h"}
    if unknown:
        raise ValueError(f"unknown filter keys: {sorted(unknown)}")
    if "h" not in doc:
        name = doc.get("name")
        if name is None:
            raise ValueError("filter document needs 'h' or a known 'name'")
        return build_filter(name)
    return build_filter(doc["h"], name=doc.get("name", "custom"))


def _check_length_levels(N: int, levels: int) -> int:
    if N < 2 or N & (N - 1):
        raise ValueError(f"length must be a power of two >= 2, got {N}")
    n = N.bit_length() - 1
    if not 1 <= levels <= n:
        raise ValueError(f"levels must lie in [1, {n}] for length {N}, got {levels}")
    return n


def block_boundaries(N: int, levels: int) -> tuple[int, ...]:
    """Offsets ``(0, N/2^J, N/2^(J-1), ..., N)`` of the coefficient blocks."""
    _check_length_levels(N, levels)
    return (0,) + tuple(N >> (levels - k) for k in range(levels + 1))


@dataclass(frozen=True)
class CoefficientVector:
    """Wavelet coefficients with their block layout.

    ``layout`` holds the block boundaries; block 0 is the approximation and
    block ``k >= 1`` is the detail block of level ``levels + 1 - k``.
    """

    values: np.ndarray
    layout: tuple[int, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        lay = tuple(int(b) for b in self.layout)
        object.__setattr__(self, "layout", lay)
        N = values.shape[-1]
        if len(lay) < 3 or lay != block_boundaries(N, len(lay) - 2):
            raise ValueError(f"layout {lay} inconsistent with coefficient length {N}")

    @property
    def levels(self) -> int:
        return len(self.layout) - 2

    @property
    def approx(self) -> np.ndarray:
        return self.values[..., self.layout[0] : self.layout[1]]

    def detail(self, level: int) -> np.ndarray:
        """Detail block of ``level`` (1 = finest)."""
        if not 1 <= level <= self.levels:
            raise ValueError(f"no detail level {level}")
        k = self.levels + 1 - level
        return self.values[..., self.layout[k] : self.layout[k + 1]]

    def detail_mask(self) -> np.ndarray:
        mask = np.ones(self.values.shape[-1], dtype=bool)
        mask[: self.layout[1]] = False
        return mask

    def replace(self, values) -> "CoefficientVector":
        return CoefficientVector(np.asarray(values, dtype=float), self.layout)


def _analysis_step(x: np.ndarray, filt: WaveletFilter) -> tuple[np.ndarray, np.ndarray]:
    n = x.shape[-1]
    idx = (2 * np.arange(n // 2)[:, None] + np.arange(filt.length)[None, :]) % n
    windows = x[..., idx]
    return windows @ filt.h, windows @ filt.g


def _synthesis_step(a: np.ndarray, d: np.ndarray, filt: WaveletFilter) -> np.ndarray:
    half = a.shape[-1]
    n = 2 * half
    out = np.zeros(a.shape[:-1] + (n,))
    k2 = 2 * np.arange(half)
    for m in range(filt.length):
        # for fixed m the targets (2k+m) mod n are distinct
        out[..., (k2 + m) % n] += filt.h[m] * a + filt.g[m] * d
    return out


def mallat_forward(signal, filt: WaveletFilter, levels: int) -> CoefficientVector:
    """Pyramid DWT with periodic convolution and dyadic decimation.

    Works on the last axis, so a ``(batch, N)`` array is transformed row-wise.
    """
    x = np.asarray(signal, dtype=float)
    N = x.shape[-1]
    _check_length_levels(N, levels)
    details = []
    approx = x
    for _ in range(levels):
        approx, d = _analysis_step(approx, filt)
        details.append(d)
    values = np.concatenate([approx] + details[::-1], axis=-1)
    return CoefficientVector(values, block_boundaries(N, levels))


def mallat_inverse(coeffs: CoefficientVector, filt: WaveletFilter) -> np.ndarray:
    """Invert :func:`mallat_forward` level by level."""
    if not isinstance(coeffs, CoefficientVector):
        raise TypeError("mallat_inverse expects a CoefficientVector")
    lay = coeffs.layout
    v = coeffs.values
    approx = v[..., lay[0] : lay[1]]
    for k in range(1, len(lay) - 1):
        approx = _synthesis_step(approx, v[..., lay[k] : lay[k + 1]], filt)
    return approx


def _level_matrix(n: int, filt: WaveletFilter) -> np.ndarray:
    """One analysis level on length ``n``: low-pass rows above high-pass rows."""
    half = n // 2
    A = np.zeros((n, n))
    rows = np.arange(half)
    for m in range(filt.length):
        cols = (2 * rows + m) % n
        # np.add.at so taps that wrap onto the same column accumulate
        np.add.at(A, (rows, cols), filt.h[m])
        np.add.at(A, (half + rows, cols), filt.g[m])
    return A


@dataclass(frozen=True)
class OrthogonalTransform:
    matrix: np.ndarray = field(repr=False)
    levels: int
    filter: WaveletFilter
    N: int

    def forward(self, signal) -> CoefficientVector:
        y = np.asarray(signal, dtype=float) @ self.matrix.T
        return CoefficientVector(y, block_boundaries(self.N, self.levels))

    def inverse(self, coeffs) -> np.ndarray:
        values = coeffs.values if isinstance(coeffs, CoefficientVector) else np.asarray(coeffs)
        return values @ self.matrix

    def orthogonality_residual(self) -> float:
        return float(np.linalg.norm(self.matrix @ self.matrix.T - np.eye(self.N)))


def build_wavelet_matrix(filt: WaveletFilter, N: int, levels: int) -> OrthogonalTransform:
    """Assemble the full ``N x N`` orthogonal DWT matrix.

    The matrix is the product of per-level analysis matrices, each acting on
    the current approximation block and leaving finished details in place.
    """
    _check_length_levels(N, levels)
    W = np.eye(N)
    n = N
    for _ in range(levels):
        step = np.eye(N)
        step[:n, :n] = _level_matrix(n, filt)
        W = step @ W
        n //= 2
    W.setflags(write=False)
    return OrthogonalTransform(matrix=W, levels=levels, filter=filt, N=N)
