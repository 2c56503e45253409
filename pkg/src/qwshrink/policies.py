"""Shrinkage policies on the rescaled ``[-1, 1]`` coefficient axis.

Damping-valued kinds map a coefficient to a dephasing strength ``gamma``;
the shrunk value is ``sqrt(1 - gamma) * x``.  Value-valued kinds are the
classical soft/hard thresholds and the power-law map, applied directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

GAMMA_KINDS = ("hard_gamma", "exp_gamma", "cos_gamma", "cos4_gamma", "zero_gamma")
VALUE_KINDS = ("power_law", "classical_soft", "classical_hard")
SCOPES = ("details", "all")


@dataclass(frozen=True)
class ShrinkagePolicy:
    """A coefficient shrinkage rule.

    ``lam`` is the threshold (hard/soft kinds), ``alpha`` the rate of the
    exponential and cosine rules, ``exponent`` the power of ``power_law``.
    ``scope`` selects which wavelet blocks are shrunk.
    """

    kind: str
    lam: float | None = None
    alpha: float | None = None
    exponent: float | None = None
    scope: str = "details"

    def __post_init__(self):
        if self.kind not in GAMMA_KINDS + VALUE_KINDS:
            raise ValueError(f"unknown policy kind {self.kind!r}")
        if self.scope not in SCOPES:
            raise ValueError(f"scope must be one of {SCOPES}, got {self.scope!r}")
        needs = {
            "hard_gamma": "lam",
            "classical_soft": "lam",
            "classical_hard": "lam",
            "exp_gamma": "alpha",
            "cos_gamma": "alpha",
            "power_law": "exponent",
        }.get(self.kind)
        if needs is not None:
            value = getattr(self, needs)
            if value is None:
                raise ValueError(f"policy {self.kind!r} requires {needs!r}")
            if needs == "lam" and value < 0:
                raise ValueError(f"lam must be >= 0, got {value}")
            if needs != "lam" and value <= 0:
                raise ValueError(f"{needs} must be > 0, got {value}")

    @property
    def gamma_valued(self) -> bool:
        return self.kind in GAMMA_KINDS

    @classmethod
    def from_dict(cls, doc: dict) -> "ShrinkagePolicy":
        """Build from the config form ``{kind, lambda?, alpha?, exponent?, scope?}``."""
        allowed = {"kind", "lambda", "alpha", "exponent", "scope"}
        unknown = set(doc) - allowed
        if unknown:
            raise ValueError(f"unknown policy keys: {sorted(unknown)}")
        if "kind" not in doc:
            raise ValueError("policy is missing required key 'kind'")
        return cls(
            kind=doc["kind"],
            lam=doc.get("lambda"),
            alpha=doc.get("alpha"),
            exponent=doc.get("exponent"),
            scope=doc.get("scope", "details"),
        )

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "scope": self.scope}
        for key, val in (("lambda", self.lam), ("alpha", self.alpha), ("exponent", self.exponent)):
            if val is not None:
                out[key] = val
        return out


HARD_ZERO = ShrinkagePolicy("zero_gamma")


def _unit_axis(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0):
        raise ValueError("policy inputs must lie on the rescaled axis [-1, 1]")
    return x


def gamma_of(policy: ShrinkagePolicy, x):
    """Dephasing strength ``gamma(x)`` in ``[0, 1]``."""
    if not policy.gamma_valued:
        raise ValueError(f"{policy.kind!r} is not a damping policy")
    x = _unit_axis(x)
    ax = np.abs(x)
    if policy.kind == "hard_gamma":
        g = (ax <= policy.lam).astype(float)
    elif policy.kind == "exp_gamma":
        g = 1.0 - np.exp(-policy.alpha * ax)
    elif policy.kind == "cos_gamma":
        g = np.cos(0.5 * math.pi * ax**policy.alpha)
    elif policy.kind == "cos4_gamma":
        g = np.cos(0.5 * math.pi * ax) ** 4
    else:  # zero_gamma
        g = np.zeros_like(ax)
    g = np.clip(g, 0.0, 1.0)
    return float(g) if g.ndim == 0 else g


def multiplier_of(policy: ShrinkagePolicy, x):
    """Coherence multiplier ``sqrt(1 - gamma(x))``."""
    m = np.sqrt(1.0 - np.asarray(gamma_of(policy, x)))
    return float(m) if m.ndim == 0 else m


def ideal_shrink(policy: ShrinkagePolicy, x):
    """Noiseless shrunk value: ``m(x) x`` for damping kinds, the rule itself otherwise."""
    if policy.gamma_valued:
        return np.asarray(multiplier_of(policy, x)) * np.asarray(x, dtype=float)
    return classical_apply(policy, x)


def classical_apply(policy: ShrinkagePolicy, x):
    """Soft threshold, hard threshold or signed power law."""
    if policy.gamma_valued:
        raise ValueError(f"{policy.kind!r} is a damping policy, not a value map")
    x = np.asarray(x, dtype=float)
    if policy.kind == "classical_soft":
        out = np.sign(x) * np.maximum(np.abs(x) - policy.lam, 0.0)
    elif policy.kind == "classical_hard":
        out = np.where(np.abs(x) > policy.lam, x, 0.0)
    else:
        out = np.sign(x) * np.abs(_unit_axis(x)) ** policy.exponent
    return float(out) if out.ndim == 0 else out


def soft_threshold(x, lam: float):
    return classical_apply(ShrinkagePolicy("classical_soft", lam=lam), x)


def smooth_ancilla_probability(x):
    """Ancilla excitation probability ``sin^2(pi |x| / 2)`` for rotation angle ``pi |x|``."""
    x = _unit_axis(x)
    p = np.sin(0.5 * math.pi * np.abs(x)) ** 2
    return float(p) if p.ndim == 0 else p
