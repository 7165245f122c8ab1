"""Scalar measures of Boolean functions: output entropy, density, sensitivity.

All logarithms are base 2; every quantity here is reported in bits or as a
plain probability.  Average sensitivity is computed by XOR-neighbor
enumeration, deliberately independent of the spectral route in
:mod:`qdtlab.fourier` so the two can cross-check each other.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boolfunc import BoolFunction, RealFunction, indicator


def binary_entropy(eta: float) -> float:
    """H(eta) in bits, with H(0) = H(1) = 0 by continuity."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"probability {eta} outside [0, 1]")
    if eta == 0.0 or eta == 1.0:
        return 0.0
    return float(-eta * np.log2(eta) - (1.0 - eta) * np.log2(1.0 - eta))


def entropy(f: BoolFunction) -> float:
    """Shannon entropy (bits) of the output under a uniform input from the domain."""
    counts = np.bincount(f.outputs[f.domain_mask])
    probs = counts[counts > 0] / f.domain_size
    return float(np.sum(-probs * np.log2(probs)))


def density(g: RealFunction) -> float:
    """Mean value over all 2^n points."""
    return float(np.mean(g.values))


def avg_sensitivity(g: RealFunction) -> float:
    """Mean squared change of g across a uniformly random cube edge direction.

    For 0/1-valued g this is the probability that a uniform (vertex, direction)
    pair crosses a bichromatic edge.
    """
    size = g.values.size
    idx = np.arange(size)
    total = 0.0
    for i in range(g.n):
        diff = g.values - g.values[idx ^ (1 << i)]
        total += float(np.dot(diff, diff))
    return total / (g.n * size)


@dataclass(frozen=True)
class OutputStats:
    y: int
    probability: float
    fiber_entropy: float      # H(p_y)
    fiber_sensitivity: float  # average sensitivity of the fiber indicator


@dataclass(frozen=True)
class MetricsReport:
    n: int
    m: int
    total: bool
    domain_size: int
    entropy: float
    per_output: tuple[OutputStats, ...]
    density: float | None          # set only for total functions with m=1
    avg_sensitivity: float | None  # likewise

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "total": self.total,
            "domain_size": self.domain_size,
            "entropy": self.entropy,
            "per_output": [
                {"y": s.y, "p": s.probability, "H_p": s.fiber_entropy,
                 "sensitivity": s.fiber_sensitivity}
                for s in self.per_output
            ],
            "density": self.density,
            "avg_sensitivity": self.avg_sensitivity,
        }

    def to_csv(self) -> str:
        lines = ["y,p,H_p,sensitivity"]
        for s in self.per_output:
            lines.append(f"{s.y},{s.probability!r},{s.fiber_entropy!r},"
                         f"{s.fiber_sensitivity!r}")
        return "\n".join(lines) + "\n"


def compute_metrics(f: BoolFunction) -> MetricsReport:
    """Entropy plus per-output probability, entropy, and sensitivity rows."""
    per_output = []
    for y in f.image():
        fiber = indicator(f, int(y))
        p = float(np.sum(fiber.values[f.domain_mask]) / f.domain_size)
        per_output.append(OutputStats(
            y=int(y),
            probability=p,
            fiber_entropy=binary_entropy(p),
            fiber_sensitivity=avg_sensitivity(fiber),
        ))
    if f.m == 1 and f.is_total:
        g = f.as_real()
        dens, sens = density(g), avg_sensitivity(g)
    else:
        dens = sens = None
    return MetricsReport(
        n=f.n, m=f.m, total=f.is_total, domain_size=f.domain_size,
        entropy=entropy(f), per_output=tuple(per_output),
        density=dens, avg_sensitivity=sens,
    )
