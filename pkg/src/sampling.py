"""Seeded sampling of points away from registered zeros and poles."""
from typing import Iterable, Optional

import numpy as np

from src.errors import PreconditionViolation


def disk_points(rng: np.random.Generator, count: int, radius: float,
                avoid: Optional[Iterable[complex]] = None, margin: float = 1e-3,
                max_rounds: int = 64) -> np.ndarray:
    """Uniform points in |z| < radius, each at least `margin` from every point of `avoid`."""
    avoid_arr = np.asarray(list(avoid or []), dtype=complex)
    out = np.empty(0, dtype=complex)
    for _ in range(max_rounds):
        need = count - len(out)
        if need <= 0:
            break
        n = 2 * need + 8
        rho = radius * np.sqrt(rng.uniform(0.0, 1.0, n))
        theta = rng.uniform(-np.pi, np.pi, n)
        z = rho * np.exp(1j * theta)
        if len(avoid_arr):
            keep = np.min(np.abs(z[:, None] - avoid_arr[None, :]), axis=1) >= margin
            z = z[keep]
        out = np.concatenate([out, z[:need]])
    if len(out) < count:
        raise PreconditionViolation(f"could not place {count} points in |z| < {radius} with margin {margin}")
    return out
