"""C^∞ transition functions built from ψ(x) = e^{-1/x}.

S(x) = ψ(x)/(ψ(x) + ψ(1-x)) equals 0 for x <= 0 and 1 for x >= 1. On
(0, 1) it is the logistic function of φ(x) = 1/(1-x) - 1/x, which gives
stable closed forms for the first two derivatives.
"""

from typing import Tuple

import numpy as np
from scipy.special import expit


def _phi(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    inner = (x > 0) & (x < 1)
    y = np.where(inner, x, 0.5)
    phi = 1.0 / (1.0 - y) - 1.0 / y
    dphi = 1.0 / (1.0 - y) ** 2 + 1.0 / y**2
    d2phi = 2.0 / (1.0 - y) ** 3 - 2.0 / y**3
    return phi, dphi, d2phi


def smoothstep(x):
    """S(x); monotone, flat to all orders at 0 and 1, S(x) + S(1-x) = 1."""
    x = np.asarray(x, dtype=float)
    phi, _, _ = _phi(x)
    res = np.where(x <= 0, 0.0, np.where(x >= 1, 1.0, expit(phi)))
    return res


def smoothstep_jet(x) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """S, S' and S'' at x."""
    x = np.asarray(x, dtype=float)
    inner = (x > 0) & (x < 1)
    phi, dphi, d2phi = _phi(x)
    s = expit(phi)
    bell = s * expit(-phi)
    with np.errstate(over="ignore", invalid="ignore"):
        d1 = bell * dphi
        d2 = bell * ((1.0 - 2.0 * s) * dphi**2 + d2phi)
    value = np.where(x <= 0, 0.0, np.where(x >= 1, 1.0, s))
    d1 = np.where(inner, np.nan_to_num(d1, posinf=0.0, neginf=0.0), 0.0)
    d2 = np.where(inner, np.nan_to_num(d2, posinf=0.0, neginf=0.0), 0.0)
    return value, d1, d2
