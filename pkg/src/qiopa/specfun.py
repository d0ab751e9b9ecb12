r"""Special functions used by the closed-form expressions.

Everything here is evaluated by short, stable recurrences.  Factorial-heavy
coefficients are carried as :class:`LogScaledReal` (sign and natural log of the
magnitude) so that quantities like :math:`\sqrt{(2i+1)!}/i!` never overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

__all__ = [
    "LogScaledReal",
    "laguerre",
    "assoc_laguerre",
    "hyp2f1_terminating",
    "log_binomial",
    "log_factorial",
]


@dataclass(frozen=True)
class LogScaledReal:
    """A real number stored as ``sign * exp(log_abs)``.

    ``sign`` is one of -1, 0, +1; a zero value has ``log_abs = -inf``.
    """

    sign: int
    log_abs: float

    @classmethod
    def from_float(cls, x: float) -> "LogScaledReal":
        if x == 0:
            return cls(0, -math.inf)
        return cls(1 if x > 0 else -1, math.log(abs(x)))

    @property
    def value(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_abs)

    def __mul__(self, other: "LogScaledReal") -> "LogScaledReal":
        s = self.sign * other.sign
        if s == 0:
            return LogScaledReal(0, -math.inf)
        return LogScaledReal(s, self.log_abs + other.log_abs)

    def __truediv__(self, other: "LogScaledReal") -> "LogScaledReal":
        if other.sign == 0:
            raise ZeroDivisionError("division by a log-scaled zero")
        if self.sign == 0:
            return self
        return LogScaledReal(self.sign * other.sign, self.log_abs - other.log_abs)

    def sqrt(self) -> "LogScaledReal":
        if self.sign < 0:
            raise ConfigError("square root of a negative log-scaled value")
        if self.sign == 0:
            return self
        return LogScaledReal(1, 0.5 * self.log_abs)

    def __float__(self) -> float:
        return self.value


def log_factorial(n):
    """Natural log of ``n!`` (works elementwise on arrays)."""
    from scipy.special import gammaln

    return gammaln(np.asarray(n, dtype=float) + 1.0)


def log_binomial(n: int, k: int) -> LogScaledReal:
    """Binomial coefficient ``C(n, k)`` in log-scaled form.

    Out-of-range ``k`` (negative or larger than ``n``) gives an exact zero.
    """
    if n < 0:
        raise ConfigError("n must be non-negative")
    if k < 0 or k > n:
        return LogScaledReal(0, -math.inf)
    return LogScaledReal(1, math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1))


def laguerre(n: int, x):
    r"""Laguerre polynomial :math:`L_n(x)` by the three-term recurrence

    .. math:: (m+1) L_{m+1} = (2m+1-x) L_m - m L_{m-1}.
    """
    return assoc_laguerre(n, 0, x)


def assoc_laguerre(n: int, k: int, x):
    r"""Generalized Laguerre polynomial :math:`L_n^{(k)}(x)`, ``k >= 0``.

    Uses :math:`(m+1)L_{m+1}^{(k)} = (2m+1+k-x)L_m^{(k)} - (m+k)L_{m-1}^{(k)}`.
    Accepts scalar or array ``x``.
    """
    if n < 0 or k < 0:
        raise ConfigError("n and k must be non-negative")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + k - x
    for m in range(1, n):
        prev, cur = cur, ((2 * m + 1 + k - x) * cur - (m + k) * prev) / (m + 1)
    return cur if cur.ndim else float(cur)


def _terminating_order(a: float) -> int | None:
    """Return N if ``a == -N`` for a non-negative integer N, else None."""
    if a <= 0 and float(a).is_integer():
        return int(-a)
    return None


def hyp2f1_terminating(a: float, b: float, c: float, z: float) -> float:
    r"""Gauss hypergeometric :math:`{}_2F_1(a, b; c; z)` for a terminating series.

    At least one of ``a`` or ``b`` must be a non-positive integer; the series

    .. math:: \sum_{m=0}^{N} \frac{(a)_m (b)_m}{(c)_m} \frac{z^m}{m!}

    is summed term by term (Pochhammer symbols by direct product, which is
    exact for the half-integer ``c`` values that occur in practice).
    """
    orders = [o for o in (_terminating_order(a), _terminating_order(b)) if o is not None]
    if not orders:
        raise ConfigError("hyp2f1_terminating requires a or b to be a non-positive integer")
    n_terms = min(orders)
    total = 1.0
    term = 1.0
    for m in range(n_terms):
        denom = (c + m) * (m + 1)
        if denom == 0:
            raise ConfigError("c must not be a non-positive integer within the series range")
        term *= (a + m) * (b + m) / denom * z
        total += term
    return total
