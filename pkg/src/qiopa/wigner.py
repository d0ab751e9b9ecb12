r"""Closed-form Wigner functions, ideal and after photon loss.

Convention: a single-mode phase-space point is ``α = X + iY``; the vacuum is
``(2/π) exp(-2|α|²)``; every Wigner function integrates to one.

Lossy amplified states are written through the Gaussian moment integrals

.. math:: I_n(μ,ν,τ,z) = \frac1π\int d^2α\,|α|^{2n} e^{-τ|α|^2-μα^2-να^{*2}}
          e^{zα^*-z^*α},

.. math:: J_{n,m}(τ,μ;z,w) = \frac1{π^2}\int d^2α\,d^2β\,|α|^{2n}|β|^{2m}
          e^{-τ(|α|^2+|β|^2)-μ(αβ+α^*β^*)} e^{zα^*-z^*α} e^{wβ^*-w^*β},

whose base cases are Gaussians; higher orders are mixed derivatives in the
displacement variables, generated exactly by :class:`_GaussianDerivative`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any

import numpy as np
from scipy.special import comb

from .channel import LossChannel
from .errors import ConfigError, UnsupportedInputError
from .fock import CssParams, GainParams, _as_gain, css_normalization
from .specfun import laguerre

__all__ = [
    "MAX_ORDER",
    "LossWignerParams",
    "QuadratureDeltas",
    "WignerField",
    "i_n_integral",
    "j_nm_integral",
    "w_single_mode",
    "w_single_mode_ideal",
    "w_collinear",
    "w_collinear_ideal",
    "collinear_deltas",
    "collinear_slice_point",
    "w_noncollinear",
    "w_noncollinear_ideal",
    "noncollinear_deltas",
    "noncollinear_pair_coordinates",
    "w_css",
    "css_witness_point",
    "negativity_at_origin",
    "quadrature_uncertainty",
    "single_mode_field",
    "css_field",
]

#: highest order of the moment integrals exposed by the closed forms
MAX_ORDER = 2


# --------------------------------------------------------------------------
# parameters
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LossWignerParams:
    """Loss-dependent coefficients of the lossy amplified Wigner functions."""

    gain: GainParams
    ch: LossChannel

    @property
    def eps(self) -> float:
        return 0.5 * (1 + 2 * self.ch.R * self.gain.S**2)

    @property
    def kappa(self) -> float:
        return 0.5 * self.ch.R * self.gain.C * self.gain.S

    @property
    def eps_prime(self) -> float:
        return self.eps

    @property
    def mu(self) -> float:
        return self.ch.R * self.gain.C * self.gain.S

    @property
    def Q(self) -> float:
        """``1 + 4R(1-R)S²``, the common loss denominator."""
        return 1 + 4 * self.ch.R * self.ch.T * self.gain.S**2

    def c(self, N: int) -> np.ndarray:
        """``c_n^N = C(N,n)(-1)^n T^n / n!`` for n = 0..N."""
        n = np.arange(N + 1)
        return comb(N, n) * (-self.ch.T) ** n / np.array([math.factorial(k) for k in n], float)

    d = c  # identical coefficients for the non-collinear pairs


# --------------------------------------------------------------------------
# Gaussian moment integrals
# --------------------------------------------------------------------------


class _GaussianDerivative:
    r"""Exact mixed derivatives of :math:`e^{Q}` for quadratic ``Q``.

    With ``v_k = ∂_k Q`` and constant Hessian ``H``, every derivative of
    ``e^Q`` is ``P(v) e^Q`` for a polynomial ``P``; applying ``∂_k`` maps
    ``P ↦ ∂_k P + v_k P`` where ``∂_k v_l = H[k,l]``.  Polynomials are dicts
    from exponent tuples to coefficients.
    """

    def __init__(self, hessian):
        self.H = np.asarray(hessian, dtype=complex)
        self.dim = self.H.shape[0]

    def apply(self, poly: dict, k: int) -> dict:
        out: dict = {}
        for exps, coef in poly.items():
            # multiply by v_k
            e = list(exps)
            e[k] += 1
            key = tuple(e)
            out[key] = out.get(key, 0) + coef
            # differentiate the monomial
            for l, p in enumerate(exps):
                if p and self.H[k, l] != 0:
                    e = list(exps)
                    e[l] -= 1
                    key = tuple(e)
                    out[key] = out.get(key, 0) + coef * p * self.H[k, l]
        return out

    def derivative(self, orders) -> dict:
        poly = {(0,) * self.dim: 1.0}
        for k, n in enumerate(orders):
            for _ in range(n):
                poly = self.apply(poly, k)
        return poly

    @staticmethod
    def evaluate(poly: dict, v) -> Any:
        total = 0
        for exps, coef in poly.items():
            term = coef
            for vk, p in zip(v, exps):
                if p:
                    term = term * vk**p
            total = total + term
        return total


def _check_order(n: int, cap: int = MAX_ORDER):
    if int(n) != n or n < 0:
        raise ConfigError(f"order must be a non-negative integer, got {n!r}")
    if n > cap:
        raise UnsupportedInputError(f"order {n} outside the supported closed-form range 0..{cap}")


@lru_cache(maxsize=128)
def _i_poly(n: int, p: complex, q: complex, c: complex):
    return _GaussianDerivative([[p, c], [c, q]]).derivative((n, n))


def i_n_integral(n: int, mu: float, nu: float, tau: float, z):
    r"""Moment integral :math:`I_n(μ,ν,τ,z)` (scalar or array ``z``).

    Base case :math:`I_0 = (τ^2-4μν)^{-1/2}\exp[-(μz^2+νz^{*2}+τ|z|^2)/(τ^2-4μν)]`
    and :math:`I_n = (-1)^n ∂_z^n ∂_{z^*}^n I_0`.
    """
    _check_order(n)
    D = tau * tau - 4 * mu * nu
    if D <= 0:
        raise ConfigError("moment integral diverges: τ² - 4μν must be positive")
    z = np.asarray(z, dtype=complex)
    zc = np.conj(z)
    Q = -(mu * z * z + nu * zc * zc + tau * z * zc) / D
    base = np.exp(Q) / math.sqrt(D)
    if n == 0:
        val = base
    else:
        vz = -(2 * mu * z + tau * zc) / D
        vzc = -(2 * nu * zc + tau * z) / D
        poly = _i_poly(n, -2 * mu / D, -2 * nu / D, -tau / D)
        val = (-1) ** n * _GaussianDerivative.evaluate(poly, (vz, vzc)) * base
    val = np.real_if_close(val, tol=1e6)
    return val if np.ndim(val) else val[()]


@lru_cache(maxsize=128)
def _j_poly(n: int, m: int, tau: float, mu: float):
    D = tau * tau - mu * mu
    # coordinates ordered (z, z*, w, w*)
    H = np.zeros((4, 4))
    H[0, 1] = H[1, 0] = -tau / D
    H[2, 3] = H[3, 2] = -tau / D
    H[0, 2] = H[2, 0] = -mu / D
    H[1, 3] = H[3, 1] = -mu / D
    return _GaussianDerivative(H).derivative((n, n, m, m))


def j_nm_integral(n: int, m: int, tau: float, mu: float, z, w):
    r"""Two-mode moment integral :math:`J_{n,m}(τ,μ;z,w)`.

    :math:`J_{0,0} = (τ^2-μ^2)^{-1}\exp\{-[τ(|z|^2+|w|^2)+μ(zw+z^*w^*)]/(τ^2-μ^2)\}`
    and :math:`J_{n,m} = (-1)^{n+m}∂_z^n∂_{z^*}^n∂_w^m∂_{w^*}^m J_{0,0}`.
    """
    _check_order(n)
    _check_order(m)
    D = tau * tau - mu * mu
    if D <= 0:
        raise ConfigError("moment integral diverges: τ² - μ² must be positive")
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    zc, wc = np.conj(z), np.conj(w)
    Q = -(tau * (z * zc + w * wc) + mu * (z * w + zc * wc)) / D
    base = np.exp(Q) / D
    if n == 0 and m == 0:
        val = base
    else:
        v = (
            -(tau * zc + mu * w) / D,
            -(tau * z + mu * wc) / D,
            -(tau * wc + mu * z) / D,
            -(tau * w + mu * zc) / D,
        )
        poly = _j_poly(n, m, float(tau), float(mu))
        val = (-1) ** (n + m) * _GaussianDerivative.evaluate(poly, v) * base
    val = np.real_if_close(val, tol=1e6)
    return val if np.ndim(val) else val[()]


# --------------------------------------------------------------------------
# single-mode amplifier
# --------------------------------------------------------------------------


def _sm_factor(N: int, lw: LossWignerParams, zbar, sign: int = 1):
    r""":math:`\frac1π\sum_n c_n^N I_n(±κ, ±κ, ε, \bar z)`."""
    kap = sign * lw.kappa
    total = 0.0
    for n, c in enumerate(lw.c(N)):
        if c != 0.0:
            total = total + c * i_n_integral(n, kap, kap, lw.eps, zbar)
    return np.real(total) / math.pi


def w_single_mode(N: int, gain, ch: LossChannel, X, Y):
    r"""Squeezed Fock state ``|N⟩`` after loss.

    The amplifier maps ``α ↦ \bar α = αC - α^*S = Xe^{-g} + iYe^{g}``;
    :math:`W = \frac1π\sum_n c_n^N I_n(κ,κ,ε,\bar α)`.  Without loss any
    ``N`` is accepted (Laguerre form); with loss ``N ≤ 2``.
    """
    gain = _as_gain(gain)
    if ch.R == 0:
        _check_order(N, cap=10**6)
        return w_single_mode_ideal(N, gain, X, Y)
    _check_order(N)
    lw = LossWignerParams(gain, ch)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    zbar = X * math.exp(-gain.g) + 1j * Y * math.exp(gain.g)
    return _sm_factor(N, lw, zbar)


def w_single_mode_ideal(N: int, gain, X, Y):
    r"""Lossless form :math:`\frac2π(-1)^N L_N(4|\bar α|^2)e^{-2|\bar α|^2}`."""
    gain = _as_gain(gain)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    r2 = (X * math.exp(-gain.g)) ** 2 + (Y * math.exp(gain.g)) ** 2
    return 2 / math.pi * (-1) ** N * laguerre(N, 4 * r2) * np.exp(-2 * r2)


# --------------------------------------------------------------------------
# collinear amplifier (two polarization modes)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureDeltas:
    """Squeezing variables ``γ_{A±}, γ_{B±}`` (scalars or equal-shape arrays)."""

    gamma_A_plus: Any
    gamma_A_minus: Any
    gamma_B_plus: Any
    gamma_B_minus: Any

    @property
    def delta_A(self):
        return (self.gamma_A_plus - 1j * self.gamma_A_minus) / math.sqrt(2)

    @property
    def delta_B(self):
        return (self.gamma_B_plus - 1j * self.gamma_B_minus) / math.sqrt(2)

    @property
    def delta2(self):
        """``|Δ|² = (|γ_{A+}|² + |γ_{A-}|² + |γ_{B+}|² + |γ_{B-}|²)/2``."""
        return 0.5 * (
            np.abs(self.gamma_A_plus) ** 2 + np.abs(self.gamma_A_minus) ** 2
            + np.abs(self.gamma_B_plus) ** 2 + np.abs(self.gamma_B_minus) ** 2
        )


def collinear_deltas(gain, alpha: complex, beta: complex) -> QuadratureDeltas:
    """Squeezing variables of the collinear amplifier (``α``: H, ``β``: V)."""
    g = _as_gain(gain).g
    a, b = np.asarray(alpha, dtype=complex), np.asarray(beta, dtype=complex)
    return QuadratureDeltas(
        (a + np.conj(b)) * math.exp(-g),
        1j * (a - np.conj(b)) * math.exp(g),
        (np.conj(a) + b) * math.exp(-g),
        1j * (b - np.conj(a)) * math.exp(g),
    )


def collinear_slice_point(X, Y, phi: float = 0.0):
    """Point ``(α, β)`` with ``α + β* = X e^{iφ}`` and ``β - α* = Y e^{-iφ}``.

    This is the two-quadrature section with ``arg α = -arg β = φ``.
    """
    e = np.exp(1j * phi)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    a, b = (X - Y) / 2 * e, (X + Y) / 2 * np.conj(e)
    return (a, b) if a.ndim else (complex(a), complex(b))


def _collinear_bars(gain: GainParams, alpha, beta):
    C, S = gain.C, gain.S
    ap = (alpha + beta) / math.sqrt(2)
    am = (beta - alpha) / math.sqrt(2)
    return ap * C - np.conj(ap) * S, am * C + np.conj(am) * S


def w_collinear(N: int, M: int, gain, ch: LossChannel, alpha, beta):
    r"""Collinear amplifier seeded with ``|N+, M-⟩`` after loss.

    ``α`` and ``β`` are the H and V phase-space coordinates.  With
    :math:`\bar α = [(α+β)C-(α^*+β^*)S]/\sqrt2` and
    :math:`\bar β = [(β-α)C+(β^*-α^*)S]/\sqrt2`,

    .. math:: W = \Big[\frac1π\sum_n c_n^N I_n(κ,κ,ε,\bar α)\Big]
                  \Big[\frac1π\sum_m c_m^M I_m(-κ,-κ,ε,\bar β)\Big].
    """
    gain = _as_gain(gain)
    if ch.R == 0:
        _check_order(N, cap=10**6)
        _check_order(M, cap=10**6)
        return w_collinear_ideal(N, M, gain, alpha, beta)
    _check_order(N)
    _check_order(M)
    lw = LossWignerParams(gain, ch)
    alpha = np.asarray(alpha, dtype=complex)
    beta = np.asarray(beta, dtype=complex)
    abar, bbar = _collinear_bars(gain, alpha, beta)
    return _sm_factor(N, lw, abar, +1) * _sm_factor(M, lw, bbar, -1)


def w_collinear_ideal(N: int, M: int, gain, alpha, beta):
    r"""Lossless form in the squeezing variables,
    :math:`(\frac2π)^2(-1)^{N+M}L_N(|Δ_A+Δ_B|^2)L_M(|Δ_B-Δ_A|^2)e^{-|Δ|^2}`."""
    d = collinear_deltas(gain, alpha, beta)
    val = (2 / math.pi) ** 2 * (-1) ** (N + M) * laguerre(N, np.abs(d.delta_A + d.delta_B) ** 2) \
        * laguerre(M, np.abs(d.delta_B - d.delta_A) ** 2) * np.exp(-d.delta2)
    return val if np.ndim(val) else float(val)


# --------------------------------------------------------------------------
# non-collinear amplifier (two spatial x two polarization modes)
# --------------------------------------------------------------------------


def noncollinear_pair_coordinates(point, phi: float = 0.0):
    """Map ``(α1, α2, β1, β2)`` of modes ``(1H, 2V, 1V, 2H)`` to the amplified pairs.

    Returns ``(x1, x2, y1, y2)``: coordinates of ``1φ, 2φ⊥`` (gain ``+g``) and
    ``1φ⊥, 2φ`` (gain ``-g``).
    """
    a1, a2, b1, b2 = (np.asarray(z, dtype=complex) for z in point)
    e = np.exp(1j * phi)
    s = math.sqrt(2)
    return (a1 + np.conj(e) * b1) / s, (a2 - e * b2) / s, (-e * a1 + b1) / s, (np.conj(e) * a2 + b2) / s


def _pair_factor(N: int, lw: LossWignerParams, x1, x2, sign: int):
    C, S = lw.gain.C, sign * lw.gain.S
    z = x1 * C - np.conj(x2) * S
    w = x2 * C - np.conj(x1) * S
    mu = sign * lw.mu
    total = 0.0
    for n, d in enumerate(lw.d(N)):
        if d != 0.0:
            total = total + d * j_nm_integral(n, 0, lw.eps_prime, mu, z, w)
    return np.real(total) / math.pi**2


def w_noncollinear(N: int, M: int, gain, ch: LossChannel, point, phi: float = 0.0):
    r"""Non-collinear amplifier with ``|Nφ, Mφ⊥⟩`` injected in spatial mode 1.

    ``point = (α1, α2, β1, β2)`` for modes ``(1H, 2V, 1V, 2H)``.  The result is
    :math:`\frac1{π^2}\sum_n d_n^N J_{n,0}(ε',μ;\bar α_1,\bar α_2)\cdot
    \frac1{π^2}\sum_m d_m^M J_{m,0}(ε',-μ;\bar β_1,\bar β_2)`.
    """
    gain = _as_gain(gain)
    if ch.R == 0:
        _check_order(N, cap=10**6)
        _check_order(M, cap=10**6)
        return w_noncollinear_ideal(N, M, gain, point, phi)
    _check_order(N)
    _check_order(M)
    lw = LossWignerParams(gain, ch)
    x1, x2, y1, y2 = noncollinear_pair_coordinates(point, phi)
    return _pair_factor(N, lw, x1, x2, +1) * _pair_factor(M, lw, y1, y2, -1)


def noncollinear_deltas(gain, point) -> QuadratureDeltas:
    """Squeezing variables of the non-collinear amplifier."""
    g = _as_gain(gain).g
    a1, a2, b1, b2 = (np.asarray(z, dtype=complex) for z in point)
    return QuadratureDeltas(
        (a1 + np.conj(a2)) * math.exp(-g),
        1j * (a1 - np.conj(a2)) * math.exp(g),
        (b1 - np.conj(b2)) * math.exp(-g),
        1j * (b1 + np.conj(b2)) * math.exp(g),
    )


def w_noncollinear_ideal(N: int, M: int, gain, point, phi: float = 0.0):
    r"""Lossless form :math:`(\frac2π)^4(-1)^{N+M}e^{-2|Δ|^2}
    L_N(|Δ_A+e^{-iφ}Δ_B|^2)L_M(|-e^{iφ}Δ_A+Δ_B|^2)`."""
    d = noncollinear_deltas(gain, point)
    e = np.exp(1j * phi)
    val = (2 / math.pi) ** 4 * (-1) ** (N + M) * np.exp(-2 * d.delta2) \
        * laguerre(N, np.abs(d.delta_A + np.conj(e) * d.delta_B) ** 2) \
        * laguerre(M, np.abs(-e * d.delta_A + d.delta_B) ** 2)
    return val if np.ndim(val) else float(val)


# --------------------------------------------------------------------------
# coherent-state superpositions
# --------------------------------------------------------------------------


def _dyad(a: complex, b: complex, x):
    r"""Wigner function of ``|a⟩⟨b|``:
    :math:`\frac2π\exp[-2|x|^2+2x^*a+2xb^*-ab^*-(|a|^2+|b|^2)/2]`."""
    return 2 / math.pi * np.exp(
        -2 * np.abs(x) ** 2 + 2 * np.conj(x) * a + 2 * x * np.conj(b)
        - a * np.conj(b) - 0.5 * (abs(a) ** 2 + abs(b) ** 2)
    )


def w_css(params: CssParams, ch: LossChannel, X, Y):
    r"""Cat state ``N(|αe^{iφ}⟩ ± |αe^{-iφ}⟩)/√2`` after loss.

    Two Gaussians centred on :math:`β_± = \sqrt Tαe^{±iφ}` plus the
    interference term weighted by :math:`±e^{-χ}e^{iψ}`.
    """
    x = np.asarray(X, dtype=float) + 1j * np.asarray(Y, dtype=float)
    T, R = ch.T, ch.R
    a2 = params.alpha**2
    bp = math.sqrt(T) * params.alpha * np.exp(1j * params.phi)
    bm = math.sqrt(T) * params.alpha * np.exp(-1j * params.phi)
    c = params.s * math.exp(-2 * R * a2 * math.sin(params.phi) ** 2) * np.exp(1j * R * a2 * math.sin(2 * params.phi))
    N2 = css_normalization(params) ** 2
    W = 0.5 * N2 * (_dyad(bp, bp, x) + _dyad(bm, bm, x) + 2 * np.real(c * _dyad(bp, bm, x)))
    return np.real(W)


def css_witness_point(alpha: float, ch: LossChannel) -> float:
    """Interference minimum ``X₀ = π/(4√T α)`` of the ``φ = π/2`` cat (on ``Y = 0``)."""
    if ch.T == 0 or alpha == 0:
        return math.inf
    return math.pi / (4 * math.sqrt(ch.T) * alpha)


# --------------------------------------------------------------------------
# witnesses and moments
# --------------------------------------------------------------------------


def negativity_at_origin(family: str, ch: LossChannel, gain=None, alpha: float | None = None,
                         phi: float = math.pi / 2) -> float:
    """Closed-form negativity witness; its sign is that of ``2R - 1``.

    * ``single_mode``: ``W_{|1⟩}(0) = (2/π)(2R-1)/Q^{3/2}``
    * ``collinear``: ``W_{|1+,0-⟩}(0) = (2/π)²(2R-1)/Q²``
    * ``noncollinear``: ``W_{|1φ,0φ⊥⟩}(0) = (16/π⁴)(2R-1)/Q³``
    * ``css``: ``W(X₀, 0) = (2N²/π)e^{-2X₀²}(e^{-2Tα²} - e^{-2Rα²})`` for ``φ = π/2``

    with ``Q = 1 + 4R(1-R)S²``.
    """
    if family == "css":
        if alpha is None:
            raise ConfigError("css witness needs alpha")
        if not math.isclose(phi, math.pi / 2):
            raise UnsupportedInputError("the closed-form css witness is defined for phi = pi/2")
        params = CssParams(alpha, phi, "+")
        x0 = css_witness_point(alpha, ch)
        if not math.isfinite(x0):
            return 0.0
        N2 = css_normalization(params) ** 2
        return 2 * N2 / math.pi * math.exp(-2 * x0 * x0) * (
            math.exp(-2 * ch.T * alpha**2) - math.exp(-2 * ch.R * alpha**2)
        )
    if gain is None:
        raise ConfigError(f"{family} witness needs a gain")
    Q = LossWignerParams(_as_gain(gain), ch).Q
    s = 2 * ch.R - 1
    if family == "single_mode":
        return 2 / math.pi * s / Q**1.5
    if family == "collinear":
        return (2 / math.pi) ** 2 * s / Q**2
    if family == "noncollinear":
        return 16 / math.pi**4 * s / Q**3
    raise ConfigError(f"unknown family {family!r}")


def quadrature_uncertainty(N: int, gain, ch: LossChannel) -> tuple[float, float]:
    """``(ΔX, ΔY)`` of the squeezed ``|N⟩`` after loss, N ∈ {0, 1}.

    ``ΔX = ½√((2N+1)Te^{2g} + R)`` and ``ΔY = ½√((2N+1)Te^{-2g} + R)``; the
    vacuum has ``ΔX = ΔY = 1/2``.
    """
    if N not in (0, 1):
        raise UnsupportedInputError("quadrature_uncertainty supports N = 0 or 1")
    g = _as_gain(gain).g
    f = 2 * N + 1
    return (0.5 * math.sqrt(f * ch.T * math.exp(2 * g) + ch.R),
            0.5 * math.sqrt(f * ch.T * math.exp(-2 * g) + ch.R))


# --------------------------------------------------------------------------
# grids
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class WignerField:
    """Wigner values on a rectangular ``X × Y`` grid (``values[ix, iy]``)."""

    x: np.ndarray
    y: np.ndarray
    values: np.ndarray
    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if np.shape(self.values) != (np.size(self.x), np.size(self.y)):
            raise ConfigError("grid dimensions do not match the value array")


def single_mode_field(N: int, gain, ch: LossChannel, x, y) -> WignerField:
    X, Y = np.meshgrid(np.asarray(x, float), np.asarray(y, float), indexing="ij")
    return WignerField(np.asarray(x, float), np.asarray(y, float), w_single_mode(N, gain, ch, X, Y),
                       "single_mode", {"N": N, "g": _as_gain(gain).g, "R": ch.R})


def css_field(params: CssParams, ch: LossChannel, x, y) -> WignerField:
    X, Y = np.meshgrid(np.asarray(x, float), np.asarray(y, float), indexing="ij")
    return WignerField(np.asarray(x, float), np.asarray(y, float), w_css(params, ch, X, Y), "css",
                       {"alpha": params.alpha, "phi": params.phi, "sign": params.sign, "R": ch.R})
