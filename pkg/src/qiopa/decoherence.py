r"""Closed-form density matrices after photon loss.

* Coherent-state superpositions: exact Fock-space matrix and the effective
  two-level ("qubit") form with decoherence parameters
  :math:`χ = 2R|α|^2\sin^2φ` and :math:`ψ = R|α|^2\sin 2φ`.
* Amplified equatorial qubit :math:`|Φ^φ⟩`: parity-resolved elements with
  terminating :math:`{}_2F_1` factors, in the ``(φ, φ⊥)`` basis.
* Amplified ``|H⟩``/``|V⟩`` photon: elements as a single convergent sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .channel import LossChannel
from .errors import ConfigError
from .fock import (
    HV,
    CssParams,
    DensityMatrix,
    GainParams,
    _as_gain,
    css_normalization,
    phi_basis,
)
from .specfun import hyp2f1_terminating

__all__ = [
    "CssQubitParams",
    "css_qubit_params",
    "css_qubit_matrix",
    "css_lossy_density",
    "css_bures_analytic",
    "coherent_amplitudes",
    "EquatorialElementIndex",
    "equatorial_lossy_element",
    "equatorial_lossy_matrix",
    "hv_lossy_element",
    "hv_lossy_matrix",
]


# --------------------------------------------------------------------------
# coherent-state superpositions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CssQubitParams:
    chi: float
    psi: float
    beta: float
    gamma: float


def css_qubit_params(params: CssParams, ch: LossChannel) -> CssQubitParams:
    a2 = params.alpha**2
    return CssQubitParams(
        chi=2 * a2 * ch.R * math.sin(params.phi) ** 2,
        psi=a2 * ch.R * math.sin(2 * params.phi),
        beta=math.sqrt(ch.T) * params.alpha,
        gamma=math.sqrt(ch.R) * params.alpha,
    )


def css_qubit_matrix(params: CssParams, ch: LossChannel) -> np.ndarray:
    r"""Two-level form :math:`\frac12\begin{pmatrix}1 & ±e^{-χ}e^{iψ}\\ ±e^{-χ}e^{-iψ} & 1\end{pmatrix}`.

    Written on ``{|√T α e^{iφ}⟩, |√T α e^{-iφ}⟩}`` treated as orthonormal, which
    is accurate once the two transmitted components no longer overlap.
    """
    q = css_qubit_params(params, ch)
    c = params.s * math.exp(-q.chi) * np.exp(1j * q.psi)
    return 0.5 * np.array([[1.0, c], [np.conj(c), 1.0]])


def coherent_amplitudes(beta: complex, cutoff: int) -> np.ndarray:
    """Fock amplitudes of the coherent state ``|β⟩``."""
    n = np.arange(cutoff)
    r = abs(beta)
    if r == 0:
        out = np.zeros(cutoff, dtype=complex)
        out[0] = 1.0
        return out
    logmag = -0.5 * r * r + n * math.log(r) - 0.5 * gammaln(n + 1.0)
    return np.exp(logmag) * np.exp(1j * n * np.angle(beta))


def css_lossy_density(params: CssParams, ch: LossChannel, cutoff: int | None = None) -> DensityMatrix:
    r"""Exact Fock matrix of a lossy cat state.

    .. math:: ρ = \frac{N^2}{2}\Big[|β_+⟩⟨β_+| + |β_-⟩⟨β_-|
              ± e^{-χ}\big(e^{iψ}|β_+⟩⟨β_-| + e^{-iψ}|β_-⟩⟨β_+|\big)\Big],
              \quad β_± = \sqrt T α e^{±iφ}.
    """
    a = params.alpha
    n = int(math.ceil(a * a + 10 * a + 20)) if cutoff is None else int(cutoff)
    q = css_qubit_params(params, ch)
    bp = coherent_amplitudes(q.beta * np.exp(1j * params.phi), n)
    bm = coherent_amplitudes(q.beta * np.exp(-1j * params.phi), n)
    c = params.s * math.exp(-q.chi) * np.exp(1j * q.psi)
    N2 = css_normalization(params) ** 2
    rho = 0.5 * N2 * (
        np.outer(bp, bp.conj()) + np.outer(bm, bm.conj())
        + c * np.outer(bp, bm.conj()) + np.conj(c) * np.outer(bm, bp.conj())
    )
    deficit = max(0.0, 1.0 - float(np.real(np.trace(rho))))
    return DensityMatrix(rho, (n,), deficit)


def css_bures_analytic(alpha: float, phi: float, ch: LossChannel) -> tuple[float, float]:
    r"""Bures distances for lossy cat states.

    Returns ``(D_components, D_superpositions)``: the distance between the two
    transmitted coherent components, :math:`\sqrt{1-e^{-2T|α|^2\sin^2φ}}`, and
    between the ``+`` and ``-`` superpositions in the two-level form,
    :math:`\sqrt{1-\sqrt{1-e^{-4R|α|^2\sin^2φ}}}`.
    """
    s2 = math.sin(phi) ** 2
    d_comp = math.sqrt(-math.expm1(-2 * ch.T * alpha**2 * s2))
    fid = -math.expm1(-4 * ch.R * alpha**2 * s2)
    d_sup = math.sqrt(max(0.0, 1.0 - math.sqrt(fid)))
    return d_comp, d_sup


# --------------------------------------------------------------------------
# amplified equatorial qubit
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class EquatorialElementIndex:
    """Element ``⟨i, j| ρ |k, q⟩`` (first index: mode ``φ``, second: ``φ⊥``)."""

    i: int
    j: int
    k: int
    q: int

    def __post_init__(self):
        if min(self.i, self.j, self.k, self.q) < 0:
            raise ConfigError("element indices must be non-negative")


def _half_fact(n: int) -> float:
    return math.lgamma(n // 2 + 1)


def _photon_factor(i: int, k: int, G: float, R: float, T: float) -> float:
    """Factor carried by the mode that holds the injected photon."""
    x = (R * G) ** 2
    if (i - k) % 2:
        return 0.0
    if T == 0:
        return R if (i == 0 and k == 0) else 0.0
    logf = 0.5 * (math.lgamma(i + 1) + math.lgamma(k + 1)) + 0.5 * (i + k) * math.log(T)
    if i % 2 == 0:
        power = (i + k) // 2
        logf -= _half_fact(i) + _half_fact(k)
        hyp = hyp2f1_terminating(-i / 2, -k / 2, 1.5, x)
        pref = R * (i + 1) * (k + 1)
    else:
        power = (i + k) // 2 - 1
        logf -= _half_fact(i - 1) + _half_fact(k - 1)
        hyp = hyp2f1_terminating(-(1 + i) / 2, -(1 + k) / 2, 0.5, x)
        pref = 1.0
    if power > 0 and G == 0:
        return 0.0
    return pref * hyp * math.exp(logf + (power * math.log(G / 2) if power else 0.0))


def _vacuum_factor(j: int, q: int, G: float, R: float, T: float) -> float:
    """Factor carried by the initially empty mode (sign of ``-Γ/2`` included)."""
    x = (R * G) ** 2
    if (j - q) % 2:
        return 0.0
    if T == 0:
        return 1.0 if (j == 0 and q == 0) else 0.0
    logf = 0.5 * (math.lgamma(j + 1) + math.lgamma(q + 1)) + 0.5 * (j + q) * math.log(T)
    if j % 2 == 0:
        power = (j + q) // 2
        logf -= _half_fact(j) + _half_fact(q)
        hyp = hyp2f1_terminating(-j / 2, -q / 2, 0.5, x)
        pref = 1.0
    else:
        power = (j + q) // 2 - 1
        logf -= _half_fact(j - 1) + _half_fact(q - 1)
        hyp = hyp2f1_terminating((1 - j) / 2, (1 - q) / 2, 1.5, x)
        pref = R * G * G
    if power > 0 and G == 0:
        return 0.0
    sign = -1.0 if power % 2 else 1.0
    return sign * pref * hyp * math.exp(logf + (power * math.log(G / 2) if power else 0.0))


def _envelope(n: int, gain: GainParams, R: float) -> float:
    x = (R * gain.Gamma) ** 2
    return -math.log1p(-x) * n / 2.0


def equatorial_lossy_element(idx: EquatorialElementIndex, gain, phi: float, ch: LossChannel) -> complex:
    r"""``⟨i,j|ρ_T^φ|k,q⟩`` for the amplified ``|φ⟩`` photon after loss.

    Mixed-parity elements (``i ≢ k`` or ``j ≢ q`` mod 2) vanish exactly.  The
    nonzero classes share the envelope
    :math:`C^{-4}(1-R^2Γ^2)^{-2-(i+j+k+q)/2}\,(e^{iφ})^{(j+k-i-q)/2}` times
    a product of one terminating :math:`{}_2F_1` per mode.
    """
    gain = _as_gain(gain)
    i, j, k, q = idx.i, idx.j, idx.k, idx.q
    if (i - k) % 2 or (j - q) % 2:
        return 0j
    G, R, T = gain.Gamma, ch.R, ch.T
    a = _photon_factor(i, k, G, R, T)
    b = _vacuum_factor(j, q, G, R, T)
    if a == 0.0 or b == 0.0:
        return 0j
    env = math.exp(-4 * math.log(gain.C) + _envelope(4 + i + j + k + q, gain, R))
    phase = np.exp(1j * phi * (j + k - i - q) / 2)
    return complex(env * a * b * phase)


def equatorial_lossy_matrix(gain, phi: float, ch: LossChannel, cutoff: int = 30,
                            orthogonal: bool = False) -> DensityMatrix:
    """Assemble ``ρ_T^φ`` (or ``ρ_T^{φ⊥}``) on a ``cutoff × cutoff`` photon block.

    The elements factorize into one matrix per polarization mode, which is
    used to fill the block quickly.  The orthogonal state follows from the
    mode-swap symmetry ``ρ^{φ⊥}(φ)[i,j,k,q] = ρ^{φ}(π-φ)[j,i,q,k]``.
    """
    gain = _as_gain(gain)
    if orthogonal:
        base = equatorial_lossy_matrix(gain, math.pi - phi, ch, cutoff)
        t = base.tensor().transpose(1, 0, 3, 2)
        n = cutoff * cutoff
        return DensityMatrix(t.reshape(n, n), (cutoff, cutoff), base.trace_deficit, phi_basis(phi))
    G, R, T = gain.Gamma, ch.R, ch.T
    n = np.arange(cutoff)
    A = np.array([[_photon_factor(i, k, G, R, T) for k in n] for i in n])
    B = np.array([[_vacuum_factor(j, q, G, R, T) for q in n] for j in n])
    A = A * np.exp(_envelope(1, gain, R) * (n[:, None] + n[None, :] + 3))
    B = B * np.exp(_envelope(1, gain, R) * (n[:, None] + n[None, :] + 1))
    A = A * np.exp(1j * phi * (n[None, :] - n[:, None]) / 2) / gain.C**3
    B = B * np.exp(1j * phi * (n[:, None] - n[None, :]) / 2) / gain.C
    rho = np.einsum("ik,jq->ijkq", A, B).reshape(cutoff**2, cutoff**2)
    deficit = max(0.0, 1.0 - float(np.real(np.trace(rho))))
    return DensityMatrix(rho, (cutoff, cutoff), deficit, phi_basis(phi))


# --------------------------------------------------------------------------
# amplified H / V photon
# --------------------------------------------------------------------------


def _hv_terms(i: int, j: int, k: int, gain: GainParams, R: float, T: float, p: np.ndarray) -> np.ndarray:
    l = k + j - i
    G = gain.Gamma
    with np.errstate(divide="ignore", invalid="ignore"):
        lb = (
            gammaln(p + i + 1.0) - gammaln(i + 1.0) - gammaln(p + 1.0)
            + gammaln(p + i) - gammaln(j + 1.0) - gammaln(p + i - j)
            + gammaln(p + k + 1.0) - gammaln(k + 1.0) - gammaln(p + 1.0)
            + gammaln(p + k) - gammaln(l + 1.0) - gammaln(p + k - l)
        )
        logt = (
            (2 * p + i + k - 2) * math.log(G)
            - 4 * math.log(gain.C)
            + 0.5 * np.log((p + i) * (p + k))
            + (k + j) * math.log(T)
            + (2 * p + i - 1 - j) * math.log(R)
            + 0.5 * lb
        )
    return np.where(np.isfinite(logt), np.exp(logt), 0.0)


def hv_lossy_element(i: int, j: int, k: int, gain, ch: LossChannel, p_max: int | None = None) -> complex:
    r"""``⟨iH, jV|ρ_T^H|kH, (k+j-i)V⟩`` as a sum over reflected H photons ``p``.

    .. math:: \bar γ_{ijk;p} = \frac{Γ^{2p+i+k-2}}{C^4}\sqrt{p+i}\sqrt{p+k}\,
              T^{k+j} R^{2p+i-1-j}
              \Big[\tbinom{p+i}{i}\tbinom{p+i-1}{j}\tbinom{p+k}{k}\tbinom{p+k-1}{k+j-i}\Big]^{1/2}

    summed over ``p ≥ max(0, j+1-i)``.  Elements with a negative bra index
    are zero.
    """
    gain = _as_gain(gain)
    l = k + j - i
    if min(i, j, k) < 0 or l < 0:
        return 0j
    R, T = ch.R, ch.T
    p0 = max(0, j + 1 - i)
    # edge cases where logs of zero appear
    if T == 0:
        return complex(1.0 if (i, j, k) == (0, 0, 0) else 0.0)
    if R == 0 or gain.Gamma == 0:
        # only the p that makes every power vanish survives; evaluate directly
        return complex(sum(_hv_direct(i, j, k, p, gain, R, T) for p in range(p0, p0 + 3)))
    if p_max is None:
        x = (gain.Gamma * R) ** 2
        p_max = p0 + int(math.ceil((-40.0) / math.log(x))) + 20 if x > 0 else p0 + 1
    p = np.arange(p0, p_max + 1, dtype=float)
    return complex(math.fsum(_hv_terms(i, j, k, gain, R, T, p)))


def _hv_direct(i, j, k, p, gain, R, T):
    from math import comb

    l = k + j - i
    if p + i - 1 < 0 or p + k - 1 < 0 or 2 * p + i - 1 - j < 0:
        return 0.0
    G = gain.Gamma
    e = 2 * p + i + k - 2
    if e < 0:
        return 0.0
    b = comb(p + i, i) * comb(p + i - 1, j) * comb(p + k, k) * comb(p + k - 1, l)
    return (G**e / gain.C**4 * math.sqrt((p + i) * (p + k)) * T ** (k + j)
            * R ** (2 * p + i - 1 - j) * math.sqrt(b))


def hv_lossy_matrix(gain, ch: LossChannel, cutoff: int = 30, seed: str = "H") -> DensityMatrix:
    """Assemble ``ρ_T^H`` (or ``ρ_T^V`` by mode swap) on a photon block."""
    gain = _as_gain(gain)
    t = np.zeros((cutoff,) * 4, dtype=complex)
    for i in range(cutoff):
        for j in range(cutoff):
            for k in range(cutoff):
                l = k + j - i
                if 0 <= l < cutoff:
                    t[i, j, k, l] = hv_lossy_element(i, j, k, gain, ch)
    if seed == "V":
        t = t.transpose(1, 0, 3, 2)
    elif seed != "H":
        raise ConfigError("seed must be 'H' or 'V'")
    n = cutoff * cutoff
    rho = t.reshape(n, n)
    deficit = max(0.0, 1.0 - float(np.real(np.trace(rho))))
    return DensityMatrix(rho, (cutoff, cutoff), deficit, HV)
