r"""Photon loss modelled as a beam splitter coupled to an unobserved vacuum mode.

Two independent routes are provided and cross-checked in the tests:

* the operator-sum (Kraus) form
  :math:`M_p = R^{p/2}\,T^{\hat n/2}\,\hat a^p/\sqrt{p!}`, applied to a
  :class:`~qiopa.fock.DensityMatrix`;
* the explicit unitary dilation: every Fock state is expanded through
  :math:`c^\dagger = \sqrt T\,a^\dagger + i\sqrt R\,b^\dagger` with a vacuum
  ancilla ``b`` which is then traced out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import ConfigError
from .fock import DensityMatrix, TwoModeFockState

__all__ = [
    "LossChannel",
    "KrausSet",
    "kraus_operators",
    "kraus_weights",
    "apply_loss_kraus",
    "apply_loss_unitary",
    "apply_loss_adjoint",
    "beam_splitter_amplitudes",
    "photon_distribution",
]


@dataclass(frozen=True)
class LossChannel:
    """Beam-splitter loss with reflectivity ``R``; ``T = 1 - R``."""

    R: float

    def __post_init__(self):
        if not (0.0 <= self.R <= 1.0) or not np.isfinite(self.R):
            raise ConfigError(f"reflectivity must lie in [0, 1], got {self.R!r}")

    @property
    def T(self) -> float:
        return 1.0 - self.R


@dataclass(frozen=True)
class KrausSet:
    operators: tuple[np.ndarray, ...]

    @property
    def p_max(self) -> int:
        return len(self.operators) - 1

    def completeness(self) -> np.ndarray:
        return sum(K.conj().T @ K for K in self.operators)


def kraus_weights(ch: LossChannel, cutoff: int) -> np.ndarray:
    r"""``w[p, m] = √C(m+p, p) R^{p/2} T^{m/2}`` so that ``M_p |m+p⟩ = w[p,m] |m⟩``.

    Entries with ``m + p >= cutoff`` are zero.
    """
    p = np.arange(cutoff)[:, None]
    m = np.arange(cutoff)[None, :]
    valid = (m + p) < cutoff
    log_b = 0.5 * (gammaln(m + p + 1.0) - gammaln(p + 1.0) - gammaln(m + 1.0))
    w = np.exp(log_b) * np.power(ch.R, p / 2.0) * np.power(ch.T, m / 2.0)
    return np.where(valid, w, 0.0)


def kraus_operators(ch: LossChannel, cutoff: int) -> KrausSet:
    """Explicit Kraus matrices ``M_0 … M_{cutoff-1}`` on the truncated space."""
    w = kraus_weights(ch, cutoff)
    ops = []
    for p in range(cutoff):
        K = np.zeros((cutoff, cutoff))
        m = np.arange(cutoff - p)
        K[m, m + p] = w[p, m]
        ops.append(K)
    return KrausSet(tuple(ops))


def _loss_on_axes(t: np.ndarray, ket_axis: int, bra_axis: int, ch: LossChannel) -> np.ndarray:
    """Apply ``Σ_p M_p · M_p†`` on one (ket, bra) axis pair of a tensor."""
    t = np.moveaxis(t, (ket_axis, bra_axis), (0, 1))
    n = t.shape[0]
    if t.shape[1] != n:
        raise ConfigError("ket and bra dimensions differ")
    w = kraus_weights(ch, n)
    out = np.zeros_like(t)
    extra = (None,) * (t.ndim - 2)
    for p in range(n):
        wp = w[p, : n - p]
        if not np.any(wp):
            continue
        out[: n - p, : n - p] += (wp[:, None] * wp[None, :])[(...,) + extra] * t[p:, p:]
    return np.moveaxis(out, (0, 1), (ket_axis, bra_axis))


def apply_loss_kraus(rho: DensityMatrix, ch: LossChannel, mode: int | None = None) -> DensityMatrix:
    """Operator-sum loss on one mode (``mode`` index) or on every mode (``None``)."""
    nmodes = len(rho.dims)
    modes = range(nmodes) if mode is None else [mode]
    t = np.array(rho.tensor())
    for k in modes:
        if not 0 <= k < nmodes:
            raise ConfigError(f"mode index {k} out of range")
        t = _loss_on_axes(t, k, k + nmodes, ch)
    n = int(np.prod(rho.dims))
    return DensityMatrix(t.reshape(n, n), rho.dims, rho.trace_deficit, rho.basis)


def beam_splitter_amplitudes(ch: LossChannel, cutoff: int) -> np.ndarray:
    r"""``B[m, d]``: amplitude of ``|m⟩_out |d⟩_refl`` produced from ``|m+d⟩``.

    :math:`B[m,d] = \sqrt{\binom{m+d}{m}}\,T^{m/2}\,(i\sqrt R)^d`, zero when
    ``m + d >= cutoff``.
    """
    w = kraus_weights(ch, cutoff)  # w[d, m]
    phase = (1j) ** (np.arange(cutoff) % 4)
    return (w * phase[:, None]).T


def apply_loss_unitary(state, ch: LossChannel, keep: tuple[int, ...] | int | None = None) -> DensityMatrix:
    """Beam-splitter dilation of the loss channel for a pure input.

    ``state`` is a :class:`~qiopa.fock.TwoModeFockState` (both modes see the
    same channel) or a 1-D array of single-mode amplitudes.  ``keep`` crops
    the transmitted modes to a low-photon block, which keeps the output small
    when the input needs a large cutoff.
    """
    if isinstance(state, TwoModeFockState):
        amp = state.amplitudes
        deficit = state.deficit
        basis = state.basis
    else:
        amp = np.asarray(state, dtype=complex)
        deficit = max(0.0, 1.0 - float(np.sum(np.abs(amp) ** 2)))
        basis = None
    dims = amp.shape
    if keep is None:
        keep = dims
    keep = tuple(np.broadcast_to(np.atleast_1d(keep), (len(dims),)).astype(int))
    keep = tuple(min(k, d) for k, d in zip(keep, dims))

    if amp.ndim == 1:
        n = dims[0]
        B = beam_splitter_amplitudes(ch, n)
        m = np.arange(keep[0])[:, None]
        d = np.arange(n)[None, :]
        src = m + d
        J = np.where(src < n, amp[np.minimum(src, n - 1)] * B[m, d], 0.0)
        rho = J @ J.conj().T
    elif amp.ndim == 2:
        na, nb = dims
        Ba = beam_splitter_amplitudes(ch, na)
        Bb = beam_splitter_amplitudes(ch, nb)
        m1 = np.arange(keep[0])[:, None, None, None]
        m2 = np.arange(keep[1])[None, :, None, None]
        d1 = np.arange(na)[None, None, :, None]
        d2 = np.arange(nb)[None, None, None, :]
        s1 = m1 + d1
        s2 = m2 + d2
        ok = (s1 < na) & (s2 < nb)
        vals = amp[np.minimum(s1, na - 1), np.minimum(s2, nb - 1)]
        J = np.where(ok, vals * Ba[m1, np.minimum(d1, na - 1)] * Bb[m2, np.minimum(d2, nb - 1)], 0.0)
        J = J.reshape(keep[0] * keep[1], na * nb)
        rho = J @ J.conj().T
    else:
        raise ConfigError("apply_loss_unitary supports one- or two-mode pure states")
    return DensityMatrix(rho, keep, deficit, basis)


def apply_loss_adjoint(op: np.ndarray, ch: LossChannel) -> np.ndarray:
    r"""Heisenberg-picture loss :math:`\sum_p M_p^\dagger O M_p` for a single-mode operator."""
    op = np.asarray(op)
    n = op.shape[0]
    w = kraus_weights(ch, n)
    out = np.zeros_like(op, dtype=np.result_type(op, float))
    for p in range(n):
        wp = w[p, : n - p]
        if not np.any(wp):
            continue
        out[p:, p:] += (wp[:, None] * wp[None, :]) * op[: n - p, : n - p]
    return out


def photon_distribution(rho: DensityMatrix) -> np.ndarray:
    """Photon-number probabilities ``P(n)`` or ``P(n_a, n_b)``."""
    return rho.diagonal()
