r"""Brute-force reference computations in truncated Fock space.

Wigner functions are evaluated with the displaced parity operator,

.. math:: W(α) = \frac{2}{π}\,\mathrm{Tr}\big[ρ\, D(α) Π D^\dagger(α)\big]
               = \frac{2}{π}\,\mathrm{Tr}\big[ρ\, D(2α) Π\big],

which is exact on the truncated space (``ρ`` has no support outside it).
Amplified states are prepared by exponentiating the squeezing generators
numerically, losses by Kraus operators.  Nothing here relies on the closed
forms of :mod:`qiopa.wigner` or :mod:`qiopa.decoherence`.
"""

from __future__ import annotations

import math
import warnings
from functools import lru_cache

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import expm_multiply
from scipy.special import gammaln

from .channel import LossChannel, apply_loss_adjoint
from .errors import ConfigError, NumericalError
from .fock import (
    HV,
    PLUS_MINUS,
    CssParams,
    DensityMatrix,
    TwoModeFockState,
    _as_gain,
    build_css_state,
    change_basis,
)
from .specfun import assoc_laguerre

__all__ = [
    "displacement_matrix",
    "displaced_parity",
    "wigner_numeric_1mode",
    "wigner_numeric_2mode",
    "wigner_lossy_1mode",
    "wigner_lossy_2mode",
    "squeeze_single_mode",
    "squeeze_two_mode",
    "oracle_cutoff",
    "oracle_w_single_mode",
    "oracle_w_collinear",
    "oracle_w_noncollinear",
    "oracle_w_css",
    "integrate_wigner",
]


# --------------------------------------------------------------------------
# displacement and parity
# --------------------------------------------------------------------------


def _displacement_recurrence(alpha: complex, n: int) -> np.ndarray:
    """``D[m, n] = ⟨m|D(α)|n⟩`` from ``a D(α) = D(α)(a + α)``.

    The forward recurrence in ``m`` amplifies rounding errors once the cutoff
    is well beyond ``|α|²``; it serves as an independent cross-check for
    small cutoffs only.
    """
    D = np.zeros((n, n), dtype=complex)
    row = np.empty(n, dtype=complex)
    row[0] = math.exp(-abs(alpha) ** 2 / 2)
    for k in range(1, n):
        row[k] = row[k - 1] * (-np.conj(alpha)) / math.sqrt(k)
    D[0] = row
    sq = np.sqrt(np.arange(n))
    for m in range(n - 1):
        # D[m+1, k] = (√k D[m, k-1] + α D[m, k]) / √(m+1)
        nxt = alpha * D[m]
        nxt[1:] += sq[1:] * D[m, :-1]
        D[m + 1] = nxt / math.sqrt(m + 1)
    return D


def _displacement_laguerre(alpha: complex, n: int) -> np.ndarray:
    r"""Closed form :math:`\sqrt{n!/m!}\,α^{m-n}e^{-|α|^2/2}L_n^{(m-n)}(|α|^2)` for ``m ≥ n``.

    The Laguerre polynomials are generated for every offset ``d = m - n`` at
    once by the three-term recurrence in the degree, which is stable here.
    """
    if alpha == 0:
        return np.eye(n, dtype=complex)
    x = abs(alpha) ** 2
    d = np.arange(n, dtype=float)
    lag = np.empty((n, n))  # lag[j, d] = L_j^{(d)}(x)
    lag[0] = 1.0
    if n > 1:
        lag[1] = 1.0 + d - x
    for j in range(1, n - 1):
        lag[j + 1] = ((2 * j + 1 + d - x) * lag[j] - (j + d) * lag[j - 1]) / (j + 1)
    lo = np.arange(n)[:, None]
    hi = lo + d[None, :].astype(int)
    logpre = 0.5 * (gammaln(lo + 1.0) - gammaln(hi + 1.0)) - x / 2 + d[None, :] * math.log(abs(alpha))
    mag = np.exp(logpre) * lag  # mag[lo, d] = |D[lo + d, lo]|, up to sign
    D = np.zeros((n, n), dtype=complex)
    ph = alpha / abs(alpha)
    for off in range(n):
        j = np.arange(n - off)
        below = mag[j, off] * ph**off  # D[j+off, j]
        D[j + off, j] = below
        if off:
            D[j, j + off] = mag[j, off] * (-np.conj(ph)) ** off
    return D


@lru_cache(maxsize=256)
def _displacement_cached(re: float, im: float, n: int, method: str) -> np.ndarray:
    alpha = complex(re, im)
    if method == "recurrence":
        D = _displacement_recurrence(alpha, n)
    elif method == "laguerre":
        D = _displacement_laguerre(alpha, n)
    else:
        raise ConfigError(f"unknown displacement method {method!r}")
    D.setflags(write=False)
    return D


def displacement_matrix(alpha: complex, cutoff: int, method: str = "laguerre") -> np.ndarray:
    """Matrix elements of ``D(α) = exp(α a† - α* a)`` on ``cutoff`` levels (cached)."""
    alpha = complex(alpha)
    return _displacement_cached(alpha.real, alpha.imag, int(cutoff), method)


def displaced_parity(alpha: complex, cutoff: int) -> np.ndarray:
    """``D(α) Π D†(α) = D(2α) Π`` on the truncated space."""
    D = displacement_matrix(2 * complex(alpha), cutoff)
    return D * ((-1.0) ** np.arange(cutoff))[None, :]


# --------------------------------------------------------------------------
# Wigner evaluation
# --------------------------------------------------------------------------


def wigner_numeric_1mode(rho, alpha: complex) -> float:
    """Single-mode Wigner function from a density matrix or a pure amplitude vector."""
    if isinstance(rho, DensityMatrix):
        if len(rho.dims) != 1:
            raise ConfigError("wigner_numeric_1mode needs a single-mode state")
        mat = rho.matrix
        P = displaced_parity(alpha, mat.shape[0])
        val = np.sum(mat * P.T)
    else:
        v = np.asarray(rho, dtype=complex)
        P = displaced_parity(alpha, v.shape[0])
        val = np.vdot(v, P @ v)
    return float(2 / math.pi * val.real)


def wigner_numeric_2mode(rho, alpha: complex, beta: complex) -> float:
    """Two-mode Wigner function from a density matrix or a pure two-mode state."""
    if isinstance(rho, DensityMatrix):
        if len(rho.dims) != 2:
            raise ConfigError("wigner_numeric_2mode needs a two-mode state")
        na, nb = rho.dims
        Pa = displaced_parity(alpha, na)
        Pb = displaced_parity(beta, nb)
        val = np.einsum("abcd,ca,db->", rho.tensor(), Pa, Pb)
    else:
        A = rho.amplitudes if isinstance(rho, TwoModeFockState) else np.asarray(rho, dtype=complex)
        Pa = displaced_parity(alpha, A.shape[0])
        Pb = displaced_parity(beta, A.shape[1])
        val = np.sum(A.conj() * (Pa @ A @ Pb.T))
    return float((2 / math.pi) ** 2 * val.real)


def wigner_lossy_1mode(amplitudes, ch: LossChannel, alpha: complex) -> float:
    """Wigner function of a pure state sent through loss (Heisenberg-picture parity)."""
    v = np.asarray(amplitudes, dtype=complex)
    P = apply_loss_adjoint(displaced_parity(alpha, v.shape[0]), ch)
    return float(2 / math.pi * np.vdot(v, P @ v).real)


def wigner_lossy_2mode(state, ch: LossChannel, alpha: complex, beta: complex) -> float:
    """Two-mode analogue of :func:`wigner_lossy_1mode`; both modes see ``ch``."""
    A = state.amplitudes if isinstance(state, TwoModeFockState) else np.asarray(state, dtype=complex)
    Pa = apply_loss_adjoint(displaced_parity(alpha, A.shape[0]), ch)
    Pb = apply_loss_adjoint(displaced_parity(beta, A.shape[1]), ch)
    return float((2 / math.pi) ** 2 * np.sum(A.conj() * (Pa @ A @ Pb.T)).real)


# --------------------------------------------------------------------------
# brute-force state preparation
# --------------------------------------------------------------------------


def oracle_cutoff(gain, deficit: float = 1e-13, minimum: int = 40) -> int:
    """Per-mode cutoff generous enough for squeezed seeds with up to a few photons."""
    G2 = _as_gain(gain).Gamma ** 2
    if G2 == 0:
        return minimum
    return max(minimum, int(math.ceil(2 * (math.log(deficit) - 10) / math.log(G2))) + 20)


def squeeze_single_mode(amplitudes, g: float, phase: complex = 1.0) -> np.ndarray:
    r"""Apply :math:`\exp[\tfrac g2(ζ a^{\dagger2} - ζ^* a^2)]` numerically."""
    v = np.asarray(amplitudes, dtype=complex)
    n = v.shape[0]
    k = np.arange(n - 2)
    up = sparse.csr_matrix((np.sqrt((k + 1.0) * (k + 2.0)), (k + 2, k)), shape=(n, n))
    gen = 0.5 * g * (phase * up - np.conj(phase) * up.T)
    return expm_multiply(gen.tocsc(), v)


def squeeze_two_mode(amplitudes, g: float) -> np.ndarray:
    r"""Apply :math:`\exp[g(a^\dagger b^\dagger - a b)]` to a two-mode amplitude array."""
    A = np.asarray(amplitudes, dtype=complex)
    na, nb = A.shape
    ca = sparse.diags(np.sqrt(np.arange(1, na)), -1, shape=(na, na))
    cb = sparse.diags(np.sqrt(np.arange(1, nb)), -1, shape=(nb, nb))
    up = sparse.kron(ca, cb)
    gen = g * (up - up.T)
    return expm_multiply(gen.tocsc(), A.ravel()).reshape(na, nb)


def _fock(n_photons: int, cutoff: int) -> np.ndarray:
    v = np.zeros(cutoff, dtype=complex)
    v[n_photons] = 1.0
    return v


def _check_norm(v, what: str, tol: float = 1e-9):
    norm2 = float(np.sum(np.abs(v) ** 2))
    if abs(norm2 - 1.0) > tol:
        raise NumericalError(f"{what}: truncated norm {norm2:.12f} deviates from 1")


# --------------------------------------------------------------------------
# reference Wigner functions per family
# --------------------------------------------------------------------------


def oracle_w_single_mode(N: int, gain, ch: LossChannel, X: float, Y: float, cutoff: int | None = None) -> float:
    """Squeezed ``|N⟩`` (generator ``(g/2)(a†² - a²)``) after loss, at ``X + iY``."""
    gain = _as_gain(gain)
    n = cutoff or oracle_cutoff(gain) + N
    v = squeeze_single_mode(_fock(N, n), gain.g)
    _check_norm(v, "single-mode oracle state")
    return wigner_lossy_1mode(v, ch, complex(X, Y))


@lru_cache(maxsize=32)
def _collinear_hv_state(N: int, M: int, g: float, cutoff: int) -> np.ndarray:
    seed = np.zeros((cutoff, cutoff), dtype=complex)
    seed[N, M] = 1.0
    hv = change_basis(TwoModeFockState(seed, PLUS_MINUS), HV).amplitudes
    out = squeeze_two_mode(hv, g)
    _check_norm(out, "collinear oracle state")
    out.setflags(write=False)
    return out


def oracle_w_collinear(N: int, M: int, gain, ch: LossChannel, alpha: complex, beta: complex,
                       cutoff: int | None = None) -> float:
    """Collinear amplifier seeded with ``|N+, M-⟩``; ``α`` labels H and ``β`` labels V.

    The seed is rotated to the H/V basis and amplified with the two-mode
    generator ``g(a_H† a_V† - a_H a_V)``.
    """
    gain = _as_gain(gain)
    n = cutoff or oracle_cutoff(gain) + N + M
    A = _collinear_hv_state(N, M, gain.g, n)
    return wigner_lossy_2mode(A, ch, alpha, beta)


@lru_cache(maxsize=32)
def _tms_state(N: int, g: float, cutoff: int) -> np.ndarray:
    seed = np.zeros((cutoff, cutoff), dtype=complex)
    seed[N, 0] = 1.0
    out = squeeze_two_mode(seed, g)
    _check_norm(out, "two-mode squeezed oracle state")
    out.setflags(write=False)
    return out


def oracle_w_noncollinear(N: int, M: int, gain, ch: LossChannel, point, phi: float = 0.0,
                          cutoff: int | None = None) -> float:
    """Non-collinear amplifier with ``|Nφ, Mφ⊥⟩`` injected in spatial mode 1.

    ``point = (α1, α2, β1, β2)`` are the coordinates of modes
    ``(1H, 2V, 1V, 2H)``.  The pairs ``(1φ, 2φ⊥)`` and ``(1φ⊥, 2φ)`` are
    amplified independently with gains ``+g`` and ``-g``; each pair is
    evaluated with the two-mode oracle and the results multiplied.
    """
    gain = _as_gain(gain)
    a1, a2, b1, b2 = (complex(z) for z in point)
    e = np.exp(1j * phi)
    x1 = (a1 + np.conj(e) * b1) / math.sqrt(2)   # 1φ
    x2 = (a2 - e * b2) / math.sqrt(2)            # 2φ⊥
    y1 = (-e * a1 + b1) / math.sqrt(2)           # 1φ⊥
    y2 = (np.conj(e) * a2 + b2) / math.sqrt(2)   # 2φ
    n = cutoff or oracle_cutoff(gain) + max(N, M)
    A = _tms_state(N, gain.g, n)
    B = _tms_state(M, -gain.g, n)
    return wigner_lossy_2mode(A, ch, x1, x2) * wigner_lossy_2mode(B, ch, y1, y2)


def oracle_w_css(params: CssParams, ch: LossChannel, X: float, Y: float, cutoff: int | None = None) -> float:
    """Lossy cat state from its Fock amplitudes and Kraus loss."""
    v = build_css_state(params, cutoff, max_deficit=1e-12)
    return wigner_lossy_1mode(v, ch, complex(X, Y))


# --------------------------------------------------------------------------
# normalization harness
# --------------------------------------------------------------------------


def integrate_wigner(field) -> float:
    """Trapezoid-rule integral of a 2-D :class:`~qiopa.wigner.WignerField`.

    Emits a :class:`RuntimeWarning` when the values at the window edge are
    not negligible or the grid is too coarse to resolve the function.
    """
    x = np.asarray(field.x)
    y = np.asarray(field.y)
    W = np.asarray(field.values)
    if W.shape != (x.size, y.size):
        raise ConfigError("field values do not match the grid")
    total = float(np.trapezoid(np.trapezoid(W, y, axis=1), x))
    edge = max(np.abs(W[0]).max(), np.abs(W[-1]).max(), np.abs(W[:, 0]).max(), np.abs(W[:, -1]).max())
    peak = np.abs(W).max()
    if peak > 0 and edge > 1e-6 * peak:
        warnings.warn(f"Wigner field not contained in the window (edge/peak = {edge / peak:.2e})",
                      RuntimeWarning, stacklevel=2)
    # compare against a half-resolution estimate
    if x.size > 4 and y.size > 4:
        coarse = float(np.trapezoid(np.trapezoid(W[::2, ::2], y[::2], axis=1), x[::2]))
        if abs(coarse - total) > 1e-3:
            warnings.warn(f"under-resolved grid: estimated integration error {abs(coarse - total):.2e}",
                          RuntimeWarning, stacklevel=2)
    return total
