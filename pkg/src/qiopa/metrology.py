r"""Distinguishability of macrostates: fidelity, Bures distance and the O-Filter.

The Bures distance :math:`D = \sqrt{1-\sqrt{F}}` is built on the Jozsa
fidelity :math:`F(ρ,σ) = (\mathrm{Tr}\sqrt{\sqrt ρ\,σ\sqrt ρ})^2`.  Matrix
square roots go through Hermitian eigendecompositions, clamping tiny negative
eigenvalues produced by truncation.  States that share an exact block
structure (photon-number sectors, parity) are handled block by block so that
every block is resolved at its own scale.

The O-Filter is a photon-counting POVM on two orthogonal polarization modes
that keeps only events whose count difference exceeds a threshold ``k``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .channel import LossChannel
from .decoherence import css_bures_analytic, equatorial_lossy_matrix, hv_lossy_matrix
from .errors import ConfigError, DegenerateFilterError, InvalidStateError
from .fock import DensityMatrix, _as_gain

__all__ = [
    "CLAMP_TOL",
    "INVALID_TOL",
    "NOISE_TOL",
    "OFilterConfig",
    "BuresCurve",
    "fidelity",
    "bures_distance",
    "bures_from_fidelity",
    "css_universal_curve",
    "css_bures_analytic",
    "qiopa_mean_photons",
    "macroqubit_pair",
    "macroqubit_bures",
    "macroqubit_curve",
    "css_curve",
    "ofilter_povm",
    "ofilter_mask",
    "ofilter_project",
    "ofilter_success_probability",
    "equatorial_success_probability",
]

#: eigenvalues above ``-CLAMP_TOL`` are treated as truncation noise and set to 0
CLAMP_TOL = 1e-10
#: eigenvalues below ``-INVALID_TOL`` mean the input is not a state
INVALID_TOL = 1e-6
#: eigenvalues below ``NOISE_TOL`` times the largest one are round-off, not support
NOISE_TOL = 1e-14


@dataclass(frozen=True)
class OFilterConfig:
    """Threshold ``k`` of the O-Filter: conclusive iff ``|n - m| > k``."""

    k: int

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 0:
            raise ConfigError("O-Filter threshold must be a non-negative integer")


@dataclass(frozen=True)
class BuresCurve:
    """Samples ``(x = R⟨n⟩, D)`` of a decoherence curve."""

    x: np.ndarray
    D: np.ndarray
    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if np.shape(self.x) != np.shape(self.D):
            raise ConfigError("x and D samples differ in length")


# --------------------------------------------------------------------------
# fidelity
# --------------------------------------------------------------------------


def _as_matrix(rho) -> np.ndarray:
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ConfigError("density matrix must be square")
    return m


def _clamped_eigh(m: np.ndarray, what: str):
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    scale = max(1.0, float(np.max(np.abs(w))) if w.size else 1.0)
    if w.size and w.min() < -INVALID_TOL * scale:
        raise InvalidStateError(f"{what} has eigenvalue {w.min():.3e} below -{INVALID_TOL:g}")
    w = np.where(w < CLAMP_TOL, np.where(w < -CLAMP_TOL, 0.0, np.maximum(w, 0.0)), w)
    # each spurious eigenvalue λ ~ 1e-17 would add √λ ~ 3e-9 to the trace norm
    if w.size:
        w = np.where(w < NOISE_TOL * w.max(), 0.0, w)
    return w, v


def _common_blocks(a: np.ndarray, b: np.ndarray) -> list[np.ndarray]:
    """Index sets of the blocks on which both matrices are block-diagonal."""
    pattern = csr_matrix((a != 0) | (b != 0))
    n_blocks, labels = connected_components(pattern, directed=False)
    if n_blocks == 1:
        return [np.arange(a.shape[0])]
    order = np.argsort(labels, kind="stable")
    cuts = np.flatnonzero(np.diff(labels[order])) + 1
    return np.split(order, cuts)


def _trace_sqrt_sandwich(a: np.ndarray, b: np.ndarray) -> float:
    r""":math:`\mathrm{Tr}\sqrt{\sqrt a\, b \sqrt a}` for one block."""
    w, v = _clamped_eigh(a, "first state")
    keep = w > 0
    if not np.any(keep):
        return 0.0
    # √a b √a restricted to the support of a
    vs = v[:, keep] * np.sqrt(w[keep])
    lam, _ = _clamped_eigh(vs.conj().T @ b @ vs, "sandwiched operator")
    return float(np.sum(np.sqrt(lam)))


def fidelity(rho, sigma) -> float:
    r"""Jozsa fidelity :math:`(\mathrm{Tr}\sqrt{\sqrt ρ σ \sqrt ρ})^2`, clipped to [0, 1]."""
    a = _as_matrix(rho)
    b = _as_matrix(sigma)
    if a.shape != b.shape:
        raise ConfigError(f"truncations differ: {a.shape} vs {b.shape}")
    total = math.fsum(_trace_sqrt_sandwich(a[np.ix_(ix, ix)], b[np.ix_(ix, ix)])
                      for ix in _common_blocks(a, b))
    return min(1.0, max(0.0, total * total))


def bures_from_fidelity(F: float) -> float:
    return math.sqrt(max(0.0, 1.0 - math.sqrt(min(1.0, max(0.0, F)))))


def bures_distance(rho, sigma) -> float:
    r"""Bures distance :math:`\sqrt{1-\sqrt{F(ρ,σ)}}`."""
    return bures_from_fidelity(fidelity(rho, sigma))


# --------------------------------------------------------------------------
# cat-state reference curve
# --------------------------------------------------------------------------


def css_universal_curve(x_eff) -> np.ndarray:
    r"""Superposition distance as a function of ``x_eff = R|α|²sin²φ`` alone:
    :math:`D = \sqrt{1-\sqrt{1-e^{-4x_{eff}}}}`."""
    x = np.asarray(x_eff, dtype=float)
    if np.any(x < 0):
        raise ConfigError("x must be non-negative")
    inner = np.sqrt(-np.expm1(-4 * x))
    return np.sqrt(np.maximum(0.0, 1.0 - inner))


def css_curve(alpha: float, phi: float, x) -> BuresCurve:
    """Cat-state superposition distances at ``x = R α²`` (``0 ≤ x ≤ α²``)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if alpha <= 0:
        raise ConfigError("alpha must be positive")
    R = x / alpha**2
    if np.any((R < 0) | (R > 1 + 1e-12)):
        raise ConfigError("x must lie in [0, alpha^2]")
    if alpha**2 * math.sin(phi) ** 2 < 1:
        warnings.warn("cat components are not quasi-orthogonal; the two-level form is approximate",
                      RuntimeWarning, stacklevel=2)
    D = np.array([css_bures_analytic(alpha, phi, LossChannel(min(1.0, r)))[1] for r in R])
    return BuresCurve(x, D, "css", {"alpha": alpha, "phi": phi})


# --------------------------------------------------------------------------
# amplified macro-qubits
# --------------------------------------------------------------------------


def qiopa_mean_photons(gain) -> float:
    """Total mean photon number ``4m̄ + 1`` of an amplified single photon."""
    return 4 * _as_gain(gain).mbar + 1


def macroqubit_pair(gain, ch: LossChannel, basis: Literal["equatorial", "HV"] = "equatorial",
                    phi: float = 0.0, cutoff: int = 30) -> tuple[DensityMatrix, DensityMatrix]:
    """Lossy orthogonal pair: ``(ρ^φ, ρ^{φ⊥})`` in the φ basis or ``(ρ^H, ρ^V)`` in H/V."""
    if basis == "equatorial":
        return (equatorial_lossy_matrix(gain, phi, ch, cutoff),
                equatorial_lossy_matrix(gain, phi, ch, cutoff, orthogonal=True))
    if basis == "HV":
        return hv_lossy_matrix(gain, ch, cutoff, "H"), hv_lossy_matrix(gain, ch, cutoff, "V")
    raise ConfigError(f"basis must be 'equatorial' or 'HV', got {basis!r}")


def _mode_factors(gain, ch: LossChannel, phi: float, cutoff: int):
    """Single-mode factors ``(A, B)`` with ``ρ^φ = A ⊗ B`` and ``ρ^{φ⊥} = B' ⊗ A'``."""
    rp = equatorial_lossy_matrix(gain, phi, ch, cutoff)
    rq = equatorial_lossy_matrix(gain, phi, ch, cutoff, orthogonal=True)
    return _split_product(rp), _split_product(rq)


def _split_product(rho: DensityMatrix):
    t = rho.tensor()
    A = np.einsum("ijkj->ik", t)
    B = np.einsum("ijiq->jq", t)
    tr = np.trace(A).real
    return A, B / tr


def macroqubit_bures(gain, ch: LossChannel, basis: Literal["equatorial", "HV"] = "equatorial",
                     filter: OFilterConfig | int | None = None, phi: float = 0.0,
                     cutoff: int = 30) -> float:
    """Bures distance between the two lossy orthogonal macro-qubits.

    With ``filter`` set, both states are projected onto the conclusive
    O-Filter outcomes (counted in the basis of the pair) and renormalized.
    """
    g = _as_gain(gain)
    if g.g > 1.5:
        raise ConfigError("macroqubit_bures supports g <= 1.5")
    if filter is not None and not isinstance(filter, OFilterConfig):
        filter = OFilterConfig(int(filter))
    if filter is None and basis == "equatorial":
        (A, B), (Bp, Ap) = _mode_factors(g, ch, phi, cutoff)
        return bures_from_fidelity(fidelity(A, Bp) * fidelity(B, Ap))
    rho, sigma = macroqubit_pair(g, ch, basis, phi, cutoff)
    if filter is not None:
        rho = ofilter_project(rho, filter.k)
        sigma = ofilter_project(sigma, filter.k)
    return bures_distance(rho, sigma)


def macroqubit_curve(gain, x, basis: Literal["equatorial", "HV"] = "equatorial",
                     filter: OFilterConfig | int | None = None, cutoff: int = 30) -> BuresCurve:
    """``D`` sampled at ``x = R⟨n⟩`` with ``⟨n⟩ = 4m̄ + 1``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = qiopa_mean_photons(gain)
    if np.any((x < 0) | (x > n * (1 + 1e-12))):
        raise ConfigError(f"x must lie in [0, <n>] = [0, {n:.6g}]")
    D = np.array([macroqubit_bures(gain, LossChannel(min(1.0, xi / n)), basis, filter, cutoff=cutoff)
                  for xi in x])
    k = None if filter is None else getattr(filter, "k", filter)
    return BuresCurve(x, D, f"qiopa-{basis}", {"g": _as_gain(gain).g, "k": k})


# --------------------------------------------------------------------------
# O-Filter
# --------------------------------------------------------------------------


def ofilter_mask(k: int, dims) -> tuple[np.ndarray, np.ndarray]:
    """Boolean masks over ``(n, m)`` for the ``+1`` and ``-1`` outcomes."""
    k = OFilterConfig(k).k
    na, nb = (dims, dims) if np.ndim(dims) == 0 else dims
    n = np.arange(na)[:, None]
    m = np.arange(nb)[None, :]
    return (n - m) > k, (m - n) > k


def ofilter_povm(k: OFilterConfig | int, cutoff) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Diagonal projectors ``(F⁺, F⁻, F⁰)`` on the ``cutoff²`` two-mode space.

    ``F⁺`` collects ``Π_{n,m}`` with ``n - m > k``, ``F⁻`` those with
    ``m - n > k`` and ``F⁰`` the rest, so ``F⁰(k=0)`` is the ``n = m`` diagonal.
    """
    k = k.k if isinstance(k, OFilterConfig) else k
    plus, minus = ofilter_mask(k, cutoff)
    Fp = np.diag(plus.ravel().astype(float))
    Fm = np.diag(minus.ravel().astype(float))
    return Fp, Fm, np.eye(Fp.shape[0]) - Fp - Fm


def ofilter_success_probability(rho: DensityMatrix, k: OFilterConfig | int) -> float:
    """``Tr[ρ(F⁺ + F⁻)]`` for a two-mode state."""
    k = k.k if isinstance(k, OFilterConfig) else k
    if len(rho.dims) != 2:
        raise ConfigError("the O-Filter acts on two-mode states")
    plus, minus = ofilter_mask(k, rho.dims)
    p = np.real(rho.diagonal()).reshape(rho.dims)
    return float(min(1.0, max(0.0, np.sum(p[plus | minus]))))


def ofilter_project(rho: DensityMatrix, k: OFilterConfig | int) -> DensityMatrix:
    """Project onto the conclusive outcomes and renormalize."""
    k = k.k if isinstance(k, OFilterConfig) else k
    plus, minus = ofilter_mask(k, rho.dims)
    keep = (plus | minus).ravel()
    m = np.where(keep[:, None] & keep[None, :], rho.matrix, 0.0)
    tr = float(np.real(np.trace(m)))
    if tr <= 1e-300:
        raise DegenerateFilterError(f"O-Filter with k={k} leaves no weight")
    return DensityMatrix(m / tr, rho.dims, rho.trace_deficit, rho.basis)


def equatorial_success_probability(gain, ch: LossChannel, k, cutoff: int = 40) -> np.ndarray:
    """O-Filter success probability of the lossy equatorial macro-qubit.

    ``k`` may be an array; only the photon-number distributions of the two
    mode factors are needed.
    """
    rho = equatorial_lossy_matrix(gain, 0.0, ch, cutoff)
    A, B = _split_product(rho)
    pa, pb = np.real(np.diag(A)), np.real(np.diag(B))
    n = np.arange(cutoff)
    diff = (n[:, None] - n[None, :]).ravel()
    joint = np.outer(pa, pb).ravel()
    ks = np.atleast_1d(np.asarray(k))
    out = np.array([joint[np.abs(diff) > kk].sum() for kk in ks])
    return out if np.ndim(k) else float(out[0])
