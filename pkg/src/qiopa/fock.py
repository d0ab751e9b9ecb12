r"""Truncated Fock-space states: amplified macrostates, cat states and seeds.

Polarization bases
------------------
All two-mode states carry an explicit :class:`Basis`.  A basis is defined by
the 2x2 matrix ``M`` expressing its creation operators through the H/V ones,
``b_k^dagger = sum_l M[k, l] a_l^dagger`` with ``a = (a_H, a_V)``:

* ``H_V``: the identity;
* ``phi(φ)``: ``a_φ† = (a_H† + e^{iφ} a_V†)/√2`` and
  ``a_φ⊥† = (-e^{-iφ} a_H† + a_V†)/√2``;
* ``plus_minus``: ``phi(0)``, i.e. ``a_±† = (±a_H† + a_V†)/√2`` up to the
  ordering ``(+, -)``.

With this choice the collinear amplifier squeezes mode ``φ`` with phase
``e^{-iφ}`` and mode ``φ⊥`` with phase ``-e^{iφ}`` for every ``φ``; the
single-photon input ``|φ⟩`` is ``cos(φ/2)|1+⟩ + i sin(φ/2)|1-⟩`` up to a global
phase.  :func:`change_basis` converts between bases with the exact Fock-space
unitary; bases are never mixed silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Union

import numpy as np
from scipy.special import gammaln

from .errors import ConfigError, TruncationError

__all__ = [
    "GainParams",
    "Basis",
    "HV",
    "PLUS_MINUS",
    "phi_basis",
    "TwoModeFockState",
    "DensityMatrix",
    "CssParams",
    "SeedSpec",
    "Equatorial",
    "default_cutoff",
    "squeezed_vacuum_amplitudes",
    "squeezed_photon_amplitudes",
    "build_collinear_macrostate",
    "build_equatorial_macrostate",
    "build_hv_macrostate",
    "build_css_state",
    "css_normalization",
    "build_photon_subtracted_seed",
    "mean_photons_and_visibility",
    "partial_trace",
    "change_basis",
    "mode_operator_matrix",
]

DEFAULT_DEFICIT = 1e-8


# --------------------------------------------------------------------------
# parameters
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GainParams:
    """Parametric gain ``g`` with the derived hyperbolic quantities."""

    g: float

    def __post_init__(self):
        if not np.isfinite(self.g) or self.g < 0:
            raise ConfigError(f"gain must be finite and non-negative, got {self.g!r}")

    @property
    def C(self) -> float:
        return math.cosh(self.g)

    @property
    def S(self) -> float:
        return math.sinh(self.g)

    @property
    def Gamma(self) -> float:
        return math.tanh(self.g)

    @property
    def mbar(self) -> float:
        """Mean number of spontaneously emitted photons per mode, ``sinh² g``."""
        return math.sinh(self.g) ** 2


def _as_gain(gain) -> GainParams:
    return gain if isinstance(gain, GainParams) else GainParams(float(gain))


@dataclass(frozen=True)
class CssParams:
    """Coherent-state superposition ``N(|αe^{iφ}⟩ ± |αe^{-iφ}⟩)/√2``."""

    alpha: float
    phi: float
    sign: Literal["+", "-"] = "+"

    def __post_init__(self):
        if not np.isfinite(self.alpha) or self.alpha < 0:
            raise ConfigError("alpha must be finite and non-negative")
        if self.sign not in ("+", "-"):
            raise ConfigError("sign must be '+' or '-'")
        if not np.isfinite(css_normalization(self)):
            raise ConfigError("superposition has zero norm for these parameters")

    @property
    def s(self) -> int:
        return 1 if self.sign == "+" else -1


@dataclass(frozen=True)
class SeedSpec:
    """Fock seed ``|N, M⟩`` injected into the two amplified modes."""

    N: int = 1
    M: int = 0

    def __post_init__(self):
        if self.N < 0 or self.M < 0:
            raise ConfigError("seed photon numbers must be non-negative")


@dataclass(frozen=True)
class Equatorial:
    """Equatorial seed polarization ``(|H⟩ + e^{iφ}|V⟩)/√2``."""

    phi: float


# --------------------------------------------------------------------------
# bases
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Basis:
    kind: Literal["H_V", "plus_minus", "phi"]
    phi: float = 0.0

    def __str__(self):
        return f"phi({self.phi:g})" if self.kind == "phi" else self.kind


HV = Basis("H_V")
PLUS_MINUS = Basis("plus_minus")


def phi_basis(phi: float) -> Basis:
    return Basis("phi", float(phi))


def mode_operator_matrix(basis: Basis) -> np.ndarray:
    """Matrix ``M`` with ``b_k† = Σ_l M[k,l] a_l†`` in terms of ``(a_H†, a_V†)``."""
    if basis.kind == "H_V":
        return np.eye(2, dtype=complex)
    phi = 0.0 if basis.kind == "plus_minus" else basis.phi
    e = np.exp(1j * phi)
    return np.array([[1.0, e], [-np.conj(e), 1.0]], dtype=complex) / math.sqrt(2.0)


# --------------------------------------------------------------------------
# containers
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TwoModeFockState:
    """Pure two-mode state, ``amplitudes[n_a, n_b]`` in the given basis."""

    amplitudes: np.ndarray
    basis: Basis = HV
    deficit: float = 0.0

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=complex)
        if amp.ndim != 2:
            raise ConfigError("two-mode amplitudes must be a 2-D array")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @property
    def cutoff(self) -> tuple[int, int]:
        return self.amplitudes.shape

    @property
    def norm2(self) -> float:
        return math.fsum(np.abs(self.amplitudes.ravel()) ** 2)

    def density_matrix(self) -> "DensityMatrix":
        v = self.amplitudes.ravel()
        return DensityMatrix(np.outer(v, v.conj()), self.cutoff, self.deficit)

    def photon_numbers(self) -> tuple[float, float]:
        """Mean photon numbers ``(⟨n_a⟩, ⟨n_b⟩)``."""
        p = np.abs(self.amplitudes) ** 2
        na = np.arange(p.shape[0])
        nb = np.arange(p.shape[1])
        return float(na @ p.sum(axis=1)), float(p.sum(axis=0) @ nb)

    def inner(self, other: "TwoModeFockState") -> complex:
        if self.basis != other.basis:
            raise ConfigError(f"cannot compare states in bases {self.basis} and {other.basis}")
        na = min(self.cutoff[0], other.cutoff[0])
        nb = min(self.cutoff[1], other.cutoff[1])
        a = self.amplitudes[:na, :nb]
        b = other.amplitudes[:na, :nb]
        return complex(np.vdot(a, b))


@dataclass(frozen=True)
class DensityMatrix:
    """Density matrix over a flattened (row-major) product Fock basis.

    ``dims`` is ``(n,)`` for one mode or ``(n_a, n_b)`` for two modes.
    """

    matrix: np.ndarray
    dims: tuple[int, ...]
    trace_deficit: float = 0.0
    basis: Basis | None = field(default=None, compare=False)

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        dims = tuple(int(d) for d in np.atleast_1d(self.dims))
        if mat.shape != (int(np.prod(dims)),) * 2:
            raise ConfigError(f"matrix shape {mat.shape} inconsistent with dims {dims}")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_pure(cls, amplitudes, deficit: float = 0.0, basis: Basis | None = None):
        amp = np.asarray(amplitudes, dtype=complex)
        v = amp.ravel()
        return cls(np.outer(v, v.conj()), amp.shape, deficit, basis)

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def tensor(self) -> np.ndarray:
        """View with one ket index and one bra index per mode."""
        return self.matrix.reshape(self.dims + self.dims)

    def diagonal(self) -> np.ndarray:
        """Photon-number distribution, shaped like ``dims``."""
        return np.real(np.diag(self.matrix)).reshape(self.dims)

    def crop(self, dims) -> "DensityMatrix":
        """Restrict to the low-photon block ``dims`` (no renormalization)."""
        dims = tuple(dims)
        t = self.tensor()
        idx = tuple(slice(0, d) for d in dims) * 2
        sub = t[idx]
        n = int(np.prod(dims))
        return DensityMatrix(sub.reshape(n, n), dims, self.trace_deficit, self.basis)


# --------------------------------------------------------------------------
# single-mode squeezed amplitudes (log-scaled)
# --------------------------------------------------------------------------


def _squeeze_series(gain: GainParams, cutoff: int, odd: bool, phase: complex) -> np.ndarray:
    r"""Fock amplitudes of ``exp[(g/2)(ζ a†² - ζ* a²)]|0 or 1⟩``, ``|ζ| = 1``.

    Vacuum: :math:`(ζΓ/2)^j \sqrt{(2j)!}/j! / \sqrt{C}` on ``|2j⟩``;
    single photon: :math:`(ζΓ/2)^i \sqrt{(2i+1)!}/i! / C^{3/2}` on ``|2i+1⟩``.
    """
    out = np.zeros(cutoff, dtype=complex)
    start = 1 if odd else 0
    n = np.arange(start, cutoff, 2)
    if n.size == 0:
        return out
    j = (n - start) // 2
    G = gain.Gamma
    log_c = 0.5 * gammaln(n + 1.0) - gammaln(j + 1.0) - (1.5 if odd else 0.5) * math.log(gain.C)
    if G == 0.0:
        mag = np.where(j == 0, np.exp(log_c), 0.0)
    else:
        mag = np.exp(log_c + j * math.log(G / 2.0))
    out[n] = mag * phase**j
    return out


def squeezed_vacuum_amplitudes(gain, cutoff: int, phase: complex = 1.0) -> np.ndarray:
    return _squeeze_series(_as_gain(gain), cutoff, False, phase)


def squeezed_photon_amplitudes(gain, cutoff: int, phase: complex = 1.0) -> np.ndarray:
    return _squeeze_series(_as_gain(gain), cutoff, True, phase)


# --------------------------------------------------------------------------
# cutoffs
# --------------------------------------------------------------------------


def default_cutoff(gain, q: float = 12.0) -> int:
    """Heuristic per-mode cutoff ``⌈q·m̄ + 25⌉``."""
    return int(math.ceil(q * _as_gain(gain).mbar + 25))


def _escalated_cutoff(gain: GainParams, deficit: float, current: int) -> int:
    # tail of a squeezed series decays roughly as Γ^(2j) * j^(3/2)
    G2 = gain.Gamma**2
    if G2 == 0.0:
        return current
    j = (math.log(deficit) - 8.0) / math.log(G2)
    return max(2 * current, int(math.ceil(2 * j)) + 10)


def _with_cutoff(build, gain: GainParams, cutoff, max_deficit):
    """Call ``build(cutoff)`` with automatic cutoff escalation.

    ``build`` returns ``(result, deficit)``.  With an explicit ``cutoff`` no
    escalation happens and a deficit above ``max_deficit`` raises.
    """
    if cutoff is not None:
        result, deficit = build(int(cutoff))
        if max_deficit is not None and deficit > max_deficit:
            raise TruncationError(
                f"cutoff {cutoff} leaves truncation deficit {deficit:.3e} > {max_deficit:.1e}",
                deficit,
            )
        return result
    target = DEFAULT_DEFICIT if max_deficit is None else max_deficit
    n = default_cutoff(gain)
    result, deficit = build(n)
    if deficit <= target:
        return result
    n = _escalated_cutoff(gain, target, n)
    result, deficit = build(n)
    if deficit > target:
        raise TruncationError(
            f"escalated cutoff {n} still leaves deficit {deficit:.3e} > {target:.1e}", deficit
        )
    return result


def _deficit(amplitudes: np.ndarray) -> float:
    return max(0.0, 1.0 - math.fsum(np.abs(np.ravel(amplitudes)) ** 2))


# --------------------------------------------------------------------------
# amplified macrostates
# --------------------------------------------------------------------------


def _phi_product(gain: GainParams, phi: float, n: int, orthogonal: bool) -> np.ndarray:
    z_phi = np.exp(-1j * phi)
    z_perp = -np.exp(1j * phi)
    if not orthogonal:
        a = squeezed_photon_amplitudes(gain, n, z_phi)
        b = squeezed_vacuum_amplitudes(gain, n, z_perp)
    else:
        a = squeezed_vacuum_amplitudes(gain, n, z_phi)
        b = squeezed_photon_amplitudes(gain, n, z_perp)
    return np.outer(a, b)


def build_equatorial_macrostate(
    gain, phi: float, orthogonal: bool = False, cutoff: int | None = None,
    max_deficit: float | None = DEFAULT_DEFICIT,
) -> TwoModeFockState:
    r"""Amplified equatorial qubit written in its own ``(φ, φ⊥)`` basis.

    For ``orthogonal=False`` this is the amplified ``|φ⟩`` photon,

    .. math:: \frac{1}{C^2}\sum_{i,j} \Big(\frac{e^{-iφ}Γ}{2}\Big)^i
              \Big(\frac{-e^{iφ}Γ}{2}\Big)^j
              \frac{\sqrt{(2i+1)!}\sqrt{(2j)!}}{i!\,j!}\,|2i+1, 2j⟩ ;

    ``orthogonal=True`` gives the amplified ``|φ⊥⟩`` photon (odd photon
    numbers in the second mode) in the same basis.
    """
    gain = _as_gain(gain)

    def build(n):
        amp = _phi_product(gain, phi, n, orthogonal)
        d = _deficit(amp)
        return TwoModeFockState(amp, phi_basis(phi), d), d

    return _with_cutoff(build, gain, cutoff, max_deficit)


def build_collinear_macrostate(
    gain, seed: Union[Literal["plus", "minus"], Equatorial], cutoff: int | None = None,
    max_deficit: float | None = DEFAULT_DEFICIT,
) -> TwoModeFockState:
    r"""Collinear amplifier output in the ``±`` basis.

    ``plus`` is :math:`|Φ^+⟩` (odd photons in ``+``, even in ``-``), ``minus``
    the mirrored :math:`|Φ^-⟩`, and ``Equatorial(φ)`` the superposition
    :math:`\cos(φ/2)|Φ^+⟩ + i\sin(φ/2)|Φ^-⟩`.
    """
    gain = _as_gain(gain)

    def build(n):
        plus = _phi_product(gain, 0.0, n, False)
        minus = _phi_product(gain, 0.0, n, True)
        if seed == "plus":
            amp = plus
        elif seed == "minus":
            amp = minus
        elif isinstance(seed, Equatorial):
            amp = math.cos(seed.phi / 2) * plus + 1j * math.sin(seed.phi / 2) * minus
        else:
            raise ConfigError(f"unknown collinear seed {seed!r}")
        d = _deficit(amp)
        return TwoModeFockState(amp, PLUS_MINUS, d), d

    return _with_cutoff(build, gain, cutoff, max_deficit)


def build_hv_macrostate(
    gain, seed: Literal["H", "V"], cutoff: int | None = None,
    max_deficit: float | None = DEFAULT_DEFICIT,
) -> TwoModeFockState:
    r"""Amplified ``|H⟩`` or ``|V⟩`` photon:
    :math:`\sum_n Γ^n\sqrt{n+1}/C^2\,|n+1, n⟩` (modes swapped for ``V``)."""
    gain = _as_gain(gain)
    if seed not in ("H", "V"):
        raise ConfigError(f"unknown H/V seed {seed!r}")

    def build(n):
        amp = np.zeros((n, n), dtype=complex)
        k = np.arange(n - 1)
        G = gain.Gamma
        log_c = 0.5 * np.log(k + 1.0) - 2.0 * math.log(gain.C)
        vals = np.exp(log_c + (k * math.log(G) if G > 0 else np.where(k == 0, 0.0, -np.inf)))
        if seed == "H":
            amp[k + 1, k] = vals
        else:
            amp[k, k + 1] = vals
        d = _deficit(amp)
        return TwoModeFockState(amp, HV, d), d

    return _with_cutoff(build, gain, cutoff, max_deficit)


def mean_photons_and_visibility(gain, phi: float) -> tuple[float, float, float]:
    """Closed-form ``(⟨n₊⟩, ⟨n₋⟩, V)`` for the amplified equatorial photon."""
    m = _as_gain(gain).mbar
    n_plus = m + (2 * m + 1) * math.cos(phi / 2) ** 2
    n_minus = m + (2 * m + 1) * math.sin(phi / 2) ** 2
    return n_plus, n_minus, (2 * m + 1) / (4 * m + 1)


# --------------------------------------------------------------------------
# single-mode states
# --------------------------------------------------------------------------


def css_normalization(params: CssParams) -> float:
    r""":math:`N_± = [1 ± e^{-2α^2\sin^2φ}\cos(α^2\sin 2φ)]^{-1/2}`."""
    a2 = params.alpha**2
    val = 1.0 + params.s * math.exp(-2 * a2 * math.sin(params.phi) ** 2) * math.cos(
        a2 * math.sin(2 * params.phi)
    )
    return math.inf if val <= 1e-300 else 1.0 / math.sqrt(val)


def build_css_state(params: CssParams, cutoff: int | None = None,
                    max_deficit: float | None = DEFAULT_DEFICIT) -> np.ndarray:
    """Fock amplitudes of ``N(|αe^{iφ}⟩ ± |αe^{-iφ}⟩)/√2``."""
    a = params.alpha
    min_cut = int(math.ceil(a * a + 10 * a + 20))
    n = min_cut if cutoff is None else int(cutoff)
    k = np.arange(n)
    if a == 0:
        log_mag = np.where(k == 0, 0.0, -np.inf)
    else:
        log_mag = -a * a / 2 + k * math.log(a) - 0.5 * gammaln(k + 1.0)
    comb = np.exp(1j * k * params.phi) + params.s * np.exp(-1j * k * params.phi)
    amp = css_normalization(params) / math.sqrt(2.0) * np.exp(log_mag) * comb
    d = _deficit(amp)
    if max_deficit is not None and d > max_deficit:
        raise TruncationError(f"cutoff {n} leaves deficit {d:.3e}", d)
    return amp


def build_photon_subtracted_seed(p: int, s: float, theta: float, cutoff: int | None = None) -> np.ndarray:
    """Normalized ``Σ_k p!(-1)^k/(2^k k! √((p-2k)!)) (e^{iθ} sinh s cosh s)^k |p-2k⟩``."""
    if p < 0:
        raise ConfigError("p must be non-negative")
    n = p + 1 if cutoff is None else int(cutoff)
    if n <= p:
        raise ConfigError("cutoff must exceed p")
    amp = np.zeros(n, dtype=complex)
    z = np.exp(1j * theta) * math.sinh(s) * math.cosh(s)
    for k in range(p // 2 + 1):
        coef = math.exp(math.lgamma(p + 1) - k * math.log(2) - math.lgamma(k + 1)
                        - 0.5 * math.lgamma(p - 2 * k + 1))
        amp[p - 2 * k] = (-1) ** k * coef * z**k
    return amp / np.linalg.norm(amp)


# --------------------------------------------------------------------------
# operations
# --------------------------------------------------------------------------


def partial_trace(rho: DensityMatrix, keep: Literal["a", "b"]) -> DensityMatrix:
    """Reduced single-mode state of a two-mode density matrix."""
    if len(rho.dims) != 2:
        raise ConfigError("partial_trace needs a two-mode density matrix")
    t = rho.tensor()
    if keep == "a":
        red = np.einsum("ikjk->ij", t)
        dims = (rho.dims[0],)
    elif keep == "b":
        red = np.einsum("kikj->ij", t)
        dims = (rho.dims[1],)
    else:
        raise ConfigError("keep must be 'a' or 'b'")
    return DensityMatrix(red, dims, rho.trace_deficit)


def _block_transforms(W: np.ndarray, n_max: int):
    """Yield, for each total photon number N, the matrix ``T_N[n, p]``.

    ``T_N[n, :]`` are the coefficients of ``|n, N-n⟩`` (old basis) on
    ``|p, N-p⟩`` (new basis) when old creation operators are
    ``b_k† = Σ_l W[k,l] d_l†``.
    """
    T = np.ones((1, 1), dtype=complex)
    yield T
    for N in range(1, n_max + 1):
        new = np.zeros((N + 1, N + 1), dtype=complex)
        sq_p = np.sqrt(np.arange(1, N + 1))  # √(p+1) for d1† on |p, N-1-p⟩
        sq_q = np.sqrt(np.arange(N, 0, -1))  # √(q+1) for d2† on |p, N-1-p⟩

        def create(v, c1, c2):
            out = np.zeros(v.shape[:-1] + (N + 1,), dtype=complex)
            out[..., 1:] += c1 * sq_p * v
            out[..., :-1] += c2 * sq_q * v
            return out

        # rows n >= 1 from |n-1, N-n⟩ by b1†/√n
        new[1:] = create(T, W[0, 0], W[0, 1]) / np.sqrt(np.arange(1, N + 1))[:, None]
        # row n = 0 from |0, N-1⟩ by b2†/√N
        new[0] = create(T[0], W[1, 0], W[1, 1]) / math.sqrt(N)
        T = new
        yield T


def change_basis(state: TwoModeFockState, target: Basis, cutoff: tuple[int, int] | None = None) -> TwoModeFockState:
    """Re-express a pure two-mode state in another polarization basis.

    The passive mode transformation is applied exactly block by block in the
    total photon number; components beyond the output ``cutoff`` (default:
    the input cutoff) are dropped and added to the recorded deficit.
    """
    na, nb = state.cutoff
    oa, ob = cutoff if cutoff is not None else (na, nb)
    W = mode_operator_matrix(state.basis) @ mode_operator_matrix(target).conj().T
    amp = state.amplitudes
    out = np.zeros((oa, ob), dtype=complex)
    n_max = na + nb - 2
    for N, T in enumerate(_block_transforms(W, n_max)):
        n = np.arange(max(0, N - nb + 1), min(N, na - 1) + 1)
        c = amp[n, N - n]
        if not np.any(c):
            continue
        new = c @ T[n]
        p = np.arange(max(0, N - ob + 1), min(N, oa - 1) + 1)
        out[p, N - p] = new[p]
    d = state.deficit + max(0.0, state.norm2 - math.fsum(np.abs(out.ravel()) ** 2))
    return TwoModeFockState(out, target, d)
