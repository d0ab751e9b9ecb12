import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qiopa import oracle
from qiopa.errors import ConfigError, TruncationError
from qiopa.fock import (
    HV,
    PLUS_MINUS,
    CssParams,
    DensityMatrix,
    Equatorial,
    GainParams,
    SeedSpec,
    TwoModeFockState,
    build_collinear_macrostate,
    build_css_state,
    build_equatorial_macrostate,
    build_hv_macrostate,
    build_photon_subtracted_seed,
    change_basis,
    css_normalization,
    default_cutoff,
    mean_photons_and_visibility,
    partial_trace,
    phi_basis,
    squeezed_photon_amplitudes,
    squeezed_vacuum_amplitudes,
)


def _squeezed_seed(phi: float, photon_in_phi: bool, g: float, n: int) -> np.ndarray:
    """Brute force: rotate the seed to H/V, squeeze numerically, rotate back."""
    seed = np.zeros((n, n), dtype=complex)
    seed[(1, 0) if photon_in_phi else (0, 1)] = 1.0
    hv = change_basis(TwoModeFockState(seed, phi_basis(phi)), HV).amplitudes
    out = oracle.squeeze_two_mode(hv, g)
    return change_basis(TwoModeFockState(out, HV), phi_basis(phi)).amplitudes


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------


def test_gain_params():
    p = GainParams(0.8)
    assert p.C == pytest.approx(math.cosh(0.8))
    assert p.Gamma == pytest.approx(math.tanh(0.8))
    assert p.mbar == pytest.approx(math.sinh(0.8) ** 2)
    assert p.C**2 - p.S**2 == pytest.approx(1.0)


@pytest.mark.parametrize("bad", [-0.1, float("nan"), float("inf")])
def test_gain_rejects_invalid(bad):
    with pytest.raises(ConfigError):
        GainParams(bad)


def test_seed_and_css_validation():
    with pytest.raises(ConfigError):
        SeedSpec(-1, 0)
    with pytest.raises(ConfigError):
        CssParams(-1.0, 0.3)
    with pytest.raises(ConfigError):
        CssParams(1.0, 0.3, "x")
    # the odd cat of zero amplitude does not exist
    with pytest.raises(ConfigError):
        CssParams(0.0, 0.3, "-")


# ---------------------------------------------------------------------------
# squeezed series
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("g", [0.0, 0.3, 1.0])
@pytest.mark.parametrize("phase", [1.0, -1.0, np.exp(0.7j)])
def test_squeezed_series_matches_numerical_exponential(g, phase):
    n, pad = 120, 400  # the numerical exponential is exact well inside its space
    vac = np.zeros(pad)
    vac[0] = 1
    one = np.zeros(pad)
    one[1] = 1
    np.testing.assert_allclose(squeezed_vacuum_amplitudes(g, n, phase),
                               oracle.squeeze_single_mode(vac, g, phase)[:n], atol=1e-12)
    np.testing.assert_allclose(squeezed_photon_amplitudes(g, n, phase),
                               oracle.squeeze_single_mode(one, g, phase)[:n], atol=1e-12)


def test_squeezed_series_large_gain_is_finite():
    amp = squeezed_vacuum_amplitudes(3.0, 3000)
    assert np.all(np.isfinite(amp))
    assert np.sum(np.abs(amp) ** 2) == pytest.approx(1.0, abs=1e-6)


# ---------------------------------------------------------------------------
# macrostates
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("phi", [0.0, 0.9, math.pi / 2, 2.5])
@pytest.mark.parametrize("orthogonal", [False, True])
def test_equatorial_macrostate_matches_brute_force(phi, orthogonal):
    n = 70
    g = 0.6
    closed = build_equatorial_macrostate(g, phi, orthogonal=orthogonal, cutoff=n, max_deficit=None)
    brute = _squeezed_seed(phi, not orthogonal, g, n)
    np.testing.assert_allclose(closed.amplitudes, brute, atol=1e-10)


def test_hv_macrostate_matches_brute_force():
    n = 70
    seed = np.zeros((n, n))
    seed[1, 0] = 1
    closed = build_hv_macrostate(0.7, "H", cutoff=n, max_deficit=None)
    np.testing.assert_allclose(closed.amplitudes, oracle.squeeze_two_mode(seed, 0.7), atol=1e-12)
    v = build_hv_macrostate(0.7, "V", cutoff=n, max_deficit=None)
    np.testing.assert_allclose(v.amplitudes, closed.amplitudes.T, atol=0)


@pytest.mark.parametrize("phi", [0.0, 0.9, 2.0])
def test_collinear_equatorial_superposition(phi):
    """cos(φ/2)Φ⁺ + i sin(φ/2)Φ⁻ is the equatorial macrostate up to e^{-iφ/2}."""
    n = 60
    coll = build_collinear_macrostate(0.6, Equatorial(phi), cutoff=n, max_deficit=None)
    in_phi = change_basis(coll, phi_basis(phi)).amplitudes
    eq = build_equatorial_macrostate(0.6, phi, cutoff=n, max_deficit=None).amplitudes
    np.testing.assert_allclose(in_phi, np.exp(-0.5j * phi) * eq, atol=1e-7)


def test_plus_minus_states_are_orthonormal():
    p = build_collinear_macrostate(0.8, "plus")
    m = build_collinear_macrostate(0.8, "minus")
    assert p.basis == PLUS_MINUS
    assert p.norm2 == pytest.approx(1, abs=1e-8)
    assert abs(p.inner(m)) < 1e-14


@pytest.mark.parametrize("phi", [0.0, 1.0])
def test_equatorial_pair_orthogonal_and_comb(phi):
    a = build_equatorial_macrostate(1.0, phi)
    b = build_equatorial_macrostate(1.0, phi, orthogonal=True)
    assert abs(a.inner(b)) < 1e-14
    n = np.arange(a.cutoff[0])
    odd_even = (n[:, None] % 2 == 1) & (n[None, :] % 2 == 0)
    assert np.all(a.amplitudes[~odd_even] == 0)
    assert np.all(b.amplitudes[~odd_even.T] == 0)


def test_inner_product_requires_same_basis():
    a = build_equatorial_macrostate(0.5, 0.0)
    b = build_collinear_macrostate(0.5, "plus")
    with pytest.raises(ConfigError):
        a.inner(b)


@pytest.mark.parametrize("g", [0.5, 1.0, 1.5])
@pytest.mark.parametrize("phi", [0.0, 0.7, math.pi])
def test_mean_photons_match_fock_expectation(g, phi):
    state = build_collinear_macrostate(g, Equatorial(phi), max_deficit=1e-14)
    n_plus, n_minus = state.photon_numbers()
    cp, cm, _ = mean_photons_and_visibility(g, phi)
    assert n_plus == pytest.approx(cp, abs=1e-9)
    assert n_minus == pytest.approx(cm, abs=1e-9)


def test_visibility_asymptote():
    assert mean_photons_and_visibility(0.0, 0.0)[2] == 1.0
    assert mean_photons_and_visibility(6.0, 0.0)[2] == pytest.approx(0.5, abs=1e-5)


# ---------------------------------------------------------------------------
# truncation
# ---------------------------------------------------------------------------


def test_explicit_small_cutoff_raises_with_deficit():
    with pytest.raises(TruncationError) as info:
        build_equatorial_macrostate(1.5, 0.0, cutoff=10)
    assert info.value.deficit > 1e-8


def test_default_cutoff_escalates_to_target():
    g = 1.5
    st_ = build_equatorial_macrostate(g, 0.0, max_deficit=1e-12)
    assert st_.deficit <= 1e-12
    assert st_.cutoff[0] > default_cutoff(g)


def test_no_limit_returns_truncated_state():
    st_ = build_hv_macrostate(1.5, "H", cutoff=10, max_deficit=None)
    assert st_.deficit == pytest.approx(1 - st_.norm2)
    assert st_.deficit > 0.1


# ---------------------------------------------------------------------------
# basis changes
# ---------------------------------------------------------------------------

small_state = st.lists(st.complex_numbers(max_magnitude=1, allow_nan=False, allow_infinity=False),
                       min_size=15, max_size=15)


@given(small_state, st.floats(0, 2 * math.pi))
def test_change_basis_is_unitary_and_invertible(coeffs, phi):
    amp = np.zeros((10, 10), dtype=complex)
    idx = [(i, j) for i in range(5) for j in range(5) if i + j <= 4]
    for (i, j), c in zip(idx, coeffs):
        amp[i, j] = c
    if np.linalg.norm(amp) == 0:
        return
    amp /= np.linalg.norm(amp)
    s = TwoModeFockState(amp, HV)
    t = change_basis(s, phi_basis(phi))
    assert t.norm2 == pytest.approx(1.0, abs=1e-12)
    back = change_basis(t, HV)
    np.testing.assert_allclose(back.amplitudes, amp, atol=1e-12)


def test_single_photon_change_basis():
    amp = np.zeros((2, 2), dtype=complex)
    amp[1, 0] = 1  # one H photon
    pm = change_basis(TwoModeFockState(amp, HV), PLUS_MINUS).amplitudes
    # |H> = (|+> - |->)/√2
    np.testing.assert_allclose(pm, [[0, -1 / math.sqrt(2)], [1 / math.sqrt(2), 0]], atol=1e-15)


# ---------------------------------------------------------------------------
# density matrices and single-mode states
# ---------------------------------------------------------------------------


def test_density_matrix_and_partial_trace():
    st_ = build_hv_macrostate(0.5, "H")
    rho = st_.density_matrix()
    assert rho.trace == pytest.approx(st_.norm2)
    a = partial_trace(rho, "a")
    b = partial_trace(rho, "b")
    # Schmidt form: both reductions share their spectrum
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(a.matrix))[-5:],
                               np.sort(np.linalg.eigvalsh(b.matrix))[-5:], atol=1e-12)
    with pytest.raises(ConfigError):
        partial_trace(a, "a")


def test_density_matrix_validation():
    with pytest.raises(ConfigError):
        DensityMatrix(np.eye(3), (2,))
    rho = DensityMatrix.from_pure(np.array([0.6, 0.8]))
    assert rho.trace == pytest.approx(1.0)
    assert rho.crop((1,)).trace == pytest.approx(0.36)


@pytest.mark.parametrize("alpha, phi, sign", [(2.0, math.pi / 2, "+"), (2.0, math.pi / 2, "-"),
                                               (1.3, 0.4, "+"), (6.0, 1.0, "-")])
def test_css_state_norm(alpha, phi, sign):
    p = CssParams(alpha, phi, sign)
    amp = build_css_state(p)
    assert np.sum(np.abs(amp) ** 2) == pytest.approx(1.0, abs=1e-10)
    assert css_normalization(p) > 0


def test_css_parity_at_right_angle():
    even = np.abs(build_css_state(CssParams(2.5, math.pi / 2, "+"))) ** 2
    odd = np.abs(build_css_state(CssParams(2.5, math.pi / 2, "-"))) ** 2
    assert even[1::2].sum() < 1e-28
    assert odd[0::2].sum() < 1e-28


def test_photon_subtracted_seed():
    amp = build_photon_subtracted_seed(3, 0.4, 0.2, cutoff=6)
    assert np.linalg.norm(amp) == pytest.approx(1.0)
    assert np.all(amp[[0, 2, 4, 5]] == 0)  # only |3> and |1>
    with pytest.raises(ConfigError):
        build_photon_subtracted_seed(3, 0.4, 0.2, cutoff=3)
