"""Multimode Gaussian states and the symplectic operations acting on them.

A Gaussian state of n bosonic modes is carried by its quadrature mean vector
and covariance matrix.  Conventions used throughout the package:

* quadratures: ``x = (a + a^dag)/sqrt(2)``, ``p = (a - a^dag)/(i sqrt(2))``,
  so ``[x, p] = i`` and the vacuum covariance matrix is ``I/2``;
* ordering: interleaved ``(x_0, p_0, x_1, p_1, ...)``;
* beam splitter of transmissivity ``kappa`` on modes (j, k):
  ``a_j -> sqrt(kappa) a_j + sqrt(1-kappa) a_k`` and
  ``a_k -> -sqrt(1-kappa) a_j + sqrt(kappa) a_k``
  (the reflected amplitude into the second output carries the minus sign);
* two-mode squeezer with mean photon number N per mode:
  ``a_j -> cosh(r) a_j + sinh(r) a_k^dag`` with ``sinh^2(r) = N``
  (equivalently gain ``G = cosh^2(r) = N + 1``), which on vacuum gives
  ``<a_j a_k> = sqrt(N(N+1))``.

States are immutable values; every operation is a pure function returning a
new state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "GaussianState",
    "ModeMoments",
    "vacuum",
    "thermal",
    "coherent",
    "tensor",
    "two_mode_squeeze",
    "beam_splitter",
    "phase_shift",
    "loss_channel",
    "partial_trace",
    "scale_cross_correlations",
    "photon_mean",
    "photon_variance",
    "quadrature_stats",
    "mode_moments",
    "symplectic_form",
    "min_uncertainty_eigenvalue",
]

_SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class GaussianState:
    """Mean vector (length 2n) and covariance matrix (2n x 2n) of n modes."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        if mean.ndim != 1 or mean.size % 2 != 0 or mean.size == 0:
            raise ValueError("mean must be a vector of even length 2n, n >= 1")
        if cov.shape != (mean.size, mean.size):
            raise ValueError("cov must be square and match the mean vector")
        if np.max(np.abs(cov - cov.T)) > _SYMMETRY_TOL:
            raise ValueError("cov must be symmetric to 1e-12")
        # keep exact symmetry so it survives long operation chains
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", (cov + cov.T) / 2.0)

    @property
    def n_modes(self) -> int:
        return self.mean.size // 2


@dataclass(frozen=True)
class ModeMoments:
    """First and second annihilation-operator moments of every mode (pair).

    ``cross_pi[j, k]`` is the phase-insensitive ``<a_j^dag a_k>`` and
    ``cross_ps[j, k]`` the phase-sensitive ``<a_j a_k>``; the diagonals hold
    the per-mode photon number and ``<a_j a_j>``.
    """

    mean_photon: np.ndarray
    self_psc: np.ndarray
    cross_pi: np.ndarray
    cross_ps: np.ndarray


def symplectic_form(n_modes: int) -> np.ndarray:
    """Standard symplectic form Omega for the interleaved xp ordering."""
    omega1 = np.array([[0.0, 1.0], [-1.0, 0.0]])
    out = np.zeros((2 * n_modes, 2 * n_modes))
    for j in range(n_modes):
        out[2 * j : 2 * j + 2, 2 * j : 2 * j + 2] = omega1
    return out


def min_uncertainty_eigenvalue(state: GaussianState) -> float:
    """Smallest eigenvalue of cov + (i/2) Omega; >= 0 for physical states."""
    omega = symplectic_form(state.n_modes)
    return float(np.linalg.eigvalsh(state.cov + 0.5j * omega).min())


def vacuum(n: int) -> GaussianState:
    """n-mode vacuum: zero mean, covariance I/2."""
    if n < 1:
        raise ValueError("mode count must be >= 1")
    return GaussianState(np.zeros(2 * n), np.eye(2 * n) / 2.0)


def thermal(nbar: float) -> GaussianState:
    """Single thermal mode with mean photon number nbar."""
    if nbar < 0:
        raise ValueError("mean photon number must be >= 0")
    return GaussianState(np.zeros(2), (nbar + 0.5) * np.eye(2))


def coherent(alpha: complex) -> GaussianState:
    """Single-mode coherent state |alpha>."""
    alpha = complex(alpha)
    mean = np.sqrt(2.0) * np.array([alpha.real, alpha.imag])
    return GaussianState(mean, np.eye(2) / 2.0)


def tensor(*states: GaussianState) -> GaussianState:
    """Tensor product; modes are concatenated in argument order."""
    if not states:
        raise ValueError("need at least one state")
    mean = np.concatenate([s.mean for s in states])
    dims = [2 * s.n_modes for s in states]
    cov = np.zeros((sum(dims), sum(dims)))
    pos = 0
    for s, d in zip(states, dims):
        cov[pos : pos + d, pos : pos + d] = s.cov
        pos += d
    return GaussianState(mean, cov)


def _apply_symplectic(state: GaussianState, s_mat: np.ndarray) -> GaussianState:
    return GaussianState(s_mat @ state.mean, s_mat @ state.cov @ s_mat.T)


def _check_mode(state: GaussianState, j: int):
    if not 0 <= j < state.n_modes:
        raise ValueError(f"mode index {j} out of range for {state.n_modes} modes")


def two_mode_squeeze(state: GaussianState, j: int, k: int, mean_photon: float) -> GaussianState:
    """Two-mode squeezer on (j, k) with sinh^2(r) = mean_photon per mode."""
    _check_mode(state, j)
    _check_mode(state, k)
    if j == k:
        raise ValueError("two-mode squeezing needs two distinct modes")
    if mean_photon < 0:
        raise ValueError("mean photon number must be >= 0")
    r = np.arcsinh(np.sqrt(mean_photon))
    c, s = np.cosh(r), np.sinh(r)
    s_mat = np.eye(2 * state.n_modes)
    xj, pj, xk, pk = 2 * j, 2 * j + 1, 2 * k, 2 * k + 1
    s_mat[xj, xj] = c
    s_mat[xj, xk] = s
    s_mat[pj, pj] = c
    s_mat[pj, pk] = -s
    s_mat[xk, xk] = c
    s_mat[xk, xj] = s
    s_mat[pk, pk] = c
    s_mat[pk, pj] = -s
    return _apply_symplectic(state, s_mat)


def beam_splitter(state: GaussianState, j: int, k: int, kappa: float) -> GaussianState:
    """Beam splitter of transmissivity kappa on modes (j, k)."""
    _check_mode(state, j)
    _check_mode(state, k)
    if j == k:
        raise ValueError("beam splitter needs two distinct modes")
    if not 0.0 <= kappa <= 1.0:
        raise ValueError("transmissivity must lie in [0, 1]")
    t, r = np.sqrt(kappa), np.sqrt(1.0 - kappa)
    s_mat = np.eye(2 * state.n_modes)
    for off in (0, 1):  # x and p transform identically (real coupling)
        a, b = 2 * j + off, 2 * k + off
        s_mat[a, a] = t
        s_mat[a, b] = r
        s_mat[b, a] = -r
        s_mat[b, b] = t
    return _apply_symplectic(state, s_mat)


def phase_shift(state: GaussianState, j: int, phi: float) -> GaussianState:
    """Phase-space rotation a_j -> exp(i phi) a_j."""
    _check_mode(state, j)
    c, s = np.cos(phi), np.sin(phi)
    s_mat = np.eye(2 * state.n_modes)
    xj, pj = 2 * j, 2 * j + 1
    s_mat[xj, xj] = c
    s_mat[xj, pj] = -s
    s_mat[pj, xj] = s
    s_mat[pj, pj] = c
    return _apply_symplectic(state, s_mat)


def loss_channel(state: GaussianState, j: int, kappa: float, env_nbar: float = 0.0) -> GaussianState:
    """Mix mode j with a fresh thermal environment and trace the environment.

    Transmissivity kappa, environment occupation env_nbar; the photon mean of
    mode j becomes kappa*nbar + (1-kappa)*env_nbar.
    """
    _check_mode(state, j)
    if not 0.0 <= kappa <= 1.0:
        raise ValueError("transmissivity must lie in [0, 1]")
    if env_nbar < 0:
        raise ValueError("environment occupation must be >= 0")
    extended = tensor(state, thermal(env_nbar))
    mixed = beam_splitter(extended, j, state.n_modes, kappa)
    return partial_trace(mixed, range(state.n_modes))


def partial_trace(state: GaussianState, keep: Iterable[int]) -> GaussianState:
    """Reduced state on the kept modes (order preserved as given)."""
    keep = list(keep)
    if not keep:
        raise ValueError("must keep at least one mode")
    for j in keep:
        _check_mode(state, j)
    idx = np.concatenate([[2 * j, 2 * j + 1] for j in keep])
    return GaussianState(state.mean[idx], state.cov[np.ix_(idx, idx)])


def scale_cross_correlations(state: GaussianState, j: int, k: int, factor: float) -> GaussianState:
    """Attenuate all cross correlations between modes j and k by ``factor``.

    For 0 <= factor <= 1 this is the covariance of the mixture of the state
    with its mode-j-phase-flipped copy (weights (1 +- factor)/2), hence a
    physical map; it scales both <a_j a_k> and <a_j^dag a_k> uniformly and
    leaves every single-mode moment untouched.
    """
    _check_mode(state, j)
    _check_mode(state, k)
    if j == k:
        raise ValueError("needs two distinct modes")
    if not 0.0 <= factor <= 1.0:
        raise ValueError("factor must lie in [0, 1]")
    cov = state.cov.copy()
    rows = np.s_[2 * j : 2 * j + 2]
    cols = np.s_[2 * k : 2 * k + 2]
    cov[rows, cols] *= factor
    cov[cols, rows] *= factor
    return GaussianState(state.mean, cov)


def _alpha(state: GaussianState, j: int) -> complex:
    return (state.mean[2 * j] + 1j * state.mean[2 * j + 1]) / np.sqrt(2.0)


def _central_self_moments(state: GaussianState, j: int) -> tuple[float, complex]:
    """Fluctuation moments (<da^dag da>, <da da>) of mode j."""
    v = state.cov[2 * j : 2 * j + 2, 2 * j : 2 * j + 2]
    n_c = (v[0, 0] + v[1, 1] - 1.0) / 2.0
    m_c = (v[0, 0] - v[1, 1] + 2j * v[0, 1]) / 2.0
    return float(n_c), complex(m_c)


def photon_mean(state: GaussianState, j: int) -> float:
    """<a^dag a> of mode j."""
    _check_mode(state, j)
    n_c, _ = _central_self_moments(state, j)
    return n_c + abs(_alpha(state, j)) ** 2


def photon_variance(state: GaussianState, j: int) -> float:
    """Exact photon-number variance of mode j.

    For zero mean this is ``n^2 + n + |<aa>|^2`` with n = <a^dag a>; the
    displacement contributes ``|alpha|^2 (2n + 1) + 2 Re(alpha*^2 <da da>)``.
    No small-parameter assumption is made.
    """
    _check_mode(state, j)
    n_c, m_c = _central_self_moments(state, j)
    alpha = _alpha(state, j)
    var = n_c * n_c + n_c + abs(m_c) ** 2
    var += abs(alpha) ** 2 * (2.0 * n_c + 1.0)
    var += 2.0 * (np.conj(alpha) ** 2 * m_c).real
    return float(var)


def quadrature_stats(state: GaussianState, j: int, theta: float = 0.0) -> tuple[float, float]:
    """Mean and variance of x_theta = (a e^{-i theta} + a^dag e^{i theta})/sqrt(2)."""
    _check_mode(state, j)
    c, s = np.cos(theta), np.sin(theta)
    u = np.array([c, s])
    m = state.mean[2 * j : 2 * j + 2]
    v = state.cov[2 * j : 2 * j + 2, 2 * j : 2 * j + 2]
    return float(u @ m), float(u @ v @ u)


def mode_moments(state: GaussianState) -> ModeMoments:
    """All first/second annihilation-operator moments of the state."""
    n = state.n_modes
    alphas = np.array([_alpha(state, j) for j in range(n)])
    mean_photon = np.empty(n)
    self_psc = np.empty(n, dtype=complex)
    cross_pi = np.empty((n, n), dtype=complex)
    cross_ps = np.empty((n, n), dtype=complex)
    for j in range(n):
        n_c, m_c = _central_self_moments(state, j)
        mean_photon[j] = n_c + abs(alphas[j]) ** 2
        self_psc[j] = m_c + alphas[j] ** 2
        cross_pi[j, j] = mean_photon[j]
        cross_ps[j, j] = self_psc[j]
    for j in range(n):
        for k in range(n):
            if j == k:
                continue
            c = state.cov[2 * j : 2 * j + 2, 2 * k : 2 * k + 2]
            pi_c = (c[0, 0] + c[1, 1] + 1j * (c[0, 1] - c[1, 0])) / 2.0
            ps_c = (c[0, 0] - c[1, 1] + 1j * (c[0, 1] + c[1, 0])) / 2.0
            cross_pi[j, k] = pi_c + np.conj(alphas[j]) * alphas[k]
            cross_ps[j, k] = ps_c + alphas[j] * alphas[k]
    return ModeMoments(mean_photon, self_psc, cross_pi, cross_ps)
