"""Truncated Fock-space simulator used as an independent numerical oracle.

Pure states only; loss is modelled with explicit environment modes.  The
quadratic unitaries (beam splitter, two-mode squeezer, phase) are exact matrix
exponentials of their generators, applied block-by-block in the conserved
quantum number (total photons for the beam splitter, photon-number difference
for the squeezer), so applications stay cheap even at large truncations.

Conventions match :mod:`qisim.gaussian` exactly: the beam splitter of
transmissivity kappa sends ``a -> sqrt(kappa) a + sqrt(1-kappa) b`` and the
two-mode squeezer with mean photon number N sends
``a -> cosh(r) a + sinh(r) b^dag`` with ``sinh^2(r) = N``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import expm

__all__ = [
    "TruncationOverflow",
    "FockArray",
    "fock_vacuum",
    "fock_number_state",
    "fock_tensor",
    "fock_tmss",
    "apply_quadratic_unitary",
    "fock_photon_stats",
    "qi_chain_fock",
]

DEFAULT_DEFICIT_BOUND = 1e-9

# extra Fock levels used when applying an active unitary, so that probability
# leaking past the nominal truncation is actually observed
_PAD = 6


class TruncationOverflow(RuntimeError):
    """Raised when an operation leaks more norm past the truncation than allowed."""


@dataclass(frozen=True)
class FockArray:
    """Pure multimode state: complex amplitude tensor, one axis per mode."""

    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex)
        if amps.ndim < 1 or any(d < 1 for d in amps.shape):
            raise ValueError("amplitude tensor needs at least one level per mode")
        object.__setattr__(self, "amps", amps)

    @property
    def mode_dims(self) -> tuple[int, ...]:
        return self.amps.shape

    @property
    def n_modes(self) -> int:
        return self.amps.ndim

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))

    @property
    def norm_deficit(self) -> float:
        """Probability lost to truncation: 1 - ||psi||^2."""
        return 1.0 - self.norm


def fock_vacuum(dims: Sequence[int]) -> FockArray:
    return fock_number_state(dims, [0] * len(dims))


def fock_number_state(dims: Sequence[int], ns: Sequence[int]) -> FockArray:
    """|n_0, n_1, ...> with per-mode truncations ``dims``."""
    if len(ns) != len(dims):
        raise ValueError("one occupation number per mode required")
    for n, d in zip(ns, dims):
        if not 0 <= n < d:
            raise ValueError(f"occupation {n} does not fit truncation {d}")
    amps = np.zeros(tuple(dims), dtype=complex)
    amps[tuple(ns)] = 1.0
    return FockArray(amps)


def fock_tensor(a: FockArray, b: FockArray) -> FockArray:
    """Tensor product; modes of b are appended after those of a."""
    return FockArray(np.tensordot(a.amps, b.amps, axes=0))


def fock_tmss(mean_photon: float, dim: int) -> FockArray:
    """Two-mode squeezed vacuum, amplitude sqrt(N^n / (N+1)^(n+1)) on |n,n>."""
    if mean_photon < 0:
        raise ValueError("mean photon number must be >= 0")
    if dim < 2:
        raise ValueError("need at least two Fock levels")
    n = np.arange(dim)
    diag = np.sqrt(mean_photon ** n / (mean_photon + 1.0) ** (n + 1))
    amps = np.zeros((dim, dim), dtype=complex)
    amps[n, n] = diag
    return FockArray(amps)


def _beam_splitter_blocks(dj: int, dk: int, theta: float):
    """exp(theta (a^dag b - a b^dag)) split into total-photon-number blocks."""
    blocks = []
    for s in range(dj + dk - 1):
        nj = np.arange(max(0, s - dk + 1), min(dj - 1, s) + 1)
        gen = np.zeros((nj.size, nj.size))
        for i in range(nj.size - 1):
            c = np.sqrt((nj[i] + 1.0) * (s - nj[i]))
            gen[i + 1, i] = c
            gen[i, i + 1] = -c
        flat = nj * dk + (s - nj)
        blocks.append((flat, expm(theta * gen)))
    return blocks


def _two_mode_squeezer_blocks(dj: int, dk: int, r: float):
    """exp(r (a^dag b^dag - a b)) split into photon-difference blocks."""
    blocks = []
    for d in range(-(dk - 1), dj):
        nj = np.arange(max(0, d), min(dj - 1, dk - 1 + d) + 1)
        gen = np.zeros((nj.size, nj.size))
        for i in range(nj.size - 1):
            c = np.sqrt((nj[i] + 1.0) * (nj[i] - d + 1.0))
            gen[i + 1, i] = c
            gen[i, i + 1] = -c
        flat = nj * dk + (nj - d)
        blocks.append((flat, expm(r * gen)))
    return blocks


def _apply_two_mode(amps: np.ndarray, j: int, k: int, blocks) -> np.ndarray:
    order = [j, k] + [ax for ax in range(amps.ndim) if ax not in (j, k)]
    moved = amps.transpose(order)
    dj, dk = moved.shape[0], moved.shape[1]
    flat = np.ascontiguousarray(moved).reshape(dj * dk, -1)
    for rows, u in blocks:
        flat[rows] = u @ flat[rows]
    return flat.reshape(moved.shape).transpose(np.argsort(order))


def apply_quadratic_unitary(
    state: FockArray,
    kind: str,
    modes: Sequence[int],
    parameter: float,
    deficit_bound: float = DEFAULT_DEFICIT_BOUND,
) -> FockArray:
    """Apply one of {beam_splitter, two_mode_squeezer, phase} exactly.

    Parameters are the transmissivity kappa, the per-mode mean photon number
    N, and the rotation angle phi respectively.  Two-mode unitaries are
    evaluated on a padded tensor; any probability that would leave the
    nominal truncation is measured and, if it exceeds ``deficit_bound``,
    :class:`TruncationOverflow` is raised so the caller can enlarge the
    truncation.  Otherwise the leaked mass is dropped and simply adds to the
    state's norm deficit.
    """
    for j in modes:
        if not 0 <= j < state.n_modes:
            raise ValueError(f"mode index {j} out of range")

    if kind == "phase":
        (j,) = modes
        phase = np.exp(1j * float(parameter) * np.arange(state.mode_dims[j]))
        shape = [1] * state.n_modes
        shape[j] = state.mode_dims[j]
        return FockArray(state.amps * phase.reshape(shape))

    j, k = modes
    if j == k:
        raise ValueError("two-mode unitaries need distinct modes")
    dj, dk = state.mode_dims[j], state.mode_dims[k]

    if kind == "beam_splitter":
        kappa = float(parameter)
        if not 0.0 <= kappa <= 1.0:
            raise ValueError("transmissivity must lie in [0, 1]")
        theta = np.arccos(np.sqrt(kappa))
        blocks = _beam_splitter_blocks(dj + _PAD, dk + _PAD, theta)
    elif kind == "two_mode_squeezer":
        if parameter < 0:
            raise ValueError("mean photon number must be >= 0")
        r = np.arcsinh(np.sqrt(float(parameter)))
        blocks = _two_mode_squeezer_blocks(dj + _PAD, dk + _PAD, r)
    else:
        raise ValueError(f"unknown unitary kind {kind!r}")

    padded_shape = list(state.mode_dims)
    padded_shape[j] += _PAD
    padded_shape[k] += _PAD
    padded = np.zeros(padded_shape, dtype=complex)
    padded[tuple(np.s_[:d] for d in state.mode_dims)] = state.amps
    norm_before = float(np.sum(np.abs(padded) ** 2))

    padded = _apply_two_mode(padded, j, k, blocks)

    kept = padded[tuple(np.s_[:d] for d in state.mode_dims)]
    leaked = norm_before - float(np.sum(np.abs(kept) ** 2))
    if leaked > deficit_bound:
        raise TruncationOverflow(
            f"{kind} on modes {tuple(modes)} leaked {leaked:.3e} probability past "
            f"truncation {(dj, dk)} (bound {deficit_bound:.1e}); raise the truncation"
        )
    return FockArray(kept)


def binomial_thinning(dist: np.ndarray, eta: float) -> np.ndarray:
    """Photon-number distribution after a transmissivity-eta loss channel.

    Loss acts on the Fock-basis diagonal as binomial thinning, so this is the
    exact detected distribution; it spares the oracle an extra environment
    mode whose coherences would never be used.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError("efficiency must lie in [0, 1]")
    dist = np.asarray(dist, dtype=float)
    d = dist.size
    n = np.arange(d)
    thin = np.zeros((d, d))
    for k in range(d):
        thin[k, k:] = comb(n[k:], k) * eta**k * (1.0 - eta) ** (n[k:] - k)
    return thin @ dist


def fock_photon_stats(state: FockArray, mode: int) -> tuple[float, float, np.ndarray]:
    """Marginal photon-number (mean, variance, distribution) by direct summation."""
    if not 0 <= mode < state.n_modes:
        raise ValueError(f"mode index {mode} out of range")
    axes = tuple(ax for ax in range(state.n_modes) if ax != mode)
    dist = np.sum(np.abs(state.amps) ** 2, axis=axes)
    total = dist.sum()
    if total <= 0.0:
        raise ValueError("state has zero norm")
    dist = dist / total
    n = np.arange(dist.size)
    mean = float(np.sum(n * dist))
    var = float(np.sum(n * n * dist)) - mean * mean
    return mean, var, dist


def _qi_chain_env_fock(
    env_n: int,
    n_s: float,
    kappa_s: float,
    kappa_i: float,
    gain: float,
    eta_d: float,
    phi: float,
    dim: int,
    deficit_bound: float,
) -> tuple[float, float]:
    """Detected-idler (mean, second moment) with the signal-loss environment
    prepared in the Fock state |env_n>."""
    d_es = dim + env_n + 1
    # the storage-loss environment only ever receives the idler's low thermal
    # occupancy, so its truncation never needs to follow the system's
    d_ei = min(dim, 32)
    modes = [fock_tmss(n_s, dim)]  # signal (0), idler (1)
    dims_env = [d_es]
    ns_env = [env_n]
    if eta_d < 1.0:
        dims_env.append(dim)
        ns_env.append(0)
    state = fock_tensor(
        modes[0], fock_number_state([*dims_env, d_ei], [*ns_env, 0])
    )
    # mode layout: S=0, I=1, E_S=2, (E_D=3 when eta_d<1), E_I=last
    e_s = 2
    e_i = state.n_modes - 1

    state = apply_quadratic_unitary(state, "phase", [0], phi, deficit_bound)
    state = apply_quadratic_unitary(state, "beam_splitter", [0, e_s], kappa_s, deficit_bound)
    state = apply_quadratic_unitary(state, "beam_splitter", [1, e_i], kappa_i, deficit_bound)
    state = apply_quadratic_unitary(state, "two_mode_squeezer", [0, 1], gain - 1.0, deficit_bound)
    if eta_d < 1.0:
        state = apply_quadratic_unitary(state, "beam_splitter", [1, 3], eta_d, deficit_bound)
    mean, var, _ = fock_photon_stats(state, 1)
    return mean, var + mean * mean


def qi_chain_fock(
    n_s: float,
    kappa_s: float,
    kappa_i: float,
    n_b: float,
    gain: float,
    phi: float,
    dim: int,
    eta_d: float = 1.0,
    deficit_bound: float = DEFAULT_DEFICIT_BOUND,
) -> tuple[float, float]:
    """Brute-force (mean, variance) of the detected idler photon number.

    Runs the full probe chain -- entangled source, signal phase, lossy noisy
    return, idler storage loss, low-gain amplifier, detector loss -- entirely
    in truncated Fock space.  The thermal background entering the signal path
    is an explicit environment mode; because expectation values are linear in
    its density operator and polynomial (degree <= 2) in its occupation, the
    thermal average is taken exactly by evaluating the chain at environment
    occupations 0..3, fitting the quadratic, and summing against the thermal
    distribution.  The evaluation at occupation 3 cross-checks the fit.
    """
    if kappa_s >= 1.0 and n_b > 0.0:
        raise ValueError("background requires kappa_s < 1")
    if gain < 1.0:
        raise ValueError("gain must be >= 1")

    if n_b == 0.0:
        mean, second = _qi_chain_env_fock(
            0, n_s, kappa_s, kappa_i, gain, eta_d, phi, dim, deficit_bound
        )
        return mean, second - mean * mean

    nu = n_b / (1.0 - kappa_s)
    samples = [
        _qi_chain_env_fock(n, n_s, kappa_s, kappa_i, gain, eta_d, phi, dim, deficit_bound)
        for n in range(4)
    ]
    means = np.array([s[0] for s in samples])
    seconds = np.array([s[1] for s in samples])
    vand = np.vander([0.0, 1.0, 2.0], 3, increasing=True)
    cm = np.linalg.solve(vand, means[:3])
    cs = np.linalg.solve(vand, seconds[:3])
    for coef, vals in ((cm, means), (cs, seconds)):
        resid = abs(coef[0] + 3.0 * coef[1] + 9.0 * coef[2] - vals[3])
        if resid > 1e-8 * max(1.0, abs(vals[3])):
            raise RuntimeError("environment moments are not quadratic; chain is inconsistent")
    # thermal moments: E[n] = nu, E[n^2] = 2 nu^2 + nu
    e1, e2 = nu, 2.0 * nu * nu + nu
    mean = cm[0] + cm[1] * e1 + cm[2] * e2
    second = cs[0] + cs[1] * e1 + cs[2] * e2
    return float(mean), float(second - mean * mean)
