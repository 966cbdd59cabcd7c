"""SNR models for the entangled-probe (QI) and coherent-probe (CI) systems.

The QI receiver chain is composed from :mod:`qisim.gaussian` operations:

    two-mode squeezed source (brightness N_S)
    -> BPSK phase phi on the signal mode
    -> signal return: transmissivity kappa_S with thermal background N_B
    -> idler storage: transmissivity kappa_I, vacuum environment
    -> cross-correlation attenuation sqrt(kappa_extra)
    -> low-gain amplifier mixing return and idler (gain G)
    -> detector efficiency eta_D as a pure-loss channel
    -> photon counting on the idler output.

All moments are exact; the asymptotic closed forms (valid for N_S << 1 and
(G-1)N_B << 1) are exposed separately.  The classical benchmark is a
coherent probe of the same total energy M*N_S measured by homodyne detection
against the same background.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import gaussian as g

__all__ = [
    "SystemParams",
    "SnrReport",
    "ZeroDenominator",
    "qi_receiver_moments",
    "qi_output_state",
    "opa_input_state",
    "qi_snr_exact",
    "qi_snr_asymptotic",
    "ci_snr_exact",
    "ci_snr_asymptotic",
    "snr_advantage",
    "classicality_margin_db",
    "background_to_return_db",
    "electronics_variance",
]


class ZeroDenominator(ZeroDivisionError):
    """SNR denominator is identically zero (no signal and no noise)."""


def _in_unit(value: float, name: str):
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class SystemParams:
    """All scalar parameters of one QI/CI operating point.

    n_s        source brightness, photons per mode
    kappa_s    roundtrip probe transmissivity
    kappa_i    idler-storage transmissivity
    kappa_extra  lumped receiver nonideality factor
    eta_d      detector quantum efficiency
    n_b        background photons per mode at the receiver
    n_el       input-referred electronics noise, photons per mode
    gain       amplifier gain G >= 1
    m          number of signal-idler mode pairs (dimensionless, = t*w)
    w          phase-matching bandwidth in Hz (optional)
    t          measurement time in s (optional)
    phi        BPSK signal phase in radians

    When ``m`` is omitted it is derived as t*w; when all three are given they
    must agree.
    """

    n_s: float
    kappa_s: float
    kappa_i: float = 1.0
    kappa_extra: float = 1.0
    eta_d: float = 1.0
    n_b: float = 0.0
    n_el: float = 0.0
    gain: float = 1.0
    m: float | None = None
    w: float | None = None
    t: float | None = None
    phi: float = 0.0

    def __post_init__(self):
        if self.n_s < 0 or self.n_b < 0 or self.n_el < 0:
            raise ValueError("photon numbers must be >= 0")
        _in_unit(self.kappa_s, "kappa_s")
        _in_unit(self.kappa_i, "kappa_i")
        _in_unit(self.kappa_extra, "kappa_extra")
        _in_unit(self.eta_d, "eta_d")
        if self.gain < 1.0:
            raise ValueError("gain must be >= 1")
        if self.kappa_s >= 1.0 and self.n_b > 0.0:
            raise ValueError("a nonzero background requires kappa_s < 1")
        m = self.m
        if m is None:
            if self.t is not None and self.w is not None:
                m = self.t * self.w
            else:
                m = 1.0
        elif self.t is not None and self.w is not None:
            if not math.isclose(m, self.t * self.w, rel_tol=1e-9):
                raise ValueError("m must equal t*w when all three are supplied")
        if m < 1.0:
            raise ValueError("mode-pair count m must be >= 1")
        object.__setattr__(self, "m", float(m))


@dataclass(frozen=True)
class SnrReport:
    """Exact and asymptotic SNRs with the diagnostic moments behind them.

    ``mean_on``/``var_on`` are the per-mode receiver-observable moments at
    phase 0, ``mean_off``/``var_off`` at phase pi (photon number for QI,
    homodyne quadrature for CI).  ``ratio_to_ci`` compares ``snr_exact``
    against the asymptotic CI benchmark at equal probe energy.
    """

    snr_exact: float
    snr_asymptotic: float
    mean_on: float
    mean_off: float
    var_on: float
    var_off: float
    ratio_to_ci: float
    classic_margin_db: float
    bg_to_return_db: float


def opa_input_state(p: SystemParams, phi: float | None = None, apply_extra: bool = True) -> g.GaussianState:
    """Two-mode (signal-return, stored-idler) state entering the amplifier."""
    phi = p.phi if phi is None else phi
    st = g.vacuum(2)
    st = g.two_mode_squeeze(st, 0, 1, p.n_s)
    st = g.phase_shift(st, 0, phi)
    if p.kappa_s < 1.0:
        st = g.loss_channel(st, 0, p.kappa_s, p.n_b / (1.0 - p.kappa_s))
    st = g.loss_channel(st, 1, p.kappa_i, 0.0)
    if apply_extra and p.kappa_extra < 1.0:
        st = g.scale_cross_correlations(st, 0, 1, math.sqrt(p.kappa_extra))
    return st


def qi_output_state(p: SystemParams, phi: float | None = None) -> g.GaussianState:
    """Full-chain two-mode state after the amplifier and detector loss."""
    st = opa_input_state(p, phi)
    st = g.two_mode_squeeze(st, 0, 1, p.gain - 1.0)
    st = g.loss_channel(st, 1, p.eta_d, 0.0)
    return st


def qi_receiver_moments(p: SystemParams, phi: float | None = None) -> tuple[float, float]:
    """Exact per-mode (mean, variance) of the detected idler photon number."""
    st = qi_output_state(p, phi)
    return g.photon_mean(st, 1), g.photon_variance(st, 1)


def electronics_variance(p: SystemParams) -> float:
    """Measurement variance added by the electronics, ``M eta_D (G-1) N_el``.

    This is the unique additive model under which the exact SNR reduces to
    the asymptotic N_B + N_el denominator at low gain.
    """
    return p.m * p.eta_d * (p.gain - 1.0) * p.n_el


def qi_snr_asymptotic(p: SystemParams) -> float:
    """Low-brightness, low-gain closed form 16 kI kS kX etaD M N_S / (N_B + N_el).

    Literal formula; meaningful only for N_S << 1 and (G-1)N_B << 1.
    """
    return 16.0 * p.kappa_i * p.kappa_s * p.kappa_extra * p.eta_d * p.m * p.n_s / (p.n_b + p.n_el)


def _snr_from_moments(m_on: float, m_off: float, v_on: float, v_off: float, m: float, v_el: float) -> float:
    delta = m * (m_on - m_off)
    denom = math.sqrt(m * v_on + v_el) + math.sqrt(m * v_off + v_el)
    if denom == 0.0:
        if delta == 0.0:
            raise ZeroDenominator("both variances vanish and the BPSK separation is zero")
        return math.inf
    return 4.0 * delta * delta / (denom * denom)


def _report(p: SystemParams, snr_exact: float, snr_asym: float, m_on, m_off, v_on, v_off) -> SnrReport:
    ci = ci_snr_asymptotic(p)
    ratio = snr_exact / ci if ci > 0.0 else math.nan
    try:
        margin = classicality_margin_db(p)
    except ValueError:
        margin = math.nan
    try:
        bg = background_to_return_db(p)
    except ValueError:
        bg = math.nan
    return SnrReport(snr_exact, snr_asym, m_on, m_off, v_on, v_off, ratio, margin, bg)


def qi_snr_exact(p: SystemParams) -> SnrReport:
    """Exact QI SNR: 4 M^2 (Delta mean)^2 over the symmetric noise term.

    The denominator is (sqrt(M v_0 + V_el) + sqrt(M v_pi + V_el))^2 with the
    per-mode photon variances v_phi and the electronics variance V_el.
    """
    m_on, v_on = qi_receiver_moments(p, 0.0)
    m_off, v_off = qi_receiver_moments(p, math.pi)
    snr = _snr_from_moments(m_on, m_off, v_on, v_off, p.m, electronics_variance(p))
    return _report(p, snr, qi_snr_asymptotic(p), m_on, m_off, v_on, v_off)


def ci_snr_asymptotic(p: SystemParams) -> float:
    """Optimum classical benchmark 8 kS M N_S / N_B at equal probe energy."""
    if p.n_b == 0.0:
        return math.inf if p.kappa_s * p.n_s > 0.0 else math.nan
    return 8.0 * p.kappa_s * p.m * p.n_s / p.n_b


def ci_snr_exact(p: SystemParams) -> SnrReport:
    """Exact coherent-probe/homodyne SNR, 16 kS M N_S / (2 N_B + 1).

    Built from the actual homodyne model: a coherent state of total energy
    M*N_S, BPSK phase, the same lossy noisy return, and an x-quadrature
    measurement whose variance is N_B + 1/2.
    """
    means = []
    variances = []
    for phi in (0.0, math.pi):
        st = g.coherent(math.sqrt(p.m * p.n_s))
        st = g.phase_shift(st, 0, phi)
        if p.kappa_s < 1.0:
            st = g.loss_channel(st, 0, p.kappa_s, p.n_b / (1.0 - p.kappa_s))
        mean, var = g.quadrature_stats(st, 0, 0.0)
        means.append(mean)
        variances.append(var)
    snr = _snr_from_moments(means[0], means[1], variances[0], variances[1], 1.0, 0.0)
    return _report(p, snr, ci_snr_asymptotic(p), means[0], means[1], variances[0], variances[1])


def snr_advantage(p: SystemParams) -> float:
    """QI-over-CI SNR ratio at equal M*N_S probe energy, asymptotic regime.

    Evaluates to 2 kI kX etaD N_B / (N_B + N_el): the factor-of-two (3 dB)
    ideal edge, degraded by the receiver nonidealities.  Both SNRs are taken
    in their common low-brightness, low-gain regime so the ratio is exact
    there and independent of N_S, kappa_S and M.
    """
    ci = ci_snr_asymptotic(p)
    if not math.isfinite(ci) or ci <= 0.0:
        raise ZeroDenominator("classical benchmark SNR is zero or undefined")
    return qi_snr_asymptotic(p) / ci


def classicality_margin_db(p: SystemParams) -> float:
    """How far (dB) the amplifier-input cross correlation sits below the
    classical-state bound n_S^in * n_I^in; positive means the returned and
    retained modes are in a classical (entanglement-broken) joint state.

    kappa_extra is excluded: it models receiver nonideality downstream of
    the channel, not the channel itself.
    """
    st = opa_input_state(p, 0.0, apply_extra=False)
    mm = g.mode_moments(st)
    pscc2 = abs(mm.cross_ps[0, 1]) ** 2
    if pscc2 == 0.0:
        raise ValueError("cross correlation is exactly zero; margin undefined")
    return 10.0 * math.log10(mm.mean_photon[0] * mm.mean_photon[1] / pscc2)


def background_to_return_db(p: SystemParams) -> float:
    """Background-to-returned-probe power ratio 10 log10(N_B / (kS N_S))."""
    ret = p.kappa_s * p.n_s
    if ret <= 0.0:
        raise ValueError("no target return; ratio undefined")
    if p.n_b == 0.0:
        return -math.inf
    return 10.0 * math.log10(p.n_b / ret)
