"""Parameter validation, unit reduction, and momentum quadrature.

All dynamics run in units of the atom-field coupling lambda: energies are
divided by lambda and time enters as tau = lambda*t.  Momentum along the
field wavevector is measured in recoil units hbar*q, which turns the Doppler
term q*p/M into 2*omega_recoil*p and the gravitational drift q*g*t into
(q*g/lambda^2)*tau.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.hermite import hermgauss
from scipy.special import gammaln
from scipy.stats import poisson

HBAR = 1.054571817e-34  # J*s (CODATA 2018)

QUARTIC_RATE_MODES = ("solution_gamma_eta", "eq12_eta")

# Poisson weight allowed above the Fock cutoff before a run is rejected.
TRUNCATION_TAIL_BOUND = 1e-12

# Relative mismatch tolerated between a supplied omega_recoil and hbar*q^2/2M.
RECOIL_CONSISTENCY_RTOL = 1e-6


class ParameterError(ValueError):
    """Raised for invalid or mutually inconsistent physical parameters."""


@dataclass(frozen=True)
class PhysicalParams:
    """Raw model constants in laboratory units.

    lambda_coupling and delta0 are angular frequencies (rad/s);
    omega_c_scaled is the cavity frequency already divided by lambda (it only
    enters the dynamics through the paper-literal kernels, which see absolute
    block energies; every commutator-based generator cancels it).
    gamma_damping and eta_nonmarkov are the dimensionless damping knobs the
    figure captions quote.  q_wavenumber (1/m), atom_mass (kg) and gravity
    (m/s^2) are optional: qg_product overrides q*g when set, and omega_recoil
    overrides (or is derived from) hbar*q^2/2M.
    """

    lambda_coupling: float
    delta0: float
    alpha_coherent: complex
    omega_c_scaled: float | None = None
    q_wavenumber: float | None = None
    atom_mass: float | None = None
    gravity: float | None = None
    qg_product: float | None = None
    omega_recoil: float | None = None
    gamma_damping: float = 0.0
    eta_nonmarkov: float = 0.0
    sigma0_momentum_width: float = 1.0
    fock_cutoff: int = 32
    quartic_rate_mode: str = "solution_gamma_eta"
    allow_truncation_tail: bool = False


@dataclass(frozen=True, eq=False)
class ScaledParams:
    """Dimensionless parameters driving the engines (everything per lambda)."""

    delta0_s: float
    omega_c_s: float
    doppler_coeff: float
    grav_drift: float
    gamma_s: float
    eta_s: float
    tau_grid: np.ndarray


@dataclass(frozen=True)
class MomentumNode:
    """One quadrature node of the initial momentum distribution |phi(p)|^2."""

    p_recoil: float
    weight: float


def _require_finite(name: str, value: float) -> None:
    if value is None or not math.isfinite(value):
        raise ParameterError(f"{name} must be finite, got {value!r}")


def make_tau_grid(tau_max: float, tau_step: float) -> np.ndarray:
    """Uniform grid 0, tau_step, ..., up to the largest multiple <= tau_max."""
    if not (tau_step > 0.0) or not math.isfinite(tau_step):
        raise ParameterError(f"tau_step must be positive, got {tau_step!r}")
    if not (tau_max >= tau_step) or not math.isfinite(tau_max):
        raise ParameterError(f"tau_max must be >= tau_step, got {tau_max!r}")
    nsteps = int(math.floor(tau_max / tau_step + 1e-9))
    return np.linspace(0.0, nsteps * tau_step, nsteps + 1)


def validate_and_scale(
    params: PhysicalParams, tau_max: float = 50.0, tau_step: float = 0.05
) -> ScaledParams:
    """Check PhysicalParams invariants and reduce to dimensionless form.

    Raises ParameterError on non-finite input, negative rates, an
    omega_recoil inconsistent with hbar*q^2/2M, or a coherent-state tail
    beyond the Fock cutoff above 1e-12 (a warning instead when
    allow_truncation_tail is set).
    """
    p = params
    _require_finite("lambda_coupling", p.lambda_coupling)
    _require_finite("delta0", p.delta0)
    if p.lambda_coupling <= 0.0:
        raise ParameterError(f"lambda_coupling must be > 0, got {p.lambda_coupling}")
    for name in ("gamma_damping", "eta_nonmarkov"):
        value = getattr(p, name)
        _require_finite(name, value)
        if value < 0.0:
            raise ParameterError(f"{name} must be >= 0, got {value}")
    if not isinstance(p.fock_cutoff, int) or p.fock_cutoff < 1:
        raise ParameterError(f"fock_cutoff must be an integer >= 1, got {p.fock_cutoff!r}")
    _require_finite("sigma0_momentum_width", p.sigma0_momentum_width)
    if p.sigma0_momentum_width <= 0.0:
        raise ParameterError(
            f"sigma0_momentum_width must be > 0, got {p.sigma0_momentum_width}"
        )
    if p.quartic_rate_mode not in QUARTIC_RATE_MODES:
        raise ParameterError(
            f"quartic_rate_mode must be one of {QUARTIC_RATE_MODES}, "
            f"got {p.quartic_rate_mode!r}"
        )
    if not (math.isfinite(p.alpha_coherent.real) and math.isfinite(p.alpha_coherent.imag)):
        raise ParameterError(f"alpha_coherent must be finite, got {p.alpha_coherent!r}")
    for name in ("q_wavenumber", "atom_mass", "gravity", "qg_product", "omega_recoil"):
        value = getattr(p, name)
        if value is not None:
            _require_finite(name, value)

    omega_recoil = p.omega_recoil
    if p.q_wavenumber is not None and p.atom_mass is not None:
        if p.atom_mass <= 0.0:
            raise ParameterError(f"atom_mass must be > 0, got {p.atom_mass}")
        derived = HBAR * p.q_wavenumber**2 / (2.0 * p.atom_mass)
        if omega_recoil is None:
            omega_recoil = derived
        elif abs(omega_recoil - derived) > RECOIL_CONSISTENCY_RTOL * abs(derived):
            raise ParameterError(
                f"omega_recoil={omega_recoil:g} inconsistent with "
                f"hbar*q^2/2M={derived:g} (relative tolerance {RECOIL_CONSISTENCY_RTOL:g})"
            )

    qg = p.qg_product
    if qg is None:
        if p.q_wavenumber is not None and p.gravity is not None:
            qg = p.q_wavenumber * p.gravity
        else:
            qg = 0.0

    omega_c_s = p.omega_c_scaled
    if omega_c_s is None:
        if p.gamma_damping > 0.0 or p.eta_nonmarkov > 0.0:
            raise ParameterError(
                "omega_c_scaled is required when gamma_damping or "
                "eta_nonmarkov is nonzero (absolute block energies matter)"
            )
        omega_c_s = 0.0

    tail = float(poisson.sf(p.fock_cutoff, abs(p.alpha_coherent) ** 2))
    if tail >= TRUNCATION_TAIL_BOUND:
        message = (
            f"coherent-state weight {tail:.3e} beyond fock_cutoff={p.fock_cutoff} "
            f"exceeds {TRUNCATION_TAIL_BOUND:g}"
        )
        if p.allow_truncation_tail:
            warnings.warn(message, stacklevel=2)
        else:
            raise ParameterError(message)

    # doppler_coeff defaults to 0 when no recoil frequency is configured:
    # it only matters for p != 0 nodes and is echoed in the run manifest.
    doppler_coeff = 0.0 if omega_recoil is None else 2.0 * omega_recoil / p.lambda_coupling
    return ScaledParams(
        delta0_s=p.delta0 / p.lambda_coupling,
        omega_c_s=omega_c_s,
        doppler_coeff=doppler_coeff,
        grav_drift=qg / p.lambda_coupling**2,
        gamma_s=p.gamma_damping,
        eta_s=p.eta_nonmarkov,
        tau_grid=make_tau_grid(tau_max, tau_step),
    )


def doppler_detuning(sp: ScaledParams, p_recoil: float, tau: float):
    """Scaled detuning delta(p, tau) = delta0_s - doppler_coeff*p - grav_drift*tau."""
    return sp.delta0_s - sp.doppler_coeff * p_recoil - sp.grav_drift * tau


def coherent_weights(alpha: complex, n_cutoff: int) -> np.ndarray:
    """Coherent-state amplitudes w_n = exp(-|alpha|^2/2) alpha^n / sqrt(n!).

    Magnitudes are assembled in the log domain so large n and large |alpha|
    do not overflow the factorial.
    """
    if n_cutoff < 1:
        raise ParameterError(f"n_cutoff must be >= 1, got {n_cutoff}")
    n = np.arange(n_cutoff + 1)
    if alpha == 0:
        w = np.zeros(n_cutoff + 1, dtype=complex)
        w[0] = 1.0
        return w
    log_mag = -abs(alpha) ** 2 / 2.0 + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1.0)
    phase = n * np.angle(alpha)
    return np.exp(log_mag) * np.exp(1j * phase)


def gauss_quadrature_nodes(sigma0: float, count: int) -> list[MomentumNode]:
    """Quadrature nodes integrating exactly against the weight exp(-2p^2/sigma0^2).

    Gauss-Hermite nodes under the substitution x = sqrt(2)*p/sigma0; weights
    are renormalized to sum to exactly 1.  Degree <= 2*count-1 polynomials
    are integrated exactly, so count=21 resolves the Gaussian moments the
    observable averages need to well below 1e-10.
    """
    if count < 1:
        raise ParameterError(f"count must be >= 1, got {count}")
    if sigma0 <= 0.0 or not math.isfinite(sigma0):
        raise ParameterError(f"sigma0 must be positive, got {sigma0!r}")
    x, w = hermgauss(count)
    p = sigma0 * x / math.sqrt(2.0)
    w = w / w.sum()
    return [MomentumNode(p_recoil=float(pi), weight=float(wi)) for pi, wi in zip(p, w)]
