"""Evolution engines for the blocked density operator.

Four engines share one interface:

- exact_spectral: closed solution of the master equation whose dissipators
  are the double and quadruple commutators of H; in the block eigenbasis
  every matrix element just picks up exp(-i*dE*tau - gamma*dE^2*tau -
  eta_q*dE^4*tau) with dE = E_a - E_b.
- paper_spectral: the literal six-factor super-operator composition, reduced
  to its scalar kernel in the eigenbasis.  For eta > 0 the composition is
  neither trace- nor Hermiticity-preserving; that is a measured property,
  not a bug, with opt-in hermitize/renormalize repairs.
- paper_series: the same composition evaluated per block by the literal
  truncated power sums around the factor exponentials (no eigenbasis).
- direct_integrator: fixed-step classical RK4 on the master equation itself,
  the only engine honoring a time-dependent detuning.

The spectral engines treat the detuning as frozen at the evaluation time
(quasi-static snapshot), exactly like the closed-form solution they realize;
they are therefore only comparable to the direct integrator at grav_drift=0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .blocks import BlockedDensity, BlockSpectrum, block_hamiltonian, block_spectrum
from .params import ScaledParams, doppler_detuning

ENGINE_MODES = ("exact_spectral", "paper_spectral", "paper_series", "direct_integrator")
SERIES_VARIANTS = ("definitions_18_20", "reconstruction_81_86")
QUARTIC_RATE_MODES = ("solution_gamma_eta", "eq12_eta")

RENORM_TRACE_FLOOR = 1e-14


class EngineError(RuntimeError):
    """Base class for runtime failures of an evolution engine."""


class EngineDivergenceError(EngineError):
    """A paper-literal exponent or series term grew beyond the clamp."""


class SeriesConvergenceError(EngineError):
    """The literal power sums did not settle within max_terms."""


class StepSizeError(EngineError):
    """The integrator's halving audit exceeded the requested tolerance."""


class RenormalizationError(EngineError):
    """Trace too small to renormalize against."""


@dataclass(frozen=True)
class EngineMode:
    """Engine selector plus the paper-literal options."""

    mode: str
    series_variant: str = "definitions_18_20"
    hermitize: bool = False
    renormalize: bool = False

    def __post_init__(self) -> None:
        if self.mode not in ENGINE_MODES:
            raise ValueError(f"mode must be one of {ENGINE_MODES}, got {self.mode!r}")
        if self.series_variant not in SERIES_VARIANTS:
            raise ValueError(
                f"series_variant must be one of {SERIES_VARIANTS}, "
                f"got {self.series_variant!r}"
            )


@dataclass(frozen=True)
class SeriesControls:
    """Truncation and divergence controls for the literal power sums."""

    max_terms: int = 400
    term_tol: float = 1e-14
    exponent_clamp: float = 50.0

    def __post_init__(self) -> None:
        if self.max_terms < 1:
            raise ValueError(f"max_terms must be >= 1, got {self.max_terms}")
        if not self.term_tol > 0.0:
            raise ValueError(f"term_tol must be > 0, got {self.term_tol}")


def quartic_rate(gamma: float, eta: float, mode: str) -> float:
    """Quadruple-commutator rate: gamma*eta (solution form) or eta (eq12 form)."""
    if mode not in QUARTIC_RATE_MODES:
        raise ValueError(f"quartic_rate_mode must be one of {QUARTIC_RATE_MODES}, got {mode!r}")
    return gamma * eta if mode == "solution_gamma_eta" else eta


def kernel_exact(e_a, e_b, gamma: float, eta_q: float, tau: float):
    """Exact spectral kernel exp(-i*dE*tau - gamma*dE^2*tau - eta_q*dE^4*tau)."""
    de = np.asarray(e_a) - np.asarray(e_b)
    return np.exp(-1j * de * tau - gamma * de**2 * tau - eta_q * de**4 * tau)


def paper_decay_rate(e_a, e_b, gamma: float, eta: float, variant: str = "definitions_18_20"):
    """Real decay rate of the paper-literal composition for the pair (E_a, E_b).

    The composition contributes -gamma*(E_a^2+E_b^2) + 2*gamma*E_a*E_b from
    the Gaussian factors plus, at eta > 0, -gamma*eta*(E_a^4+E_b^4) - 3
    *gamma*eta*X - gamma*eta*Y where Y = E_a*E_b^2 and X is E_a^2*E_b^2 for
    definitions_18_20 or E_a^2*E_b for reconstruction_81_86 (the two places
    the composition is written disagree; both are provided).  At eta = 0 this
    reduces to -gamma*(E_a-E_b)^2, the exact kernel.
    """
    if variant not in SERIES_VARIANTS:
        raise ValueError(f"variant must be one of {SERIES_VARIANTS}, got {variant!r}")
    e_a = np.asarray(e_a, dtype=float)
    e_b = np.asarray(e_b, dtype=float)
    rate = -gamma * (e_a**2 + e_b**2) + 2.0 * gamma * e_a * e_b
    ge = gamma * eta
    if ge != 0.0:
        x = e_a**2 * e_b**2 if variant == "definitions_18_20" else e_a**2 * e_b
        y = e_a * e_b**2
        rate = rate - ge * (e_a**4 + e_b**4) - 3.0 * ge * x - ge * y
    return rate


def kernel_paper(
    e_a,
    e_b,
    gamma: float,
    eta: float,
    tau: float,
    variant: str = "definitions_18_20",
    exponent_clamp: float = 50.0,
):
    """Paper-literal spectral kernel; raises on exponents growing past the clamp.

    The asymmetric E_a*E_b^2 term is unbounded above for sign-mixed spectra,
    so a growing real exponent is reported as divergence instead of silently
    overflowing.
    """
    expo = paper_decay_rate(e_a, e_b, gamma, eta, variant) * tau
    worst = float(np.max(expo)) if np.size(expo) else 0.0
    if worst > exponent_clamp:
        raise EngineDivergenceError(
            f"paper kernel exponent {worst:.4g} exceeds clamp {exponent_clamp:g}"
        )
    de = np.asarray(e_a) - np.asarray(e_b)
    return np.exp(-1j * de * tau + expo)


def hermitize(rho: BlockedDensity) -> tuple[BlockedDensity, float]:
    """Project onto the Hermitian part; returns (state, defect before repair)."""
    defect = rho.herm_defect()
    blocks = 0.5 * (rho.blocks + np.conj(np.swapaxes(rho.blocks, -1, -2)))
    return BlockedDensity(ground_pop=rho.ground_pop, blocks=blocks), defect


def renormalize(rho: BlockedDensity) -> tuple[BlockedDensity, float]:
    """Divide by Re(trace); returns (state, trace before repair)."""
    t = rho.trace().real
    if abs(t) < RENORM_TRACE_FLOOR:
        raise RenormalizationError(f"trace {t:.3e} too small to renormalize")
    return BlockedDensity(ground_pop=rho.ground_pop / t, blocks=rho.blocks / t), t


def dephase_blocks(rho: BlockedDensity, spectrum: BlockSpectrum) -> BlockedDensity:
    """Zero the eigenbasis coherences: the tau->infinity limit of every kernel."""
    u = spectrum.basis()
    rho_e = np.einsum("nji,njk,nkl->nil", u, rho.blocks, u)
    rho_e[:, 0, 1] = 0.0
    rho_e[:, 1, 0] = 0.0
    blocks = np.einsum("nij,njk,nlk->nil", u, rho_e, u)
    return BlockedDensity(ground_pop=rho.ground_pop, blocks=blocks)


def _power_series(
    rho: np.ndarray,
    h: np.ndarray,
    coeff: float,
    left_pow: int,
    right_pow: int,
    controls: SeriesControls,
) -> tuple[np.ndarray, int]:
    """Sum_k coeff^k/k! * H^lp^k rho H^rp^k by explicit term recursion."""
    if coeff == 0.0:
        return rho, 0
    left = h if left_pow == 1 else h @ h
    right = h if right_pow == 1 else h @ h
    scale = max(float(np.linalg.norm(rho)), 1e-30)
    limit = math.exp(min(controls.exponent_clamp, 700.0)) * scale
    acc = rho.copy()
    term = rho
    for k in range(1, controls.max_terms + 1):
        term = (coeff / k) * (left @ term @ right)
        acc = acc + term
        size = float(np.linalg.norm(term))
        if size <= controls.term_tol:
            return acc, k
        if size > limit:
            raise EngineDivergenceError(
                f"literal series term {k} has norm {size:.4g}, beyond "
                f"exp({controls.exponent_clamp:g}) x input scale; the "
                f"alternating sums cannot be evaluated in float arithmetic"
            )
    raise SeriesConvergenceError(
        f"literal series did not settle within {controls.max_terms} terms "
        f"(last term norm {size:.4g})"
    )


def evolve_series_literal(
    rho0: np.ndarray,
    h: np.ndarray,
    gamma: float,
    eta: float,
    tau: float,
    controls: SeriesControls | None = None,
    variant: str = "definitions_18_20",
    max_dim: int = 64,
) -> tuple[np.ndarray, int]:
    """Literal factor-and-series evolution of a dense density matrix.

    Applies the unitary and Gaussian factor exponentials, then the three
    power sums (quartic cross terms, then the symmetric quartic sum, then
    the 2*gamma*H rho H sum) by explicit term recursion.  Returns the
    evolved matrix and the total number of sum terms evaluated.  H must be
    Hermitian; the dense dimension is capped (default 64) because this is
    an oracle-grade routine, not the production path.
    """
    if variant not in SERIES_VARIANTS:
        raise ValueError(f"variant must be one of {SERIES_VARIANTS}, got {variant!r}")
    controls = controls or SeriesControls()
    h = np.asarray(h)
    rho = np.array(rho0, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or rho.shape != h.shape:
        raise ValueError(f"shape mismatch: rho {rho.shape}, h {h.shape}")
    if h.shape[0] > max_dim:
        raise ValueError(f"dense dimension {h.shape[0]} exceeds bound {max_dim}")
    if tau == 0.0:
        return rho, 0

    factor = expm(-1j * tau * h)
    ge = gamma * eta
    if gamma != 0.0:
        factor = factor @ expm(-gamma * tau * (h @ h))
    if ge != 0.0:
        h2 = h @ h
        factor = factor @ expm(-ge * tau * (h2 @ h2))
    rho = factor @ rho @ factor.conj().T

    terms = 0
    if ge != 0.0:
        rho, used = _power_series(rho, h, -ge * tau, 1, 2, controls)
        terms += used
        right_pow = 2 if variant == "definitions_18_20" else 1
        rho, used = _power_series(rho, h, -3.0 * ge * tau, 2, right_pow, controls)
        terms += used
    if gamma != 0.0:
        rho, used = _power_series(rho, h, 2.0 * gamma * tau, 1, 1, controls)
        terms += used
    return rho, terms


def _spectral_kernels(
    spectrum: BlockSpectrum,
    engine: EngineMode,
    gamma: float,
    eta: float,
    tau: float,
    quartic_mode: str,
    controls: SeriesControls,
) -> tuple[np.ndarray, float]:
    """Per-block 2x2 kernel matrices and the ground-sector kernel."""
    energies = spectrum.energies()
    e_a = energies[:, :, None]
    e_b = energies[:, None, :]
    e_g = spectrum.ground_energy
    if engine.mode == "exact_spectral":
        eta_q = quartic_rate(gamma, eta, quartic_mode)
        return kernel_exact(e_a, e_b, gamma, eta_q, tau), 1.0
    kernels = kernel_paper(
        e_a, e_b, gamma, eta, tau, engine.series_variant, controls.exponent_clamp
    )
    ground = kernel_paper(
        e_g, e_g, gamma, eta, tau, engine.series_variant, controls.exponent_clamp
    )
    return kernels, float(np.real(ground))


def evolve_blocked(
    rho0: BlockedDensity,
    spectrum: BlockSpectrum,
    engine: EngineMode,
    gamma: float,
    eta: float,
    tau: float,
    quartic_mode: str = "solution_gamma_eta",
    controls: SeriesControls | None = None,
) -> tuple[BlockedDensity, dict]:
    """Evolve a blocked density from 0 to tau under a snapshot spectrum.

    Dispatches on engine.mode (direct_integrator has its own trajectory
    entry point).  Returns the evolved state plus diagnostics with the raw
    trace, raw hermiticity defect, and series terms used; hermitize and
    renormalize flags are applied after the diagnostics are read.
    """
    if engine.mode == "direct_integrator":
        raise ValueError("direct_integrator evolves trajectories; use evolve_direct")
    controls = controls or SeriesControls()

    if engine.mode in ("exact_spectral", "paper_spectral"):
        u = spectrum.basis()
        rho_e = np.einsum("nji,njk,nkl->nil", u, rho0.blocks, u)
        kernels, ground_kernel = _spectral_kernels(
            spectrum, engine, gamma, eta, tau, quartic_mode, controls
        )
        blocks = np.einsum("nij,njk,nlk->nil", u, rho_e * kernels, u)
        state = BlockedDensity(
            ground_pop=rho0.ground_pop * ground_kernel, blocks=blocks
        )
        terms = 0
    else:  # paper_series
        u = spectrum.basis()
        h_blocks = np.einsum("nij,nj,nkj->nik", u, spectrum.energies(), u)
        blocks = np.empty_like(rho0.blocks)
        terms = 0
        for n in range(rho0.nblocks):
            blocks[n], used = evolve_series_literal(
                rho0.blocks[n], h_blocks[n], gamma, eta, tau,
                controls, engine.series_variant,
            )
            terms = max(terms, used)
        ground = np.array([[rho0.ground_pop]], dtype=complex)
        h_ground = np.array([[spectrum.ground_energy]])
        ground, used = evolve_series_literal(
            ground, h_ground, gamma, eta, tau, controls, engine.series_variant
        )
        terms = max(terms, used)
        state = BlockedDensity(ground_pop=float(ground[0, 0].real), blocks=blocks)

    diagnostics = {
        "trace_raw": state.trace(),
        "herm_defect_raw": state.herm_defect(),
        "series_terms": terms,
    }
    if engine.hermitize:
        state, _ = hermitize(state)
    if engine.renormalize:
        state, _ = renormalize(state)
    return state, diagnostics


def _commutator_superops(h_blocks: np.ndarray) -> np.ndarray:
    """Per-block superoperator of rho -> [H, rho] on row-major vec(rho)."""
    eye = np.eye(2)
    return np.stack(
        [np.kron(hb, eye) - np.kron(eye, hb.T) for hb in h_blocks]
    )


def _generator_superops(h_blocks: np.ndarray, gamma: float, eta_q: float) -> np.ndarray:
    """-i[H,.] - gamma [H,[H,.]] - eta_q [H,.]^4 as per-block 4x4 matrices."""
    c = _commutator_superops(h_blocks)
    gen = -1j * c
    if gamma != 0.0 or eta_q != 0.0:
        c2 = c @ c
        if gamma != 0.0:
            gen = gen - gamma * c2
        if eta_q != 0.0:
            gen = gen - eta_q * (c2 @ c2)
    return gen


def _rk4_step_map(gen: np.ndarray, h: float) -> np.ndarray:
    """Classical RK4 step for a constant linear generator: the degree-4 Taylor map."""
    eye = np.broadcast_to(np.eye(4, dtype=complex), gen.shape).copy()
    hg = h * gen
    step = eye + hg
    power = hg
    for k in (2.0, 3.0, 4.0):
        power = (power @ hg) / k
        step = step + power
    return step


def _check_tau_grid(tau_grid: np.ndarray, dt: float) -> np.ndarray:
    grid = np.asarray(tau_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 1:
        raise ValueError("tau_grid must be a 1-D sequence")
    if grid[0] != 0.0 or (grid.size > 1 and np.any(np.diff(grid) <= 0.0)):
        raise ValueError("tau_grid must start at 0 and increase strictly")
    if not dt > 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if grid.size > 1 and dt > float(np.min(np.diff(grid))) * (1.0 + 1e-12):
        raise ValueError("dt must not exceed the smallest grid spacing")
    return grid


def evolve_direct(
    rho0: BlockedDensity,
    sp: ScaledParams,
    p_recoil: float,
    tau_grid,
    dt: float,
    quartic_mode: str = "solution_gamma_eta",
    error_tol: float | None = None,
) -> list[BlockedDensity]:
    """Fixed-step classical RK4 trajectory of the master equation.

    Integrates d(rho)/dtau = -i[H(tau),rho] - gamma [H,[H,rho]] -
    eta_q [H,[H,[H,[H,rho]]]] blockwise.  Each grid interval is covered by
    round(spacing/dt) >= 1 equal steps so outputs land exactly on the grid.
    For grav_drift = 0 the generator is constant and the RK4 step is its
    degree-4 Taylor map, precomputed per block; otherwise the staged form
    samples H(tau) at the stage times.  The |g,0> sector commutes with
    everything and stays put.

    When error_tol is given, a shadow trajectory at dt/2 is propagated and
    a deviation beyond error_tol raises StepSizeError.
    """
    grid = _check_tau_grid(tau_grid, dt)
    gamma = sp.gamma_s
    eta_q = quartic_rate(gamma, sp.eta_s, quartic_mode)
    nb = rho0.nblocks
    indices = np.arange(nb)
    constant = sp.grav_drift == 0.0

    def assemble(tau: float) -> np.ndarray:
        delta = doppler_detuning(sp, p_recoil, tau)
        return block_hamiltonian(sp.omega_c_s, delta, indices)

    def rhs(h_blocks: np.ndarray, rho: np.ndarray) -> np.ndarray:
        c1 = h_blocks @ rho - rho @ h_blocks
        out = -1j * c1
        if gamma != 0.0 or eta_q != 0.0:
            c2 = h_blocks @ c1 - c1 @ h_blocks
            if gamma != 0.0:
                out = out - gamma * c2
            if eta_q != 0.0:
                c3 = h_blocks @ c2 - c2 @ h_blocks
                c4 = h_blocks @ c3 - c3 @ h_blocks
                out = out - eta_q * c4
        return out

    def rk4_interval(rho: np.ndarray, t0: float, spacing: float, nsteps: int) -> np.ndarray:
        h = spacing / nsteps
        t = t0
        for _ in range(nsteps):
            h1 = assemble(t)
            h2 = assemble(t + h / 2.0)
            h3 = assemble(t + h)
            k1 = rhs(h1, rho)
            k2 = rhs(h2, rho + (h / 2.0) * k1)
            k3 = rhs(h2, rho + (h / 2.0) * k2)
            k4 = rhs(h3, rho + h * k3)
            rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t += h
        return rho

    gen = _generator_superops(assemble(0.0), gamma, eta_q) if constant else None

    trajectory = [rho0.copy()]
    state = rho0.blocks.astype(complex).copy()
    shadow = state.copy() if error_tol is not None else None
    vec = state.reshape(nb, 4) if constant else None
    shadow_vec = vec.copy() if (constant and shadow is not None) else None

    for i in range(grid.size - 1):
        spacing = float(grid[i + 1] - grid[i])
        nsteps = max(1, round(spacing / dt))
        if constant:
            step = _rk4_step_map(gen, spacing / nsteps)
            for _ in range(nsteps):
                vec = np.einsum("nij,nj->ni", step, vec)
            state = vec.reshape(nb, 2, 2)
            if shadow_vec is not None:
                half = _rk4_step_map(gen, spacing / (2 * nsteps))
                for _ in range(2 * nsteps):
                    shadow_vec = np.einsum("nij,nj->ni", half, shadow_vec)
                shadow = shadow_vec.reshape(nb, 2, 2)
        else:
            state = rk4_interval(state, float(grid[i]), spacing, nsteps)
            if shadow is not None:
                shadow = rk4_interval(shadow, float(grid[i]), spacing, 2 * nsteps)
        if shadow is not None:
            deviation = float(np.abs(state - shadow).max())
            if deviation > error_tol:
                raise StepSizeError(
                    f"halving audit at tau={grid[i + 1]:g}: deviation "
                    f"{deviation:.3e} exceeds tolerance {error_tol:g}"
                )
        trajectory.append(
            BlockedDensity(ground_pop=rho0.ground_pop, blocks=state.copy())
        )
    return trajectory


def snapshot_spectrum(sp: ScaledParams, p_recoil: float, tau: float, nblocks: int) -> BlockSpectrum:
    """Spectrum at the frozen detuning delta(p, tau) (quasi-static rule)."""
    delta = float(doppler_detuning(sp, p_recoil, tau))
    return block_spectrum(sp.omega_c_s, delta, nblocks)
