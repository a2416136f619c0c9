"""Dense brute-force oracle on a tiny truncated atom-field space.

Everything here is deliberately independent of the blocked engines: the
Hamiltonian is assembled from ladder operators on the product basis
|atom> x |m photons| (atom index 0 = excited, 1 = ground, interleaved as
index = 2*m + atom), split into the commuting pieces H1 (cavity part) and
H2 (detuning + coupling), and evolved either by full eigendecomposition
with the scalar kernels or by the literal series routine.  Used to
cross-validate the production engines on dimensions small enough that
nothing can hide.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh, expm

from .engines import kernel_exact, kernel_paper


def dense_hamiltonian_parts(
    omega_c_s: float, delta: float, n_fock: int
) -> tuple[np.ndarray, np.ndarray]:
    """(H1, H2) on atom x Fock(0..n_fock), dimension 2*(n_fock+1).

    H1 = omega_c_s*(n_hat + P_e - 1/2) and H2 = (delta/4)*sigma_z + coupling;
    [H1, H2] = 0 because both conserve the total excitation number.
    """
    dim = 2 * (n_fock + 1)
    h1 = np.zeros((dim, dim))
    h2 = np.zeros((dim, dim))
    for m in range(n_fock + 1):
        e_idx = 2 * m
        g_idx = 2 * m + 1
        h1[e_idx, e_idx] = omega_c_s * (m + 0.5)
        h1[g_idx, g_idx] = omega_c_s * (m - 0.5)
        h2[e_idx, e_idx] = delta / 4.0
        h2[g_idx, g_idx] = -delta / 4.0
        if m < n_fock:
            # <e,m| sigma_+ a |g,m+1> = sqrt(m+1)
            h2[e_idx, 2 * (m + 1) + 1] = np.sqrt(m + 1.0)
            h2[2 * (m + 1) + 1, e_idx] = np.sqrt(m + 1.0)
    return h1, h2


def dense_hamiltonian(omega_c_s: float, delta: float, n_fock: int) -> np.ndarray:
    h1, h2 = dense_hamiltonian_parts(omega_c_s, delta, n_fock)
    return h1 + h2


@dataclass(frozen=True, eq=False)
class SeriesOracleTables:
    """Dense power and factor tables for the super-operator composition.

    a1 = H1^2 + H2^2 and a2 = 2*H1*H2 split H^2; a3/a4 are the analogous
    even/odd split of H^4 in powers of H2.  Both pairs commute elementwise
    because [H1, H2] = 0, which is what lets the composition factorize.
    exp_ih2 realizes exp(-i*H2*tau), exp_ga2 realizes exp(-gamma*a2*tau),
    exp_gea4 realizes exp(-gamma*eta*a4*tau).
    """

    h: np.ndarray
    h1: np.ndarray
    h2: np.ndarray
    h_sq: np.ndarray
    h_quart: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    a3: np.ndarray
    a4: np.ndarray
    exp_ih2: np.ndarray
    exp_ga2: np.ndarray
    exp_gea4: np.ndarray


def series_oracle_tables(
    omega_c_s: float,
    delta: float,
    n_fock: int,
    gamma: float,
    eta: float,
    tau: float,
) -> SeriesOracleTables:
    """Assemble the dense tables at one parameter point (n_fock <= 3)."""
    if n_fock > 3:
        raise ValueError(f"oracle tables are restricted to n_fock <= 3, got {n_fock}")
    h1, h2 = dense_hamiltonian_parts(omega_c_s, delta, n_fock)
    h = h1 + h2
    h_sq = h @ h
    h_quart = h_sq @ h_sq
    h1_sq = h1 @ h1
    h2_sq = h2 @ h2
    a1 = h1_sq + h2_sq
    a2 = 2.0 * (h1 @ h2)
    a3 = h1_sq @ h1_sq + 6.0 * (h1_sq @ h2_sq) + h2_sq @ h2_sq
    a4 = 4.0 * (h1 @ h1_sq @ h2) + 4.0 * (h1 @ h2 @ h2_sq)
    return SeriesOracleTables(
        h=h,
        h1=h1,
        h2=h2,
        h_sq=h_sq,
        h_quart=h_quart,
        a1=a1,
        a2=a2,
        a3=a3,
        a4=a4,
        exp_ih2=expm(-1j * tau * h2),
        exp_ga2=expm(-gamma * tau * a2),
        exp_gea4=expm(-gamma * eta * tau * a4),
    )


def dense_spectral_evolve(
    rho0: np.ndarray,
    h: np.ndarray,
    gamma: float,
    eta: float,
    tau: float,
    kind: str = "exact",
    variant: str = "definitions_18_20",
    eta_q: float | None = None,
    exponent_clamp: float = 50.0,
) -> np.ndarray:
    """Evolve a dense density matrix via eigendecomposition plus scalar kernel.

    kind "exact" uses the commutator-generator kernel with quartic rate
    eta_q (defaults to gamma*eta); kind "paper" uses the literal composition
    kernel in the given variant.
    """
    energies, basis = eigh(h)
    rho_e = basis.conj().T @ np.asarray(rho0, dtype=complex) @ basis
    e_a = energies[:, None]
    e_b = energies[None, :]
    if kind == "exact":
        rate = gamma * eta if eta_q is None else eta_q
        kernel = kernel_exact(e_a, e_b, gamma, rate, tau)
    elif kind == "paper":
        kernel = kernel_paper(e_a, e_b, gamma, eta, tau, variant, exponent_clamp)
    else:
        raise ValueError(f"kind must be 'exact' or 'paper', got {kind!r}")
    return basis @ (rho_e * kernel) @ basis.conj().T


def dense_initial_density(weights: np.ndarray, n_fock: int) -> np.ndarray:
    """Atom excited, coherent field truncated to n_fock, on the product basis."""
    w = np.asarray(weights)[: n_fock + 1]
    dim = 2 * (n_fock + 1)
    psi = np.zeros(dim, dtype=complex)
    psi[0::2] = w
    return np.outer(psi, psi.conj())


def blocked_to_dense(ground_pop: float, blocks: np.ndarray, n_fock: int) -> np.ndarray:
    """Embed blocked data into the dense product basis (blocks above n_fock-1 cut)."""
    dim = 2 * (n_fock + 1)
    rho = np.zeros((dim, dim), dtype=complex)
    rho[1, 1] = ground_pop
    for n in range(min(blocks.shape[0], n_fock)):
        e_idx = 2 * n
        g_idx = 2 * (n + 1) + 1
        rho[e_idx, e_idx] = blocks[n, 0, 0]
        rho[e_idx, g_idx] = blocks[n, 0, 1]
        rho[g_idx, e_idx] = blocks[n, 1, 0]
        rho[g_idx, g_idx] = blocks[n, 1, 1]
    if blocks.shape[0] > n_fock:
        # top block loses its |g, n_fock+1> partner on the truncated space
        rho[2 * n_fock, 2 * n_fock] = blocks[n_fock, 0, 0]
    return rho
