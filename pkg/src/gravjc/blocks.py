"""Excitation-block structure of the atom-field Hamiltonian.

The total excitation number a^dag a + |e><e| is conserved, so the
interaction-picture Hamiltonian splits into 2x2 blocks over the pairs
{|e,n>, |g,n+1>} plus the dynamically decoupled singleton |g,0>.  In scaled
units the block reads

    H_n = omega_c_s*(n+1/2)*I + [[delta/4, sqrt(n+1)], [sqrt(n+1), -delta/4]]

with eigenvalues omega_c_s*(n+1/2) +- Omega_n, Omega_n = sqrt((delta/4)^2+n+1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def rabi_frequency(delta: float, n) -> np.ndarray | float:
    """Generalized Rabi frequency Omega_n = sqrt((delta/4)^2 + n + 1)."""
    return np.sqrt((delta / 4.0) ** 2 + np.asarray(n) + 1.0)


def block_hamiltonian(omega_c_s: float, delta: float, n) -> np.ndarray:
    """Assemble the 2x2 block(s) for index n (scalar or array, shape (...,2,2))."""
    n = np.asarray(n, dtype=float)
    h = np.zeros(n.shape + (2, 2))
    shift = omega_c_s * (n + 0.5)
    h[..., 0, 0] = shift + delta / 4.0
    h[..., 1, 1] = shift - delta / 4.0
    coupling = np.sqrt(n + 1.0)
    h[..., 0, 1] = coupling
    h[..., 1, 0] = coupling
    return h


@dataclass(frozen=True, eq=False)
class BlockSpectrum:
    """Dressed eigendata of all blocks at one detuning snapshot.

    Arrays are indexed by block n = 0..nblocks-1.  The plus eigenvector is
    (mix_cos, mix_sin), the minus one (-mix_sin, mix_cos); both components
    are positive because the coupling sqrt(n+1) never vanishes.
    ground_energy is the |g,0> singleton energy -omega_c_s/2 - delta/4.
    """

    rabi: np.ndarray
    eig_plus: np.ndarray
    eig_minus: np.ndarray
    mix_cos: np.ndarray
    mix_sin: np.ndarray
    ground_energy: float

    @property
    def nblocks(self) -> int:
        return self.rabi.shape[0]

    def energies(self) -> np.ndarray:
        """Per-block eigenvalue pairs, shape (nblocks, 2), order (+, -)."""
        return np.stack([self.eig_plus, self.eig_minus], axis=-1)

    def basis(self) -> np.ndarray:
        """Per-block orthogonal eigenvector matrices U, shape (nblocks, 2, 2).

        Columns are the (+, -) eigenvectors, so U.T @ H_n @ U is diagonal.
        """
        u = np.empty((self.nblocks, 2, 2))
        u[:, 0, 0] = self.mix_cos
        u[:, 1, 0] = self.mix_sin
        u[:, 0, 1] = -self.mix_sin
        u[:, 1, 1] = self.mix_cos
        return u


def block_spectrum(omega_c_s: float, delta: float, nblocks: int) -> BlockSpectrum:
    """Closed-form spectrum of blocks 0..nblocks-1 at detuning delta."""
    if nblocks < 1:
        raise ValueError(f"nblocks must be >= 1, got {nblocks}")
    n = np.arange(nblocks, dtype=float)
    d = delta / 4.0
    coupling = np.sqrt(n + 1.0)
    omega = np.hypot(d, coupling)
    shift = omega_c_s * (n + 0.5)
    # Half-angle form; omega + d > 0 always holds since coupling >= 1.
    mix_cos = np.sqrt((omega + d) / (2.0 * omega))
    mix_sin = coupling / (2.0 * omega * mix_cos)
    return BlockSpectrum(
        rabi=omega,
        eig_plus=shift + omega,
        eig_minus=shift - omega,
        mix_cos=mix_cos,
        mix_sin=mix_sin,
        ground_energy=-omega_c_s / 2.0 - d,
    )


def block_propagator(delta: float, n: int, tau: float) -> np.ndarray:
    """exp(-i*H2*tau) for one block, H2 = [[delta/4, g], [g, -delta/4]].

    Closed form cos(Omega*tau)*I - i*sin(Omega*tau)/Omega * H2; unitary for
    all real arguments.
    """
    d = delta / 4.0
    g = np.sqrt(n + 1.0)
    omega = np.hypot(d, g)
    h2 = np.array([[d, g], [g, -d]])
    phase = np.sin(omega * tau) / omega
    return np.cos(omega * tau) * np.eye(2) - 1j * phase * h2


@dataclass(eq=False)
class BlockedDensity:
    """Block-diagonal density data for a single momentum node.

    blocks has shape (nblocks, 2, 2) in the {|e,n>, |g,n+1>} basis;
    ground_pop is the |g,0> population.  The paper-literal engines produce
    complex traces and non-Hermitian blocks, so both diagnostics are exposed
    here rather than assumed away.
    """

    ground_pop: float
    blocks: np.ndarray

    @property
    def nblocks(self) -> int:
        return self.blocks.shape[0]

    def copy(self) -> "BlockedDensity":
        return BlockedDensity(ground_pop=self.ground_pop, blocks=self.blocks.copy())

    def trace(self) -> complex:
        return complex(self.ground_pop + self.blocks.trace(axis1=-2, axis2=-1).sum())

    def herm_defect(self) -> float:
        """Max elementwise |rho - rho^dag| over all blocks."""
        defect = self.blocks - np.conj(np.swapaxes(self.blocks, -1, -2))
        return float(np.abs(defect).max())


def initial_blocked_density(weights: np.ndarray) -> BlockedDensity:
    """Atom excited, field coherent: block n carries [[|w_n|^2, 0], [0, 0]].

    Identical for every momentum node; momentum enters only through the
    detuning during evolution.
    """
    pn = np.abs(np.asarray(weights)) ** 2
    blocks = np.zeros((pn.shape[0], 2, 2), dtype=complex)
    blocks[:, 0, 0] = pn
    return BlockedDensity(ground_pop=0.0, blocks=blocks)
