"""Measured quantities: atomic inversion, photon statistics, momentum averages.

Every observable reads only the block-diagonal (n,n) sectors, which is exact
here because all implemented generators preserve the sectors.  Photon
probabilities combine |e,n> and |g,n> populations across neighbouring
blocks, so P has length nblocks+1 (photon numbers 0..nblocks).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blocks import BlockedDensity, rabi_frequency
from .params import MomentumNode


@dataclass(frozen=True, eq=False)
class ObservableSeries:
    """Per-engine time series of everything the CSV output carries."""

    tau: np.ndarray
    w: np.ndarray
    q: np.ndarray
    mean_n: np.ndarray
    trace_re: np.ndarray
    herm_defect: np.ndarray


def population_inversion(rho: BlockedDensity) -> float:
    """W = sum_n <e,n|rho|e,n> - sum_n <g,n|rho|g,n>, from real parts."""
    excited = float(np.real(rho.blocks[:, 0, 0]).sum())
    ground = float(np.real(rho.blocks[:, 1, 1]).sum()) + rho.ground_pop
    return excited - ground


def photon_distribution(rho: BlockedDensity) -> np.ndarray:
    """P(n) over n = 0..nblocks; sums to the trace (1 for the exact engine)."""
    nb = rho.nblocks
    p = np.zeros(nb + 1)
    p[:nb] += np.real(rho.blocks[:, 0, 0])
    p[1:] += np.real(rho.blocks[:, 1, 1])
    p[0] += rho.ground_pop
    return p


def mandel_q(p: np.ndarray) -> float:
    """Mandel parameter of a photon distribution, NaN when <n> = 0.

    P is renormalized by its sum before the moments so the paper-literal
    engines (whose raw P sums to the decaying trace) yield a statistics
    measure rather than an artifact of trace loss.
    """
    p = np.asarray(p, dtype=float)
    total = p.sum()
    if not total > 1e-12:
        raise ValueError(f"photon distribution sums to {total:.3e}; moments undefined")
    p = p / total
    n = np.arange(p.shape[0])
    mean = float(n @ p)
    if mean == 0.0:
        return float("nan")
    second = float((n * n) @ p)
    return (second - mean**2) / mean - 1.0


def mean_photon_number(p: np.ndarray) -> float:
    """First moment of the sum-renormalized distribution."""
    p = np.asarray(p, dtype=float)
    total = p.sum()
    if not total > 1e-12:
        raise ValueError(f"photon distribution sums to {total:.3e}; moments undefined")
    return float(np.arange(p.shape[0]) @ (p / total))


def analytic_inversion_undamped(weights: np.ndarray, delta: float, tau):
    """Closed-form W(tau) for gamma = eta = 0 at fixed detuning.

    W(tau) = sum_n |w_n|^2 [ (delta/4)^2 + (n+1) cos(2 Omega_n tau) ] / Omega_n^2,
    the standard detuned collapse-revival sum; used as an independent oracle
    for every engine's undamped limit.
    """
    pn = np.abs(np.asarray(weights)) ** 2
    n = np.arange(pn.shape[0])
    omega = rabi_frequency(delta, n)
    d_sq = (delta / 4.0) ** 2
    tau = np.asarray(tau, dtype=float)
    cos_part = np.cos(2.0 * np.outer(tau, omega))
    series = (pn / omega**2) * (d_sq + (n + 1.0) * cos_part)
    out = series.sum(axis=-1)
    return float(out[()]) if out.ndim == 0 else out


def momentum_average(values, nodes: list[MomentumNode]) -> float:
    """Fixed-order weighted sum over momentum nodes."""
    values = list(values)
    if len(values) != len(nodes):
        raise ValueError(f"{len(values)} values for {len(nodes)} nodes")
    return float(sum(node.weight * value for node, value in zip(nodes, values)))


def average_blocked(states: list[BlockedDensity], nodes: list[MomentumNode]) -> BlockedDensity:
    """Momentum-averaged mixture of per-node blocked densities.

    W, P(n) and the trace are linear in rho, so averaging states first and
    reading observables after is identical to averaging the observables;
    Mandel Q is deliberately computed from the averaged P (the statistics of
    the physical mixture), which this enables.
    """
    if len(states) != len(nodes):
        raise ValueError(f"{len(states)} states for {len(nodes)} nodes")
    blocks = sum(node.weight * state.blocks for node, state in zip(nodes, states))
    ground = sum(node.weight * state.ground_pop for node, state in zip(nodes, states))
    return BlockedDensity(ground_pop=float(ground), blocks=blocks)
