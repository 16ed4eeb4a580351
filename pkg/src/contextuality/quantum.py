"""Empirical models from multi-qubit pure states and equatorial measurements.

Each qubit is measured along ``cos(phi) X + sin(phi) Y``.  Outcome ``"0"``
is the +1 eigenvalue, with eigenvector ``(|0> + e^{i phi}|1>)/sqrt(2)``.
Contexts of the (n,2,2) scenario are setting vectors listed with the first
qubit most significant, matching :func:`contextuality.scenario.bell_scenario`.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .empirical import QUANTUM_TOL, EmpiricalModel
from .errors import InvalidModel, SizeLimitExceeded
from .fraction import noncontextual_fraction
from .scenario import bell_scenario

MAX_QUBITS = 12


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        n = int(round(math.log2(amp.size))) if amp.size else 0
        if amp.ndim != 1 or amp.size < 2 or 2**n != amp.size:
            raise InvalidModel("amplitude vector length must be a power of two")
        if abs(np.linalg.norm(amp) - 1) > 1e-12:
            raise InvalidModel("state must have unit norm")
        object.__setattr__(self, "amplitudes", amp)

    @property
    def n_qubits(self) -> int:
        return int(round(math.log2(self.amplitudes.size)))

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n_qubits)


def ghz_state(n: int) -> PureState:
    """(|0...0> + |1...1>)/sqrt(2); n = 2 gives the Bell state |Phi+>."""
    if n < 2:
        raise ValueError("GHZ states need at least two qubits")
    if n > MAX_QUBITS:
        raise SizeLimitExceeded(f"{n} qubits exceeds the amplitude guard {MAX_QUBITS}")
    amp = np.zeros(2**n, dtype=complex)
    amp[0] = amp[-1] = 1 / math.sqrt(2)
    return PureState(amp)


def bell_state() -> PureState:
    return ghz_state(2)


def phase_rotation(state: PureState, phi: float) -> PureState:
    """Rotate every qubit by ``phi`` about the Z axis, diag(e^{-i phi/2}, e^{i phi/2})."""
    n = state.n_qubits
    ones = np.array([bin(k).count("1") for k in range(2**n)])
    return PureState(state.amplitudes * np.exp(1j * phi * (ones - n / 2)))


def state_from_selector(selector: str) -> PureState:
    """``"bell"`` or ``"ghz<n>"``."""
    selector = selector.strip().lower()
    if selector == "bell":
        return bell_state()
    if selector.startswith("ghz") and selector[3:].isdigit():
        return ghz_state(int(selector[3:]))
    raise ValueError(f"unknown state selector {selector!r}")


def _basis_change(phi: float) -> np.ndarray:
    # rows are <+_phi| and <-_phi|
    w = np.exp(-1j * phi)
    return np.array([[1, w], [1, -w]]) / math.sqrt(2)


def _normalise_settings(settings, n):
    settings = np.asarray(settings, dtype=float)
    if settings.shape == (2,):
        settings = np.tile(settings, (n, 1))
    if settings.shape != (n, 2):
        raise ValueError("give one pair of angles, or one pair per qubit")
    return settings


def context_distribution(state: PureState, angles: Sequence[float]) -> np.ndarray:
    """Born-rule outcome distribution for one angle per qubit (first qubit most significant)."""
    psi = state.tensor()
    for j, phi in enumerate(angles):
        psi = np.moveaxis(np.tensordot(_basis_change(phi), psi, axes=([1], [j])), 0, j)
    return (np.abs(psi) ** 2).reshape(-1)


def born_model(state: PureState, settings) -> EmpiricalModel:
    """Empirical model on the (n,2,2) scenario.

    ``settings`` is one pair ``(phi1, phi2)`` shared by all qubits or an
    ``(n, 2)`` array of per-qubit pairs.
    """
    n = state.n_qubits
    settings = _normalise_settings(settings, n)
    scn = bell_scenario(n, 2, 2)
    tables = []
    for q in itertools.product((0, 1), repeat=n):
        angles = [settings[j, q[j]] for j in range(n)]
        tables.append(context_distribution(state, angles))
    return EmpiricalModel(scn, tables, tol=QUANTUM_TOL)


def correlator(e: EmpiricalModel, context: int) -> float:
    """E = sum_s (-1)^{parity(s)} e_C(s) for a binary-outcome context."""
    t = np.asarray(e.tables[context], dtype=float)
    signs = np.array([(-1) ** bin(k).count("1") for k in range(t.size)])
    return float(signs @ t)


def grid_angles(resolution: int) -> np.ndarray:
    return np.arange(resolution) * math.pi / resolution


def _cf_at(args):
    amplitudes, phi1, phi2 = args
    e = born_model(PureState(amplitudes), (phi1, phi2))
    return float(noncontextual_fraction(e).cf)


def sweep(state: PureState, resolution: int, jobs: int = 1) -> np.ndarray:
    """Contextual fraction over the grid (phi1, phi2) in {i pi / G}^2.

    Returns a ``G x G`` array whose entry ``[i, j]`` is the value at
    ``(i pi/G, j pi/G)``.
    """
    phis = grid_angles(resolution)
    tasks = [(state.amplitudes, p1, p2) for p1 in phis for p2 in phis]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            values = list(pool.map(_cf_at, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        values = [_cf_at(t) for t in tasks]
    return np.array(values).reshape(resolution, resolution)


def sweep_rows(grid: np.ndarray) -> list:
    """Row-major ``(phi1, phi2, cf)`` triples of a sweep grid."""
    phis = grid_angles(grid.shape[0])
    return [(phis[i], phis[j], grid[i, j]) for i in range(grid.shape[0])
            for j in range(grid.shape[1])]


def sweep_maxima(grid: np.ndarray, tol: float = 1e-6) -> list:
    """Unordered angle pairs ``{phi1, phi2}`` at which the grid attains its maximum."""
    top = grid.max()
    phis = grid_angles(grid.shape[0])
    found = []
    for i, j in zip(*np.nonzero(grid >= top - tol)):
        pair = tuple(sorted((phis[i], phis[j])))
        if pair not in found:
            found.append(pair)
    return found


def ghz_extremal_angles(n: int, k: int) -> tuple:
    """((n+k) pi / 2n, k pi / 2n)."""
    return ((n + k) * math.pi / (2 * n), k * math.pi / (2 * n))


def ghz_extremal_check(n: int, k: int, tol: float = 1e-6) -> bool:
    """Whether GHZ(n) measured at the angle pair for ``k`` has CF = 1."""
    if not 2 < n <= 6:
        raise ValueError("supported for 2 < n <= 6")
    if not 0 <= k < n:
        raise ValueError("k must satisfy 0 <= k < n")
    e = born_model(ghz_state(n), ghz_extremal_angles(n, k))
    return abs(noncontextual_fraction(e).cf - 1) <= tol
