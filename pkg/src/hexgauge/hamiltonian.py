"""Spin-model Hamiltonian assembly in the real-space basis.

Closed BC (energies in units of 1/a, lam = a*g^2):

    aH = h_plus * sum P+ - h_pp * sum P+ (P+ + P+ + P+) + h_x * sum (-1/2)^c sigma^x

with outside spins fixed down.  Periodic BC drops the reference constant:

    aH = J * sum sigma^z (sigma^z + sigma^z + sigma^z) + h_x * sum (-1/2)^c sigma^x

built directly on the global-flip quotient basis.  The exponent c counts
up->down transitions around the six-neighbor chain and is invariant under
the global flip, which is what makes the quotient construction consistent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.io
import scipy.sparse

from .lattice import BoundaryCondition, LatticeConfig, bonds, neighbor_chain6
from .spinbasis import canonicalize, enumerate_basis

SQRT3 = math.sqrt(3.0)


def h_plus(lam: float) -> float:
    """Single flipped-plaquette excitation energy, 27*sqrt(3)/8 * lam."""
    return 27.0 * SQRT3 / 8.0 * lam


def h_plusplus(lam: float) -> float:
    """Adjacent up-pair bond energy, 9*sqrt(3)/8 * lam."""
    return 9.0 * SQRT3 / 8.0 * lam


def h_x(lam: float) -> float:
    """Magnetic (plaquette flip) coupling, 4*sqrt(3)/(9*lam)."""
    return 4.0 * SQRT3 / (9.0 * lam)


def j_zz(lam: float) -> float:
    """Ising bond coupling of the periodic form, -9*sqrt(3)/32 * lam."""
    return -9.0 * SQRT3 / 32.0 * lam


@dataclass
class SparseOperator:
    """Real symmetric sparse matrix over an explicit, ordered basis."""

    matrix: scipy.sparse.csr_matrix
    basis: list[int]
    cfg: LatticeConfig
    label: str

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def index_of(self, state: int) -> int:
        # Both supported bases are contiguous integer ranges.
        return state

    def export_mtx(self, path: str):
        """MatrixMarket coordinate export (symmetric real)."""
        scipy.io.mmwrite(path, scipy.sparse.coo_matrix(self.matrix), field="real", symmetry="symmetric")


@lru_cache(maxsize=None)
def chain_table(cfg: LatticeConfig) -> tuple[tuple[int, ...], ...]:
    """Per-plaquette six-neighbor chain as site indices (-1 = outside)."""
    table = []
    for p in range(cfg.n_plaq):
        table.append(tuple(
            -1 if q is None else cfg.site(*q)
            for q in neighbor_chain6(cfg.coord(p), cfg)
        ))
    return tuple(table)


def chain_bits(s: int, c: tuple[int, int], cfg: LatticeConfig) -> list[int]:
    """Occupations of the six-neighbor chain of c; outside slots read down."""
    sites = chain_table(cfg)[cfg.site(*c)]
    return [0 if q < 0 else (s >> q) & 1 for q in sites]


def c_value(s: int, c: tuple[int, int], cfg: LatticeConfig) -> int:
    """Count of chain positions K with neighbor K up and K+1 (mod 6) down."""
    b = chain_bits(s, c, cfg)
    return sum(b[k] & (1 - b[(k + 1) % 6]) for k in range(6))


def magnetic_coefficient(s: int, c: tuple[int, int], cfg: LatticeConfig) -> float:
    """(-1/2)^c, the plaquette-flip matrix element at c on state s."""
    return (-0.5) ** c_value(s, c, cfg)


def _zz_sum(s: int, bond_list) -> int:
    """Integer sum of z_p * z_q over all bond keys (z = +-1, outside = -1)."""
    total = 0
    for p, _, q in bond_list:
        zp = 2 * ((s >> p) & 1) - 1
        zq = -1 if q < 0 else 2 * ((s >> q) & 1) - 1
        total += zp * zq
    return total


def _up_pair_count(s: int, bond_list) -> int:
    total = 0
    for p, _, q in bond_list:
        if q >= 0 and (s >> p) & 1 and (s >> q) & 1:
            total += 1
    return total


def closed_diagonal(s: int, cfg: LatticeConfig, bond_list=None) -> float:
    """h_plus * n_up - h_pp * (up-up bond count), the closed-BC diagonal."""
    if bond_list is None:
        bond_list = bonds(cfg)
    return h_plus(cfg.lam) * s.bit_count() - h_plusplus(cfg.lam) * _up_pair_count(s, bond_list)


def build_closed(cfg: LatticeConfig) -> SparseOperator:
    """Closed-BC Hamiltonian on the full 2^N basis."""
    if cfg.bc is not BoundaryCondition.CLOSED:
        raise ValueError("build_closed requires closed BC")
    return _assemble_full(cfg, closed=True, label="closed-full")


def build_periodic_full(cfg: LatticeConfig) -> SparseOperator:
    """Periodic Hamiltonian on the full 2^N basis, flip redundancy kept.

    Useful as the target unitary generator for circuit verification, where
    the quotient cannot be taken; the physical spectrum is the flip-even
    half of this operator's spectrum.
    """
    _require_nondegenerate(cfg)
    return _assemble_full(cfg, closed=False, label="periodic-full")


def _flip_coefficients(cfg: LatticeConfig, s: int, chains, powers) -> list[float]:
    """h_x * (-1/2)^c for every plaquette, on state s."""
    out = []
    for sites in chains:
        b = [0 if q < 0 else (s >> q) & 1 for q in sites]
        c = (
            (b[0] & (1 - b[1])) + (b[1] & (1 - b[2])) + (b[2] & (1 - b[3]))
            + (b[3] & (1 - b[4])) + (b[4] & (1 - b[5])) + (b[5] & (1 - b[0]))
        )
        out.append(powers[c])
    return out


def build_periodic(cfg: LatticeConfig) -> SparseOperator:
    """Periodic Hamiltonian on the 2^(N-1) flip-quotient basis."""
    _require_nondegenerate(cfg)
    lam = cfg.lam
    basis = enumerate_basis(cfg)
    bond_list = bonds(cfg)
    jz = j_zz(lam)
    chains = chain_table(cfg)
    powers = [h_x(lam) * (-0.5) ** c for c in range(7)]
    n = cfg.n_plaq
    mask = (1 << n) - 1
    top = 1 << (n - 1)
    rows, cols, vals = [], [], []
    for s in basis:
        rows.append(s)
        cols.append(s)
        vals.append(jz * _zz_sum(s, bond_list))
        coeffs = _flip_coefficients(cfg, s, chains, powers)
        for p in range(n):
            t = s ^ (1 << p)
            if t & top:  # canonical representative has the top bit clear
                t ^= mask
            rows.append(t)
            cols.append(s)
            vals.append(coeffs[p])
    dim = len(basis)
    mat = scipy.sparse.coo_matrix((vals, (rows, cols)), shape=(dim, dim)).tocsr()
    mat.sort_indices()
    return SparseOperator(mat, basis, cfg, "periodic-quotient")


def build_hamiltonian(cfg: LatticeConfig) -> SparseOperator:
    """The Hamiltonian in the working basis of the configured BC."""
    if cfg.bc is BoundaryCondition.CLOSED:
        return build_closed(cfg)
    return build_periodic(cfg)


def _require_nondegenerate(cfg: LatticeConfig):
    if not cfg.periodic:
        raise ValueError("periodic builder requires periodic BC")
    if cfg.nx < 2 or cfg.ny < 2:
        # With nx or ny = 1 a plaquette appears in its own neighbor chain
        # and the flip term stops being a symmetric operator.
        raise ValueError("periodic lattices need nx >= 2 and ny >= 2")


def _assemble_full(cfg: LatticeConfig, closed: bool, label: str) -> SparseOperator:
    lam = cfg.lam
    n = cfg.n_plaq
    bond_list = bonds(cfg)
    jz = j_zz(lam)
    chains = chain_table(cfg)
    powers = [h_x(lam) * (-0.5) ** c for c in range(7)]
    rows, cols, vals = [], [], []
    for s in range(1 << n):
        if closed:
            d = closed_diagonal(s, cfg, bond_list)
        else:
            d = jz * _zz_sum(s, bond_list)
        if d != 0.0:
            rows.append(s)
            cols.append(s)
            vals.append(d)
        coeffs = _flip_coefficients(cfg, s, chains, powers)
        for p in range(n):
            rows.append(s ^ (1 << p))
            cols.append(s)
            vals.append(coeffs[p])
    mat = scipy.sparse.coo_matrix((vals, (rows, cols)), shape=(1 << n, 1 << n)).tocsr()
    mat.sort_indices()
    return SparseOperator(mat, list(range(1 << n)), cfg, label)


def translation_permutation(cfg: LatticeConfig, rx: int, ry: int, quotient: bool) -> np.ndarray:
    """perm[s] = index of T_x^rx T_y^ry |s> in the chosen basis."""
    from .spinbasis import translate

    if quotient:
        states = enumerate_basis(cfg)
        return np.array(
            [canonicalize(translate(s, rx, ry, cfg), cfg)[0] for s in states], dtype=np.int64
        )
    return np.array(
        [translate(s, rx, ry, cfg) for s in range(1 << cfg.n_plaq)], dtype=np.int64
    )
