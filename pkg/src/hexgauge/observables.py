"""Wilson-loop operators, diagonalization, time evolution, level statistics.

Operators act in the working basis of the configured boundary condition:
the full 2^N basis for closed BC, the flip-quotient basis for periodic.
Evolution is exact (spectral decomposition), so norm and energy are
conserved to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .hamiltonian import SparseOperator, c_value
from .lattice import LatticeConfig, neighbor_chain8
from .spinbasis import canonicalize, enumerate_basis

RESIDUAL_TOL = 1e-8
DENSE_MAX_DIM = 1 << 16


def basis_label(cfg: LatticeConfig) -> str:
    kind = "periodic-quotient" if cfg.periodic else "closed-full"
    return f"{kind}:{cfg.nx}x{cfg.ny}"


@dataclass
class StateVector:
    """Complex amplitudes over a tagged basis."""

    amplitudes: np.ndarray
    label: str

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        return StateVector(self.amplitudes / self.norm(), self.label)

    def overlap(self, other: "StateVector") -> complex:
        self._check(other)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def _check(self, other: "StateVector"):
        if self.label != other.label:
            raise ValueError(f"basis mismatch: {self.label} vs {other.label}")


def basis_state(cfg: LatticeConfig, s: int) -> StateVector:
    """The unit vector for spin word s (canonicalized under periodic BC)."""
    if cfg.periodic:
        s, _ = canonicalize(s, cfg)
    dim = len(enumerate_basis(cfg))
    amps = np.zeros(dim, dtype=complex)
    amps[s] = 1.0
    return StateVector(amps, basis_label(cfg))


@dataclass
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None
    label: str

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def check_residuals(self, op: SparseOperator) -> float:
        """max ||H v - E v|| over retained unit eigenvectors."""
        if self.eigenvectors is None:
            raise ValueError("no eigenvectors retained")
        r = op.matrix @ self.eigenvectors - self.eigenvectors * self.eigenvalues
        return float(np.max(np.linalg.norm(r, axis=0)))


def diagonalize(op: SparseOperator, mode: str = "full", k: int = 6, vectors: bool = True) -> Spectrum:
    """Eigenvalues (ascending) of a real symmetric operator.

    mode "full": dense diagonalization, allowed up to dim 2^16.
    mode "lowest": k extremal (smallest-algebraic) eigenpairs, iterative.
    """
    label = getattr(op, "label", "operator")
    if mode == "full":
        if op.dim > DENSE_MAX_DIM:
            raise ValueError(f"dimension {op.dim} too large for full diagonalization")
        if vectors:
            vals, vecs = np.linalg.eigh(op.to_dense())
        else:
            vals, vecs = np.linalg.eigvalsh(op.to_dense()), None
    elif mode == "lowest":
        try:
            vals, vecs = scipy.sparse.linalg.eigsh(op.matrix.astype(float), k=k, which="SA")
        except scipy.sparse.linalg.ArpackNoConvergence as err:
            raise RuntimeError(f"eigensolver did not converge: {err}") from err
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
        if not vectors:
            vecs = None
    else:
        raise ValueError(f"unknown mode {mode!r}")
    spec = Spectrum(np.asarray(vals, float), vecs, label)
    if vecs is not None:
        resid = spec.check_residuals(op)
        scale = max(1.0, float(np.max(np.abs(vals))))
        if resid > RESIDUAL_TOL * scale:
            raise RuntimeError(f"eigen residual {resid:.3e} exceeds tolerance")
    return spec


# ---------------------------------------------------------------------------
# Wilson loops in real space
# ---------------------------------------------------------------------------

def _o1_action(s: int, c: tuple[int, int], cfg: LatticeConfig) -> tuple[int, float]:
    """(target basis state, amplitude) of O_1 at c applied to |s>."""
    amp = -((-0.5) ** c_value(s, c, cfg))
    t = s ^ (1 << cfg.site(*c))
    if cfg.periodic:
        t, _ = canonicalize(t, cfg)
    return t, amp


def _o2_action(s: int, c: tuple[int, int], cfg: LatticeConfig) -> tuple[int, float]:
    """(target, amplitude) of O_2 on the pair c, c+(0,1) applied to |s>."""
    i, j = c
    chain = neighbor_chain8(c, cfg)
    zs = []
    for q in chain:
        zs.append(-1 if q is None else 2 * ((s >> cfg.site(*q)) & 1) - 1)
    c8 = sum(1 for k in range(8) if zs[k] == 1 and zs[(k + 1) % 8] == -1)
    here = cfg.site(i, j)
    if cfg.periodic:
        above = cfg.site(i, (j + 1) % cfg.ny)
    else:
        above = cfg.site(i, j + 1)
    z0 = 2 * ((s >> here) & 1) - 1
    z1 = 2 * ((s >> above) & 1) - 1
    amp = -((-0.5) ** c8) * (1.0 + 3.0 * z0 * z1) / 4.0
    t = s ^ (1 << here) ^ (1 << above)
    if cfg.periodic:
        t, _ = canonicalize(t, cfg)
    return t, amp


def _apply_linear(action, psi, c, cfg: LatticeConfig) -> StateVector:
    if isinstance(psi, StateVector):
        out = np.zeros_like(psi.amplitudes)
        for s in np.nonzero(psi.amplitudes)[0]:
            t, amp = action(int(s), c, cfg)
            out[t] += amp * psi.amplitudes[s]
        return StateVector(out, psi.label)
    t, amp = action(int(psi), c, cfg)
    dim = len(enumerate_basis(cfg))
    out = np.zeros(dim, dtype=complex)
    out[t] = amp
    return StateVector(out, basis_label(cfg))


def wilson1_apply(psi, c: tuple[int, int], cfg: LatticeConfig) -> StateVector:
    """O_1 at c applied to a basis state (int) or StateVector."""
    return _apply_linear(_o1_action, psi, c, cfg)


def wilson2_apply(psi, c: tuple[int, int], cfg: LatticeConfig) -> StateVector:
    """O_2 on the pair c, c+(0,1) applied to a basis state or StateVector."""
    return _apply_linear(_o2_action, psi, c, cfg)


def _operator_matrix(action, cfg: LatticeConfig, c) -> scipy.sparse.csr_matrix:
    basis = enumerate_basis(cfg)
    rows, cols, vals = [], [], []
    for s in basis:
        t, amp = action(s, c, cfg)
        rows.append(t)
        cols.append(s)
        vals.append(amp)
    dim = len(basis)
    return scipy.sparse.coo_matrix((vals, (rows, cols)), shape=(dim, dim)).tocsr()


def wilson1_operator(cfg: LatticeConfig, c: tuple[int, int] = (0, 0)) -> scipy.sparse.csr_matrix:
    """O_1 at c as a sparse matrix over the working basis."""
    return _operator_matrix(_o1_action, cfg, c)


def wilson2_operator(cfg: LatticeConfig, c: tuple[int, int] = (0, 0)) -> scipy.sparse.csr_matrix:
    """O_2 on the pair c, c+(0,1) as a sparse matrix over the working basis."""
    return _operator_matrix(_o2_action, cfg, c)


def expectation(matrix, psi: StateVector) -> complex:
    return complex(np.vdot(psi.amplitudes, matrix @ psi.amplitudes))


# ---------------------------------------------------------------------------
# Time evolution
# ---------------------------------------------------------------------------

def evolve(op: SparseOperator, psi0: StateVector, t: float, steps: int = 1,
           spectrum: Spectrum | None = None) -> StateVector:
    """exp(-i H t)|psi0> via the spectral decomposition, applied in `steps`
    equal hops (each hop is exact; steps only controls intermediate
    rounding, it does not change the result beyond that)."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    psi = psi0
    for _, state in trajectory(op, psi0, np.linspace(0.0, t, steps + 1), spectrum):
        psi = state
    return psi


def trajectory(op: SparseOperator, psi0: StateVector, times, spectrum: Spectrum | None = None):
    """Yield (t, StateVector) along exact evolution at the requested times."""
    if spectrum is None:
        spectrum = diagonalize(op, mode="full")
    v = spectrum.eigenvectors
    coeffs = v.conj().T @ psi0.amplitudes
    for t in np.asarray(times, dtype=float):
        amps = v @ (np.exp(-1j * spectrum.eigenvalues * t) * coeffs)
        yield float(t), StateVector(amps, psi0.label)


# ---------------------------------------------------------------------------
# Spectral statistics
# ---------------------------------------------------------------------------

def level_spacing_ratios(eigenvalues: np.ndarray) -> np.ndarray:
    """r_n = min(s_n, s_{n+1}) / max(s_n, s_{n+1}) over consecutive gaps."""
    e = np.sort(np.asarray(eigenvalues, dtype=float))
    gaps = np.diff(e)
    lo = np.minimum(gaps[:-1], gaps[1:])
    hi = np.maximum(gaps[:-1], gaps[1:])
    out = np.zeros_like(lo)
    nz = hi > 0
    out[nz] = lo[nz] / hi[nz]
    return out


def level_spacing_ratios_by_sector(sector_eigenvalues) -> np.ndarray:
    """Concatenate gap ratios computed within each symmetry sector."""
    parts = [level_spacing_ratios(vals) for vals in sector_eigenvalues if len(vals) >= 3]
    if not parts:
        return np.zeros(0)
    return np.concatenate(parts)
