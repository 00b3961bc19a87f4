"""Ground-truth construction of the truncated gauge theory in the link basis.

Everything here works directly with j-assignments on honeycomb edges and
never touches the spin mapping, so it can certify that mapping.  Edges are
keyed by (plaquette, forward direction) which enumerates each physical
link exactly once, including on small tori where two hexagons share two
links.  A hexagon's six vertices are the consecutive pairs of its neighbor
chain; the external link at vertex K is the edge shared by chain neighbors
K and K+1.

Gauss's law in the j_max = 1/2 truncation is the statement that every
vertex touches an even number (0 or 2) of j = 1/2 links, so the allowed
configurations form a GF(2) null space which is enumerated exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse

from .lattice import LatticeConfig

HALF = Fraction(1, 2)


# ---------------------------------------------------------------------------
# Wigner 6j symbol (Racah formula) and plaquette vertex elements
# ---------------------------------------------------------------------------

def _as_twice(j) -> int:
    """A half-integer as the exact integer 2j; rejects anything else."""
    tj = 2 * Fraction(j).limit_denominator(10**6)
    if tj.denominator != 1 or tj < 0:
        raise ValueError(f"expected a non-negative half-integer, got {j}")
    return int(tj)


def _triangle_ok(ta: int, tb: int, tc: int) -> bool:
    # args are doubled j's
    if (ta + tb + tc) % 2 != 0:
        return False
    return abs(ta - tb) <= tc <= ta + tb


def _fact(n: int) -> int:
    return math.factorial(n)


def _delta_sq(ta: int, tb: int, tc: int) -> Fraction:
    """Squared triangle coefficient, exact rational; args are doubled j's."""
    return Fraction(
        _fact((ta + tb - tc) // 2) * _fact((ta - tb + tc) // 2) * _fact((-ta + tb + tc) // 2),
        _fact((ta + tb + tc) // 2 + 1),
    )


def _racah_parts(j1, j2, j3, j4, j5, j6):
    """(radicand, rational sum) with 6j = sign(sum)*sqrt(radicand*sum^2)."""
    t = [_as_twice(j) for j in (j1, j2, j3, j4, j5, j6)]
    triads = [(t[0], t[1], t[2]), (t[0], t[4], t[5]), (t[3], t[1], t[5]), (t[3], t[4], t[2])]
    for tri in triads:
        if not _triangle_ok(*tri):
            return Fraction(0), Fraction(0)
    rad = Fraction(1)
    for tri in triads:
        rad *= _delta_sq(*tri)
    quads = [
        (t[0] + t[1] + t[3] + t[4]) // 2,
        (t[1] + t[2] + t[4] + t[5]) // 2,
        (t[2] + t[0] + t[5] + t[3]) // 2,
    ]
    tri_sums = [sum(tri) // 2 for tri in triads]
    total = Fraction(0)
    for z in range(max(tri_sums), min(quads) + 1):
        num = _fact(z + 1)
        den = 1
        for ts in tri_sums:
            den *= _fact(z - ts)
        for qs in quads:
            den *= _fact(qs - z)
        total += Fraction((-1) ** z * num, den)
    return rad, total


def wigner_6j(j1, j2, j3, j4, j5, j6) -> float:
    """Wigner 6j-symbol {j1 j2 j3; j4 j5 j6} via the Racah formula.

    Returns 0 when any triangle condition fails; raises on non-half-integer
    arguments.
    """
    rad, total = _racah_parts(j1, j2, j3, j4, j5, j6)
    if total == 0:
        return 0.0
    return math.copysign(math.sqrt(float(rad * total * total)), total)


def _exact_sqrt(q: Fraction) -> float | None:
    """sqrt(q) as an exact float when q is a perfect rational square."""
    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return rn / rd
    return None


_I_POW = (1 + 0j, 1j, -1 + 0j, -1j)


def vertex_element(J_a, J_b, j_a, j_b, j_x) -> complex:
    """<(J_a, j_x, J_b)| M_V |(j_a, j_x, j_b)> for one plaquette vertex.

    The phase (-1)^(j_a + J_b + j_x) is resolved as exp(i*pi*(...)), and the
    square root is taken exactly whenever the radicand is a perfect rational
    square, so the truncated-space values come out exact.
    """
    rad, total = _racah_parts(j_x, j_a, j_b, HALF, J_b, J_a)
    if total == 0:
        return 0j
    phase = _I_POW[(_as_twice(j_a) + _as_twice(J_b) + _as_twice(j_x)) % 4]
    pre = (2 * Fraction(J_a) + 1) * (2 * Fraction(j_b) + 1)
    radicand = pre * rad * total * total
    mag = _exact_sqrt(radicand)
    if mag is None:
        mag = math.sqrt(float(radicand))
    if total < 0:
        mag = -mag
    return phase * mag


def _toggle(j: Fraction) -> Fraction:
    return HALF - j


def vertex_factor_table() -> dict[tuple[int, int, int], complex]:
    """M_V for every truncated vertex transition, keyed by the initial
    (j_a, j_x, j_b) edge bits (1 means j = 1/2).  Both internal links
    toggle; the external link is a spectator."""
    table = {}
    for a in (0, 1):
        for x in (0, 1):
            for b in (0, 1):
                ja, jx, jb = HALF * a, HALF * x, HALF * b
                table[(a, x, b)] = vertex_element(_toggle(ja), _toggle(jb), ja, jb, jx)
    return table


# ---------------------------------------------------------------------------
# Honeycomb edge/vertex geometry in plaquette-adjacency form
# ---------------------------------------------------------------------------

# Edge slots of hexagon p, K = 0..5: (plaquette offset, forward direction).
_EDGE_SLOT = (((0, 0), 0), ((0, 0), 1), ((0, 0), 2), ((0, -1), 0), ((-1, 0), 1), ((-1, 1), 2))

# External link at vertex K of hexagon p (the edge joining chain neighbors
# K and K+1), same encoding.
_X_SLOT = (((0, 1), 2), ((1, -1), 0), ((0, -1), 1), ((-1, 0), 2), ((-1, 0), 0), ((-1, 1), 1))


@dataclass
class GaugeGeometry:
    """Edge index and vertex structure for one lattice."""

    cfg: LatticeConfig
    edges: list[tuple[int, int, int]] = field(default_factory=list)  # (i, j, dir)
    index: dict[tuple[int, int, int], int] = field(default_factory=dict)
    hex_edges: list[list[int]] = field(default_factory=list)  # 6 edge ids per plaquette
    hex_x: list[list[int]] = field(default_factory=list)  # 6 external ids (-1 = fixed 0)
    hexmasks: list[int] = field(default_factory=list)

    @property
    def n_edges(self) -> int:
        return len(self.edges)


def _edge_key(cfg: LatticeConfig, i: int, j: int, d: int):
    if cfg.periodic:
        return (i % cfg.nx, j % cfg.ny, d)
    return (i, j, d)


def build_geometry(cfg: LatticeConfig) -> GaugeGeometry:
    geo = GaugeGeometry(cfg)

    def edge_id(key, register: bool) -> int:
        if key in geo.index:
            return geo.index[key]
        if not register:
            return -1
        geo.index[key] = len(geo.edges)
        geo.edges.append(key)
        return geo.index[key]

    # First pass registers every dynamical edge (edges of in-lattice
    # hexagons); the scan order fixes the edge numbering.
    for j in range(cfg.ny):
        for i in range(cfg.nx):
            ids = []
            for (di, dj), d in _EDGE_SLOT:
                ids.append(edge_id(_edge_key(cfg, i + di, j + dj, d), register=True))
            geo.hex_edges.append(ids)
            mask = 0
            for e in ids:
                mask ^= 1 << e  # XOR: a doubly-traversed link does not toggle
            geo.hexmasks.append(mask)
    # Second pass resolves external links; keys never seen above belong to
    # two outside hexagons and are fixed j = 0 (closed BC only).
    for j in range(cfg.ny):
        for i in range(cfg.nx):
            xs = []
            for (di, dj), d in _X_SLOT:
                xs.append(edge_id(_edge_key(cfg, i + di, j + dj, d), register=False))
            geo.hex_x.append(xs)
    return geo


def vertex_constraints(geo: GaugeGeometry) -> list[int]:
    """Gauss parity checks as bitmasks over edge ids, deduplicated."""
    rows = []
    seen = set()
    for p in range(geo.cfg.n_plaq):
        es = geo.hex_edges[p]
        xs = geo.hex_x[p]
        for k in range(6):
            members = frozenset(e for e in (es[k], es[(k + 1) % 6], xs[k]) if e >= 0)
            if members in seen:
                continue
            seen.add(members)
            mask = 0
            for e in members:
                mask ^= 1 << e
            if mask:
                rows.append(mask)
    return rows


def _gf2_nullspace(rows: list[int], n_vars: int) -> list[int]:
    """Basis of the GF(2) null space of the parity-check rows."""
    pivots: dict[int, int] = {}
    for row in rows:
        r = row
        while r:
            lead = r.bit_length() - 1
            if lead in pivots:
                r ^= pivots[lead]
            else:
                pivots[lead] = r
                break
    # Full reduction: after this every pivot row holds its lead bit plus
    # free columns only.
    for lead in sorted(pivots, reverse=True):
        for other in pivots:
            if other != lead and (pivots[other] >> lead) & 1:
                pivots[other] ^= pivots[lead]
    basis = []
    for f in range(n_vars):
        if f in pivots:
            continue
        vec = 1 << f
        for lead, row in pivots.items():
            if (row >> f) & 1:
                vec |= 1 << lead
        basis.append(vec)
    # Verify against every original check row; catches elimination bugs.
    for vec in basis:
        for row in rows:
            assert (vec & row).bit_count() % 2 == 0
    return basis


@dataclass
class GaugeEnumeration:
    geo: GaugeGeometry
    gauss_states: list[int]
    reachable: list[int]
    reachable_index: dict[int, int]

    @property
    def n_gauss(self) -> int:
        return len(self.gauss_states)

    @property
    def n_reachable(self) -> int:
        return len(self.reachable)


def enumerate_gauge_states(cfg: LatticeConfig) -> GaugeEnumeration:
    """All Gauss-law configurations plus the vacuum-connected subset.

    The full set is the GF(2) null space of the vertex parity checks; the
    reachable subset is its closure under single-plaquette toggles starting
    from the vacuum (breadth-first).
    """
    if cfg.n_plaq > 14:
        raise ValueError("gauge enumeration capped at 14 plaquettes")
    geo = build_geometry(cfg)
    rows = vertex_constraints(geo)
    basis = _gf2_nullspace(rows, geo.n_edges)
    if len(basis) > 24:
        raise ValueError(f"gauge null space too large to enumerate ({len(basis)} generators)")
    states = [0]
    for vec in basis:
        states += [s ^ vec for s in states]
    states.sort()

    frontier = [0]
    reachable = {0}
    while frontier:
        nxt = []
        for g in frontier:
            for mask in geo.hexmasks:
                t = g ^ mask
                if t not in reachable:
                    reachable.add(t)
                    nxt.append(t)
        frontier = nxt
    reach = sorted(reachable)
    return GaugeEnumeration(geo, states, reach, {g: k for k, g in enumerate(reach)})


# ---------------------------------------------------------------------------
# KS Hamiltonian in the gauge basis and the isomorphism certificate
# ---------------------------------------------------------------------------

def electric_link_energy(lam: float) -> float:
    """Per-link electric energy of a j = 1/2 link: (3*sqrt(3)/4)*lam * j(j+1)."""
    return 3.0 * math.sqrt(3.0) / 4.0 * lam * 0.75


def magnetic_coupling(lam: float) -> float:
    """Plaquette-term prefactor 4*sqrt(3)/(9*lam)."""
    return 4.0 * math.sqrt(3.0) / (9.0 * lam)


def plaquette_element(geo: GaugeGeometry, table, config: int, p: int) -> float:
    """<config XOR hexmask | plaquette_p | config> as a product of the six
    vertex factors; asserts the product is real and that B->C and C->B
    vertices pair up."""
    es = geo.hex_edges[p]
    xs = geo.hex_x[p]
    prod = 1 + 0j
    n_bc = n_cb = 0
    for k in range(6):
        a = (config >> es[k]) & 1
        b = (config >> es[(k + 1) % 6]) & 1
        x = 0 if xs[k] < 0 else (config >> xs[k]) & 1
        f = table[(a, x, b)]
        if f == 0:
            raise ValueError(f"plaquette {p} hit a Gauss-violating vertex on config {config:#x}")
        if x == 1:
            if a == 1:
                n_bc += 1  # (1/2, 1/2, 0) is a B -> C transition
            else:
                n_cb += 1
        prod *= f
    assert n_bc == n_cb, "unbalanced B->C / C->B vertex counts"
    assert abs(prod.imag) < 1e-12, f"plaquette element not real: {prod}"
    return prod.real


def ks_hamiltonian(cfg: LatticeConfig, enum: GaugeEnumeration | None = None):
    """KS Hamiltonian (units of 1/a) over the reachable gauge configs.

    Diagonal: per-link electric energies plus the constant 2 per plaquette
    from the magnetic term.  Off-diagonal: -(4*sqrt(3)/(9*lam)) times the
    plaquette matrix element from the 6j vertex factors.
    """
    from .hamiltonian import SparseOperator

    if enum is None:
        enum = enumerate_gauge_states(cfg)
    geo = enum.geo
    lam = cfg.lam
    table = vertex_factor_table()
    e_link = electric_link_energy(lam)
    hmag = magnetic_coupling(lam)
    n = len(enum.reachable)
    rows, cols, vals = [], [], []
    for col, g in enumerate(enum.reachable):
        rows.append(col)
        cols.append(col)
        vals.append(e_link * g.bit_count() + 2.0 * cfg.n_plaq * hmag)
        for p in range(cfg.n_plaq):
            t = g ^ geo.hexmasks[p]
            rows.append(enum.reachable_index[t])
            cols.append(col)
            vals.append(-hmag * plaquette_element(geo, table, g, p))
    mat = scipy.sparse.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    mat.sort_indices()
    return SparseOperator(mat, list(enum.reachable), cfg, "gauge-reachable")


@dataclass
class CertReport:
    cfg: LatticeConfig
    n_gauss: int
    n_reachable: int
    spin_dim: int
    shift: float
    max_deviation: float
    passed: bool
    worst_entry: tuple[int, int] | None = None
    nontrivial_signs: int = 0

    def to_dict(self) -> dict:
        return {
            "config": self.cfg.to_dict(),
            "gauss_states": self.n_gauss,
            "reachable_states": self.n_reachable,
            "spin_dim": self.spin_dim,
            "fitted_shift": self.shift,
            "max_deviation": self.max_deviation,
            "nontrivial_signs": self.nontrivial_signs,
            "passed": self.passed,
            "worst_entry": list(self.worst_entry) if self.worst_entry else None,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


TOL_CERT = 1e-10


def certify_isomorphism(cfg: LatticeConfig, perturbation: float | None = None) -> CertReport:
    """Certify that the spin model reproduces the gauge-basis Hamiltonian.

    Maps each spin basis state to the gauge config obtained by toggling its
    up plaquettes, then compares matrices entrywise allowing one uniform
    diagonal shift and a per-state sign gauge (fitted, expected trivial).
    `perturbation` is a fault-injection hook: it is added to the first
    off-diagonal spin matrix entry so tests can see a located failure.
    """
    from .hamiltonian import build_hamiltonian

    enum = enumerate_gauge_states(cfg)
    spin = build_hamiltonian(cfg)
    if perturbation:
        m = spin.matrix.tolil()
        m[0, 1] += perturbation
        spin.matrix = m.tocsr()
    states = spin.basis
    if len(states) != enum.n_reachable:
        raise ValueError(
            f"state count mismatch: spin {len(states)} vs gauge {enum.n_reachable}"
        )
    # Spin state -> gauge config via plaquette toggles.
    to_gauge = []
    for s in states:
        g = 0
        for p in range(cfg.n_plaq):
            if (s >> p) & 1:
                g ^= enum.geo.hexmasks[p]
        to_gauge.append(enum.reachable_index[g])
    if len(set(to_gauge)) != len(states):
        raise ValueError("plaquette-toggle map is not a bijection")
    if cfg.periodic:
        for s in states:
            gf = 0
            for p in range(cfg.n_plaq):
                if not (s >> p) & 1:
                    gf ^= enum.geo.hexmasks[p]
            assert enum.reachable_index[gf] == to_gauge[s], "flip pair maps to two configs"

    a = spin.to_dense()
    perm = np.asarray(to_gauge)
    b = ks_hamiltonian(cfg, enum).to_dense()[np.ix_(perm, perm)]

    shift = float(np.mean(np.diag(b) - np.diag(a)))

    # Per-state sign gauge, propagated over nonzero off-diagonals from the
    # vacuum; with the +1 amplitude convention every sign comes out +1.
    dim = len(states)
    signs = np.zeros(dim)
    signs[0] = 1.0
    queue = [0]
    while queue:
        s = queue.pop()
        row = a[s]
        for t in range(dim):
            if t != s and signs[t] == 0 and abs(row[t]) > 1e-9 and abs(b[s, t]) > 1e-9:
                signs[t] = signs[s] * math.copysign(1.0, row[t] * b[s, t])
                queue.append(t)
    signs[signs == 0] = 1.0

    resid = np.abs(np.outer(signs, signs) * b - a - shift * np.eye(dim))
    worst = np.unravel_index(int(np.argmax(resid)), resid.shape)
    max_dev = float(resid[worst])
    return CertReport(
        cfg=cfg,
        n_gauss=enum.n_gauss,
        n_reachable=enum.n_reachable,
        spin_dim=len(states),
        shift=shift,
        max_deviation=max_dev,
        passed=bool(max_dev < TOL_CERT),
        worst_entry=(int(worst[0]), int(worst[1])) if max_dev >= TOL_CERT else None,
        nontrivial_signs=int(np.sum(signs < 0)),
    )
