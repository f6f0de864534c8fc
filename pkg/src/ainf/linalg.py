"""Exact linear algebra over ℚ.

Two flavours: a sparse row-echelon solver for the large, very sparse
systems that appear in obstruction solving, and small dense routines used
degree by degree (homology, inverses, retractions).  All pivot choices are
"first index" so results are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import NonInvertibleLinearPart, SpaceMismatch
from .graded import ChainComplex, GradedMap, add_into


def qdiv(a, b):
    q = Fraction(a) / b
    return q.numerator if q.denominator == 1 else q


# -- sparse -----------------------------------------------------------------


class Echelon:
    """Incrementally maintained sparse echelon form.

    Rows are dicts ``var -> coefficient``; each stored row is normalised so its
    pivot (its minimal variable under ``rank``) has coefficient 1 and contains
    no earlier pivot.  An optional right-hand side is carried along.
    """

    def __init__(self, rank=None):
        self.rank = rank if rank is not None else (lambda v: v)
        self.pivots: dict = {}

    def reduce(self, row: dict, rhs=0):
        row = dict(row)
        pivots, rank = self.pivots, self.rank
        while True:
            cands = [v for v in row if v in pivots]
            if not cands:
                return row, rhs
            v = min(cands, key=rank)
            c = row[v]
            prow, pb = pivots[v]
            add_into(row, prow, -c)
            if pb:
                rhs = rhs - c * pb

    def add(self, row: dict, rhs=0):
        """Insert a row; returns ``True`` if independent, ``False`` if it
        reduced to ``0 = 0`` and ``None`` if it reduced to ``0 = b ≠ 0``."""
        row, rhs = self.reduce(row, rhs)
        if not row:
            return None if rhs else False
        p = min(row, key=self.rank)
        c = row[p]
        if c != 1:
            row = {k: qdiv(x, c) for k, x in row.items()}
            rhs = qdiv(rhs, c)
        self.pivots[p] = (row, rhs)
        return True

    def contains(self, row: dict) -> bool:
        return not self.reduce(row)[0]

    def __len__(self):
        return len(self.pivots)

    def back_substitute(self) -> dict:
        rank = self.rank
        x = {}
        for p in sorted(self.pivots, key=rank, reverse=True):
            row, b = self.pivots[p]
            val = b
            for v, c in row.items():
                if v != p:
                    xv = x.get(v)
                    if xv:
                        val = val - c * xv
            if val:
                x[p] = val
        return x


def solve_rows(rows, rhs, rank=None):
    """Solve the equations ``Σ_v row[v] x_v = rhs_i``.

    Returns one particular solution (free variables set to zero) as a dict,
    or ``None`` when the system is inconsistent.
    """
    ech = Echelon(rank)
    for row, b in zip(rows, rhs):
        if ech.add(row, b) is None:
            return None
    return ech.back_substitute()


def solve_linear(L: GradedMap, b: dict):
    """Find ``x`` with ``L(x) = b`` or return ``None`` if ``b ∉ im L``.

    ``b`` is a vector of output words of ``L``; the solution is a vector of
    input words.  Among the solutions the one with all non-pivot
    coordinates zero is returned (pivots chosen by first word in basis
    order).
    """
    rows: dict = {}
    for w, img in L.entries.items():
        for k, c in img.items():
            rows.setdefault(k, {})[w] = c
    keys = sorted(set(rows) | set(b))
    return solve_rows([rows.get(k, {}) for k in keys], [b.get(k, 0) for k in keys])


# -- dense ------------------------------------------------------------------


def rref(matrix, ncols=None):
    """Reduced row echelon form of a list of rows; returns ``(R, pivots)``."""
    R = [list(r) for r in matrix]
    if ncols is None:
        ncols = len(R[0]) if R else 0
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(R)) if R[i][c] != 0), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        pv = R[r][c]
        if pv != 1:
            R[r] = [qdiv(x, pv) for x in R[r]]
        for i in range(len(R)):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == len(R):
            break
    return R, pivots


def kernel_basis(matrix, ncols):
    """Basis of ``{x : M x = 0}``, one vector per free column, in order."""
    R, pivots = rref(matrix, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for row, pc in zip(R, pivots):
            if row[f] != 0:
                v[pc] = -row[f]
        basis.append(v)
    return basis


def matrix_inverse(M):
    n = len(M)
    if any(len(r) != n for r in M):
        raise NonInvertibleLinearPart("non-square block")
    aug = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(M)]
    R, pivots = rref(aug, 2 * n)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise NonInvertibleLinearPart("singular block")
    return [row[n:] for row in R[:n]]


def degree_block(f: GradedMap, deg: int):
    """Dense matrix of ``f`` from ``source_deg`` to ``target_{deg+|f|}``:
    rows index the target basis, columns the source basis."""
    src = f.source.by_degree.get(deg, ())
    tgt = f.target.by_degree.get(deg + f.degree, ())
    pos = {j: r for r, j in enumerate(tgt)}
    M = [[0] * len(src) for _ in tgt]
    for c, i in enumerate(src):
        for (j,), x in f.image((i,)).items():
            M[pos[j]][c] = x
    return M, src, tgt


def invert_map(f: GradedMap) -> GradedMap:
    """Inverse of a unary degree-0 isomorphism."""
    if f.arity != 1 or f.degree != 0:
        raise NonInvertibleLinearPart("only unary degree-0 maps can be inverted")
    degs = set(f.source.by_degree) | set(f.target.by_degree)
    entries = {}
    for deg in sorted(degs):
        M, src, tgt = degree_block(f, deg)
        if len(src) != len(tgt):
            raise NonInvertibleLinearPart(f"dimension mismatch in degree {deg}")
        if not src:
            continue
        Minv = matrix_inverse(M)
        for r, j in enumerate(tgt):
            entries[(j,)] = {(src[c],): Minv[c][r] for c in range(len(src)) if Minv[c][r] != 0}
    return GradedMap(f.target, f.source, 0, entries)


def is_invertible(f: GradedMap) -> bool:
    try:
        invert_map(f)
    except NonInvertibleLinearPart:
        return False
    return True


# -- homology ---------------------------------------------------------------


@dataclass
class HomologyGroup:
    degree: int
    betti: int
    representatives: list = field(default_factory=list)  # vectors {(i,): c}
    rank_in: int = 0    # rank of d leaving this degree
    rank_out: int = 0   # rank of d arriving in this degree
    dim: int = 0


def _columns_to_vectors(M, src, tgt):
    vecs = []
    for c in range(len(src)):
        v = {(tgt[r],): M[r][c] for r in range(len(tgt)) if M[r][c] != 0}
        vecs.append(v)
    return vecs


def _kernel_vectors(d: GradedMap, deg: int):
    M, src, tgt = degree_block(d, deg)
    if not src:
        return []
    if not tgt:
        return [{(i,): 1} for i in src]
    return [{(src[c],): x for c, x in enumerate(v) if x != 0} for v in kernel_basis(M, len(src))]


def homology(c: ChainComplex) -> dict:
    """Betti numbers and representative cycles in each degree of the basis.

    Representatives span a complement of the boundaries inside the cycles,
    chosen greedily from the kernel basis in order.
    """
    d, A = c.d, c.space
    out = {}
    for deg in sorted(A.by_degree):
        cycles = _kernel_vectors(d, deg)
        Mb, srcb, tgtb = degree_block(d, deg + 1)
        boundaries = [v for v in _columns_to_vectors(Mb, srcb, tgtb) if v]
        span = Echelon()
        rank_out = sum(1 for v in boundaries if span.add(v))
        reps = [z for z in cycles if span.add(z)]
        dim = len(A.by_degree[deg])
        out[deg] = HomologyGroup(deg, len(reps), reps, dim - len(cycles), rank_out, dim)
    return out


def betti_numbers(c: ChainComplex) -> dict:
    return {deg: g.betti for deg, g in homology(c).items()}


def retract_data(c: ChainComplex):
    """Split each degree as ``B ⊕ H̃ ⊕ C`` (boundaries, homology
    representatives, a complement of the cycles mapped isomorphically onto
    the boundaries one degree down).

    Returns ``(reps, proj, hom)`` where ``reps[deg]`` lists the chosen
    cycles, ``proj`` maps ``(i,)`` to its coordinates on ``reps`` (as
    ``{(deg, t): coef}``) and ``hom`` is the degree +1 map with
    ``i p - id = d h + h d``.
    """
    A, d = c.space, c.d
    degrees = sorted(A.by_degree)
    cycles = {deg: _kernel_vectors(d, deg) for deg in degrees}
    # complements C_deg of the cycles, taken from standard basis vectors
    comp_C = {}
    for deg in degrees:
        span = Echelon()
        for z in cycles[deg]:
            span.add(z)
        comp_C[deg] = [i for i in A.by_degree[deg] if span.add({(i,): 1})]
    bnd = {deg: [] for deg in degrees}
    for deg in degrees:
        for i in comp_C[deg]:
            bnd.setdefault(deg - 1, []).append((i, d.image((i,))))
    reps = {}
    for deg in degrees:
        span = Echelon()
        for _, v in bnd.get(deg, []):
            span.add(v)
        reps[deg] = [z for z in cycles[deg] if span.add(z)]
    proj, hom = {}, {}
    for deg in degrees:
        idx = A.by_degree[deg]
        pos = {j: r for r, j in enumerate(idx)}
        columns = ([("B", t, v) for t, (_, v) in enumerate(bnd.get(deg, []))]
                   + [("H", t, v) for t, v in enumerate(reps[deg])]
                   + [("C", t, {(i,): 1}) for t, i in enumerate(comp_C[deg])])
        P = [[0] * len(columns) for _ in idx]
        for col, (_, _, v) in enumerate(columns):
            for (j,), x in v.items():
                P[pos[j]][col] = x
        Pinv = matrix_inverse(P)
        for r, j in enumerate(idx):
            coords = [Pinv[col][r] for col in range(len(columns))]
            pv, hv = {}, {}
            for col, (kind, t, _) in enumerate(columns):
                x = coords[col]
                if x == 0:
                    continue
                if kind == "H":
                    pv[(deg, t)] = x
                elif kind == "B":
                    src = bnd[deg][t][0]
                    hv[(src,)] = hv.get((src,), 0) - x
            proj[(j,)] = pv
            hom[(j,)] = {k: v for k, v in hv.items() if v}
    return reps, proj, GradedMap(A, A, 1, hom)


def induced_map_on_homology(f: GradedMap, cA: ChainComplex, cB: ChainComplex) -> dict:
    """Matrices of ``H(f)`` per degree, in the representative bases chosen by
    :func:`retract_data`."""
    if f.source != cA.space or f.target != cB.space:
        raise SpaceMismatch(cA.space, f.source, "induced_map_on_homology")
    repsA, _, _ = retract_data(cA)
    repsB, projB, _ = retract_data(cB)
    out = {}
    for deg in sorted(set(repsA) | set(repsB)):
        ra = repsA.get(deg, [])
        rb = repsB.get(deg + f.degree, [])
        M = [[0] * len(ra) for _ in rb]
        for col, z in enumerate(ra):
            img = f(z)
            coords: dict = {}
            for k, x in img.items():
                add_into(coords, projB[k], x)
            for (_, t), x in coords.items():
                M[t][col] = x
        out[deg] = M
    return out


def is_quasi_isomorphism(f: GradedMap, cA: ChainComplex, cB: ChainComplex) -> bool:
    for M in induced_map_on_homology(f, cA, cB).values():
        n = len(M)
        if n == 0:
            if any(True for _ in M):
                return False
            continue
        if any(len(r) != n for r in M):
            return False
        _, piv = rref(M, n)
        if len(piv) != n:
            return False
    # also catch source-side classes with no target counterpart
    hA = betti_numbers(cA)
    hB = betti_numbers(cB)
    return all(hA.get(k, 0) == hB.get(k + f.degree, 0) for k in set(hA) | set(hB))
