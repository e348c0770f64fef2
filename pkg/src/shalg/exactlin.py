"""Exact rational graded linear algebra.

Graded vector spaces over Q with a homological Z-grading, graded maps
stored as one exact rational matrix per degree, chain complexes with a
degree -1 differential, homology with explicit splitting data, and a
certified linear solver.  Everything is a plain immutable value; no
floating point is used anywhere.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence


Matrix = tuple[tuple[Fraction, ...], ...]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


def make_matrix(rows: Iterable[Iterable], nrows: int, ncols: int) -> Matrix:
    m = tuple(tuple(_frac(x) for x in row) for row in rows)
    if len(m) != nrows or any(len(row) != ncols for row in m):
        raise ValueError(f"expected a {nrows}x{ncols} matrix, got {m!r}")
    return m


def zero_matrix(nrows: int, ncols: int) -> Matrix:
    return tuple((Fraction(0),) * ncols for _ in range(nrows))


def identity_matrix(n: int) -> Matrix:
    return tuple(
        tuple(Fraction(1 if i == j else 0) for j in range(n)) for i in range(n)
    )


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if a and b and len(a[0]) != len(b):
        raise ValueError("matrix shape mismatch in product")
    return tuple(
        tuple(sum((a[i][k] * b[k][j] for k in range(len(b))), Fraction(0))
              for j in range(len(b[0]) if b else 0))
        for i in range(len(a))
    )


def mat_add(a: Matrix, b: Matrix, ca=1, cb=1) -> Matrix:
    ca, cb = _frac(ca), _frac(cb)
    return tuple(
        tuple(ca * a[i][j] + cb * b[i][j] for j in range(len(a[i])))
        for i in range(len(a))
    )


def mat_is_zero(a: Matrix) -> bool:
    return all(x == 0 for row in a for x in row)


def rref(a: Matrix) -> tuple[Matrix, Matrix, list[int]]:
    """Reduced row echelon form with leftmost pivots.

    Returns (R, T, pivots) with T a = R, T invertible, and pivots the
    pivot column indices in order.  Fully deterministic.
    """
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    m = [list(row) for row in a]
    t = [list(row) for row in identity_matrix(nrows)]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        pr = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if pr is None:
            continue
        if pr != r:
            m[r], m[pr] = m[pr], m[r]
            t[r], t[pr] = t[pr], t[r]
        piv = m[r][c]
        m[r] = [x / piv for x in m[r]]
        t[r] = [x / piv for x in t[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
                t[i] = [x - f * y for x, y in zip(t[i], t[r])]
        pivots.append(c)
        r += 1
    return (tuple(tuple(row) for row in m),
            tuple(tuple(row) for row in t),
            pivots)


def mat_rank(a: Matrix) -> int:
    return len(rref(a)[2])


def kernel_basis(a: Matrix) -> list[tuple[Fraction, ...]]:
    """Deterministic basis of the right null space, one vector per free column."""
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    if nrows == 0:
        return [tuple(Fraction(1 if i == j else 0) for i in range(ncols))
                for j in range(ncols)]
    r, _, pivots = rref(a)
    pivot_set = set(pivots)
    basis = []
    for c in range(ncols):
        if c in pivot_set:
            continue
        v = [Fraction(0)] * ncols
        v[c] = Fraction(1)
        for row_idx, pc in enumerate(pivots):
            v[pc] = -r[row_idx][c]
        basis.append(tuple(v))
    return basis


def solve_matrix(a: Matrix, b: Sequence[Fraction]):
    """Solve a x = b exactly.

    Returns ("solution", x) with free variables set to zero (leftmost
    pivots), or ("inconsistent", y) with a certificate row vector y
    satisfying y a = 0 and y b != 0.
    """
    nrows = len(a)
    b = tuple(_frac(x) for x in b)
    if len(b) != nrows:
        raise ValueError("right-hand side length mismatch")
    r, t, pivots = rref(a)
    tb = tuple(sum((t[i][j] * b[j] for j in range(nrows)), Fraction(0))
               for i in range(nrows))
    ncols = len(a[0]) if nrows else 0
    for i in range(len(pivots), nrows):
        if tb[i] != 0:
            return ("inconsistent", t[i])
    x = [Fraction(0)] * ncols
    for row_idx, pc in enumerate(pivots):
        x[pc] = tb[row_idx]
    return ("solution", tuple(x))


class GradedVectorSpace:
    """Finite-dimensional Z-graded Q-vector space with labeled bases.

    factors records the atomic tensor factors when the space was built
    as a tensor product; tensor products always flatten to atomic
    factors so that basis ordering never depends on bracketing.
    """

    def __init__(self, dims: Mapping[int, int], labels=None, factors=None):
        self.dims = {int(d): int(n) for d, n in dims.items() if n}
        if any(n < 0 for n in self.dims.values()):
            raise ValueError("negative dimension")
        if labels is None:
            labels = {d: tuple(f"e{d}_{i}" for i in range(n))
                      for d, n in self.dims.items()}
        self.labels = {d: tuple(labels[d]) for d in self.dims}
        for d, n in self.dims.items():
            if len(self.labels[d]) != n:
                raise ValueError(f"label count mismatch in degree {d}")
        self.factors = tuple(factors) if factors is not None else (self,)

    def dim(self, degree: int) -> int:
        return self.dims.get(degree, 0)

    @property
    def total_dim(self) -> int:
        return sum(self.dims.values())

    def degrees(self) -> list[int]:
        return sorted(self.dims)

    def flat_basis(self) -> list[tuple[int, int]]:
        """(degree, index) pairs, degrees ascending then index."""
        return [(d, i) for d in self.degrees() for i in range(self.dims[d])]

    def __eq__(self, other):
        return (isinstance(other, GradedVectorSpace)
                and self.dims == other.dims and self.labels == other.labels)

    def __hash__(self):
        return hash(tuple(sorted((d, self.labels[d]) for d in self.dims)))

    def __repr__(self):
        return f"GradedVectorSpace({self.dims})"


ZERO_SPACE = GradedVectorSpace({})


def _atoms(factors: Sequence[GradedVectorSpace]) -> list:
    out = []
    for f in factors:
        out.extend(f.factors)
    return out


def tensor_spaces(factors: Sequence[GradedVectorSpace]) -> GradedVectorSpace:
    """Tensor product, flattened to atomic factors.

    The degree-d basis consists of all tuples of per-atom flat basis
    elements with total degree d, ordered lexicographically by the flat
    position within each atom.  Bracketing never matters: nested tensor
    products flatten to the same space.
    """
    atoms = _atoms(factors)
    if len(atoms) == 1:
        return atoms[0]
    dims: dict[int, int] = {}
    labels: dict[int, list] = {}
    for combo in itertools.product(*[a.flat_basis() for a in atoms]):
        d = sum(deg for deg, _ in combo)
        dims[d] = dims.get(d, 0) + 1
        label = tuple(atoms[k].labels[deg][i]
                      for k, (deg, i) in enumerate(combo))
        labels.setdefault(d, []).append(label)
    return GradedVectorSpace(dims, {d: tuple(v) for d, v in labels.items()},
                             factors=atoms)


def tensor_basis_tuples(factors: Sequence[GradedVectorSpace]) -> dict[int, list]:
    """Degree -> ordered list of per-atom (degree, index) tuples."""
    atoms = _atoms(factors)
    out: dict[int, list] = {}
    for combo in itertools.product(*[a.flat_basis() for a in atoms]):
        d = sum(deg for deg, _ in combo)
        out.setdefault(d, []).append(combo)
    return out


def tensor_power(space: GradedVectorSpace, n: int) -> GradedVectorSpace:
    """n-fold tensor power; basis labels are ordered n-tuples."""
    if n < 1:
        raise ValueError("tensor_power requires n >= 1")
    if n == 1:
        return space
    return tensor_spaces([space] * n)


class GradedMap:
    """Degree-homogeneous linear map between graded spaces.

    blocks[k] is the matrix of the degree-k component, mapping the
    source degree-k basis (columns) to the target degree-(k+degree)
    basis (rows).  Missing blocks are zero.
    """

    def __init__(self, source: GradedVectorSpace, target: GradedVectorSpace,
                 degree: int, blocks: Mapping[int, Iterable] = ()):
        self.source = source
        self.target = target
        self.degree = int(degree)
        self.blocks: dict[int, Matrix] = {}
        blocks = dict(blocks)
        for k, mat in blocks.items():
            k = int(k)
            m = make_matrix(mat, target.dim(k + self.degree), source.dim(k))
            if not mat_is_zero(m):
                self.blocks[k] = m

    def block(self, k: int) -> Matrix:
        if k in self.blocks:
            return self.blocks[k]
        return zero_matrix(self.target.dim(k + self.degree), self.source.dim(k))

    @classmethod
    def zero(cls, source, target, degree):
        return cls(source, target, degree)

    @classmethod
    def identity(cls, space):
        return cls(space, space, 0,
                   {d: identity_matrix(space.dims[d]) for d in space.dims})

    def is_zero(self) -> bool:
        return not self.blocks

    def compose(self, other: "GradedMap") -> "GradedMap":
        """self after other."""
        if other.target != self.source:
            raise ValueError("composition source/target mismatch")
        blocks = {}
        for k in other.source.degrees():
            a, b = self.block(k + other.degree), other.block(k)
            nrows = self.target.dim(k + other.degree + self.degree)
            ncols = other.source.dim(k)
            if a and b and b[0]:
                blocks[k] = mat_mul(a, b)
            else:
                blocks[k] = zero_matrix(nrows, ncols)
        return GradedMap(other.source, self.target,
                         self.degree + other.degree, blocks)

    def add(self, other: "GradedMap", c1=1, c2=1) -> "GradedMap":
        if (other.source != self.source or other.target != self.target
                or other.degree != self.degree):
            raise ValueError("can only add maps of equal type and degree")
        blocks = {k: mat_add(self.block(k), other.block(k), c1, c2)
                  for k in set(self.blocks) | set(other.blocks)}
        return GradedMap(self.source, self.target, self.degree, blocks)

    def scale(self, c) -> "GradedMap":
        c = _frac(c)
        return GradedMap(self.source, self.target, self.degree,
                         {k: tuple(tuple(c * x for x in row) for row in m)
                          for k, m in self.blocks.items()})

    def __eq__(self, other):
        return (isinstance(other, GradedMap)
                and self.source == other.source
                and self.target == other.target
                and self.degree == other.degree
                and self.blocks == other.blocks)

    def __hash__(self):
        return hash((self.degree, tuple(sorted(self.blocks.items()))))

    def __repr__(self):
        return (f"GradedMap(degree={self.degree}, "
                f"blocks on {sorted(self.blocks)})")


def map_sum(maps: Sequence[GradedMap], coeffs=None) -> GradedMap:
    if not maps:
        raise ValueError("empty sum needs an explicit zero map")
    acc = maps[0] if coeffs is None else maps[0].scale(coeffs[0])
    for i, m in enumerate(maps[1:], start=1):
        acc = acc.add(m, 1, 1 if coeffs is None else coeffs[i])
    return acc


def tensor_maps_many(factors: Sequence[GradedMap]) -> GradedMap:
    """Koszul-signed tensor product of graded maps.

    On basis tensors, (f_1 x ... x f_k)(x_1 x ... x x_k) picks up the
    sign (-1)^(sum over i<j of |f_j| |x_i|).  Sources and targets are
    the flat tensor products of the factor sources and targets.
    """
    factors = list(factors)
    srcs = [f.source for f in factors]
    tgts = [f.target for f in factors]
    source = tensor_spaces(srcs)
    target = tensor_spaces(tgts)
    degree = sum(f.degree for f in factors)
    src_tuples = tensor_basis_tuples(srcs)
    tgt_tuples = tensor_basis_tuples(tgts)
    tgt_index = {d: {t: i for i, t in enumerate(rows)}
                 for d, rows in tgt_tuples.items()}
    # Per factor: how its atomic basis tuples index into its own blocks.
    src_lookup, tgt_expand, src_width = [], [], []
    for f in factors:
        s_tab = tensor_basis_tuples([f.source])
        src_lookup.append({t: (d, i) for d, ts in s_tab.items()
                           for i, t in enumerate(ts)})
        t_tab = tensor_basis_tuples([f.target])
        tgt_expand.append({(d, i): t for d, ts in t_tab.items()
                           for i, t in enumerate(ts)})
        src_width.append(len(f.source.factors))
    blocks = {}
    for d, columns in src_tuples.items():
        td = d + degree
        nrows = target.dim(td)
        if nrows == 0 or source.dim(d) == 0:
            continue
        mat = [[Fraction(0)] * len(columns) for _ in range(nrows)]
        for col, combo in enumerate(columns):
            # split the atomic tuple into one chunk per factor
            chunks = []
            pos = 0
            for w in src_width:
                chunks.append(combo[pos:pos + w])
                pos += w
            # Koszul sign from moving each f_j past the inputs before it
            sign_exp = 0
            images = []  # per factor: list of (atomic target tuple, coeff)
            for j, f in enumerate(factors):
                before = sum(sd for ch in chunks[:j] for sd, _ in ch)
                sign_exp += f.degree * before
                sdeg, sidx = src_lookup[j][chunks[j]]
                blk = f.block(sdeg)
                tdeg = sdeg + f.degree
                img = []
                for r in range(len(blk)):
                    if blk[r][sidx] != 0:
                        img.append((tgt_expand[j][(tdeg, r)], blk[r][sidx]))
                images.append(img)
            sgn = Fraction(-1) ** (sign_exp % 2)
            for pick in itertools.product(*images):
                tup = tuple(x for p in pick for x in p[0])
                coeff = sgn
                for p in pick:
                    coeff *= p[1]
                mat[tgt_index[td][tup]][col] += coeff
        blocks[d] = mat
    return GradedMap(source, target, degree, blocks)


def tensor_maps(f: GradedMap, g: GradedMap) -> GradedMap:
    return tensor_maps_many([f, g])


class ChainComplex:
    """Graded space with a degree -1 differential squaring to zero."""

    def __init__(self, space: GradedVectorSpace, differential: GradedMap):
        if differential.source != space or differential.target != space:
            raise ValueError("differential must be an endomap of the space")
        if differential.degree != -1:
            raise ValueError("differential must have degree -1")
        sq = differential.compose(differential)
        if not sq.is_zero():
            raise ValueError("differential does not square to zero")
        self.space = space
        self.differential = differential

    @classmethod
    def zero_differential(cls, space):
        return cls(space, GradedMap.zero(space, space, -1))

    def tensor_power_differential(self, n: int) -> GradedMap:
        """Differential on space^(x n): sum of 1 x..x d x..x 1 with Koszul signs."""
        if n < 1:
            raise ValueError("n >= 1 required")
        if n == 1:
            return self.differential
        ident = GradedMap.identity(self.space)
        terms = []
        for i in range(n):
            facs = [ident] * n
            facs[i] = self.differential
            terms.append(tensor_maps_many(facs))
        return map_sum(terms)

    def __eq__(self, other):
        return (isinstance(other, ChainComplex)
                and self.space == other.space
                and self.differential == other.differential)

    def __repr__(self):
        return f"ChainComplex({self.space.dims})"


def hom_differential(f: GradedMap, source_factors: Sequence[ChainComplex],
                     target: ChainComplex) -> GradedMap:
    """Differential induced on Hom(tensor of sources, target).

    [f, d] = d_target . f - (-1)^|f| f . d_tensor.  Applying it twice
    gives zero.  The source of f must be the declared tensor product of
    the factor complexes.
    """
    factor_spaces = [c.space for c in source_factors]
    expected = (tensor_spaces(factor_spaces) if len(factor_spaces) > 1
                else factor_spaces[0])
    if f.source != expected:
        raise ValueError("source of f is not the declared tensor product")
    if f.target != target.space:
        raise ValueError("target of f does not match the declared complex")
    if len(source_factors) == 1:
        d_tensor = source_factors[0].differential
    else:
        ids = [GradedMap.identity(c.space) for c in source_factors]
        terms = []
        for i, c in enumerate(source_factors):
            facs = list(ids)
            facs[i] = c.differential
            terms.append(tensor_maps_many(facs))
        d_tensor = map_sum(terms)
    sign = Fraction(-1) ** (f.degree % 2)
    return target.differential.compose(f).add(f.compose(d_tensor), 1, -sign)


class HomologyData:
    """Canonical strong deformation retract of a complex onto its homology.

    Satisfies projection . inclusion = 1, inclusion . projection - 1 =
    [splitting_homotopy, d], d = 0 on the image of the inclusion, and
    the three side conditions phi phi = 0, phi . inclusion = 0,
    projection . phi = 0.
    """

    def __init__(self, complex: ChainComplex, homology: GradedVectorSpace,
                 inclusion: GradedMap, projection: GradedMap,
                 splitting_homotopy: GradedMap):
        self.complex = complex
        self.homology = homology
        self.inclusion = inclusion
        self.projection = projection
        self.splitting_homotopy = splitting_homotopy


def homology_with_splitting(c: ChainComplex) -> HomologyData:
    """Homology with explicit splitting witnesses.

    Decomposes each degree as boundaries + harmonic representatives +
    a complement mapped isomorphically onto lower boundaries, using
    row reduction with leftmost pivots throughout, so the output is
    deterministic.
    """
    space = c.space
    degs = space.degrees()
    # Per degree: columns spanning boundaries B_k, chosen preimage columns
    # A_{k+1} (standard basis vectors at pivot columns of d_{k+1}).
    bound: dict[int, list] = {}      # degree -> list of boundary column vectors
    pre: dict[int, list[int]] = {}   # degree k -> pivot column indices in C_{k+1}
    for k in degs:
        dmat = c.differential.block(k + 1)  # C_{k+1} -> C_k
        if not dmat or not dmat[0]:
            bound[k], pre[k] = [], []
            continue
        _, _, pivots = rref(dmat)
        bound[k] = [tuple(dmat[r][j] for r in range(len(dmat))) for j in pivots]
        pre[k] = list(pivots)

    hom_dims: dict[int, int] = {}
    hom_reps: dict[int, list] = {}
    for k in degs:
        n = space.dim(k)
        dmat = c.differential.block(k)
        if space.dim(k - 1) == 0:
            kern = [tuple(Fraction(1 if i == j else 0) for i in range(n))
                    for j in range(n)]
        else:
            kern = kernel_basis(dmat)
        # Extend the boundary basis to the kernel: greedy leftmost selection.
        chosen = list(bound[k])
        reps = []
        for v in kern:
            cand = chosen + [v]
            mat = tuple(tuple(col[i] for col in cand) for i in range(n))
            if mat_rank(mat) == len(cand):
                chosen.append(v)
                reps.append(v)
        hom_reps[k] = reps
        hom_dims[k] = len(reps)

    homology = GradedVectorSpace(
        hom_dims, {k: tuple(f"h{k}_{i}" for i in range(hom_dims[k]))
                   for k in hom_dims if hom_dims[k]})

    incl_blocks, proj_blocks, phi_blocks = {}, {}, {}
    for k in degs:
        n = space.dim(k)
        a_cols = [tuple(Fraction(1 if i == j else 0) for i in range(n))
                  for j in pre.get(k - 1, [])]
        cols = bound[k] + hom_reps[k] + a_cols
        if len(cols) != n:
            raise AssertionError("degreewise decomposition dimension mismatch")
        nb, nh = len(bound[k]), len(hom_reps[k])
        if n == 0:
            continue
        p_mat = tuple(tuple(col[i] for col in cols) for i in range(n))
        # Invert the change of basis exactly.
        _, t, pivots = rref(p_mat)
        if len(pivots) != n:
            raise AssertionError("decomposition columns are not a basis")
        p_inv = t
        if hom_dims.get(k, 0):
            incl_blocks[k] = tuple(tuple(hom_reps[k][j][i] for j in range(nh))
                                   for i in range(n))
            proj_blocks[k] = tuple(p_inv[nb + j] for j in range(nh))
        # phi on boundaries: minus the chosen preimage in C_{k+1}.
        if nb:
            nk1 = space.dim(k + 1)
            mat = [[Fraction(0)] * n for _ in range(nk1)]
            for j in range(nb):
                src_col = pre[k][j]
                for i in range(nk1):
                    for col in range(n):
                        mat[i][col] += (-Fraction(1) if i == src_col else
                                        Fraction(0)) * p_inv[j][col]
            phi_blocks[k] = mat

    inclusion = GradedMap(homology, space, 0, incl_blocks)
    projection = GradedMap(space, homology, 0, proj_blocks)
    phi = GradedMap(space, space, 1, phi_blocks)
    return HomologyData(c, homology, inclusion, projection, phi)


class LinearSolveResult:
    """Outcome of an exact linear solve over map entries.

    Either a solution GradedMap, or an inconsistency certificate: a
    linear functional (per-degree row vector over the equation blocks)
    annihilating the operator's image but not the right-hand side.
    """

    def __init__(self, solution=None, certificate=None):
        self.solution = solution
        self.certificate = certificate

    @property
    def consistent(self) -> bool:
        return self.solution is not None


def solve_map_equation(operator: Callable[[GradedMap], GradedMap],
                       rhs: GradedMap,
                       unknown_source: GradedVectorSpace,
                       unknown_target: GradedVectorSpace,
                       unknown_degree: int) -> LinearSolveResult:
    """Solve operator(x) = rhs for a graded map x of the given type.

    The operator must be linear in x.  The solution is the minimal
    (reduced row echelon, leftmost pivot, free variables zero) one, so
    output is deterministic.  Inconsistency yields a certificate.
    """
    variables = []  # (degree, row, col)
    for k in unknown_source.degrees():
        ns = unknown_source.dim(k)
        nt = unknown_target.dim(k + unknown_degree)
        for r in range(nt):
            for cc in range(ns):
                variables.append((k, r, cc))

    def from_vector(vec):
        blocks: dict[int, list] = {}
        for (k, r, cc), val in zip(variables, vec):
            blk = blocks.setdefault(
                k, [[Fraction(0)] * unknown_source.dim(k)
                    for _ in range(unknown_target.dim(k + unknown_degree))])
            blk[r][cc] = val
        return GradedMap(unknown_source, unknown_target, unknown_degree, blocks)

    zero_x = GradedMap.zero(unknown_source, unknown_target, unknown_degree)
    base = operator(zero_x)
    eq_rows = []  # (degree, row, col) of equation entries
    for k in rhs.source.degrees():
        nt = rhs.target.dim(k + rhs.degree)
        ns = rhs.source.dim(k)
        for r in range(nt):
            for cc in range(ns):
                eq_rows.append((k, r, cc))

    def flatten(m: GradedMap):
        return [m.block(k)[r][cc] for (k, r, cc) in eq_rows]

    columns = []
    for i in range(len(variables)):
        e = [Fraction(0)] * len(variables)
        e[i] = Fraction(1)
        col_map = operator(from_vector(e))
        columns.append([a - b for a, b in zip(flatten(col_map), flatten(base))])
    amat = tuple(tuple(columns[j][i] for j in range(len(variables)))
                 for i in range(len(eq_rows)))
    bvec = [a - b for a, b in zip(flatten(rhs), flatten(base))]
    status, payload = solve_matrix(amat, bvec)
    if status == "solution":
        return LinearSolveResult(solution=from_vector(payload))
    cert = {eq_rows[i]: payload[i] for i in range(len(eq_rows)) if payload[i]}
    return LinearSolveResult(certificate=cert)


def solve_linear(operator, rhs, unknown_source, unknown_target,
                 unknown_degree) -> LinearSolveResult:
    """Alias for solve_map_equation; see that function."""
    return solve_map_equation(operator, rhs, unknown_source, unknown_target,
                              unknown_degree)
