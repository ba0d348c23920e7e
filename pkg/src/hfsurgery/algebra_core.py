"""Exact linear algebra over the rationals and graded chain complexes.

Everything here works with :class:`fractions.Fraction` entries stored in
sparse dictionaries.  Homology is computed one grading at a time, which
keeps the elimination blocks small even for complexes with a few thousand
generators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

Rational = Fraction
SparseVector = Dict[int, Fraction]


class ChainComplexError(ValueError):
    """Raised for complexes or maps that violate the chain axioms."""


def as_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floating point values are not accepted")
    return Fraction(x)


# ---------------------------------------------------------------------------
# sparse vectors and echelon bases


def _axpy(target: SparseVector, scale: Fraction, source: Mapping[int, Fraction]) -> None:
    # target += scale * source, dropping cancelled entries
    for k, v in source.items():
        nv = target.get(k, 0) + scale * v
        if nv:
            target[k] = nv
        else:
            target.pop(k, None)


class EchelonBasis:
    """Incrementally built basis in echelon form.

    Every stored vector has a distinct leading (smallest) index.  Each vector
    also carries a coordinate vector ("tag") which records how it was built
    from the inputs, so reductions can report the combination they used.
    """

    def __init__(self) -> None:
        self._rows: Dict[int, Tuple[SparseVector, SparseVector]] = {}

    def __len__(self) -> int:
        return len(self._rows)

    def reduce(self, vec: Mapping[int, Fraction]) -> Tuple[SparseVector, SparseVector]:
        """Return (remainder, used) with vec = remainder + sum(used[k] * tag_k)."""
        v = dict(vec)
        used: SparseVector = {}
        while v:
            lead = min(v)
            row = self._rows.get(lead)
            if row is None:
                break
            w, tag = row
            c = v[lead] / w[lead]
            _axpy(v, -c, w)
            _axpy(used, c, tag)
        return v, used

    def insert(self, vec: Mapping[int, Fraction], tag: Mapping[int, Fraction]) -> Optional[SparseVector]:
        """Reduce vec and store it if independent.

        tag is the coordinate vector attached to vec.  Returns None when vec
        was stored, otherwise the dependency (a tag combination equal to vec).
        """
        rem, used = self.reduce(vec)
        if not rem:
            return used
        new_tag = dict(tag)
        _axpy(new_tag, Fraction(-1), used)
        self._rows[min(rem)] = (rem, new_tag)
        return None

    def contains(self, vec: Mapping[int, Fraction]) -> bool:
        rem, _ = self.reduce(vec)
        return not rem


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class SparseMatrix:
    """A rows x cols rational matrix stored as {(row, col): value}."""

    rows: int
    cols: int
    entries: Mapping[Tuple[int, int], Fraction] = field(default_factory=dict)

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence]) -> "SparseMatrix":
        n_rows = len(dense)
        n_cols = len(dense[0]) if n_rows else 0
        entries = {}
        for r, row in enumerate(dense):
            if len(row) != n_cols:
                raise ValueError("ragged matrix")
            for c, x in enumerate(row):
                if x:
                    entries[(r, c)] = as_rational(x)
        return cls(n_rows, n_cols, entries)

    def column(self, c: int) -> SparseVector:
        return {r: v for (r, cc), v in self.entries.items() if cc == c and v}

    def columns(self) -> List[SparseVector]:
        cols: List[SparseVector] = [{} for _ in range(self.cols)]
        for (r, c), v in self.entries.items():
            if v:
                cols[c][r] = as_rational(v)
        return cols

    def to_dense(self) -> List[List[Fraction]]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = as_rational(v)
        return out


@dataclass(frozen=True)
class Reduction:
    rank: int
    kernel: Tuple[SparseVector, ...]
    image: Tuple[SparseVector, ...]
    pivot_columns: Tuple[int, ...]


def reduce(matrix: SparseMatrix) -> Reduction:
    """Column reduction of a sparse matrix.

    Columns are processed left to right.  A column independent of the earlier
    ones is a pivot column and its reduced image joins the image basis; a
    dependent column yields one kernel vector.
    """
    basis = EchelonBasis()
    kernel: List[SparseVector] = []
    pivots: List[int] = []
    image: List[SparseVector] = []
    for c, col in enumerate(matrix.columns()):
        dep = basis.insert(col, {c: Fraction(1)})
        if dep is None:
            pivots.append(c)
            image.append(col)
        else:
            kv = {k: -v for k, v in dep.items()}
            kv[c] = kv.get(c, 0) + 1
            kernel.append({k: v for k, v in kv.items() if v})
    return Reduction(len(pivots), tuple(kernel), tuple(image), tuple(pivots))


def dense_rank(dense: Sequence[Sequence[Fraction]]) -> int:
    if not dense or not dense[0]:
        return 0
    return reduce(SparseMatrix.from_dense(dense)).rank


def mat_mul(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]], inner: int) -> List[List[Fraction]]:
    """Dense product; inner is the shared dimension (needed when it is zero)."""
    rows = len(a)
    cols = len(b[0]) if b else 0
    if inner == 0:
        return [[Fraction(0)] * cols for _ in range(rows)]
    out = []
    for r in range(rows):
        ar = a[r]
        out.append([sum((ar[k] * b[k][c] for k in range(inner) if ar[k]), Fraction(0)) for c in range(cols)])
    return out


# ---------------------------------------------------------------------------
# graded objects


class GradedVectorSpace:
    """Finite map grading -> dimension with no zero entries."""

    __slots__ = ("_dims",)

    def __init__(self, dims: Optional[Mapping] = None) -> None:
        clean = {}
        for g, d in (dims or {}).items():
            if d < 0:
                raise ValueError("negative dimension")
            if d:
                clean[as_rational(g)] = int(d)
        self._dims = clean

    @property
    def dims(self) -> Dict[Fraction, int]:
        return dict(self._dims)

    def __getitem__(self, g) -> int:
        return self._dims.get(as_rational(g), 0)

    def total(self) -> int:
        return sum(self._dims.values())

    def euler_characteristic(self) -> int:
        chi = 0
        for g, d in self._dims.items():
            if g.denominator != 1:
                raise ValueError("Euler characteristic needs integer gradings")
            chi += d if g.numerator % 2 == 0 else -d
        return chi

    def shifted(self, by) -> "GradedVectorSpace":
        by = as_rational(by)
        return GradedVectorSpace({g + by: d for g, d in self._dims.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, GradedVectorSpace) and self._dims == other._dims

    def __hash__(self) -> int:
        return hash(frozenset(self._dims.items()))

    def __repr__(self) -> str:
        body = ", ".join(f"{g}: {d}" for g, d in sorted(self._dims.items()))
        return f"GradedVectorSpace({{{body}}})"


class FiniteChainComplex:
    """Finitely generated graded complex over Q.

    generators is a sequence of (id, grading); differential maps a source id
    to {target id: coefficient}.  The differential must lower grading by one
    and square to zero.
    """

    def __init__(self, generators: Iterable[Tuple[Hashable, object]],
                 differential: Optional[Mapping[Hashable, Mapping[Hashable, object]]] = None,
                 check: bool = True) -> None:
        self.ids: List[Hashable] = []
        self.gradings: List[Fraction] = []
        self.index: Dict[Hashable, int] = {}
        for gid, g in generators:
            if gid in self.index:
                raise ChainComplexError(f"duplicate generator {gid!r}")
            self.index[gid] = len(self.ids)
            self.ids.append(gid)
            self.gradings.append(as_rational(g))
        self.d: List[SparseVector] = [{} for _ in self.ids]
        for src, row in (differential or {}).items():
            si = self._idx(src)
            for tgt, c in row.items():
                c = as_rational(c)
                if not c:
                    continue
                ti = self._idx(tgt)
                if self.gradings[ti] != self.gradings[si] - 1:
                    raise ChainComplexError(f"differential {src!r} -> {tgt!r} does not lower grading by 1")
                self.d[si][ti] = self.d[si].get(ti, 0) + c
        self.by_grading: Dict[Fraction, List[int]] = {}
        for i, g in enumerate(self.gradings):
            self.by_grading.setdefault(g, []).append(i)
        self.checked = False
        if check:
            if not self.is_chain_complex():
                raise ChainComplexError("differential does not square to zero")
            self.checked = True

    def _idx(self, gid) -> int:
        try:
            return self.index[gid]
        except KeyError:
            raise ChainComplexError(f"unknown generator {gid!r}") from None

    def __len__(self) -> int:
        return len(self.ids)

    def apply(self, vec: Mapping[int, Fraction]) -> SparseVector:
        out: SparseVector = {}
        for i, c in vec.items():
            _axpy(out, c, self.d[i])
        return out

    def is_chain_complex(self) -> bool:
        return all(not self.apply(row) for row in self.d)

    def chain_groups(self) -> GradedVectorSpace:
        return GradedVectorSpace({g: len(v) for g, v in self.by_grading.items()})

    def gradings_present(self) -> List[Fraction]:
        return sorted(self.by_grading)


@dataclass
class _GradingData:
    cycles_rank: int
    reps: List[SparseVector]
    basis: EchelonBasis  # boundaries (tag 0) then homology reps (tag e_k)


class Homology:
    """Homology of a FiniteChainComplex with explicit representatives.

    Only the requested gradings are computed, lazily and at most once.
    """

    def __init__(self, complex_: FiniteChainComplex) -> None:
        if not complex_.checked:
            if not complex_.is_chain_complex():
                raise ChainComplexError("differential does not square to zero")
            complex_.checked = True
        self.complex = complex_
        self._data: Dict[Fraction, _GradingData] = {}
        self._kernels: Dict[Fraction, Tuple[List[SparseVector], List[SparseVector]]] = {}

    def _kernel_and_image(self, g: Fraction):
        # kernel of d on C_g and image of d on C_g (inside C_{g-1})
        if g in self._kernels:
            return self._kernels[g]
        cx = self.complex
        basis = EchelonBasis()
        kernel: List[SparseVector] = []
        image: List[SparseVector] = []
        for i in cx.by_grading.get(g, []):
            col = cx.d[i]
            dep = basis.insert(col, {i: Fraction(1)})
            if dep is None:
                image.append(col)
            else:
                kv = {k: -v for k, v in dep.items()}
                kv[i] = kv.get(i, 0) + 1
                kernel.append({k: v for k, v in kv.items() if v})
        self._kernels[g] = (kernel, image)
        return kernel, image

    def _grading(self, g) -> _GradingData:
        g = as_rational(g)
        data = self._data.get(g)
        if data is not None:
            return data
        cycles, _ = self._kernel_and_image(g)
        _, boundaries = self._kernel_and_image(g + 1)
        basis = EchelonBasis()
        for b in boundaries:
            basis.insert(b, {})
        reps: List[SparseVector] = []
        for z in cycles:
            if basis.insert(z, {len(reps): Fraction(1)}) is None:
                reps.append(z)
        data = _GradingData(len(cycles), reps, basis)
        self._data[g] = data
        return data

    def dim(self, g) -> int:
        return len(self._grading(g).reps)

    def representatives(self, g) -> List[SparseVector]:
        return list(self._grading(g).reps)

    def coordinates(self, g, cycle: Mapping[int, Fraction]) -> List[Fraction]:
        """Coordinates of the class of a cycle in the representative basis."""
        data = self._grading(g)
        rem, used = data.basis.reduce(cycle)
        if rem:
            raise ChainComplexError("vector is not a cycle of the expected grading")
        out = [Fraction(0)] * len(data.reps)
        for k, v in used.items():
            out[k] = v
        return out

    def graded_dims(self, gradings: Optional[Iterable] = None) -> GradedVectorSpace:
        gs = self.complex.gradings_present() if gradings is None else [as_rational(g) for g in gradings]
        return GradedVectorSpace({g: self.dim(g) for g in gs})


def homology(complex_: FiniteChainComplex) -> GradedVectorSpace:
    """Graded dimensions of H_*(complex)."""
    return Homology(complex_).graded_dims()


# ---------------------------------------------------------------------------
# chain maps


@dataclass(frozen=True)
class ChainMap:
    """A homogeneous linear map between two complexes, by generator id."""

    source: FiniteChainComplex
    target: FiniteChainComplex
    images: Mapping[Hashable, Mapping[Hashable, Fraction]]
    shift: Fraction = Fraction(0)

    def matrix_rows(self) -> List[SparseVector]:
        out: List[SparseVector] = []
        for gid in self.source.ids:
            row = {}
            for tgt, c in self.images.get(gid, {}).items():
                c = as_rational(c)
                if c:
                    row[self.target._idx(tgt)] = c
            out.append(row)
        return out

    def apply(self, vec: Mapping[int, Fraction], rows: Optional[List[SparseVector]] = None) -> SparseVector:
        rows = rows if rows is not None else self.matrix_rows()
        out: SparseVector = {}
        for i, c in vec.items():
            _axpy(out, c, rows[i])
        return out

    def check(self) -> None:
        rows = self.matrix_rows()
        src, tgt = self.source, self.target
        shift = as_rational(self.shift)
        for i, row in enumerate(rows):
            for j in row:
                if tgt.gradings[j] != src.gradings[i] + shift:
                    raise ChainComplexError("map is not homogeneous of the stated shift")
        for i in range(len(src)):
            lhs = self.apply(src.d[i], rows)
            rhs = tgt.apply(rows[i])
            _axpy(lhs, Fraction(-1), rhs)
            if lhs:
                raise ChainComplexError(f"not a chain map at generator {src.ids[i]!r}")


@dataclass(frozen=True)
class LinearMapOnHomology:
    """Matrices of an induced map, one block per source grading.

    blocks[g][r][c] is the coefficient of target basis element r (grading
    g + shift) in the image of source basis element c (grading g).
    """

    shift: Fraction
    blocks: Mapping[Fraction, List[List[Fraction]]]

    def block(self, g) -> List[List[Fraction]]:
        return self.blocks[as_rational(g)]

    def rank(self, g) -> int:
        return dense_rank(self.block(g))

    def kernel_dim(self, g) -> int:
        b = self.block(g)
        cols = len(b[0]) if b else None
        if cols is None:
            return 0
        return cols - dense_rank(b)


def induced_map(f: ChainMap, gradings: Optional[Iterable] = None,
                source_homology: Optional[Homology] = None,
                target_homology: Optional[Homology] = None,
                check: bool = True) -> LinearMapOnHomology:
    """Matrix of f_* in the representative bases of source and target homology."""
    if check:
        f.check()
    hs = source_homology or Homology(f.source)
    ht = target_homology or Homology(f.target)
    shift = as_rational(f.shift)
    rows = f.matrix_rows()
    gs = f.source.gradings_present() if gradings is None else [as_rational(g) for g in gradings]
    blocks = {}
    for g in gs:
        reps = hs.representatives(g)
        n_t = ht.dim(g + shift)
        block = [[Fraction(0)] * len(reps) for _ in range(n_t)]
        for c, z in enumerate(reps):
            coords = ht.coordinates(g + shift, f.apply(z, rows))
            for r, v in enumerate(coords):
                block[r][c] = v
        blocks[g] = block
    return LinearMapOnHomology(shift, blocks)
