"""Finite-dimensional C*-algebras as direct sums of full complex matrix blocks.

An algebra is given by block sizes ``[n_1, ..., n_k]`` and strictly positive
trace weights ``[w_1, ..., w_k]``.  Elements are block-diagonal matrices,
stored as one complex array per block; the faithful trace is
``tau(a) = sum_i w_i * tr(a_i)``.

Two bases are used throughout:

* the canonical basis of matrix units ``e^(i)_{jk}``, enumerated block-major
  then row-major;
* the L2-orthonormal basis ``e^(i)_{jk} / sqrt(w_i)``, orthonormal for the
  inner product ``<a, b> = tau(a* b)``.

Linear maps on the algebra (:class:`SuperOperator`) are stored as matrices in
the orthonormal basis and are additionally applied elementwise when building
them from rules.  The involution is conjugate-linear and is therefore never
represented as a matrix; it is always applied elementwise.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import InputError

DEFAULT_POS_TOL = 1e-9
DEFAULT_RANK_TOL = 1e-10
DEFAULT_EQ_TOL = 1e-9


@dataclass(frozen=True)
class Algebra:
    """A direct sum of full matrix blocks with a faithful weighted trace."""

    blocks: tuple
    trace_weights: tuple

    def __post_init__(self):
        problems = []
        blocks = tuple(self.blocks)
        weights = tuple(self.trace_weights)
        if not blocks:
            problems.append("blocks must be a nonempty list")
        if len(blocks) != len(weights):
            problems.append(
                f"blocks has length {len(blocks)} but trace_weights has length {len(weights)}"
            )
        clean_blocks = []
        for i, n in enumerate(blocks):
            try:
                n = int(n)
            except (TypeError, ValueError):
                n = -1
            if n < 1:
                problems.append(f"block {i} must have size >= 1")
            clean_blocks.append(n)
        clean_weights = []
        for i, w in enumerate(weights):
            try:
                w = float(w)
            except (TypeError, ValueError):
                w = -1.0
            if not w > 0:
                problems.append(f"trace weight {i} must be strictly positive")
            clean_weights.append(w)
        if problems:
            raise InputError("invalid algebra", problems)
        object.__setattr__(self, "blocks", tuple(clean_blocks))
        object.__setattr__(self, "trace_weights", tuple(clean_weights))

    # -- derived structure -------------------------------------------------

    @cached_property
    def dim(self):
        """Complex dimension d = sum of n_i^2."""
        return int(sum(n * n for n in self.blocks))

    @cached_property
    def total_size(self):
        """Size of the block-diagonal embedding, n = sum of n_i."""
        return int(sum(self.blocks))

    @cached_property
    def _basis_offsets(self):
        offs = np.zeros(len(self.blocks) + 1, dtype=int)
        np.cumsum([n * n for n in self.blocks], out=offs[1:])
        return offs

    @cached_property
    def _space_offsets(self):
        offs = np.zeros(len(self.blocks) + 1, dtype=int)
        np.cumsum(self.blocks, out=offs[1:])
        return offs

    @cached_property
    def is_commutative(self):
        return all(n == 1 for n in self.blocks)

    @cached_property
    def basis_weights(self):
        """Trace weight of the block owning each canonical basis index."""
        return np.repeat(np.asarray(self.trace_weights), [n * n for n in self.blocks])

    @cached_property
    def coord_weights(self):
        """Trace weight of the block owning each embedded-matrix row."""
        return np.repeat(np.asarray(self.trace_weights), self.blocks)

    def basis_index(self, block, row, col):
        n = self.blocks[block]
        return int(self._basis_offsets[block] + row * n + col)

    def basis_triple(self, index):
        block = int(np.searchsorted(self._basis_offsets, index, side="right") - 1)
        rem = index - self._basis_offsets[block]
        n = self.blocks[block]
        return block, int(rem // n), int(rem % n)

    @cached_property
    def mul_table(self):
        """mul_table[i, j] = canonical index of e_i e_j, or -1 when zero."""
        d = self.dim
        table = np.full((d, d), -1, dtype=int)
        for i in range(d):
            bi, r, s = self.basis_triple(i)
            for c in range(self.blocks[bi]):
                j = self.basis_index(bi, s, c)
                table[i, j] = self.basis_index(bi, r, c)
        return table

    @cached_property
    def adj_table(self):
        """adj_table[i] = canonical index of (e_i)*."""
        d = self.dim
        table = np.zeros(d, dtype=int)
        for i in range(d):
            b, r, s = self.basis_triple(i)
            table[i] = self.basis_index(b, s, r)
        return table

    @cached_property
    def embedded_basis(self):
        """Array of shape (d, n, n): each canonical unit as a full matrix."""
        d, n = self.dim, self.total_size
        out = np.zeros((d, n, n), dtype=complex)
        for i in range(d):
            b, r, s = self.basis_triple(i)
            off = self._space_offsets[b]
            out[i, off + r, off + s] = 1.0
        out.setflags(write=False)
        return out

    @cached_property
    def _block_mask(self):
        n = self.total_size
        mask = np.zeros((n, n), dtype=bool)
        for b, nb in enumerate(self.blocks):
            off = self._space_offsets[b]
            mask[off : off + nb, off : off + nb] = True
        return mask

    @cached_property
    def identity_coords(self):
        """Orthonormal coordinates of the identity element."""
        return self.to_coords(self.identity())

    # -- element construction ----------------------------------------------

    def element(self, data) -> "Element":
        return Element(self, data)

    def zero(self) -> "Element":
        return Element(self, [np.zeros((n, n)) for n in self.blocks])

    def identity(self) -> "Element":
        return Element(self, [np.eye(n) for n in self.blocks])

    def basis_element(self, index) -> "Element":
        b, r, s = self.basis_triple(index)
        data = [np.zeros((n, n)) for n in self.blocks]
        data[b][r, s] = 1.0
        return Element(self, data)

    def from_full(self, matrix, tol=1e-12) -> "Element":
        """Extract an element from its block-diagonal embedding; rejects
        matrices with mass outside the blocks."""
        matrix = np.asarray(matrix, dtype=complex)
        n = self.total_size
        if matrix.shape != (n, n):
            raise InputError(f"expected a {n}x{n} matrix, got {matrix.shape}")
        off_block = np.abs(matrix[~self._block_mask])
        scale = 1.0 + np.abs(matrix).max(initial=0.0)
        if off_block.size and off_block.max() > tol * scale:
            raise InputError("matrix is not block-diagonal for this algebra")
        return self.pinch(matrix)

    def pinch(self, matrix) -> "Element":
        """Orthogonal projection of a full matrix onto the embedded algebra
        (keep the diagonal blocks, drop everything else)."""
        matrix = np.asarray(matrix, dtype=complex)
        n = self.total_size
        if matrix.shape != (n, n):
            raise InputError(f"expected a {n}x{n} matrix, got {matrix.shape}")
        data = []
        for b, nb in enumerate(self.blocks):
            off = self._space_offsets[b]
            data.append(matrix[off : off + nb, off : off + nb])
        return Element(self, data)

    # -- coordinates ---------------------------------------------------------

    def to_coords(self, a: "Element") -> np.ndarray:
        """Coordinates in the orthonormal basis e_i / sqrt(w)."""
        self._own(a)
        parts = [
            np.sqrt(w) * m.reshape(-1)
            for w, m in zip(self.trace_weights, a.data)
        ]
        return np.concatenate(parts)

    def from_coords(self, coords) -> "Element":
        coords = np.asarray(coords, dtype=complex)
        if coords.shape != (self.dim,):
            raise InputError(f"expected {self.dim} coordinates, got {coords.shape}")
        data = []
        for b, n in enumerate(self.blocks):
            off = self._basis_offsets[b]
            w = self.trace_weights[b]
            data.append(coords[off : off + n * n].reshape(n, n) / np.sqrt(w))
        return Element(self, data)

    def canonical_coords(self, a: "Element") -> np.ndarray:
        """Coefficients over the matrix units themselves (no weight scaling)."""
        self._own(a)
        return np.concatenate([m.reshape(-1) for m in a.data])

    def from_canonical_coords(self, coords) -> "Element":
        coords = np.asarray(coords, dtype=complex)
        if coords.shape != (self.dim,):
            raise InputError(f"expected {self.dim} coordinates, got {coords.shape}")
        data = []
        for b, n in enumerate(self.blocks):
            off = self._basis_offsets[b]
            data.append(coords[off : off + n * n].reshape(n, n))
        return Element(self, data)

    def tau(self, a: "Element") -> complex:
        self._own(a)
        return complex(sum(w * np.trace(m) for w, m in zip(self.trace_weights, a.data)))

    def amplify(self, n: int) -> "Algebra":
        """The algebra of n x n matrices over this one (blocks scale by n,
        weights are unchanged: the matrix factor carries its unnormalized
        trace)."""
        if n < 1:
            raise InputError("amplification order must be >= 1")
        return Algebra(tuple(n * nb for nb in self.blocks), self.trace_weights)

    def _own(self, a: "Element"):
        if a.algebra is not self and (
            a.algebra.blocks != self.blocks
            or a.algebra.trace_weights != self.trace_weights
        ):
            raise InputError("element does not belong to this algebra")


def build_algebra(blocks, trace_weights) -> Algebra:
    """Construct an :class:`Algebra`, validating sizes and weights."""
    return Algebra(tuple(blocks), tuple(trace_weights))


class Element:
    """A block-diagonal element of a finite-dimensional C*-algebra.

    Immutable after construction; all arithmetic returns new elements.
    """

    __slots__ = ("algebra", "data")

    def __init__(self, algebra: Algebra, data):
        if len(data) != len(algebra.blocks):
            raise InputError(
                f"expected {len(algebra.blocks)} blocks, got {len(data)}"
            )
        mats = []
        for k, n in enumerate(algebra.blocks):
            m = np.array(data[k], dtype=complex)
            if m.shape != (n, n):
                raise InputError(f"block {k} must have shape ({n}, {n}), got {m.shape}")
            m.setflags(write=False)
            mats.append(m)
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "data", tuple(mats))

    def __setattr__(self, name, value):
        raise AttributeError("Element is immutable")

    def _match(self, other: "Element"):
        self.algebra._own(other)

    # -- ring operations -----------------------------------------------------

    def __add__(self, other):
        self._match(other)
        return Element(self.algebra, [a + b for a, b in zip(self.data, other.data)])

    def __sub__(self, other):
        self._match(other)
        return Element(self.algebra, [a - b for a, b in zip(self.data, other.data)])

    def __neg__(self):
        return Element(self.algebra, [-a for a in self.data])

    def __mul__(self, other):
        if isinstance(other, Element):
            self._match(other)
            return Element(
                self.algebra, [a @ b for a, b in zip(self.data, other.data)]
            )
        return Element(self.algebra, [complex(other) * a for a in self.data])

    def __rmul__(self, scalar):
        return Element(self.algebra, [complex(scalar) * a for a in self.data])

    def adjoint(self) -> "Element":
        return Element(self.algebra, [a.conj().T for a in self.data])

    def trace(self) -> complex:
        return self.algebra.tau(self)

    def norm(self) -> float:
        """C*-norm: the largest singular value over the blocks."""
        return max(np.linalg.norm(m, 2) for m in self.data)

    def full(self) -> np.ndarray:
        """The block-diagonal embedding into M_n, n = sum of block sizes."""
        n = self.algebra.total_size
        out = np.zeros((n, n), dtype=complex)
        for b, m in enumerate(self.data):
            off = self.algebra._space_offsets[b]
            out[off : off + m.shape[0], off : off + m.shape[1]] = m
        return out

    def block(self, b) -> np.ndarray:
        return self.data[b]

    def is_self_adjoint(self, tol=DEFAULT_POS_TOL) -> bool:
        gap = (self - self.adjoint()).norm()
        return gap <= tol * (1.0 + self.norm())

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues over all blocks (Hermitian solver when self-adjoint)."""
        if self.is_self_adjoint():
            return np.concatenate([np.linalg.eigvalsh((m + m.conj().T) / 2) for m in self.data])
        return np.concatenate([np.linalg.eigvals(m) for m in self.data])

    def distance(self, other: "Element") -> float:
        return (self - other).norm()

    def allclose(self, other: "Element", tol=DEFAULT_EQ_TOL) -> bool:
        return self.distance(other) <= tol * (1.0 + self.norm() + other.norm())

    def __repr__(self):
        return f"Element(blocks={self.algebra.blocks})"


# -- scalar-valued operations ---------------------------------------------


def tau_inner(a: Element, b: Element) -> complex:
    """The L2 inner product tau(a* b), conjugate-linear in ``a``."""
    a._match(b)
    return complex(
        sum(w * np.vdot(x, y) for w, x, y in zip(a.algebra.trace_weights, a.data, b.data))
    )


def operator_norm(a: Element) -> float:
    return a.norm()


def is_positive(a: Element, tol=DEFAULT_POS_TOL) -> bool:
    """Self-adjoint within tolerance and spectrum >= -tol*(1+|a|)."""
    slack = tol * (1.0 + a.norm())
    if (a - a.adjoint()).norm() > slack:
        return False
    for m in a.data:
        herm = (m + m.conj().T) / 2
        if np.linalg.eigvalsh(herm).min() < -slack:
            return False
    return True


def apply_spectral(a: Element, fn: Callable, tol=DEFAULT_POS_TOL):
    """Apply a scalar function to a self-adjoint element through its
    eigendecomposition.  Returns (result, eigenvalues)."""
    if not a.is_self_adjoint(tol):
        raise InputError("spectral calculus requires a self-adjoint element")
    data = []
    eigs = []
    for m in a.data:
        w, v = np.linalg.eigh((m + m.conj().T) / 2)
        eigs.append(w)
        data.append((v * np.asarray(fn(w), dtype=complex)) @ v.conj().T)
    return Element(a.algebra, data), np.concatenate(eigs)


@dataclass(frozen=True)
class PiecewiseLinear:
    """A real piecewise-linear function given by knots; linear extrapolation
    beyond the end knots keeps the outermost slopes."""

    xs: tuple
    ys: tuple

    def __post_init__(self):
        xs = tuple(float(x) for x in self.xs)
        ys = tuple(float(y) for y in self.ys)
        if len(xs) < 2 or len(xs) != len(ys):
            raise InputError("need matching knot lists of length >= 2")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise InputError("knots must be strictly increasing")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @cached_property
    def slopes(self):
        xs = np.asarray(self.xs)
        ys = np.asarray(self.ys)
        return (ys[1:] - ys[:-1]) / (xs[1:] - xs[:-1])

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        xs, ys = np.asarray(self.xs), np.asarray(self.ys)
        out = np.interp(t, xs, ys)
        out = np.where(t < xs[0], ys[0] + self.slopes[0] * (t - xs[0]), out)
        out = np.where(t > xs[-1], ys[-1] + self.slopes[-1] * (t - xs[-1]), out)
        return out

    def lipschitz_on(self, lo: float, hi: float) -> float:
        """Largest slope magnitude over segments meeting [lo, hi] (with a tiny
        relative pad so boundary knots are never missed)."""
        if hi < lo:
            lo, hi = hi, lo
        pad = 1e-9 * (1.0 + abs(lo) + abs(hi))
        lo, hi = lo - pad, hi + pad
        best = 0.0
        xs = self.xs
        for k, slope in enumerate(self.slopes):
            seg_lo = -np.inf if k == 0 else xs[k]
            seg_hi = np.inf if k == len(self.slopes) - 1 else xs[k + 1]
            if max(seg_lo, lo) < min(seg_hi, hi):
                best = max(best, abs(float(slope)))
        return best

    # common battery members

    @classmethod
    def identity(cls):
        return cls((0.0, 1.0), (0.0, 1.0))

    @classmethod
    def affine(cls, intercept, slope):
        return cls((0.0, 1.0), (intercept, intercept + slope))

    @classmethod
    def relu(cls):
        """max(t, 0)"""
        return cls((-1.0, 0.0, 1.0), (0.0, 0.0, 1.0))

    @classmethod
    def absolute(cls):
        """|t|"""
        return cls((-1.0, 0.0, 1.0), (1.0, 0.0, 1.0))

    @classmethod
    def clamp_above(cls, r):
        """min(t, r)"""
        r = float(r)
        return cls((r - 1.0, r, r + 1.0), (r - 1.0, r, r))


def functional_calculus(a: Element, fn: PiecewiseLinear, tol=DEFAULT_POS_TOL):
    """Apply a piecewise-linear real function to a self-adjoint element.

    Returns ``(fn(a), lip)`` where ``lip`` is the Lipschitz constant of ``fn``
    restricted to the convex hull of the spectrum of ``a``.
    """
    result, eigs = apply_spectral(a, fn, tol)
    lip = fn.lipschitz_on(float(eigs.min()), float(eigs.max()))
    return result, lip


def conditional_expectation(matrix, algebra: Algebra) -> Element:
    """Trace-compatible conditional expectation from M_n onto the embedded
    algebra: the orthogonal projection for the (normalized) trace inner
    product, i.e. keep the diagonal blocks."""
    return algebra.pinch(matrix)


# -- superoperators ---------------------------------------------------------


@dataclass(frozen=True)
class SuperOperator:
    """A C-linear map on the algebra, stored as a matrix in the orthonormal
    L2 basis."""

    algebra: Algebra
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        d = self.algebra.dim
        if m.shape != (d, d):
            raise InputError(f"superoperator matrix must be {d}x{d}, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_function(cls, algebra: Algebra, fn: Callable) -> "SuperOperator":
        """Build the matrix by applying an elementwise rule to the
        orthonormal basis."""
        d = algebra.dim
        cols = np.empty((d, d), dtype=complex)
        for i in range(d):
            e = algebra.from_coords(np.eye(d)[i])
            cols[:, i] = algebra.to_coords(fn(e))
        return cls(algebra, cols)

    @classmethod
    def identity(cls, algebra: Algebra) -> "SuperOperator":
        return cls(algebra, np.eye(algebra.dim))

    @classmethod
    def zero(cls, algebra: Algebra) -> "SuperOperator":
        return cls(algebra, np.zeros((algebra.dim, algebra.dim)))

    def apply(self, a: Element) -> Element:
        self.algebra._own(a)
        return self.algebra.from_coords(self.matrix @ self.algebra.to_coords(a))

    def __call__(self, a: Element) -> Element:
        return self.apply(a)

    def compose(self, other: "SuperOperator") -> "SuperOperator":
        return SuperOperator(self.algebra, self.matrix @ other.matrix)

    def __add__(self, other: "SuperOperator") -> "SuperOperator":
        return SuperOperator(self.algebra, self.matrix + other.matrix)

    def __sub__(self, other: "SuperOperator") -> "SuperOperator":
        return SuperOperator(self.algebra, self.matrix - other.matrix)

    def __rmul__(self, scalar) -> "SuperOperator":
        return SuperOperator(self.algebra, complex(scalar) * self.matrix)

    def sharp(self) -> "SuperOperator":
        """The map c -> (N(c*))*.  Conjugate-linear twists cancel, so the
        result is again linear; it is built elementwise, never by matrix
        conjugation."""
        return SuperOperator.from_function(
            self.algebra, lambda c: self.apply(c.adjoint()).adjoint()
        )

    def is_hermitian(self, tol=DEFAULT_EQ_TOL) -> bool:
        gap = np.abs(self.matrix - self.matrix.conj().T).max()
        return gap <= tol * (1.0 + np.abs(self.matrix).max())


def superop_sharp(n: SuperOperator) -> SuperOperator:
    return n.sharp()


def left_multiplication(algebra: Algebra, h: Element) -> SuperOperator:
    algebra._own(h)
    return SuperOperator.from_function(algebra, lambda a: h * a)


def right_multiplication(algebra: Algebra, h: Element) -> SuperOperator:
    algebra._own(h)
    return SuperOperator.from_function(algebra, lambda a: a * h)


def amplify_superop(n: SuperOperator, order: int) -> SuperOperator:
    """The map I_order (x) N on the amplified algebra."""
    base = n.algebra
    amp = base.amplify(order)
    m = np.zeros((amp.dim, amp.dim), dtype=complex)
    cells = []
    inners = []
    for idx in range(amp.dim):
        b, row, col = amp.basis_triple(idx)
        nb = base.blocks[b]
        j, r = divmod(row, nb)
        k, s = divmod(col, nb)
        cells.append((j, k))
        inners.append(base.basis_index(b, r, s))
    cells = np.array(cells)
    inners = np.array(inners)
    for i_out in range(amp.dim):
        for i_in in range(amp.dim):
            if (cells[i_out] == cells[i_in]).all():
                m[i_out, i_in] = n.matrix[inners[i_out], inners[i_in]]
    return SuperOperator(amp, m)


# -- matrices over an algebra -------------------------------------------


def from_cells(algebra: Algebra, order: int, grid) -> Element:
    """Assemble an element of ``algebra.amplify(order)`` from an order x order
    grid of elements of ``algebra``."""
    amp = algebra.amplify(order)
    data = []
    for b, nb in enumerate(algebra.blocks):
        m = np.zeros((order * nb, order * nb), dtype=complex)
        for j in range(order):
            for k in range(order):
                cell = grid[j][k]
                algebra._own(cell)
                m[j * nb : (j + 1) * nb, k * nb : (k + 1) * nb] = cell.data[b]
        data.append(m)
    return Element(amp, data)

def to_cells(algebra: Algebra, order: int, a: Element):
    """Split an element of ``algebra.amplify(order)`` into its grid of
    ``algebra`` entries."""
    amp = algebra.amplify(order)
    amp._own(a)
    grid = []
    for j in range(order):
        row = []
        for k in range(order):
            data = []
            for b, nb in enumerate(algebra.blocks):
                m = a.data[b]
                data.append(m[j * nb : (j + 1) * nb, k * nb : (k + 1) * nb])
            row.append(Element(algebra, data))
        grid.append(row)
    return grid


def matrix_direct_sum(algebra: Algebra, m: int, v: Element, n: int, w: Element) -> Element:
    """V (+) W in M_{m+n} over the algebra, from V in M_m and W in M_n."""
    zeros = algebra.zero()
    cells_v = to_cells(algebra, m, v)
    cells_w = to_cells(algebra, n, w)
    grid = []
    for j in range(m + n):
        row = []
        for k in range(m + n):
            if j < m and k < m:
                row.append(cells_v[j][k])
            elif j >= m and k >= m:
                row.append(cells_w[j - m][k - m])
            else:
                row.append(zeros)
        grid.append(row)
    return from_cells(algebra, m + n, grid)


# -- seeded sampling ---------------------------------------------------------


def random_element(algebra: Algebra, rng: np.random.Generator, scale=1.0) -> Element:
    data = [
        scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        for n in algebra.blocks
    ]
    return Element(algebra, data)


def random_self_adjoint(algebra: Algebra, rng: np.random.Generator, scale=1.0) -> Element:
    x = random_element(algebra, rng, scale)
    return 0.5 * (x + x.adjoint())


def random_positive(algebra: Algebra, rng: np.random.Generator, scale=1.0, floor=0.0) -> Element:
    x = random_element(algebra, rng, scale)
    p = x.adjoint() * x
    if floor:
        p = p + float(floor) * algebra.identity()
    return p


# -- file encoding ---------------------------------------------------------


def encode_complex_matrix(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def decode_complex_matrix(data, what="matrix") -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{what}: entries must be [re, im] pairs") from exc
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise InputError(f"{what}: expected a 2-D array of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def encode_element(a: Element) -> list:
    """Per-block 2-D arrays of [re, im] pairs."""
    return [encode_complex_matrix(m) for m in a.data]


def decode_element(algebra: Algebra, data) -> Element:
    if not isinstance(data, (list, tuple)) or len(data) != len(algebra.blocks):
        raise InputError(
            f"element must list {len(algebra.blocks)} blocks, got "
            f"{len(data) if isinstance(data, (list, tuple)) else type(data).__name__}"
        )
    mats = [decode_complex_matrix(block, f"element block {k}") for k, block in enumerate(data)]
    return Element(algebra, mats)
