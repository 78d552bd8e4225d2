"""Standard deviation as a quotient energy seminorm: extend the algebra by a
scalar summand, build the block Laplacian weighted by a central density,
eliminate the scalar by a Schur complement, and recover the variance form.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    DEFAULT_EQ_TOL,
    DEFAULT_POS_TOL,
    Algebra,
    Element,
    SuperOperator,
)
from .cdc import CdCForm
from .energy import Laplacian, _laplacian_from_superop
from .errors import InputError
from .quotient import central_projection, schur_quotient, split


def _central_positive_scalars(algebra: Algebra, p: Element, tol=DEFAULT_POS_TOL):
    """p must be central (blockwise scalar), strictly positive, with unit
    trace; returns the per-block scalars."""
    algebra._own(p)
    problems = []
    lams = []
    for b, (m, n) in enumerate(zip(p.data, algebra.blocks)):
        lam = np.trace(m) / n
        if np.abs(m - lam * np.eye(n)).max() > tol * (1.0 + abs(lam)):
            problems.append(
                f"block {b}: weight element is not central; non-central "
                "weights define non-tracial states, which are not supported"
            )
        if abs(lam.imag) > tol or lam.real <= tol:
            problems.append(f"block {b}: weight scalar {lam:.6g} is not strictly positive")
        lams.append(lam.real)
    total = p.trace()
    if abs(total - 1.0) > tol * (1.0 + abs(total)):
        problems.append(f"weight element must have unit trace, got {total:.12g}")
    if problems:
        raise InputError("invalid weight element", problems)
    return np.asarray(lams)


@dataclass(frozen=True)
class ExtendedAlgebra:
    """The algebra extended by one scalar summand, carrying the block
    Laplacian whose Schur complement yields the variance form."""

    base: Algebra
    weight: Element
    extended: Algebra
    laplacian: Laplacian
    residuals: dict = field(default_factory=dict)

    def mu(self, a: Element) -> complex:
        """The faithful tracial state tau(p a)."""
        return (self.weight * a).trace()

    def extend_element(self, a: Element, alpha: complex) -> Element:
        data = list(a.data) + [np.array([[alpha]], dtype=complex)]
        return self.extended.element(data)


def extend(algebra: Algebra, p: Element, tol=DEFAULT_POS_TOL) -> ExtendedAlgebra:
    """Build B = A (+) C with trace extended by 1 on the scalar unit, and the
    block operator [[M, J*], [J, 1]] with M(a) = p a and J(a) = -mu(a)."""
    lams = _central_positive_scalars(algebra, p, tol)
    extended = Algebra(algebra.blocks + (1,), algebra.trace_weights + (1.0,))
    d = algebra.dim

    mult = np.repeat(lams, [n * n for n in algebra.blocks])
    mu_row = np.empty(d)
    for i in range(d):
        b, r, s = algebra.basis_triple(i)
        mu_row[i] = lams[b] * np.sqrt(algebra.trace_weights[b]) if r == s else 0.0

    m = np.zeros((d + 1, d + 1), dtype=complex)
    m[:d, :d] = np.diag(mult)
    m[d, :d] = -mu_row
    m[:d, d] = -mu_row
    m[d, d] = 1.0
    lap = _laplacian_from_superop(SuperOperator(extended, m))

    # construction checks: the pairing identity on basis pairs, positivity,
    # and annihilation of the extended unit
    one_ext = extended.identity()
    unit_res = lap.apply(one_ext).norm()
    pair_res = 0.0
    basis_ext = [extended.from_coords(np.eye(d + 1)[i]) for i in range(d + 1)]
    mu_of = lambda a: complex((p * a).trace())
    for i, u in enumerate(basis_ext):
        a_i = algebra.element(u.data[:-1])
        alpha_i = complex(u.data[-1][0, 0])
        for j, v in enumerate(basis_ext):
            b_j = algebra.element(v.data[:-1])
            beta_j = complex(v.data[-1][0, 0])
            lhs = m[i, j]
            da = a_i - alpha_i * algebra.identity()
            db = b_j - beta_j * algebra.identity()
            rhs = mu_of(da.adjoint() * db)
            pair_res = max(pair_res, abs(lhs - rhs))
    eigs = np.linalg.eigvalsh(lap.matrix)
    residuals = {
        "unit_annihilation": float(unit_res),
        "pairing_identity": float(pair_res),
        "min_eigenvalue": float(eigs[0]),
    }
    if pair_res > 1e-10 * (1.0 + float(np.abs(m).max())):
        raise InputError(f"pairing identity failed to verify (residual {pair_res:.3e})")
    return ExtendedAlgebra(
        base=algebra, weight=p, extended=extended, laplacian=lap, residuals=residuals
    )


def stddev_laplacian(ea: ExtendedAlgebra, tol=DEFAULT_EQ_TOL) -> Laplacian:
    """Eliminate the scalar summand by the Schur complement and confirm the
    closed form a -> p (a - mu(a))."""
    proj = central_projection(ea.extended, range(len(ea.base.blocks)))
    qd = split(ea.laplacian, proj)
    lap = schur_quotient(qd)

    closed = SuperOperator.from_function(
        ea.base, lambda a: ea.weight * (a - complex(ea.mu(a)) * ea.base.identity())
    )
    gap = float(np.abs(lap.matrix - closed.matrix).max())
    if gap > max(tol, 1e-10) * (1.0 + float(np.abs(lap.matrix).max())):
        raise InputError(f"Schur route disagrees with the closed form (residual {gap:.3e})")
    return lap


def stddev_seminorm(ea: ExtendedAlgebra, a: Element) -> float:
    """The standard deviation of a for the state mu: |a - mu(a)| in the
    mu-norm."""
    ea.base._own(a)
    centered = a - complex(ea.mu(a)) * ea.base.identity()
    return float(np.sqrt(max(ea.mu(centered.adjoint() * centered).real, 0.0)))


def independent_copies_cdc(algebra: Algebra, p: Element, tol=DEFAULT_POS_TOL) -> CdCForm:
    """The variance carre-du-champ built from two independent copies:
    Gamma(a, b) = (1/2) (mu(a*b) - mu(a*) b - a* mu(b) + a*b) p."""
    lams = _central_positive_scalars(algebra, p, tol)
    d, n = algebra.dim, algebra.total_size
    emb = algebra.embedded_basis
    adj = algebra.adj_table
    mul = algebra.mul_table
    p_full = p.full()
    eye = np.eye(n)

    mu_vec = np.empty(d)
    for i in range(d):
        b, r, s = algebra.basis_triple(i)
        mu_vec[i] = lams[b] * algebra.trace_weights[b] if r == s else 0.0

    gram = np.zeros((d, d, n, n), dtype=complex)
    for i in range(d):
        ia = adj[i]
        for j in range(d):
            k = mul[ia, j]
            prod = emb[k] if k >= 0 else np.zeros((n, n))
            mu_ab = mu_vec[k] if k >= 0 else 0.0
            term = (
                mu_ab * eye
                - mu_vec[ia] * emb[j]
                - mu_vec[j] * emb[ia]
                + prod
            )
            gram[i, j] = 0.5 * (term @ p_full)
    return CdCForm(algebra, gram, scale=0.5)
