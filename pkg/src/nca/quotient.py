"""Quotients of energy forms by central projections via Schur complements,
with the direct fiber-infimum cross-check."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .algebra import (
    DEFAULT_EQ_TOL,
    DEFAULT_POS_TOL,
    DEFAULT_RANK_TOL,
    Algebra,
    Element,
    SuperOperator,
    random_element,
)
from .energy import (
    Laplacian,
    _laplacian_from_superop,
    cdc_from_dirichlet_form,
    connectedness,
    energy_form_of_laplacian,
    leibniz_check,
    markov_check,
)
from .errors import DisconnectedError, InputError, PropertyViolationError
from .reporting import CheckResult


def central_projection(algebra: Algebra, keep_blocks) -> Element:
    """The central projection selecting a subset of the blocks."""
    keep = set(int(b) for b in keep_blocks)
    if not keep or any(b < 0 or b >= len(algebra.blocks) for b in keep):
        raise InputError("keep_blocks must be a nonempty set of valid block indices")
    data = [
        np.eye(n) if b in keep else np.zeros((n, n))
        for b, n in enumerate(algebra.blocks)
    ]
    return algebra.element(data)


def _projection_blocks(p: Element, tol=DEFAULT_POS_TOL):
    """Validate that p is a proper central projection and return the kept
    block flags.  Central elements are blockwise scalars."""
    alg = p.algebra
    problems = []
    flags = []
    for b, (m, n) in enumerate(zip(p.data, alg.blocks)):
        lam = np.trace(m) / n
        if np.abs(m - lam * np.eye(n)).max() > tol * (1.0 + abs(lam)):
            problems.append(f"block {b}: not central (not a scalar there)")
            flags.append(False)
            continue
        if abs(lam - 1.0) <= tol:
            flags.append(True)
        elif abs(lam) <= tol:
            flags.append(False)
        else:
            problems.append(f"block {b}: scalar {lam:.6g} is neither 0 nor 1")
            flags.append(False)
    if problems:
        raise InputError("not a central projection", problems)
    if all(flags):
        raise InputError("projection must be proper (p != 1)")
    if not any(flags):
        raise InputError("projection must be nonzero")
    return flags


@dataclass(frozen=True)
class QuotientData:
    """The block decomposition of a Laplace operator along a central
    projection p, with B = pA kept and C = (1-p)A eliminated."""

    projection: Element
    ambient: Laplacian
    keep: tuple
    algebra_b: Algebra
    algebra_c: Algebra
    idx_b: np.ndarray
    idx_c: np.ndarray
    r_block: np.ndarray
    j_block: np.ndarray
    s_block: np.ndarray

    @cached_property
    def quotient_laplacian(self) -> Laplacian:
        """The Schur complement R - J* S^(-1) J as a Laplace operator on B."""
        if np.abs(self.j_block).max(initial=0.0) == 0.0:
            schur = self.r_block.copy()
        else:
            s_inv_j = np.linalg.solve(self.s_block, self.j_block)
            schur = self.r_block - self.j_block.conj().T @ s_inv_j
        schur = (schur + schur.conj().T) / 2
        return _laplacian_from_superop(SuperOperator(self.algebra_b, schur))

    def restrict(self, a: Element) -> Element:
        """pa, viewed in the quotient algebra."""
        self.ambient.algebra._own(a)
        data = [m for m, k in zip(a.data, self.keep) if k]
        return self.algebra_b.element(data)

    def assemble(self, b: Element, c: Element) -> Element:
        """The ambient element b (+) c."""
        self.algebra_b._own(b)
        self.algebra_c._own(c)
        data = []
        ib = ic = 0
        for k in self.keep:
            if k:
                data.append(b.data[ib])
                ib += 1
            else:
                data.append(c.data[ic])
                ic += 1
        return self.ambient.algebra.element(data)


def split(lap: Laplacian, p: Element, rank_tol=DEFAULT_RANK_TOL,
          tol=DEFAULT_POS_TOL) -> QuotientData:
    """Decompose the Laplacian matrix along L2(B) (+) L2(C)."""
    alg = lap.algebra
    alg._own(p)
    if (p * p).distance(p) > tol * (1.0 + p.norm()) or not p.is_self_adjoint(tol):
        raise InputError("p must be a self-adjoint idempotent")
    keep = _projection_blocks(p, tol)
    idx_b, idx_c = [], []
    for i in range(alg.dim):
        block, _, _ = alg.basis_triple(i)
        (idx_b if keep[block] else idx_c).append(i)
    idx_b = np.asarray(idx_b)
    idx_c = np.asarray(idx_c)
    m = lap.matrix
    r_block = m[np.ix_(idx_b, idx_b)]
    j_block = m[np.ix_(idx_c, idx_b)]
    s_block = m[np.ix_(idx_c, idx_c)]
    s_eigs = np.linalg.eigvalsh((s_block + s_block.conj().T) / 2)
    coupled = np.abs(j_block).max(initial=0.0) > tol * max(1.0, float(np.abs(m).max()))
    if coupled and s_eigs[0] <= rank_tol * max(1.0, float(np.abs(m).max())):
        # a decoupled (J = 0) summand passes through unchanged, but a
        # singular corner with genuine coupling means the ambient operator
        # is not metrically connected across the projection
        raise DisconnectedError(
            "the eliminated corner is singular; the ambient operator is not "
            "metrically connected across the projection"
        )
    algebra_b = Algebra(
        tuple(n for n, k in zip(alg.blocks, keep) if k),
        tuple(w for w, k in zip(alg.trace_weights, keep) if k),
    )
    algebra_c = Algebra(
        tuple(n for n, k in zip(alg.blocks, keep) if not k),
        tuple(w for w, k in zip(alg.trace_weights, keep) if not k),
    )
    return QuotientData(
        projection=p,
        ambient=lap,
        keep=tuple(keep),
        algebra_b=algebra_b,
        algebra_c=algebra_c,
        idx_b=idx_b,
        idx_c=idx_c,
        r_block=r_block,
        j_block=j_block,
        s_block=s_block,
    )


def schur_quotient(qd: QuotientData) -> Laplacian:
    return qd.quotient_laplacian


def fiber_minimizer(qd: QuotientData, b: Element) -> Element:
    """The lift b (+) (-S^(-1) J b), the unique energy minimizer over the
    fiber above b."""
    qd.algebra_b._own(b)
    b_coords = qd.algebra_b.to_coords(b)
    c_coords = -np.linalg.solve(qd.s_block, qd.j_block @ b_coords)
    return qd.assemble(b, qd.algebra_c.from_coords(c_coords))


def quotient_checks(qd: QuotientData, seed=0, count=20, tol=DEFAULT_EQ_TOL) -> list:
    """Verify the quotient form: seminorm equals the fiber infimum, the
    quotient is again a carre-du-champ energy form, and it stays Markov and
    Leibniz.  Ambient preconditions (real, completely positive, completely
    Markov) are reported first."""
    ambient_e = energy_form_of_laplacian(qd.ambient)
    results = []

    pre = []
    real_res = ambient_e.real_residual()
    pre.append(CheckResult("ambient-real", real_res <= tol * (1 + ambient_e.magnitude()),
                           residual=real_res))
    eigs = np.linalg.eigvalsh(qd.ambient.matrix)
    pre.append(CheckResult("ambient-positive", bool(eigs[0] >= -tol * max(1.0, eigs[-1])),
                           residual=float(max(0.0, -eigs[0]))))
    pre.extend(
        CheckResult("ambient-" + r.check, r.passed, r.residual, r.witness)
        for r in markov_check(ambient_e, orders=(1, 2), seed=seed, count=max(5, count // 2), tol=tol)
    )
    results.extend(pre)
    if not all(r.passed for r in pre):
        return results

    quot = qd.quotient_laplacian
    e_b = energy_form_of_laplacian(quot)

    rng = np.random.default_rng(seed)
    worst = 0.0
    witness = None
    for idx in range(count):
        b = random_element(qd.algebra_b, rng)
        lift = fiber_minimizer(qd, b)
        direct = ambient_e.value(lift, lift).real
        via_schur = e_b.value(b, b).real
        gap = abs(direct - via_schur)
        # any other lift strictly exceeds the minimum by the eliminated-corner energy
        eps = random_element(qd.algebra_c, rng, scale=0.5)
        perturbed = qd.assemble(qd.restrict(lift), eps + _c_part(qd, lift))
        extra = ambient_e.value(perturbed, perturbed).real - direct
        eps_coords = qd.algebra_c.to_coords(eps)
        expected_extra = float((eps_coords.conj() @ qd.s_block @ eps_coords).real)
        gap = max(gap, abs(extra - expected_extra))
        if gap > worst:
            worst = gap
            if gap > tol * (1.0 + abs(direct)):
                witness = {"sample": idx, "direct": direct, "schur": via_schur}
    results.append(
        CheckResult("fiber-infimum", witness is None, residual=worst, witness=witness)
    )

    try:
        cdc_from_dirichlet_form(e_b, checks=True, seed=seed, tol=tol)
        results.append(CheckResult("quotient-is-cdc", True))
    except PropertyViolationError as exc:
        results.append(
            CheckResult("quotient-is-cdc", False,
                        witness={"failures": [c.check for c in exc.checks]})
        )

    results.append(
        CheckResult("quotient-connected", connectedness(quot))
    )
    results.extend(
        CheckResult("quotient-" + r.check, r.passed, r.residual, r.witness)
        for r in markov_check(e_b, orders=(1, 2), seed=seed, count=count, tol=tol)
    )
    results.extend(
        CheckResult("quotient-" + r.check, r.passed, r.residual, r.witness)
        for r in leibniz_check(e_b, orders=(1,), seed=seed, count=count, tol=tol)
    )
    return results


def _c_part(qd: QuotientData, a: Element) -> Element:
    data = [m for m, k in zip(a.data, qd.keep) if not k]
    return qd.algebra_c.element(data)
