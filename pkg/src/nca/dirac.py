"""The concrete one-form space of a carre-du-champ, its derivation and left
action, the Hodge-Dirac operator, the commutator seminorm with its max
formula, and the star-graph characterization of when that seminorm is an
energy seminorm."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .algebra import (
    DEFAULT_EQ_TOL,
    DEFAULT_POS_TOL,
    DEFAULT_RANK_TOL,
    Element,
    left_multiplication,
)
from .cdc import CdCForm, is_cdc, network_cdc
from .errors import DisconnectedError, PropertyViolationError
from .reporting import CheckResult
from .resistance import ResistanceNetwork, is_star


@dataclass(frozen=True)
class BimoduleSpace:
    """An orthonormal model of the one-form space of a carre-du-champ.

    Built on the kernel of the multiplication map inside the algebraic tensor
    square: the form <a (x) b, c (x) d> = b* Gamma(a, c) d induces a Gram
    matrix there, whose null space is divided out.  ``dmatrix`` maps
    orthonormal algebra coordinates to orthonormal one-form coordinates;
    ``left_action`` holds one matrix per canonical basis element.
    """

    gamma: CdCForm
    kernel_basis: np.ndarray
    gram: np.ndarray
    rank: int
    scale_roots: np.ndarray
    frame: np.ndarray
    dmatrix: np.ndarray
    left_action: tuple
    residuals: dict = field(default_factory=dict)

    @property
    def algebra(self):
        return self.gamma.algebra

    def derivative_coords(self, a: Element) -> np.ndarray:
        return self.dmatrix @ self.algebra.to_coords(a)

    def act_left(self, a: Element) -> np.ndarray:
        coords = self.algebra.canonical_coords(a)
        out = np.zeros((self.rank, self.rank), dtype=complex)
        for x, mat in zip(coords, self.left_action):
            if x != 0:
                out += x * mat
        return out


def build_bimodule(gamma: CdCForm, pos_tol=DEFAULT_POS_TOL,
                   rank_tol=DEFAULT_RANK_TOL) -> BimoduleSpace:
    """Realize the one-form space of a carre-du-champ concretely."""
    report = is_cdc(gamma, tol=pos_tol)
    if not report.is_cdc:
        raise PropertyViolationError(
            "one-form construction requires a carre-du-champ",
            [CheckResult("is-cdc", False, witness=report.witness)],
        )
    alg = gamma.algebra
    d, n = alg.dim, alg.total_size
    mul, adj = alg.mul_table, alg.adj_table
    emb = alg.embedded_basis
    w = alg.coord_weights

    # kernel of the multiplication map a (x) b -> ab over the product basis
    mmap = np.zeros((d, d * d))
    for i in range(d):
        for j in range(d):
            k = mul[i, j]
            if k >= 0:
                mmap[k, i * d + j] = 1.0
    _, svals, vh = np.linalg.svd(mmap, full_matrices=True)
    rank_m = int(np.sum(svals > rank_tol * max(1.0, svals.max())))
    kernel = vh[rank_m:].conj().T  # (d^2, d^2 - d) orthonormal columns

    # Gram of the induced inner product on the product basis, restricted
    t = np.einsum("x,jyx,ikyz,lzx->ijkl", w, emb.conj(), gamma.gram, emb, optimize=True)
    t_mat = t.reshape(d * d, d * d)
    gram = kernel.conj().T @ t_mat @ kernel
    gram = (gram + gram.conj().T) / 2
    eigvals, eigvecs = np.linalg.eigh(gram)
    top = max(1.0, float(eigvals[-1])) if eigvals.size else 1.0
    psd_res = float(max(0.0, -eigvals[0])) if eigvals.size else 0.0
    keep = eigvals > rank_tol * top
    rank = int(keep.sum())
    lam = eigvals[keep]
    frame = eigvecs[:, keep]
    null_vecs = eigvecs[:, ~keep]
    roots = np.sqrt(lam)

    def project(vec_kernel_coords):
        return roots * (frame.conj().T @ vec_kernel_coords)

    # derivation columns: e~_i (x) 1 - 1 (x) e~_i, for the orthonormal basis
    diag_units = [
        alg.basis_index(b, r, r)
        for b, nb in enumerate(alg.blocks)
        for r in range(nb)
    ]
    dmatrix = np.zeros((rank, d), dtype=complex)
    inv_root_w = 1.0 / np.sqrt(alg.basis_weights)
    for i in range(d):
        vec = np.zeros(d * d)
        for u in diag_units:
            vec[i * d + u] += inv_root_w[i]
            vec[u * d + i] -= inv_root_w[i]
        dmatrix[:, i] = project(kernel.conj().T @ vec)

    # left action per canonical basis element, descended to the quotient
    actions = []
    null_res = 0.0
    star_res = 0.0
    lifted = frame / roots[None, :]
    for i in range(d):
        lprod = np.zeros((d * d, d * d))
        cols = np.arange(d)
        for a_idx in range(d):
            c = mul[i, a_idx]
            if c >= 0:
                lprod[c * d + cols, a_idx * d + cols] = 1.0
        lker = kernel.conj().T @ lprod @ kernel
        if null_vecs.size:
            leak = roots[:, None] * (frame.conj().T @ (lker @ null_vecs))
            null_res = max(null_res, float(np.abs(leak).max(initial=0.0)))
        actions.append((roots[:, None] * (frame.conj().T @ lker)) @ lifted)
    for i in range(d):
        star_res = max(
            star_res,
            float(np.abs(actions[i].conj().T - actions[adj[i]]).max(initial=0.0)),
        )

    # the derivation factors the Laplacian: dmatrix* dmatrix = Delta
    root_w = np.sqrt(alg.basis_weights)
    delta = gamma.tau_values / np.outer(root_w, root_w)
    fact_res = float(np.abs(dmatrix.conj().T @ dmatrix - delta).max())

    return BimoduleSpace(
        gamma=gamma,
        kernel_basis=kernel,
        gram=gram,
        rank=rank,
        scale_roots=roots,
        frame=frame,
        dmatrix=dmatrix,
        left_action=tuple(actions),
        residuals={
            "gram_negative_part": psd_res,
            "null_space_invariance": null_res,
            "star_representation": star_res,
            "laplacian_factorization": fact_res,
        },
    )


@dataclass(frozen=True)
class DiracOperator:
    """The self-adjoint block operator pairing the derivation with its
    adjoint on L2(algebra) (+) L2(one-forms)."""

    bimodule: BimoduleSpace

    @property
    def algebra(self):
        return self.bimodule.algebra

    @cached_property
    def matrix(self) -> np.ndarray:
        d = self.algebra.dim
        r = self.bimodule.rank
        out = np.zeros((d + r, d + r), dtype=complex)
        out[d:, :d] = self.bimodule.dmatrix
        out[:d, d:] = self.bimodule.dmatrix.conj().T
        return out

    def represent(self, a: Element) -> np.ndarray:
        """pi(a) = left multiplication (+) left action on one-forms."""
        d = self.algebra.dim
        r = self.bimodule.rank
        out = np.zeros((d + r, d + r), dtype=complex)
        out[:d, :d] = left_multiplication(self.algebra, a).matrix
        out[d:, d:] = self.bimodule.act_left(a)
        return out

    def commutator_norm(self, a: Element) -> float:
        pi = self.represent(a)
        comm = self.matrix @ pi - pi @ self.matrix
        return float(np.linalg.norm(comm, 2))


def dirac(bs: BimoduleSpace) -> DiracOperator:
    return DiracOperator(bs)


@dataclass(frozen=True)
class DiracSeminorm:
    value: float
    from_form: float
    residual: float


def dirac_seminorm(op: DiracOperator, a: Element) -> DiracSeminorm:
    """|[D, pi(a)]| computed two ways: as the largest singular value of the
    commutator, and as max(|Gamma(a, a)|, |Gamma(a*, a*)|)^(1/2) straight from
    the form.  The discrepancy is reported alongside the value."""
    value = op.commutator_norm(a)
    gamma = op.bimodule.gamma
    g_a = gamma.value(a, a).norm()
    g_astar = gamma.value(a.adjoint(), a.adjoint()).norm()
    from_form = float(np.sqrt(max(g_a, g_astar, 0.0)))
    return DiracSeminorm(value=value, from_form=from_form,
                         residual=abs(value - from_form))


def star_graph_check(net: ResistanceNetwork, scale=0.5, seed=0, tol=DEFAULT_EQ_TOL,
                     random_pairs=8) -> dict:
    """The commutator seminorm of the network Dirac operator satisfies the
    parallelogram law exactly when the network is a star; flags from the
    seminorm side and from sparsity inspection are both reported."""
    if not net.is_connected():
        raise DisconnectedError("star characterization requires a connected network")
    gamma = network_cdc(net.algebra, net.c, scale=scale)
    op = dirac(build_bimodule(gamma))

    def l2(f: Element) -> float:
        return dirac_seminorm(op, f).value ** 2

    worst = 0.0
    witness = None
    pairs = []
    for p in range(net.size):
        for q in range(p + 1, net.size):
            f = net.function(np.eye(net.size)[p])
            g = net.function(np.eye(net.size)[q])
            pairs.append((f"delta-{p}-{q}", f, g))
    rng = np.random.default_rng(seed)
    for k in range(random_pairs):
        f = net.function(rng.standard_normal(net.size))
        g = net.function(rng.standard_normal(net.size))
        pairs.append((f"random-{k}", f, g))
    for name, f, g in pairs:
        terms = [l2(f + g), l2(f - g), l2(f), l2(g)]
        gap = abs(terms[0] + terms[1] - 2 * terms[2] - 2 * terms[3])
        rel_gap = gap / max(1.0, *terms)
        if rel_gap > worst:
            worst = rel_gap
            witness = name
    holds = worst <= max(tol, 1e-8)
    return {
        "is_star": is_star(net),
        "parallelogram_holds": holds,
        "max_relative_residual": worst,
        "witness": None if holds else witness,
    }
