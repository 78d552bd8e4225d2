"""Energy (Dirichlet) forms, Laplace operators, heat semigroups, resolvents,
Markov/Leibniz verification, trace symmetries, and the reconstruction of a
carre-du-champ from a real completely Markov form.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .algebra import (
    DEFAULT_EQ_TOL,
    DEFAULT_POS_TOL,
    DEFAULT_RANK_TOL,
    Algebra,
    Element,
    PiecewiseLinear,
    SuperOperator,
    amplify_superop,
    functional_calculus,
    random_positive,
    random_self_adjoint,
    to_cells,
)
from .cdc import CdCForm, gamma_from_generator, is_cdc
from .errors import InputError, PropertyViolationError
from .reporting import CheckResult

__all__ = [
    "EnergyForm",
    "Laplacian",
    "energy_form",
    "laplacian",
    "gamma_delta",
    "energy_seminorm",
    "markov_check",
    "leibniz_check",
    "reality_checks",
    "heat_map",
    "resolvent_check",
    "cdc_from_dirichlet_form",
    "connectedness",
    "default_battery",
]


@dataclass(frozen=True)
class EnergyForm:
    """The scalar form E(a, b) = tau(Gamma(a, b)), stored over the canonical
    basis; conjugate-linear in the first slot."""

    algebra: Algebra
    gram: np.ndarray
    provenance: Optional[CdCForm] = None

    def __post_init__(self):
        d = self.algebra.dim
        g = np.array(self.gram, dtype=complex)
        if g.shape != (d, d):
            raise InputError(f"energy gram must be {d}x{d}, got {g.shape}")
        g.setflags(write=False)
        object.__setattr__(self, "gram", g)

    @cached_property
    def gram_orthonormal(self) -> np.ndarray:
        """The same form over the orthonormal basis; this is exactly the
        matrix of the Laplace operator."""
        root = np.sqrt(self.algebra.basis_weights)
        return self.gram / np.outer(root, root)

    def value(self, a: Element, b: Element) -> complex:
        x = self.algebra.canonical_coords(a)
        y = self.algebra.canonical_coords(b)
        return complex(x.conj() @ self.gram @ y)

    def seminorm(self, a: Element) -> float:
        return float(np.sqrt(max(self.value(a, a).real, 0.0)))

    def real_residual(self) -> float:
        """Zero iff E(a*, b*) = E(b, a), i.e. the form is real."""
        adj = self.algebra.adj_table
        return float(np.abs(self.gram[np.ix_(adj, adj)] - self.gram.T).max())

    def is_real(self, tol=DEFAULT_EQ_TOL) -> bool:
        return self.real_residual() <= tol * (1.0 + float(np.abs(self.gram).max()))

    def magnitude(self) -> float:
        return float(np.abs(self.gram).max())


def energy_form(gamma: CdCForm, force=False, tol=DEFAULT_POS_TOL) -> EnergyForm:
    """E(a, b) = tau(Gamma(a, b)).  Refuses non-carre-du-champ input unless
    ``force`` is set (used only for deliberate counterexamples)."""
    if not force:
        report = is_cdc(gamma, tol=tol)
        if not report.is_cdc:
            raise PropertyViolationError(
                "form fails the carre-du-champ axioms; pass force=True to override",
                [CheckResult("is-cdc", False, witness=report.witness)],
            )
    return EnergyForm(gamma.algebra, gamma.tau_values, provenance=gamma)


@dataclass(frozen=True)
class Laplacian:
    """The positive operator with <a, L b> = E(a, b); Hermitian in the
    orthonormal basis by construction."""

    superop: SuperOperator
    kernel_dim: int
    rank_tol: float = DEFAULT_RANK_TOL

    @property
    def algebra(self) -> Algebra:
        return self.superop.algebra

    @property
    def matrix(self) -> np.ndarray:
        return self.superop.matrix

    @cached_property
    def eigensystem(self):
        m = self.matrix
        return np.linalg.eigh((m + m.conj().T) / 2)

    def apply(self, a: Element) -> Element:
        return self.superop.apply(a)

    def sharp(self) -> SuperOperator:
        return self.superop.sharp()

    def natural(self) -> "Laplacian":
        """(L + L#)/2: preserves the involution, generates the heat
        semigroup, and has the same carre-du-champ."""
        avg = 0.5 * (self.superop + self.sharp())
        return _laplacian_from_superop(avg, self.rank_tol)


def _laplacian_from_superop(superop: SuperOperator, rank_tol=DEFAULT_RANK_TOL) -> Laplacian:
    m = superop.matrix
    herm_gap = float(np.abs(m - m.conj().T).max())
    if herm_gap > 1e-8 * (1.0 + float(np.abs(m).max())):
        raise InputError(f"Laplacian matrix must be Hermitian (residual {herm_gap:.3e})")
    w = np.linalg.eigvalsh((m + m.conj().T) / 2)
    cut = rank_tol * max(1.0, float(w[-1]))
    kernel_dim = int(np.sum(w <= cut))
    return Laplacian(superop, kernel_dim, rank_tol)


def laplacian(e: EnergyForm, rank_tol=DEFAULT_RANK_TOL) -> Laplacian:
    m = e.gram_orthonormal
    return _laplacian_from_superop(
        SuperOperator(e.algebra, (m + m.conj().T) / 2), rank_tol
    )


def energy_form_of_laplacian(lap: Laplacian) -> EnergyForm:
    """The form E(a, b) = <a, L b>, expressed over the canonical basis."""
    root = np.sqrt(lap.algebra.basis_weights)
    return EnergyForm(lap.algebra, lap.matrix * np.outer(root, root))


def gamma_delta(lap: Laplacian, tol=DEFAULT_EQ_TOL) -> CdCForm:
    """The carre-du-champ of a Laplace operator, with the conventional factor
    of one half."""
    return gamma_from_generator(lap.superop, scale=0.5, tol=tol)


def connectedness(lap: Laplacian, tol=None) -> bool:
    """True iff the near-null eigenspace is exactly the scalars."""
    if lap.kernel_dim != 1:
        return False
    one = lap.algebra.identity_coords
    res = np.linalg.norm(lap.matrix @ one)
    bound = max(lap.rank_tol, 1e-9) * max(1.0, float(np.abs(lap.matrix).max()))
    return bool(res <= bound * np.linalg.norm(one))


# -- seminorms at matrix amplification ---------------------------------------


def energy_seminorm(e: EnergyForm, a: Element, order: int = 1) -> float:
    """L over order x order matrices: the square root of the sum of E over
    the matrix entries."""
    if order < 1:
        raise InputError("amplification order must be >= 1")
    if order == 1:
        e.algebra._own(a)
        return e.seminorm(a)
    amp = e.algebra.amplify(order)
    amp._own(a)
    total = 0.0
    for row in to_cells(e.algebra, order, a):
        for cell in row:
            total += e.value(cell, cell).real
    return float(np.sqrt(max(total, 0.0)))


def default_battery(a: Element, rng: Optional[np.random.Generator] = None):
    """Piecewise-linear test functions for the Markov property: the positive
    part and the clamp used in the reconstruction argument, the absolute
    value, and one seeded three-breakpoint function."""
    battery = [
        ("relu", PiecewiseLinear.relu()),
        ("clamp", PiecewiseLinear.clamp_above(a.norm())),
        ("abs", PiecewiseLinear.absolute()),
    ]
    if rng is not None:
        xs = np.sort(rng.uniform(-2.0, 2.0, size=3))
        while np.diff(xs).min() < 1e-3:
            xs = np.sort(rng.uniform(-2.0, 2.0, size=3))
        ys = rng.uniform(-2.0, 2.0, size=3)
        battery.append(("seeded-3pt", PiecewiseLinear(tuple(xs), tuple(ys))))
    return battery


def _extreme_positives(alg: Algebra, rng: np.random.Generator, rank_ones=2):
    """Diagonal matrix units and a few seeded rank-one projections: the
    extreme rays where positivity-type violations concentrate."""
    out = []
    for b, nb in enumerate(alg.blocks):
        for r in range(nb):
            out.append(alg.basis_element(alg.basis_index(b, r, r)))
    for _ in range(rank_ones):
        b = int(rng.integers(len(alg.blocks)))
        nb = alg.blocks[b]
        v = rng.standard_normal(nb) + 1j * rng.standard_normal(nb)
        proj = np.outer(v, v.conj()) / np.vdot(v, v)
        data = [np.zeros((n, n)) for n in alg.blocks]
        data[b] = proj
        out.append(alg.element(data))
    if len(out) > 8:
        keep = rng.choice(len(out), size=8, replace=False)
        out = [out[int(k)] for k in sorted(keep)]
    return out


def _markov_probes(e: EnergyForm, order: int, alg: Algebra,
                   rng: np.random.Generator, ts=(0.05, 0.5, 5.0)):
    """Elements where Markov violations concentrate.

    Resolvent images of extreme positive elements: when the form is not
    completely Markov some of these acquire a negative part, and clipping it
    strictly increases the energy.  Small differences p - r q of extreme
    positives cover the same failure directly (the positive part restores p
    while the energy of the difference can dip below that of p).
    """
    m = e.gram_orthonormal
    m = (m + m.conj().T) / 2
    if order > 1:
        m = amplify_superop(SuperOperator(e.algebra, m), order).matrix
    eye = np.eye(alg.dim)
    extremes = _extreme_positives(alg, rng)
    probes = []
    for t in ts:
        for a in extremes:
            try:
                coords = np.linalg.solve(eye + t * m, alg.to_coords(a))
            except np.linalg.LinAlgError:
                continue
            el = alg.from_coords(coords)
            probes.append(0.5 * (el + el.adjoint()))
    for i, a in enumerate(extremes[:4]):
        for b in extremes[i + 1 : 4]:
            for r in (0.05, 0.25):
                probes.append(a - r * b)
                probes.append(b - r * a)
    return probes


def markov_check(
    e: EnergyForm,
    orders: Sequence[int] = (1, 2),
    seed: int = 0,
    count: int = 20,
    tol: float = DEFAULT_EQ_TOL,
    elements: Optional[Sequence[Element]] = None,
    battery=None,
) -> list:
    """Verify L(F(a)) <= Lip(F)|hull sigma(a) * L(a) for a battery of
    piecewise-linear functions over seeded self-adjoint elements plus
    resolvent probes, at the requested matrix amplifications.  Returns one
    aggregated result per order."""
    results = []
    for order in orders:
        rng = np.random.default_rng(seed + order)
        alg = e.algebra if order == 1 else e.algebra.amplify(order)
        if order == 1 and elements is not None:
            samples = list(elements)
        else:
            samples = [random_self_adjoint(alg, rng) for _ in range(count)]
        samples.extend(_markov_probes(e, order, alg, rng))
        worst = 0.0
        violations = []
        for idx, a in enumerate(samples):
            fns = battery if battery is not None else default_battery(a, rng)
            la = energy_seminorm(e, a, order)
            for name, fn in fns:
                fa, lip = functional_calculus(a, fn)
                lhs = energy_seminorm(e, fa, order)
                violation = lhs - lip * la
                worst = max(worst, violation)
                if violation > tol and len(violations) < 10:
                    violations.append(
                        {
                            "element_index": idx,
                            "function": name,
                            "lhs": lhs,
                            "bound": lip * la,
                        }
                    )
        results.append(
            CheckResult(
                f"markov-n{order}",
                worst <= tol,
                residual=max(worst, 0.0),
                witness={"order": order, "violations": violations} if violations else None,
            )
        )
    return results


def leibniz_check(
    e: EnergyForm,
    orders: Sequence[int] = (1, 2),
    seed: int = 0,
    count: int = 20,
    tol: float = DEFAULT_EQ_TOL,
    pairs: Optional[Sequence] = None,
) -> list:
    """Verify L(ab) <= L(a) |b| + |a| L(b) on seeded pairs."""
    results = []
    for order in orders:
        rng = np.random.default_rng(seed + 17 * order)
        alg = e.algebra if order == 1 else e.algebra.amplify(order)
        if order == 1 and pairs is not None:
            samples = list(pairs)
        else:
            samples = [
                (random_self_adjoint(alg, rng), random_self_adjoint(alg, rng))
                for _ in range(count)
            ]
        worst = 0.0
        witness = None
        for idx, (a, b) in enumerate(samples):
            lhs = energy_seminorm(e, a * b, order)
            bound = (
                energy_seminorm(e, a, order) * b.norm()
                + a.norm() * energy_seminorm(e, b, order)
            )
            violation = lhs - bound
            if violation > worst:
                worst = violation
                if violation > tol:
                    witness = {"order": order, "pair_index": idx, "lhs": lhs, "bound": bound}
        results.append(
            CheckResult(
                f"leibniz-n{order}",
                worst <= tol,
                residual=max(worst, 0.0),
                witness=witness,
            )
        )
    return results


# -- trace symmetries ---------------------------------------------------------


def reality_checks(gamma: CdCForm, tol=DEFAULT_EQ_TOL) -> dict:
    """Trace symmetries of a form: tau-real on basis pairs, tau-balanced on
    basis triples.  Balanced implies real."""
    alg = gamma.algebra
    adj = alg.adj_table
    mul = alg.mul_table
    emb = alg.embedded_basis
    g = gamma.gram
    w = alg.coord_weights
    tg = gamma.tau_values
    scale = 1.0 + float(np.abs(tg).max())

    real_gap = np.abs(tg[np.ix_(adj, adj)] - tg.T)
    real_res = float(real_gap.max())

    # tau(Gamma(e_i e_j, e_k)) = tau(Gamma(e_k*, e_j*) e_i*) + tau(e_j* Gamma(e_i, e_k))
    lhs = np.where((mul >= 0)[:, :, None], tg[mul.clip(min=0)], 0.0)
    tau_ge = np.einsum("x,pqxy,myx->pqm", w, g, emb)  # tau(G[p,q] E[m])
    tau_eg = np.einsum("x,mxy,ikyx->mik", w, emb, g)  # tau(E[m] G[i,k])
    t1 = tau_ge[np.ix_(adj, adj, adj)].transpose(2, 1, 0)  # [i,j,k] = tau(G[k*,j*] E[i*])
    t2 = tau_eg[adj]  # [j, i, k] = tau(E[j*] G[i, k])
    t2 = t2.transpose(1, 0, 2)
    bal_gap = np.abs(lhs - t1 - t2)
    bal_res = float(bal_gap.max())

    out = {
        "tau_real": real_res <= tol * scale,
        "tau_balanced": bal_res <= tol * scale,
        "real_residual": real_res,
        "balanced_residual": bal_res,
    }
    if not out["tau_real"]:
        i, j = np.unravel_index(real_gap.argmax(), real_gap.shape)
        out["real_witness"] = [int(i), int(j)]
    if not out["tau_balanced"]:
        i, j, k = np.unravel_index(bal_gap.argmax(), bal_gap.shape)
        out["balanced_witness"] = [int(i), int(j), int(k)]
    return out


# -- semigroups and resolvents ------------------------------------------------


def heat_map(lap: Laplacian, t: float, tol=DEFAULT_POS_TOL):
    """The semigroup element exp(-t L) by Hermitian eigendecomposition,
    with unitality and complete-positivity flags.

    Complete positivity is decided through the Choi matrix of the map
    composed with the trace conditional expectation of the full matrix
    algebra; the composition is completely positive exactly when the map is.
    """
    if t < 0:
        raise InputError("time must be nonnegative")
    alg = lap.algebra
    w, v = lap.eigensystem
    phi = SuperOperator(alg, (v * np.exp(-t * w)) @ v.conj().T)

    one = alg.identity()
    unital_res = phi.apply(one).distance(one)

    n = alg.total_size
    choi = np.zeros((n * n, n * n), dtype=complex)
    for a in range(n):
        for b in range(n):
            unit = np.zeros((n, n))
            unit[a, b] = 1.0
            out = phi.apply(alg.pinch(unit)).full()
            choi[a * n : (a + 1) * n, b * n : (b + 1) * n] = out
    # a completely positive map is Hermiticity-preserving, so a skew part of
    # the Choi matrix already refutes it; never hide it by symmetrizing
    skew = float(np.abs(choi - choi.conj().T).max())
    eigs = np.linalg.eigvalsh((choi + choi.conj().T) / 2)
    min_eig = float(eigs[0])
    scale = max(1.0, float(np.abs(choi).max()))
    flags = {
        "unital": unital_res <= tol * (1.0 + one.norm()),
        "unital_residual": float(unital_res),
        "cp": skew <= tol * scale and min_eig >= -tol * max(1.0, float(eigs[-1])),
        "choi_min_eigenvalue": min_eig,
        "choi_skew_residual": skew,
    }
    return phi, flags


def resolvent_check(
    lap: Laplacian,
    ts: Sequence[float],
    orders: Sequence[int] = (1, 2),
    seed: int = 0,
    count: int = 5,
    tol: float = DEFAULT_POS_TOL,
) -> list:
    """For R_t = (I + t L)^(-1): positivity on positive elements, contraction
    in the C*-norm on positives, and R_t(1) = 1, at the requested matrix
    amplifications."""
    if any(t < 0 for t in ts):
        raise InputError("resolvent times must be nonnegative")
    results = []
    for order in orders:
        if order == 1:
            alg, mat = lap.algebra, lap.matrix
        else:
            amp_op = amplify_superop(lap.superop, order)
            alg, mat = amp_op.algebra, amp_op.matrix
        rng = np.random.default_rng(seed + 101 * order)
        samples = [random_positive(alg, rng) for _ in range(count)]
        one = alg.identity()
        worst = 0.0
        witness = None
        eye = np.eye(alg.dim)
        for t in ts:
            try:
                r = SuperOperator(alg, np.linalg.solve(eye + t * mat, eye))
            except np.linalg.LinAlgError as exc:
                # impossible for a positive generator; surface as internal
                raise RuntimeError(
                    f"internal error: resolvent singular at t={t}"
                ) from exc
            res_one = r.apply(one).distance(one)
            if res_one > worst:
                worst = res_one
                if res_one > tol:
                    witness = {"order": order, "t": float(t), "kind": "unit"}
            for idx, a in enumerate(samples):
                ra = r.apply(a)
                herm = 0.5 * (ra + ra.adjoint())
                neg = max(0.0, -float(herm.eigenvalues().real.min()))
                neg = max(neg, (ra - herm).norm())
                growth = ra.norm() - a.norm()
                bad = max(neg, growth)
                if bad > worst:
                    worst = bad
                    if bad > tol * (1.0 + a.norm()):
                        witness = {
                            "order": order,
                            "t": float(t),
                            "kind": "positivity" if neg >= growth else "contraction",
                            "element_index": idx,
                        }
        results.append(
            CheckResult(
                f"resolvent-n{order}",
                witness is None,
                residual=max(worst, 0.0),
                witness=witness,
            )
        )
    return results


# -- reconstruction -----------------------------------------------------------


def cdc_from_dirichlet_form(
    e: EnergyForm,
    checks: bool = True,
    seed: int = 0,
    tol: float = DEFAULT_EQ_TOL,
) -> CdCForm:
    """Rebuild a carre-du-champ from a real, completely positive, completely
    Markov form: apply the half-scaled generator construction to its Laplace
    operator, then confirm the trace pairing reproduces the form."""
    scale = 1.0 + e.magnitude()
    if checks:
        failures = []
        real_res = e.real_residual()
        if real_res > tol * scale:
            failures.append(
                CheckResult("reality", False, residual=real_res)
            )
        m = e.gram_orthonormal
        herm_res = float(np.abs(m - m.conj().T).max())
        if herm_res > tol * scale:
            failures.append(CheckResult("hermitian", False, residual=herm_res))
        else:
            eigs = np.linalg.eigvalsh((m + m.conj().T) / 2)
            if eigs[0] < -tol * max(1.0, float(eigs[-1])):
                failures.append(
                    CheckResult(
                        "complete-positivity",
                        False,
                        residual=float(-eigs[0]),
                        witness={"min_eigenvalue": float(eigs[0])},
                    )
                )
        if not failures:
            failures = [r for r in markov_check(e, orders=(1, 2), seed=seed, tol=tol) if not r.passed]
        if failures:
            raise PropertyViolationError(
                "form is not a real completely Markov Dirichlet form", failures
            )
    lap = laplacian(e)
    gamma = gamma_delta(lap)
    pair_res = float(np.abs(gamma.tau_values - e.gram).max())
    if pair_res > max(tol, 1e-9) * scale:
        raise PropertyViolationError(
            "reconstructed form does not reproduce the energy form",
            [CheckResult("trace-pairing", False, residual=pair_res)],
        )
    report = is_cdc(gamma)
    if not report.is_cdc:
        raise PropertyViolationError(
            "reconstructed form fails the carre-du-champ axioms",
            [CheckResult("is-cdc", False, witness=report.witness)],
        )
    return gamma
