"""Resistance networks: the commutative specialization with conductance
matrices, harmonic potentials, resistance distance, the maximum principle,
and the square relation between resistance and the energy metric."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .algebra import (
    DEFAULT_EQ_TOL,
    DEFAULT_POS_TOL,
    Algebra,
    Element,
    PiecewiseLinear,
    SuperOperator,
)
from .cdc import network_cdc
from .energy import EnergyForm, Laplacian, _laplacian_from_superop, energy_form
from .errors import DisconnectedError, InputError
from .states import StateEmbedding, energy_metric, mixture, point_state


@dataclass(frozen=True)
class ResistanceNetwork:
    """A finite set of nodes with symmetric nonnegative conductances (zero
    diagonal).  Asymmetric input is symmetrized with a warning unless
    ``strict`` is set; negative entries require the explicit
    ``allow_negative`` flag (used only for counterexamples)."""

    c: np.ndarray
    strict: bool = False
    allow_negative: bool = False

    def __post_init__(self):
        c = np.array(self.c, dtype=float)
        if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] < 2:
            raise InputError(f"conductance matrix must be square of size >= 2, got {c.shape}")
        if np.abs(np.diag(c)).max() > 0:
            raise InputError("conductance matrix must have zero diagonal")
        if not np.array_equal(c, c.T):
            if self.strict:
                raise InputError("conductance matrix must be symmetric")
            warnings.warn(
                "conductance matrix is asymmetric; replacing c by (c + c^T)/2 "
                "(the energy form only sees the even part)",
                stacklevel=2,
            )
            c = (c + c.T) / 2
        if not self.allow_negative and c.min() < 0:
            raise InputError("negative conductances require the allow_negative flag")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @property
    def size(self) -> int:
        return self.c.shape[0]

    @cached_property
    def algebra(self) -> Algebra:
        """Functions on the nodes with counting measure."""
        return Algebra((1,) * self.size, (1.0,) * self.size)

    @cached_property
    def laplacian_matrix(self) -> np.ndarray:
        return np.diag(self.c.sum(axis=1)) - self.c

    def is_connected(self) -> bool:
        """Graph connectivity over the nonzero conductances."""
        n = self.size
        seen = np.zeros(n, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            x = stack.pop()
            for y in np.nonzero(self.c[x] != 0)[0]:
                if not seen[y]:
                    seen[y] = True
                    stack.append(int(y))
        return bool(seen.all())

    def function(self, values) -> Element:
        values = np.asarray(values, dtype=complex)
        if values.shape != (self.size,):
            raise InputError(f"expected {self.size} node values")
        return self.algebra.element([v.reshape(1, 1) for v in values])

    def values(self, f: Element) -> np.ndarray:
        self.algebra._own(f)
        return np.array([m[0, 0] for m in f.data])


def network_laplacian(net: ResistanceNetwork) -> Laplacian:
    """(L f)(x) = sum_y (f(x) - f(y)) c_xy, as a Laplace operator on the node
    algebra; identical to the Laplacian of the half-scaled network form."""
    return _laplacian_from_superop(SuperOperator(net.algebra, net.laplacian_matrix))


def network_energy_form(net: ResistanceNetwork) -> EnergyForm:
    gamma = network_cdc(net.algebra, net.c, scale=0.5, allow_negative=net.allow_negative)
    return energy_form(gamma, force=net.allow_negative)


def _solve_potential(net: ResistanceNetwork, rhs: np.ndarray) -> np.ndarray:
    if not net.is_connected():
        raise DisconnectedError("network is not connected")
    sol, *_ = np.linalg.lstsq(net.laplacian_matrix, rhs, rcond=None)
    return sol - sol.mean()  # the trace-zero representative


def potential(net: ResistanceNetwork, p: int, q: int) -> Element:
    """The trace-zero solution of L h = delta_p - delta_q; harmonic away from
    p and q, maximal at p, minimal at q."""
    if p == q:
        raise InputError("potential requires two distinct nodes")
    if not (0 <= p < net.size and 0 <= q < net.size):
        raise InputError("node index out of range")
    rhs = np.zeros(net.size)
    rhs[p], rhs[q] = 1.0, -1.0
    return net.function(_solve_potential(net, rhs))


def resistance_distance(net: ResistanceNetwork, p: int, q: int) -> float:
    if p == q:
        return 0.0
    h = net.values(potential(net, p, q)).real
    return float(h[p] - h[q])


def all_pairs_resistance(net: ResistanceNetwork) -> np.ndarray:
    out = np.zeros((net.size, net.size))
    for p, q in combinations(range(net.size), 2):
        out[p, q] = out[q, p] = resistance_distance(net, p, q)
    return out


@dataclass
class NetworkMetricReport:
    triangle: bool
    square_relation: bool
    acute_angles_pure: bool
    mixture_counterexample: Optional[dict]
    residuals: dict = field(default_factory=dict)


def _mixture_grid(step: float):
    """All probability vectors over three points with entries on a grid."""
    ticks = int(round(1.0 / step))
    out = []
    for i in range(ticks + 1):
        for j in range(ticks + 1 - i):
            out.append((i / ticks, j / ticks, (ticks - i - j) / ticks))
    return out


def metric_checks(net: ResistanceNetwork, seed=0, step=0.1, tol=1e-10,
                  mixture_margin=1e-6) -> NetworkMetricReport:
    """Triangle inequality for the resistance distance, the square relation
    against the energy metric, acute angles between pure states, and a seeded
    grid search for mixed states breaking the triangle inequality of the
    squared energy metric."""
    n = net.size
    lap = network_laplacian(net)
    rho_r = all_pairs_resistance(net)

    tri_worst = 0.0
    for p in range(n):
        for q in range(n):
            for r in range(n):
                tri_worst = max(tri_worst, rho_r[p, q] - rho_r[p, r] - rho_r[r, q])
    scale = 1.0 + rho_r.max()
    triangle = tri_worst <= tol * scale

    points = [point_state(net.algebra, x) for x in range(n)]
    sq_worst = 0.0
    for p, q in combinations(range(n), 2):
        de = energy_metric(lap, points[p], points[q])
        sq_worst = max(sq_worst, abs(de * de - rho_r[p, q]))
    square = sq_worst <= tol * scale

    emb = StateEmbedding(lap, points[0])
    coords = [emb.coords(s) for s in points]
    angle_worst = 0.0
    for x in range(n):
        for y in range(n):
            for z in range(n):
                if len({x, y, z}) == 3:
                    ip = np.vdot(coords[x] - coords[y], coords[z] - coords[y]).real
                    angle_worst = max(angle_worst, -ip)
    acute = angle_worst <= tol * scale

    # seeded grid of mixtures over node triples, searching for a triple of
    # states violating the triangle inequality of the squared energy metric
    rng = np.random.default_rng(seed)
    triples = list(combinations(range(n), 3))
    if len(triples) > 4:
        chosen = rng.choice(len(triples), size=4, replace=False)
        triples = [triples[int(k)] for k in chosen]
    counterexample = None
    for nodes in triples:
        grid = [
            mixture([points[nodes[0]], points[nodes[1]], points[nodes[2]]], wts)
            for wts in _mixture_grid(step)
        ]
        m = len(grid)
        dist2 = np.zeros((m, m))
        for i in range(m):
            for j in range(i + 1, m):
                dij = energy_metric(lap, grid[i], grid[j])
                dist2[i, j] = dist2[j, i] = dij * dij
        viol = dist2[:, None, :] - dist2[:, :, None] - dist2[None, :, :]
        # viol[i, j, k] = d2(i, k) - d2(i, j) - d2(j, k)
        best = float(viol.max())
        if best > mixture_margin:
            i, j, k = np.unravel_index(viol.argmax(), viol.shape)
            weights = _mixture_grid(step)
            counterexample = {
                "nodes": [int(v) for v in nodes],
                "weights": [list(weights[int(i)]), list(weights[int(j)]), list(weights[int(k)])],
                "violation": best,
            }
            break

    return NetworkMetricReport(
        triangle=triangle,
        square_relation=square,
        acute_angles_pure=acute,
        mixture_counterexample=counterexample,
        residuals={
            "triangle": tri_worst,
            "square_relation": sq_worst,
            "acute_angles": angle_worst,
        },
    )


def _closure(net: ResistanceNetwork, nodes) -> set:
    out = set(nodes)
    for y in nodes:
        out.update(int(z) for z in np.nonzero(net.c[y] > 0)[0])
    return out


def _components(net: ResistanceNetwork, nodes) -> list:
    nodes = list(nodes)
    remaining = set(nodes)
    comps = []
    while remaining:
        start = remaining.pop()
        comp = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in np.nonzero(net.c[x] != 0)[0]:
                y = int(y)
                if y in remaining:
                    remaining.discard(y)
                    comp.add(y)
                    stack.append(y)
        comps.append(sorted(comp))
    return comps


def maximum_principle_check(net: ResistanceNetwork, f: Element, region: Sequence[int],
                            tol=DEFAULT_EQ_TOL) -> dict:
    """For f real and harmonic on the region: if the maximum over the closed
    region is attained inside a connected piece, f is constant there.
    Reports precondition failures instead of crashing."""
    vals = net.values(f)
    report = {"passed": True, "precondition_failures": [], "components_checked": 0}
    if np.abs(vals.imag).max(initial=0.0) > tol * (1.0 + np.abs(vals).max()):
        report["precondition_failures"].append("function is not real-valued")
    lap_vals = net.laplacian_matrix @ vals.real
    scale = 1.0 + np.abs(net.laplacian_matrix @ np.abs(vals.real)).max()
    not_harmonic = [int(y) for y in region if abs(lap_vals[y]) > tol * scale]
    if not_harmonic:
        report["precondition_failures"].append(
            f"function is not harmonic at nodes {not_harmonic}"
        )
    report["max_node"] = int(np.argmax(vals.real))
    report["min_node"] = int(np.argmin(vals.real))
    if report["precondition_failures"]:
        report["passed"] = False
        return report
    v = vals.real
    for comp in _components(net, region):
        closure = sorted(_closure(net, comp))
        m = max(v[x] for x in closure)
        attained = [y for y in comp if v[y] >= m - tol * (1.0 + abs(m))]
        if attained:
            spread = max(v[y] for y in comp) - min(v[y] for y in comp)
            if spread > tol * (1.0 + abs(m)):
                report["passed"] = False
                report["witness"] = {"component": comp, "spread": float(spread)}
        report["components_checked"] += 1
    return report


@dataclass
class MarkovViolationWitness:
    """A concrete Markov-property failure for a network with a negative
    conductance: f = delta_x - r delta_y clipped by the positive part."""

    f: Element
    fn: PiecewiseLinear
    r: float
    edge: tuple
    violation: float


def markov_violation_witness(net: ResistanceNetwork, tol=DEFAULT_POS_TOL):
    """Requires the energy form to be nonnegative.  Returns None when all
    conductances are nonnegative; otherwise builds the explicit witness whose
    clipped energy exceeds the original."""
    lap_mat = net.laplacian_matrix
    eigs = np.linalg.eigvalsh((lap_mat + lap_mat.T) / 2)
    if eigs[0] < -tol * max(1.0, eigs[-1]):
        raise InputError("the energy form itself is not nonnegative")
    if net.c.min() >= 0:
        return None
    x, y = np.unravel_index(np.argmin(net.c), net.c.shape)
    cxy = float(net.c[x, y])
    cy = float(net.c[y].sum())
    # E(f, f) = E(dx, dx) + 2 r c_xy + r^2 E(dy, dy); minimize over r > 0
    r = -cxy / cy if cy > 0 else 1.0
    violation = -(2 * r * cxy + r * r * cy)
    vals = np.zeros(net.size)
    vals[x], vals[y] = 1.0, -r
    return MarkovViolationWitness(
        f=net.function(vals),
        fn=PiecewiseLinear.relu(),
        r=float(r),
        edge=(int(x), int(y)),
        violation=float(violation),
    )


# -- seeded generators for test batteries ------------------------------------


def random_network(size: int, rng: np.random.Generator, density=0.7,
                   ensure_connected=True) -> ResistanceNetwork:
    """A seeded symmetric nonnegative conductance matrix; resamples until
    connected when requested."""
    while True:
        c = rng.uniform(0.2, 2.0, size=(size, size))
        c *= rng.random(size=(size, size)) < density
        c = np.triu(c, 1)
        c = c + c.T
        net = ResistanceNetwork(c)
        if not ensure_connected or net.is_connected():
            return net


def random_star_network(size: int, rng: np.random.Generator) -> ResistanceNetwork:
    center = int(rng.integers(size))
    c = np.zeros((size, size))
    for x in range(size):
        if x != center:
            c[center, x] = c[x, center] = rng.uniform(0.2, 2.0)
    return ResistanceNetwork(c)


def is_star(net: ResistanceNetwork) -> bool:
    """True when some hub carries every edge."""
    for t in range(net.size):
        others = [x for x in range(net.size) if x != t]
        if all(
            net.c[x, y] == 0
            for i, x in enumerate(others)
            for y in others[i + 1 :]
        ):
            return True
    return False
