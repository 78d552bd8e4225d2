"""States, the energy metric on the state space, its dual cross-check, and
the affine Hilbert-space embedding."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .algebra import DEFAULT_EQ_TOL, Algebra, Element, is_positive
from .energy import EnergyForm, Laplacian, connectedness
from .errors import DisconnectedError, InputError


@dataclass(frozen=True)
class State:
    """A state given by its density: mu(a) = tau(rho a) with rho >= 0 and
    tau(rho) = 1."""

    density: Element

    def __post_init__(self):
        rho = self.density
        problems = []
        if not is_positive(rho, tol=1e-10):
            problems.append("density must be positive")
        total = rho.trace()
        if abs(total - 1.0) > 1e-10 * (1.0 + abs(total)):
            problems.append(f"density must have unit trace, got {total:.12g}")
        if problems:
            raise InputError("invalid state", problems)

    @property
    def algebra(self) -> Algebra:
        return self.density.algebra

    def expect(self, a: Element) -> complex:
        return (self.density * a).trace()


def point_state(algebra: Algebra, x: int) -> State:
    """The evaluation at a point of a commutative algebra (the delta density
    rescaled so its trace is one)."""
    if not algebra.is_commutative:
        raise InputError("point states require a commutative algebra")
    if not 0 <= x < algebra.dim:
        raise InputError(f"point {x} out of range")
    data = [np.zeros((1, 1)) for _ in algebra.blocks]
    data[x][0, 0] = 1.0 / algebra.trace_weights[x]
    return State(algebra.element(data))


def mixture(states, weights) -> State:
    if len(states) != len(weights) or not states:
        raise InputError("mixture needs matching nonempty state and weight lists")
    if any(w < 0 for w in weights) or abs(sum(weights) - 1.0) > 1e-12:
        raise InputError("mixture weights must be a probability vector")
    acc = float(weights[0]) * states[0].density
    for s, w in zip(states[1:], weights[1:]):
        acc = acc + float(w) * s.density
    return State(acc)


def _difference_coords(mu: State, nu: State) -> np.ndarray:
    alg = mu.algebra
    alg._own(nu.density)
    return alg.to_coords(mu.density - nu.density)


def _split_against_kernel(lap: Laplacian, g: np.ndarray, tol=DEFAULT_EQ_TOL):
    """Return the component of g inside the range of the Laplacian, raising
    when mass sits in the kernel beyond the scalars (infinite distance)."""
    w, v = lap.eigensystem
    cut = lap.rank_tol * max(1.0, float(w[-1]))
    comps = v.conj().T @ g
    stuck = np.linalg.norm(comps[w <= cut])
    if stuck > tol * max(1.0, np.linalg.norm(g)):
        raise DisconnectedError(
            "state difference is not in the range of the Laplacian; the "
            "distance is infinite"
        )
    return w, v, comps


def energy_metric(lap: Laplacian, mu: State, nu: State, tol=DEFAULT_EQ_TOL) -> float:
    """sqrt(<mu - nu, pinv(L)(mu - nu)>) with the state difference realized
    as the density difference in the L2 space."""
    g = _difference_coords(mu, nu)
    w, _, comps = _split_against_kernel(lap, g, tol)
    cut = lap.rank_tol * max(1.0, float(w[-1]))
    keep = w > cut
    return float(np.sqrt(np.sum(np.abs(comps[keep]) ** 2 / w[keep]).real))


def dual_metric(e: EnergyForm, mu: State, nu: State, tol=DEFAULT_EQ_TOL) -> float:
    """The same distance through the Riesz representation: solve for the
    potential h with E(h, .) = (mu - nu)(.) and return its energy seminorm."""
    alg = e.algebra
    g = _difference_coords(mu, nu)
    gram = e.gram_orthonormal
    h, *_ = np.linalg.lstsq(gram.conj().T, g, rcond=None)
    residual = np.linalg.norm(gram.conj().T @ h - g)
    if residual > tol * max(1.0, np.linalg.norm(g)):
        raise DisconnectedError(
            "no potential represents the state difference; the distance is infinite"
        )
    return e.seminorm(alg.from_coords(h))


@dataclass(frozen=True)
class StateEmbedding:
    """The affine isometry of the state space into the Hilbert space carried
    by the energy form, anchored at a base state."""

    lap: Laplacian
    base: State

    def __post_init__(self):
        if not connectedness(self.lap):
            raise DisconnectedError("embedding requires a metrically connected Laplacian")

    @cached_property
    def _spectral(self):
        w, v = self.lap.eigensystem
        cut = self.lap.rank_tol * max(1.0, float(w[-1]))
        keep = w > cut
        return w[keep], v[:, keep]

    def coords(self, mu: State) -> np.ndarray:
        """Coordinates of the potential of mu - base in an orthonormal frame
        of the energy Hilbert space; Euclidean distances equal the energy
        metric."""
        g = _difference_coords(mu, self.base)
        w, v = self._spectral
        return (v.conj().T @ g) / np.sqrt(w)


def embed_state(lap: Laplacian, mu: State, base: State) -> np.ndarray:
    return StateEmbedding(lap, base).coords(mu)
