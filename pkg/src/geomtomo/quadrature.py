"""Numerical integration on spheres, sub-spheres, [0, 1] and Grassmannians.

Sphere integrals use the unnormalized surface measure ``du`` whose total mass
is ``|S^{n-1}| = n * omega_n``; divide by :func:`sphere_area` for averages.

Deterministic product rules are built from composite Gauss-Legendre panels
whose edges sit on the coordinate hyperplanes, so integrands that are only
piecewise smooth across ``u_i = 0`` (l_p balls, cone densities, boxes) keep
their high-order convergence.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
from scipy.special import gammaln

__all__ = [
    "QuadratureRule",
    "Frame",
    "ball_volume",
    "sphere_area",
    "sphere_rule",
    "subsphere_rule",
    "subspace_rule",
    "radial_rule",
    "direction_grid",
    "frame_from_normal",
    "frames_from_normals",
    "grassmann_sample",
    "integrate",
    "pairwise_sum",
]

MAX_LEVEL = 5
RANDOM_BATCHES = 16


def ball_volume(n: int) -> float:
    """Volume ``omega_n`` of the Euclidean unit ball in R^n (``omega_0 = 1``)."""
    return math.exp(0.5 * n * math.log(math.pi) - gammaln(0.5 * n + 1.0))


def sphere_area(n: int) -> float:
    """Surface measure ``|S^{n-1}| = n omega_n`` of the unit sphere in R^n."""
    if n == 1:
        return 2.0
    return n * ball_volume(n)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes and positive weights for an integral over a fixed domain.

    For sphere rules ``nodes`` has shape ``(m, n)``; for the radial rule it
    has shape ``(m,)``.  ``error_estimate`` is the a-priori error of the rule
    on the constant function (deterministic rules) or ``nan`` when only a
    per-integrand estimate makes sense (stochastic rules, see
    :func:`integrate`).
    """

    nodes: np.ndarray
    weights: np.ndarray
    exact_mass: float
    error_estimate: float = 0.0
    seed: int | None = None
    level: int = 3
    kind: str = "gauss"
    antipodal: bool = False

    @property
    def size(self) -> int:
        return len(self.weights)

    @property
    def dim(self) -> int:
        return 1 if self.nodes.ndim == 1 else self.nodes.shape[1]

    @property
    def stochastic(self) -> bool:
        return self.seed is not None


def pairwise_sum(values: np.ndarray, axis: int = -1) -> np.ndarray:
    """Sum along ``axis`` in a fixed, order-independent-of-chunking way."""
    # numpy's reduction is pairwise and deterministic for a given shape
    return np.add.reduce(np.asarray(values, dtype=float), axis=axis)


def integrate(rule: QuadratureRule, values: np.ndarray, axis: int = -1):
    """Apply ``rule`` to sampled integrand values.

    ``values`` holds the integrand at ``rule.nodes`` along ``axis``.  Returns
    ``(integral, standard_error)``; the standard error is zero for
    deterministic rules and the batch-means estimate for stochastic ones.
    """
    values = np.moveaxis(np.asarray(values, dtype=float), axis, -1)
    prod = values * rule.weights
    if rule.antipodal:
        # nodes come in (u, -u) pairs: fold them first so odd parts cancel exactly
        prod = prod[..., 0::2] + prod[..., 1::2]
    total = pairwise_sum(prod)
    if not rule.stochastic:
        return total, np.zeros_like(total)
    nb = RANDOM_BATCHES
    per = values.reshape(values.shape[:-1] + (nb, -1))
    w = rule.weights.reshape(nb, -1)
    batch = pairwise_sum(per * w, axis=-1) * nb
    se = np.std(batch, axis=-1, ddof=1) / math.sqrt(nb)
    return total, se


# ---------------------------------------------------------------------------
# one-dimensional building blocks


@lru_cache(maxsize=None)
def _gauss_legendre(m: int):
    x, w = np.polynomial.legendre.leggauss(m)
    return x, w


def composite_gauss(a: float, b: float, panels: int, m: int):
    """Composite Gauss-Legendre rule on ``[a, b]`` with equal panels."""
    x, w = _gauss_legendre(m)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _per_panel(level: int) -> int:
    if not 1 <= level <= MAX_LEVEL:
        raise ValueError(f"quadrature level must be in 1..{MAX_LEVEL}, got {level}")
    return 2 ** (level + 1)


# ---------------------------------------------------------------------------
# sphere rules


def _half_circle(count: int):
    # psi in [0, pi); the antipodes fill [pi, 2 pi)
    psi, w = composite_gauss(0.0, math.pi, 2, count // 4)
    return np.column_stack([np.cos(psi), np.sin(psi)]), w


def _lift(base: np.ndarray, wb: np.ndarray, c: np.ndarray, s: np.ndarray, wc: np.ndarray):
    nodes = np.concatenate(
        [np.column_stack([base * s_i, np.full(len(base), c_i)]) for c_i, s_i in zip(c, s)]
    )
    weights = np.concatenate([wb * w_i for w_i in wc])
    return nodes, weights


def _product_half(n: int, level: int, inner: bool = False):
    """Half of a deterministic product rule on S^{n-1}; negation gives the rest.

    Coordinates: ``u = (S cos psi, S sin psi, ...)`` where the trailing
    coordinates are ``cos phi_j`` of successive polar angles and ``S`` is the
    product of the ``sin phi_j``.  For n = 3 the polar variable is
    ``t = cos(theta)`` with plain Gauss-Legendre weights.  ``inner`` selects
    the coarser resolution used for the inner factors of n >= 4 rules.
    """
    m = _per_panel(level)
    if n == 2:
        return _half_circle((4 if inner else 16) * m)
    if n == 3:
        base, wb = _half_circle((4 if inner else 8) * m)
        t, wt = composite_gauss(-1.0, 1.0, 2, max(m // 2, 2) if inner else m)
        return _lift(base, wb, t, np.sqrt(1.0 - t * t), wt)
    base, wb = _product_half(n - 1, level, inner=True)
    phi, wphi = composite_gauss(0.0, math.pi, 2, max(m // 2, 2))
    return _lift(base, wb, np.cos(phi), np.sin(phi), wphi * np.sin(phi) ** (n - 2))


def _interleave(half: np.ndarray, wh: np.ndarray):
    nodes = np.stack([half, -half], axis=1).reshape(-1, half.shape[1])
    return nodes, np.repeat(wh, 2)


def _random_sphere(n: int, level: int, seed: int):
    """Antithetic randomly rotated orthonormal shells, equal weights.

    Each shell is ``{+-Q e_i}`` for a Haar-random orthogonal ``Q``: a
    spherical 3-design, so linear and quadratic integrands are exact and odd
    integrands vanish identically.
    """
    count = 2 ** (10 + level)
    shells = max(RANDOM_BATCHES, count // (2 * n))
    shells -= shells % RANDOM_BATCHES
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((shells, n, n))
    q, r = np.linalg.qr(g)
    q *= np.sign(np.diagonal(r, axis1=1, axis2=2))[:, None, :]
    cols = np.transpose(q, (0, 2, 1))  # rows are Q e_i
    # interleave u, -u so odd integrands cancel exactly in the pairwise sum
    nodes = np.stack([cols, -cols], axis=2).reshape(-1, n)
    weights = np.full(len(nodes), sphere_area(n) / len(nodes))
    return nodes, weights


@lru_cache(maxsize=64)
def sphere_rule(n: int, level: int = 3, seed: int | None = None, method: str = "auto") -> QuadratureRule:
    """Quadrature rule for ``du`` on S^{n-1}.

    ``method`` is ``"auto"`` (product Gauss for n <= 4, randomized shells
    otherwise), ``"product"`` or ``"random"``.  Random rules require a seed
    (default 0) and are reproducible for a fixed seed.
    """
    if n < 1:
        raise ValueError("dimension must be positive")
    if n == 1:
        nodes = np.array([[1.0], [-1.0]])
        return QuadratureRule(_readonly(nodes), _readonly(np.ones(2)), 2.0, 0.0, None, level, "points", True)
    if method == "auto":
        method = "product" if n <= 4 else "random"
    if method == "product":
        half, wh = _product_half(n, level)
        half /= np.linalg.norm(half, axis=1, keepdims=True)
        nodes, weights = _interleave(half, wh)
        mass = sphere_area(n)
        err = abs(weights.sum() - mass) / mass
        return QuadratureRule(_readonly(nodes), _readonly(weights), mass, err, None, level, "product", True)
    if method == "random":
        seed = 0 if seed is None else int(seed)
        nodes, weights = _random_sphere(n, level, seed)
        return QuadratureRule(_readonly(nodes), _readonly(weights), sphere_area(n), float("nan"), seed, level,
                              "random", True)
    raise ValueError(f"unknown sphere rule method {method!r}")


def direction_grid(n: int, level: int = 2, symmetric: bool = False) -> np.ndarray:
    """Deterministic set of unit directions for hypothesis checks.

    These are the nodes of ``sphere_rule(n, level)``; with ``symmetric`` only
    one direction of each antipodal pair is kept.
    """
    nodes = sphere_rule(n, level, seed=0).nodes
    return nodes[0::2] if symmetric else nodes


# ---------------------------------------------------------------------------
# frames and sub-spheres


@dataclass(frozen=True, eq=False)
class Frame:
    """Orthonormal basis of a k-dimensional subspace of R^n.

    ``basis`` has shape ``(n, k)`` with orthonormal columns.  For hyperplanes
    (k = n - 1) ``normal`` is the unit vector with ``normal^perp = span(basis)``.
    """

    basis: np.ndarray
    normal: np.ndarray | None = None

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        if b.ndim != 2 or b.shape[1] >= b.shape[0] or b.shape[1] < 1:
            raise ValueError("basis must have shape (n, k) with 1 <= k < n")
        if not np.allclose(b.T @ b, np.eye(b.shape[1]), atol=1e-12, rtol=0):
            raise ValueError("frame basis is not orthonormal")
        object.__setattr__(self, "basis", _readonly(b))
        if self.normal is not None:
            th = np.asarray(self.normal, dtype=float)
            if b.shape[1] != b.shape[0] - 1:
                raise ValueError("normal is only defined for hyperplane frames")
            if abs(np.linalg.norm(th) - 1) > 1e-12 or np.max(np.abs(b.T @ th)) > 1e-12:
                raise ValueError("normal must be a unit vector orthogonal to the basis")
            object.__setattr__(self, "normal", _readonly(th))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def k(self) -> int:
        return self.basis.shape[1]

    def to_json(self) -> dict:
        out = {"dim": self.dim, "k": self.k, "basis": self.basis.T.tolist()}
        if self.normal is not None:
            out["normal"] = self.normal.tolist()
        return out


def _householder_bases(thetas: np.ndarray) -> np.ndarray:
    """Orthonormal bases of theta^perp, shape (m, n, n-1), via reflections."""
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    m, n = thetas.shape
    # reflect e_n onto theta; use the better-conditioned sign
    sgn = np.where(thetas[:, -1] >= 0, 1.0, -1.0)
    v = thetas.copy()
    v[:, -1] += sgn
    vv = np.einsum("ij,ij->i", v, v)
    eye = np.eye(n)[:, : n - 1]
    # H e_j = e_j - 2 v v_j / |v|^2 for j < n; orthogonal to theta
    bases = eye[None, :, :] - 2.0 * v[:, :, None] * v[:, None, : n - 1] / vv[:, None, None]
    return bases


def frames_from_normals(thetas: np.ndarray) -> np.ndarray:
    """Stacked hyperplane bases for many unit normals, shape (m, n, n-1)."""
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    norms = np.linalg.norm(thetas, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-9):
        raise ValueError("normals must be unit vectors")
    return _householder_bases(thetas / norms[:, None])


def frame_from_normal(theta) -> Frame:
    theta = np.asarray(theta, dtype=float)
    theta = theta / np.linalg.norm(theta)
    basis = frames_from_normals(theta[None, :])[0]
    # re-orthonormalize to clear rounding before validation
    q, _ = np.linalg.qr(basis)
    q -= np.outer(theta, theta @ q)
    q /= np.linalg.norm(q, axis=0)
    return Frame(q, theta)


def subspace_rule(frame: Frame, level: int = 3, seed: int | None = None) -> QuadratureRule:
    """A rule on S^{n-1} cap H, H = span(frame.basis), exact mass |S^{k-1}|."""
    base = sphere_rule(frame.k, level, seed)
    nodes = base.nodes @ frame.basis.T
    return QuadratureRule(_readonly(nodes), base.weights, base.exact_mass, base.error_estimate,
                          base.seed, level, base.kind, base.antipodal)


def subsphere_rule(frame: Frame, level: int = 3, seed: int | None = None) -> QuadratureRule:
    """Rule on the great sub-sphere S^{n-1} cap theta^perp of a hyperplane frame."""
    if frame.k != frame.dim - 1:
        raise ValueError("subsphere_rule needs a hyperplane frame (k = n - 1)")
    return subspace_rule(frame, level, seed)


def grassmann_sample(n: int, k: int, count: int, seed: int = 0) -> list[Frame]:
    """Haar-distributed k-subspaces of R^n from QR of Gaussian matrices."""
    if not 1 <= k < n:
        raise ValueError("need 1 <= k < n")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((count, n, k))
    q, r = np.linalg.qr(g)
    q = q * np.sign(np.diagonal(r, axis1=1, axis2=2))[:, None, :]
    frames = []
    for b in q:
        normal = None
        if k == n - 1:
            full, _ = np.linalg.qr(np.column_stack([b, rng.standard_normal(n)]))
            normal = full[:, -1] - b @ (b.T @ full[:, -1])
            normal /= np.linalg.norm(normal)
        frames.append(Frame(b, normal))
    return frames


# ---------------------------------------------------------------------------
# radial rule


@lru_cache(maxsize=None)
def radial_rule(level: int = 3) -> QuadratureRule:
    """Gauss-Legendre on [0, 1] with ``4 * 2**level`` nodes (32 at level 3)."""
    if not 1 <= level <= MAX_LEVEL:
        raise ValueError(f"quadrature level must be in 1..{MAX_LEVEL}, got {level}")
    x, w = _gauss_legendre(4 * 2**level)
    return QuadratureRule(_readonly(0.5 * (x + 1.0)), _readonly(0.5 * w), 1.0, 0.0, None, level, "gauss")
