"""Discrete geometries with calibrated differential operators.

Each built-in geometry is a uniform tensor grid carrying finite-volume
weights: a volume weight per node and a conductance per edge.  The
Laplace-Beltrami operator is the weighted graph Laplacian

    (L f)_i = (1/vol_i) * sum_j w_ij (f_j - f_i),

which is self-adjoint in the volume-weighted inner product, kills constants
exactly, and has the sign structure a discrete maximum principle needs.
Gradients and Hessians are centered second-order stencils (one-sided at
walls), expressed in the local orthonormal frame so that pointwise norms
and eigenvalues need no metric factors.

The sphere uses a latitude-longitude grid; the two polar caps are single
lumped nodes joined to their adjacent ring, which avoids the coordinate
singularity while keeping the operator second-order accurate.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import GeometryError
from .fields import ScalarField, TensorField, require_bound

_KINDS = ("circle", "torus2", "interval", "box2", "sphere2")
_CLOSED = ("circle", "torus2", "sphere2")
_BOUNDED = ("interval", "box2")
_MIN_RESOLUTION = 8


@dataclass(frozen=True)
class GeometrySpec:
    """Geometry description: kind, per-axis resolution, extent, boundary.

    extent means circumference for circle/torus axes, side length for
    interval/box axes, and radius for the sphere.  boundary is forced to
    'neumann' on bounded kinds and 'none' on closed ones.
    """

    kind: str
    resolution: tuple
    extent: tuple
    boundary: str = ""

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise GeometryError("unknown geometry kind '%s'" % (self.kind,))
        res = self.resolution if isinstance(self.resolution, tuple) else (self.resolution,)
        ext = self.extent if isinstance(self.extent, tuple) else (self.extent,)
        res = tuple(int(r) for r in res)
        ext = tuple(float(e) for e in ext)
        n_axes = {"circle": 1, "interval": 1, "torus2": 2, "box2": 2, "sphere2": 2}[self.kind]
        n_ext = 1 if self.kind == "sphere2" else n_axes
        if len(res) == 1 and n_axes > 1:
            res = res * n_axes
        if len(ext) == 1 and n_ext > 1:
            ext = ext * n_ext
        if len(res) != n_axes:
            raise GeometryError("%s needs %d resolution value(s)" % (self.kind, n_axes))
        if len(ext) != n_ext:
            raise GeometryError("%s needs %d extent value(s)" % (self.kind, n_ext))
        if any(r < _MIN_RESOLUTION for r in res):
            raise GeometryError("resolution must be >= %d on every axis" % _MIN_RESOLUTION)
        if any(e <= 0 for e in ext):
            raise GeometryError("extent components must be strictly positive")
        expected = "neumann" if self.kind in _BOUNDED else "none"
        bnd = self.boundary or expected
        if bnd != expected:
            raise GeometryError(
                "boundary '%s' inconsistent with kind '%s' (expected '%s')"
                % (bnd, self.kind, expected)
            )
        object.__setattr__(self, "resolution", res)
        object.__setattr__(self, "extent", ext)
        object.__setattr__(self, "boundary", bnd)

    def with_resolution(self, factor=None, resolution=None) -> "GeometrySpec":
        """Same geometry at a different resolution (for refinement studies)."""
        if resolution is None:
            resolution = tuple(int(round(r * factor)) for r in self.resolution)
        elif not isinstance(resolution, tuple):
            resolution = (int(resolution),) * len(self.resolution)
        return GeometrySpec(self.kind, resolution, self.extent, self.boundary)

    def digest(self) -> str:
        key = "%s|%r|%r|%s" % (self.kind, self.resolution, self.extent, self.boundary)
        return hashlib.sha256(key.encode()).hexdigest()[:12]


class DiscreteManifold:
    """A built geometry: nodes, weights, operators, curvature data.

    Immutable after construction; operations are pure functions of their
    inputs, so instances are safe to share across workers.

    Attributes
    ----------
    num_nodes : int
    dim : int
        Manifold dimension (1 or 2).
    coords : (N, c) ndarray
        Node coordinates (angle, arclength, or (theta, phi) on the sphere).
    volumes : (N,) ndarray
    weights : csr_matrix
        Symmetric edge conductances, zero diagonal.
    laplacian : csr_matrix
        Weighted graph Laplacian (rows sum to zero).
    grad_ops : tuple of csr_matrix
        Orthonormal-frame gradient components, one per frame axis.
    hess_ops : tuple of csr_matrix
        Hessian component extractors ((0,0),) in 1D, ((0,0),(0,1),(1,1)) in 2D.
    ricci_min : (N,) ndarray
        Smallest eigenvalue of the analytic Ricci tensor at each node; the
        built-in geometries all have isotropic Ricci, so this value times
        the identity is the full tensor in the orthonormal frame.
    boundary_nodes : (B,) int ndarray
    boundary_convex : bool
    """

    def __init__(self, spec, coords, volumes, weights, grad_ops, hess_ops,
                 ricci_min, boundary_nodes, axis_neighbors, axis_spacing,
                 periodic_axes, grid_shape, dim):
        self.spec = spec
        self.kind = spec.kind
        self.dim = dim
        self.coords = coords
        self.num_nodes = coords.shape[0]
        self.volumes = volumes
        self.weights = weights.tocsr()
        self.grad_ops = tuple(g.tocsr() for g in grad_ops)
        self.hess_ops = tuple(h.tocsr() for h in hess_ops)
        self.ricci_min = ricci_min
        self.boundary_nodes = np.asarray(boundary_nodes, dtype=int)
        self.is_boundary = np.zeros(self.num_nodes, dtype=bool)
        self.is_boundary[self.boundary_nodes] = True
        self.boundary_convex = spec.kind in _BOUNDED
        self.axis_neighbors = axis_neighbors
        self.axis_spacing = axis_spacing
        self.periodic_axes = periodic_axes
        self.grid_shape = grid_shape
        self.geometry_hash = spec.digest()
        self._freeze()
        self._check_weights()
        row_w = np.asarray(self.weights.sum(axis=1)).ravel()
        lap = sp.diags(1.0 / self.volumes) @ (self.weights - sp.diags(row_w))
        self.laplacian = lap.tocsr()
        # edge-difference form of the same operator: exact on constants even
        # where tiny cap volumes amplify roundoff (sphere poles)
        coo = self.weights.tocoo()
        self._edge_rows = coo.row
        self._edge_cols = coo.col
        self._edge_w = coo.data

    def _freeze(self):
        for arr in (self.coords, self.volumes, self.ricci_min, self.boundary_nodes,
                    self.is_boundary):
            arr.setflags(write=False)

    def _check_weights(self):
        if np.any(self.volumes <= 0):
            raise GeometryError("non-positive volume weight")
        if self.weights.nnz and self.weights.data.min() <= 0:
            raise GeometryError("non-positive edge weight")
        asym = (self.weights - self.weights.T)
        if asym.nnz and np.max(np.abs(asym.data)) > 0:
            raise GeometryError("edge weights are not symmetric")

    # Spacing of the finest axis; the usual 'h' in tolerance policies.
    @property
    def max_spacing(self) -> float:
        return float(max(h for h in self.axis_spacing if h is not None))

    def stencil(self, i: int) -> np.ndarray:
        """Neighbor indices of node i (symmetric by construction)."""
        row = self.weights.getrow(int(i))
        return row.indices.copy()

    def field(self, values) -> ScalarField:
        return ScalarField(self, values)

    def constant(self, c: float) -> ScalarField:
        return ScalarField(self, np.full(self.num_nodes, float(c)))

    def distance_to_boundary(self) -> np.ndarray:
        """Euclidean distance to the nearest wall; +inf on closed geometries."""
        if self.kind not in _BOUNDED:
            return np.full(self.num_nodes, np.inf)
        d = np.full(self.num_nodes, np.inf)
        for axis in range(self.dim):
            x = self.coords[:, axis]
            d = np.minimum(d, np.minimum(x, self.spec.extent[axis] - x))
        return d

    def interior_core(self, margin: float = None) -> np.ndarray:
        """Boolean mask of nodes farther than `margin` from the boundary.

        Default margin is 5 grid spacings, the region where ratio-derived
        quantities such as -2 log f1 stay bounded.
        """
        if margin is None:
            margin = 5.0 * self.max_spacing
        return self.distance_to_boundary() > margin


# ---------------------------------------------------------------------------
# 1D building blocks


def _segment_1d(n, length, periodic):
    """Volumes, adjacency, gradient and second-difference ops for one axis."""
    if periodic:
        h = length / n
        vol = np.full(n, h)
    else:
        h = length / (n - 1)
        vol = np.full(n, h)
        vol[0] = vol[-1] = h / 2.0

    rows, cols, vals = [], [], []
    for i in range(n - 1):
        rows += [i, i + 1]
        cols += [i + 1, i]
        vals += [1.0 / h, 1.0 / h]
    if periodic:
        rows += [0, n - 1]
        cols += [n - 1, 0]
        vals += [1.0 / h, 1.0 / h]
    W = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))

    G = sp.lil_matrix((n, n))
    S = sp.lil_matrix((n, n))
    for i in range(n):
        ip, im = i + 1, i - 1
        if periodic:
            ip %= n
            im %= n
        if 0 <= im and (periodic or ip <= n - 1):
            G[i, ip] = 1.0 / (2 * h)
            G[i, im] = -1.0 / (2 * h)
            S[i, ip] = 1.0 / h**2
            S[i, i] = -2.0 / h**2
            S[i, im] = 1.0 / h**2
    if not periodic:
        # second-order one-sided closures at the walls
        G[0, 0], G[0, 1], G[0, 2] = -3.0 / (2 * h), 4.0 / (2 * h), -1.0 / (2 * h)
        G[n - 1, n - 1], G[n - 1, n - 2], G[n - 1, n - 3] = (
            3.0 / (2 * h), -4.0 / (2 * h), 1.0 / (2 * h))
        S[0, 0], S[0, 1], S[0, 2], S[0, 3] = (
            2.0 / h**2, -5.0 / h**2, 4.0 / h**2, -1.0 / h**2)
        S[n - 1, n - 1], S[n - 1, n - 2], S[n - 1, n - 3], S[n - 1, n - 4] = (
            2.0 / h**2, -5.0 / h**2, 4.0 / h**2, -1.0 / h**2)
    return h, vol, W, G.tocsr(), S.tocsr()


def _axis_neighbor_maps(nx, ny, periodic_x, periodic_y):
    """Per-node (+,-) neighbor indices per axis; walls map to the mirror node."""
    idx = np.arange(nx * ny)
    ix, iy = idx // ny, idx % ny
    if periodic_x:
        xp = ((ix + 1) % nx) * ny + iy
        xm = ((ix - 1) % nx) * ny + iy
    else:
        xp = np.where(ix + 1 <= nx - 1, ix + 1, ix - 1) * ny + iy
        xm = np.where(ix - 1 >= 0, ix - 1, ix + 1) * ny + iy
    if periodic_y:
        yp = ix * ny + (iy + 1) % ny
        ym = ix * ny + (iy - 1) % ny
    else:
        yp = ix * ny + np.where(iy + 1 <= ny - 1, iy + 1, iy - 1)
        ym = ix * ny + np.where(iy - 1 >= 0, iy - 1, iy + 1)
    return (xp, xm), (yp, ym)


def _build_flat_1d(spec):
    periodic = spec.kind == "circle"
    (n,) = spec.resolution
    (length,) = spec.extent
    h, vol, W, G, S = _segment_1d(n, length, periodic)
    if periodic:
        coords = (np.arange(n) * h)[:, None]
        boundary = np.empty(0, dtype=int)
        nb = np.arange(n)
        neighbors = [((nb + 1) % n, (nb - 1) % n)]
    else:
        coords = np.linspace(0.0, length, n)[:, None]
        boundary = np.array([0, n - 1])
        plus = np.minimum(np.arange(n) + 1, n - 1)
        minus = np.maximum(np.arange(n) - 1, 0)
        plus[-1], minus[0] = n - 2, 1  # mirror at the walls
        neighbors = [(plus, minus)]
    return DiscreteManifold(
        spec, coords, vol, W, (G,), (S,),
        ricci_min=np.zeros(n), boundary_nodes=boundary,
        axis_neighbors=neighbors, axis_spacing=(h,),
        periodic_axes=(periodic,), grid_shape=(n,), dim=1)


def _build_flat_2d(spec):
    periodic = spec.kind == "torus2"
    nx, ny = spec.resolution
    lx, ly = spec.extent
    hx, volx, Wx, Gx1, Sx1 = _segment_1d(nx, lx, periodic)
    hy, voly, Wy, Gy1, Sy1 = _segment_1d(ny, ly, periodic)
    Ix, Iy = sp.identity(nx), sp.identity(ny)

    vol = np.kron(volx, voly)
    W = sp.kron(Wx, sp.diags(voly)) + sp.kron(sp.diags(volx), Wy)
    Gx = sp.kron(Gx1, Iy)
    Gy = sp.kron(Ix, Gy1)
    Hxx = sp.kron(Sx1, Iy)
    Hyy = sp.kron(Ix, Sy1)
    Hxy = (Gx @ Gy).tocsr()

    xs = (np.arange(nx) * hx) if periodic else np.linspace(0.0, lx, nx)
    ys = (np.arange(ny) * hy) if periodic else np.linspace(0.0, ly, ny)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    coords = np.column_stack([X.ravel(), Y.ravel()])

    if periodic:
        boundary = np.empty(0, dtype=int)
    else:
        idx = np.arange(nx * ny)
        ix, iy = idx // ny, idx % ny
        boundary = idx[(ix == 0) | (ix == nx - 1) | (iy == 0) | (iy == ny - 1)]
    neighbors = _axis_neighbor_maps(nx, ny, periodic, periodic)
    return DiscreteManifold(
        spec, coords, vol, W, (Gx, Gy), (Hxx, Hxy, Hyy),
        ricci_min=np.zeros(nx * ny), boundary_nodes=boundary,
        axis_neighbors=list(neighbors), axis_spacing=(hx, hy),
        periodic_axes=(periodic, periodic), grid_shape=(nx, ny), dim=2)


def _build_sphere2(spec):
    n_theta, n_phi = spec.resolution
    (radius,) = spec.extent
    d_theta = np.pi / n_theta
    d_phi = 2.0 * np.pi / n_phi
    n_rings = n_theta - 1
    n = n_rings * n_phi + 2
    north, south = n - 2, n - 1

    thetas = (np.arange(1, n_rings + 1)) * d_theta
    phis = np.arange(n_phi) * d_phi

    def rid(i, j):
        # ring index i in 1..n_rings, longitude j modulo n_phi
        return (i - 1) * n_phi + (j % n_phi)

    coords = np.zeros((n, 2))
    for i in range(1, n_rings + 1):
        for j in range(n_phi):
            coords[rid(i, j)] = (thetas[i - 1], phis[j])
    coords[north] = (0.0, 0.0)
    coords[south] = (np.pi, 0.0)

    vol = np.zeros(n)
    for i in range(1, n_rings + 1):
        vol[rid(i, 0):rid(i, 0) + n_phi] = radius**2 * np.sin(thetas[i - 1]) * d_theta * d_phi
    cap = 2.0 * np.pi * radius**2 * (1.0 - np.cos(d_theta / 2.0))
    vol[north] = vol[south] = cap

    rows, cols, vals = [], [], []

    def add_edge(a, b, w):
        rows.extend((a, b))
        cols.extend((b, a))
        vals.extend((w, w))

    for i in range(1, n_rings + 1):
        w_phi = d_theta / (np.sin(thetas[i - 1]) * d_phi)
        for j in range(n_phi):
            add_edge(rid(i, j), rid(i, j + 1), w_phi)
        if i < n_rings:
            w_th = np.sin((i + 0.5) * d_theta) * d_phi / d_theta
            for j in range(n_phi):
                add_edge(rid(i, j), rid(i + 1, j), w_th)
    w_cap = np.sin(d_theta / 2.0) * d_phi / d_theta
    for j in range(n_phi):
        add_edge(north, rid(1, j), w_cap)
        add_edge(south, rid(n_rings, j), w_cap)
    W = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))

    # coordinate-derivative helpers used by the frame gradient and Hessian
    Ptheta = sp.lil_matrix((n, n))   # d/dtheta, pole rows zero
    Pphi = sp.lil_matrix((n, n))     # d/dphi, pole rows zero
    Sth = sp.lil_matrix((n, n))      # d2/dtheta2
    Sph = sp.lil_matrix((n, n))      # d2/dphi2
    for i in range(1, n_rings + 1):
        for j in range(n_phi):
            node = rid(i, j)
            up = rid(i + 1, j) if i < n_rings else south
            dn = rid(i - 1, j) if i > 1 else north
            Ptheta[node, up] += 1.0 / (2 * d_theta)
            Ptheta[node, dn] += -1.0 / (2 * d_theta)
            Sth[node, up] += 1.0 / d_theta**2
            Sth[node, node] += -2.0 / d_theta**2
            Sth[node, dn] += 1.0 / d_theta**2
            Pphi[node, rid(i, j + 1)] += 1.0 / (2 * d_phi)
            Pphi[node, rid(i, j - 1)] += -1.0 / (2 * d_phi)
            Sph[node, rid(i, j + 1)] += 1.0 / d_phi**2
            Sph[node, node] += -2.0 / d_phi**2
            Sph[node, rid(i, j - 1)] += 1.0 / d_phi**2
    Ptheta = Ptheta.tocsr()
    Pphi = Pphi.tocsr()

    sin_t = np.zeros(n)
    cot_t = np.zeros(n)
    ring = slice(0, n_rings * n_phi)
    sin_t[ring] = np.sin(coords[ring, 0])
    cot_t[ring] = 1.0 / np.tan(coords[ring, 0])
    inv_sin = np.zeros(n)
    inv_sin[ring] = 1.0 / sin_t[ring]

    G0 = (sp.diags(np.full(n, 1.0 / radius)) @ Ptheta).tolil()
    G1 = (sp.diags(inv_sin / radius) @ Pphi).tolil()

    # frame Hessian components on the rings (Christoffel-corrected)
    H00 = (Sth.tocsr() / radius**2).tolil()
    H01 = (sp.diags(inv_sin / radius**2) @ (Ptheta @ Pphi - sp.diags(cot_t) @ Pphi)).tolil()
    H11 = (sp.diags(inv_sin**2 / radius**2) @ Sph.tocsr()
           + sp.diags(cot_t / radius**2) @ Ptheta).tolil()

    # tangent-plane closures at the poles: mode-1 Fourier content of the
    # adjacent ring gives the gradient, modes 0 and 2 give the Hessian
    rho = radius * d_theta
    for pole, ring_i in ((north, 1), (south, n_rings)):
        cosj = np.cos(phis)
        sinj = np.sin(phis)
        cos2j = np.cos(2 * phis)
        sin2j = np.sin(2 * phis)
        ids = [rid(ring_i, j) for j in range(n_phi)]
        for j, node in enumerate(ids):
            G0[pole, node] = 2.0 * cosj[j] / (n_phi * rho)
            G1[pole, node] = 2.0 * sinj[j] / (n_phi * rho)
            H00[pole, node] = (2.0 / rho**2) * (1.0 + 2.0 * cos2j[j]) / n_phi
            H11[pole, node] = (2.0 / rho**2) * (1.0 - 2.0 * cos2j[j]) / n_phi
            H01[pole, node] = (4.0 / (n_phi * rho**2)) * sin2j[j]
        H00[pole, pole] = -2.0 / rho**2
        H11[pole, pole] = -2.0 / rho**2

    return DiscreteManifold(
        spec, coords, vol, W, (G0, G1), (H00, H01, H11),
        ricci_min=np.full(n, 1.0 / radius**2), boundary_nodes=np.empty(0, dtype=int),
        axis_neighbors=None, axis_spacing=(radius * d_theta, radius * d_phi),
        periodic_axes=(False, True), grid_shape=(n_rings, n_phi), dim=2)


def build_geometry(spec: GeometrySpec) -> DiscreteManifold:
    """Build the discrete manifold described by `spec`.

    The returned operators are second-order accurate on smooth fields;
    bounded kinds carry the mirror-ghost Neumann closure inside the
    Laplacian, closed kinds are periodic.
    """
    if not isinstance(spec, GeometrySpec):
        raise GeometryError("build_geometry expects a GeometrySpec")
    if spec.kind in ("circle", "interval"):
        return _build_flat_1d(spec)
    if spec.kind in ("torus2", "box2"):
        return _build_flat_2d(spec)
    return _build_sphere2(spec)


# ---------------------------------------------------------------------------
# Operators


def laplace_beltrami(manifold: DiscreteManifold, f: ScalarField) -> ScalarField:
    """Weighted graph Laplacian of f; exactly zero on constants.

    Evaluated edgewise as (1/vol_i) sum_j w_ij (f_j - f_i) so the node value
    cancels before any division by small cap volumes.
    """
    require_bound(manifold, f)
    v = f.values
    flux = np.bincount(manifold._edge_rows,
                       weights=manifold._edge_w * (v[manifold._edge_cols]
                                                   - v[manifold._edge_rows]),
                       minlength=manifold.num_nodes)
    return ScalarField(manifold, flux / manifold.volumes)


def _shifted(values: np.ndarray) -> np.ndarray:
    # derivative stencils are shift invariant; subtracting a reference value
    # makes constants map to exact zeros even in the trigonometric pole rows
    return values - values[0]


def gradient_components(manifold: DiscreteManifold, f: ScalarField) -> np.ndarray:
    """Orthonormal-frame gradient components, shape (dim, N)."""
    require_bound(manifold, f)
    v = _shifted(f.values)
    return np.stack([g @ v for g in manifold.grad_ops])


def gradient_norm_sq(manifold: DiscreteManifold, f: ScalarField) -> ScalarField:
    """|grad f|^2 in the metric; centered differences, one-sided at walls."""
    comps = gradient_components(manifold, f)
    return ScalarField(manifold, np.sum(comps * comps, axis=0))


def hessian(manifold: DiscreteManifold, f: ScalarField) -> TensorField:
    """Per-node symmetric Hessian in the local orthonormal frame.

    Flat geometries use coordinate second differences; the sphere applies
    the Christoffel corrections of the latitude-longitude chart.
    """
    require_bound(manifold, f)
    n, d = manifold.num_nodes, manifold.dim
    v = _shifted(f.values)
    out = np.zeros((n, d, d))
    if d == 1:
        out[:, 0, 0] = manifold.hess_ops[0] @ v
    else:
        h00, h01, h11 = (op @ v for op in manifold.hess_ops)
        out[:, 0, 0] = h00
        out[:, 1, 1] = h11
        out[:, 0, 1] = h01
        out[:, 1, 0] = h01
    return TensorField(manifold, out)


def directional_drift(manifold: DiscreteManifold, phi: ScalarField,
                      u: ScalarField) -> ScalarField:
    """grad(phi) . grad(u): metric inner product of the discrete gradients."""
    require_bound(manifold, phi, u)
    gp = gradient_components(manifold, phi)
    gu = gradient_components(manifold, u)
    return ScalarField(manifold, np.sum(gp * gu, axis=0))


def bakry_emery_bound(manifold: DiscreteManifold, phi: ScalarField) -> float:
    """Smallest K >= 0 with Rc + Hess(phi) >= -K over all nodes.

    Rc is the analytic Ricci tensor of the model geometry (isotropic for
    every built-in kind), Hess(phi) the discrete Hessian; the bound is the
    most negative pointwise eigenvalue of their sum, clipped at zero.
    """
    require_bound(manifold, phi)
    H = hessian(manifold, phi).values
    r = manifold.ricci_min
    if manifold.dim == 1:
        lam_min = r + H[:, 0, 0]
    else:
        a = r + H[:, 0, 0]
        c = r + H[:, 1, 1]
        b = H[:, 0, 1]
        lam_min = 0.5 * (a + c) - np.sqrt(0.25 * (a - c) ** 2 + b * b)
    return float(max(0.0, -lam_min.min()))
