"""Node-valued fields and the closed-form field vocabulary.

A :class:`ScalarField` is one real value per node of a fixed manifold; it is
the carrier for solutions, potentials, and residuals.  Construction helpers
implement the small closed-form vocabulary used by run configs:
``const``, ``coscomb``, ``gauss``, ``sqnorm``, ``random``, and tabulated
1D profiles.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import FieldMismatchError, ValidationError

_PERIODIC_TOL = 1e-8


@dataclass(frozen=True)
class ScalarField:
    """Real values on the nodes of one manifold, immutable after creation."""

    manifold: object
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float, copy=True)
        if vals.ndim != 1 or vals.shape[0] != self.manifold.num_nodes:
            raise FieldMismatchError(
                "field has %s values, manifold has %d nodes"
                % (vals.shape, self.manifold.num_nodes)
            )
        if not np.all(np.isfinite(vals)):
            raise ValidationError("field contains non-finite entries")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def bound_to(self, manifold) -> bool:
        return self.manifold is manifold


@dataclass(frozen=True)
class TensorField:
    """Per-node symmetric d x d matrices in the local orthonormal frame."""

    manifold: object
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float, copy=True)
        d = self.manifold.dim
        if vals.shape != (self.manifold.num_nodes, d, d):
            raise FieldMismatchError(
                "tensor shape %s does not match (%d, %d, %d)"
                % (vals.shape, self.manifold.num_nodes, d, d)
            )
        if not np.array_equal(vals, np.swapaxes(vals, 1, 2)):
            raise ValidationError("tensor entries are not exactly symmetric")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


def require_bound(manifold, *fields):
    """Raise FieldMismatchError unless every field is bound to `manifold`."""
    for f in fields:
        if not isinstance(f, ScalarField) or not f.bound_to(manifold):
            raise FieldMismatchError("field is not bound to this manifold")


def constant_field(manifold, value: float) -> ScalarField:
    return ScalarField(manifold, np.full(manifold.num_nodes, float(value)))


def _axis_coordinate(manifold):
    # The 1D vocabulary acts on the first coordinate of the node positions.
    return manifold.coords[:, 0]


def _check_wavenumber_periodic(k: float, length: float):
    cycles = k * length / (2.0 * np.pi)
    if abs(cycles - round(cycles)) > _PERIODIC_TOL:
        raise ValidationError(
            "cos(%g x) is not periodic on a closed geometry of extent %g" % (k, length)
        )


def coscomb_field(manifold, a0: float, *pairs: float) -> ScalarField:
    """a0 + sum_i a_i cos(k_i x) along the first coordinate.

    `pairs` is a flat (a_1, k_1, a_2, k_2, ...) sequence.  On periodic
    geometries every wavenumber must fit the extent exactly.
    """
    if len(pairs) % 2 != 0:
        raise ValidationError("coscomb expects amplitude/wavenumber pairs")
    x = _axis_coordinate(manifold)
    vals = np.full(manifold.num_nodes, float(a0))
    for amp, k in zip(pairs[0::2], pairs[1::2]):
        if manifold.periodic_axes[0]:
            _check_wavenumber_periodic(float(k), manifold.spec.extent[0])
        vals = vals + float(amp) * np.cos(float(k) * x)
    return ScalarField(manifold, vals)


def gaussian_field(manifold, amp: float, center: float, width: float,
                   baseline: float = 0.0) -> ScalarField:
    """Gaussian bump of height `amp` on a flat `baseline`.

    The same center is used on every axis.  On periodic axes the distance
    wraps around, which keeps the closed form single valued on the circle
    and torus.
    """
    if width <= 0:
        raise ValidationError("gauss width must be positive")
    d2 = np.zeros(manifold.num_nodes)
    for axis in range(manifold.coords.shape[1]):
        d = np.abs(manifold.coords[:, axis] - float(center))
        if manifold.periodic_axes[min(axis, len(manifold.periodic_axes) - 1)]:
            length = manifold.spec.extent[min(axis, len(manifold.spec.extent) - 1)]
            d = np.minimum(d, length - d)
        d2 += d * d
    vals = float(baseline) + float(amp) * np.exp(-d2 / (2.0 * float(width) ** 2))
    return ScalarField(manifold, vals)


def sqnorm_field(manifold, scale: float = 1.0) -> ScalarField:
    """scale * |x|^2 / 2; rejected on closed geometries (not periodic)."""
    if any(manifold.periodic_axes):
        raise ValidationError("sqnorm potential is not periodic; use it on bounded domains")
    vals = 0.5 * float(scale) * np.sum(manifold.coords ** 2, axis=1)
    return ScalarField(manifold, vals)


def random_smooth_field(manifold, seed: int, sup: float, lo_frac: float = 0.2,
                        modes: int = 4) -> ScalarField:
    """Seeded random smooth positive field rescaled so max equals `sup`.

    Coefficients depend only on the seed, never on the resolution, so the
    same seed describes the same underlying smooth function across
    refinements.  Bounded geometries get pure cosine series (zero normal
    derivative at the walls); periodic ones get full Fourier combinations.
    """
    if sup <= 0:
        raise ValidationError("random field sup target must be positive")
    rng = np.random.default_rng(int(seed))
    vals = np.ones(manifold.num_nodes)
    if manifold.dim == 1:
        x = manifold.coords[:, 0]
        length = manifold.spec.extent[0]
        for k in range(1, modes + 1):
            a, b = rng.normal(size=2) / (k * k)
            if manifold.periodic_axes[0]:
                vals = vals + 0.3 * (a * np.cos(k * x) + b * np.sin(k * x))
            else:
                vals = vals + 0.3 * a * np.cos(k * np.pi * x / length)
    else:
        x = manifold.coords[:, 0]
        y = manifold.coords[:, 1]
        lx = manifold.spec.extent[0]
        ly = manifold.spec.extent[min(1, len(manifold.spec.extent) - 1)]
        for k in range(0, modes):
            for m in range(0, modes):
                if k == 0 and m == 0:
                    continue
                c = rng.normal() / (1.0 + k * k + m * m)
                if manifold.periodic_axes[0]:
                    s = rng.normal() / (1.0 + k * k + m * m)
                    vals = vals + 0.3 * (c * np.cos(k * x) * np.cos(m * y)
                                         + s * np.sin(k * x) * np.sin(m * y))
                else:
                    vals = vals + 0.3 * c * np.cos(k * np.pi * x / lx) * np.cos(m * np.pi * y / ly)
    lo = lo_frac * float(sup)
    span = vals.max() - vals.min()
    if span < 1e-14:
        return constant_field(manifold, sup)
    vals = lo + (vals - vals.min()) * (float(sup) - lo) / span
    return ScalarField(manifold, vals)


def tabulated_field(manifold, xs, values) -> ScalarField:
    """Interpolate an (x, value) table onto a 1D manifold's nodes.

    On the circle the table must cover one full period and close up: the
    values at x=0 and x=extent have to agree within 1e-8 of the value
    scale, otherwise the profile is rejected as non-periodic.
    """
    if manifold.dim != 1:
        raise ValidationError("tabulated fields are supported on 1D geometries only")
    xs = np.asarray(xs, dtype=float)
    values = np.asarray(values, dtype=float)
    if xs.ndim != 1 or xs.shape != values.shape or xs.size < 2:
        raise ValidationError("tabulated field needs matching 1D x/value columns")
    if np.any(np.diff(xs) <= 0):
        raise ValidationError("tabulated x column must be strictly increasing")
    length = manifold.spec.extent[0]
    if manifold.periodic_axes[0]:
        scale = max(np.max(np.abs(values)), 1.0)
        if abs(xs[0] - 0.0) > _PERIODIC_TOL or abs(xs[-1] - length) > _PERIODIC_TOL * max(length, 1.0):
            raise ValidationError("tabulated profile on a circle must span [0, extent]")
        if abs(values[0] - values[-1]) > _PERIODIC_TOL * scale:
            raise ValidationError(
                "tabulated profile is not periodic: endpoint values differ by %g"
                % abs(values[0] - values[-1])
            )
    x_nodes = manifold.coords[:, 0]
    vals = np.interp(x_nodes, xs, values)
    return ScalarField(manifold, vals)


def parse_field_text(manifold, text: str) -> ScalarField:
    """Build a field from the run-config vocabulary, e.g. 'coscomb 0 1 1'."""
    parts = text.split()
    if not parts:
        raise ValidationError("empty field description")
    name, args = parts[0], parts[1:]

    def _floats(expected=None):
        try:
            vals = [_parse_number(a) for a in args]
        except ValueError:
            raise ValidationError("bad numeric argument in field '%s'" % text)
        if expected is not None and len(vals) not in expected:
            raise ValidationError("field '%s' takes %s arguments" % (name, expected))
        return vals

    if name == "const":
        (c,) = _floats({1})
        return constant_field(manifold, c)
    if name == "coscomb":
        vals = _floats()
        if not vals:
            raise ValidationError("coscomb needs at least a constant term")
        return coscomb_field(manifold, vals[0], *vals[1:])
    if name == "gauss":
        vals = _floats({3, 4})
        return gaussian_field(manifold, *vals)
    if name == "sqnorm":
        vals = _floats({0, 1})
        return sqnorm_field(manifold, vals[0] if vals else 1.0)
    if name == "random":
        vals = _floats({2})
        seed = int(vals[0])
        if seed != vals[0]:
            raise ValidationError("random seed must be an integer")
        return random_smooth_field(manifold, seed, vals[1])
    if name == "file":
        if len(args) != 1:
            raise ValidationError("file field takes exactly one path")
        xs, values = _load_table(args[0])
        return tabulated_field(manifold, xs, values)
    raise ValidationError("unknown field form '%s'" % name)


def _parse_number(token: str) -> float:
    t = token.strip().lower()
    if t == "pi":
        return float(np.pi)
    if t == "2pi":
        return float(2.0 * np.pi)
    return float(t)


def _load_table(path):
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            cols = line.replace(",", " ").split()
            if len(cols) != 2:
                raise ValidationError("tabulated field rows must be 'x,value'")
            try:
                rows.append((float(cols[0]), float(cols[1])))
            except ValueError:
                raise ValidationError("bad number in tabulated field row '%s'" % line)
    if not rows:
        raise ValidationError("tabulated field file is empty")
    arr = np.array(rows, dtype=float)
    return arr[:, 0], arr[:, 1]
