"""
Finite-difference application of the Hamiltonian and its integrals of motion.

Every second-order operator is stored as a short list of
``(coefficient, derivative)`` terms, where ``derivative`` is ``()``, ``(i,)``
or ``(i, j)`` over zero-based axes.  The quartic integral is applied as the
square of the second-order operator ``A_hat`` plus second-order extras, so a
single stencil plan covers everything.

With p_j = -i d/dx_j every operator here has real coefficients, so real
fields map to real fields and no complex arithmetic is needed.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError, FootprintError, SingularMarginError

FIRST = {
    2: np.array([-0.5, 0.0, 0.5]),
    4: np.array([1 / 12, -2 / 3, 0.0, 2 / 3, -1 / 12]),
    6: np.array([-1 / 60, 3 / 20, -3 / 4, 0.0, 3 / 4, -3 / 20, 1 / 60]),
}
SECOND = {
    2: np.array([1.0, -2.0, 1.0]),
    4: np.array([-1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12]),
    6: np.array([1 / 90, -3 / 20, 3 / 2, -49 / 18, 3 / 2, -3 / 20, 1 / 90]),
}


@dataclass(frozen=True)
class GridField:
    """
    Scalar field on a uniform rectangular grid inside the open octant.

    ``invalid`` counts boundary layers (on every face) whose samples are not
    meaningful, e.g. after a stencil has been applied.
    """

    axes: tuple
    samples: np.ndarray
    stencil_order: int = 6
    invalid: int = 0

    def __post_init__(self):
        if self.stencil_order not in FIRST:
            raise DomainError("stencil_order must be 2, 4 or 6")
        if self.samples.shape != tuple(len(a) for a in self.axes):
            raise DomainError("samples do not match the axes")

    @classmethod
    def sample(cls, func, extents, h, stencil_order=6, margin=None):
        """
        Sample ``func(X)`` (X has shape (..., n)) on a uniform grid.

        ``margin`` defaults to 10 h; every lower extent must clear it.
        """
        margin = 10.0 * h if margin is None else margin
        axes = []
        for a, b in extents:
            if a < margin:
                raise SingularMarginError(f"lower extent {a} is within {margin} of a coordinate plane")
            num = int(round((b - a) / h)) + 1
            axes.append(a + h * np.arange(num))
        X = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        return cls(tuple(axes), np.asarray(func(X), dtype=float), stencil_order)

    @property
    def ndim(self):
        return len(self.axes)

    @property
    def spacing(self):
        return tuple(float(a[1] - a[0]) for a in self.axes)

    @property
    def extents(self):
        return tuple((float(a[0]), float(a[-1])) for a in self.axes)

    def coords(self):
        return np.stack(np.meshgrid(*self.axes, indexing="ij"), axis=-1)

    def interior(self, width=None):
        w = self.invalid if width is None else width
        return tuple(slice(w, len(a) - w) for a in self.axes)

    def valid_samples(self, width=None):
        return self.samples[self.interior(width)]


def _stencil(values, axis, weights, h, power):
    r = len(weights) // 2
    n = values.shape[axis]
    if n <= 2 * r:
        raise FootprintError("grid too small for the stencil")
    out = np.zeros_like(values)
    core = [slice(None)] * values.ndim
    core[axis] = slice(r, n - r)
    acc = np.zeros_like(values[tuple(core)])
    for k, wgt in enumerate(weights):
        if wgt == 0.0:
            continue
        sl = [slice(None)] * values.ndim
        sl[axis] = slice(k, n - 2 * r + k)
        acc += wgt * values[tuple(sl)]
    out[tuple(core)] = acc / h ** power
    return out


class _Derivatives:
    """Lazily computed derivatives of one field."""

    def __init__(self, field):
        self.f = field
        self.h = field.spacing
        self.cache = {(): field.samples}

    def __call__(self, key):
        key = tuple(sorted(key))
        if key not in self.cache:
            order = self.f.stencil_order
            if len(key) == 1:
                (i,) = key
                val = _stencil(self.f.samples, i, FIRST[order], self.h[i], 1)
            elif key[0] == key[1]:
                i = key[0]
                val = _stencil(self.f.samples, i, SECOND[order], self.h[i], 2)
            else:
                i, j = key
                val = _stencil(self(((j,))), i, FIRST[order], self.h[i], 1)
            self.cache[key] = val
        return self.cache[key]


def _combine(terms, deriv, shape):
    out = np.zeros(shape)
    for coef, key in terms:
        out += coef * deriv(key)
    return out


def _rotation_terms(X, idx):
    """Terms of -sum_{i<j in idx} (x_i d_j - x_j d_i)^2."""
    terms = []
    for a, i in enumerate(idx):
        for j in idx[a + 1:]:
            xi, xj = X[..., i], X[..., j]
            terms += [(-xi * xi, (j, j)), (-xj * xj, (i, i)), (2.0 * xi * xj, (i, j)),
                      (xi, (i,)), (xj, (j,))]
    return terms


@dataclass(frozen=True)
class DiffOperator:
    """
    Symbolic descriptor of one operator.

    kind is one of ``"H"``, ``"I"`` (index p), ``"J"`` (index q),
    ``"Jquartic"``, ``"A_hat"`` or ``"mulx1"`` (the negative control).
    ``variant="printed"`` reproduces the published coefficients verbatim
    (potential term of I_p/J_q with a minus sign, constant term of the
    quartic integral equal to -(n-1)(n-3)/(4 x_1^2)) for comparison.
    """

    kind: str
    params: object
    index: int = None
    variant: str = "corrected"

    def __post_init__(self):
        n = self.params.n
        if self.kind == "I" and not 0 <= self.index <= n - 2:
            raise DomainError(f"I_p needs 0 <= p <= {n - 2}")
        if self.kind == "J" and not 1 <= self.index <= n - 2:
            raise DomainError(f"J_q needs 1 <= q <= {n - 2}")
        if self.kind not in ("H", "I", "J", "Jquartic", "A_hat", "mulx1"):
            raise DomainError(f"unknown operator kind {self.kind!r}")

    @property
    def name(self):
        if self.kind in ("I", "J"):
            return f"{self.kind}_{self.index}"
        return {"Jquartic": f"J_{self.params.n - 1}(quartic)", "mulx1": "x_1"}.get(self.kind, self.kind)

    @property
    def footprint(self):
        """Number of stencil applications stacked along any axis."""
        return 2 if self.kind == "Jquartic" else (0 if self.kind == "mulx1" else 1)

    def terms(self, X):
        """Coefficient/derivative list of a second-order operator at points X."""
        p = self.params
        n = p.n
        beta = p.beta
        r = np.sqrt(np.sum(X * X, axis=-1))
        if self.kind == "H":
            pot = -p.gamma / r + sum(beta[i] / (2.0 * X[..., i] ** 2) for i in range(n))
            return [(-0.5, (i, i)) for i in range(n)] + [(pot, ())]
        if self.kind in ("I", "J"):
            idx = list(range(n - self.index)) if self.kind == "I" else list(range(self.index, n))
            sign = -1.0 if self.variant == "printed" else 1.0
            rho2 = sum(X[..., i] ** 2 for i in idx)
            pot = sign * rho2 * sum(beta[i] / X[..., i] ** 2 for i in idx)
            return _rotation_terms(X, idx) + [(pot, ())]
        if self.kind == "A_hat":
            x1 = X[..., 0]
            terms = [(-0.5 * (n - 1), (0,))]
            for j in range(1, n):
                terms += [(-X[..., j], (0, j)), (x1, (j, j))]
            pot = p.gamma * x1 / r - x1 * sum(beta[i] / X[..., i] ** 2 for i in range(n))
            return terms + [(pot, ())]
        if self.kind == "Jquartic":
            # kappa_1(kappa_1+1) (p.x) x_1^-2 (x.p) + const / x_1^2
            x1sq = X[..., 0] ** 2
            b1 = beta[0]
            terms = [(-b1 * (n - 1) * X[..., j] / x1sq, (j,)) for j in range(n)]
            for j in range(n):
                for k in range(n):
                    terms.append((-b1 * X[..., j] * X[..., k] / x1sq, (j, k)))
            return terms + [(self.quartic_constant() / x1sq, ())]
        if self.kind == "mulx1":
            return [(X[..., 0], ())]
        raise DomainError(self.kind)

    def quartic_constant(self):
        """Coefficient c of the c / x_1^2 term in the quartic integral."""
        n = self.params.n
        if self.variant == "printed":
            return -(n - 1) * (n - 3) / 4.0
        return -(n - 1) * (n - 3) * self.params.beta[0] / 4.0


def _apply_terms(op, f):
    X = f.coords()
    out = _combine(op.terms(X), _Derivatives(f), f.samples.shape)
    grow = 0 if op.kind == "mulx1" else len(FIRST[f.stencil_order]) // 2
    return replace(f, samples=out, invalid=f.invalid + grow)


def apply(op, f):
    """Apply ``op`` to a grid field; the invalid boundary layer grows accordingly."""
    reach = len(FIRST[f.stencil_order]) // 2
    need = f.invalid + op.footprint * reach
    if any(2 * need >= len(a) for a in f.axes):
        raise FootprintError(f"{op.name} needs more than {len(f.axes[0])} points per axis")
    if op.kind != "Jquartic":
        return _apply_terms(op, f)
    a_hat = DiffOperator("A_hat", op.params, variant=op.variant)
    sq = _apply_terms(a_hat, _apply_terms(a_hat, f))
    extra = _apply_terms(op, f)
    return replace(sq, samples=sq.samples + extra.samples)


def commutator_residual(op_a, op_b, f):
    """||A(Bf) - B(Af)||_2 / ||A(Bf)||_2 on the common valid interior."""
    ab = apply(op_a, apply(op_b, f))
    ba = apply(op_b, apply(op_a, f))
    w = max(ab.invalid, ba.invalid)
    x, y = ab.valid_samples(w), ba.valid_samples(w)
    den = np.linalg.norm(x)
    if den == 0.0:
        return 0.0 if np.linalg.norm(y) == 0.0 else np.inf
    return float(np.linalg.norm(x - y) / den)


def suite(params, variant="corrected"):
    """H, I_0..I_{n-2}, J_1..J_{n-2}, quartic J_{n-1}: 2n - 1 operators."""
    n = params.n
    if n < 2:
        raise DomainError("the operator suite needs n >= 2 (n = 1 has only H)")
    ops = [DiffOperator("H", params)]
    ops += [DiffOperator("I", params, p, variant) for p in range(n - 1)]
    ops += [DiffOperator("J", params, q, variant) for q in range(1, n - 1)]
    ops.append(DiffOperator("Jquartic", params, variant=variant))
    return ops


def bump_field(params, center, width):
    """Gaussian bump times prod x_i^(kappa_i + 1), as a callable of X (..., n)."""
    center = np.asarray(center, dtype=float)

    def func(X):
        d2 = np.sum((X - center) ** 2, axis=-1)
        out = np.exp(-0.5 * d2 / width ** 2)
        for i, k in enumerate(params.kappa):
            out = out * X[..., i] ** (k + 1)
        return out

    return func


@dataclass
class RefinementStudy:
    """Residuals of one commutator over a sequence of grid spacings."""

    name: str
    order: int
    spacings: list
    residuals: list = field(default_factory=list)

    @property
    def observed_orders(self):
        out = []
        for (h0, r0), (h1, r1) in zip(zip(self.spacings, self.residuals),
                                      zip(self.spacings[1:], self.residuals[1:])):
            out.append(float(np.log(r0 / r1) / np.log(h0 / h1)) if r0 > 0 and r1 > 0 else np.inf)
        return out


def refinement_study(op_a, op_b, func, extents, spacings, order, margin=None):
    study = RefinementStudy(f"[{op_a.name}, {op_b.name}]", order, list(spacings))
    for h in spacings:
        f = GridField.sample(func, extents, h, order, margin)
        study.residuals.append(commutator_residual(op_a, op_b, f))
    return study


def eigen_residual(op, f, eigenvalue):
    """||op f - lambda f||_inf / ||f||_inf on the valid interior of op f."""
    g = apply(op, f)
    inner = g.valid_samples()
    ref = f.valid_samples(g.invalid)
    return float(np.max(np.abs(inner - eigenvalue * ref)) / np.max(np.abs(ref)))
