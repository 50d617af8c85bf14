"""
Model parameters and the quantum-number lattice of the subgroup chain.

Angular labels follow the polyspherical map used throughout the package::

    x_1 = r sin(t_{n-1}) ... sin(t_2) sin(t_1)
    x_2 = r sin(t_{n-1}) ... sin(t_2) cos(t_1)
    ...
    x_n = r cos(t_{n-1})

``m_p`` (with ``m_0 = l``) is the angular momentum carried by the first
``n - p`` coordinates, so going from ``m_{i-1}`` to ``m_i`` strips off
coordinate ``x_{n+1-i}`` together with its barrier ``kappa_{n+1-i}``.
"""

from dataclasses import dataclass, field

from .errors import DomainError, EmptySpectrumError


@dataclass(frozen=True)
class ModelParams:
    """One Coulomb-Rosochatius system: dimension, Coulomb strength, barriers."""

    n: int
    gamma: float
    kappa: tuple
    sigma: tuple = field(default=None)

    def __post_init__(self):
        kappa = tuple(int(k) for k in self.kappa)
        sigma = (0,) * len(kappa) if self.sigma is None else tuple(int(s) for s in self.sigma)
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "sigma", sigma)
        if self.n < 1:
            raise DomainError("dimension n must be >= 1")
        if len(kappa) != self.n or len(sigma) != self.n:
            raise DomainError(f"need {self.n} kappa and sigma values")
        if any(k < 0 for k in kappa):
            raise DomainError("kappa values must be nonnegative integers")
        if any(abs(s) > k for s, k in zip(sigma, kappa)):
            raise DomainError("need |sigma_i| <= kappa_i")
        if not self.gamma > 0:
            raise DomainError("Coulomb strength gamma must be positive")

    @property
    def beta(self):
        """Barrier strengths kappa_i (kappa_i + 1)."""
        return tuple(k * (k + 1) for k in self.kappa)

    @property
    def kappa_sum(self):
        return sum(self.kappa)

    def as_dict(self):
        return {"n": self.n, "gamma": self.gamma, "kappa": list(self.kappa), "sigma": list(self.sigma)}


@dataclass(frozen=True, order=True)
class BoundLabels:
    """Quantum numbers (j, l, m_1..m_{n-2}) of one bound basis state."""

    j: int
    l: int
    m: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "m", tuple(int(v) for v in self.m))

    def chain(self):
        """(m_0, m_1, ..., m_{n-2}) with m_0 = l."""
        return (self.l,) + self.m

    def as_dict(self):
        return {"j": self.j, "l": self.l, "m": list(self.m)}


def stripped_kappa(params, i):
    """Barrier removed at chain step i (1-based), i.e. kappa_{n+1-i}."""
    return params.kappa[params.n - i]


def _even_nonneg(v):
    return v >= 0 and v % 2 == 0


def validate(params, labels):
    """Return every violated branching rule; an empty list means valid."""
    n = params.n
    out = []
    if labels.j < 0 or labels.l < 0:
        out.append("j and l must be nonnegative")
    if labels.j - labels.l < 0:
        out.append(f"j - l = {labels.j - labels.l} < 0")
    if n == 1:
        if labels.l != params.kappa[0]:
            out.append(f"n = 1 requires l = kappa_1 = {params.kappa[0]}")
        if labels.m:
            out.append("n = 1 takes no m labels")
        return out
    want = max(n - 2, 0)
    if len(labels.m) != want:
        out.append(f"expected {want} m labels, got {len(labels.m)}")
        return out
    chain = labels.chain()
    for i in range(1, n - 1):
        d = chain[i - 1] - chain[i] - stripped_kappa(params, i)
        if not _even_nonneg(d):
            kind = "negative" if d < 0 else "odd"
            out.append(f"m_{i - 1} - m_{i} - kappa_{n + 1 - i} = {d} is {kind}")
    d = chain[-1] - params.kappa[0] - params.kappa[1]
    if not _even_nonneg(d):
        kind = "negative" if d < 0 else "odd"
        top = "l" if n == 2 else f"m_{n - 2}"
        out.append(f"{top} - kappa_1 - kappa_2 = {d} is {kind}")
    return out


def _chains(params, top, step):
    """All (m_step, ..., m_{n-2}) compatible with m_{step-1} = top."""
    n = params.n
    if step > n - 2:
        d = top - params.kappa[0] - params.kappa[1]
        return [()] if _even_nonneg(d) else []
    # remaining coordinates x_1..x_{n-step} need at least this much
    floor = sum(params.kappa[: n - step])
    out = []
    m = top - stripped_kappa(params, step)
    while m >= floor:
        out.extend((m,) + rest for rest in _chains(params, m, step + 1))
        m -= 2
    return out


def enumerate_states(params, j):
    """All valid labels at principal label j, in lexicographic (l, m) order."""
    if j < params.kappa_sum:
        raise EmptySpectrumError(f"j = {j} is below sum(kappa) = {params.kappa_sum}")
    if params.n == 1:
        return [BoundLabels(j, params.kappa[0])]
    states = []
    for l in range(params.kappa_sum, j + 1, 2):
        states.extend(BoundLabels(j, l, m) for m in _chains(params, l, 1))
    return sorted(states)


def potential_strength(q, k):
    """Barrier strength tied to the SO(q) Casimir label k."""
    if q < 2:
        raise DomainError("q must be >= 2")
    return (k + (q - 2) / 2.0) ** 2 - 0.25
