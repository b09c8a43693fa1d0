"""Filtered algebras of time-weighted elements and pure-state extension.

An element of degree n is stored as a bounded part a0 together with n, and
stands for a = (1+T^2)^{n/2} a0 with T the time coordinate.  Degrees add
under multiplication; the time element itself has degree 1 with bounded part
t/sqrt(1+t^2), whose natural weighted norm ||T||_{-1} = sup |t|/sqrt(1+t^2)
is < 1.  Weighted norms and inner products:

    ||a||_m           = sup_x |(1+t^2)^{m/2} a(x)|
    <psi, phi>_n      = quadrature of conj(psi) phi (1+t^2)^n

The natural finite norm of a degree-n element is m = -n.  Multiplication by a
degree-n element maps H_k -> H_{k-n} boundedly with operator norm equal to
the weighted sup norm, independent of k; the maximizer is a spinor
concentrated at the achieving site, which makes the k-independence exact to
rounding.

Pure states extend from the bounded level by

    chi(a) = chi((1+T^2)^{-1/2})^{-n} chi(a0),

rejecting states with chi((1+T^2)^{-1/2}) = 0.  For an evaluation state at a
point p this is literally (1+t_p^2)^{n/2} a0(p).  The noncommutative side is
exercised on the toy algebra C^K (x) M2 (block matrices over K sites with
fixed t-values), where T is central by construction and chi(ab) =
chi(a) chi(b) holds for central a and any pure state.
"""

from dataclasses import dataclass, field

import numpy as np

from . import expressions
from .lattice import Lattice, ScalarField, SpinorField, inner_product

SUBMULT_TOL = 1e-12          # relative
NORM_SPREAD_TOL = 1e-10      # relative, across H_n, n in -2..2
WELL_DEFINED_TOL = 1e-12
CENTRAL_TOL = 1e-13
STATE_WEIGHT_FLOOR = 1e-300


# --------------------------------------------------------------- elements


@dataclass(frozen=True)
class FilteredElement:
    """a = (1+T^2)^{degree/2} * bounded_part."""

    degree: int
    bounded_part: object          # callable(**coords) -> ndarray
    label: str = ""

    @classmethod
    def from_expression(cls, text, degree, label=None):
        _, fn = expressions.compile_expression(text)
        return cls(degree, fn, label if label is not None else text)

    @classmethod
    def time_element(cls):
        return cls(1, lambda **c: c["t"] / np.sqrt(1.0 + c["t"] ** 2), "T")

    def bounded_values(self, lattice: Lattice):
        vals = self.bounded_part(**lattice.environment())
        return np.broadcast_to(np.asarray(vals), lattice.shape)

    def sample(self, lattice: Lattice) -> ScalarField:
        t = lattice.coordinate_array(0)
        vals = (1.0 + t ** 2) ** (self.degree / 2.0) * self.bounded_values(lattice)
        return ScalarField(lattice, np.array(vals))

    def value_at(self, point, axis_names=None):
        names = axis_names if axis_names is not None else ("t", "x", "y", "z")[: len(point)]
        env = {name: np.asarray(float(v)) for name, v in zip(names, point)}
        t = float(point[0])
        return complex((1.0 + t ** 2) ** (self.degree / 2.0)
                       * complex(np.asarray(self.bounded_part(**env))))

    def multiply(self, other):
        """Degrees add; bounded parts multiply."""
        a0, b0 = self.bounded_part, other.bounded_part
        return FilteredElement(
            self.degree + other.degree,
            lambda **c: np.asarray(a0(**c)) * np.asarray(b0(**c)),
            label="(%s)*(%s)" % (self.label, other.label),
        )

    def to_degree(self, new_degree):
        """Re-express the same function at a different declared degree."""
        shift = (self.degree - new_degree) / 2.0
        a0 = self.bounded_part
        return FilteredElement(
            new_degree,
            lambda **c: (1.0 + c["t"] ** 2) ** shift * np.asarray(a0(**c)),
            label=self.label,
        )


def weighted_norm(elem: FilteredElement, m, lattice: Lattice):
    """sup over sites of |(1+t^2)^{m/2} a(x)|."""
    t = lattice.coordinate_array(0)
    a = elem.sample(lattice).values
    return float(np.max(np.abs((1.0 + t ** 2) ** (m / 2.0) * a)))


def weighted_inner_product(psi, phi, n):
    """<psi, phi>_n with the (1+t^2)^n time weight."""
    t = psi.lattice.coordinate_array(0)
    return inner_product(psi, phi, weight=(1.0 + t ** 2) ** float(n))


def growth_fit(elem: FilteredElement, lattice: Lattice):
    """Least-squares exponent of |a| against sqrt(1+t^2); diagnostic only.

    Returns (fitted_degree, suspicious) where suspicious flags a fitted
    exponent more than 1.5 away from the declared degree.
    """
    t = lattice.axis_coordinates(0)
    a = elem.sample(lattice).values
    # reduce over spatial axes: max |a| per time slice
    mag = np.abs(a).reshape(len(t), -1).max(axis=1)
    keep = mag > 0
    if keep.sum() < 2:
        return float(elem.degree), False
    x = 0.5 * np.log1p(t[keep] ** 2)
    y = np.log(mag[keep])
    slope = float(np.polyfit(x, y, 1)[0])
    return slope, bool(abs(slope - elem.degree) > 1.5)


def submultiplicativity_residual(a, b, lattice, m_a=None, m_b=None):
    """Relative slack of ||ab||_{ma+mb} <= ||a||_ma ||b||_mb (negative = holds)."""
    if m_a is None:
        m_a = -a.degree
    if m_b is None:
        m_b = -b.degree
    prod = a.multiply(b)
    lhs = weighted_norm(prod, m_a + m_b, lattice)
    rhs = weighted_norm(a, m_a, lattice) * weighted_norm(b, m_b, lattice)
    scale = max(rhs, 1e-30)
    return (lhs - rhs) / scale


# ------------------------------------------------------ operator-norm grading


@dataclass
class GradingReport:
    weighted_norm: float
    estimates: dict                 # n -> operator norm estimate on H_n
    spread: float                   # relative spread of estimates across n
    bound_ok: bool
    approach_ok: bool               # estimates within 5% of the sup norm

    def to_dict(self):
        return {
            "weighted_norm": self.weighted_norm,
            "estimates": {str(k): v for k, v in self.estimates.items()},
            "spread": self.spread,
            "bound_ok": self.bound_ok,
            "approach_ok": self.approach_ok,
        }


def operator_norm_grading_check(elem: FilteredElement, lattice: Lattice,
                                trials=16, seed=0, n_values=(-2, -1, 0, 1, 2),
                                m=None, spinor_dim=2):
    """Multiplication by `elem` as an operator H_n -> H_{n+m}, m = -degree.

    The estimate on each H_n is the max Rayleigh ratio over random spinors
    plus the site-delta at the achieving site of |(1+t^2)^{m/2} a|; it must
    stay below the weighted sup norm (within rounding) and reach it, and be
    independent of n.
    """
    if m is None:
        m = -elem.degree
    t = lattice.coordinate_array(0)
    a = elem.sample(lattice).values
    sup = weighted_norm(elem, m, lattice)
    target = np.abs((1.0 + t ** 2) ** (m / 2.0) * a)
    best_site = np.unravel_index(int(np.argmax(target)), lattice.shape)

    rng = np.random.default_rng(seed)
    estimates = {}
    for n in n_values:
        wn = (1.0 + t ** 2) ** float(n)
        wnm = (1.0 + t ** 2) ** float(n + m)
        best = 0.0
        for k in range(trials + 1):
            if k == 0:
                vals = np.zeros(lattice.shape + (spinor_dim,), dtype=complex)
                vals[best_site + (0,)] = 1.0        # delta at the maximizer
            else:
                vals = rng.standard_normal(lattice.shape + (spinor_dim,)) \
                    + 1j * rng.standard_normal(lattice.shape + (spinor_dim,))
            phi = SpinorField(lattice, vals)
            aphi = SpinorField(lattice, a[..., None] * vals)
            num = inner_product(aphi, aphi, weight=wnm).real
            den = inner_product(phi, phi, weight=wn).real
            best = max(best, np.sqrt(num / den))
        estimates[int(n)] = float(best)
    vals = np.array(list(estimates.values()))
    spread = float((vals.max() - vals.min()) / max(vals.max(), 1e-300))
    return GradingReport(
        weighted_norm=sup,
        estimates=estimates,
        spread=spread,
        bound_ok=bool(np.all(vals <= sup * (1.0 + 1e-12))),
        approach_ok=bool(vals.min() >= 0.95 * sup),
    )


# ------------------------------------------------------------ state extension


@dataclass(frozen=True)
class EvaluationState:
    """Pure state = evaluation at a spacetime point."""

    point: tuple

    def weight_value(self):
        """chi((1+T^2)^{-1/2})."""
        t = float(self.point[0])
        return (1.0 + t * t) ** -0.5


def extend_state(state, elem: FilteredElement):
    """chi(a) = chi((1+T^2)^{-1/2})^{-degree} * chi(a0).

    For evaluation states this is the literal value (1+t_p^2)^{deg/2} a0(p).
    States with vanishing chi((1+T^2)^{-1/2}) are rejected.
    """
    if isinstance(state, (tuple, list, np.ndarray)):
        state = EvaluationState(tuple(float(v) for v in state))
    w = state.weight_value()
    if not np.isfinite(w) or abs(w) < STATE_WEIGHT_FLOOR:
        raise ValueError("state has chi((1+T^2)^{-1/2}) = 0; extension "
                         "undefined (state must be ignored)")
    names = ("t", "x", "y", "z")[: len(state.point)]
    env = {nm: np.asarray(v) for nm, v in zip(names, state.point)}
    chi_a0 = complex(np.asarray(elem.bounded_part(**env)))
    return w ** (-elem.degree) * chi_a0


def well_definedness_check(elem_a, elem_b, lattice, states, tol_fun=1e-9):
    """Two decompositions of the same function must extend identically.

    Raises if the decompositions do not agree as functions on the lattice;
    otherwise returns the max extension residual over the state panel.
    """
    va = elem_a.sample(lattice).values
    vb = elem_b.sample(lattice).values
    scale = max(float(np.max(np.abs(va))), 1e-30)
    fun_dev = float(np.max(np.abs(va - vb)))
    if fun_dev > tol_fun * scale:
        raise ValueError("decompositions differ as functions "
                         "(max deviation %.3e)" % fun_dev)
    resid = 0.0
    for st in states:
        resid = max(resid, abs(extend_state(st, elem_a) - extend_state(st, elem_b)))
    return resid


# ----------------------------------------------------------------- toy algebra


@dataclass(frozen=True)
class ToyAlgebra:
    """C^K (x) M2: block-diagonal 2x2 matrices over K sites with t-values."""

    t_values: tuple

    @property
    def sites(self):
        return len(self.t_values)

    def time_element(self):
        out = np.zeros((self.sites, 2, 2), dtype=complex)
        for k, t in enumerate(self.t_values):
            out[k] = t * np.eye(2)
        return out

    def central_element(self, fiber_values):
        out = np.zeros((self.sites, 2, 2), dtype=complex)
        for k, c in enumerate(fiber_values):
            out[k] = c * np.eye(2)
        return out

    def random_element(self, rng):
        return (rng.standard_normal((self.sites, 2, 2))
                + 1j * rng.standard_normal((self.sites, 2, 2)))


@dataclass(frozen=True)
class ToyState:
    """Pure state of C^K (x) M2: a site and a unit vector in C^2."""

    site: int
    vector: tuple

    def __call__(self, element):
        v = np.asarray(self.vector, dtype=complex)
        return complex(v.conj() @ np.asarray(element)[self.site] @ v)


@dataclass(frozen=True)
class ToyFilteredElement:
    degree: int
    bounded_blocks: np.ndarray      # (K, 2, 2)


def extend_toy_state(state: ToyState, elem: ToyFilteredElement, algebra: ToyAlgebra):
    """chi(a) = chi((1+T^2)^{-1/2})^{-n} chi(a0) on the toy algebra."""
    t = float(algebra.t_values[state.site])
    w = (1.0 + t * t) ** -0.5
    if not np.isfinite(w) or abs(w) < STATE_WEIGHT_FLOOR:
        raise ValueError("state has chi((1+T^2)^{-1/2}) = 0; extension "
                         "undefined (state must be ignored)")
    return w ** (-elem.degree) * state(elem.bounded_blocks)


def random_toy_state(algebra, rng):
    site = int(rng.integers(algebra.sites))
    v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    v = v / np.linalg.norm(v)
    return ToyState(site, tuple(v))


@dataclass
class CentralityReport:
    trials: int
    max_central_residual: float
    counterexample_residual: float   # observed violation for non-central a
    counterexample: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "trials": self.trials,
            "max_central_residual": self.max_central_residual,
            "counterexample_residual": self.counterexample_residual,
            "counterexample": dict(self.counterexample),
        }


def central_multiplicativity_check(algebra: ToyAlgebra, trials=500, seed=0):
    """chi(ab) = chi(a) chi(b) over random central a, random b, random states.

    Also records the documented non-central counterexample (a = sigma3 fiber,
    b = sigma1, angled state), which must violate multiplicativity.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        c = rng.standard_normal(algebra.sites) + 1j * rng.standard_normal(algebra.sites)
        a = algebra.central_element(c)
        b = algebra.random_element(rng)
        chi = random_toy_state(algebra, rng)
        ab = np.einsum("kij,kjl->kil", a, b)
        worst = max(worst, abs(chi(ab) - chi(a) * chi(b)))

    # explicit non-central witness
    sigma3 = np.array([[1, 0], [0, -1]], dtype=complex)
    sigma1 = np.array([[0, 1], [1, 0]], dtype=complex)
    a = np.zeros((algebra.sites, 2, 2), dtype=complex)
    b = np.zeros((algebra.sites, 2, 2), dtype=complex)
    a[:] = sigma3
    b[:] = sigma1
    alpha = np.pi / 8.0
    chi = ToyState(0, (np.cos(alpha), np.sin(alpha)))
    ab = np.einsum("kij,kjl->kil", a, b)
    violation = abs(chi(ab) - chi(a) * chi(b))
    return CentralityReport(
        trials=trials,
        max_central_residual=worst,
        counterexample_residual=float(violation),
        counterexample={
            "a": "sigma3 fiber (non-central)",
            "b": "sigma1 fiber",
            "state": "site 0, vector (cos pi/8, sin pi/8)",
            "chi_ab": 0.0,
            "chi_a_chi_b": float((np.cos(2 * alpha) * np.sin(2 * alpha)).real),
        },
    )
