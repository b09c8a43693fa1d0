"""Gamma-matrix representations for signature (-,+,...,+).

Conventions, fixed once and used everywhere downstream:

* anticommutators  {gamma^mu, gamma^nu} = 2 g^{mu nu} 1  with
  g = diag(-1,+1,...,+1);
* gamma^0 is anti-Hermitian with (gamma^0)^2 = -1, the spatial gamma^i are
  Hermitian with (gamma^i)^2 = +1;
* fundamental symmetry J = i gamma^0 (Hermitian, J^2 = 1), Krein adjoint
  A+ = J A* J;
* chirality (even n only)  gamma_ch = (-i)^{n/2+1} gamma^0 ... gamma^{n-1},
  Hermitian, squares to 1, anticommutes with every gamma^mu.

The construction is the usual tensor-product ladder: Hermitian Euclidean
generators G_1..G_n built from sigma1/sigma2 with sigma3 prefixes, then
gamma^0 = i G_1.  Matrix size is 2^floor(n/2).  Everything is deterministic.

Residuals on matrix identities are entrywise max-abs norms.
"""

from dataclasses import dataclass, field

import numpy as np

SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)

HERMITICITY_TOL = 1e-12
CLIFFORD_TOL = 1e-12
KREIN_TOL = 1e-14


def _kron_chain(mats):
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def max_abs(m):
    """Entrywise max-abs norm used for all identity residuals."""
    return float(np.abs(m).max())


@dataclass(frozen=True)
class GammaRep:
    """An n-tuple of gamma matrices with the metric signs they should square to."""

    dimension: int
    matrices: tuple
    metric_signs: tuple  # +-1 per index; canonical reps use (-1, 1, ..., 1)

    @property
    def matrix_size(self):
        return self.matrices[0].shape[0]

    def conjugated(self, unitary):
        """Return the rep with every matrix replaced by U g U^dagger."""
        u = np.asarray(unitary, dtype=complex)
        mats = tuple(u @ g @ u.conj().T for g in self.matrices)
        return GammaRep(self.dimension, mats, self.metric_signs)


def _euclidean_generators(n):
    m = n // 2
    gens = []
    for k in range(1, m + 1):
        prefix = [SIGMA3] * (k - 1)
        suffix = [np.eye(2, dtype=complex)] * (m - k)
        gens.append(_kron_chain(prefix + [SIGMA1] + suffix))
        gens.append(_kron_chain(prefix + [SIGMA2] + suffix))
    if n % 2 == 1:
        gens.append(_kron_chain([SIGMA3] * m))
    return gens[:n]


def build_gamma(n):
    """Deterministic gamma representation for signature (-,+,...,+) in n >= 2."""
    if not isinstance(n, int) or n < 2:
        raise ValueError("dimension must be an integer >= 2, got %r" % (n,))
    gens = _euclidean_generators(n)
    mats = [1j * gens[0]] + gens[1:]
    for g in mats:
        g.setflags(write=False)
    return GammaRep(n, tuple(mats), tuple([-1] + [1] * (n - 1)))


@dataclass
class CliffordReport:
    dimension: int
    anticommutator_residuals: dict = field(default_factory=dict)  # (mu,nu) -> float
    hermiticity_residuals: tuple = ()
    max_residual: float = 0.0
    passed: bool = False

    def to_dict(self):
        return {
            "dimension": self.dimension,
            "max_anticommutator_residual": max(self.anticommutator_residuals.values()),
            "max_hermiticity_residual": max(self.hermiticity_residuals),
            "max_residual": self.max_residual,
            "passed": self.passed,
        }


def check_clifford(rep, tol=CLIFFORD_TOL):
    """Verify anticommutators and the Hermiticity pattern of a GammaRep."""
    n = rep.dimension
    size = rep.matrix_size
    eye = np.eye(size)
    anti = {}
    for mu in range(n):
        for nu in range(mu, n):
            target = 2.0 * rep.metric_signs[mu] * eye if mu == nu else 0.0
            res = rep.matrices[mu] @ rep.matrices[nu] + rep.matrices[nu] @ rep.matrices[mu] - target
            anti[(mu, nu)] = max_abs(res)
    herm = []
    for mu in range(n):
        g = rep.matrices[mu]
        if rep.metric_signs[mu] < 0:
            herm.append(max_abs(g + g.conj().T))   # anti-Hermitian
        else:
            herm.append(max_abs(g - g.conj().T))   # Hermitian
    worst = max(max(anti.values()), max(herm))
    return CliffordReport(
        dimension=n,
        anticommutator_residuals=anti,
        hermiticity_residuals=tuple(herm),
        max_residual=worst,
        passed=bool(worst <= tol),
    )


def _require_valid(rep):
    report = check_clifford(rep)
    if not report.passed:
        raise ValueError(
            "gamma representation fails the Clifford relations "
            "(max residual %.3e)" % report.max_residual)
    return report


def fundamental_symmetry(rep):
    """J = i gamma^0.  Hermitian with J^2 = 1 for a valid rep."""
    _require_valid(rep)
    j = 1j * rep.matrices[0]
    j.setflags(write=False)
    return j


def krein_adjoint(a, j):
    """A+ = J A* J with A* the conjugate transpose."""
    return j @ a.conj().T @ j


def chirality(rep):
    """gamma_ch = (-i)^{n/2+1} gamma^0 ... gamma^{n-1}; even n only."""
    _require_valid(rep)
    n = rep.dimension
    if n % 2 != 0:
        raise ValueError("chirality requires even dimension, got n = %d" % n)
    prod = np.eye(rep.matrix_size, dtype=complex)
    for g in rep.matrices:
        prod = prod @ g
    gam = (-1j) ** (n // 2 + 1) * prod
    gam.setflags(write=False)
    return gam


@dataclass
class AuditVerdict:
    verdict: str          # "lorentzian" | "not_lorentzian" | "indeterminate"
    reason: str
    anti_hermitian_indices: tuple
    square_signs: tuple   # per-matrix sign of the square, 0 if not a multiple of 1
    max_cross_residual: float

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "reason": self.reason,
            "anti_hermitian_indices": list(self.anti_hermitian_indices),
            "square_signs": list(self.square_signs),
            "max_cross_residual": self.max_cross_residual,
        }


def signature_audit(matrices, tol=1e-10):
    """Classify a family of square matrices by its Clifford signature.

    Returns "lorentzian" only for exactly one anti-Hermitian generator sitting
    at index 0 squaring to -1, all others Hermitian squaring to +1, and all
    cross anticommutators vanishing.  Families that do not close a Clifford
    algebra at all come back "indeterminate" with diagnostics.
    """
    mats = [np.asarray(m, dtype=complex) for m in matrices]
    size = mats[0].shape[0]
    eye = np.eye(size)

    anti_idx = []
    square_signs = []
    closes = True
    for i, m in enumerate(mats):
        if max_abs(m + m.conj().T) <= tol:
            anti_idx.append(i)
        elif max_abs(m - m.conj().T) > tol:
            closes = False  # neither Hermitian nor anti-Hermitian
        sq = m @ m
        if max_abs(sq - eye) <= tol:
            square_signs.append(1)
        elif max_abs(sq + eye) <= tol:
            square_signs.append(-1)
        else:
            square_signs.append(0)
            closes = False
    cross = 0.0
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            cross = max(cross, max_abs(mats[i] @ mats[j] + mats[j] @ mats[i]))
    if cross > tol:
        closes = False

    if not closes:
        return AuditVerdict(
            "indeterminate",
            "family does not close a Clifford algebra "
            "(cross residual %.3e, square signs %s)" % (cross, square_signs),
            tuple(anti_idx), tuple(square_signs), cross)

    if len(anti_idx) != 1:
        return AuditVerdict(
            "not_lorentzian",
            "%d anti-Hermitian generators (need exactly one)" % len(anti_idx),
            tuple(anti_idx), tuple(square_signs), cross)
    k = anti_idx[0]
    if square_signs[k] != -1 or any(square_signs[i] != 1 for i in range(len(mats)) if i != k):
        return AuditVerdict(
            "not_lorentzian",
            "square signs %s incompatible with (-,+,...,+)" % (square_signs,),
            tuple(anti_idx), tuple(square_signs), cross)
    if k != 0:
        return AuditVerdict(
            "not_lorentzian",
            "time-like generator at index %d (expected 0)" % k,
            tuple(anti_idx), tuple(square_signs), cross)
    return AuditVerdict("lorentzian", "signature (-,+,...,+)",
                        tuple(anti_idx), tuple(square_signs), cross)
