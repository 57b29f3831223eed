"""Einstein verification and type-specific structural classifiers.

``verify_extension`` decides whether an extension spec produces an Einstein
metric: the divergence condition must hold, every nonzero-exponent class of
the grouped Ricci representation must vanish, and the constant class must
equal (tr D) diag(p) - tr(D^2) id.  A direct evaluation on a small grid of
deformation times cross-checks the grouped bookkeeping.

The classifiers check the algebraic certificates of the three eigenvalue
types with a multiplicity-free eigenvalue: (0,...,0,1), (1,...,1,0) and
(1,...,1,2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .algebra import ExtensionSpec, StructureTensor, divergence_residual
from .curvature import ricci_at_identity, ricci_deformation, ricci_deformation_at
from .scalars import AffineRational
from .spectral import SpectralVector

DEFAULT_TOL = 1e-9
U_GRID = (-1.0, -0.5, 0.0, 0.5, 1.0, 2.0)


class TypeMismatchError(ValueError):
    """Spec eigenvalues do not match the requested classifier type."""


class VerificationPreconditionError(ValueError):
    """Operation called on a spec that fails its verification precondition."""


@dataclass
class VerificationReport:
    """Outcome of the Einstein check with named residuals."""

    einstein: bool
    einstein_constant: Optional[float]
    residuals: dict[str, float]
    violated_conditions: list[str]
    tolerance: float

    def __bool__(self) -> bool:
        return self.einstein

    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    def to_json(self) -> dict:
        return {
            "einstein": self.einstein,
            "einstein_constant": self.einstein_constant,
            "residuals": dict(self.residuals),
            "violated_conditions": list(self.violated_conditions),
            "tolerance": self.tolerance,
        }


def _maxabs(arr: np.ndarray) -> float:
    return float(np.abs(arr).max()) if arr.size else 0.0


def verify_extension(spec: ExtensionSpec, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Decide whether the extension of the given data is Einstein.

    Residuals reported: "divergence", one "exponent <q>" entry per
    nonzero-exponent Ricci class, "target" for the constant class against
    (tr D) diag(p) - tr(D^2) id, and "u_grid" for the direct cross-check.
    """
    grouped = ricci_deformation(spec)  # also refuses non-constant data
    pv = spec.eigenvalues()
    trace_d = spec.trace()
    trace_d2 = spec.trace_sq()
    target = trace_d * np.diag(pv) - trace_d2 * np.eye(spec.dim)

    residuals: dict[str, float] = {}
    residuals["divergence"] = _maxabs(divergence_residual(spec))
    for q, C in sorted(
        grouped.nonzero_exponent_classes().items(), key=lambda t: t[0].sort_key()
    ):
        residuals[f"exponent {q.json_key()}"] = _maxabs(C)
    residuals["target"] = _maxabs(grouped.constant_class() - target)
    residuals["u_grid"] = max(
        _maxabs(ricci_deformation_at(spec, u) - target) for u in U_GRID
    )

    violated = [name for name, value in residuals.items() if value > tol]
    einstein = not violated
    return VerificationReport(
        einstein=einstein,
        einstein_constant=(-trace_d2 + 0.0) if einstein else None,  # avoid -0.0
        residuals=residuals,
        violated_conditions=violated,
        tolerance=tol,
    )


def scalar_case_check(spec: ExtensionSpec, tol: float = DEFAULT_TOL) -> bool:
    """On a verified spec: "eigenvalues all equal" iff "undeformed Ricci flat".

    Returns the truth of that biconditional for this instance; raises when
    called on a spec that does not verify.
    """
    report = verify_extension(spec, tol)
    if not report.einstein:
        raise VerificationPreconditionError(
            "scalar_case_check requires a spec that passes verification"
        )
    forms = spec.spectral
    scalar = all(f == forms[0] for f in forms)
    flat = _maxabs(ricci_deformation(spec).evaluate(0.0)) <= tol
    return scalar == flat


SpectralInput = Union[SpectralVector, ExtensionSpec, Sequence]


def _forms(p: SpectralInput) -> tuple[AffineRational, ...]:
    if isinstance(p, ExtensionSpec):
        return p.spectral
    if isinstance(p, SpectralVector):
        return tuple(AffineRational(x) for x in p.entries)
    return tuple(AffineRational.of(x) for x in p)


def relation_exists(p: SpectralInput) -> Optional[tuple[int, int, int]]:
    """First (i, j, k), i < j, with p_k = p_i + p_j; None when no relation holds."""
    forms = _forms(p)
    n = len(forms)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            for k in range(1, n + 1):
                if forms[k - 1] == forms[i - 1] + forms[j - 1]:
                    return (i, j, k)
    return None


def sparsity_pattern(p: SpectralInput) -> set[tuple[int, int, int]]:
    """Triples (i, j, k), i < j, whose bracket entry may be nonzero.

    These are exactly the triples with p_i + p_j - p_k in {0, p_1, ..., p_n};
    all other structure constants must vanish for an Einstein extension.
    """
    forms = _forms(p)
    n = len(forms)
    allowed = {AffineRational.zero(), *forms}
    out = set()
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            for k in range(1, n + 1):
                if forms[i - 1] + forms[j - 1] - forms[k - 1] in allowed:
                    out.add((i, j, k))
    return out


@dataclass
class ClassifierReport:
    """Result of one structural type classifier."""

    type_name: str
    passed: bool
    checks: dict[str, float]
    violated: list[str]
    gauge_obstruction: bool = False
    spectrum: Optional[list[float]] = None
    details: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed

    def to_json(self) -> dict:
        out = {
            "type": self.type_name,
            "passed": self.passed,
            "checks": dict(self.checks),
            "violated": list(self.violated),
            "gauge_obstruction": self.gauge_obstruction,
        }
        if self.spectrum is not None:
            out["spectrum"] = list(self.spectrum)
        if self.details:
            out["details"] = dict(self.details)
        return out


def _permute_distinguished(
    spec: ExtensionSpec, lam: Fraction, nu: Fraction, type_name: str
) -> StructureTensor:
    """Relabel the frame so the multiplicity-free eigenvalue sits last.

    Refuses anything that is not exactly (lam, ..., lam, nu) up to order;
    near-miss types are never coerced.
    """
    values = spec.exact_eigenvalues()
    n = len(values)
    special = [i for i, v in enumerate(values) if v == nu]
    rest = [i for i, v in enumerate(values) if v == lam]
    if len(special) != 1 or len(rest) != n - 1:
        raise TypeMismatchError(
            f"classifier {type_name} needs eigenvalues ({lam},...,{lam},{nu}) "
            f"up to order; got {tuple(str(v) for v in values)}"
        )
    order = rest + special
    perm = {old + 1: new + 1 for new, old in enumerate(order)}
    return spec.algebra.permuted(perm)


def _s_vector(mu: StructureTensor) -> np.ndarray:
    """S[i] = sum_k mu[k,i|k] (negative trace of ad_{e_i})."""
    return np.einsum("kik->i", mu.dense())


def classify_type_0001(spec: ExtensionSpec, tol: float = DEFAULT_TOL) -> ClassifierReport:
    """Type (0,...,0,1): the distinguished direction splits off a line and
    the complementary block is Einstein with constant -1."""
    mu = _permute_distinguished(spec, Fraction(0), Fraction(1), "0001")
    n = mu.dim
    touching = [
        abs(v) for (i, j, k), v in mu.items() if n in (i, j, k)
    ]
    block = mu.restrict(range(1, n))
    block_ric = ricci_at_identity(block)
    checks = {
        "distinguished_decoupled": max(touching, default=0.0),
        "block_einstein_minus_one": _maxabs(block_ric + np.eye(n - 1)),
    }
    violated = [name for name, value in checks.items() if value > tol]
    return ClassifierReport(
        type_name="0001",
        passed=not violated,
        checks=checks,
        violated=violated,
        details={"product_decomposition": not violated},
    )


def classify_type_1110(spec: ExtensionSpec, tol: float = DEFAULT_TOL) -> ClassifierReport:
    """Type (1,...,1,0): transverse symmetric action with zero trace and
    squared norm n-1 over a Ricci-flat block."""
    mu = _permute_distinguished(spec, Fraction(1), Fraction(0), "1110")
    n = mu.dim
    s_n = float(_s_vector(mu)[n - 1])
    mu_in_n = max((abs(mu.get(i, n, n)) for i in range(1, n)), default=0.0)
    mu_ij_n = max(
        (abs(v) for (i, j, k), v in mu.items() if k == n and i < n and j < n),
        default=0.0,
    )
    action = np.array(
        [[mu.get(n, i, j) for j in range(1, n)] for i in range(1, n)]
    )
    skew = 0.5 * (action - action.T)
    skew_defect = _maxabs(skew)
    gauge_obstruction = skew_defect > tol
    sym = 0.5 * (action + action.T)
    q_values = np.linalg.eigh(sym)[0]
    block = mu.restrict(range(1, n))
    checks = {
        "transverse_trace": abs(s_n),
        "distinguished_geodesic": mu_in_n,
        "block_closed": mu_ij_n,
        "symmetric_action": skew_defect,
        "trace_zero": abs(float(q_values.sum())),
        "trace_square": abs(float((q_values**2).sum()) - (n - 1)),
        "block_ricci_flat": _maxabs(ricci_at_identity(block)),
    }
    violated = [name for name, value in checks.items() if value > tol]
    return ClassifierReport(
        type_name="1110",
        passed=not violated,
        checks=checks,
        violated=violated,
        gauge_obstruction=gauge_obstruction,
        spectrum=[float(q) for q in q_values],
    )


def classify_type_1112(spec: ExtensionSpec, tol: float = DEFAULT_TOL) -> ClassifierReport:
    """Type (1,...,1,2): contact-type certificate.

    The distinguished direction must act trivially, each transverse frame
    vector must couple to it with squared norm 4, and the undeformed Ricci
    operator must equal diag(-2, ..., -2, n-1).
    """
    mu = _permute_distinguished(spec, Fraction(1), Fraction(2), "1112")
    n = mu.dim
    s_n = float(_s_vector(mu)[n - 1])
    mu_in_n = max((abs(mu.get(i, n, n)) for i in range(1, n)), default=0.0)
    action = np.array(
        [[mu.get(n, i, j) for j in range(1, n)] for i in range(1, n)]
    )
    skew_defect = _maxabs(action - action.T) / 2.0
    gauge_obstruction = skew_defect > tol
    coupling = max(
        abs(sum(mu.get(i, k, n) ** 2 for k in range(1, n)) - 4.0)
        for i in range(1, n)
    )
    ric0 = ricci_at_identity(mu)
    expected = np.diag([-2.0] * (n - 1) + [float(n - 1)])
    checks = {
        "transverse_trace": abs(s_n),
        "distinguished_geodesic": mu_in_n,
        "distinguished_action": _maxabs(action),
        "contact_coupling": coupling,
        "ricci_at_identity": _maxabs(ric0 - expected),
    }
    violated = [name for name, value in checks.items() if value > tol]
    passed = not violated
    return ClassifierReport(
        type_name="1112",
        passed=passed,
        checks=checks,
        violated=violated,
        gauge_obstruction=gauge_obstruction,
        details={"k_contact_eta_einstein": passed},
    )
