"""Curvature of the one-parameter metric deformation and its extension.

For constant structure data the deformed Ricci operator is a finite sum of
matrix coefficients times exponentials exp(-2 u q), where each exponent q
is an exact half-integer combination of the eigenvalues.  The grouped
representation keeps those exponents exact (affine forms in the optional
free parameter), so the Einstein criterion "every nonzero-exponent class
vanishes and the constant class hits its target" is a finite set of exact
equations on floating-point coefficients.

``ricci_deformation_at`` evaluates the same formula directly at a numeric
deformation time through a separate code path; tests compare the two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .algebra import (
    ExtensionSpec,
    StructureTensor,
    divergence_residual,
    killing_form,
    mean_curvature,
)
from .scalars import AffineRational

HALF = Fraction(1, 2)


class NonConstantStructureError(ValueError):
    """Curvature routines only accept constant (homogeneous) structure data."""


def _require_constant(spec: ExtensionSpec) -> None:
    if not spec.constant_structure:
        raise NonConstantStructureError(
            "structure data is flagged non-constant; the deformation curvature "
            "formulas implemented here require constant structure tensors"
        )


@dataclass
class GroupedRicci:
    """Deformed Ricci operator as sum_q exp(-2 u q) C_q in the moving frame."""

    dim: int
    classes: dict[AffineRational, np.ndarray]
    param: Optional[float] = None

    def exponents(self) -> list[AffineRational]:
        return sorted(self.classes, key=lambda q: q.sort_key())

    def coefficient(self, q: AffineRational) -> np.ndarray:
        return self.classes.get(q, np.zeros((self.dim, self.dim)))

    def constant_class(self) -> np.ndarray:
        return self.coefficient(AffineRational.zero()).copy()

    def nonzero_exponent_classes(self) -> dict[AffineRational, np.ndarray]:
        return {q: C for q, C in self.classes.items() if not q.is_zero}

    def evaluate(self, u: float) -> np.ndarray:
        weights = [
            (math.exp(-2.0 * u * q.evaluate(self.param)), self.classes[q])
            for q in self.exponents()
        ]
        out = np.zeros((self.dim, self.dim))
        for i in range(self.dim):
            for j in range(self.dim):
                out[i, j] = math.fsum(w * C[i, j] for w, C in weights)
        return out

    def trace_by_class(self) -> dict[AffineRational, float]:
        return {q: float(np.trace(C)) for q, C in self.classes.items()}

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "classes": {
                q.json_key(): self.classes[q].tolist() for q in self.exponents()
            },
        }


def _grouped_terms(spec: ExtensionSpec, magnitudes: bool = False) -> dict[AffineRational, np.ndarray]:
    """Accumulate the grouped Ricci coefficients.

    With ``magnitudes`` the absolute values are accumulated instead, which
    overestimates support: a class key appears whenever any structurally
    allowed term could contribute, with no cancellation.  Solvers use this
    to fix the class list of a sparsity pattern independently of the values.
    """
    n = spec.dim
    T = spec.algebra.dense()
    if magnitudes:
        # Absolute values throughout so no term can cancel out of the support.
        T = np.abs(T)
    B = np.einsum("jkl,ilk->ij", T, T)
    B = (B + B.T) / 2.0
    trad = np.einsum("ikk->i", T)
    p = list(spec.spectral)
    classes: dict[AffineRational, np.ndarray] = {}

    def add(q: AffineRational, i: int, j: int, value: float) -> None:
        if value == 0.0:
            return
        if magnitudes:
            value = abs(value)
        C = classes.get(q)
        if C is None:
            C = classes.setdefault(q, np.zeros((n, n)))
        C[i, j] += value
        if i != j:
            C[j, i] += value

    for i in range(n):
        for j in range(i, n):
            half_ij = (p[i] + p[j]) * HALF
            add(half_ij, i, j, -0.5 * B[i, j])
            for l in range(n):
                if trad[l] == 0.0:
                    continue
                add(p[l] + (p[j] - p[i]) * HALF, i, j, -0.5 * T[l, j, i] * trad[l])
                add(p[l] + (p[i] - p[j]) * HALF, i, j, -0.5 * T[l, i, j] * trad[l])
            for k in range(n):
                for l in range(n):
                    c3 = T[k, l, i] * T[k, l, j]
                    if c3 != 0.0:
                        add(p[k] + p[l] - half_ij, i, j, 0.25 * c3)
                    c4 = T[i, k, l] * T[j, k, l]
                    if c4 != 0.0:
                        add(p[k] - p[l] + half_ij, i, j, -0.5 * c4)
    return {q: C for q, C in classes.items() if C.any()}


def ricci_deformation(spec: ExtensionSpec) -> GroupedRicci:
    """Grouped exponential representation of the deformed Ricci operator."""
    _require_constant(spec)
    return GroupedRicci(spec.dim, _grouped_terms(spec), spec.param)


def ricci_deformation_at(spec: ExtensionSpec, u: float) -> np.ndarray:
    """Direct evaluation of the deformed Ricci operator at a single u.

    Sums the formula term by term per entry, independently of the grouped
    accumulation; used as its cross-check.  Exponents are formed as single
    linear combinations of the eigenvalues, which are exact floats for the
    rational eigenvalues the formula is used with.
    """
    _require_constant(spec)
    n = spec.dim
    T = spec.algebra.dense()
    B = killing_form(spec.algebra)
    trad = mean_curvature(spec.algebra)
    pv = spec.eigenvalues()

    def ex(q: float) -> float:
        return math.exp(-2.0 * u * q)

    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            terms = []
            if B[i, j] != 0.0:
                terms.append(ex(0.5 * (pv[i] + pv[j])) * (-0.5 * B[i, j]))
            for l in range(n):
                if trad[l] == 0.0:
                    continue
                v1 = T[l, j, i]
                if v1 != 0.0:
                    terms.append(ex(pv[l] + 0.5 * (pv[j] - pv[i])) * (-0.5 * v1 * trad[l]))
                v2 = T[l, i, j]
                if v2 != 0.0:
                    terms.append(ex(pv[l] + 0.5 * (pv[i] - pv[j])) * (-0.5 * v2 * trad[l]))
            for k in range(n):
                for l in range(n):
                    c3 = T[k, l, i] * T[k, l, j]
                    if c3 != 0.0:
                        terms.append(ex(pv[k] + pv[l] - 0.5 * (pv[i] + pv[j])) * (0.25 * c3))
                    c4 = T[i, k, l] * T[j, k, l]
                    if c4 != 0.0:
                        terms.append(ex(pv[k] - pv[l] + 0.5 * (pv[i] + pv[j])) * (-0.5 * c4))
            out[i, j] = math.fsum(terms)
    return out


def ricci_at_identity(mu: StructureTensor) -> np.ndarray:
    """Ricci operator of the undeformed left-invariant metric (u = 0)."""
    T = mu.dense()
    B = killing_form(mu)
    trad = mean_curvature(mu)
    X = np.einsum("l,lji->ij", trad, T)
    return (
        -0.5 * B
        - 0.5 * (X + X.T)
        + 0.25 * np.einsum("kli,klj->ij", T, T)
        - 0.5 * np.einsum("ikl,jkl->ij", T, T)
    )


def connection_coeffs(spec: ExtensionSpec, u: float) -> np.ndarray:
    """Connection coefficients G[i,j,k] = <nabla_{e_k} e_j, e_i> at time u."""
    _require_constant(spec)
    n = spec.dim
    T = spec.algebra.dense()
    pv = spec.eigenvalues()
    out = np.zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                out[i, j, k] = (
                    0.5 * math.exp(u * (pv[k] - pv[i] - pv[j])) * T[i, j, k]
                    - 0.5 * math.exp(u * (pv[i] - pv[j] - pv[k])) * T[j, k, i]
                    - 0.5 * math.exp(u * (pv[j] - pv[k] - pv[i])) * T[k, i, j]
                )
    return out


def scalar_deformation(spec: ExtensionSpec) -> dict[AffineRational, float]:
    """Grouped scalar curvature of the deformation.

    Computed from the scalar-curvature formula directly, not by tracing the
    grouped Ricci representation, so the two can be compared as independent
    paths.
    """
    _require_constant(spec)
    n = spec.dim
    T = spec.algebra.dense()
    B = killing_form(spec.algebra)
    trad = mean_curvature(spec.algebra)
    p = list(spec.spectral)
    out: dict[AffineRational, float] = {}

    def add(q: AffineRational, value: float) -> None:
        if value != 0.0:
            out[q] = out.get(q, 0.0) + value

    for k in range(n):
        add(p[k], -(trad[k] ** 2 + 0.5 * B[k, k]))
    for i in range(n):
        for k in range(n):
            for l in range(n):
                c = T[k, l, i] ** 2
                if c != 0.0:
                    add(p[k] + p[l] - p[i], -0.25 * c)
    return {q: v for q, v in out.items() if v != 0.0}


@dataclass
class CurvatureReport:
    """Grouped curvature data of the deformation and its extension.

    The extension blocks: the (0,0) entry is constant, the mixed row decays
    like exp(-u p_i) with coefficients equal to the divergence residual, and
    the frame block is the deformed Ricci shifted by the trace term.
    """

    ric_u: GroupedRicci
    scal_terms: dict[AffineRational, float]
    ric_00: float
    ric_0i_classes: dict[AffineRational, np.ndarray]
    ric_block_classes: dict[AffineRational, np.ndarray]
    param: Optional[float] = None

    @property
    def dim(self) -> int:
        return self.ric_u.dim

    def evaluate_extension(self, u: float) -> np.ndarray:
        n = self.dim
        out = np.zeros((n + 1, n + 1))
        out[0, 0] = self.ric_00
        row = np.zeros(n)
        for q, vec in self.ric_0i_classes.items():
            row += math.exp(-2.0 * u * q.evaluate(self.param)) * vec
        out[0, 1:] = row
        out[1:, 0] = row
        block = np.zeros((n, n))
        for q, C in self.ric_block_classes.items():
            block += math.exp(-2.0 * u * q.evaluate(self.param)) * C
        out[1:, 1:] = block
        return out

    def to_json(self) -> dict:
        key = lambda q: q.json_key()
        return {
            "ric_u": self.ric_u.to_json(),
            "scal": {key(q): v for q, v in sorted(self.scal_terms.items(), key=lambda t: t[0].sort_key())},
            "extension": {
                "ric_00": self.ric_00,
                "ric_0i": {key(q): vec.tolist() for q, vec in self.ric_0i_classes.items()},
                "ric_ij": {key(q): C.tolist() for q, C in self.ric_block_classes.items()},
            },
        }


def extension_ricci(spec: ExtensionSpec) -> CurvatureReport:
    """Ricci tensor of the extended metric in grouped form."""
    _require_constant(spec)
    n = spec.dim
    grouped = ricci_deformation(spec)
    scal = scalar_deformation(spec)
    trace_d = spec.trace()
    pv = spec.eigenvalues()

    ric_00 = -spec.trace_sq()

    div = divergence_residual(spec)
    mixed: dict[AffineRational, np.ndarray] = {}
    for i in range(n):
        if div[i] == 0.0:
            continue
        q = spec.eigenvalue(i + 1) * HALF
        vec = mixed.setdefault(q, np.zeros(n))
        vec[i] += div[i]

    block = {q: C.copy() for q, C in grouped.classes.items()}
    shift = trace_d * np.diag(pv)
    if shift.any():
        zero = AffineRational.zero()
        block[zero] = block.get(zero, np.zeros((n, n))) - shift
        if not block[zero].any():
            del block[zero]

    return CurvatureReport(grouped, scal, ric_00, mixed, block, spec.param)
