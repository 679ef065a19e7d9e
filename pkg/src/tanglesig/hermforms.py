"""Skew-Hermitian linear algebra: signatures, Maslov index, Meyer cocycle.

Forms are sesquilinear with the conjugation on the first slot:
lambda(x, y) = x^* L y where L^* = -L.  Rank and kernel decisions use the
singular-value threshold tol * smax * max(shape); subspaces compare as
column spaces under that threshold, never entrywise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (IllConditioned, NotHermitian, NotIsotropic, NotUnitary,
                     SpaceMismatch)

DEFAULT_TOL = 1e-9


def _as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {a.shape}")
    return a


def rank_threshold(s, shape, tol: float) -> float:
    smax = s[0] if len(s) else 0.0
    return tol * max(smax, 1.0) * max(shape)


def numerical_rank(a: np.ndarray, tol: float = DEFAULT_TOL) -> int:
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(s > rank_threshold(s, a.shape, tol)))


def null_space(a: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of ker(a) as columns."""
    if a.shape[0] == 0 or a.size == 0:
        return np.eye(a.shape[1], dtype=complex)
    u, s, vh = np.linalg.svd(a)
    thr = rank_threshold(s, a.shape, tol)
    r = int(np.sum(s > thr))
    return vh[r:].conj().T


def column_space(a: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the column space."""
    if a.shape[1] == 0:
        return a.copy()
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    thr = rank_threshold(s, a.shape, tol)
    r = int(np.sum(s > thr))
    return u[:, :r]


@dataclass(frozen=True)
class SkewSpace:
    """A finite-dimensional complex vector space with a skew-Hermitian form."""

    form: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        f = _as_matrix(self.form)
        if f.shape[0] != f.shape[1]:
            raise ValueError("form must be square")
        scale = max(np.linalg.norm(f), 1.0)
        if np.linalg.norm(f + f.conj().T) > 100 * self.tol * scale:
            raise ValueError("form is not skew-Hermitian")
        object.__setattr__(self, "form", f)

    @property
    def dim(self) -> int:
        return self.form.shape[0]

    def pair(self, x, y) -> complex:
        return complex(np.asarray(x).conj() @ self.form @ np.asarray(y))

    def negated(self) -> "SkewSpace":
        return SkewSpace(-self.form, self.tol)

    def close_to(self, other: "SkewSpace", tol: float | None = None) -> bool:
        tol = self.tol if tol is None else tol
        if self.dim != other.dim:
            return False
        scale = max(np.linalg.norm(self.form), np.linalg.norm(other.form), 1.0)
        return np.linalg.norm(self.form - other.form) <= 1e4 * tol * scale


@dataclass(frozen=True)
class Subspace:
    """A subspace of a SkewSpace, stored as a full-column-rank basis matrix."""

    ambient: SkewSpace
    basis: np.ndarray

    def __post_init__(self):
        b = _as_matrix(self.basis)
        if b.shape[0] != self.ambient.dim:
            raise ValueError("basis rows must match ambient dimension")
        if b.shape[1] and numerical_rank(b, self.ambient.tol) != b.shape[1]:
            raise ValueError("basis columns are not independent")
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def orthonormalized(self) -> np.ndarray:
        return column_space(self.basis, self.ambient.tol)

    def contains(self, other: "Subspace", tol: float | None = None) -> bool:
        tol = self.ambient.tol if tol is None else tol
        if other.dim == 0:
            return True
        q = self.orthonormalized()
        b = other.orthonormalized()
        resid = b - q @ (q.conj().T @ b)
        return np.linalg.norm(resid) <= 1e3 * tol * max(self.ambient.dim, 1)

    def equals(self, other: "Subspace", tol: float | None = None) -> bool:
        return self.dim == other.dim and self.contains(other, tol) \
            and other.contains(self, tol)

    def is_isotropic(self, tol: float | None = None) -> bool:
        tol = self.ambient.tol if tol is None else tol
        if self.dim == 0:
            return True
        q = self.orthonormalized()
        resid = q.conj().T @ self.ambient.form @ q
        scale = max(np.linalg.norm(self.ambient.form), 1.0)
        return np.linalg.norm(resid) <= 1e4 * tol * scale


def zero_subspace(space: SkewSpace) -> Subspace:
    return Subspace(space, np.zeros((space.dim, 0), dtype=complex))


def full_subspace(space: SkewSpace) -> Subspace:
    return Subspace(space, np.eye(space.dim, dtype=complex))


@dataclass(frozen=True)
class SignatureResult:
    """Eigenvalue counts (positive, negative, null) at tolerance tol."""

    plus: int
    minus: int
    null: int
    tol: float

    @property
    def signature(self) -> int:
        return self.plus - self.minus

    @property
    def nullity(self) -> int:
        return self.null


def hermitian_signature(m, tol: float = DEFAULT_TOL) -> SignatureResult:
    """Counts of eigenvalues of a Hermitian matrix above/below/at zero.

    Eigenvalues with |ev| in (tol, 10*tol) are rejected as IllConditioned:
    the output is integer-valued and must not flip with noise.
    """
    a = _as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if a.shape[0] == 0:
        return SignatureResult(0, 0, 0, tol)
    if np.linalg.norm(a - a.conj().T) > 100 * tol * max(np.linalg.norm(a), 1.0):
        raise NotHermitian(f"residual {np.linalg.norm(a - a.conj().T):.3g}")
    evs = np.linalg.eigvalsh((a + a.conj().T) / 2.0)
    band = (np.abs(evs) > tol) & (np.abs(evs) < 10 * tol)
    if band.any():
        raise IllConditioned(
            f"eigenvalue(s) {evs[band]} inside the rejection band ({tol:g}, {10 * tol:g})")
    plus = int(np.sum(evs > tol))
    minus = int(np.sum(evs < -tol))
    return SignatureResult(plus, minus, len(evs) - plus - minus, tol)


def annihilator(v: Subspace) -> Subspace:
    """Ann(V) = {x : lambda(v, x) = 0 for all v in V}."""
    amb = v.ambient
    if v.dim == 0:
        return full_subspace(amb)
    ker = null_space(v.basis.conj().T @ amb.form, amb.tol)
    return Subspace(amb, ker)


def _check_isotropic(sub: Subspace, tol: float):
    if not sub.is_isotropic(tol):
        raise NotIsotropic("subspace is not totally isotropic for the ambient form")


def maslov(l1: Subspace, l2: Subspace, l3: Subspace,
           tol: float = DEFAULT_TOL) -> int:
    """Maslov index of three totally isotropic subspaces of one SkewSpace.

    Signature of f(a, b) = lambda(a2, b) on (L1 + L2) cap L3, where
    a = a1 + a2 with a_i in L_i.
    """
    amb = l1.ambient
    for l in (l2, l3):
        if l.ambient.dim != amb.dim:
            raise SpaceMismatch("Maslov inputs live in different spaces")
    for l in (l1, l2, l3):
        _check_isotropic(l, tol)

    b1, b2, b3 = l1.basis, l2.basis, l3.basis
    if b3.shape[1] == 0:
        return 0
    # (L1+L2) cap L3 via the kernel of [B1 | B2 | -B3]
    stacked = np.hstack([b1, b2, -b3])
    ker = null_space(stacked, tol)
    k1, k2 = b1.shape[1], b2.shape[1]
    coeff3 = ker[k1 + k2:, :]
    w = b3 @ coeff3                       # vectors a in the intersection
    w = column_space(w, tol)              # independent representatives
    if w.shape[1] == 0:
        return 0
    # solve a = a1 + a2 (any solution)
    b12 = np.hstack([b1, b2])
    sol, *_ = np.linalg.lstsq(b12, w, rcond=None)
    resid = np.linalg.norm(b12 @ sol - w)
    assert resid <= 1e-6 * max(np.linalg.norm(w), 1.0), \
        "decomposition a = a1 + a2 failed on (L1+L2) cap L3"
    a2 = b2 @ sol[k1:, :]
    f = a2.conj().T @ amb.form @ w
    f = (f + f.conj().T) / 2.0
    return hermitian_signature(f, tol).signature


def check_form_unitary(g, space: SkewSpace, tol: float) -> None:
    g = _as_matrix(g)
    lam = space.form
    resid = np.linalg.norm(g.conj().T @ lam @ g - lam)
    if resid > 1e4 * tol * max(np.linalg.norm(lam), 1.0):
        raise NotUnitary(f"g*.lambda.g != lambda (residual {resid:.3g})")


def meyer(g1, g2, ambient: SkewSpace, tol: float = DEFAULT_TOL) -> int:
    """Meyer cocycle of two lambda-unitary matrices.

    Signature of b(x, y) = lambda(x1 + x2, y) on
    E = Im(g1^{-1} - id) cap Im(id - g2), where x = (g1^{-1} - id) x1
    = (id - g2) x2.
    """
    g1 = _as_matrix(g1)
    g2 = _as_matrix(g2)
    n = ambient.dim
    if g1.shape != (n, n) or g2.shape != (n, n):
        raise SpaceMismatch("matrix sizes do not match the ambient space")
    if n == 0:
        return 0
    check_form_unitary(g1, ambient, tol)
    check_form_unitary(g2, ambient, tol)

    m1 = np.linalg.inv(g1) - np.eye(n)
    m2 = np.eye(n) - g2
    c1 = column_space(m1, tol)
    c2 = column_space(m2, tol)
    if c1.shape[1] == 0 or c2.shape[1] == 0:
        return 0
    ker = null_space(np.hstack([c1, -c2]), tol)
    e = column_space(c1 @ ker[:c1.shape[1], :], tol)
    if e.shape[1] == 0:
        return 0
    x1, *_ = np.linalg.lstsq(m1, e, rcond=None)
    x2, *_ = np.linalg.lstsq(m2, e, rcond=None)
    for m, x in ((m1, x1), (m2, x2)):
        assert np.linalg.norm(m @ x - e) <= 1e-6 * max(np.linalg.norm(e), 1.0), \
            "preimage solve failed on E"
    b = (x1 + x2).conj().T @ ambient.form @ e
    b = (b + b.conj().T) / 2.0
    return hermitian_signature(b, tol).signature


# ---------------------------------------------------------------------------
# Isotropic relations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IsotropicRelation:
    """A totally isotropic subspace of (-source) + target, as a morphism."""

    source: SkewSpace
    target: SkewSpace
    space: Subspace

    def __post_init__(self):
        amb = relation_ambient(self.source, self.target)
        if self.space.ambient.dim != amb.dim:
            raise SpaceMismatch("relation subspace has wrong ambient dimension")
        # rebuild against the canonical ambient so the isotropy check is honest
        sub = Subspace(amb, self.space.basis)
        if not sub.is_isotropic():
            raise NotIsotropic("relation subspace is not isotropic for (-src) + tgt")
        object.__setattr__(self, "space", sub)

    @property
    def dim(self) -> int:
        return self.space.dim

    def equals(self, other: "IsotropicRelation", tol: float | None = None) -> bool:
        return self.space.equals(other.space, tol)


def relation_ambient(source: SkewSpace, target: SkewSpace) -> SkewSpace:
    n, m = source.dim, target.dim
    form = np.zeros((n + m, n + m), dtype=complex)
    form[:n, :n] = -source.form
    form[n:, n:] = target.form
    return SkewSpace(form, min(source.tol, target.tol))


def diagonal_relation(space: SkewSpace) -> IsotropicRelation:
    n = space.dim
    basis = np.vstack([np.eye(n), np.eye(n)]).astype(complex)
    amb = relation_ambient(space, space)
    return IsotropicRelation(space, space, Subspace(amb, basis))


def compose_relations(n1: IsotropicRelation, n2: IsotropicRelation) -> IsotropicRelation:
    """Relation composition by matching the middle coordinates."""
    if not n1.target.close_to(n2.source):
        raise SpaceMismatch("target of first relation != source of second")
    d1, d2, d3 = n1.source.dim, n1.target.dim, n2.target.dim
    p, q = n1.space.basis[:d1, :], n1.space.basis[d1:, :]
    r, s = n2.space.basis[:d2, :], n2.space.basis[d2:, :]
    tol = min(n1.source.tol, n2.target.tol)
    if n1.dim == 0 or n2.dim == 0:
        basis = np.zeros((d1 + d3, 0), dtype=complex)
    else:
        ker = null_space(np.hstack([q, -r]), tol)
        alpha = ker[:q.shape[1], :]
        beta = ker[q.shape[1]:, :]
        basis = column_space(np.vstack([p @ alpha, s @ beta]), tol)
    amb = relation_ambient(n1.source, n2.target)
    return IsotropicRelation(n1.source, n2.target, Subspace(amb, basis))


def direct_sum_spaces(a: SkewSpace, b: SkewSpace) -> SkewSpace:
    form = np.zeros((a.dim + b.dim, a.dim + b.dim), dtype=complex)
    form[:a.dim, :a.dim] = a.form
    form[a.dim:, a.dim:] = b.form
    return SkewSpace(form, min(a.tol, b.tol))


def direct_sum_subspaces(a: Subspace, b: Subspace) -> Subspace:
    amb = direct_sum_spaces(a.ambient, b.ambient)
    basis = np.zeros((amb.dim, a.dim + b.dim), dtype=complex)
    basis[:a.ambient.dim, :a.dim] = a.basis
    basis[a.ambient.dim:, a.dim:] = b.basis
    return Subspace(amb, basis)


def direct_sum_relations(a: IsotropicRelation, b: IsotropicRelation) -> IsotropicRelation:
    """Block sum, reordered so blocks group as (-(S1+S2)) + (T1+T2)."""
    src = direct_sum_spaces(a.source, b.source)
    tgt = direct_sum_spaces(a.target, b.target)
    s1, t1 = a.source.dim, a.target.dim
    s2, t2 = b.source.dim, b.target.dim
    basis = np.zeros((src.dim + tgt.dim, a.dim + b.dim), dtype=complex)
    basis[:s1, :a.dim] = a.space.basis[:s1, :]
    basis[s1:s1 + s2, a.dim:] = b.space.basis[:s2, :]
    basis[s1 + s2:s1 + s2 + t1, :a.dim] = a.space.basis[s1:, :]
    basis[s1 + s2 + t1:, a.dim:] = b.space.basis[s2:, :]
    amb = relation_ambient(src, tgt)
    return IsotropicRelation(src, tgt, Subspace(amb, basis))


def direct_sum(a, b):
    """Block-diagonal sum of two values of the same kind."""
    if isinstance(a, SkewSpace) and isinstance(b, SkewSpace):
        return direct_sum_spaces(a, b)
    if isinstance(a, Subspace) and isinstance(b, Subspace):
        return direct_sum_subspaces(a, b)
    if isinstance(a, IsotropicRelation) and isinstance(b, IsotropicRelation):
        return direct_sum_relations(a, b)
    raise TypeError(f"cannot direct-sum {type(a).__name__} with {type(b).__name__}")


def graph_subspace(space: SkewSpace, g, tol: float = DEFAULT_TOL) -> Subspace:
    """The graph {(v, g v)} of a form-unitary map as an isotropic subspace."""
    g = _as_matrix(g)
    check_form_unitary(g, space, tol)
    n = space.dim
    basis = np.vstack([np.eye(n, dtype=complex), g])
    return Subspace(relation_ambient(space, space), basis)
