"""Reduced Burau / coloured Gassner representations at a torus point omega.

The braid action on the free group is the Artin action

    sigma_i : x_i -> x_i x_{i+1} x_i^{-1},   x_{i+1} -> x_i,

which fixes the crossing convention for the whole package.  Fox derivatives
of the images, evaluated at x_k -> omega_{|c(k)|}^{sgn c(k)}, give an n x n
matrix J with row.J = target row for the boundary rows r_j = phi_j - 1; J
therefore restricts to a map ker(target row) -> ker(source row).  The
reduced representation is that restriction written in the kernel bases
e_j - kappa_j e_{j+1}; its matrix carries target coordinates to source
coordinates, and the graph of a braid's representation is spanned by the
columns of [[M], [I]].

The skew-Hermitian intersection form making these matrices unitary is not
written down anywhere; it is produced by solving the invariance system
R* J R = J over generators of the coloured braid group at a canonical
orbit-base object, then transported along a sorting braid word.  The real
solution ray is normalized and its sign is selected against the reference
family -(1 - conj(phi_i))(1 - conj(phi_{i+1}))(1 - phi_i phi_{i+1}) on the
kernel-basis diagonal, whose sign is that of the true two-puncture form
(pinned by the Hopf pair at omega = i and coherent across the torus).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .braidtangle import (ColouredBraid, ColouredObject, check_omega,
                          exponent_sums)
from .errors import NonUniqueForm, NotUnitary
from .hermforms import DEFAULT_TOL, SkewSpace, Subspace, IsotropicRelation, \
    relation_ambient, null_space

Word = tuple[int, ...]


# ---------------------------------------------------------------------------
# Free group words and Fox calculus
# ---------------------------------------------------------------------------

def reduce_word(w) -> Word:
    out: list[int] = []
    for g in w:
        if out and out[-1] == -g:
            out.pop()
        else:
            out.append(int(g))
    return tuple(out)


def invert_word(w) -> Word:
    return tuple(-g for g in reversed(w))


def substitute(images: tuple[Word, ...], w) -> Word:
    """Rewrite a word through generator images (x_i -> images[i-1])."""
    out: list[int] = []
    for g in w:
        piece = images[abs(g) - 1]
        out.extend(piece if g > 0 else invert_word(piece))
    return reduce_word(out)


def word_eval(w, phis) -> complex:
    out = 1.0 + 0.0j
    for g in w:
        out *= phis[abs(g) - 1] if g > 0 else 1.0 / phis[abs(g) - 1]
    return out


def fox_gradient(w, phis) -> np.ndarray:
    """All Fox derivatives d(w)/d(x_i) evaluated at x_i -> phis[i-1].

    Product rule d(uv) = d(u) + phi(u) d(v) with d(x_i^{-1}) = -phi_i^{-1}.
    """
    grad = np.zeros(len(phis), dtype=complex)
    prefix = 1.0 + 0.0j
    for g in w:
        i = abs(g) - 1
        if g > 0:
            grad[i] += prefix
            prefix *= phis[i]
        else:
            prefix /= phis[i]
            grad[i] -= prefix
    return grad


@dataclass(frozen=True)
class FreeGroupAutomorphism:
    """Endomorphism of the free group on x_1..x_n given by generator images."""

    images: tuple[Word, ...]

    def __post_init__(self):
        object.__setattr__(self, "images",
                           tuple(reduce_word(w) for w in self.images))

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, w) -> Word:
        return substitute(self.images, w)

    def compose(self, inner: "FreeGroupAutomorphism") -> "FreeGroupAutomorphism":
        """self after inner: x_j -> self(inner(x_j))."""
        return FreeGroupAutomorphism(tuple(self(w) for w in inner.images))


def identity_automorphism(n: int) -> FreeGroupAutomorphism:
    return FreeGroupAutomorphism(tuple((i + 1,) for i in range(n)))


def artin_generator(n: int, k: int) -> FreeGroupAutomorphism:
    """Artin action of the braid letter k (sign = handedness) on F_n."""
    i = abs(k)
    if not 1 <= i <= n - 1:
        raise ValueError(f"letter {k} out of range for n={n}")
    images = [(j + 1,) for j in range(n)]
    if k > 0:
        images[i - 1] = (i, i + 1, -i)
        images[i] = (i,)
    else:
        images[i - 1] = (i + 1,)
        images[i] = (-(i + 1), i, i + 1)
    return FreeGroupAutomorphism(tuple(images))


def braid_to_automorphism(b: ColouredBraid) -> FreeGroupAutomorphism:
    """Word of top meridians in bottom meridians, letter by letter."""
    total = identity_automorphism(b.n)
    for k in b.word:
        total = total.compose(artin_generator(b.n, k))
    return total


# ---------------------------------------------------------------------------
# Punctured-disk models and the evaluated representation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PuncturedDiskModel:
    """Twisted chain data of the n-punctured disk at a fixed omega."""

    object: ColouredObject
    omega: tuple[complex, ...]
    tol: float = DEFAULT_TOL

    @property
    def n(self) -> int:
        return self.object.n

    @property
    def phis(self) -> tuple[complex, ...]:
        return evaluations(self.object.entries, self.omega)

    @property
    def boundary_row(self) -> np.ndarray:
        return np.array([p - 1.0 for p in self.phis], dtype=complex)

    @property
    def kernel_basis(self) -> np.ndarray:
        """Columns e_j - kappa_j e_{j+1} spanning ker(boundary_row).

        kappa_j = r_j / r_{j+1}; with a constant colouring this is the
        classical reduced Burau basis e_j - e_{j+1}.
        """
        n = self.n
        r = self.boundary_row
        basis = np.zeros((n, max(n - 1, 0)), dtype=complex)
        for j in range(n - 1):
            basis[j, j] = 1.0
            basis[j + 1, j] = -r[j] / r[j + 1]
        return basis

    @property
    def dim(self) -> int:
        return max(self.n - 1, 0)


def evaluations(entries, omega) -> tuple[complex, ...]:
    return tuple(omega[abs(e) - 1] if e > 0 else 1.0 / omega[abs(e) - 1]
                 for e in entries)


def disk_model(c: ColouredObject, omega, tol: float = DEFAULT_TOL) -> PuncturedDiskModel:
    om = check_omega(omega, c.mu, tol)
    return PuncturedDiskModel(c, om, tol)


@dataclass(frozen=True)
class EvaluatedRep:
    """An evaluated braid representation with its boundary models.

    ``matrix`` expresses the top-disk kernel basis in bottom-disk kernel
    coordinates (the Fox-Jacobian restriction), so it maps target_model
    coordinates to source_model coordinates; composition is the matrix
    product in word order.
    """

    matrix: np.ndarray
    source_model: PuncturedDiskModel
    target_model: PuncturedDiskModel


def fox_jacobian(a: FreeGroupAutomorphism, model: PuncturedDiskModel) -> np.ndarray:
    """J[i, j] = d(a(x_j))/d(x_i) at the model's source evaluations."""
    phis = model.phis
    n = model.n
    jac = np.zeros((n, n), dtype=complex)
    for j in range(n):
        jac[:, j] = fox_gradient(a.images[j], phis)
    return jac


def _letter_jacobian(n: int, k: int, phis) -> np.ndarray:
    """Unreduced Jacobian of a single braid letter at source evaluations."""
    i = abs(k) - 1
    jac = np.eye(n, dtype=complex)
    pa, pb = phis[i], phis[i + 1]
    if k > 0:
        jac[i, i] = 1.0 - pb
        jac[i + 1, i] = pa
        jac[i, i + 1] = 1.0
        jac[i + 1, i + 1] = 0.0
    else:
        jac[i, i] = 0.0
        jac[i + 1, i] = 1.0
        jac[i, i + 1] = 1.0 / pb
        jac[i + 1, i + 1] = (pa - 1.0) / pb
    return jac


def _restrict(jac: np.ndarray, src: PuncturedDiskModel,
              tgt: PuncturedDiskModel) -> np.ndarray:
    """Solve B_src . M = J . B_tgt for the reduced matrix M."""
    rhs = jac @ tgt.kernel_basis
    m, resid, *_ = np.linalg.lstsq(src.kernel_basis, rhs, rcond=None)
    check = np.linalg.norm(src.kernel_basis @ m - rhs)
    if check > 1e-8 * max(np.linalg.norm(rhs), 1.0):
        raise ArithmeticError("Jacobian does not preserve the kernel; "
                              "boundary data inconsistent")
    return m


def reduced_rep(b: ColouredBraid, omega, tol: float = DEFAULT_TOL) -> EvaluatedRep:
    """Reduced Burau / coloured Gassner matrix of a braid at omega."""
    om = check_omega(omega, b.source.mu, tol)
    cols = b.source.entries
    n = b.n
    src_model = PuncturedDiskModel(b.source, om, tol)
    mat = np.eye(max(n - 1, 0), dtype=complex)
    level = cols
    model = src_model
    for k in b.word:
        i = abs(k) - 1
        nxt = list(level)
        nxt[i], nxt[i + 1] = nxt[i + 1], nxt[i]
        nxt = tuple(nxt)
        nxt_model = PuncturedDiskModel(ColouredObject(nxt, b.source.mu), om, tol)
        jac = _letter_jacobian(n, k, evaluations(level, om))
        mat = mat @ _restrict(jac, model, nxt_model)
        level, model = nxt, nxt_model
    return EvaluatedRep(mat, src_model, model)


def rep_unitarity_residual(rep: EvaluatedRep, f_src: "DiskForm",
                           f_tgt: "DiskForm") -> float:
    m = rep.matrix
    lhs = m.conj().T @ f_src.form @ m
    return float(np.linalg.norm(lhs - f_tgt.form))


# ---------------------------------------------------------------------------
# The invariant skew-Hermitian form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiskForm:
    """The intersection form on ker(boundary_row) in the kernel basis."""

    model: PuncturedDiskModel
    form: np.ndarray
    degenerate: bool = False

    def space(self) -> SkewSpace:
        return SkewSpace(self.form, self.model.tol)


def _hermitian_basis(m: int) -> list[np.ndarray]:
    basis = []
    for i in range(m):
        e = np.zeros((m, m), dtype=complex)
        e[i, i] = 1.0
        basis.append(e)
    for i in range(m):
        for j in range(i + 1, m):
            e = np.zeros((m, m), dtype=complex)
            e[i, j] = e[j, i] = 1.0
            basis.append(e)
            e = np.zeros((m, m), dtype=complex)
            e[i, j] = 1.0j
            e[j, i] = -1.0j
            basis.append(e)
    return basis


def _stabilizer_words(entries: tuple[int, ...]) -> list[Word]:
    """Generators of the coloured braid group fixing this colouring.

    Pure-braid band generators A_{ij} for all i < j, plus the plain sigma_i
    for adjacent equal entries (enough for a sorted colouring, where equal
    entries are contiguous).
    """
    n = len(entries)
    words: list[Word] = []
    for i in range(1, n):
        if entries[i - 1] == entries[i]:
            words.append((i,))
    for i in range(1, n):
        for j in range(i + 1, n + 1):
            down = tuple(range(j - 1, i, -1))          # j-1, ..., i+1
            up = tuple(-k for k in range(i + 1, j))    # -(i+1), ..., -(j-1)
            words.append(down + (i, i) + up)
    return words


def _reference_diag_sign(pa: complex, pb: complex) -> float:
    """Sign of the true two-puncture form on e_1 - kappa e_2.

    Derived by hand from the paper's worked Hopf and two-colour examples:
    the 1x1 form is a positive multiple of
    -Im[(1 - conj(pa))(1 - conj(pb))(1 - pa pb)] * i.
    """
    val = -((1 - np.conj(pa)) * (1 - np.conj(pb)) * (1 - pa * pb)).imag
    return float(val)


def _boundary_class(phis) -> np.ndarray:
    """Chain of the outer boundary loop x_1 x_2 ... x_n (prefix products)."""
    out = np.ones(len(phis), dtype=complex)
    acc = 1.0 + 0.0j
    for i, p in enumerate(phis):
        out[i] = acc
        acc *= p
    return out


def _solve_base_form(c: ColouredObject, omega, tol: float,
                     _depth: int = 0) -> np.ndarray | None:
    """Invariance-system solve at an orbit-base object; None for a zero form.

    Returns the Frobenius-normalized, sign-fixed form matrix.
    """
    model = PuncturedDiskModel(c, omega, tol)
    m = model.dim
    if m == 0:
        return np.zeros((0, 0), dtype=complex)

    reps = [reduced_rep(ColouredBraid(c, w), omega, tol).matrix
            for w in _stabilizer_words(c.entries)]
    herm = _hermitian_basis(m)

    inadmissible = abs(np.prod([w ** i for w, i in
                                zip(omega, exponent_sums(c))]) - 1.0) <= 1e-6
    rows = []
    for h in herm:
        col = []
        for r in reps:
            d = r.conj().T @ h @ r - h
            col.append(d.ravel().real)
            col.append(d.ravel().imag)
        if inadmissible:
            beta, *_ = np.linalg.lstsq(model.kernel_basis,
                                       _boundary_class(model.phis), rcond=None)
            hb = h @ beta
            col.append(hb.real)
            col.append(hb.imag)
        rows.append(np.concatenate(col))
    system = np.array(rows).T  # constraints x parameters

    ns = null_space(system, 1e-8)
    if ns.shape[1] == 0:
        if inadmissible:
            return None  # fully degenerate form (radical is everything)
        raise NonUniqueForm(f"invariance system has no solution at omega={omega}")
    if ns.shape[1] > 1:
        raise NonUniqueForm(
            f"invariance solution space has dimension {ns.shape[1]} at omega={omega}; "
            "perturb omega and retry")
    params = ns[:, 0].real
    h0 = sum(p * hk for p, hk in zip(params, herm))
    j0 = 1.0j * h0
    j0 /= np.linalg.norm(j0)

    # sign votes: kernel-basis diagonal against the two-puncture reference
    phis = model.phis
    votes = []
    diag_scale = max(np.max(np.abs(np.diag(j0))), 1e-30)
    for i in range(m):
        d = j0[i, i].imag
        ref = _reference_diag_sign(phis[i], phis[i + 1])
        if abs(d) > 1e-6 * diag_scale and abs(d) > 1e-10 and abs(ref) > 1e-10:
            votes.append(np.sign(d) * np.sign(ref))
    if votes:
        if len(set(votes)) > 1:
            raise NonUniqueForm("incoherent sign votes; perturb omega and retry")
        return votes[0] * j0

    # all diagonal votes abstained: align with a nearby perturbed solve
    if _depth >= 4:
        raise NonUniqueForm(f"form sign undetermined at omega={omega}")
    rng = np.random.default_rng(20240517 + _depth)
    delta = rng.uniform(1e-4, 3e-4, size=len(omega))
    om2 = tuple(w * np.exp(1j * d) for w, d in zip(omega, delta))
    j2 = _solve_base_form(c, om2, tol, _depth + 1)
    if j2 is None:
        raise NonUniqueForm(f"form sign undetermined at omega={omega}")
    align = np.real(np.vdot(j2, j0))
    if abs(align) < 1e-3:
        raise NonUniqueForm(f"form sign undetermined at omega={omega}")
    return np.sign(align) * j0


def _sorting_word(base: tuple[int, ...], target: tuple[int, ...]) -> Word:
    """Adjacent-transposition braid word carrying colouring base to target."""
    cur = list(base)
    word: list[int] = []
    for pos in range(len(target)):
        j = cur.index(target[pos], pos)
        while j > pos:
            cur[j - 1], cur[j] = cur[j], cur[j - 1]
            word.append(j)  # 1-based generator at (j-1, j) zero-based
            j -= 1
    if tuple(cur) != tuple(target):
        raise ValueError("colourings are not in the same orbit")
    return tuple(word)


@lru_cache(maxsize=4096)
def _cached_form(entries: tuple[int, ...], mu: int, omega_key: tuple,
                 tol: float) -> tuple[np.ndarray, bool]:
    omega = tuple(complex(re, im) for re, im in omega_key)
    c = ColouredObject(entries, mu)
    base_entries = tuple(sorted(entries))
    j_base = _solve_base_form(ColouredObject(base_entries, mu), omega, tol)
    if j_base is None:
        m = max(len(entries) - 1, 0)
        return np.zeros((m, m), dtype=complex), True
    if base_entries == entries:
        j = j_base
    else:
        word = _sorting_word(base_entries, entries)
        rep = reduced_rep(ColouredBraid(ColouredObject(base_entries, mu), word),
                          omega, tol)
        if rep.target_model.object.entries != entries:
            raise AssertionError("sorting word transports to the wrong object")
        mtx = rep.matrix
        j = mtx.conj().T @ j_base @ mtx
    degenerate = abs(np.prod([w ** i for w, i in
                              zip(omega, exponent_sums(c))]) - 1.0) <= 1e-6
    return j, degenerate


def invariant_form(c: ColouredObject, omega, tol: float = DEFAULT_TOL) -> DiskForm:
    """The skew-Hermitian form on ker(boundary_row) in the kernel basis.

    Solved from the groupoid invariance system at the sorted orbit-base
    object and transported; unit Frobenius norm at the base, sign pinned so
    the Hopf pair gives Meyer = +1 at omega = i (and coherently elsewhere).
    At points with I_c(omega) = 1 the honest degenerate limit is returned
    and flagged.
    """
    om = check_omega(omega, c.mu, tol)
    key = tuple((w.real.__round__(12), w.imag.__round__(12)) for w in om)
    om_r = tuple(complex(re, im) for re, im in key)
    form, degenerate = _cached_form(c.entries, c.mu, key, tol)
    model = PuncturedDiskModel(c, om_r, tol)
    return DiskForm(model, form, degenerate)


def graph_relation(rep: EvaluatedRep, f_src: DiskForm, f_tgt: DiskForm,
                   tol: float = DEFAULT_TOL) -> IsotropicRelation:
    """The graph of a braid's representation as an isotropic relation.

    The matrix maps target coordinates to source coordinates, so the graph
    is spanned by the columns of [[M], [I]] over the target kernel basis.
    """
    resid = rep_unitarity_residual(rep, f_src, f_tgt)
    scale = max(np.linalg.norm(f_src.form), np.linalg.norm(f_tgt.form), 1e-30)
    if resid > 1e-6 * scale:
        raise NotUnitary(f"representation not unitary for the forms "
                         f"(residual {resid:.3g})")
    src = f_src.space()
    tgt = f_tgt.space()
    m = rep.matrix
    basis = np.vstack([m, np.eye(m.shape[1], dtype=complex)])
    return IsotropicRelation(src, tgt, Subspace(relation_ambient(src, tgt), basis))
