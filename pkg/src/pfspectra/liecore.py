"""Matrix Lie algebras with trace inner products and Cartan decompositions.

Algebra elements are stored as coefficient vectors over a declared basis of
skew-symmetric matrices.  The inner product is ``<X, Y> = -ip_scale * tr(XY)``,
which is positive definite on any algebra of skew-symmetric real matrices.
Brackets are evaluated through a cached structure-constant tensor so that
repeated bracket work stays in coefficient space.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, DomainError, StructureError

# Tolerances used by construction-time validation.
SKEW_TOL = 1e-12
CLOSURE_TOL = 1e-10
JACOBI_TOL = 1e-9
ORTHO_TOL = 1e-12
SUBSPACE_GRAM_TOL = 1e-10


def _as_matrix_array(basis) -> np.ndarray:
    arr = np.array(basis, dtype=float)  # private copy; callers keep their arrays
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise DimensionError(f"basis must be a stack of square matrices, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise DimensionError("basis must contain at least one matrix")
    return arr


class MatrixLieAlgebra:
    """A compact matrix Lie algebra presented by a basis of skew matrices."""

    def __init__(self, basis, ip_scale: float, validate: bool = True):
        self._basis = _as_matrix_array(basis)
        self._basis.setflags(write=False)
        if ip_scale <= 0:
            raise DomainError(f"ip_scale must be positive, got {ip_scale}")
        self.ip_scale = float(ip_scale)
        self.n = self._basis.shape[1]
        self.dim = self._basis.shape[0]

        # Gram matrix of the basis under <X,Y> = -ip_scale*tr(XY).
        prods = np.einsum("iab,jba->ij", self._basis, self._basis)
        self._gram = -self.ip_scale * prods
        try:
            self._gram_chol = np.linalg.cholesky(self._gram)
        except np.linalg.LinAlgError:
            raise StructureError("basis is linearly dependent (Gram matrix not positive definite)")

        # Structure tensor: [B_i, B_j] = sum_k struct[i, j, k] B_k.
        raw = np.einsum("iab,jbc->ijac", self._basis, self._basis)
        brackets = raw - np.transpose(raw, (1, 0, 2, 3))
        self._struct = self._coords_of_stack(brackets.reshape(-1, self.n, self.n))
        self._struct = self._struct.reshape(self.dim, self.dim, self.dim)

        if validate:
            self._validate(brackets)

    # -- construction-time checks -------------------------------------------------

    def _validate(self, brackets: np.ndarray) -> None:
        skew = np.abs(self._basis + np.transpose(self._basis, (0, 2, 1))).max()
        if skew > SKEW_TOL:
            raise StructureError(f"basis matrices not skew-symmetric (deviation {skew:.3e})")

        recon = np.einsum("ijk,kab->ijab", self._struct, self._basis)
        closure = np.abs(brackets - recon).max()
        if closure > CLOSURE_TOL:
            raise StructureError(f"basis does not close under brackets (residual {closure:.3e})")

        # Jacobi identity, contracted in coefficient space.
        c = self._struct
        jac = (
            np.einsum("ija,akb->ijkb", c, c)
            + np.einsum("jka,aib->ijkb", c, c)
            + np.einsum("kia,ajb->ijkb", c, c)
        )
        if np.abs(jac).max() > JACOBI_TOL:
            raise StructureError(f"Jacobi identity violated (residual {np.abs(jac).max():.3e})")

        # Ad-invariance of the inner product: <[x,y],z> + <y,[x,z]> = 0.
        g = self._gram
        adinv = np.einsum("ija,ak->ijk", c, g) + np.einsum("ja,ika->ijk", g, c)
        if np.abs(adinv).max() > JACOBI_TOL:
            raise StructureError("inner product is not ad-invariant on this basis")

    # -- coefficient/matrix conversions -------------------------------------------

    def _coords_of_stack(self, mats: np.ndarray) -> np.ndarray:
        """Coefficients of a stack of matrices, via the Gram system."""
        rhs = -self.ip_scale * np.einsum("iab,mba->im", self._basis, mats)
        y = np.linalg.solve(self._gram_chol, rhs)
        return np.linalg.solve(self._gram_chol.T, y).T

    @property
    def basis(self) -> np.ndarray:
        return self._basis

    @property
    def gram(self) -> np.ndarray:
        return self._gram

    @property
    def structure_tensor(self) -> np.ndarray:
        return self._struct

    def element(self, coords) -> "Element":
        coords = np.asarray(coords, dtype=float)
        if coords.shape != (self.dim,):
            raise DimensionError(f"expected {self.dim} coefficients, got shape {coords.shape}")
        return Element(self, coords)

    def zero(self) -> "Element":
        return Element(self, np.zeros(self.dim))

    def basis_element(self, i: int) -> "Element":
        coords = np.zeros(self.dim)
        coords[i] = 1.0
        return Element(self, coords)

    def from_matrix(self, mat, tol: float = CLOSURE_TOL) -> "Element":
        """Element with the given matrix; the matrix must lie in the span."""
        mat = np.asarray(mat, dtype=float)
        if mat.shape != (self.n, self.n):
            raise DimensionError(f"expected a {self.n}x{self.n} matrix, got {mat.shape}")
        coords = self._coords_of_stack(mat[None, :, :])[0]
        recon = np.tensordot(coords, self._basis, axes=(0, 0))
        resid = np.abs(recon - mat).max()
        scale = max(1.0, np.abs(mat).max())
        if resid > tol * scale:
            raise DomainError(f"matrix is not in the algebra span (residual {resid:.3e})")
        return Element(self, coords)

    def to_matrix(self, x: "Element") -> np.ndarray:
        return np.tensordot(x.coords, self._basis, axes=(0, 0))

    # -- algebra operations --------------------------------------------------------

    def ad_matrix(self, x: "Element") -> np.ndarray:
        """Matrix of ad(x) = [x, .] acting on coefficient vectors."""
        self._check_owns(x)
        return np.einsum("i,ijk->kj", x.coords, self._struct)

    def bracket_coords(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.einsum("i,j,ijk->k", a, b, self._struct)

    def inner_coords(self, a: np.ndarray, b: np.ndarray) -> float:
        return float(a @ self._gram @ b)

    def _check_owns(self, x: "Element") -> None:
        if x.algebra is not self:
            raise DomainError("element belongs to a different algebra")


@dataclass(frozen=True)
class Element:
    """An algebra element, stored as coefficients over the declared basis."""

    algebra: MatrixLieAlgebra
    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", np.array(self.coords, dtype=float))
        self.coords.setflags(write=False)

    @property
    def matrix(self) -> np.ndarray:
        return self.algebra.to_matrix(self)

    def norm(self) -> float:
        return float(np.sqrt(max(self.algebra.inner_coords(self.coords, self.coords), 0.0)))

    def __add__(self, other: "Element") -> "Element":
        self.algebra._check_owns(other)
        return Element(self.algebra, self.coords + other.coords)

    def __sub__(self, other: "Element") -> "Element":
        self.algebra._check_owns(other)
        return Element(self.algebra, self.coords - other.coords)

    def __neg__(self) -> "Element":
        return Element(self.algebra, -self.coords)

    def __mul__(self, s: float) -> "Element":
        return Element(self.algebra, self.coords * float(s))

    __rmul__ = __mul__


def bracket(x: Element, y: Element) -> Element:
    """Lie bracket [x, y], evaluated through the structure tensor."""
    if x.algebra is not y.algebra:
        raise DomainError("bracket requires elements of the same algebra")
    return Element(x.algebra, x.algebra.bracket_coords(x.coords, y.coords))


def inner(x: Element, y: Element) -> float:
    """Ad-invariant inner product -ip_scale * tr(xy)."""
    if x.algebra is not y.algebra:
        raise DomainError("inner product requires elements of the same algebra")
    return x.algebra.inner_coords(x.coords, y.coords)


def build_so(n: int, ip_scale: float = 0.5) -> MatrixLieAlgebra:
    """so(n) with basis E_ij = e_i e_j^T - e_j e_i^T, i < j (row-major order).

    With the default scale 1/2 this basis is orthonormal.
    """
    if n < 2:
        raise DimensionError(f"so(n) needs n >= 2, got {n}")
    basis = []
    for i in range(n):
        for j in range(i + 1, n):
            m = np.zeros((n, n))
            m[i, j] = 1.0
            m[j, i] = -1.0
            basis.append(m)
    return MatrixLieAlgebra(np.array(basis), ip_scale)


def so_pair_index(n: int, i: int, j: int) -> int:
    """Index of E_ij (i < j) in the build_so(n) basis ordering."""
    if not (0 <= i < j < n):
        raise DomainError(f"need 0 <= i < j < {n}, got ({i}, {j})")
    return i * (2 * n - i - 1) // 2 + (j - i - 1)


def gram_schmidt(algebra: MatrixLieAlgebra, vectors, drop_tol: float = 1e-12):
    """Modified Gram-Schmidt with one re-orthogonalization pass.

    Returns coefficient vectors orthonormal under the algebra inner product;
    input vectors whose residual falls below drop_tol (relative to their
    original norm) are dropped.
    """
    g = algebra.gram
    out = []
    for v in vectors:
        v = np.array(v, dtype=float)
        orig = np.sqrt(max(v @ g @ v, 0.0))
        if orig == 0.0:
            continue
        for _ in range(2):  # second pass controls cancellation
            for u in out:
                v = v - (u @ g @ v) * u
        nrm = np.sqrt(max(v @ g @ v, 0.0))
        if nrm > drop_tol * orig:
            out.append(v / nrm)
    return out


@dataclass(frozen=True)
class Subspace:
    """A subspace with an orthonormal basis of coefficient vectors."""

    algebra: MatrixLieAlgebra
    basis: np.ndarray  # shape (dim_subspace, dim_algebra), orthonormal rows

    def __post_init__(self):
        arr = np.array(self.basis, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != self.algebra.dim:
            raise DimensionError(
                f"subspace basis must have shape (k, {self.algebra.dim}), got {arr.shape}"
            )
        gram = arr @ self.algebra.gram @ arr.T
        if arr.shape[0] and np.abs(gram - np.eye(arr.shape[0])).max() > SUBSPACE_GRAM_TOL:
            raise StructureError("subspace basis is not orthonormal")
        object.__setattr__(self, "basis", arr)
        arr.setflags(write=False)

    @classmethod
    def span(cls, algebra: MatrixLieAlgebra, vectors) -> "Subspace":
        """Subspace spanned by arbitrary coefficient vectors (orthonormalized)."""
        basis = gram_schmidt(algebra, vectors)
        arr = np.array(basis).reshape(len(basis), algebra.dim)
        return cls(algebra, arr)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def project_coords(self, coords: np.ndarray) -> np.ndarray:
        if self.dim == 0:
            return np.zeros(self.algebra.dim)
        weights = self.basis @ (self.algebra.gram @ coords)
        return weights @ self.basis

    def coefficients(self, coords: np.ndarray) -> np.ndarray:
        """Components of a vector along the orthonormal basis."""
        return self.basis @ (self.algebra.gram @ coords)

    def contains(self, x: Element, tol: float = 1e-10) -> bool:
        resid = x.coords - self.project_coords(x.coords)
        return np.sqrt(max(self.algebra.inner_coords(resid, resid), 0.0)) <= tol * max(
            1.0, x.norm()
        )


def project(x: Element, subspace: Subspace) -> Element:
    """Orthogonal projection of x onto the subspace (total; zero subspace -> 0)."""
    if x.algebra is not subspace.algebra:
        raise DomainError("projection requires a subspace of the same algebra")
    return Element(x.algebra, subspace.project_coords(x.coords))


@dataclass(frozen=True)
class CartanDecomposition:
    """Splitting g = k + m into +1/-1 eigenspaces of an involution.

    The involution acts by conjugation, X -> P X P^{-1}, with P*P = identity.
    k is the fixed subalgebra, m its orthogonal complement, and the pieces
    satisfy [k,k] in k, [k,m] in m, [m,m] in k.
    """

    algebra: MatrixLieAlgebra
    p_matrix: np.ndarray
    k: Subspace = field(init=False)
    m: Subspace = field(init=False)

    def __post_init__(self):
        alg = self.algebra
        p = np.array(self.p_matrix, dtype=float)
        if p.shape != (alg.n, alg.n):
            raise DimensionError(f"involution matrix must be {alg.n}x{alg.n}, got {p.shape}")
        if np.abs(p @ p - np.eye(alg.n)).max() > 1e-12:
            raise DomainError("involution matrix must square to the identity")
        object.__setattr__(self, "p_matrix", p)
        p.setflags(write=False)

        # Matrix of the differential X -> P X P on coefficient vectors.
        conj = np.einsum("ab,ibc,cd->iad", p, alg.basis, p)
        try:
            t = alg._coords_of_stack(conj).T
        except Exception as exc:  # pragma: no cover - defensive
            raise StructureError(f"involution does not preserve the algebra: {exc}")
        recon = np.einsum("ki,kab->iab", t, alg.basis)
        if np.abs(recon - conj).max() > 1e-9:
            raise StructureError("conjugation by P does not preserve the algebra span")
        if np.abs(t @ t - np.eye(alg.dim)).max() > 1e-9:
            raise StructureError("differential of the involution does not square to identity")

        plus = gram_schmidt(alg, list((np.eye(alg.dim) + t).T / 2.0))
        minus = gram_schmidt(alg, list((np.eye(alg.dim) - t).T / 2.0))
        k = Subspace(alg, np.array(plus).reshape(len(plus), alg.dim))
        m = Subspace(alg, np.array(minus).reshape(len(minus), alg.dim))
        if k.dim + m.dim != alg.dim:
            raise StructureError(
                f"eigenspace dimensions {k.dim}+{m.dim} do not fill the algebra ({alg.dim})"
            )
        cross = k.basis @ alg.gram @ m.basis.T if k.dim and m.dim else np.zeros((0, 0))
        if cross.size and np.abs(cross).max() > 1e-10:
            raise StructureError("k and m are not orthogonal; involution is not an isometry")
        self._check_relations(k, m)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "m", m)

    def _check_relations(self, k: Subspace, m: Subspace) -> None:
        alg = self.algebra

        def max_leak(a: Subspace, b: Subspace, target: Subspace) -> float:
            worst = 0.0
            for u in a.basis:
                for v in b.basis:
                    w = alg.bracket_coords(u, v)
                    resid = w - target.project_coords(w)
                    worst = max(worst, np.sqrt(max(alg.inner_coords(resid, resid), 0.0)))
            return worst

        checks = [max_leak(k, k, k), max_leak(k, m, m), max_leak(m, m, k)]
        if max(checks) > CLOSURE_TOL:
            raise StructureError(
                f"Cartan relations fail (residuals {[f'{c:.2e}' for c in checks]})"
            )

    def project_k(self, x: Element) -> Element:
        return project(x, self.k)

    def project_m(self, x: Element) -> Element:
        return project(x, self.m)


def cartan_decompose(algebra: MatrixLieAlgebra, p_matrix) -> CartanDecomposition:
    """Cartan decomposition induced by conjugation with the involutive matrix P."""
    return CartanDecomposition(algebra, np.asarray(p_matrix, dtype=float))
