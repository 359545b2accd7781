"""Independent numerical routes to the principal-curvature spectrum.

Three cross-checks live here, each avoiding the closed-form eigenvalue
formulas they are meant to validate:

* truncated operator blocks on sqrt(2)-normalized sine/cosine modes, whose
  eigenvalues converge to the mu families as the cutoff grows;
* raw shape-operator application on a time grid (bracket + quadrature),
  compared in grid-L2 against the closed-form images of each basis label;
* a finite group-level assembly on k + TN from raw brackets, eigensolved
  and matched against the predicted {0, lambda, kappa_pm} multiset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .adspec import AdEigenstructure, paired_bases
from .errors import DimensionError, DomainError, StructureError
from .liecore import Element, Subspace, build_so, cartan_decompose, gram_schmidt
from .spectra import (
    GroupSpectrum,
    PrincipalSpectrum,
    SubmanifoldSpectralData,
    assemble_group_spectrum,
    mu,
    mu_eigenfunction_coeffs,
)

SYMMETRY_TOL = 1e-12
TANGENT_TOL = 1e-8
BLOCK_MEMBERSHIP_TOL = 1e-8
PERP_LABEL = "perp"


@dataclass(frozen=True)
class FourierBasisLabel:
    """Identifier of one tangent basis path.

    kind is one of 'k0_sin', 'm_const', 'm_cos', 'k_nu_sin', 'm_nu_const',
    'm_nu_cos'.  ``lam`` is a float for tangent directions or the string
    'perp' for normal-block partners; ``mode`` is the positive Fourier index
    n (absent for constants).  Sine and cosine modes carry the sqrt(2)
    factor that makes the basis orthonormal in path L2.
    """

    kind: str
    index: int
    nu: float | None = None
    lam: object = None
    mode: int | None = None

    def describe(self) -> str:
        parts = [self.kind, f"i={self.index}"]
        if self.nu is not None:
            parts.append(f"nu={self.nu:.6g}")
        if self.lam is not None:
            parts.append("perp" if self.lam == PERP_LABEL else f"lam={self.lam:.6g}")
        if self.mode is not None:
            parts.append(f"n={self.mode}")
        return " ".join(parts)


@dataclass(frozen=True)
class TruncatedOperator:
    """A finite symmetric matrix block of the path-space shape operator."""

    labels: tuple
    matrix: np.ndarray
    cutoff: int

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] != len(self.labels):
            raise DimensionError("matrix shape does not match label count")
        asym = np.abs(mat - mat.T).max() if mat.size else 0.0
        if asym > SYMMETRY_TOL:
            raise StructureError(f"assembled block is not symmetric (deviation {asym:.3e})")
        object.__setattr__(self, "matrix", mat)
        mat.setflags(write=False)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def to_json(self) -> dict:
        return {
            "cutoff": self.cutoff,
            "labels": [lb.describe() for lb in self.labels],
            "matrix": self.matrix.tolist(),
        }


def build_mu_block(nu: float, lam: float, cutoff: int) -> TruncatedOperator:
    """Truncated block on {y} + {sqrt2 x sin n pi t} + {sqrt2 y cos n pi t}.

    The constant direction couples to each sine mode with sqrt(2)*nu/(n*pi);
    sine and cosine modes of equal n couple with -nu/(n*pi); the only
    diagonal entry is lambda on the constant.  Eigenvalues approximate the
    mu(nu, lam, m) family as the cutoff grows.
    """
    if nu <= 0:
        raise DomainError(f"frequency must be positive, got {nu}")
    if cutoff < 1:
        raise DomainError("cutoff must be at least 1")
    size = 2 * cutoff + 1
    mat = np.zeros((size, size))
    mat[0, 0] = lam
    modes = np.arange(1, cutoff + 1)
    coupling = nu / (modes * math.pi)
    mat[0, 1 : cutoff + 1] = math.sqrt(2.0) * coupling
    mat[1 : cutoff + 1, 0] = math.sqrt(2.0) * coupling
    idx = np.arange(cutoff)
    mat[1 + idx, 1 + cutoff + idx] = -coupling
    mat[1 + cutoff + idx, 1 + idx] = -coupling
    labels = [FourierBasisLabel("m_nu_const", 0, nu, lam)]
    labels += [FourierBasisLabel("k_nu_sin", 0, nu, lam, int(n)) for n in modes]
    labels += [FourierBasisLabel("m_nu_cos", 0, nu, lam, int(n)) for n in modes]
    return TruncatedOperator(tuple(labels), mat, cutoff)


def build_harmonic_block(nu: float, n: int) -> TruncatedOperator:
    """Exact 2x2 block of a normal-frequency mode pair: eigenvalues +-nu/(n*pi)."""
    if nu <= 0:
        raise DomainError(f"frequency must be positive, got {nu}")
    if n < 1:
        raise DomainError("mode index must be a positive integer")
    c = nu / (n * math.pi)
    mat = np.array([[0.0, -c], [-c, 0.0]])
    labels = (
        FourierBasisLabel("k_nu_sin", 0, nu, PERP_LABEL, n),
        FourierBasisLabel("m_nu_cos", 0, nu, PERP_LABEL, n),
    )
    return TruncatedOperator(labels, mat, n)


def mu_block_residual(nu: float, lam: float, m: int, cutoff: int) -> float:
    """Relative residual |A v - mu v| / |v| of the predicted eigenvector.

    v is the truncated coefficient vector of the mu(nu, lam, m)
    eigenfunction, rescaled to the orthonormal mode basis.
    """
    op = build_mu_block(nu, lam, cutoff)
    c, a, b = mu_eigenfunction_coeffs(nu, lam, m, cutoff)
    v = np.concatenate(([c], a / math.sqrt(2.0), b / math.sqrt(2.0)))
    val = mu(nu, lam, m)
    resid = op.matrix @ v - val * v
    return float(np.linalg.norm(resid) / np.linalg.norm(v))


# ---------------------------------------------------------------------------
# Curvature-adapted geometry container
# ---------------------------------------------------------------------------


def _orthonormal_check(alg, elements, what: str) -> None:
    if not elements:
        return
    mat = np.array([e.coords for e in elements])
    gram = mat @ alg.gram @ mat.T
    if np.abs(gram - np.eye(len(elements))).max() > 1e-9:
        raise StructureError(f"{what} vectors are not orthonormal")


class CurvatureAdaptedData:
    """Base-submanifold data aligned with the frequency blocks of ad(xi).

    ``tangent0`` lists (lambda, [y]) inside the ad-kernel of m; ``tangent``
    lists (nu, lambda, [y]) with each y in the frequency block m_nu.  The
    remaining directions of every block are normal.  The x-partner of each
    tangent or normal y is (1/nu)[xi, y], which lands in k_nu.
    """

    def __init__(self, ad: AdEigenstructure, tangent0, tangent):
        self.ad = ad
        self.cd = ad.cd
        alg = self.cd.algebra
        xi = ad.xi

        self.tangent0 = [(float(lam), list(ys)) for lam, ys in tangent0]
        self.tangent = [(float(nu), float(lam), list(ys)) for nu, lam, ys in tangent]

        all_tangent = [y for _, ys in self.tangent0 for y in ys]
        all_tangent += [y for _, _, ys in self.tangent for y in ys]
        _orthonormal_check(alg, all_tangent, "tangent")

        m0_span = Subspace(
            alg, np.array([y.coords for y in ad.m0_basis]).reshape(ad.dim_m0, alg.dim)
        )
        for lam, ys in self.tangent0:
            for y in ys:
                if not m0_span.contains(y, BLOCK_MEMBERSHIP_TOL):
                    raise StructureError(
                        f"kernel tangent vector for lambda={lam:.6g} is not in m_0"
                    )
                if abs(alg.inner_coords(y.coords, xi.coords)) > TANGENT_TOL * xi.norm():
                    raise DomainError("tangent vectors must be orthogonal to xi")

        self._block_spans = {}
        for b in ad.blocks:
            self._block_spans[b.nu] = Subspace(
                alg, np.array([y.coords for y in b.y_basis]).reshape(b.mult, alg.dim)
            )
        for nu, lam, ys in self.tangent:
            span = self._block_spans.get(nu)
            if span is None:
                raise DomainError(f"no frequency block at nu={nu:.6g}")
            for y in ys:
                if not span.contains(y, BLOCK_MEMBERSHIP_TOL):
                    raise StructureError(
                        f"tangent vector for (nu={nu:.6g}, lambda={lam:.6g}) "
                        "does not lie in its frequency block"
                    )

        # Per-block normal complements (within m_0 and within each m_nu).
        def complement(span_vectors, used):
            kept = list(used)
            out = []
            for v in span_vectors:
                w = np.array(v, dtype=float)
                for u in kept:
                    w = w - (u @ alg.gram @ w) * u
                nrm = np.sqrt(max(w @ alg.gram @ w, 0.0))
                if nrm > 1e-8:
                    w /= nrm
                    kept.append(w)
                    out.append(w)
            return out

        used0 = [y.coords for _, ys in self.tangent0 for y in ys]
        self.perp0 = [alg.element(v) for v in complement([y.coords for y in ad.m0_basis], used0)]
        self.perp = []
        for b in ad.blocks:
            used = [
                y.coords for nu, _, ys in self.tangent for y in ys if nu == b.nu
            ]
            vecs = complement([y.coords for y in b.y_basis], used)
            self.perp.append((b.nu, [alg.element(v) for v in vecs]))

        self._xi = xi
        self._tangent_space = Subspace.span(alg, [y.coords for y in all_tangent])
        normals = [y.coords for y in self.perp0]
        normals += [y.coords for _, ys in self.perp for y in ys]
        self._normal_space = Subspace.span(alg, normals)
        if self._tangent_space.dim + self._normal_space.dim != self.cd.m.dim:
            raise StructureError("tangent and normal spaces do not fill m")

    @property
    def xi(self) -> Element:
        return self._xi

    @property
    def tangent_space(self) -> Subspace:
        return self._tangent_space

    @property
    def normal_space(self) -> Subspace:
        return self._normal_space

    def x_partner(self, nu: float, y: Element) -> Element:
        alg = self.cd.algebra
        return Element(alg, alg.bracket_coords(self._xi.coords, y.coords) / nu)

    def perp_project(self, coords: np.ndarray) -> np.ndarray:
        return self._normal_space.project_coords(coords)

    def base_shape_apply(self, y: Element) -> Element:
        """Shape operator of the base submanifold: lambda on each block."""
        alg = self.cd.algebra
        out = np.zeros(alg.dim)
        recon = np.zeros(alg.dim)
        for lam, ys in self.tangent0:
            for e in ys:
                w = alg.inner_coords(e.coords, y.coords)
                out += lam * w * e.coords
                recon += w * e.coords
        for _, lam, ys in self.tangent:
            for e in ys:
                w = alg.inner_coords(e.coords, y.coords)
                out += lam * w * e.coords
                recon += w * e.coords
        resid = y.coords - recon
        leak = np.sqrt(max(alg.inner_coords(resid, resid), 0.0))
        if leak > TANGENT_TOL * max(1.0, y.norm()):
            raise DomainError(f"vector is not tangent (normal residual {leak:.3e})")
        return Element(alg, out)

    def spectral_data(self) -> SubmanifoldSpectralData:
        freq_mult = self.ad.frequency_multiplicities()
        mult0 = [(lam, len(ys)) for lam, ys in self.tangent0 if ys]
        mult = [(nu, lam, len(ys)) for nu, lam, ys in self.tangent if ys]
        perp = [(0.0, len(self.perp0))]
        perp += [(nu, len(ys)) for nu, ys in self.perp]
        return SubmanifoldSpectralData.from_maps(
            freq_mult, mult0, mult, perp, self.ad.dim_m0, self.ad.dim_k0, ad=self.ad
        )

    # -- tangent Fourier labels and their decomposed paths ------------------------

    def fourier_labels(self, n_max: int):
        """Every tangent basis label with Fourier modes up to n_max."""
        labels = []
        for i in range(self.ad.dim_k0):
            labels += [
                FourierBasisLabel("k0_sin", i, mode=n) for n in range(1, n_max + 1)
            ]
        j = 0
        for lam, ys in self.tangent0:
            for _ in ys:
                labels.append(FourierBasisLabel("m_const", j, lam=lam))
                labels += [
                    FourierBasisLabel("m_cos", j, lam=lam, mode=n)
                    for n in range(1, n_max + 1)
                ]
                j += 1
        for r, _ in enumerate(self.perp0):
            labels += [
                FourierBasisLabel("m_cos", j + r, lam=PERP_LABEL, mode=n)
                for n in range(1, n_max + 1)
            ]
        for nu, lam, ys in self.tangent:
            for i, _ in enumerate(ys):
                labels.append(FourierBasisLabel("m_nu_const", i, nu, lam))
                for n in range(1, n_max + 1):
                    labels.append(FourierBasisLabel("k_nu_sin", i, nu, lam, n))
                    labels.append(FourierBasisLabel("m_nu_cos", i, nu, lam, n))
        for nu, ys in self.perp:
            for i, _ in enumerate(ys):
                for n in range(1, n_max + 1):
                    labels.append(FourierBasisLabel("k_nu_sin", i, nu, PERP_LABEL, n))
                    labels.append(FourierBasisLabel("m_nu_cos", i, nu, PERP_LABEL, n))
        return labels

    def _label_vectors(self, label: FourierBasisLabel):
        """The (x, y) element pair behind a label (x in k, y in m)."""
        alg = self.cd.algebra
        if label.kind == "k0_sin":
            return self.ad.k0_basis[label.index], None
        if label.kind in ("m_const", "m_cos"):
            if label.lam == PERP_LABEL:
                y = self.perp0[label.index - sum(len(ys) for _, ys in self.tangent0)]
            else:
                flat = [y for _, ys in self.tangent0 for y in ys]
                y = flat[label.index]
            return None, y
        nu = label.nu
        if label.lam == PERP_LABEL:
            ys = dict(self.perp)[nu]
        else:
            ys = next(
                ys for bnu, lam, ys in self.tangent if bnu == nu and lam == label.lam
            )
        y = ys[label.index]
        return self.x_partner(nu, y), y


@dataclass(frozen=True)
class DecomposedPath:
    """A tangent path split as -Q' + constant x + constant y.

    ``q`` holds the primitive Q per node (coefficient vectors) and must
    vanish at both endpoints; x is a constant k-direction and y a constant
    tangent direction of the base submanifold.
    """

    q: np.ndarray  # (grid, dim)
    x: Element
    y: Element

    @property
    def grid(self) -> int:
        return self.q.shape[0]


def label_decomposed_path(
    data: CurvatureAdaptedData, label: FourierBasisLabel, grid: int
) -> DecomposedPath:
    """Realize a Fourier basis label as a decomposed grid path.

    Sine labels use the primitive Z = (sqrt2/(n pi)) x (cos(n pi t) - 1),
    split as Q = Z - t Z(1) with constant part -Z(1); cosine labels are pure
    -Q' with Q = -(sqrt2/(n pi)) y sin(n pi t); constants are pure y.
    """
    alg = data.cd.algebra
    t = np.linspace(0.0, 1.0, grid)
    x_el, y_el = data._label_vectors(label)
    zero = np.zeros((grid, alg.dim))
    if label.kind in ("k0_sin", "k_nu_sin"):
        n = label.mode
        base = x_el.coords
        scale = math.sqrt(2.0) / (n * math.pi)
        z = scale * np.outer(np.cos(n * math.pi * t) - 1.0, base)
        z1 = scale * (((-1.0) ** n) - 1.0) * base
        q = z - np.outer(t, z1)
        return DecomposedPath(q, Element(alg, -z1), alg.zero())
    if label.kind in ("m_const", "m_nu_const"):
        return DecomposedPath(zero, alg.zero(), y_el)
    if label.kind in ("m_cos", "m_nu_cos"):
        n = label.mode
        scale = math.sqrt(2.0) / (n * math.pi)
        q = -scale * np.outer(np.sin(n * math.pi * t), y_el.coords)
        return DecomposedPath(q, alg.zero(), alg.zero())
    raise DomainError(f"unknown label kind {label.kind!r}")


def label_closed_form(
    data: CurvatureAdaptedData, label: FourierBasisLabel, grid: int
) -> np.ndarray:
    """Grid image of a basis label under the path-space shape operator.

    These are the six closed forms: kernel sines and kernel-side cosines map
    to zero; kernel constants scale by lambda; frequency-block labels mix
    their (x, y) pair through sine/cosine factors with weight nu/(n*pi).
    """
    t = np.linspace(0.0, 1.0, grid)
    alg = data.cd.algebra
    x_el, y_el = data._label_vectors(label)
    zero = np.zeros((grid, alg.dim))
    if label.kind == "k0_sin":
        return zero
    if label.kind == "m_const":
        return np.outer(np.ones(grid), label.lam * y_el.coords)
    if label.kind == "m_cos":
        return zero
    nu, n = label.nu, label.mode
    root2 = math.sqrt(2.0)
    if label.kind == "k_nu_sin":
        coef = -nu / (n * math.pi) * root2
        if label.lam == PERP_LABEL:
            return coef * np.outer(np.cos(n * math.pi * t), y_el.coords)
        return coef * np.outer(np.cos(n * math.pi * t) - 1.0, y_el.coords)
    if label.kind == "m_nu_const":
        const = np.outer(np.ones(grid), label.lam * y_el.coords)
        return const + nu * np.outer(1.0 - t, x_el.coords)
    if label.kind == "m_nu_cos":
        coef = -nu / (n * math.pi) * root2
        return coef * np.outer(np.sin(n * math.pi * t), x_el.coords)
    raise DomainError(f"unknown label kind {label.kind!r}")


def shape_apply_raw(
    data: CurvatureAdaptedData, path: DecomposedPath, boundary_tol: float = 1e-8
) -> np.ndarray:
    """Apply the path-space shape operator from its raw block formulas.

    For a decomposed path -Q' + x + y the image is

        [xi, Q(t)] - perp([xi, int Q])
        + (1/2) perp([xi, x]) - t [xi, x]
        + A_base(y) + (1 - t) [xi, y]

    with perp the projection onto the normal space of the base submanifold
    inside m.  The integral uses trapezoid quadrature on the given grid.
    """
    alg = data.cd.algebra
    grid = path.grid
    if grid < 2:
        raise DimensionError("grid must have at least 2 nodes")
    if path.q.shape != (grid, alg.dim):
        raise DimensionError("q has the wrong shape")
    qn = np.linalg.norm(path.q, axis=1)
    scale = max(1.0, qn.max() if qn.size else 0.0)
    if max(np.linalg.norm(path.q[0]), np.linalg.norm(path.q[-1])) > boundary_tol * scale:
        raise DomainError("primitive Q must vanish at both endpoints")
    leak = path.x.coords - data.cd.k.project_coords(path.x.coords)
    if np.sqrt(max(alg.inner_coords(leak, leak), 0.0)) > TANGENT_TOL * max(1.0, path.x.norm()):
        raise DomainError("constant part x must lie in k")
    # base_shape_apply rejects y with a normal component.
    ay = data.base_shape_apply(path.y)

    t = np.linspace(0.0, 1.0, grid)
    admat = alg.ad_matrix(data.xi)
    bracket_q = path.q @ admat.T
    q_int = np.trapezoid(path.q, t, axis=0)
    perp_int = data.perp_project(admat @ q_int)

    bx = admat @ path.x.coords
    by = admat @ path.y.coords
    out = bracket_q - perp_int[None, :]
    out += 0.5 * data.perp_project(bx)[None, :] - np.outer(t, bx)
    out += ay.coords[None, :] + np.outer(1.0 - t, by)
    return out


def grid_l2_norm(values: np.ndarray, alg) -> float:
    """Trapezoid L2 norm of a grid path of coefficient vectors."""
    grid = values.shape[0]
    t = np.linspace(0.0, 1.0, grid)
    sq = np.einsum("ti,ij,tj->t", values, alg.gram, values)
    return float(math.sqrt(max(np.trapezoid(sq, t), 0.0)))


# ---------------------------------------------------------------------------
# Finite group-level oracle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MultisetMatch:
    predicted: float
    predicted_mult: int
    computed: tuple
    max_abs_err: float
    ok: bool


@dataclass(frozen=True)
class OracleReport:
    matches: tuple
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "detail": self.detail,
            "matches": [
                {
                    "predicted": m.predicted,
                    "mult": m.predicted_mult,
                    "computed": list(m.computed),
                    "max_abs_err": m.max_abs_err,
                    "ok": m.ok,
                }
                for m in self.matches
            ],
        }


def group_shape_matrix(data: CurvatureAdaptedData) -> np.ndarray:
    """Shape operator of the group-level preimage on k + TN, from brackets.

    Columns: for u in k, -(1/2) P_TN([xi, u]); for tangent y, the base image
    plus (1/2) P_k([xi, y]).  The assembled matrix is symmetric because the
    inner product is ad-invariant.
    """
    alg = data.cd.algebra
    k_rows = data.cd.k.basis
    t_rows = data.tangent_space.basis
    basis = np.vstack([k_rows, t_rows]) if t_rows.size else k_rows
    dim_k = k_rows.shape[0]
    admat = alg.ad_matrix(data.xi)

    images = []
    for i, row in enumerate(basis):
        br = admat @ row
        if i < dim_k:
            img = -0.5 * data.tangent_space.project_coords(br)
        else:
            img = data.base_shape_apply(alg.element(row)).coords
            img = img + 0.5 * data.cd.k.project_coords(br)
        images.append(img)
    images = np.array(images)
    mat = basis @ alg.gram @ images.T  # mat[a, b] = <e_a, A e_b>
    asym = np.abs(mat - mat.T).max() if mat.size else 0.0
    if asym > 1e-9:
        raise StructureError(f"group-level assembly is not symmetric ({asym:.3e})")
    return 0.5 * (mat + mat.T)


def match_multisets(computed: np.ndarray, expected, tol: float) -> OracleReport:
    """Greedily match computed eigenvalues against (value, mult) predictions."""
    order = np.argsort(computed)
    comp = computed[order]
    used = np.zeros(len(comp), dtype=bool)
    matches = []
    ok_all = True
    for value, mult in sorted(expected, key=lambda vm: (-abs(vm[0]), vm[0])):
        taken = []
        worst = 0.0
        for _ in range(mult):
            cand = np.where(~used)[0]
            if cand.size == 0:
                ok_all = False
                worst = math.inf
                break
            best = cand[np.argmin(np.abs(comp[cand] - value))]
            used[best] = True
            taken.append(float(comp[best]))
            worst = max(worst, float(abs(comp[best] - value)))
        ok = bool(worst <= tol)
        ok_all &= ok
        matches.append(MultisetMatch(value, mult, tuple(taken), worst, ok))
    if used.size and not used.all():
        ok_all = False
        detail = f"{int((~used).sum())} computed eigenvalue(s) unaccounted for"
    else:
        detail = ""
    return OracleReport(tuple(matches), bool(ok_all), detail)


def finite_group_oracle(data: CurvatureAdaptedData, tol: float = 1e-8) -> OracleReport:
    """Eigensolve the raw group-level assembly and match the predicted multiset."""
    mat = group_shape_matrix(data)
    computed = np.linalg.eigvalsh(mat)
    predicted = assemble_group_spectrum(data.spectral_data()).entries
    return match_multisets(computed, predicted, tol)


# ---------------------------------------------------------------------------
# Spectrum comparison for truncated blocks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectralWindow:
    m_max: int = 2
    n_max: int = 3
    tol_abs: float = 1e-10
    tol_rel: float = 1e-2


@dataclass(frozen=True)
class MatchEntry:
    descriptor: str
    predicted: float
    computed: float
    abs_err: float
    rel_err: float
    ok: bool


@dataclass(frozen=True)
class MatchReport:
    block: str
    entries: tuple
    passed: bool

    def to_json(self) -> dict:
        return {
            "block": self.block,
            "passed": self.passed,
            "entries": [
                {
                    "descriptor": e.descriptor,
                    "predicted": e.predicted,
                    "computed": e.computed,
                    "abs_err": e.abs_err,
                    "rel_err": e.rel_err,
                    "ok": e.ok,
                }
                for e in self.entries
            ],
        }


def compare_spectra(
    op: TruncatedOperator, spectrum: PrincipalSpectrum, window: SpectralWindow
) -> MatchReport:
    """Match a truncated block's eigenvalues against the predicted family.

    Predicted values come from the spectrum family matching the block's
    labels (mu families over |m| <= m_max, harmonic pairs at the block's
    mode).  Matching is greedy from the largest |predicted| down, each
    computed eigenvalue consumed at most once, ties resolved toward the
    smaller index.  Mu entries pass at tol_rel relative error, exact
    families at tol_abs absolute error.
    """
    first = op.labels[0]
    computed = op.eigenvalues()
    predicted = []
    if first.lam == PERP_LABEL:
        n = first.mode
        fams = [
            f
            for f in spectrum.by_kind("harmonic")
            if abs(f.nu - first.nu) <= 1e-9 * max(1.0, first.nu)
        ]
        if not fams:
            raise DomainError("spectrum has no harmonic family at this block's nu")
        for sign in (1, -1):
            predicted.append((f"harmonic n={sign * n}", fams[0].value(sign * n), True))
        block = f"harmonic nu={first.nu:.6g} n={n}"
    else:
        fams = [
            f
            for f in spectrum.by_kind("mu")
            if abs(f.nu - first.nu) <= 1e-9 * max(1.0, first.nu)
            and abs(f.lam - first.lam) <= 1e-9 * max(1.0, abs(first.lam))
        ]
        if not fams:
            raise DomainError("spectrum has no mu family at this block's (nu, lambda)")
        for m in range(-window.m_max, window.m_max + 1):
            predicted.append((f"mu m={m}", fams[0].value(m), False))
        block = f"mu nu={first.nu:.6g} lambda={first.lam:.6g}"

    used = np.zeros(len(computed), dtype=bool)
    entries = []
    ok_all = True
    for desc, value, exact in sorted(predicted, key=lambda p: -abs(p[1])):
        cand = np.where(~used)[0]
        if cand.size == 0:
            entries.append(MatchEntry(desc, value, math.nan, math.inf, math.inf, False))
            ok_all = False
            continue
        best = cand[np.argmin(np.abs(computed[cand] - value))]
        used[best] = True
        got = float(computed[best])
        abs_err = abs(got - value)
        rel_err = abs_err / max(abs(value), 1e-300)
        ok = abs_err <= window.tol_abs if exact else rel_err <= window.tol_rel
        ok_all &= ok
        entries.append(MatchEntry(desc, value, got, abs_err, rel_err, ok))
    return MatchReport(block, tuple(entries), bool(ok_all))


# ---------------------------------------------------------------------------
# Random sphere-type geometry (rank-one symmetric pair)
# ---------------------------------------------------------------------------


def sphere_pair(l: int):
    """The pair (so(l+1), so(l)) with the last coordinate axis flipped."""
    alg = build_so(l + 1)
    p = np.eye(l + 1)
    p[-1, -1] = -1.0
    return cartan_decompose(alg, p)


def sphere_geometry(
    l: int, lam_mults, rng: np.random.Generator, xi_scale: float = 1.0
) -> CurvatureAdaptedData:
    """Random curvature-adapted data on the rank-one pair (so(l+1), so(l)).

    Draws a random normal direction xi of the requested norm and a random
    orthonormal tangent frame orthogonal to xi, assigning ``lam_mults`` =
    [(lambda, mult), ...] eigenvalues of the base shape operator.  The
    total tangent dimension must be at most l - 1.
    """
    cd = sphere_pair(l)
    alg = cd.algebra
    dims = sum(m for _, m in lam_mults)
    if dims > l - 1:
        raise DomainError(f"tangent dimension {dims} exceeds l - 1 = {l - 1}")
    raw = rng.standard_normal(cd.m.dim) @ cd.m.basis
    xi = alg.element(raw)
    xi = (xi_scale / xi.norm()) * xi
    ad = paired_bases(cd, xi)
    if len(ad.blocks) != 1:
        raise StructureError("rank-one pair should produce exactly one frequency")
    block = ad.blocks[0]

    # Random orthonormal tangent frame inside the block's y-span.
    span = np.array([y.coords for y in block.y_basis])
    mix = rng.standard_normal((block.mult, block.mult))
    qmat, _ = np.linalg.qr(mix)
    frame = qmat[:dims] @ span
    tangent = []
    pos = 0
    for lam, m in lam_mults:
        ys = [alg.element(frame[pos + i]) for i in range(m)]
        tangent.append((block.nu, lam, ys))
        pos += m
    return CurvatureAdaptedData(ad, tangent0=[], tangent=tangent)


def split_pair(p: int, q: int):
    """The pair (so(p+q), so(p) + so(q)) from flipping the last q axes."""
    alg = build_so(p + q)
    refl = np.diag(np.concatenate([np.ones(p), -np.ones(q)]))
    return cartan_decompose(alg, refl)


def split_geometry(
    p: int,
    q: int,
    rng: np.random.Generator,
    tangent0_lams=(),
    block_lams=(),
    xi_scale: float = 1.0,
) -> CurvatureAdaptedData:
    """Random curvature-adapted data on the rank-min(p,q) split pair.

    A generic normal direction xi has an ad-kernel of dimension min(p, q)
    inside m, so kernel tangent directions exist as soon as min(p, q) >= 2.
    ``tangent0_lams`` assigns one base eigenvalue per kernel direction
    (at most min(p,q) - 1 of them, keeping xi normal); ``block_lams``
    assigns one eigenvalue to a single direction of each of the first
    len(block_lams) frequency blocks.  Everything unassigned is normal.
    """
    cd = split_pair(p, q)
    alg = cd.algebra
    raw = rng.standard_normal(cd.m.dim) @ cd.m.basis
    xi = alg.element(raw)
    xi = (xi_scale / xi.norm()) * xi
    ad = paired_bases(cd, xi)

    if len(tangent0_lams) > ad.dim_m0 - 1:
        raise DomainError(
            f"at most {ad.dim_m0 - 1} kernel tangent directions exist, "
            f"got {len(tangent0_lams)}"
        )
    if len(block_lams) > len(ad.blocks):
        raise DomainError(
            f"only {len(ad.blocks)} frequency blocks exist, got {len(block_lams)}"
        )

    tangent0 = []
    if tangent0_lams:
        unit = (1.0 / xi.norm()) * xi
        rows = []
        for y in ad.m0_basis:
            w = y.coords - alg.inner_coords(unit.coords, y.coords) * unit.coords
            rows.append(w)
        onb = gram_schmidt(alg, rows)
        mix = rng.standard_normal((len(onb), len(onb)))
        qmat, _ = np.linalg.qr(mix)
        frame = qmat @ np.array(onb)
        for i, lam in enumerate(tangent0_lams):
            tangent0.append((lam, [alg.element(frame[i])]))

    tangent = []
    for lam, block in zip(block_lams, ad.blocks):
        span = np.array([y.coords for y in block.y_basis])
        weights = rng.standard_normal(block.mult)
        vec = weights @ span
        y = alg.element(vec)
        tangent.append((block.nu, lam, [(1.0 / y.norm()) * y]))
    return CurvatureAdaptedData(ad, tangent0=tangent0, tangent=tangent)
