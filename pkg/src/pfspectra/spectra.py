"""Closed-form eigenvalue families and regularized traces.

The shape operator of the path-space preimage of a curvature-adapted base
submanifold has four kinds of principal curvature families:

* ``ZeroFamily``      -- 0, with infinite multiplicity;
* ``LambdaFamily``    -- base eigenvalues lambda carried by ad-kernel
                         tangent directions, finite multiplicity each;
* ``HarmonicFamily``  -- nu/(n*pi) for n in Z\\{0}, from normal-space
                         frequency blocks;
* ``MuFamily``        -- mu(nu, lambda, m) = nu / (arctan(nu/lambda) + m*pi)
                         for m in Z, from tangent frequency blocks.

The finite-dimensional group-level picture replaces each (nu, lambda) block
by the pair kappa_pm = (lambda +- sqrt(lambda^2 + nu^2)) / 2.

Regularized traces: the symmetric partial sums of each MuFamily converge to
lambda (cotangent identity), and the zeta-style trace reduces per family to
Hurwitz zeta differences whose s -> 1 limit is again lambda by the digamma
reflection formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, PoleError, StructureError

VALUE_MERGE_TOL = 1e-12


def mu(nu: float, lam: float, m: int) -> float:
    """Eigenvalue mu(nu, lambda, m) = nu / (arctan(nu/lambda) + m*pi).

    The arctangent is taken in the principal branch; for lambda = 0 the
    convention arctan(nu/0) := pi/2 applies.  Note that for lambda = 0 the
    negation symmetry acts by m -> -m - 1 on the index, while for
    lambda != 0 it is -mu(nu, lam, m) == mu(nu, -lam, -m).
    """
    if nu <= 0:
        raise DomainError(f"frequency nu must be positive, got {nu}")
    theta = math.pi / 2 if lam == 0 else math.atan2(nu, lam)
    if lam < 0:
        theta -= math.pi  # principal branch of arctan(nu/lam) for lam < 0
    return nu / (theta + m * math.pi)


def kappa(nu: float, lam: float):
    """Group-level eigenvalue pair (kappa_plus, kappa_minus) for a block.

    kappa_pm = (lam +- sqrt(lam^2 + nu^2)) / 2; their product is -nu^2/4.
    """
    if nu <= 0:
        raise DomainError(f"frequency nu must be positive, got {nu}")
    root = math.hypot(lam, nu)
    return ((lam + root) / 2.0, (lam - root) / 2.0)


# ---------------------------------------------------------------------------
# Spectral data of the base submanifold
# ---------------------------------------------------------------------------


def _merge_keyed(pairs, key_tol=1e-12):
    """Merge (key, mult) pairs whose keys agree within key_tol."""
    out = []
    for key, mult in sorted(pairs):
        if out and abs(out[-1][0] - key) <= key_tol * max(1.0, abs(out[-1][0])):
            out[-1][1] += mult
        else:
            out.append([key, mult])
    return [(k, m) for k, m in out]


@dataclass(frozen=True)
class SubmanifoldSpectralData:
    """Multiplicity bookkeeping for a curvature-adapted base submanifold.

    ``freq_mult`` lists the positive ad-frequencies with their total
    multiplicities m(nu); ``mult0`` maps lambda -> m(0, lambda) (ad-kernel
    tangent directions), ``mult`` maps (nu, lambda) -> m(nu, lambda), and
    ``perp`` maps nu (including 0) -> m(nu, perp) for normal directions.
    """

    freq_mult: tuple  # ((nu, m(nu)), ...) nu > 0 descending
    mult0: tuple  # ((lambda, mult), ...)
    mult: tuple  # ((nu, lambda, mult), ...)
    perp: tuple  # ((nu, mult), ...) including nu = 0
    dim_m0: int
    dim_k0: int
    ad: object = None  # optional AdEigenstructure backing this data

    def __post_init__(self):
        freq = {nu: m for nu, m in self.freq_mult}
        if any(nu <= 0 for nu in freq):
            raise DomainError("freq_mult must only contain positive frequencies")
        perp = dict(self.perp)
        tangent_by_nu = {}
        for nu, lam, m in self.mult:
            if m < 0:
                raise DomainError("multiplicities must be nonnegative")
            tangent_by_nu[nu] = tangent_by_nu.get(nu, 0) + m
        for nu, m in freq.items():
            total = tangent_by_nu.get(nu, 0) + perp.get(nu, 0)
            if total != m:
                raise StructureError(
                    f"block nu={nu:.6g}: tangent {tangent_by_nu.get(nu, 0)} + perp "
                    f"{perp.get(nu, 0)} != m(nu) = {m}"
                )
        total0 = sum(m for _, m in self.mult0) + perp.get(0.0, 0)
        if total0 != self.dim_m0:
            raise StructureError(
                f"kernel block: tangent {sum(m for _, m in self.mult0)} + perp "
                f"{perp.get(0.0, 0)} != dim m_0 = {self.dim_m0}"
            )

    @classmethod
    def from_maps(cls, freq_mult, mult0, mult, perp, dim_m0, dim_k0, ad=None):
        return cls(
            tuple(sorted(((float(n), int(m)) for n, m in freq_mult), reverse=True)),
            tuple(sorted((float(l), int(m)) for l, m in mult0)),
            tuple(sorted((float(n), float(l), int(m)) for n, l, m in mult)),
            tuple(sorted((float(n), int(m)) for n, m in perp)),
            int(dim_m0),
            int(dim_k0),
            ad,
        )

    @classmethod
    def sphere_like(cls, nu, lam_mults, codim, dim_k0, ad=None):
        """Rank-one data: single frequency, all tangent directions at that nu.

        ``lam_mults`` lists (lambda, mult) of the base shape operator; the
        normal space contributes one ad-kernel direction (the normal xi
        itself) plus codim - 1 frequency-nu directions.
        """
        if codim < 1:
            raise DomainError("codimension must be at least 1")
        lam_mults = _merge_keyed(lam_mults)
        m_nu = sum(m for _, m in lam_mults) + (codim - 1)
        return cls.from_maps(
            freq_mult=[(nu, m_nu)],
            mult0=[],
            mult=[(nu, lam, m) for lam, m in lam_mults],
            perp=[(0.0, 1), (nu, codim - 1)],
            dim_m0=1,
            dim_k0=dim_k0,
            ad=ad,
        )

    def lambdas(self):
        """All distinct base eigenvalues appearing in any block."""
        vals = [l for l, _ in self.mult0] + [l for _, l, _ in self.mult]
        return [k for k, _ in _merge_keyed((v, 0) for v in vals)]

    def to_json(self) -> dict:
        return {
            "freq_mult": [[n, m] for n, m in self.freq_mult],
            "mult0": [[l, m] for l, m in self.mult0],
            "mult": [[n, l, m] for n, l, m in self.mult],
            "perp": [[n, m] for n, m in self.perp],
            "dim_m0": self.dim_m0,
            "dim_k0": self.dim_k0,
        }

    @classmethod
    def from_json(cls, data: dict) -> "SubmanifoldSpectralData":
        return cls.from_maps(
            data["freq_mult"],
            data["mult0"],
            data["mult"],
            data["perp"],
            data["dim_m0"],
            data["dim_k0"],
        )


# ---------------------------------------------------------------------------
# Eigenvalue families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ZeroFamily:
    """Eigenvalue 0 with infinite multiplicity."""

    kind = "zero"

    def to_json(self):
        return {"kind": "zero"}


@dataclass(frozen=True)
class LambdaFamily:
    lam: float
    mult: int
    kind = "lambda"

    def to_json(self):
        return {"kind": "lambda", "lambda": self.lam, "mult": self.mult}


@dataclass(frozen=True)
class HarmonicFamily:
    """Eigenvalues nu/(n*pi) for every n in Z\\{0}, each with this mult."""

    nu: float
    mult: int
    kind = "harmonic"

    def value(self, n: int) -> float:
        if n == 0:
            raise DomainError("harmonic index n must be nonzero")
        return self.nu / (n * math.pi)

    def to_json(self):
        return {"kind": "harmonic", "nu": self.nu, "mult": self.mult}


@dataclass(frozen=True)
class MuFamily:
    """Eigenvalues mu(nu, lam, m) for every m in Z, each with this mult."""

    nu: float
    lam: float
    mult: int
    kind = "mu"

    def value(self, m: int) -> float:
        return mu(self.nu, self.lam, m)

    def to_json(self):
        return {"kind": "mu", "nu": self.nu, "lambda": self.lam, "mult": self.mult}


def _family_from_json(d: dict):
    kind = d.get("kind")
    if kind == "zero":
        return ZeroFamily()
    if kind == "lambda":
        return LambdaFamily(float(d["lambda"]), int(d["mult"]))
    if kind == "harmonic":
        return HarmonicFamily(float(d["nu"]), int(d["mult"]))
    if kind == "mu":
        return MuFamily(float(d["nu"]), float(d["lambda"]), int(d["mult"]))
    raise DomainError(f"unknown family kind {kind!r}")


@dataclass(frozen=True)
class PrincipalSpectrum:
    """The full principal-curvature spectrum, organized by family."""

    families: tuple

    def __post_init__(self):
        for f in self.families:
            if f.kind != "zero" and f.mult < 1:
                raise DomainError("families must have multiplicity >= 1")

    def by_kind(self, kind: str):
        return [f for f in self.families if f.kind == kind]

    def to_json(self) -> dict:
        return {"families": [f.to_json() for f in self.families]}

    @classmethod
    def from_json(cls, data: dict) -> "PrincipalSpectrum":
        return cls(tuple(_family_from_json(d) for d in data["families"]))


def assemble_pf_spectrum(data: SubmanifoldSpectralData) -> PrincipalSpectrum:
    """Principal curvatures of the path-space preimage from block data.

    Zero always appears (infinite multiplicity).  Each ad-kernel tangent
    eigenvalue lambda survives as-is with multiplicity m(0, lambda); each
    frequency block contributes a harmonic family on its normal part and a
    mu family per tangent eigenvalue.
    """
    fams = [ZeroFamily()]
    for lam, m in data.mult0:
        if m > 0:
            fams.append(LambdaFamily(lam, m))
    for nu, m in data.perp:
        if nu > 0 and m > 0:
            fams.append(HarmonicFamily(nu, m))
    for nu, lam, m in data.mult:
        if m > 0:
            fams.append(MuFamily(nu, lam, m))
    return PrincipalSpectrum(tuple(fams))


@dataclass(frozen=True)
class GroupSpectrum:
    """Finite spectrum of the group-level preimage: {0, lambda, kappa_pm}.

    The multiplicity of 0 counts the zero-modes inside the tangent space
    k + T N: dim k_0 plus one normal frequency direction per block (the
    paired x-partners of normal y's).  Ad-kernel normal directions are not
    tangent to the preimage and therefore contribute nothing.
    """

    entries: tuple  # ((value, mult), ...) sorted by value

    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.entries)

    def to_json(self) -> dict:
        return {"entries": [[v, m] for v, m in self.entries]}

    @classmethod
    def from_json(cls, data: dict) -> "GroupSpectrum":
        return cls(tuple((float(v), int(m)) for v, m in data["entries"]))


def assemble_group_spectrum(data: SubmanifoldSpectralData) -> GroupSpectrum:
    """Group-level eigenvalues {0, lambda, kappa_pm(nu, lambda)} with counts."""
    pairs = []
    zero_mult = data.dim_k0 + sum(m for nu, m in data.perp if nu > 0)
    if zero_mult > 0:
        pairs.append((0.0, zero_mult))
    for lam, m in data.mult0:
        if m > 0:
            pairs.append((lam, m))
    for nu, lam, m in data.mult:
        if m > 0:
            kp, km = kappa(nu, lam)
            pairs.append((kp, m))
            pairs.append((km, m))
    return GroupSpectrum(tuple(_merge_keyed(pairs, VALUE_MERGE_TOL)))


# ---------------------------------------------------------------------------
# Series and traces
# ---------------------------------------------------------------------------


def cot_series(a: float, n_terms: int):
    """Partial and closed form of sum_{n>=1} 1/(n^2 - a^2).

    The closed form is 1/(2a^2) - (pi/(2a)) * cot(pi*a); integer a is a pole.
    Half-integer a makes the cotangent vanish exactly and is handled exactly.
    """
    if a == round(a):
        raise PoleError(f"cot series has a pole at integer a = {a}")
    if n_terms < 1:
        raise DomainError("need at least one term")
    n = np.arange(1, n_terms + 1, dtype=float)
    partial = float(np.sum(1.0 / (n * n - a * a)))
    two_a = 2.0 * a
    if two_a == round(two_a):  # half-integer: cot(pi*a) = 0 exactly
        closed = 1.0 / (2.0 * a * a)
    else:
        closed = 1.0 / (2.0 * a * a) - (math.pi / (2.0 * a)) / math.tan(math.pi * a)
    return partial, closed


_BERNOULLI_2J = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
)

_EM_SHIFT = 10  # directly summed terms before the Euler-Maclaurin tail


def hurwitz_zeta(s: float, a: float) -> float:
    """Hurwitz zeta sum_{k>=0} (k+a)^(-s) for s > 1, a > 0.

    Euler-Maclaurin with ten directly summed terms and eight Bernoulli
    corrections; accurate to roughly 1e-14 for s in (1, 4], a in (0, 2].
    """
    if s <= 1:
        raise DomainError(f"hurwitz_zeta needs s > 1, got {s}")
    if a <= 0:
        raise DomainError(f"hurwitz_zeta needs a > 0, got {a}")
    direct = sum((a + k) ** (-s) for k in range(_EM_SHIFT))
    base = a + _EM_SHIFT
    total = direct + base ** (1.0 - s) / (s - 1.0) + 0.5 * base ** (-s)
    poch = s  # rising factorial s(s+1)...(s+2j-2)
    fact = 1.0
    for j, b2j in enumerate(_BERNOULLI_2J, start=1):
        fact *= (2 * j - 1) * (2 * j) if j > 1 else 2
        total += b2j / fact * poch * base ** (-s - 2 * j + 1)
        poch *= (s + 2 * j - 1) * (s + 2 * j)
    return total


def _mu_theta(nu: float, lam: float) -> float:
    """arctan(nu/lambda) normalized into (0, pi)."""
    theta = math.pi / 2 if lam == 0 else math.atan2(nu, lam)
    # atan2 with nu > 0 already lands in (0, pi); kept explicit for clarity.
    if not (0.0 < theta < math.pi):
        raise DomainError(f"normalized angle {theta} outside (0, pi)")
    return theta


def r_trace(spectrum: PrincipalSpectrum, m_cut: int):
    """Symmetrized trace: pair each eigenvalue with its reflected partner.

    Returns (partial, limit_estimate).  ``partial`` sums the lambda families
    exactly plus each mu family over |m| <= m_cut; harmonic families cancel
    exactly.  ``limit_estimate`` replaces every mu partial sum with its
    analytic limit lambda (cotangent identity), so it equals the trace of
    the base shape operator.
    """
    if m_cut < 0:
        raise DomainError("m_cut must be nonnegative")
    partial = 0.0
    limit = 0.0
    for fam in spectrum.families:
        if fam.kind == "lambda":
            partial += fam.lam * fam.mult
            limit += fam.lam * fam.mult
        elif fam.kind == "mu":
            theta = _mu_theta(fam.nu, fam.lam)
            ms = np.arange(-m_cut, m_cut + 1, dtype=float)
            partial += fam.mult * float(np.sum(fam.nu / (theta + ms * math.pi)))
            limit += fam.lam * fam.mult
    return partial, limit


def zeta_trace(spectrum: PrincipalSpectrum, s_probes):
    """Zeta-regularized trace probes sum(pos^s) - sum(|neg|^s) per s.

    Harmonic families cancel exactly.  Each mu family reduces to
    (nu/pi)^s * [zeta_H(s, theta/pi) - zeta_H(s, 1 - theta/pi)] with
    theta = arctan(nu/lambda) normalized into (0, pi); as s -> 1 this tends
    to nu*cot(theta) = lambda by the digamma reflection formula.
    """
    values = []
    for s in s_probes:
        if s <= 1:
            raise DomainError(f"zeta trace probes need s > 1, got {s}")
        total = 0.0
        for fam in spectrum.families:
            if fam.kind == "lambda":
                if fam.lam != 0.0:
                    total += math.copysign(abs(fam.lam) ** s, fam.lam) * fam.mult
            elif fam.kind == "mu":
                theta = _mu_theta(fam.nu, fam.lam)
                frac = theta / math.pi
                diff = hurwitz_zeta(s, frac) - hurwitz_zeta(s, 1.0 - frac)
                total += fam.mult * (fam.nu / math.pi) ** s * diff
        values.append(total)
    return values


def extrapolate_to_one(s_probes, values) -> float:
    """Neville extrapolation of trace probes to s = 1."""
    xs = [s - 1.0 for s in s_probes]
    tab = list(values)
    n = len(tab)
    if n == 0:
        raise DomainError("need at least one probe")
    for level in range(1, n):
        for i in range(n - level):
            tab[i] = tab[i + 1] + (tab[i + 1] - tab[i]) * xs[i + level] / (
                xs[i] - xs[i + level]
            )
    return tab[0]


def mu_eigenfunction_coeffs(nu: float, lam: float, m: int, n_max: int):
    """Fourier coefficients of the mu(nu, lam, m) eigenfunction.

    With the constant-component normalization c = 1, the sine and cosine
    coefficients for mode n are

        b_n = -2 r^2 / (n^2 - r^2),     a_n = -n*pi*b_n*mu/nu,

    where r = nu / (pi * mu(nu, lam, m)).  Returns (c, a, b) with a, b
    indexed by n = 1..n_max.
    """
    if n_max < 1:
        raise DomainError("n_max must be at least 1")
    val = mu(nu, lam, m)
    r = nu / (math.pi * val)
    if abs(r - round(r)) < 1e-12:
        raise PoleError(f"resonant index r = {r} (integer); coefficients blow up")
    n = np.arange(1, n_max + 1, dtype=float)
    b = -2.0 * r * r / (n * n - r * r)
    a = -n * math.pi * b * val / nu
    return 1.0, a, b


def mu_coefficient_residuals(nu: float, lam: float, m: int, n_max: int):
    """Residuals of the three defining relations for the mu eigenfunction.

    The n-indexed relations are checked exactly over n <= n_max; the
    constant-component relation uses the cotangent closed form for the
    analytic tail beyond n_max.  All three should be at roundoff level.
    """
    val = mu(nu, lam, m)
    c, a, b = mu_eigenfunction_coeffs(nu, lam, m, n_max)
    n = np.arange(1, n_max + 1, dtype=float)
    res2 = np.max(np.abs((nu / math.pi) * (2.0 * c - b) / n - val * a))
    res3 = np.max(np.abs(-(nu / math.pi) * a / n - val * b))
    r = nu / (math.pi * val)
    # sum_{n>=1} a_n / n = 2r * sum 1/(n^2 - r^2) = 1/r - pi*cot(pi*r)
    _, closed = cot_series(r, 1)
    full_sum = 2.0 * r * closed
    res1 = abs(c * lam + (nu / math.pi) * full_sum - c * val)
    return res1, float(res2), float(res3)


# ---------------------------------------------------------------------------
# Enumeration (shared by the austere checker and the CSV export)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectrumRow:
    family: str
    index: int | None
    value: float
    mult: object  # int or the string "inf"


def enumerate_rows(spectrum: PrincipalSpectrum, n_max: int, m_max: int):
    """Concrete eigenvalue rows with harmonic |n| <= n_max, mu |m| <= m_max.

    Rows are sorted by |value| descending; the zero family appears last with
    symbolic multiplicity "inf".
    """
    if n_max < 0 or m_max < 0:
        raise DomainError("enumeration windows must be nonnegative")
    rows = []
    for fam in spectrum.families:
        if fam.kind == "lambda":
            rows.append(SpectrumRow("lambda", None, fam.lam, fam.mult))
        elif fam.kind == "harmonic":
            for n in range(-n_max, n_max + 1):
                if n != 0:
                    rows.append(SpectrumRow("harmonic", n, fam.value(n), fam.mult))
        elif fam.kind == "mu":
            for m in range(-m_max, m_max + 1):
                rows.append(SpectrumRow("mu", m, fam.value(m), fam.mult))
    rows.sort(key=lambda r: (-abs(r.value), r.family, r.index if r.index is not None else 0))
    has_zero = any(f.kind == "zero" for f in spectrum.families)
    if has_zero:
        rows.append(SpectrumRow("zero", None, 0.0, "inf"))
    return rows


def enumerate_by_floor(spectrum: PrincipalSpectrum, value_floor: float):
    """All eigenvalues with |value| >= value_floor, with multiplicities.

    A magnitude window is symmetric under negation, so restricting a
    negation-invariant spectrum this way stays negation-invariant -- unlike
    index windows, whose boundary rows can lack partners (the lambda = 0 mu
    family pairs m with -m-1).
    """
    if value_floor <= 0:
        raise DomainError("value_floor must be positive")
    pairs = []
    for fam in spectrum.families:
        if fam.kind == "lambda":
            if abs(fam.lam) >= value_floor:
                pairs.append((fam.lam, fam.mult))
        elif fam.kind == "harmonic":
            n_hi = math.floor(fam.nu / (math.pi * value_floor))
            for n in range(1, n_hi + 1):
                pairs.append((fam.value(n), fam.mult))
                pairs.append((fam.value(-n), fam.mult))
        elif fam.kind == "mu":
            m = 0
            while abs(fam.value(m)) >= value_floor:
                pairs.append((fam.value(m), fam.mult))
                m += 1
            m = -1
            while abs(fam.value(m)) >= value_floor:
                pairs.append((fam.value(m), fam.mult))
                m -= 1
    return pairs
