"""The explicit generalized 3-body Hamiltonian class and its spectral data.

The operator is <x>^2 (D_t^2 + Delta + V + V_T) on R^n with a radial
short-range potential V_T on R^{n-1} and a constant sphere potential V_D.
This module computes the exact boundary spectra of its normal operators,
admissible weight windows, indicial roots with multiplicities, the relative
index, radial spectral scans, zero-energy classification, full-ellipticity
certification, and the seed index sets consumed by the parametrix ledger.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, isqrt

import numpy as np
import scipy.linalg

from .indexset import IndexPoint, IndexSet, as_fraction

ROOT_GUARD = 1e-9          # closer than this to a forbidden value counts as a hit
RATIONALIZE_DEN = 1 << 24  # denominator cap when seeding irrational roots


class SolverFailure(RuntimeError):
    pass


class PotentialDomainError(ValueError):
    pass


class ForbiddenWeight(ValueError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    """Discretization and tolerance knobs with documented defaults."""

    h: float = 0.01                  # radial grid step
    r_max: float = 30.0              # outer Dirichlet radius
    tol: float = 1e-8                # eigenvalue cutoff: report E < -tol
    tail_tol: float = 1e-3           # |V_T(r)| < tail_tol * r^-3 marks the free region
    resonance_rel_tol: float = 1e-6  # relative zero-threshold for the growing branch
    ell_extra: int = 0               # scan this many channels beyond the last negative one

    @staticmethod
    def from_json(data: dict | None) -> "SolverConfig":
        data = data or {}
        base = SolverConfig()
        return SolverConfig(
            h=float(data.get("h", base.h)),
            r_max=float(data.get("r_max", base.r_max)),
            tol=float(data.get("tol", base.tol)),
            tail_tol=float(data.get("tail_tol", base.tail_tol)),
            resonance_rel_tol=float(data.get("resonance_rel_tol",
                                             base.resonance_rel_tol)),
            ell_extra=int(data.get("ell_extra", base.ell_extra)),
        )

    def to_json(self) -> dict:
        return {"h": self.h, "r_max": self.r_max, "tol": self.tol,
                "tail_tol": self.tail_tol,
                "resonance_rel_tol": self.resonance_rel_tol,
                "ell_extra": self.ell_extra}


@dataclass(frozen=True)
class RadialPotential:
    """Radial potential V_T(r) with at least cubic decay.

    kinds: ``zero``; ``gaussian_well`` with V(r) = -depth * exp(-(r/width)^2);
    ``tabulated`` with linear interpolation and an r^-3 extrapolated tail.
    """

    kind: str
    depth: float = 0.0
    width: float = 1.0
    grid: tuple[float, ...] = ()
    values: tuple[float, ...] = ()
    decay_order: int = 3

    @staticmethod
    def zero() -> "RadialPotential":
        return RadialPotential("zero")

    @staticmethod
    def gaussian_well(depth: float, width: float) -> "RadialPotential":
        return RadialPotential("gaussian_well", depth=float(depth), width=float(width))

    @staticmethod
    def tabulated(grid, values) -> "RadialPotential":
        g = tuple(float(x) for x in grid)
        v = tuple(float(x) for x in values)
        if len(g) != len(v) or len(g) < 2 or any(b <= a for a, b in zip(g, g[1:])):
            raise PotentialDomainError("tabulated grid must be strictly increasing "
                                       "and match the value count")
        if g[0] <= 0:
            raise PotentialDomainError("tabulated grid must start at r > 0")
        return RadialPotential("tabulated", grid=g, values=v)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0):
            raise PotentialDomainError("radial potential evaluated at r <= 0")
        if self.kind == "zero":
            out = np.zeros_like(r)
        elif self.kind == "gaussian_well":
            out = -self.depth * np.exp(-((r / self.width) ** 2))
        elif self.kind == "tabulated":
            g = np.array(self.grid)
            v = np.array(self.values)
            out = np.interp(r, g, v)
            tail = r > g[-1]
            out = np.where(tail, v[-1] * (g[-1] / np.maximum(r, g[-1])) ** 3, out)
        else:
            raise PotentialDomainError(f"unknown potential kind {self.kind!r}")
        if not np.all(np.isfinite(out)):
            raise PotentialDomainError("potential evaluated to a non-finite value")
        return out

    @staticmethod
    def from_json(data: dict) -> "RadialPotential":
        kind = data["kind"]
        if kind == "zero":
            return RadialPotential.zero()
        if kind == "gaussian_well":
            return RadialPotential.gaussian_well(data["depth"], data["width"])
        if kind == "tabulated":
            return RadialPotential.tabulated(data["r"], data["v"])
        raise PotentialDomainError(f"unknown potential kind {kind!r}")

    def to_json(self) -> dict:
        if self.kind == "zero":
            return {"kind": "zero"}
        if self.kind == "gaussian_well":
            return {"kind": "gaussian_well", "depth": self.depth, "width": self.width}
        return {"kind": "tabulated", "r": list(self.grid), "v": list(self.values)}


@dataclass(frozen=True)
class ModelOperator:
    """Ambient dimension n >= 4, radial V_T, constant sphere potential V_D."""

    n: int
    VT: RadialPotential
    VD: Fraction = Fraction(0)

    def __post_init__(self):
        if self.n < 4:
            raise ValueError(f"need n >= 4, got {self.n}")
        if self.VT.decay_order < 3:
            raise ValueError("V_T must decay at least cubically")

    @staticmethod
    def from_json(data: dict) -> "ModelOperator":
        vd = data.get("VD", 0)
        if isinstance(vd, dict):
            vd = Fraction(vd["num"], vd["den"])
        else:
            vd = as_fraction(vd)
        return ModelOperator(int(data["n"]), RadialPotential.from_json(data["VT"]), vd)

    def to_json(self) -> dict:
        return {"n": self.n,
                "VD": {"num": self.VD.numerator, "den": self.VD.denominator},
                "VT": self.VT.to_json()}


@dataclass(frozen=True)
class WeightPair:
    alphaD: Fraction
    alphaT: Fraction

    @property
    def beta(self) -> Fraction:
        return self.alphaD - self.alphaT


@dataclass(frozen=True)
class IndicialRoot:
    """Root z of z^2 - (n-2) z - (mu_ell + V_D) with channel and multiplicity data.

    ``re``/``im`` are exact rationals when the discriminant is a rational
    square, else None with the float value in ``z``; ``m`` is the
    formal-solution dimension d_ell * order.
    """

    z: complex
    ell: int
    order: int
    m: int
    re: Fraction | None = None
    im: Fraction | None = None

    def re_value(self) -> float:
        return float(self.re) if self.re is not None else self.z.real

    def rationalized(self) -> tuple[Fraction, Fraction]:
        re = self.re if self.re is not None else \
            Fraction(self.z.real).limit_denominator(RATIONALIZE_DEN)
        im = self.im if self.im is not None else \
            Fraction(self.z.imag).limit_denominator(RATIONALIZE_DEN)
        return re, im


# -- sphere spectra ------------------------------------------------------------

def sphere_spectrum(d: int, ell_max: int) -> list[tuple[int, int]]:
    """Eigenvalues mu_ell = ell(ell+d-1) of the sphere S^d Laplacian with
    harmonic-polynomial multiplicities d_ell, for ell = 0..ell_max."""
    if d < 1 or ell_max < 0:
        raise ValueError("need d >= 1, ell_max >= 0")
    out = []
    for ell in range(ell_max + 1):
        mu = ell * (ell + d - 1)
        dim = comb(ell + d, d) - (comb(ell + d - 2, d) if ell >= 2 else 0)
        if ell == 1:
            dim = d + 1
        out.append((mu, dim))
    return out


def _indicial_roots(b: int, mu: int) -> tuple[int, int] | None:
    """Integer roots of z^2 - b z - mu when the discriminant is a perfect square."""
    disc = b * b + 4 * mu
    s = isqrt(disc)
    if s * s != disc or (b + s) % 2:
        return None
    return ((b - s) // 2, (b + s) // 2)


def boundary_spectrum_T(n: int, c) -> list[IndexPoint]:
    """Boundary spectrum of the translation-face boundary model, |Re z| <= c.

    Per channel ell on the sphere S^{n-2} the indicial polynomial is
    z^2 - (n-3) z - ell(ell+n-3) with roots -ell and ell + n - 3.  Returned
    as a finite point list: the spectrum has an infinite descending tail, so
    it is not itself an index set.
    """
    if n < 4:
        raise ValueError("need n >= 4")
    cut = as_fraction(c)
    pts: set[IndexPoint] = set()
    ell = 0
    while True:
        roots = _indicial_roots(n - 3, ell * (ell + n - 3))
        assert roots is not None
        lo, hi = roots
        assert lo == -ell and hi == ell + n - 3
        if -cut <= lo:
            pts.add(IndexPoint.of(lo, 0))
        if hi <= cut:
            pts.add(IndexPoint.of(hi, 0))
        if lo < -cut and hi > cut:
            break
        ell += 1
    return sorted(pts)


def boundary_spectrum_paD(n: int, c) -> list[IndexPoint]:
    """Boundary spectrum of the dilation-face boundary model (roots of
    z^2 + (n-3) z - ell(ell+n-3), i.e. ell and -(ell+n-3))."""
    return sorted(IndexPoint(
        type(p.z)(-p.z.re, p.z.im), p.k) for p in boundary_spectrum_T(n, c))


def weight_window_T(n: int) -> tuple[Fraction, Fraction]:
    """Open interval of relative weights for which the zero-energy model
    is invertible: (0, n-3)."""
    if n < 4:
        raise ValueError("need n >= 4")
    return Fraction(0), Fraction(n - 3)


# -- indicial roots at the dilation face -----------------------------------------

def indicial_roots_D(n: int, vd, c) -> list[IndicialRoot]:
    """Roots of z^2 - (n-2) z - (mu_ell + V_D) per channel ell on S^{n-1},
    for every channel whose larger root has Re <= c; double roots carry
    order 2 and m = 2 d_ell."""
    if n < 4:
        raise ValueError("need n >= 4")
    vd = as_fraction(vd)
    cut = as_fraction(c)
    b = n - 2
    out: list[IndicialRoot] = []
    ell = 0
    while True:
        mu = ell * (ell + n - 2)
        dim = sphere_spectrum(n - 1, ell)[-1][1]
        disc = Fraction(b * b) + 4 * (mu + vd)
        if disc > 0:
            s_exact = _fraction_sqrt(disc)
            if s_exact is not None:
                lo, hi = (b - s_exact) / 2, (b + s_exact) / 2
                if hi > cut:
                    break
                out.append(IndicialRoot(complex(float(lo)), ell, 1, dim, re=lo,
                                        im=Fraction(0)))
                out.append(IndicialRoot(complex(float(hi)), ell, 1, dim, re=hi,
                                        im=Fraction(0)))
            else:
                s = math.sqrt(float(disc))
                lo, hi = (b - s) / 2, (b + s) / 2
                if hi > float(cut):
                    break
                out.append(IndicialRoot(complex(lo), ell, 1, dim))
                out.append(IndicialRoot(complex(hi), ell, 1, dim))
        elif disc == 0:
            z = Fraction(b, 2)
            if z > cut:
                break
            out.append(IndicialRoot(complex(float(z)), ell, 2, 2 * dim, re=z,
                                    im=Fraction(0)))
        else:
            re = Fraction(b, 2)
            if re > cut:
                break
            s_exact = _fraction_sqrt(-disc)
            if s_exact is not None:
                im = s_exact / 2
                for sgn in (1, -1):
                    out.append(IndicialRoot(complex(float(re), sgn * float(im)),
                                            ell, 1, dim, re=re, im=sgn * im))
            else:
                im = math.sqrt(float(-disc)) / 2
                for sgn in (1, -1):
                    out.append(IndicialRoot(complex(float(re), sgn * im), ell, 1, dim))
        ell += 1
    return sorted(out, key=lambda r: (r.re_value(), r.z.imag, r.ell))


def _fraction_sqrt(q: Fraction) -> Fraction | None:
    """Exact square root of a nonnegative rational, or None."""
    if q < 0:
        raise ValueError("negative radicand")
    ns, ds = isqrt(q.numerator), isqrt(q.denominator)
    if ns * ns == q.numerator and ds * ds == q.denominator:
        return Fraction(ns, ds)
    return None


def forbidden_weights_D(n: int, vd, lo, hi) -> list[float | Fraction]:
    """Real parts of the dilation-face indicial roots inside [lo, hi], deduplicated."""
    lo_f, hi_f = float(as_fraction(lo)), float(as_fraction(hi))
    # by Vieta the smaller root is n-2 minus the larger, so reaching down to
    # lo requires channels with larger root up to n-2-lo
    cut = max(as_fraction(hi), (n - 2) - as_fraction(lo)) + 1
    roots = indicial_roots_D(n, vd, cut)
    seen: list[float | Fraction] = []
    for r in roots:
        val = r.re if r.re is not None else r.z.real
        fval = float(val)
        if lo_f - ROOT_GUARD <= fval <= hi_f + ROOT_GUARD:
            if not any(abs(float(v) - fval) < ROOT_GUARD for v in seen):
                seen.append(val)
    return sorted(seen, key=float)


def is_forbidden_D(n: int, vd, alpha) -> bool:
    """True iff alpha lies within the guard distance of a forbidden real part."""
    a = as_fraction(alpha)
    for val in forbidden_weights_D(n, vd, a - 1, a + 1):
        if isinstance(val, Fraction):
            if val == a:
                return True
        if abs(float(val) - float(a)) < ROOT_GUARD:
            return True
    return False


def check_weights(n: int, vd, w: WeightPair) -> bool:
    """Weight admissibility: alpha_D off the forbidden set and beta inside
    the open window (0, n-3)."""
    lo, hi = weight_window_T(n)
    return (not is_forbidden_D(n, vd, w.alphaD)) and lo < w.beta < hi


# -- radial solvers ----------------------------------------------------------------

def _kappa(n: int, ell: int) -> float:
    """Effective half-line angular parameter: kappa = ell + (n-4)/2, so that
    kappa(kappa+1) = ell(ell+n-3) + (n-2)(n-4)/4."""
    return ell + (n - 4) / 2


def _effective_w(op: ModelOperator, ell: int, r: np.ndarray) -> np.ndarray:
    kap = _kappa(op.n, ell)
    return op.VT(r) + kap * (kap + 1) / r**2


def _channel_range(op: ModelOperator, cfg: SolverConfig) -> int:
    """Smallest ell whose effective potential is nonnegative on the grid;
    channels at or beyond it have positive operators and are skipped."""
    r = np.arange(cfg.h, cfg.r_max + cfg.h / 2, cfg.h)
    ell = 0
    while np.min(_effective_w(op, ell, r)) < 0:
        ell += 1
        if ell > 10_000:
            raise SolverFailure("channel cutoff search did not terminate")
    return ell


def negative_eigenvalue_scan(op: ModelOperator, cfg: SolverConfig | None = None
                             ) -> list[tuple[int, float]]:
    """All eigenvalues below -cfg.tol of the half-line channel operators
    -v'' + [V_T + kappa(kappa+1)/r^2] v, Dirichlet at both grid ends."""
    cfg = cfg or SolverConfig()
    out: list[tuple[int, float]] = []
    ell_stop = _channel_range(op, cfg)
    r = np.arange(cfg.h, cfg.r_max, cfg.h)
    for ell in range(ell_stop + cfg.ell_extra):
        w = _effective_w(op, ell, r)
        diag = 2.0 / cfg.h**2 + w
        off = np.full(len(r) - 1, -1.0 / cfg.h**2)
        floor = min(float(np.min(w)), 0.0) - 1.0
        try:
            vals = scipy.linalg.eigh_tridiagonal(
                diag, off, select="v", select_range=(floor, -cfg.tol),
                eigvals_only=True)
        except Exception as exc:  # pragma: no cover - solver failure surface
            raise SolverFailure(f"eigensolve failed in channel {ell}: {exc}") from exc
        out.extend((ell, float(v)) for v in vals)
    return out


def zero_energy_growing_coefficient(op: ModelOperator, ell: int,
                                    cfg: SolverConfig | None = None) -> tuple[float, float]:
    """Integrate the zero-energy channel equation outward from the regular
    branch v ~ r^{kappa+1} and match against the free pair (r^{kappa+1}, r^{-kappa})
    past the potential tail.  Returns (A, B) up to a common positive factor."""
    a, b, _ = _zero_energy_match(op, ell, cfg or SolverConfig())
    return a, b


def _zero_energy_match(op: ModelOperator, ell: int,
                       cfg: SolverConfig) -> tuple[float, float, float]:
    kap = _kappa(op.n, ell)
    h = cfg.h
    r_grid = np.arange(h, cfg.r_max + h / 2, h)
    tail_ok = np.abs(op.VT(r_grid)) < cfg.tail_tol / r_grid**3
    free_from = None
    for i in range(len(r_grid) - 1, -1, -1):
        if not tail_ok[i]:
            free_from = r_grid[i] + h
            break
    r_match = h if free_from is None else free_from
    r_fit = min(max(2.0 * r_match, r_match + 2.0, 5.0), 0.9 * cfg.r_max)

    def deriv(r, y):
        w = _effective_w(op, ell, np.array([r]))[0]
        return np.array([y[1], w * y[0]])

    r0 = h
    y = np.array([r0 ** (kap + 1), (kap + 1) * r0 ** kap])
    r = r0
    while r < r_fit - h / 2:
        k1 = deriv(r, y)
        k2 = deriv(r + h / 2, y + h / 2 * k1)
        k3 = deriv(r + h / 2, y + h / 2 * k2)
        k4 = deriv(r + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        r += h
        m = max(abs(y[0]), abs(y[1]))
        if not math.isfinite(m):
            raise SolverFailure(f"zero-energy integration blew up in channel {ell}")
        if m > 1e200:
            y = y / m
    # match v = A r^{kap+1} + B r^{-kap} at r (Wronskian solve, det = -(2 kap + 1))
    v, dv = y
    det = -(2 * kap + 1)
    a = (v * (-kap) * r ** (-kap - 1) - dv * r ** (-kap)) / det
    b = (dv * r ** (kap + 1) - v * (kap + 1) * r ** kap) / det
    return float(a), float(b), float(r)


def zero_energy_classification(op: ModelOperator, cfg: SolverConfig | None = None
                               ) -> list[tuple[int, str]]:
    """Per-channel zero-energy classification: regular, resonance, or bound_state.

    The growing-branch coefficient decides: nonzero (relative to the solution
    size at the matching radius) means regular; a vanishing growing branch is
    a resonance for n in {4, 5} (bounded, non-square-integrable decay) and a
    bound state for n >= 6.
    """
    cfg = cfg or SolverConfig()
    ell_stop = max(_channel_range(op, cfg), 1)
    out = []
    for ell in range(ell_stop + cfg.ell_extra):
        a, b, r_fit = _zero_energy_match(op, ell, cfg)
        grow = abs(a) * r_fit ** (_kappa(op.n, ell) + 1)
        decay = abs(b) * r_fit ** (-_kappa(op.n, ell))
        rel = grow / (grow + decay) if grow + decay > 0 else 0.0
        if rel >= cfg.resonance_rel_tol:
            out.append((ell, "regular"))
        elif op.n in (4, 5):
            out.append((ell, "resonance"))
        else:
            out.append((ell, "bound_state"))
    return out


# -- full ellipticity ---------------------------------------------------------------

@dataclass(frozen=True)
class EllipticityReport:
    """Verdicts for the five full-ellipticity conditions with evidence."""

    cond1: bool
    cond2: bool
    cond3: bool
    cond4: bool
    cond5: bool
    window_beta: tuple[Fraction, Fraction]
    forbidden_D: list
    evidence: dict = field(default_factory=dict)

    @property
    def overall(self) -> bool:
        return all((self.cond1, self.cond2, self.cond3, self.cond4, self.cond5))

    def to_json(self) -> dict:
        def frac(q):
            return {"num": q.numerator, "den": q.denominator} \
                if isinstance(q, Fraction) else float(q)
        return {
            "conditions": {f"cond{i}": getattr(self, f"cond{i}") for i in range(1, 6)},
            "overall": self.overall,
            "window_beta": [frac(self.window_beta[0]), frac(self.window_beta[1])],
            "forbidden_D": [frac(v) for v in self.forbidden_D],
            "evidence": self.evidence,
        }


def full_ellipticity(op: ModelOperator, w: WeightPair,
                     cfg: SolverConfig | None = None) -> EllipticityReport:
    """Certify the five full-ellipticity conditions for the model class.

    Conditions 1-3 are exact weight checks; condition 4 is zero-energy
    invertibility (no resonance or bound state in any scanned channel);
    condition 5 is the absence of negative channel eigenvalues, which for
    real radial V_T is equivalent to injectivity at nonzero energies.
    """
    cfg = cfg or SolverConfig()
    lo, hi = weight_window_T(op.n)
    beta_ok = lo < w.beta < hi
    cond1 = beta_ok
    cond2 = beta_ok  # the transition-face models are invertible throughout the window
    cond3 = not is_forbidden_D(op.n, op.VD, w.alphaD)
    channels = zero_energy_classification(op, cfg)
    cond4 = all(label == "regular" for _, label in channels)
    negatives = negative_eigenvalue_scan(op, cfg)
    cond5 = not negatives
    forbidden = forbidden_weights_D(op.n, op.VD, w.alphaD - 4, w.alphaD + 4)
    evidence = {
        "beta": {"num": w.beta.numerator, "den": w.beta.denominator},
        "zero_energy": {str(ell): label for ell, label in channels},
        "negative_eigenvalues": [[ell, val] for ell, val in negatives],
    }
    return EllipticityReport(cond1, cond2, cond3, cond4, cond5,
                             (lo, hi), forbidden, evidence)


# -- relative index -----------------------------------------------------------------

def relative_index(op: ModelOperator, a_from, a_to) -> int:
    """Index jump across [a_from, a_to]: the sum of formal-solution dimensions m
    over indicial roots with a_from < Re z < a_to."""
    a_from, a_to = as_fraction(a_from), as_fraction(a_to)
    if a_from >= a_to:
        raise ValueError("need a_from < a_to")
    for endpoint in (a_from, a_to):
        if is_forbidden_D(op.n, op.VD, endpoint):
            raise ForbiddenWeight(f"endpoint {endpoint} lies in the forbidden set")
    lo, hi = weight_window_T(op.n)
    if not lo < hi:
        raise ForbiddenWeight("empty relative-weight window")
    total = 0
    cut = max(a_to, (op.n - 2) - a_from) + 1
    for root in indicial_roots_D(op.n, op.VD, cut):
        re = root.re_value()
        if float(a_from) < re < float(a_to) and abs(root.z.imag) < ROOT_GUARD:
            total += root.m
    return total


# -- seed index sets -----------------------------------------------------------------

def seed_index_sets(op: ModelOperator, w: WeightPair, bound=16):
    """Seed sets for the parametrix ledger.

    Returns (E_T^+, E_T^-, E_D^+(.), E_D^-(.)): the translation-face sets
    split by the relative weight beta, and callables producing the
    dilation-face sets at any admissible weight (log power order-1 at double
    roots).  Enumeration covers |Re| <= bound.
    """
    if not check_weights(op.n, op.VD, w):
        raise ForbiddenWeight(f"weights {w} are not admissible")
    cut = as_fraction(bound)
    beta = w.beta
    spec_t = boundary_spectrum_T(op.n, cut)
    et_plus = IndexSet.from_points(
        p for p in spec_t if p.z.re > beta)
    et_minus = IndexSet.from_points(
        IndexPoint.of(-p.z.re, p.k, -p.z.im) for p in spec_t if p.z.re < beta)
    roots = indicial_roots_D(op.n, op.VD, cut)

    def ed_plus(alpha) -> IndexSet:
        a = as_fraction(alpha)
        _guard_weight(op, a)
        pts = []
        for r in roots:
            re, im = r.rationalized()
            if re > a:
                pts.append(IndexPoint.of(re, r.order - 1, im))
        return IndexSet.from_points(pts)

    def ed_minus(alpha) -> IndexSet:
        a = as_fraction(alpha)
        _guard_weight(op, a)
        pts = []
        for r in roots:
            re, im = r.rationalized()
            if re < a:
                pts.append(IndexPoint.of(-re, r.order - 1, -im))
        return IndexSet.from_points(pts)

    return et_plus, et_minus, ed_plus, ed_minus


def _guard_weight(op: ModelOperator, alpha: Fraction) -> None:
    if is_forbidden_D(op.n, op.VD, alpha):
        raise ForbiddenWeight(f"weight {alpha} lies in the forbidden set")
