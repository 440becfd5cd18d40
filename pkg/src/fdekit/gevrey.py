"""Complex-analytic and regularity diagnostics.

Geometry: the stadium region at level n is the interval [-1, 1] fattened by
an open disk of radius A * n^(-1/k); it shrinks back to the interval as n
grows.  A deviating map that sends every level-(n+1) stadium into the
level-n one (uniformly for small A) is the geometric engine behind the
regularity bootstrap, and is checked here by dense sampling.

Growth: the envelope recursion w_1 = 1,
w_{n+1} = ||a||_inf * M(r0 + s n^(-1/k) w_n) + ||b + P(0)a||_inf (sup norms
over the stadium of radius mu/2) stays bounded by an explicitly computable
constant C whenever s <= 1/C; Lambda(s) generalises the contraction constant
to complex path integrals.  Both are implemented as numerical probes, not
proofs, as is the inclusion check of analytically continued iterates in
fattened value intervals.

Regularity estimation: sup norms of repeated spectral derivatives are fitted
against the envelope B^(j+1) * j^(j(1+1/k)); the fitted exponent classifies
the function as analytic-like or of finite regularity index k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .chebfun import build, ellipse_radius

__all__ = [
    "GevreyError",
    "StadiumRegion",
    "EkReport",
    "OmegaReport",
    "ProbeReport",
    "DerivativeNorms",
    "GevreyEstimate",
    "dist_to_interval",
    "interval_distance",
    "check_ek",
    "omega_sequence",
    "lambda_estimate",
    "stadium_inclusion_probe",
    "derivative_norms",
    "gevrey_order_estimate",
]

EK_PASS_SLACK = 1e-12
SLOPE_ANALYTIC_CUTOFF = 1.05
MAX_DERIVATIVES = 12
_EPS = np.finfo(float).eps


class GevreyError(Exception):
    pass


# --- interval distance ------------------------------------------------------


def interval_distance(z, half_width=1.0):
    """Distance from complex points to the real interval [-h, h] (vectorised)."""
    arr = np.asarray(z, dtype=complex)
    dx = np.maximum(np.abs(arr.real) - half_width, 0.0)
    out = np.hypot(dx, arr.imag)
    return float(out) if arr.ndim == 0 else out


def dist_to_interval(z):
    """Distance to [-1, 1] and the closest interval point: (rho, zhat)."""
    z = complex(z)
    zhat = min(max(z.real, -1.0), 1.0)
    rho = math.hypot(max(abs(z.real) - 1.0, 0.0), z.imag)
    return rho, zhat


# --- stadium regions ---------------------------------------------------------


def _stadium_points(radius, per_piece=128, interior_target=1024):
    """Deterministic sample of a stadium of the given radius around [-1, 1]:
    boundary (two caps, two horizontal segments) plus an interior grid."""
    r = float(radius)
    phi = np.linspace(-0.5 * np.pi, 0.5 * np.pi, per_piece)
    right = 1.0 + r * np.exp(1j * phi)
    left = -1.0 + r * np.exp(1j * (phi + np.pi))
    xs = np.linspace(-1.0, 1.0, per_piece)
    top = xs + 1j * r
    bottom = xs - 1j * r
    boundary = np.concatenate([right, left, top, bottom])

    aspect = (2.0 + 2.0 * r) / (2.0 * r)
    ny = max(int(round(math.sqrt(interior_target / aspect))), 3)
    if ny % 2 == 0:
        ny += 1  # keep the real axis in the grid
    nx = max(interior_target // ny, 3)
    gx = np.linspace(-1.0 - r, 1.0 + r, nx)
    gy = np.linspace(-r, r, ny)
    zz = (gx[:, None] + 1j * gy[None, :]).ravel()
    inside = interval_distance(zz) <= r * (1.0 - 1e-9)
    return np.concatenate([boundary, zz[inside]])


@dataclass(frozen=True)
class StadiumRegion:
    """The interval [-1, 1] fattened by an open disk of radius A * n^(-1/k)."""

    k: float
    A: float
    n: int

    def __post_init__(self):
        if self.k <= 0 or self.A <= 0 or self.n < 1:
            raise GevreyError("stadium parameters must satisfy k>0, A>0, n>=1")

    @property
    def radius(self):
        return self.A * self.n ** (-1.0 / self.k)

    def contains(self, z):
        return interval_distance(z) < self.radius

    def sample(self, per_piece=128, interior_target=1024):
        return _stadium_points(self.radius, per_piece, interior_target)


# --- deviating-map inclusion check ------------------------------------------


@dataclass
class EkLevel:
    A: float
    p: int
    worst_ratio: float
    worst_dist: float

    def to_dict(self):
        return {
            "A": self.A,
            "p": self.p,
            "worst_ratio": self.worst_ratio,
            "worst_dist": self.worst_dist,
        }


@dataclass
class EkReport:
    psi_src: str
    k: float
    A_list: list
    p_max: int
    density: int
    levels: list
    passed: bool
    first_pass_p: dict
    worst_ratio: float

    def to_dict(self):
        return {
            "psi": self.psi_src,
            "k": self.k,
            "A_list": list(self.A_list),
            "p_max": self.p_max,
            "density": self.density,
            "passed": self.passed,
            "worst_ratio": self.worst_ratio,
            "first_pass_p": {repr(a): p for a, p in self.first_pass_p.items()},
            "levels": [lv.to_dict() for lv in self.levels],
        }


def check_ek(psi, k, A_list, p_max, density=128):
    """Sampling check of the stadium inclusion property of the deviating map.

    For each fattening scale A and each level p = 1..p_max, the level-(p+1)
    stadium is sampled (boundary caps and segments with `density` points per
    piece, plus an interior grid of ~8*density points), psi is evaluated, and
    the worst ratio  dist(psi(z), [-1,1]) / (A p^(-1/k))  is recorded.  The
    check passes when every ratio is <= 1 + 1e-12.  This is evidence, not a
    proof: the property quantifies over open sets.
    """
    if p_max < 1:
        raise GevreyError("p_max must be >= 1")
    levels = []
    first_pass = {}
    worst_overall = 0.0
    for A in A_list:
        if A <= 0:
            raise GevreyError("fattening scales must be positive")
        last_fail = 0
        for p in range(1, p_max + 1):
            region = StadiumRegion(k=k, A=A, n=p + 1)
            pts = region.sample(per_piece=density, interior_target=8 * density)
            w = psi.eval_complex(pts)
            dist = interval_distance(w)
            worst = float(np.max(dist))
            ratio = worst / (A * p ** (-1.0 / k))
            levels.append(EkLevel(A=A, p=p, worst_ratio=ratio, worst_dist=worst))
            worst_overall = max(worst_overall, ratio)
            if ratio > 1.0 + EK_PASS_SLACK:
                last_fail = p
        first_pass[A] = last_fail + 1 if last_fail < p_max else None
    passed = worst_overall <= 1.0 + EK_PASS_SLACK
    return EkReport(
        psi_src=psi.src,
        k=k,
        A_list=list(A_list),
        p_max=p_max,
        density=density,
        levels=levels,
        passed=passed,
        first_pass_p=first_pass,
        worst_ratio=worst_overall,
    )


def _largest_passing_scale(p, scales=None, p_max=20, density=64):
    """Quick sweep for the largest fattening scale that passes the inclusion
    check; None when no tested scale passes."""
    if scales is None:
        scales = [round(0.1 * i, 1) for i in range(1, 10)]
    best = None
    for A in scales:
        rep = check_ek(p.psi, p.k, [A], p_max, density=density)
        if rep.passed:
            best = A
    return best


# --- growth envelope recursion ----------------------------------------------


@dataclass
class OmegaReport:
    values: list
    C_est: float
    a_sup: float
    source_sup: float
    mu: float
    nu_proxy: float
    tau_candidate: float | None
    s: float

    def to_dict(self):
        return {
            "values": list(self.values),
            "C_est": self.C_est,
            "a_sup": self.a_sup,
            "source_sup": self.source_sup,
            "mu": self.mu,
            "nu_proxy": self.nu_proxy,
            "tau_candidate": self.tau_candidate,
            "s": self.s,
        }


def omega_sequence(p, s, r0, n_max, tau_candidate=None):
    """The growth envelope recursion w_1 = 1,
    w_{n+1} = ||a||_inf * M(r0 + s n^(-1/k) w_n) + ||b + P(0)a||_inf,
    with both sup norms sampled over the stadium of radius mu/2.

    Also computes C_est, the smallest grid-verified constant C >=
    max(2/nu, 1) with  ||a||_inf M(r0 + x) + ||b+P(0)a||_inf <= C max(x,1)^N0
    on x in [0, 2]; boundedness w_n <= C_est is asserted whenever
    s <= 1/C_est.
    """
    if s < 0:
        raise GevreyError("s must be >= 0")
    mu = p.effective_mu()
    pts = _stadium_points(mu / 2.0, per_piece=256, interior_target=2048)
    a_vals = p.a.eval_complex(pts)
    src_vals = p.b.eval_complex(pts) + p.P.eval(0.0) * a_vals
    a_sup = float(np.max(np.abs(a_vals)))
    src_sup = float(np.max(np.abs(src_vals)))

    if tau_candidate is None:
        tau_candidate = _largest_passing_scale(p)
    nu_proxy = (mu if tau_candidate is None else min(mu, tau_candidate)) / 2.0

    xs = np.linspace(0.0, 2.0, 2001)
    envelope = (a_sup * p.P.majorant_eval(r0 + xs) + src_sup) / np.maximum(
        xs, 1.0
    ) ** max(p.P.degree, 1)
    C_est = max(float(np.max(envelope)), 2.0 / nu_proxy, 1.0)

    values = [1.0]
    w = 1.0
    for n in range(1, n_max):
        w = a_sup * p.P.majorant_eval(r0 + s * n ** (-1.0 / p.k) * w) + src_sup
        values.append(w)
    if s <= 1.0 / C_est and max(values) > C_est * (1.0 + 1e-12):
        raise GevreyError(
            f"envelope violated: max w = {max(values)!r} > C_est = {C_est!r} "
            f"at s = {s!r}"
        )
    return OmegaReport(
        values=values,
        C_est=C_est,
        a_sup=a_sup,
        source_sup=src_sup,
        mu=mu,
        nu_proxy=nu_proxy,
        tau_candidate=tau_candidate,
        s=s,
    )


# --- complex contraction functional ------------------------------------------


def lambda_estimate(p, s, r0, C, density=64):
    """Grid approximation of
    Lambda(s) = sup_z (path integral of |a| from d to z) * M'(r0 + C s),
    the sup over the stadium of radius s (s = 0 reduces to the exact
    real-axis mass between d and the worst endpoint, times M'(r0)).

    For s > 0 the value is a lower approximation: the sup runs over a finite
    stadium sample and straight-path trapezoid integrals.
    """
    if s < 0:
        raise GevreyError("s must be >= 0")
    mu = p.effective_mu()
    if s >= mu:
        raise GevreyError(f"s = {s!r} must be < mu = {mu!r}")
    if s == 0.0:
        a_fun = build(lambda t: p.a.eval_real(t), p.cheb_tol, p.max_degree)
        mass = max(a_fun.abs_integral(-1.0, p.d), a_fun.abs_integral(p.d, 1.0))
        return mass * float(p.P.majorant_deriv_eval(r0))

    pts = _stadium_points(s, per_piece=density, interior_target=8 * density)
    m = max(int(density), 64)
    tau = np.linspace(0.0, 1.0, m)
    zeta = p.d + (pts[:, None] - p.d) * tau[None, :]
    av = np.abs(p.a.eval_complex(zeta.ravel())).reshape(zeta.shape)
    path_mass = np.trapezoid(av, tau, axis=1) * np.abs(pts - p.d)
    return float(np.max(path_mass)) * float(p.P.majorant_deriv_eval(r0 + C * s))


# --- inclusion probe for analytically continued iterates ---------------------


@dataclass
class ProbeLevel:
    n: int
    ratio: float
    worst_dist: float
    allowed: float
    points: int

    def to_dict(self):
        return {
            "n": self.n,
            "ratio": self.ratio,
            "worst_dist": self.worst_dist,
            "allowed": self.allowed,
            "points": self.points,
        }


@dataclass
class ProbeReport:
    s_requested: float
    s_used: float
    C: float
    r0: float
    k: float
    levels: list = field(default_factory=list)
    all_within: bool = False

    def to_dict(self):
        return {
            "s_requested": self.s_requested,
            "s_used": self.s_used,
            "C": self.C,
            "r0": self.r0,
            "k": self.k,
            "all_within": self.all_within,
            "levels": [lv.to_dict() for lv in self.levels],
        }


def stadium_inclusion_probe(iterates, r0, k, s, C, n_range, density=64):
    """Check that the analytic continuation of iterate n maps the level-n
    stadium of scale s into the interval [-r0, r0] fattened by C s n^(-1/k).

    The continuation of each iterate is only trusted inside its estimated
    validity ellipse, so s is halved until every probed stadium fits inside
    every needed ellipse; the s actually used is reported.  Iterate n is the
    n-th Picard iterate (iterates[0] is the zero start).
    """
    n_range = list(n_range)
    if not n_range:
        raise GevreyError("empty level range")
    if max(n_range) > len(iterates):
        raise GevreyError(
            f"need iterate {max(n_range)} but only {len(iterates)} were kept"
        )
    if s <= 0:
        raise GevreyError("s must be positive")

    s_used = float(s)
    for _ in range(200):
        if all(
            _fits_trusted(iterates[n - 1], s_used * n ** (-1.0 / k)) for n in n_range
        ):
            break
        s_used *= 0.5
    else:
        raise GevreyError("could not shrink s into the trusted ellipses")

    report = ProbeReport(s_requested=float(s), s_used=s_used, C=C, r0=r0, k=k)
    worst = 0.0
    for n in n_range:
        radius = s_used * n ** (-1.0 / k)
        pts = _stadium_points(radius, per_piece=density, interior_target=8 * density)
        vals, trusted = iterates[n - 1].eval_complex(pts)
        if not np.all(trusted):
            raise GevreyError(f"untrusted evaluation points at level {n}")
        dist = interval_distance(vals, half_width=r0)
        allowed = C * radius
        ratio = float(np.max(dist)) / allowed
        report.levels.append(
            ProbeLevel(
                n=n,
                ratio=ratio,
                worst_dist=float(np.max(dist)),
                allowed=allowed,
                points=len(pts),
            )
        )
        worst = max(worst, ratio)
    report.all_within = worst <= 1.0 + EK_PASS_SLACK
    return report


def _fits_trusted(iterate, radius):
    hint = iterate.ellipse_hint
    if math.isinf(hint):
        return True
    return ellipse_radius(1.0 + radius) <= hint * (1.0 - 1e-9)


# --- derivative growth and regularity index fit -------------------------------


@dataclass
class DerivativeNorms:
    values: list
    flagged: list
    degree: int

    def usable(self):
        return [
            (j + 1, v)
            for j, (v, fl) in enumerate(zip(self.values, self.flagged))
            if not fl
        ]

    def to_dict(self):
        return {
            "values": list(self.values),
            "flagged": list(self.flagged),
            "degree": self.degree,
        }


def derivative_norms(u, n_max=12):
    """Sup norms of repeated spectral derivatives, m_j = sup |u^(j)|.

    Each norm carries a conditioning flag: spectral differentiation amplifies
    roundoff by up to the Markov factor prod_{i<j} (deg^2 - i^2)/(2i+1), and
    a norm is flagged once eps * sup|u| * (that factor) exceeds 1e-4 * m_j.
    Flagged norms should not enter regularity fits.
    """
    if n_max > MAX_DERIVATIVES:
        raise GevreyError(f"n_max must be <= {MAX_DERIVATIVES}")
    base_sup = u.sup_norm()
    deg = u.degree
    values = []
    flagged = []
    amplification = 1.0
    cur = u
    for j in range(1, n_max + 1):
        cur = cur.differentiate()
        mj = cur.sup_norm()
        amplification *= max(deg * deg - (j - 1) ** 2, 1.0) / (2.0 * j - 1.0)
        err_est = _EPS * base_sup * amplification
        values.append(mj)
        flagged.append(bool(mj == 0.0 or err_est > 1e-4 * mj))
    return DerivativeNorms(values=values, flagged=flagged, degree=deg)


@dataclass
class GevreyEstimate:
    norms: list
    flagged: list
    slope: float | None
    k_hat: float | None
    B: float | None
    classification: str  # "analytic-like" | "gevrey" | "unresolved"
    usable_indices: list

    def to_dict(self):
        return {
            "norms": list(self.norms),
            "flagged": list(self.flagged),
            "slope": self.slope,
            "k_hat": self.k_hat,
            "B": self.B,
            "classification": self.classification,
            "usable_indices": list(self.usable_indices),
        }


def gevrey_order_estimate(norms, flagged=None):
    """Fit derivative-norm growth against the envelope B^(j+1) j^(j(1+1/k)).

    In logs the envelope is affine in {1, j, j*log j}; the least-squares
    coefficient e on j*log j over usable j >= 2 classifies the sequence:
    e <= 1.05 is analytic-like (consistent with every regularity index),
    otherwise the index estimate is k_hat = 1/(e-1).  Fewer than 4 usable
    norms yields the "unresolved" classification.
    """
    if isinstance(norms, DerivativeNorms):
        flagged = norms.flagged
        norms = norms.values
    norms = [float(v) for v in norms]
    if flagged is None:
        flagged = [False] * len(norms)
    usable = [
        j
        for j in range(2, len(norms) + 1)
        if not flagged[j - 1] and norms[j - 1] > 0.0
    ]
    if len(usable) < 4:
        return GevreyEstimate(
            norms=norms,
            flagged=list(flagged),
            slope=None,
            k_hat=None,
            B=None,
            classification="unresolved",
            usable_indices=usable,
        )
    js = np.array(usable, dtype=float)
    y = np.log([norms[j - 1] for j in usable])
    X = np.column_stack([np.ones_like(js), js, js * np.log(js)])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    slope = float(coef[2])
    if not math.isfinite(slope):
        raise GevreyError("non-finite slope in regularity fit")
    b_fit = float(np.exp(coef[1])) if abs(coef[1]) < 700 else None
    if slope > SLOPE_ANALYTIC_CUTOFF:
        classification = "gevrey"
        k_hat = 1.0 / (slope - 1.0)
    else:
        classification = "analytic-like"
        k_hat = None
    return GevreyEstimate(
        norms=norms,
        flagged=list(flagged),
        slope=slope,
        k_hat=k_hat,
        B=b_fit,
        classification=classification,
        usable_indices=usable,
    )
