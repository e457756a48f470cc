"""The verification suite: every property check, grouped by criterion.

``run_suite`` builds a deterministic pool of random sectorial matrices from
the run configuration and evaluates twelve groups of checks against it. The
groups are independent, so :func:`run_group` can run any one of them.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields
from functools import cached_property
import math
from typing import Callable

import numpy as np

from .linalg import adjoint
from .numrange import compute_hull, convex_hull_points, ellipse_support, polygon_hausdorff
from .regions import (
    Family,
    RegionSpec,
    check_angle,
    containment_check,
    margin,
    omega_boundary_point,
    omega_convexity_check,
    omega_max_im,
    omega_max_im_printed,
    semigroup_closure_check,
)
from .report import VACUOUS, Check, VerifyReport
from .rng import SplitMix64, stream
from .sectorial import SectorialMatrix, random_sectorial, resolvent_contraction
from .semigroup import (
    derived_bounds_check,
    euler_error_table,
    main_theorem_check,
    power_difference_check,
    product_inequality_check,
    resolvent_lens_check,
    scalar_g_sup,
    semca_forward_check,
)

SLOPE_WINDOW = (-1.25, -0.85)
MIN_SLOPE_ROWS = 4


@dataclass(frozen=True)
class RunConfig:
    """Parameters of a verification run. Angles are in radians."""

    seed: int = 1
    dims: tuple = (2, 4, 8)
    alphas: tuple = (0.2, 0.6, 1.0, 1.4)
    trials: int = 10_000
    angles: int = 720
    instances: int = 100
    boundary_samples: int = 1024
    product_trials: int = 1000
    oracle_cases: int = 50
    semigroup_ts: tuple = (0.1, 1.0, 10.0)
    euler_ts: tuple = (0.5, 1.0, 2.0)
    euler_log2_max: int = 10
    resolvent_lambdas: tuple = (0.1, 1.0, 10.0)
    power_nmax: int = 1024
    containment_tol: float = 1e-8
    semigroup_tol: float = 1e-7
    class_tol: float = 1e-9

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "alphas", tuple(check_angle(a) for a in self.alphas))
        for name in ("semigroup_ts", "euler_ts", "resolvent_lambdas"):
            object.__setattr__(self, name, tuple(float(x) for x in getattr(self, name)))
        if not self.dims or min(self.dims) < 1:
            raise ValueError("dims must be a non-empty list of positive integers")
        if not self.alphas:
            raise ValueError("alphas must not be empty")
        for name in ("trials", "angles", "instances", "boundary_samples", "product_trials",
                     "oracle_cases", "power_nmax"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be positive")
        if self.angles < 3:
            raise ValueError("angles must be at least 3")
        if any(t < 0 for t in self.semigroup_ts + self.euler_ts + self.resolvent_lambdas):
            raise ValueError("times and resolvent parameters must be non-negative")

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def euler_ns(self) -> list:
        return [2**k for k in range(self.euler_log2_max + 1)]


# stream keys, one per consumer, so that changing one group never shifts another
_KEY_INSTANCES, _KEY_CLOSURE, _KEY_NORMAL, _KEY_ELLIPSE, _KEY_PRODUCT, _KEY_HERMITIAN = range(1, 7)


class Suite:
    """Holds the instance pool and the per-instance caches shared by groups."""

    def __init__(self, config: RunConfig):
        self.config = config

    @cached_property
    def instances(self) -> list:
        cfg = self.config
        out = []
        for k in range(cfg.instances):
            dim = cfg.dims[k % len(cfg.dims)]
            alpha = cfg.alphas[(k // len(cfg.dims)) % len(cfg.alphas)]
            out.append(random_sectorial(dim, alpha, stream(cfg.seed, _KEY_INSTANCES, k).seed))
        return out

    @cached_property
    def euler_tables(self) -> list:
        """``(instance index, EulerReport)`` for every instance and Euler time."""
        return [(k, euler_error_table(Sm, t, self.config.euler_ns))
                for k, Sm in enumerate(self.instances) for t in self.config.euler_ts]


def _instance_params(k: int, Sm: SectorialMatrix) -> dict:
    return {"instance": k, "dim": Sm.dim, "alpha": Sm.alpha}


def inclusion_chain(suite: Suite) -> list:
    cfg = suite.config
    checks = []
    chain = [(Family.LSET, Family.OMEGA), (Family.OMEGA, Family.QSET), (Family.QSET, Family.DSET)]
    for a in cfg.alphas:
        for inner, outer in chain:
            r = containment_check(RegionSpec(inner, a), RegionSpec(outer, a), cfg.boundary_samples,
                                  cfg.containment_tol)
            checks.append(Check(
                f"{inner.value} inside {outer.value}", "L(alpha) in Omega(alpha) in Q(alpha) in D_alpha",
                r.passed, cfg.containment_tol - r.worst_dist,
                params={"alpha": a, "samples": r.samples}, witness=r.witness,
                details={"worst_dist": r.worst_dist, "worst_margin": r.worst_margin},
            ))
        if a == 0.0:
            continue  # D_0 = [0, 1] does lie in C(0) = [-1, 1]
        z = 1j * math.sin(a)
        r = containment_check(RegionSpec(Family.DSET, a), RegionSpec(Family.CSET, a), cfg.boundary_samples,
                              cfg.containment_tol)
        m_d = float(margin(RegionSpec(Family.DSET, a), z))
        m_c = float(margin(RegionSpec(Family.CSET, a), z))
        found = (not r.passed) and m_d >= -1e-12 and m_c < 0
        checks.append(Check(
            "D_alpha not inside C(alpha)", "i sin(alpha) lies in D_alpha but not in C(alpha)",
            found, -m_c, params={"alpha": a}, witness=z,
            details={"margin_D": m_d, "margin_C": m_c, "boundary_excess": r.worst_dist},
        ))
    return checks


def semigroup_closure(suite: Suite) -> list:
    cfg = suite.config
    checks = []
    cases = [(Family.CSET, None), (Family.OMEGA, None), (Family.QSET, None), (Family.BSET, Family.CSET)]
    for i, a in enumerate(cfg.alphas):
        for j, (fam, factor) in enumerate(cases):
            spec = RegionSpec(fam, a)
            fspec = None if factor is None else RegionSpec(factor, a)
            seed = stream(cfg.seed, _KEY_CLOSURE, i, j).seed
            r = semigroup_closure_check(spec, cfg.trials, seed, fspec, tol=1e-12)
            anchor = ("B(alpha) C(alpha) in B(alpha)" if factor else f"{fam.value}(alpha) is closed under products")
            checks.append(Check(
                "ideal property" if factor else f"{fam.value} closure", anchor, r.passed, r.worst_margin,
                params={"alpha": a, "trials": r.trials, "seed": seed}, witness=list(r.witness),
                details={"violations": r.violations},
            ))
    return checks


def omega_convexity(suite: Suite) -> list:
    checks = []
    for a in suite.config.alphas:
        if a == 0.0:
            continue  # Omega(0) is the segment [0, 1]
        r = omega_convexity_check(a, 1000)
        checks.append(Check(
            "Omega boundary convexity", "curvature of the Omega(alpha) boundary has constant sign",
            r.passed, r.min_curvature_numerator, params={"alpha": a, "samples": r.samples},
            details={"max_closed_form_error": r.max_closed_form_error, "sign_pattern_ok": r.sign_pattern_ok,
                     "min_re": r.min_re, "re_floor": r.re_floor, "polygon_convex": r.polygon_convex},
        ))
        lhs, rhs = math.tan(0.5 * a) ** 2, math.sin(a)
        checks.append(Check("half-angle estimate", "tan^2(alpha/2) <= sin(alpha)", lhs <= rhs, rhs - lhs,
                            params={"alpha": a}))
    return checks


def omega_max_im_grid(alpha: float, samples: int = 100_001) -> float:
    """Dense-grid maximum of ``|Im z|`` over the Omega boundary curve."""
    t = np.linspace(0.5 * math.pi - alpha, 0.5 * math.pi + alpha, samples)
    return float(np.max(np.abs(np.imag(omega_boundary_point(alpha, t)))))


def omega_extremum(suite: Suite) -> list:
    checks = []
    for a in suite.config.alphas:
        if a == 0.0:
            continue
        value, grid = omega_max_im(a), omega_max_im_grid(a)
        err = abs(value - grid)
        bound = math.tan(0.5 * a)
        checks.append(Check(
            "Omega max |Im z|", "closed-form max |Im z| over Omega(alpha) matches the boundary curve",
            err <= 1e-8 and value < bound, min(1e-8 - err, bound - value), params={"alpha": a},
            details={"closed_form": value, "grid_max": grid, "tan_half_alpha": bound,
                     "printed_variant": omega_max_im_printed(a)},
        ))
    return checks


def random_unitary(rng: SplitMix64, n: int) -> np.ndarray:
    Q, R = np.linalg.qr(rng.complex_normal((n, n)))
    d = np.diag(R)
    return Q * (d / np.abs(d))


def numrange_oracles(suite: Suite) -> list:
    cfg = suite.config
    checks = []
    worst_ratio, failures, witness = 0.0, 0, None
    for k in range(cfg.oracle_cases):
        rng = stream(cfg.seed, _KEY_NORMAL, k)
        n = 2 + k % 7
        U = random_unitary(rng, n)
        lam = rng.complex_normal(n)
        A = (U * lam) @ adjoint(U)
        hull = compute_hull(A, cfg.angles)
        dist = polygon_hausdorff(hull.outer_vertices, convex_hull_points(lam))
        limit = max(10.0 * hull.gap, 1e-6)
        worst_ratio = max(worst_ratio, dist / limit)
        if dist > limit:
            failures += 1
            witness = witness or {"case": k, "dim": n, "hausdorff": dist, "limit": limit}
    checks.append(Check(
        "normal matrix hull", "W(A) is the convex hull of the spectrum for normal A",
        failures == 0, 1.0 - worst_ratio, params={"cases": cfg.oracle_cases, "angles": cfg.angles},
        witness=witness, details={"worst_ratio_to_limit": worst_ratio},
    ))

    worst = 0.0
    for k in range(cfg.oracle_cases):
        A = stream(cfg.seed, _KEY_ELLIPSE, k).complex_normal((2, 2))
        hull = compute_hull(A, cfg.angles)
        worst = max(worst, float(np.max(np.abs(hull.support_values - ellipse_support(A, hull.angles)))))
    checks.append(Check(
        "2x2 elliptical range", "W(A) of a 2x2 matrix is an ellipse with foci at the eigenvalues",
        worst <= 1e-8, 1e-8 - worst, params={"cases": cfg.oracle_cases, "angles": cfg.angles},
        details={"max_support_error": worst},
    ))
    return checks


def _tag(report: VerifyReport, params: dict) -> list:
    for c in report.checks:
        c.params.update(params)
    return report.checks


def semca_forward(suite: Suite) -> list:
    cfg = suite.config
    checks = []
    for k, Sm in enumerate(suite.instances):
        rep = semca_forward_check(Sm, cfg.semigroup_ts, cfg.euler_ns, cfg.class_tol)
        checks.extend(_tag(rep, _instance_params(k, Sm)))
    return checks


def main_theorem(suite: Suite) -> list:
    cfg = suite.config
    checks = []
    for k, Sm in enumerate(suite.instances):
        rep = main_theorem_check(Sm, cfg.semigroup_ts, cfg.angles, cfg.semigroup_tol)
        checks.extend(_tag(rep, _instance_params(k, Sm)))
    return checks


def euler_bounds(suite: Suite) -> list:
    cfg = suite.config
    checks = []
    for k, rep in suite.euler_tables:
        Sm = suite.instances[k]
        worst = max(r.ratio for r in rep.rows)
        vacuous = sum(r.status == VACUOUS for r in rep.rows)
        checks.append(Check(
            "Euler error bound", "||exp(-tS) - (I + tS/n)^(-n)|| <= K(alpha) / (n cos^2 alpha)",
            rep.passed, 1.0 - worst, params={**_instance_params(k, Sm), "t": rep.t},
            details={"rows": [asdict(r) for r in rep.rows], "vacuous_rows": vacuous},
            status=VACUOUS if vacuous and rep.passed else "",
        ))
    for a in cfg.alphas:
        for n in (1, 4, 16, 64):
            g = scalar_g_sup(a, n)
            limit = (1.0 + 1e-6) / (n * math.cos(a) ** 2)
            checks.append(Check(
                "scalar Euler error", "sup |exp(-w) - (1 + w/n)^(-n)| over the sector boundary <= 1/(n cos^2 alpha)",
                g <= limit, 1.0 - g / limit, params={"alpha": a, "n": n}, details={"sup": g, "limit": limit},
            ))
    return checks


def convergence_rate(suite: Suite) -> list:
    lo, hi = SLOPE_WINDOW
    checks = []
    for k, rep in suite.euler_tables:
        if rep.usable_rows < MIN_SLOPE_ROWS:
            continue
        s = rep.slope
        checks.append(Check(
            "Euler convergence slope", "Euler error decays like 1/n",
            lo <= s <= hi, min(s - lo, hi - s), params={**_instance_params(k, suite.instances[k]), "t": rep.t},
            details={"slope": s, "usable_rows": rep.usable_rows},
        ))
    return checks


def resolvent_localization(suite: Suite) -> list:
    cfg = suite.config
    checks = []
    for k, Sm in enumerate(suite.instances):
        for lam in cfg.resolvent_lambdas:
            checks.extend(_tag(resolvent_lens_check(Sm, lam, cfg.angles, cfg.containment_tol),
                               _instance_params(k, Sm)))
    return checks


def derived_bounds(suite: Suite) -> list:
    cfg = suite.config
    checks = []
    for k, Sm in enumerate(suite.instances):
        checks.extend(_tag(derived_bounds_check(Sm, cfg.semigroup_ts), _instance_params(k, Sm)))

    by_alpha: dict = {}
    for Sm in suite.instances:
        by_alpha.setdefault(Sm.alpha, []).append(Sm)
    pool = [by_alpha[a] for a in cfg.alphas if a in by_alpha]
    worst, failures, witness = 1.0, 0, None
    for k in range(cfg.product_trials if pool else 0):
        rng = stream(cfg.seed, _KEY_PRODUCT, k)
        u = rng.uniform(16)
        group = pool[k % len(pool)]
        count = 2 + int(u[0] * 3)
        factors = []
        for j in range(count):
            Sm = group[int(u[1 + j] * len(group))]
            t = round(4.0 * u[8 + j], 3)
            v = rng.complex_normal(Sm.dim)
            factors.append((Sm, t, v / np.linalg.norm(v)))
        c = product_inequality_check(factors, group[0].alpha, tol=1e-9)
        worst = min(worst, c.margin)
        if not c.passed:
            failures += 1
            witness = witness or {"trial": k, "product": c.witness}
    checks.append(Check(
        "product inequality", "|sin(alpha) sqrt(prod (exp(-t_k S_k)u_k, u_k)) +/- i cos(alpha)| <= 1",
        failures == 0, worst, params={"trials": cfg.product_trials}, witness=witness,
        details={"failures": failures},
    ))
    return checks


def hermitian_power_oracle(seed: int, nmax: int = 1024) -> tuple:
    """``(ns, values)`` for a Hermitian C with eigenvalues ``n/(n+1)``.

    For Hermitian C the quantity ``(n+1) ||C^n - C^{n+1}||`` is the largest
    ``(n+1) c^n (1 - c)`` over the spectrum, which at ``c = n/(n+1)`` is
    ``(n/(n+1))^n``; that decreases to ``1/e``.
    """
    ns = [2**k for k in range(int(math.log2(nmax)) + 1)]
    eig = np.array([n / (n + 1.0) for n in ns] + [0.0])
    U = random_unitary(stream(seed, _KEY_HERMITIAN), eig.size)
    C = (U * eig) @ adjoint(U)
    return ns, power_difference_check(0.5 * (C + adjoint(C)), ns).values


def power_differences(suite: Suite) -> list:
    cfg = suite.config
    checks = []
    ns = range(1, cfg.power_nmax + 1)
    for k, Sm in enumerate(suite.instances):
        rep = power_difference_check(resolvent_contraction(Sm, 1.0), ns, Sm.alpha)
        ratio = max(v / b for v, b in zip(rep.values, rep.bounds))
        checks.append(Check(
            "power difference bound", "(n + 1) ||C^n - C^(n+1)|| <= K for C = (I + S)^(-1)",
            rep.passed, 1.0 - ratio, params={**_instance_params(k, Sm), "nmax": cfg.power_nmax},
            details={"sup": rep.sup, "at_nmax": rep.values[-1], "bound_at_nmax": rep.bounds[-1]},
        ))
    hns, values = hermitian_power_oracle(cfg.seed, cfg.power_nmax)
    target = math.exp(-1.0)
    rel = abs(values[-1] - target) / target
    decreasing = all(b <= a * (1.0 + 1e-12) for a, b in zip(values, values[1:]))
    checks.append(Check(
        "Hermitian power difference limit", "(n + 1) ||C^n - C^(n+1)|| tends to 1/e for positive C",
        rel <= 0.02 and decreasing, 0.02 - rel, params={"ns": hns},
        details={"values": values, "limit": target, "relative_error": rel, "decreasing": decreasing},
    ))
    return checks


@dataclass(frozen=True)
class Group:
    number: int
    title: str
    run: Callable


GROUPS = (
    Group(1, "inclusion chain", inclusion_chain),
    Group(2, "multiplicative closure", semigroup_closure),
    Group(3, "Omega convexity", omega_convexity),
    Group(4, "Omega max |Im z|", omega_extremum),
    Group(5, "numerical range oracles", numrange_oracles),
    Group(6, "semigroup and Euler approximants in class C", semca_forward),
    Group(7, "semigroup range in Omega and D", main_theorem),
    Group(8, "Euler error bound", euler_bounds),
    Group(9, "Euler convergence rate", convergence_rate),
    Group(10, "resolvent range in the lens", resolvent_localization),
    Group(11, "real/imaginary bounds and product inequality", derived_bounds),
    Group(12, "power differences", power_differences),
)


def run_group(number: int, suite: Suite) -> list:
    group = GROUPS[number - 1]
    checks = group.run(suite)
    for c in checks:
        c.group = f"{group.number}: {group.title}"
    return checks


def run_suite(config: RunConfig | None = None, groups=None) -> VerifyReport:
    """Run the selected groups (all by default) and collect their checks."""
    suite = Suite(config or RunConfig())
    report = VerifyReport()
    for g in GROUPS:
        if groups is None or g.number in groups:
            report.extend(run_group(g.number, suite))
    return report
