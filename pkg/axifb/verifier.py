"""Quantitative checks of the profile, catenoid and energy-comparison lemmas."""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from axifb.catenoid import (
    AnalyticGraph,
    Catenoid,
    PlanarCurve,
    bound_a2,
    bound_e1,
    bound_y,
    catenoid_area,
    catenoid_area_excess,
    catenoid_eval,
    catenoid_slope,
    excess_delta,
    weighted_area,
)
from axifb.potential import (
    build_potential,
    e_eps,
    energy_identity,
    heteroclinic_build,
    subsolution_build,
    subsolution_residual,
)

logger = logging.getLogger(__name__)

PROFILE_EPS = (0.1, 0.05, 0.02)
PROFILE_TOL = 1e-8


class CheckStatus(Enum):
    """Outcome of one verifier check."""
    PASS = "PASS"
    FAIL = "FAIL"
    SKIPPED = "SKIPPED"

    def __str__(self):
        return self.value


@dataclass
class CheckResult:
    name: str
    status: CheckStatus
    measured: float
    bound: str
    detail: str = ""

    @property
    def failed(self) -> bool:
        return self.status == CheckStatus.FAIL

    def row(self):
        return (self.name, str(self.status), self.measured, self.bound)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": str(self.status),
            "measured": self.measured,
            "bound": self.bound,
            "detail": self.detail,
        }


def _result(name: str, ok: bool, measured: float, bound: str, detail: str = "") -> CheckResult:
    status = CheckStatus.PASS if ok else CheckStatus.FAIL
    if not ok:
        logger.warning("%s failed: measured %.6g against %s", name, measured, bound)
    return CheckResult(name, status, float(measured), bound, detail)


class LemmaVerifier:
    """Runs the lemma checks; the competitor-search bounds are optional and slow."""

    def __init__(self, workers: int = 1, progress: bool = False, seed: int = 0):
        self.workers = workers
        self.progress = progress
        self.seed = seed
        self._profiles: Dict[float, object] = {}

    def _profile(self, eps: float):
        if eps not in self._profiles:
            self._profiles[eps] = heteroclinic_build(build_potential(eps))
        return self._profiles[eps]

    def check_sandwich(self) -> CheckResult:
        """(1 - eps) x <= H(x) <= x on [0, 1 + eps ln eps]."""
        worst = 0.0
        for eps in PROFILE_EPS:
            profile = self._profile(eps)
            x = np.linspace(0.0, 1.0 + eps * np.log(eps), 1000)
            h = np.asarray(profile.value(x))
            worst = max(worst, float(np.max(h - x)), float(np.max((1.0 - eps) * x - h)))
        return _result("profile_sandwich", worst <= PROFILE_TOL, worst, f"<= {PROFILE_TOL:g}")

    def check_tail(self) -> CheckResult:
        worst = 0.0
        for eps in PROFILE_EPS:
            profile = self._profile(eps)
            t = np.linspace(profile.t_eps, profile.t_eps + 10.0 * eps, 1000)
            law = 1.0 - 0.5 * eps * np.exp((profile.t_eps - t) / eps)
            worst = max(worst, float(np.max(np.abs(np.asarray(profile.value(t)) - law))))
        return _result("profile_tail_law", worst <= PROFILE_TOL, worst, f"<= {PROFILE_TOL:g}")

    def check_subsolution(self, eps: float = 0.05, l: float = 5.0) -> CheckResult:
        profile = self._profile(eps)
        w = subsolution_build(profile.spec, profile, l)
        x = np.linspace(w.lower, w.upper, 1000)
        worst = float(np.max(subsolution_residual(w, x)))
        return _result("subsolution_residual", worst <= PROFILE_TOL, worst, f"<= {PROFILE_TOL:g}")

    def check_energy_constant(self) -> List[CheckResult]:
        out = []
        for eps in PROFILE_EPS:
            profile = self._profile(eps)
            ee = e_eps(profile.spec)
            diff = abs(ee - energy_identity(profile))
            out.append(_result(f"e_eps_identity[eps={eps:g}]", diff <= PROFILE_TOL, diff, f"<= {PROFILE_TOL:g}"))
            gap = 4.0 - ee
            out.append(_result(f"e_eps_range[eps={eps:g}]", 0.0 < gap < 4.0 * eps, gap, f"(0, {4.0 * eps:g})"))
        return out

    def check_catenoid_identity(self) -> CheckResult:
        """k = 1, n = 3 catenoid area over [1, 10] against its closed form."""
        area = catenoid_area(Catenoid(3, 1.0), 1.0, 10.0)
        closed = 0.5 * np.arccosh(10.0) + 50.0 * np.sqrt(0.99)
        rel = abs(area - closed) / closed
        return _result("catenoid_closed_form", rel <= 1e-8, rel, "relative <= 1e-8")

    def check_catenoid_minimality(self, n_competitors: int = 100) -> CheckResult:
        """Random compactly supported perturbations never lower the catenoid area."""
        c = Catenoid(3, 1.0)
        r1, r2 = 1.0, 10.0
        span = r2 - r1
        rng = np.random.default_rng(self.seed)
        samples = np.linspace(r1, r2, 64)

        def graph(coeffs: np.ndarray) -> PlanarCurve:
            modes = np.arange(1, len(coeffs) + 1)

            def value(r):
                r = np.asarray(r, dtype=float)
                phase = np.pi * (r[..., None] - r1) / span * modes
                return np.asarray(catenoid_eval(c, r)) + np.sum(coeffs * np.sin(phase), axis=-1)

            def slope(r):
                r = np.asarray(r, dtype=float)
                phase = np.pi * (r[..., None] - r1) / span * modes
                bump = np.sum(coeffs * modes * np.cos(phase), axis=-1) * np.pi / span
                return np.asarray(catenoid_slope(c, r)) + bump

            return PlanarCurve.from_graph(AnalyticGraph(value=value, slope=slope, label="perturbed"), samples)

        base = weighted_area(graph(np.zeros(4)), r1, r2, 3)
        worst = np.inf
        for _ in range(n_competitors):
            coeffs = rng.normal(scale=0.2, size=4) / np.arange(1, 5)
            worst = min(worst, weighted_area(graph(coeffs), r1, r2, 3) - base)
        rel = worst / base
        return _result("catenoid_minimality", rel >= -1e-10, rel, ">= -1e-10 relative",
                       f"{n_competitors} competitors")

    def check_excess(self, n: int = 4, necks: Sequence[float] = (1.0, 2.0), a: float = 1e3) -> List[CheckResult]:
        delta = excess_delta(n)
        out = []
        for c in necks:
            excess = catenoid_area_excess(Catenoid(n, c), a)
            target = 0.5 * delta * c ** (n - 1)
            out.append(_result(f"excess_lemma[n={n},c={c:g}]", excess >= target, excess - target, ">= 0"))
        return out

    def check_bounds(self) -> List[CheckResult]:
        runs: List[tuple] = [
            ("bound_e1", lambda: bound_e1(1.0, 100.0, 1.0, self.workers, self.progress)),
            ("bound_y", lambda: bound_y(2.0, 40.0, 1.0, 1.0, self.workers, self.progress)),
            ("bound_a2", lambda: bound_a2(100.0, 1e4, 1.0, 2.0, 4, self.workers, self.progress)),
        ]
        out = []
        for name, run in runs:
            check = run()
            out.append(_result(name, check.holds(), check.lhs_min - check.rhs, ">= -1",
                               f"{check.n_competitors} competitors, best {check.best_family}"))
        return out

    def run(
        self,
        include_bounds: bool = True,
        on_check: Optional[Callable[[str], None]] = None,
    ) -> List[CheckResult]:
        """Run every check in order; bounds are reported SKIPPED when excluded."""
        steps: List[tuple] = [
            ("sandwich", lambda: [self.check_sandwich()]),
            ("tail", lambda: [self.check_tail()]),
            ("subsolution", lambda: [self.check_subsolution()]),
            ("e_eps", self.check_energy_constant),
            ("catenoid", lambda: [self.check_catenoid_identity(), self.check_catenoid_minimality()]),
            ("excess", self.check_excess),
        ]
        results: List[CheckResult] = []
        for label, step in steps:
            if on_check is not None:
                on_check(label)
            results.extend(step())
        if include_bounds:
            if on_check is not None:
                on_check("bounds")
            results.extend(self.check_bounds())
        else:
            results.extend(
                CheckResult(name, CheckStatus.SKIPPED, float("nan"), "-", "skipped")
                for name in ("bound_e1", "bound_y", "bound_a2")
            )
        return results
