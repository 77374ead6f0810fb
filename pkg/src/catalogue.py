"""
The catalogued experiments. Each one binds library operations to named checks
and plot tables; `list_experiments` renders the catalogue.
"""
import math
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.contour import Contour, Rectangle, count_zeros_in_disk, locate_zeros, winding_count
from src.corpus import random_rational
from src.counterexample import (OneZeroSpec, build_bundle, decay_ratios, export_bundle, growth_predicates,
                                residue_weight_sum, symmetry_check, verify_bundle)
from src.diffops import (asymptotic_difference_check, binomial_difference_eval, check_commutation,
                         divided_difference, forward_difference, nth_derivative)
from src.epsilon import (build_epsilon_set, circle_exclusion, log_density, log_measure, pole_coincidence_set)
from src.errors import PoleHit
from src.experiment import REGISTRY, Experiment, register
from src.expr import FunctionExpr, evaluate_array
from src.grid import GridSpec
from src.logcomplex import relative_deviation
from src.nevanlinna import (admissible_radius, arc_profile, growth_profile, keldysh_check, logderiv_bound_profile,
                            miles_rossi_bound, miles_rossi_measure)
from src.registry import PoleZeroRegistry
from src.sampling import disk_points
from src.wiman import central_index_order, central_index_profile, n_power_ratio_trend, wv_trend


class _Params(BaseModel):
    model_config = ConfigDict(extra="forbid")


class BundleParams(_Params):
    n_seq: List[int] = Field(default_factory=lambda: [2, 10, 60])
    ratio_floor: float = 4.0


def _bundle(exp: Experiment):
    p = exp.params
    return build_bundle(OneZeroSpec(n_seq=p.n_seq, ratio_floor=p.ratio_floor), exp.cfg.precision_bits)


def _strictly_increasing(values: List[int]) -> bool:
    return all(b > a for a, b in zip(values, values[1:]))


@register
class DiffOracle(Experiment):
    id = "diff-oracle"
    description = "recurrence tree and binomial expansion of the n-th difference agree"
    anchor = "forward difference recurrence"

    class Params(_Params):
        cases: int = 1000
        max_order: int = 4
        radius: float = 5.0

    def run(self):
        p = self.params
        fs = self.cfg.functions()
        bits = self.cfg.precision_bits
        tol = self.cfg.tolerance("relative", 1e-10)
        rng = np.random.default_rng(self.cfg.seed)
        pairs = [(name, n) for name in fs for n in range(1, p.max_order + 1)]
        per = max(1, math.ceil(p.cases / max(1, len(pairs))))
        rows = []

        def agree():
            for name, n in pairs:
                f = fs[name]
                avoid = [e.location - k for e in f.reg.poles() for k in range(n + 1)]
                zs = disk_points(rng, per, p.radius, avoid, margin=1e-2)
                tree = evaluate_array(forward_difference(f, n).expr, zs, bits)
                worst = max(relative_deviation(tree[i], binomial_difference_eval(f, n, complex(z), bits))
                            for i, z in enumerate(zs))
                rows.append([name, n, worst])
            worst = max(r[2] for r in rows)
            return worst <= tol, {"max_relative": worst, "cases": per * len(pairs)}

        self.check("oracle_equivalence", self.description, "identity", agree)
        self.table("oracle", ["function", "n", "max_relative"], rows)


@register
class Commutation(Experiment):
    id = "commutation"
    description = "derivative of the n-th difference equals the n-th difference of the derivative"
    anchor = "difference and derivative commute"

    class Params(_Params):
        samples: int = 100
        max_order: int = 3
        radius: float = 5.0

    def run(self):
        p = self.params
        fs = self.cfg.functions()
        tol = self.cfg.tolerance("relative", 1e-10)
        rows = []

        def commute():
            for i, (name, f) in enumerate(fs.items()):
                for n in range(1, p.max_order + 1):
                    dev = check_commutation(f, n, p.samples, seed=self.cfg.seed + 97 * i + n, radius=p.radius)
                    rows.append([name, n, dev])
            worst = max(r[2] for r in rows)
            return worst <= tol, {"max_relative": worst}

        self.check("commutation", self.description, "identity", commute)
        self.table("commutation", ["function", "n", "max_relative"], rows)


@register
class OneZero(Experiment):
    id = "thm-onezero"
    description = "the finite one-zero pair satisfies its identities exactly"
    anchor = "g = f(z+1) - f(z) has only one zero"

    class Params(BundleParams):
        samples: int = 100

    def run(self):
        b = _bundle(self)
        spec = b.spec
        state: Dict[str, object] = {}

        def verified():
            if "report" not in state:
                state["report"] = verify_bundle(b, self.params.samples, seed=self.cfg.seed,
                                                bits=self.cfg.precision_bits, tolerances=self.cfg.tolerances)
            return state["report"]

        def identity(name: str):
            def fn():
                r = next(i for i in verified().identities if i.name == name)
                return r.passed, r.model_dump()
            return fn

        def counts():
            cs = verified().counts
            return all(c.passed for c in cs), {"counts": [c.model_dump() for c in cs]}

        def decay():
            ratios = decay_ratios(spec, b.c_seq)
            last = self.cfg.tolerance("decay_last", 1e-2)
            ok = all(q < 1 for q in ratios) and (not ratios or ratios[-1] < last)
            return ok, {"ratios": ratios, "weight_sum": residue_weight_sum(spec, b.c_seq)}

        def lattice():
            expected_f = 4 * sum(spec.n_seq)
            fp, gp = b.f.reg.poles(), b.g.reg.poles()
            simple = all(e.multiplicity == 1 for e in fp + gp)
            sym = symmetry_check(b)
            ok = len(fp) == expected_f and len(gp) == 4 * spec.K and simple and sym.passed
            return ok, {"f_poles": len(fp), "g_poles": len(gp), "simple": simple, **sym.model_dump()}

        self.check("difference_identity", "f(z+1) - f(z) = g(z)", "identity", identity("difference"))
        self.check("rational_identity", "g(z) = z / H(z^4)", "identity", identity("rational"))
        self.check("zero_count", "g has exactly one zero", "count", counts)
        self.check("derivative_symmetry", "h'(i beta) = -h'(beta) at the zeros of h", "identity",
                   identity("symmetry"))
        self.check("residue_decay", "n_k |c_k| decreases", "bound", decay)
        self.check("pole_lattice", "pole sets have the expected size and symmetry", "count", lattice)
        if "report" in state:
            rep = state["report"]
            self.table("identities", ["identity", "max_error", "tolerance"],
                       [[i.name, i.max_error, i.tolerance] for i in rep.identities])
            self.table("zero_counts", ["R", "zero_count", "expected"],
                       [[c.radius, c.measured, c.expected] for c in rep.counts])
        export_bundle(b, self.artifact(f"{self.id}.bundle.json"))


@register
class Keldysh(Experiment):
    id = "keldysh"
    description = "m(r,f) + m(r,g) tends to zero for the one-zero pair"
    anchor = "m(r, f) + m(r, g) = o(1)"

    Params = BundleParams

    def run(self):
        b = _bundle(self)
        radii = self.radii()
        state = {}

        def small():
            res = keldysh_check(b.f, b.g, radii)
            state["res"] = res
            final_tol = self.cfg.tolerance("final", 0.5)
            return res.decreasing and res.final < final_tol, res.model_dump(exclude={"r_grid", "sums"})

        self.check("keldysh_smallness", self.description, "trend", small)
        if "res" in state:
            self.table("keldysh", ["r", "m_f_plus_m_g"], list(zip(state["res"].r_grid, state["res"].sums)))


@register
class Growth(Experiment):
    id = "growth"
    description = "T(r,f)/r and n(r,f)/r stay bounded for the one-zero pair"
    anchor = "T(r, f) = O(r), n(r, f) = O(r)"

    class Params(BundleParams):
        pole_ratio_bound: float = 6.0

    def run(self):
        b = _bundle(self)
        state = {}

        def T_f():
            gp = growth_predicates(b, self.radii(), self.params.pole_ratio_bound)
            state["gp"] = gp
            return gp.f_bounded, {"max": max(gp.T_f_over_r), "median": float(np.median(gp.T_f_over_r))}

        self.check("characteristic_bounded", "T(r,f)/r within twice its median", "bound", T_f)
        gp = state.get("gp")
        if gp is None:
            return
        self.check("pole_count_bounded", "n(r,f)/r below the configured bound", "bound",
                   lambda: (gp.poles_bounded, {"max": max(gp.n_f_over_r), "bound": gp.pole_ratio_bound}))
        self.check("g_characteristic_bounded", "T(r,g)/(log r)^2 within twice its median", "bound",
                   lambda: (gp.g_bounded, {"max": max(gp.T_g_over_log2)}))
        self.table("growth", ["r", "T_f_over_r", "n_f_over_r", "T_g_over_log2"],
                   list(zip(gp.r_grid, gp.T_f_over_r, gp.n_f_over_r, gp.T_g_over_log2)))


@register
class ArgumentPrinciple(Experiment):
    id = "argument-principle"
    description = "winding counts match known zeros and poles of random rational functions"
    anchor = "argument principle"

    class Params(_Params):
        count: int = 200
        point_radius: float = 4.0
        contour_radius: float = 5.0

    def run(self):
        p = self.params
        rng = np.random.default_rng(self.cfg.seed)
        fs = [random_rational(rng, radius=p.point_radius) for _ in range(p.count)]
        R = p.contour_radius
        rows = []

        def exact():
            failures = 0
            for i, f in enumerate(fs):
                reg = f.reg
                expected = reg.net_inside(lambda z: abs(z) < R)
                circle = winding_count(f, Contour.circle(R)).net
                square = winding_count(f, Contour.rectangle(complex(-R, -R), complex(R, R))).net
                zeros = count_zeros_in_disk(f, R)
                ok = circle == expected and square == expected and zeros == reg.count_inside(R, "zero")
                failures += not ok
                rows.append([i, expected, circle, square, zeros])
            return failures == 0, {"failures": failures, "functions": len(fs)}

        self.check("winding_exact", self.description, "count", exact)
        self.table("winding", ["index", "expected", "circle", "square", "zero_count"], rows)


def _checkpoints(reg: PoleZeroRegistry, radii: List[float]) -> List[float]:
    return [admissible_radius(reg, r) for r in radii]


@register
class LessHalf(Experiment):
    id = "thm-lesshalf"
    description = "zeros of (f(z+1) - f(z))/f(z) keep appearing for a small-order entire f"
    anchor = "G has infinitely many zeros"

    class Params(_Params):
        checkpoints: List[float] = Field(default_factory=lambda: [10.0, 100.0, 1000.0])

    def run(self):
        f = self.cfg.function("f")
        G = divided_difference(f, 1)
        radii = _checkpoints(G.reg, self.params.checkpoints)
        rows = []

        def grows():
            counts = [count_zeros_in_disk(G, R) for R in radii]
            rows.extend(zip(radii, counts))
            return _strictly_increasing(counts), {"radii": radii, "counts": counts}

        self.check("zero_counts_increase", self.description, "count", grows)
        self.table("zero_counts", ["R", "zero_count"], rows)


@register
class DifferenceOrDivided(Experiment):
    id = "thm-thm3"
    description = "for T(r,f) = O((log r)^2) the difference or the divided difference keeps gaining zeros"
    anchor = "at least one of g and G has infinitely many zeros"

    class Params(_Params):
        checkpoints: List[float] = Field(default_factory=lambda: [10.0, 100.0, 1000.0])

    def run(self):
        f = self.cfg.function("f")
        g = forward_difference(f, 1).expr
        G = divided_difference(f, 1)
        joint = PoleZeroRegistry(tuple(f.reg.entries) + tuple(g.reg.poles()))
        radii = _checkpoints(joint, self.params.checkpoints)
        rows = []

        def hypothesis():
            prof = growth_profile(f, self.radii())
            ratios = [t / math.log(r) ** 2 for t, r in zip(prof.T_vals, prof.r_grid)]
            return max(ratios) < 2 * float(np.median(ratios)), {"max": max(ratios), "median": float(np.median(ratios))}

        def grows():
            cg = [count_zeros_in_disk(g, R) for R in radii]
            cG = [count_zeros_in_disk(G, R) for R in radii]
            rows.extend(zip(radii, cg, cG))
            return _strictly_increasing(cg) or _strictly_increasing(cG), {"g": cg, "G": cG}

        self.check("growth_hypothesis", "T(r,f)/(log r)^2 within twice its median", "bound", hypothesis)
        self.check("zero_counts_increase", self.description, "count", grows)
        self.table("zero_counts", ["R", "g_zero_count", "G_zero_count"], rows)


@register
class Asymptotics(Experiment):
    id = "lem-asymptotics"
    description = "difference quotients approach derivatives off an exceptional set of discs"
    anchor = "f(z+c) - f(z) = c f'(z)(1 + o(1)) off an epsilon-set"

    class Params(_Params):
        c_max: float = 1.0
        c_count: int = 3
        h: float = 15.0
        zero_tol: float = 1e-2
        order_grid: GridSpec = Field(default_factory=lambda: GridSpec(min=10, max=1e5, points=24))
        relations: List[str] = Field(default_factory=lambda: ["shift_ratio", "taylor2", "logderiv"])

    def exceptional_points(self, f: FunctionExpr, reach: float) -> List[complex]:
        """Zeros of f, f' and f'' within reach: the centres of the exclusion discs."""
        pts = [e.location for e in f.reg.entries if e.modulus <= reach]
        box = Rectangle(complex(-reach, -reach), complex(reach, reach))
        for k in (1, 2):
            d = nth_derivative(f, k)
            leaves = locate_zeros(d, box, tol=self.params.zero_tol)
            pts += [leaf.center for leaf in leaves]
            self.log.info("derivative zeros located", order=k, count=sum(leaf.count for leaf in leaves))
        return pts

    def run(self):
        p = self.params
        f = self.cfg.function("f")
        radii = self.radii()
        tol = self.cfg.tolerance("top_median", 0.05)
        order = growth_profile(f, [float(r) for r in p.order_grid.radii()]).order_est
        self.metadata["order_estimate"] = order
        pts = self.exceptional_points(f, 1.05 * max(radii) + 2 * p.h)
        eps = build_epsilon_set(PoleZeroRegistry.build(zeros=[(z, 1) for z in pts]), "exclusion", p.h)
        self.metadata["discs"] = len(eps.discs)

        def relation(name: str, n: int, bounded: bool):
            def fn():
                rep = asymptotic_difference_check(f, n, p.c_max, radii, eps, order, name, p.c_count)
                self.table(f"{name}_n{n}", ["r", "max_dev", "excluded_fraction"],
                           [[x.r, x.max_dev, x.excluded_fraction] for x in rep.records])
                ok = rep.decreasing and (not bounded or rep.top_median < tol)
                return ok, rep.model_dump(include={"bottom_median", "top_median", "decreasing"})
            return fn

        self.check("first_difference", "(f(z+c) - f(z))/(c f'(z)) - 1 decays", "trend",
                   relation("difference", 1, True))
        self.check("second_difference", "f(z+2) - 2f(z+1) + f(z) over f''(z), minus 1, decays", "trend",
                   relation("difference", 2, True))
        for name in p.relations:
            self.check(name, f"{name} relation decays", "trend", relation(name, 1, False))


@register
class MilesRossi(Experiment):
    id = "lem-miles-rossi"
    description = "the angles where |z f'/f| is comparable to n(r) have measure bounded below"
    anchor = "angular measure of U_r"

    class Params(_Params):
        gamma: float = 0.5
        M: float = 4.5
        rho: float = 1.0 / 3.0
        samples: int = 2 ** 14

    def run(self):
        p = self.params
        f = self.cfg.function("f")
        radii = _checkpoints(f.reg, self.radii())
        bound = miles_rossi_bound(p.gamma, p.M, p.rho)
        need = 1 - 3 / p.M - 0.1
        rows = []

        def measured():
            for r in radii:
                res = miles_rossi_measure(f, r, p.gamma, p.samples)
                rows.append([res.r, res.measure, res.zeros])
            share = sum(1 for _, m, _ in rows if m > bound) / len(rows)
            return share >= need, {"share": share, "required": need, "bound": bound}

        self.check("measure_bounded_below", self.description, "bound", measured)
        self.table("miles_rossi", ["r", "measure", "zeros"], rows)


@register
class Arc(Experiment):
    id = "lem-arc"
    description = "long arcs with |H| > 1 occupy a dense set of radii"
    anchor = "longest arc theta(r) and the density of F_tau"

    class Params(_Params):
        tau: float = 0.75
        rho: float = 1.0 / 3.0
        slack: float = 0.1
        samples: int = 2 ** 14
        refine: int = 6

    def run(self):
        p = self.params
        H = self.cfg.function("H")
        state = {}

        def dense():
            prof = arc_profile(H, self.radii(), p.tau, p.rho, p.slack, p.samples, p.refine)
            state["prof"] = prof
            return prof.holds, prof.model_dump(exclude={"r_grid", "theta", "min_modulus_above_one"})

        self.check("arc_density", self.description, "bound", dense)
        prof = state.get("prof")
        if prof is not None:
            self.table("arcs", ["r", "theta", "min_modulus_above_one"],
                       list(zip(prof.r_grid, prof.theta, prof.min_modulus_above_one)))


@register
class Wiman(Experiment):
    id = "wiman"
    description = "f^(n)(z)/f(z) behaves like (N(r)/z)^n at maximum modulus points"
    anchor = "Wiman-Valiron asymptotics"

    class Params(_Params):
        orders: List[int] = Field(default_factory=lambda: [1, 2])
        order_range: Tuple[float, float] = (0.25, 0.45)

    def run(self):
        p = self.params
        f = self.cfg.function("f")
        radii = self.radii()
        tol = self.cfg.tolerance("top_median", 0.15)

        def ratio(n: int):
            def fn():
                t = wv_trend(f, n, radii)
                self.table(f"wv_n{n}", ["r", "deviation", "central_index"],
                           [[x.r, x.deviation, x.central_index] for x in t.results])
                return t.decreasing and t.top_median < tol, t.model_dump(exclude={"results"})
            return fn

        for n in p.orders:
            self.check(f"ratio_n{n}", f"n = {n} derivative ratio at maximum modulus", "trend", ratio(n))

        state = {}

        def order():
            prof = central_index_profile(f, radii)
            state["prof"] = prof
            est = central_index_order(prof)
            lo, hi = p.order_range
            return lo <= est <= hi, {"order": est, "monotone": prof.monotone(), "convex": prof.log_mu_convex()}

        self.check("central_index_order", "growth exponent of the central index", "bound", order)
        prof = state.get("prof")
        if prof is None:
            return
        self.table("central_index", ["r", "log_mu", "N"], list(zip(prof.r_grid, prof.mu_vals, prof.N_vals)))
        for n in p.orders:
            ratios, down = n_power_ratio_trend(prof, n)
            self.check(f"n_power_ratio_n{n}", f"N(r)^{n}/r decreases over the top decade", "trend",
                       lambda ratios=ratios, down=down: (down, {"ratios": ratios}))


@register
class NotRational(Experiment):
    id = "lem-notrational"
    description = "beyond r0 no zero a of f has a zero at a + 1 or a - 1"
    anchor = "zero propagation of the transcendence lemma"

    class Params(_Params):
        r0: float = 10.0

    def run(self):
        for name, f in self.cfg.functions().items():
            self.check(f"chain_{name}", self.description, "count", self._chain(f))

    def _chain(self, f: FunctionExpr):
        def fn():
            reg = f.reg
            far = [e.location for e in reg.zeros() if e.modulus > self.params.r0]
            neighbours = np.array([a + s for a in far for s in (1, -1)], dtype=complex)
            if not len(neighbours):
                return True, {"zeros": 0}
            try:
                vals = evaluate_array(f, neighbours)
            except PoleHit as e:
                return True, {"zeros": len(far), "pole_neighbour": str(e.z)}
            hits = int(np.count_nonzero(np.isneginf(vals.logmag)))
            gaps = [abs(p - z.location) for p in neighbours for z in reg.zeros()]
            closest = min(gaps)
            return hits == 0 and closest > 1e-9, {"zeros": len(far), "closest": closest,
                                                  "min_log_modulus": float(np.min(vals.logmag))}
        return fn


@register
class Cartan(Experiment):
    id = "lem-cartan"
    description = "epsilon-set geometry, circle avoidance and the logarithmic-derivative bound"
    anchor = "epsilon-sets and Cartan-type estimates"

    class Params(_Params):
        h: float = 1.0
        alpha: float = 4.0
        beta: float = 2.0
        coincidence_R: float = 1000.0
        # radii for the log-derivative bound, defaults to the experiment grid
        logderiv_grid: Optional[GridSpec] = None

    def run(self):
        p = self.params
        f = self.cfg.function("f")
        radii = self.radii()

        def summable():
            ex = build_epsilon_set(f.reg, "exclusion", p.h)
            gu = build_epsilon_set(f.reg, "gundersen", alpha=p.alpha)
            ok = not ex.divergent and math.isfinite(gu.ratio_sum)
            return ok, {"exclusion_ratio_sum": ex.ratio_sum, "gundersen_ratio_sum": gu.ratio_sum,
                        "discs": len(ex.discs)}

        def avoidance():
            meets = circle_exclusion(build_epsilon_set(f.reg, "exclusion", p.h), radii)
            lo, hi = log_density(meets, radii[-1])
            limit = self.cfg.tolerance("exclusion_density", 0.5)
            return hi <= limit, {"lower": lo, "upper": hi, "log_measure": log_measure(meets, 1.0, radii[-1])}

        def coincidence():
            R = p.coincidence_R
            e = pole_coincidence_set(f.reg, R)
            kept = log_measure(e, R / 2, R)
            return kept > 0.5 * math.log(2), {"log_measure": kept, "full": math.log(2)}

        def logderiv():
            # corpus entry g, when given, is the function the bound is measured on
            g = self.cfg.functions().get("g", f)
            grid = [float(r) for r in p.logderiv_grid.radii()] if p.logderiv_grid else radii
            prof = logderiv_bound_profile(g, grid, p.beta)
            self.table("logderiv", ["r", "d_beta", "T_beta_r"], [[m.r, m.d_beta, m.T_beta_r] for m in prof.margins])
            return prof.bounded and prof.positive > 0, prof.model_dump(
                include={"bottom_max", "top_max", "bounded", "positive"})

        self.check("epsilon_summable", "exclusion discs have summable radius ratios", "bound", summable)
        self.check("circle_avoidance", "circles meeting the discs have small logarithmic density", "bound",
                   avoidance)
        self.check("pole_coincidence", "radii clear of pole moduli keep most of [R/2, R]", "bound", coincidence)
        self.check("logderiv_bound", "|g'/g| stays within the Cartan-type bound, with the T term in use", "bound",
                   logderiv)


def list_experiments() -> List[Tuple[str, str, str]]:
    """(id, description, anchor) for every catalogued experiment, sorted by id."""
    return [(cls.id, cls.description, cls.anchor) for _, cls in sorted(REGISTRY.items())]
