"""Divergence plans: parameter chains that force VP means to blow up.

Given a subcritical Orlicz gauge and a window with unbounded n/lambda_n,
the plan picks per level a width, a rational weight, and a degree exponent:

  weight(a, q) = min( 2^-a,  2^(2q) / (4^a omega(2^(2q))) )
  width_a      = least q with  weight(a, q) sqrt(q) > margin * (a + R_{a-1})
  R_a          = R_{a-1} + weight_a 2^(width_a) sqrt(width_a)

(margin = 16 in strict mode, configurable in relaxed mode), then the least
admissible degree exponent exceeding the previous one by 2*width_a for
which some N with top_bit(N) = m_a satisfies N / lambda_N > 2^(2 width_a + 1).
The series  f = sum_a weight_a * blockpoly(m_a, width_a)  lies in the Orlicz
class, while at every point the VP mean at the witness order of level a is
bounded below by (3/16) weight_a sqrt(width_a).

All inequalities are certified in exact arithmetic (integer squared
comparisons and surd sums); nothing here trusts a float.  Strict-mode plans
are generally not materializable past level 1 (the widths explode), so
their certificates replay the inequalities without building the function;
relaxed plans with small parameters additionally cross-check every
certificate against a brute-force evaluation of the mean.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .blockpoly import BlockPolynomial, eval_pointwise, select_order
from .dyadic import DyadicPoint, top_bit
from .errors import BudgetError, PreconditionError, VerificationError
from .orlicz import OrliczFunction
from .surd import SurdSum
from .walsh import walsh_eval
from .windows import WindowSequence

__all__ = [
    "PlanLevel",
    "DivergencePlan",
    "DivergenceCertificate",
    "level_weight",
    "choose_widths",
    "choose_levels",
    "plan_from_json_obj",
    "eval_series",
    "membership_report",
    "membership_grid_integral",
    "certify_divergence",
    "default_sample_points",
]

DEFAULT_SEED = 142857
STRICT_MARGIN = Fraction(16)
_MAX_STR_BITS = 14000  # stay under the CPython int->str digit cap


def _int_str(n: int) -> str | None:
    """Decimal string for ints of reportable size; None past the digit cap."""
    return str(n) if n.bit_length() <= _MAX_STR_BITS else None


def _int_repr(n: int) -> str:
    """Decimal when small enough, hex otherwise (hex has no conversion cap)."""
    return str(n) if n.bit_length() <= _MAX_STR_BITS else hex(n)


def _quantize_down(x: Fraction, sig_bits: int = 64) -> Fraction:
    """Largest dyadic fraction with ~sig_bits significant bits not above x."""
    if x <= 0:
        raise PreconditionError("cannot quantize a nonpositive weight")
    e = x.numerator.bit_length() - x.denominator.bit_length()
    shift = sig_bits - e
    if shift <= 0:
        return Fraction(math.floor(x))
    return Fraction(math.floor(x * (1 << shift)), 1 << shift)


def level_weight(a: int, q: int, omega: OrliczFunction) -> Fraction:
    """The exact (or conservatively down-rounded) weight of level a at width q.

    Monotone nonincreasing in a; down-rounding keeps every downstream
    certificate valid because smaller weights only help membership and the
    width inequality is re-verified with the stored value.
    """
    if a < 1 or q < 1:
        raise PreconditionError("level index and width must be >= 1")
    cap = Fraction(1, 1 << a)
    _, ratio_hi = omega.unit_ratio_interval(2 * q)
    ratio = 1 / (Fraction(1 << (2 * a)) * ratio_hi)
    if not omega.rational_valued:
        ratio = _quantize_down(ratio)
    return min(cap, ratio)


def _width_inequality_holds(gamma: int, delta: Fraction, target: SurdSum) -> bool:
    """delta * sqrt(gamma) > target, exactly."""
    return SurdSum.sqrt_of(gamma, delta) > target


def _symbolic_recurrence(a: int, margin: Fraction) -> list[str]:
    return [
        f"width[{a}] = least q with weight({a}, q) * sqrt(q) > {margin} * ({a} + R[{a - 1}])",
        "weight(a, q) = min(2^-a, 2^(2q) / (4^a * omega(2^(2q))))",
        "R[a] = R[a-1] + weight(a, width[a]) * 2^width[a] * sqrt(width[a])",
    ]


def choose_widths(
    omega: OrliczFunction,
    margin: Fraction,
    levels: int,
    scan_limit: int = 1 << 16,
    bit_budget: int = 1 << 20,
) -> tuple[list[tuple[int, Fraction]], dict | None]:
    """Per level, the least width satisfying the margin inequality.

    Identity gauges get a closed form (the weight does not depend on the
    width, so the inequality inverts by squaring); gauges with a provably
    monotone weight*sqrt(width) get doubling plus bisection past the linear
    scan; otherwise the scan limit is the horizon.  When the required width
    exceeds the bit budget the search stops and reports the symbolic
    recurrence for the remaining levels.
    """
    margin = Fraction(margin)
    if margin <= 0:
        raise PreconditionError("margin must be positive")
    if levels < 1:
        raise PreconditionError("need at least one level")
    out: list[tuple[int, Fraction]] = []
    running = SurdSum.zero()
    for a in range(1, levels + 1):
        target = (running + SurdSum.rational(a)).scaled(margin)
        gamma: int | None = None
        if omega.family == "identity":
            delta = level_weight(a, 1, omega)  # width-independent
            ratio_sq = (target * target).scaled(1 / (delta * delta))
            gamma = ratio_sq.floor() + 1
            # re-check in squared form: sqrt(gamma) may be far too large to factor
            if not (
                ratio_sq < gamma and (gamma == 1 or not ratio_sq < gamma - 1)
            ):  # pragma: no cover - closed form is exact
                raise VerificationError("identity width closed form failed its own check")
        else:
            for q in range(1, scan_limit + 1):
                if _width_inequality_holds(q, level_weight(a, q, omega), target):
                    gamma = q
                    break
            if gamma is None and omega.scan_monotone:
                hi = scan_limit
                while hi <= bit_budget:
                    hi *= 2
                    if _width_inequality_holds(hi, level_weight(a, hi, omega), target):
                        break
                else:
                    hi = None
                if hi is not None:
                    lo = max(hi // 2, scan_limit)
                    while lo + 1 < hi:
                        mid = (lo + hi) // 2
                        if _width_inequality_holds(mid, level_weight(a, mid, omega), target):
                            hi = mid
                        else:
                            lo = mid
                    gamma = hi
        if gamma is None or gamma > bit_budget:
            cap = {
                "level": a,
                "reason": (
                    f"required width exceeds the bit budget {bit_budget}"
                    if gamma is None or gamma > bit_budget
                    else "width search exhausted"
                ),
                "required_width": _int_str(gamma) if gamma is not None else None,
                "symbolic_recurrence": _symbolic_recurrence(a, margin),
                "running_sum": str(running),
            }
            return out, cap
        delta = level_weight(a, gamma, omega)
        if not _width_inequality_holds(gamma, delta, target):  # pragma: no cover
            raise VerificationError(f"width {gamma} fails its defining inequality at level {a}")
        out.append((gamma, delta))
        running = running + SurdSum.sqrt_of(gamma, delta * (1 << gamma))
    return out, None


@dataclass(frozen=True)
class PlanLevel:
    index: int
    width: int
    weight: Fraction
    log_degree: int
    note: dict = field(default_factory=dict)

    def block(self) -> BlockPolynomial:
        return BlockPolynomial(self.log_degree, self.width)

    def to_json_obj(self) -> dict:
        return {
            "index": self.index,
            "width": self.width,
            "weight": str(self.weight),
            "log_degree": self.log_degree,
            "note": self.note,
        }


@dataclass
class DivergencePlan:
    mode: str  # "strict" | "relaxed"
    margin: Fraction
    omega: OrliczFunction
    window: WindowSequence
    levels: list[PlanLevel]
    size_cap: dict | None
    requested_levels: int

    def block(self, a: int) -> BlockPolynomial:
        return self.levels[a - 1].block()

    def target(self, a: int) -> SurdSum:
        """Certified lower bound (3/16) weight_a sqrt(width_a) for level a."""
        lv = self.levels[a - 1]
        return SurdSum.sqrt_of(lv.width, lv.weight * Fraction(3, 16))

    def early_terms_bound(self, a: int) -> SurdSum:
        """sum_{k<a} weight_k 2^(width_k) sqrt(width_k)."""
        total = SurdSum.zero()
        for lv in self.levels[: a - 1]:
            total = total + SurdSum.sqrt_of(lv.width, lv.weight * (1 << lv.width))
        return total

    def verify(self, direct_eval_bits: int = 1 << 20) -> None:
        """Re-check all plan invariants with exact arithmetic; raises on failure."""
        m_prev = 0
        for lv in self.levels:
            a = lv.index
            if lv.weight > Fraction(1, 1 << a):
                raise VerificationError(f"level {a}: weight exceeds 2^-{a}")
            _, ratio_hi = self.omega.unit_ratio_interval(2 * lv.width)
            if lv.weight * Fraction(1 << (2 * a)) * ratio_hi > 1:
                raise VerificationError(f"level {a}: weight exceeds the gauge ratio")
            target = (self.early_terms_bound(a) + SurdSum.rational(a)).scaled(self.margin)
            if not _width_inequality_holds(lv.width, lv.weight, target):
                raise VerificationError(f"level {a}: width inequality fails")
            if lv.log_degree <= m_prev + 2 * lv.width:
                raise VerificationError(f"level {a}: degree separation fails")
            self._verify_ratio_choice(lv, direct_eval_bits)
            m_prev = lv.log_degree

    def _verify_ratio_choice(self, lv: PlanLevel, direct_eval_bits: int) -> None:
        tau_log2 = 2 * lv.width + 1
        n = None
        if lv.note.get("N") is not None:
            n = int(lv.note["N"])
        elif lv.note.get("N_is_pow2"):
            n = 1 << lv.log_degree
        if n is not None and lv.log_degree <= direct_eval_bits:
            lam = self.window.value(n)
            if top_bit(n) != lv.log_degree or n <= (lam << tau_log2):
                raise VerificationError(f"level {lv.index}: recorded N fails the ratio choice")
            if lam >= 1 << (lv.log_degree - 2 * lv.width):
                raise VerificationError(f"level {lv.index}: lambda_N not below the stride")
            return
        e = self.window.witness_exponent(tau_log2)
        if e is None or e > lv.log_degree:
            raise VerificationError(
                f"level {lv.index}: no witness covers exponent {lv.log_degree}"
            )

    def to_json_obj(self) -> dict:
        return {
            "mode": self.mode,
            "margin": str(self.margin),
            "omega": self.omega.to_json_obj(),
            "window": self.window.to_json_obj(),
            "levels": [lv.to_json_obj() for lv in self.levels],
            "size_cap": self.size_cap,
            "requested_levels": self.requested_levels,
            "targets": [self.target(a).decimal(24) for a in range(1, len(self.levels) + 1)],
        }


def plan_from_json_obj(obj: dict) -> DivergencePlan:
    om = obj["omega"]
    if om["family"] == "table":
        omega = OrliczFunction.table([(Fraction(t), Fraction(y)) for t, y in om["nodes"]])
    elif om["family"] == "log_power":
        omega = OrliczFunction.log_power(Fraction(om["params"][0]))
    else:
        omega = OrliczFunction.identity()
    wn = obj["window"]
    params = wn.get("params", [])
    fam = wn["family"]
    if fam == "constant":
        window = WindowSequence.constant(int(params[0]))
    elif fam == "proportional":
        window = WindowSequence.proportional(Fraction(params[0]))
    elif fam == "root":
        window = WindowSequence.root(Fraction(params[0]))
    elif fam == "log_ratio":
        window = WindowSequence.log_ratio()
    else:
        window = WindowSequence.table(int(p) for p in params)
    levels = [
        PlanLevel(lv["index"], lv["width"], Fraction(lv["weight"]), lv["log_degree"], lv["note"])
        for lv in obj["levels"]
    ]
    return DivergencePlan(
        obj["mode"], Fraction(obj["margin"]), omega, window, levels,
        obj.get("size_cap"), obj.get("requested_levels", len(levels)),
    )


def _ratio_threshold(
    window: WindowSequence,
    tau_log2: int,
    scan_n_budget: int,
) -> tuple[int, dict]:
    """Least N0 such that n / lambda_n > 2^tau_log2 for every n >= N0.

    When the witness horizon is materializable the threshold is exact (scan
    for the last failing n); otherwise the witness exponent itself is the
    threshold, recorded as such.
    """
    e = window.witness_exponent(tau_log2)
    if e is None:
        raise PreconditionError(
            f"window {window.label()} provides no ratio witness; "
            f"the choice of N for threshold 2^{tau_log2} cannot be certified"
        )
    if e <= scan_n_budget.bit_length() - 1:
        horizon = 1 << e
        tau = 1 << tau_log2
        last_fail = 0
        for n in range(1, horizon + 1):
            if n <= tau * window.value(n):
                last_fail = n
        return last_fail + 1, {"path": "scan", "witness_exponent": e, "horizon": horizon}
    return 1 << e, {"path": "witness", "witness_exponent": e}


def choose_levels(
    omega: OrliczFunction,
    window: WindowSequence,
    mode: str = "strict",
    margin=None,
    levels: int = 1,
    scan_limit: int = 1 << 16,
    bit_budget: int = 1 << 20,
    scan_n_budget: int = 1 << 21,
    direct_eval_bits: int = 1 << 20,
) -> DivergencePlan:
    """Build and exactly re-verify a divergence plan.

    Raises PreconditionError when the window has a bounded ratio (no plan
    exists) or lacks a witness at an unmaterializable height.
    """
    if mode == "strict":
        margin = STRICT_MARGIN
    elif mode == "relaxed":
        if margin is None:
            raise PreconditionError("relaxed mode needs a margin")
        margin = Fraction(margin)
    else:
        raise PreconditionError(f"unknown mode {mode!r}")
    bound = window.ratio_bound()
    if bound is not None:
        raise PreconditionError(
            f"window {window.label()} has n/lambda_n <= {bound} for all n; "
            "the unbounded-ratio hypothesis fails and no divergence plan exists"
        )
    widths, size_cap = choose_widths(omega, margin, levels, scan_limit, bit_budget)
    plan_levels: list[PlanLevel] = []
    m_prev = 0
    for a, (gamma, delta) in enumerate(widths, start=1):
        tau_log2 = 2 * gamma + 1
        n0, note = _ratio_threshold(window, tau_log2, scan_n_budget)
        m_min = m_prev + 2 * gamma + 1
        if top_bit(n0) >= m_min:
            m_a, n_a = top_bit(n0), n0
        else:
            m_a, n_a = m_min, 1 << m_min
        note = dict(note)
        note["tau_log2"] = tau_log2
        note["N_log2"] = m_a
        note["N_is_pow2"] = n_a == (1 << m_a)
        if m_a <= direct_eval_bits:
            lam = window.value(n_a)
            if n_a <= (lam << tau_log2):  # pragma: no cover - guaranteed by construction
                raise VerificationError(f"level {a}: chosen N fails its ratio threshold")
            note["N"] = _int_str(n_a)
            note["lambda_at_N"] = _int_str(lam)
            note["verified_directly"] = True
        else:
            note["N"] = None
            note["verified_directly"] = False
        plan_levels.append(PlanLevel(a, gamma, delta, m_a, note))
        m_prev = m_a
    plan = DivergencePlan(mode, margin, omega, window, plan_levels, size_cap, levels)
    plan.verify(direct_eval_bits)
    return plan


def eval_series(plan: DivergencePlan, trunc: int, x: DyadicPoint) -> SurdSum:
    """Exact value of the truncated series sum_{a<=trunc} weight_a * block_a at x."""
    if trunc > len(plan.levels):
        raise PreconditionError(f"plan has {len(plan.levels)} levels; cannot truncate at {trunc}")
    total = SurdSum.zero()
    for lv in plan.levels[:trunc]:
        sv = eval_pointwise(lv.block(), x)
        total = total + sv.to_surd().scaled(lv.weight)
    return total


def _level_atoms(lv: PlanLevel) -> list[tuple[int, Fraction]]:
    """Value distribution of one scaled block polynomial: (scaled value, probability)."""
    w = lv.width
    atoms: dict[int, Fraction] = {0: Fraction((1 << w) - 1, 1 << w)}  # off the agreement set
    for i in range(w + 1):
        q = (w - 2 * i) << w
        p = Fraction(math.comb(w, i), 1 << (2 * w))
        atoms[q] = atoms.get(q, Fraction(0)) + p
    return sorted(atoms.items())


def membership_report(plan: DivergencePlan, trunc: int, atom_budget: int = 1 << 18) -> dict:
    """Exact Orlicz-membership accounting for the truncated series.

    The per-level bound is weight_a * omega(2^(2 width_a)) / 2^(2 width_a),
    majorized by 4^-a; the integral of omega(|f|) is computed exactly via
    the product distribution of the levels (their digit blocks are disjoint
    by the degree separation), which equals the grid integral at the top
    resolution.  Identity gauges give exact surd values; other gauges give
    rigorous rational enclosures.
    """
    if trunc > len(plan.levels):
        raise PreconditionError(f"plan has {len(plan.levels)} levels; cannot truncate at {trunc}")
    levels = plan.levels[:trunc]
    per_term = []
    for lv in levels:
        _, ratio_hi = plan.omega.unit_ratio_interval(2 * lv.width)
        per_term.append(lv.weight * ratio_hi)
    majorant = sum(Fraction(1, 1 << (2 * a)) for a in range(1, trunc + 1))
    bound_total = sum(per_term, Fraction(0))
    per_term_ok = all(t <= Fraction(1, 1 << (2 * a)) for a, t in enumerate(per_term, 1))

    count = 1
    for lv in levels:
        count *= lv.width + 2
    if count > atom_budget:
        raise BudgetError(f"distribution has ~{count} atoms; budget is {atom_budget}")
    combos: list[tuple[SurdSum, Fraction]] = [(SurdSum.zero(), Fraction(1))]
    for lv in levels:
        atoms = _level_atoms(lv)
        nxt = []
        for val, p in combos:
            for q, pq in atoms:
                term = SurdSum.sqrt_of(lv.width, Fraction(q, lv.width)).scaled(lv.weight)
                nxt.append((val + term, p * pq))
        combos = nxt
    if plan.omega.family == "identity":
        integral = SurdSum.zero()
        for val, p in combos:
            integral = integral + val.abs().scaled(p)
        integral_ok = integral <= bound_total
        integral_repr = {"exact": str(integral), "decimal": integral.decimal(24)}
    else:
        lo_total = Fraction(0)
        hi_total = Fraction(0)
        prec = 96
        for val, p in combos:
            s = val.abs()
            # rational enclosure of |f| then of omega(|f|)
            terms_lo = Fraction(0)
            terms_hi = Fraction(0)
            for d, c in s.terms:
                r = math.isqrt(d << (2 * prec))
                slo = Fraction(r, 1 << prec)
                shi = Fraction(r + 1, 1 << prec)
                if c > 0:
                    terms_lo += c * slo
                    terms_hi += c * shi
                else:
                    terms_lo += c * shi
                    terms_hi += c * slo
            olo, _ = plan.omega.value_interval(max(terms_lo, Fraction(0)))
            _, ohi = plan.omega.value_interval(terms_hi)
            lo_total += p * olo
            hi_total += p * ohi
        integral_ok = hi_total <= bound_total
        integral_repr = {"interval": [str(lo_total), str(hi_total)]}
    return {
        "per_term_bound": [str(t) for t in per_term],
        "per_term_within_4_pow": per_term_ok,
        "bound_total": str(bound_total),
        "majorant_geometric": str(majorant),
        "bound_below_majorant": bound_total <= majorant,
        "majorant_below_third": majorant < Fraction(1, 3),
        "integral": integral_repr,
        "integral_within_bound": bool(integral_ok),
        "all_exact_or_outward": True,
    }


def membership_grid_integral(plan: DivergencePlan, trunc: int, max_resolution: int = 12) -> SurdSum:
    """Literal cell-by-cell integral of |f| at the top resolution (identity gauge).

    Oracle-grade: enumerates every cell; only for small plans.
    """
    if plan.omega.family != "identity":
        raise PreconditionError("literal grid integral is exact only for the identity gauge")
    m_top = plan.levels[trunc - 1].log_degree
    if m_top > max_resolution:
        raise BudgetError(f"grid integral at resolution {m_top} exceeds budget {max_resolution}")
    total = SurdSum.zero()
    for i in range(1 << m_top):
        total = total + eval_series(plan, trunc, DyadicPoint.from_index(i, m_top)).abs()
    return total.scaled(Fraction(1, 1 << m_top))


def default_sample_points(
    plan: DivergencePlan,
    trunc: int,
    seed: int = DEFAULT_SEED,
    exhaustive_resolution: int = 12,
    sample_count: int = 1000,
) -> tuple[list[DyadicPoint], dict]:
    """All cells when the top resolution allows, else seeded random points."""
    m_top = plan.levels[trunc - 1].log_degree
    if m_top <= exhaustive_resolution:
        pts = [DyadicPoint.from_index(i, m_top) for i in range(1 << m_top)]
        return pts, {"kind": "exhaustive", "resolution": m_top, "count": len(pts)}
    rng = random.Random(seed)
    pts = [DyadicPoint(rng.getrandbits(m_top), m_top) for _ in range(sample_count)]
    return pts, {
        "kind": "pseudo-random",
        "resolution": m_top,
        "count": sample_count,
        "seed": seed,
    }


@dataclass
class DivergenceCertificate:
    plan_summary: dict
    truncation: int
    sample: dict
    records: list
    passed: bool
    aggregates: dict

    def to_json_obj(self) -> dict:
        return {
            "plan": self.plan_summary,
            "truncation": self.truncation,
            "sample": self.sample,
            "passed": self.passed,
            "aggregates": self.aggregates,
            "records": self.records,
        }


def _brute_mean(
    plan: DivergencePlan,
    trunc: int,
    x: DyadicPoint,
    order: int,
    lam: int,
    enumerable_width: int,
) -> tuple[SurdSum | None, str | None]:
    """Literal V at the witness order: average the window's partial sums of the
    truncated series, with each level's contribution enumerated frequency by
    frequency (levels whose spectra start above the order contribute zero)."""
    active = []
    for lv in plan.levels[:trunc]:
        bp = lv.block()
        if bp.min_frequency() > order:
            continue  # every partial sum of this level vanishes in the window
        if lv.width > enumerable_width:
            return None, f"level {lv.index} width {lv.width} not enumerable"
        freqs = bp.frequencies(enumerable_width)
        signs = [walsh_eval(mu, x) for mu in freqs]
        active.append((lv, freqs, signs))
    total = SurdSum.zero()
    for lv, freqs, signs in active:
        window_sum = 0  # sum over k in the window of scaled S_k
        prefix = 0
        pos = 0
        for k in range(order - lam, order + 1):
            while pos < len(freqs) and freqs[pos] < k:
                prefix += signs[pos]
                pos += 1
            window_sum += prefix
        level_mean = SurdSum.sqrt_of(lv.width, Fraction(window_sum, lv.width))
        total = total + level_mean.scaled(lv.weight / (lam + 1))
    return total, None


def certify_divergence(
    plan: DivergencePlan,
    trunc: int,
    points: list[DyadicPoint] | None = None,
    seed: int = DEFAULT_SEED,
    exhaustive_resolution: int = 12,
    sample_count: int = 1000,
    brute_window: int = 1 << 12,
    enumerable_width: int = 16,
) -> DivergenceCertificate:
    """Per-point, per-level divergence certificates for the truncated series.

    For each sample point x and level a: select the witness order on level
    a's block polynomial, check the window collapses inside one stride
    (so the main term is delta_a S_order exactly), evaluate the earlier
    levels pointwise (their means equal their values because the window
    starts past their degrees), certify the later levels contribute nothing
    (their spectra start above the order), and verify

        |V| >= (3/16) weight_a sqrt(width_a)      (strict mode: also > 3a)

    by exact surd comparison.  Whenever the window and the spectra are
    within budget the mean is also recomputed by brute force and must match
    the decomposition exactly.
    """
    if trunc < 1 or trunc > len(plan.levels):
        raise PreconditionError(f"truncation must lie in [1, {len(plan.levels)}]")
    if points is None:
        points, sample = default_sample_points(
            plan, trunc, seed, exhaustive_resolution, sample_count
        )
    else:
        sample = {"kind": "explicit", "count": len(points)}
    records = []
    failures = 0
    brute_ran = 0
    brute_matched = 0
    brute_levels: set[int] = set()
    for x in points:
        for a in range(1, trunc + 1):
            lv = plan.levels[a - 1]
            bp = lv.block()
            rec: dict = {"x": str(x), "level": a}
            ok = True
            sel = select_order(bp, x)
            order = sel.order
            lam = plan.window.value(order)
            rec["order"] = _int_repr(order)
            rec["window_value"] = _int_repr(lam)
            stride = bp.stride
            if lam >= stride:
                ok = False
                rec["window_below_stride"] = False
            else:
                rec["window_below_stride"] = True
            main = sel.sum_at_order.to_surd().scaled(lv.weight)
            rec["main_scaled_sum"] = str(sel.sum_at_order.numerator)
            main_large = sel.sum_at_order.abs_at_least_sqrt_multiple(1, 4)
            rec["main_meets_quarter"] = main_large
            ok = ok and main_large
            early = SurdSum.zero()
            window_start = order - lam
            early_ok = True
            for k in range(1, a):
                lvk = plan.levels[k - 1]
                if window_start <= (1 << lvk.log_degree):
                    early_ok = False
                early = early + eval_pointwise(lvk.block(), x).to_surd().scaled(lvk.weight)
            rec["early_past_degrees"] = early_ok
            ok = ok and early_ok
            late_ok = True
            for k in range(a + 1, trunc + 1):
                lvk = plan.levels[k - 1]
                if not (
                    lv.log_degree <= lvk.log_degree - 2 * lvk.width
                    and order < (1 << (lvk.log_degree - 2 * lvk.width))
                ):
                    late_ok = False
            rec["late_terms_vanish"] = late_ok
            ok = ok and late_ok
            value = main + early
            target = plan.target(a)
            meets = value.abs() >= target
            rec["value_decimal"] = value.decimal(24)
            rec["target_decimal"] = target.decimal(24)
            rec["meets_target"] = meets
            ok = ok and meets
            if plan.mode == "strict":
                above_3a = value.abs() > 3 * a
                rec["exceeds_3a"] = above_3a
                ok = ok and above_3a
            if lam + 1 <= brute_window:
                brute, reason = _brute_mean(plan, trunc, x, order, lam, enumerable_width)
            else:
                brute, reason = None, f"window size {lam + 1} exceeds budget {brute_window}"
            if brute is not None:
                brute_ran += 1
                brute_levels.add(a)
                match = brute == value
                brute_matched += match
                rec["brute_force"] = {"ran": True, "matches": bool(match)}
                ok = ok and match
            else:
                rec["brute_force"] = {"ran": False, "reason": reason}
            if not ok:
                failures += 1
                rec["passed"] = False
            else:
                rec["passed"] = True
            records.append(rec)
    targets = [plan.target(a) for a in range(1, trunc + 1)]
    increasing = all(b > a for a, b in zip(targets, targets[1:]))
    aggregates = {
        "points": len(points),
        "levels": trunc,
        "failures": failures,
        "brute_force_ran": brute_ran,
        "brute_force_matched": brute_matched,
        "brute_force_levels": sorted(brute_levels),
        "targets_decimal": [t.decimal(24) for t in targets],
        "targets_strictly_increasing": increasing,
        "mode": plan.mode,
        "margin": str(plan.margin),
    }
    return DivergenceCertificate(
        plan_summary=plan.to_json_obj(),
        truncation=trunc,
        sample=sample,
        records=records,
        passed=failures == 0,
        aggregates=aggregates,
    )
