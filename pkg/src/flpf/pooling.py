"""Pooling-factor computation and throughput-region membership.

The pooling factor of a link subset L measures the worst ratio between two
long-run service vectors that greedy maximal scheduling can produce when
traffic is confined to L; the graph value is the minimum over all subsets.
It is computed two independent ways: exactly, by a rational LP over the
per-state schedule matrices, and by bisection on the primal feasibility
form. Closed-form lower bounds (column sums, inverse interference degree)
and witness-pair upper bounds round out the picture.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import InvalidTriple, NotInPhi, UndefinedRatio, UnsupportedMode
from .fading import FadingStructure, marginal, schedule_matrix_for_state
from .interference import (
    InterferenceGraph,
    LinkId,
    enumeration_cap,
    interference_degree_graph,
)
from .lpcore import RationalLP, feasible
from .rates import rate_vector as _rate_vector


@dataclass(frozen=True)
class BoundValue:
    """A bound together with a vacuity marker.

    ``vacuous`` means the subset is never active under the fading structure,
    so it constrains nothing; such bounds report 1 and are skipped when
    minimizing over subsets.
    """

    value: Fraction
    vacuous: bool = False


@dataclass(frozen=True)
class BoundReport:
    lower: Fraction | None  # best column-sum lower bound over subsets
    inverse_degree: Fraction
    exact: Fraction | None
    upper: Fraction | None
    argmin: tuple[LinkId, ...] | None


@dataclass(frozen=True)
class RegionVerdict:
    location: str  # interior | boundary | exterior
    margin: Fraction | None  # slack to the boundary when inside
    certificate: tuple[dict[str, Fraction], Fraction, Fraction] | None

    @property
    def inside(self) -> bool:
        return self.location != "exterior"


# -- shared plumbing -------------------------------------------------------


def _subset_links(g: InterferenceGraph, L) -> tuple[LinkId, ...]:
    idx = sorted(set(g.indices(L)))
    if not idx:
        raise ValueError("link subset must be nonempty")
    return tuple(g.links[i] for i in idx)


def _state_matrices(g: InterferenceGraph, f: FadingStructure, L):
    """Marginal support over L with one schedule matrix per state."""
    links = _subset_links(g, L)
    marg = marginal(f, links)
    items = []
    for state, prob in marg.states:
        mat = schedule_matrix_for_state(g, state, rows=links, state_links=marg.links)
        items.append((state.pattern(), prob, mat))
    return links, items


def _is_vacuous(items) -> bool:
    return all(not mat.active for _, _, mat in items)


def nonempty_subsets(links):
    """All nonempty subsets, smallest first, lexicographic within a size."""
    for r in range(1, len(links) + 1):
        yield from combinations(links, r)


# -- exact value via the dual-form LP --------------------------------------


def subset_pooling_factor(g: InterferenceGraph, f: FadingStructure, L) -> BoundValue:
    """Exact pooling factor of subset L under fading structure f.

    Maximizes sum_s pi(s) a_s subject to, for every support state s with
    schedule matrix M_s: every column satisfies a_s <= x.col <= b_s, with
    x >= 0 and the normalization sum_s pi(s) b_s = 1. States never active
    on L contribute a_s <= 0 <= b_s via their zero column.

    The multipliers x are nonnegative; the bisection oracle
    (:func:`subset_pooling_factor_bisection`) provides an independent
    cross-check of every value.
    """
    links, items = _state_matrices(g, f, L)
    if _is_vacuous(items):
        return BoundValue(Fraction(1), vacuous=True)

    lp = RationalLP("max")
    for link in links:
        lp.add_var(f"x[{link.label}]")
    # a_s, b_s stay nonnegative at any optimum (columns are nonnegative and
    # a_s is pushed up to a column minimum), so they are declared nonneg.
    for pat, _, _ in items:
        lp.add_var(f"a[{pat}]")
        lp.add_var(f"b[{pat}]")
    lp.set_objective({f"a[{pat}]": prob for pat, prob, _ in items})
    for pat, _, mat in items:
        for c, col in enumerate(mat.columns):
            coeffs = {
                f"x[{link.label}]": v for link, v in zip(links, col) if v
            }
            lo = dict(coeffs)
            lo[f"a[{pat}]"] = -1
            lp.add_constraint(f"lo[{pat}][{c}]", lo, ">=", 0)
            hi = dict(coeffs)
            hi[f"b[{pat}]"] = -1
            lp.add_constraint(f"hi[{pat}][{c}]", hi, "<=", 0)
    lp.add_constraint(
        "norm", {f"b[{pat}]": prob for pat, prob, _ in items}, "=", 1
    )
    res = lp.solve()
    assert res.status == "optimal", res.status
    return BoundValue(res.objective)


def graph_pooling_factor(
    g: InterferenceGraph, f: FadingStructure
) -> tuple[Fraction, tuple[LinkId, ...] | None]:
    """Minimum subset pooling factor and its minimizer.

    Scans every nonempty subset (never-active ones are skipped as vacuous);
    ties resolve to the smallest subset, then lexicographic, because subsets
    are visited in that order and only strict improvements replace the
    incumbent. Returns (1, None) in the degenerate all-vacuous case.
    """
    cap = enumeration_cap()
    if g.num_links > cap:
        from .errors import LimitExceeded

        raise LimitExceeded(g.num_links, cap)
    best: Fraction | None = None
    arg: tuple[LinkId, ...] | None = None
    for L in nonempty_subsets(g.links):
        val = subset_pooling_factor(g, f, L)
        if val.vacuous:
            continue
        if best is None or val.value < best:
            best = val.value
            arg = L
    if best is None:
        return Fraction(1), None
    return best, arg


# -- independent oracle: bisection on the primal form -----------------------


def _dominance_feasible(links, items, sigma: Fraction) -> bool:
    """Is there a pair phi1, phi2 of attainable service vectors with
    sigma*phi1 >= phi2? Feasibility in the per-state convex weights."""
    lp = RationalLP()
    for pat, _, mat in items:
        for c in range(mat.num_columns):
            lp.add_var(f"p[{pat}][{c}]")
            lp.add_var(f"q[{pat}][{c}]")
    for pat, _, mat in items:
        lp.add_constraint(
            f"cp[{pat}]",
            {f"p[{pat}][{c}]": 1 for c in range(mat.num_columns)},
            "=",
            1,
        )
        lp.add_constraint(
            f"cq[{pat}]",
            {f"q[{pat}][{c}]": 1 for c in range(mat.num_columns)},
            "=",
            1,
        )
    for i, link in enumerate(links):
        coeffs: dict[str, Fraction] = {}
        for pat, prob, mat in items:
            for c, col in enumerate(mat.columns):
                if col[i]:
                    coeffs[f"p[{pat}][{c}]"] = sigma * prob * col[i]
                    coeffs[f"q[{pat}][{c}]"] = -prob * col[i]
        lp.add_constraint(f"dom[{link.label}]", coeffs, ">=", 0)
    return feasible(lp) is not None


def subset_pooling_factor_bisection(
    g: InterferenceGraph, f: FadingStructure, L, tol=Fraction(1, 10**6)
) -> tuple[Fraction, Fraction]:
    """Bisection interval [lo, hi] of width <= tol containing the subset
    pooling factor, via exact feasibility checks of the dominance system.

    Independent of the dual-form LP in :func:`subset_pooling_factor`; the
    two must agree to within tol on every instance.
    """
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tol must be positive")
    links, items = _state_matrices(g, f, L)
    if _is_vacuous(items):
        return Fraction(1), Fraction(1)
    lo, hi = Fraction(0), Fraction(1)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if _dominance_feasible(links, items, mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


# -- closed-form bounds ------------------------------------------------------


def column_sum_lower_bound(g: InterferenceGraph, f: FadingStructure, L) -> BoundValue:
    """Lower bound from schedule sizes: (sum_s pi(s) n_s) / (sum_s pi(s) N_s)
    where n_s and N_s are the smallest and largest column sums of state s's
    schedule matrix. ON/OFF fading only.
    """
    if f.mode != "onoff":
        raise UnsupportedMode("column-sum bound is defined for ON/OFF fading")
    _, items = _state_matrices(g, f, L)
    num = Fraction(0)
    den = Fraction(0)
    for _, prob, mat in items:
        sums = mat.column_sums()
        num += prob * min(sums)
        den += prob * max(sums)
    if den == 0:
        return BoundValue(Fraction(1), vacuous=True)
    return BoundValue(num / den)


def min_column_sum_lower_bound(
    g: InterferenceGraph, f: FadingStructure
) -> tuple[Fraction, tuple[LinkId, ...] | None]:
    """Column-sum bound minimized over all non-vacuous subsets: a lower
    bound for the graph pooling factor."""
    best: Fraction | None = None
    arg = None
    for L in nonempty_subsets(g.links):
        bv = column_sum_lower_bound(g, f, L)
        if bv.vacuous:
            continue
        if best is None or bv.value < best:
            best, arg = bv.value, L
    if best is None:
        return Fraction(1), None
    return best, arg


def inverse_degree_bound(g: InterferenceGraph) -> Fraction:
    """1 / d_I(G): every pooling factor of the graph sits above this."""
    return Fraction(1, interference_degree_graph(g))


# -- attainable-vector machinery --------------------------------------------


def _phi_membership(links, items, phi) -> dict | None:
    """Decomposition witness for phi = sum_s pi(s) M_s w_s with convex w_s."""
    lp = RationalLP()
    for pat, _, mat in items:
        for c in range(mat.num_columns):
            lp.add_var(f"w[{pat}][{c}]")
    for pat, _, mat in items:
        lp.add_constraint(
            f"cx[{pat}]",
            {f"w[{pat}][{c}]": 1 for c in range(mat.num_columns)},
            "=",
            1,
        )
    for i, link in enumerate(links):
        coeffs = {}
        for pat, prob, mat in items:
            for c, col in enumerate(mat.columns):
                if col[i]:
                    coeffs[f"w[{pat}][{c}]"] = prob * col[i]
        lp.add_constraint(f"eq[{link.label}]", coeffs, "=", phi[i])
    return feasible(lp)


def attainable(g: InterferenceGraph, f: FadingStructure, L, phi) -> bool:
    """Whether phi is a long-run average service vector attainable on L."""
    links, items = _state_matrices(g, f, L)
    vec = _rate_vector(links, phi)
    return _phi_membership(links, items, vec) is not None


def upper_bound_from_witness_pair(
    g: InterferenceGraph, f: FadingStructure, L, phi1, phi2
) -> Fraction:
    """max_l phi1(l)/phi2(l) over links with phi2(l) > 0.

    Both vectors must be attainable on L, and phi1 must vanish wherever
    phi2 does; then sigma*phi2 >= phi1 at sigma = the returned maximum, so
    it upper-bounds the subset pooling factor.
    """
    links, items = _state_matrices(g, f, L)
    v1 = _rate_vector(links, phi1)
    v2 = _rate_vector(links, phi2)
    if _phi_membership(links, items, v1) is None:
        raise NotInPhi("phi1")
    if _phi_membership(links, items, v2) is None:
        raise NotInPhi("phi2")
    ratios = []
    for link, a, b in zip(links, v1, v2):
        if b == 0:
            if a > 0:
                raise UndefinedRatio(link.label)
        else:
            ratios.append(a / b)
    if not ratios:
        return Fraction(1)
    return max(ratios)


def upper_bound_from_triples(g: InterferenceGraph, f: FadingStructure, triples) -> Fraction:
    """Upper bound from per-state scaling triples (mu_s, nu_s, H_s).

    For every support state s, mu_s and nu_s must be convex combinations of
    the state's schedule columns (over all links) and nu_s <= H_s * mu_s
    componentwise. The bound is
    max_l [sum_s pi(s) H_s mu_s(l)] / [sum_s pi(s) mu_s(l)].
    """
    if f.mode != "onoff":
        raise UnsupportedMode("scaling-triple bound is defined for ON/OFF fading")
    links = g.links
    k = len(links)
    per_state = []
    for state, prob in f.states:
        pat = state.pattern()
        if pat not in triples:
            raise InvalidTriple(pat, "no triple supplied for this support state")
        mu, nu, H = triples[pat]
        mu = _rate_vector(links, mu)
        nu = _rate_vector(links, nu)
        H = Fraction(H)
        mat = schedule_matrix_for_state(g, state, rows=links)
        single = [(pat, Fraction(1), mat)]
        if _phi_membership(links, single, mu) is None:
            raise InvalidTriple(pat, "mu is not in the schedule hull")
        if _phi_membership(links, single, nu) is None:
            raise InvalidTriple(pat, "nu is not in the schedule hull")
        for link, nv, mv in zip(links, nu, mu):
            if nv > H * mv:
                raise InvalidTriple(pat, f"nu exceeds H*mu at link {link.label}")
        per_state.append((prob, mu, H))
    best = None
    for i in range(k):
        den = sum((prob * mu[i] for prob, mu, _ in per_state), Fraction(0))
        if den == 0:
            continue
        num = sum((prob * H * mu[i] for prob, mu, H in per_state), Fraction(0))
        r = num / den
        if best is None or r > best:
            best = r
    return Fraction(1) if best is None else best


# -- throughput-region membership --------------------------------------------


def _region_items(g: InterferenceGraph, f: FadingStructure, scaling):
    """Support states over all links with their scale factors and matrices."""
    items = []
    for state, prob in f.states:
        mat = schedule_matrix_for_state(g, state, rows=g.links)
        on = [g.links[i] for i in sorted(mat.active)]
        if scaling == "none":
            scale = Fraction(1)
        elif scaling == "idegree":
            scale = (
                Fraction(1)
                if len(on) <= 1
                else Fraction(1, interference_degree_graph(g, on))
            )
        else:
            scale = Fraction(scaling[1])
        items.append((state.pattern(), prob * scale, mat))
    return items


def region_membership(
    g: InterferenceGraph, f: FadingStructure, rates, scaling="none"
) -> RegionVerdict:
    """Locate a rate vector relative to the (possibly scaled) service region.

    ``scaling`` is "none", ("gamma", value) for a uniform shrink, or
    "idegree" for the per-state reciprocal-interference-degree region
    (states with at most one active link are not scaled). Closure
    membership is decided by linear feasibility; a slack maximization
    separates interior from boundary, and exterior verdicts carry a
    verified separating certificate (y, y.rates, max attainable y-value).
    """
    lam = _rate_vector(g.links, rates)
    items = _region_items(g, f, scaling)

    lp = RationalLP("max")
    lp.add_var("t")
    for pat, _, mat in items:
        for c in range(mat.num_columns):
            lp.add_var(f"w[{pat}][{c}]")
    lp.set_objective({"t": 1})
    for pat, _, mat in items:
        lp.add_constraint(
            f"cx[{pat}]",
            {f"w[{pat}][{c}]": 1 for c in range(mat.num_columns)},
            "=",
            1,
        )
    for i, link in enumerate(g.links):
        coeffs = {"t": -1}
        for pat, weight, mat in items:
            for c, col in enumerate(mat.columns):
                if col[i]:
                    coeffs[f"w[{pat}][{c}]"] = weight * col[i]
        lp.add_constraint(f"serve[{link.label}]", coeffs, ">=", lam[i])
    res = lp.solve()
    if res.status == "optimal":
        margin = res.objective
        return RegionVerdict(
            "interior" if margin > 0 else "boundary", margin, None
        )
    return RegionVerdict("exterior", None, _separating_certificate(g, items, lam))


def _separating_certificate(g, items, lam):
    """Weights y >= 0, sum 1, with y.lam strictly above the best attainable
    y-weighted service; verified exactly before returning."""
    lp = RationalLP("max")
    for link in g.links:
        lp.add_var(f"y[{link.label}]")
    for pat, _, _ in items:
        lp.add_var(f"z[{pat}]")
    lp.set_objective(
        {
            **{f"y[{link.label}]": lam[i] for i, link in enumerate(g.links)},
            **{f"z[{pat}]": -1 for pat, _, _ in items},
        }
    )
    lp.add_constraint(
        "norm", {f"y[{link.label}]": 1 for link in g.links}, "=", 1
    )
    for pat, weight, mat in items:
        for c, col in enumerate(mat.columns):
            coeffs = {f"z[{pat}]": 1}
            for i, link in enumerate(g.links):
                if col[i]:
                    coeffs[f"y[{link.label}]"] = -weight * col[i]
            lp.add_constraint(f"cut[{pat}][{c}]", coeffs, ">=", 0)
    res = lp.solve()
    assert res.status == "optimal" and res.objective > 0
    y = {link.label: res.values[f"y[{link.label}]"] for link in g.links}
    lhs = sum(
        (y[link.label] * lam[i] for i, link in enumerate(g.links)), Fraction(0)
    )
    rhs = Fraction(0)
    for pat, weight, mat in items:
        best = max(
            sum(
                (y[link.label] * col[i] for i, link in enumerate(g.links)),
                Fraction(0),
            )
            for col in mat.columns
        )
        rhs += weight * best
    assert lhs > rhs
    return y, lhs, rhs


# -- aggregate report ---------------------------------------------------------


def bound_report(
    g: InterferenceGraph,
    f: FadingStructure,
    exact: bool = True,
    witness: tuple | None = None,
) -> BoundReport:
    """Assemble the standard bound summary for a network."""
    inv = inverse_degree_bound(g)
    lower = None
    if f.mode == "onoff":
        lower, _ = min_column_sum_lower_bound(g, f)
    value = argmin = None
    if exact:
        value, argmin = graph_pooling_factor(g, f)
    upper = None
    if witness is not None:
        L, phi1, phi2 = witness
        upper = upper_bound_from_witness_pair(g, f, L, phi1, phi2)
    return BoundReport(lower, inv, value, upper, argmin)
