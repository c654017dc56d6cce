"""Exact rational linear programming: two-phase simplex with Bland's rule.

Everything is computed over exact rationals so optima like 2/3 or 4/5 come
out as equalities, not approximations. Bland's pivoting rule precludes
cycling and makes runs reproducible. Problem sizes here are tiny (tens of
variables), so no effort is spent on sparsity or revised-simplex tricks.

Tableau arithmetic uses gmpy2.mpq when available (same exact semantics,
several times faster than fractions.Fraction); results are always returned
as Fraction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NumericOverflow

try:
    from gmpy2 import mpq as _mpq

    def _rat(x):
        if isinstance(x, Fraction):
            return _mpq(x.numerator, x.denominator)
        return _mpq(x)

    def _to_fraction(q) -> Fraction:
        return Fraction(int(q.numerator), int(q.denominator))

except ImportError:  # pragma: no cover - gmpy2 is normally present
    _rat = Fraction

    def _to_fraction(q) -> Fraction:
        return q


_ZERO = _rat(0)
_ONE = _rat(1)

DEFAULT_BIT_CAP = 100_000


@dataclass(frozen=True)
class LPResult:
    status: str  # optimal | infeasible | unbounded
    objective: Fraction | None
    values: dict[str, Fraction]

    def __getitem__(self, name: str) -> Fraction:
        return self.values[name]


class RationalLP:
    """A linear program over named variables with exact rational data."""

    def __init__(self, sense: str = "max", bit_cap: int = DEFAULT_BIT_CAP):
        if sense not in ("max", "min"):
            raise ValueError(f"sense must be 'max' or 'min', got {sense!r}")
        self.sense = sense
        self.bit_cap = bit_cap
        self._vars: dict[str, bool] = {}  # name -> nonneg
        self._objective: dict[str, Fraction] = {}
        self._constraints: list[tuple[str, dict[str, Fraction], str, Fraction]] = []
        self._con_names: set[str] = set()

    def add_var(self, name: str, nonneg: bool = True) -> str:
        if name in self._vars:
            raise ValueError(f"variable {name!r} already declared")
        self._vars[name] = nonneg
        return name

    def set_objective(self, coeffs: dict) -> None:
        self._check_names(coeffs)
        self._objective = {k: Fraction(v) for k, v in coeffs.items()}

    def add_constraint(self, name: str, coeffs: dict, rel: str, rhs) -> None:
        if rel not in ("<=", "=", ">="):
            raise ValueError(f"relation must be <=, = or >=, got {rel!r}")
        if name in self._con_names:
            raise ValueError(f"constraint {name!r} already declared")
        self._check_names(coeffs)
        self._con_names.add(name)
        self._constraints.append(
            (name, {k: Fraction(v) for k, v in coeffs.items()}, rel, Fraction(rhs))
        )

    def _check_names(self, coeffs) -> None:
        for k in coeffs:
            if k not in self._vars:
                raise KeyError(f"unknown variable {k!r}")

    # -- solving ----------------------------------------------------------

    def solve(self) -> LPResult:
        """Exact optimum; the returned assignment is re-verified before return."""
        return self._run(want_objective=True)

    def find_feasible(self) -> LPResult:
        """Phase-1 only: a verified witness of feasibility, or infeasible."""
        return self._run(want_objective=False)

    def _run(self, want_objective: bool) -> LPResult:
        var_names = list(self._vars)
        col_of: dict[str, int] = {}
        ncol = 0
        for name in var_names:
            col_of[name] = ncol
            ncol += 1 if self._vars[name] else 2  # free vars split x+ - x-
        n_dec = ncol

        # normalize rows to rhs >= 0
        rows = []
        for _, coeffs, rel, rhs in self._constraints:
            if rhs < 0:
                coeffs = {k: -v for k, v in coeffs.items()}
                rhs = -rhs
                rel = {"<=": ">=", ">=": "<=", "=": "="}[rel]
            rows.append((coeffs, rel, rhs))

        n_slack = sum(1 for _, rel, _ in rows if rel != "=")
        n_art = sum(1 for _, rel, _ in rows if rel != "<=")
        total = n_dec + n_slack + n_art
        art_start = n_dec + n_slack

        tab: list[list] = []
        basis: list[int] = []
        slack_i = n_dec
        art_i = art_start
        for coeffs, rel, rhs in rows:
            row = [_ZERO] * (total + 1)
            for k, v in coeffs.items():
                c = col_of[k]
                q = _rat(v)
                row[c] += q
                if not self._vars[k]:
                    row[c + 1] -= q
            row[total] = _rat(rhs)
            if rel == "<=":
                row[slack_i] = _ONE
                basis.append(slack_i)
                slack_i += 1
            elif rel == ">=":
                row[slack_i] = -_ONE
                slack_i += 1
                row[art_i] = _ONE
                basis.append(art_i)
                art_i += 1
            else:
                row[art_i] = _ONE
                basis.append(art_i)
                art_i += 1
            tab.append(row)

        # phase 1: maximize -(sum of artificials)
        if n_art:
            obj = [_ZERO] * (total + 1)
            for i, b in enumerate(basis):
                if b >= art_start:
                    row = tab[i]
                    for j in range(total + 1):
                        obj[j] += row[j]
            for j in range(art_start, total):
                obj[j] = _ZERO
            tab.append(obj)
            status = self._pivot_loop(tab, basis, total)
            assert status == "optimal"  # phase-1 objective is bounded
            if tab[-1][total] != 0:
                return LPResult("infeasible", None, {})
            tab.pop()
            self._drive_out_artificials(tab, basis, art_start, total)
            # drop artificial columns
            keep = list(range(art_start)) + [total]
            tab = [[row[j] for j in keep] for row in tab]
            total = art_start

        if not want_objective:
            values = self._extract(tab, basis, col_of, total)
            self._verify(values, None)
            return LPResult("optimal", None, values)

        # phase 2
        sign = 1 if self.sense == "max" else -1
        c = [_ZERO] * total
        for name, v in self._objective.items():
            q = _rat(v) * sign
            j = col_of[name]
            c[j] += q
            if not self._vars[name]:
                c[j + 1] -= q
        obj = [_ZERO] * (total + 1)
        for j in range(total + 1):
            acc = c[j] if j < total else _ZERO
            for i, b in enumerate(basis):
                if c[b] != 0:
                    acc -= c[b] * tab[i][j]
            obj[j] = acc
        tab.append(obj)
        status = self._pivot_loop(tab, basis, total)
        if status == "unbounded":
            return LPResult("unbounded", None, {})
        z = -tab[-1][total] * sign
        values = self._extract(tab[:-1], basis, col_of, total)
        objective = _to_fraction(z)
        self._verify(values, objective)
        return LPResult("optimal", objective, values)

    def _pivot_loop(self, tab, basis, total) -> str:
        m = len(tab) - 1
        while True:
            obj = tab[m]  # _pivot replaces row objects, so rebind each pass
            enter = -1
            for j in range(total):
                if obj[j] > 0:
                    enter = j
                    break
            if enter < 0:
                return "optimal"
            leave = -1
            best = None
            for i in range(m):
                a = tab[i][enter]
                if a > 0:
                    r = tab[i][total] / a
                    if best is None or r < best or (r == best and basis[i] < basis[leave]):
                        best = r
                        leave = i
            if leave < 0:
                return "unbounded"
            self._pivot(tab, basis, leave, enter, total)

    def _pivot(self, tab, basis, leave, enter, total) -> None:
        prow = tab[leave]
        p = prow[enter]
        nbits = p.numerator.bit_length() + p.denominator.bit_length()
        if nbits > self.bit_cap:
            raise NumericOverflow(nbits, self.bit_cap)
        if p != 1:
            inv = _ONE / p
            tab[leave] = prow = [v * inv for v in prow]
        for i, row in enumerate(tab):
            if i == leave:
                continue
            f = row[enter]
            if f != 0:
                tab[i] = [a - f * b for a, b in zip(row, prow)]
        basis[leave] = enter

    def _drive_out_artificials(self, tab, basis, art_start, total) -> None:
        i = 0
        while i < len(tab):
            if basis[i] >= art_start:
                enter = next(
                    (j for j in range(art_start) if tab[i][j] != 0), None
                )
                if enter is None:
                    tab.pop(i)  # redundant row
                    basis.pop(i)
                    continue
                self._pivot(tab, basis, i, enter, total)
            i += 1

    def _extract(self, rows, basis, col_of, total) -> dict[str, Fraction]:
        col_val = {b: rows[i][total] for i, b in enumerate(basis)}
        values = {}
        for name, nonneg in self._vars.items():
            j = col_of[name]
            v = col_val.get(j, _ZERO)
            if not nonneg:
                v = v - col_val.get(j + 1, _ZERO)
            values[name] = _to_fraction(v)
        return values

    def _verify(self, values: dict[str, Fraction], objective) -> None:
        for name, coeffs, rel, rhs in self._constraints:
            lhs = sum((values[k] * v for k, v in coeffs.items()), Fraction(0))
            ok = lhs <= rhs if rel == "<=" else lhs >= rhs if rel == ">=" else lhs == rhs
            if not ok:
                raise AssertionError(
                    f"solver returned an assignment violating {name}: {lhs} {rel} {rhs}"
                )
        for name, nonneg in self._vars.items():
            if nonneg and values[name] < 0:
                raise AssertionError(f"negative value for nonneg var {name}")
        if objective is not None:
            z = sum(
                (values[k] * v for k, v in self._objective.items()), Fraction(0)
            )
            if z != objective:
                raise AssertionError(f"objective mismatch: {z} != {objective}")

    # -- debugging --------------------------------------------------------

    def dump(self) -> str:
        """Plain-text rendering of the program, LP-file style."""
        out = [f"{self.sense}imize"]
        out.append("  obj: " + _poly(self._objective))
        out.append("subject to")
        for name, coeffs, rel, rhs in self._constraints:
            out.append(f"  {name}: {_poly(coeffs)} {rel} {rhs}")
        free = [n for n, nn in self._vars.items() if not nn]
        if free:
            out.append("free: " + ", ".join(free))
        return "\n".join(out)


def _poly(coeffs: dict) -> str:
    if not coeffs:
        return "0"
    parts = []
    for k, v in coeffs.items():
        parts.append(f"+ {v} {k}" if v >= 0 else f"- {-v} {k}")
    s = " ".join(parts)
    return s[2:] if s.startswith("+ ") else s


def feasible(lp: RationalLP):
    """Exact feasibility check: the witness assignment, or None."""
    res = lp.find_feasible()
    return res.values if res.status == "optimal" else None
