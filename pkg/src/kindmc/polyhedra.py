"""Convex polyhedra over rationals with integer-normalised constraints.

A constraint is  sum(coeff[v] * v) + const REL 0  with REL in {<=, ==}.
Strict inequalities over the integer-valued program variables are
normalised away (e < 0 becomes e + 1 <= 0).  Projection is exact
Fourier-Motzkin elimination; equalities are eliminated first by exact
integer Gaussian substitution.  All entailment checks use the integer
tightening (negating e <= 0 as e >= 1), which is sound for integer-valued
states.

The join keeps (a) the affine-hull equalities of the union, computed from
the equality parts of both sides, and (b) every inequality of one side that
the other side entails.  This is coarser than the exact convex hull but
precise enough to discover relations such as x == c*y + d between loop
iterates, which is what the downstream consumers need.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

CONSTRAINT_CAP = 64        # max constraints kept per polyhedron
FM_INTERMEDIATE_CAP = 600  # abort FM when the working set explodes


@dataclass(frozen=True)
class AffineConstraint:
    """sum(coeffs[v]*v) + const <= 0, or == 0 when is_eq."""

    coeffs: tuple            # sorted ((var, coeff), ...) with nonzero coeffs
    const: int
    is_eq: bool = False

    @staticmethod
    def make(coeffs: dict, const: int, is_eq: bool = False) -> "AffineConstraint | None":
        """Normalise: drop zero coefficients, divide by the gcd (tightening
        the constant for inequalities).  Returns None for a trivially true
        constraint and raises Infeasible for a trivially false one."""
        items = {v: c for v, c in coeffs.items() if c != 0}
        if not items:
            if is_eq:
                if const != 0:
                    raise Infeasible()
            elif const > 0:
                raise Infeasible()
            return None
        g = 0
        for c in items.values():
            g = gcd(g, abs(c))
        if is_eq:
            if const % g:
                raise Infeasible()
            items = {v: c // g for v, c in items.items()}
            const //= g
            # canonical sign: first coefficient positive
            first = min(items)
            if items[first] < 0:
                items = {v: -c for v, c in items.items()}
                const = -const
        else:
            items = {v: c // g for v, c in items.items()}
            const = -((-const) // g)  # ceil(const/g): integer tightening
        return AffineConstraint(tuple(sorted(items.items())), const, is_eq)

    def coeff_map(self) -> dict:
        return dict(self.coeffs)

    def variables(self) -> set:
        return {v for v, _ in self.coeffs}

    def negated_int(self) -> "AffineConstraint":
        """Integer negation of an inequality: not(e <= 0) is -e + 1 <= 0."""
        assert not self.is_eq
        return AffineConstraint(tuple((v, -c) for v, c in self.coeffs), -self.const + 1, False)

    def __str__(self):
        terms = []
        for v, c in self.coeffs:
            if c == 1:
                terms.append(f"+ {v}")
            elif c == -1:
                terms.append(f"- {v}")
            elif c < 0:
                terms.append(f"- {-c}*{v}")
            else:
                terms.append(f"+ {c}*{v}")
        body = " ".join(terms).lstrip("+ ").strip()
        if self.const > 0:
            body += f" + {self.const}"
        elif self.const < 0:
            body += f" - {-self.const}"
        return f"{body} {'==' if self.is_eq else '<='} 0"


class Infeasible(Exception):
    pass


def _scale_add(c1: AffineConstraint, m1: int, c2: AffineConstraint, m2: int,
               is_eq: bool) -> "AffineConstraint | None":
    acc = {}
    for v, c in c1.coeffs:
        acc[v] = acc.get(v, 0) + m1 * c
    for v, c in c2.coeffs:
        acc[v] = acc.get(v, 0) + m2 * c
    return AffineConstraint.make(acc, m1 * c1.const + m2 * c2.const, is_eq)


def _eliminate_var(constraints: list, var: str) -> list:
    """One Fourier-Motzkin / Gaussian step removing `var`."""
    eqs = [c for c in constraints if c.is_eq and var in c.coeff_map()]
    if eqs:
        pivot = eqs[0]
        pc = pivot.coeff_map()[var]
        out = []
        for c in constraints:
            if c is pivot:
                continue
            cc = c.coeff_map().get(var, 0)
            if cc == 0:
                out.append(c)
                continue
            # c*|pc| - pivot*(cc*sign(pc)) cancels var; |pc| > 0 keeps the
            # inequality direction
            sign = 1 if pc > 0 else -1
            combined = _scale_add(c, abs(pc), pivot, -cc * sign, c.is_eq)
            if combined is not None:
                out.append(combined)
        return out
    pos, neg, rest = [], [], []
    for c in constraints:
        cc = c.coeff_map().get(var, 0)
        if cc > 0:
            pos.append((c, cc))
        elif cc < 0:
            neg.append((c, cc))
        else:
            rest.append(c)
    if len(pos) * len(neg) + len(rest) > FM_INTERMEDIATE_CAP:
        raise _FMOverflow()
    for cp, ap in pos:
        for cn, an in neg:
            combined = _scale_add(cp, -an, cn, ap, False)
            if combined is not None:
                rest.append(combined)
    return rest


class _FMOverflow(Exception):
    pass


def _dedupe(constraints: list) -> list:
    seen = set()
    out = []
    for c in constraints:
        key = (c.coeffs, c.const, c.is_eq)
        if key not in seen:
            seen.add(key)
            out.append(c)
    return out


def feasible(constraints: list) -> bool:
    """Rational feasibility via elimination.  Returns True when the FM
    working set explodes (conservative: unknown counts as feasible)."""
    work = _dedupe(list(constraints))
    try:
        while True:
            vars_left = set()
            for c in work:
                vars_left |= c.variables()
            if not vars_left:
                break
            # cheapest variable first (Chernikov-style heuristic)
            def cost(v):
                pos = sum(1 for c in work if c.coeff_map().get(v, 0) > 0 and not c.is_eq)
                neg = sum(1 for c in work if c.coeff_map().get(v, 0) < 0 and not c.is_eq)
                has_eq = any(c.is_eq and v in c.coeff_map() for c in work)
                return (0 if has_eq else 1, pos * neg)
            var = min(vars_left, key=lambda v: (cost(v), v))
            work = _dedupe(_eliminate_var(work, var))
        return True  # make() raised Infeasible for any violated constant
    except Infeasible:
        return False
    except _FMOverflow:
        return True


class Polyhedron:
    """Conjunction of affine constraints, or Top / Bottom."""

    __slots__ = ("constraints", "bottom")

    def __init__(self, constraints=None, bottom=False):
        self.constraints: list[AffineConstraint] = list(constraints or [])
        self.bottom = bottom

    # -- constructors ------------------------------------------------

    @staticmethod
    def top() -> "Polyhedron":
        return Polyhedron()

    @staticmethod
    def bot() -> "Polyhedron":
        return Polyhedron(bottom=True)

    @staticmethod
    def of(raw: list) -> "Polyhedron":
        """raw: iterable of (coeff-dict, const, is_eq) triples."""
        out = []
        try:
            for coeffs, const, is_eq in raw:
                c = AffineConstraint.make(coeffs, const, is_eq)
                if c is not None:
                    out.append(c)
        except Infeasible:
            return Polyhedron.bot()
        poly = Polyhedron(_dedupe(out))
        return poly.check_bottom()

    def copy(self) -> "Polyhedron":
        return Polyhedron(list(self.constraints), self.bottom)

    # -- predicates ---------------------------------------------------

    @property
    def is_bottom(self) -> bool:
        return self.bottom

    @property
    def is_top(self) -> bool:
        return not self.bottom and not self.constraints

    def check_bottom(self) -> "Polyhedron":
        if not self.bottom and self.constraints and not feasible(self.constraints):
            return Polyhedron.bot()
        return self

    def variables(self) -> set:
        acc = set()
        for c in self.constraints:
            acc |= c.variables()
        return acc

    def entails(self, constraint: AffineConstraint) -> bool:
        if self.bottom:
            return True
        if constraint.is_eq:
            le = AffineConstraint(constraint.coeffs, constraint.const, False)
            ge = AffineConstraint(tuple((v, -c) for v, c in constraint.coeffs),
                                  -constraint.const, False)
            return self.entails(le) and self.entails(ge)
        return not feasible(self.constraints + [constraint.negated_int()])

    def entails_all(self, other: "Polyhedron") -> bool:
        if other.bottom:
            return self.bottom
        return all(self.entails(c) for c in other.constraints)

    # -- lattice operations -------------------------------------------

    def meet(self, other: "Polyhedron") -> "Polyhedron":
        if self.bottom or other.bottom:
            return Polyhedron.bot()
        merged = _dedupe(self.constraints + other.constraints)
        return Polyhedron(merged).check_bottom().capped()

    def promote_equalities(self) -> "Polyhedron":
        """Turn inequalities whose reverse is entailed into equalities."""
        if self.bottom:
            return self
        out = list(self.constraints)
        changed = False
        for idx, c in enumerate(out):
            if c.is_eq:
                continue
            rev = AffineConstraint(tuple((v, -k) for v, k in c.coeffs), -c.const, False)
            if self.entails(rev):
                eq = AffineConstraint.make(c.coeff_map(), c.const, True)
                out[idx] = eq
                changed = True
        if not changed:
            return self
        return Polyhedron(_dedupe([c for c in out if c is not None]))

    def join(self, other: "Polyhedron") -> "Polyhedron":
        if self.bottom:
            return other.copy()
        if other.bottom:
            return self.copy()
        if self.is_top or other.is_top:
            return Polyhedron.top()
        a = self.promote_equalities()
        b = other.promote_equalities()
        out: list[AffineConstraint] = list(_affine_hull_join(a, b))
        for src, dst in ((a, b), (b, a)):
            for c in src.constraints:
                cands = [c] if not c.is_eq else [
                    AffineConstraint(c.coeffs, c.const, False),
                    AffineConstraint(tuple((v, -k) for v, k in c.coeffs), -c.const, False),
                ]
                for cand in cands:
                    if dst.entails(cand):
                        out.append(cand)
        return Polyhedron(_dedupe(out)).capped()

    def widen(self, newer: "Polyhedron") -> "Polyhedron":
        """Keep constraints of self that the newer polyhedron satisfies."""
        if self.bottom:
            return newer.copy()
        if newer.bottom:
            return self.copy()
        kept = [c for c in self.constraints if newer.entails(c)]
        return Polyhedron(kept)

    # -- projection / renaming ----------------------------------------

    def project_out(self, variables) -> "Polyhedron":
        if self.bottom:
            return self
        work = list(self.constraints)
        try:
            for var in sorted(set(variables)):
                if any(var in c.coeff_map() for c in work):
                    work = _dedupe(_eliminate_var(work, var))
        except Infeasible:
            return Polyhedron.bot()
        except _FMOverflow:
            # drop every constraint touching the unfinished variables:
            # sound (larger polyhedron), noted by the caller via capped size
            doomed = set(variables)
            work = [c for c in work if not (c.variables() & doomed)]
        return Polyhedron(work).capped()

    def rename(self, mapping: dict) -> "Polyhedron":
        if self.bottom:
            return self
        out = []
        for c in self.constraints:
            coeffs = {mapping.get(v, v): k for v, k in c.coeffs}
            out.append(AffineConstraint(tuple(sorted(coeffs.items())), c.const, c.is_eq))
        return Polyhedron(_dedupe(out))

    def reduced(self) -> "Polyhedron":
        """Drop inequalities entailed by the remaining constraints."""
        if self.bottom or len(self.constraints) < 2:
            return self
        kept = list(self.constraints)
        idx = 0
        while idx < len(kept):
            c = kept[idx]
            if not c.is_eq:
                rest = Polyhedron(kept[:idx] + kept[idx + 1:])
                if rest.entails(c):
                    kept.pop(idx)
                    continue
            idx += 1
        return Polyhedron(kept)

    def capped(self) -> "Polyhedron":
        """Enforce the constraint-count cap, dropping the weakest
        inequalities first (largest constant magnitude)."""
        if self.bottom or len(self.constraints) <= CONSTRAINT_CAP:
            return self
        eqs = [c for c in self.constraints if c.is_eq]
        ineqs = [c for c in self.constraints if not c.is_eq]
        ineqs.sort(key=lambda c: abs(c.const))
        keep = max(CONSTRAINT_CAP - len(eqs), 0)
        return Polyhedron(eqs + ineqs[:keep])

    def __str__(self):
        if self.bottom:
            return "false"
        if not self.constraints:
            return "true"
        return " && ".join(str(c) for c in sorted(
            self.constraints, key=lambda c: (not c.is_eq, c.coeffs, c.const)))

    def __repr__(self):
        return f"Polyhedron({self})"


# ------------------------------------------------------------------
# Affine-hull join of the equality parts
# ------------------------------------------------------------------

def _solve_affine(eqs: list, variables: list):
    """Solve the equality system; returns (particular solution vector,
    nullspace basis vectors) over Fractions, or None when inconsistent."""
    rows = []
    for c in eqs:
        cm = c.coeff_map()
        rows.append([Fraction(cm.get(v, 0)) for v in variables] + [Fraction(-c.const)])
    ncols = len(variables)
    pivots = []
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        rows[r] = [x / rows[r][col] for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                factor = rows[i][col]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    for i in range(r, len(rows)):
        if rows[i][ncols] != 0:
            return None
    particular = [Fraction(0)] * ncols
    for i, col in enumerate(pivots):
        particular[col] = rows[i][ncols]
    basis = []
    free_cols = [c for c in range(ncols) if c not in pivots]
    for fc in free_cols:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for i, col in enumerate(pivots):
            vec[col] = -rows[i][fc]
        basis.append(vec)
    return particular, basis


def _affine_hull_join(a: Polyhedron, b: Polyhedron) -> list:
    """Equalities valid on the union of the two equality subspaces."""
    eqs_a = [c for c in a.constraints if c.is_eq]
    eqs_b = [c for c in b.constraints if c.is_eq]
    if not eqs_a or not eqs_b:
        return []
    variables = sorted({v for c in eqs_a + eqs_b for v in c.variables()})
    sol_a = _solve_affine(eqs_a, variables)
    sol_b = _solve_affine(eqs_b, variables)
    if sol_a is None or sol_b is None:
        return []
    pa, na = sol_a
    pb, nb = sol_b
    directions = na + nb + [[x - y for x, y in zip(pb, pa)]]
    directions = [d for d in directions if any(x != 0 for x in d)]
    # alphas orthogonal to every direction: nullspace of the direction matrix
    n = len(variables)
    rows = [list(d) for d in directions]
    pivots = []
    r = 0
    for col in range(n):
        pivot = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        rows[r] = [x / rows[r][col] for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                factor = rows[i][col]
                rows[i] = [x - factor * y for x, y in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    out = []
    free_cols = [c for c in range(n) if c not in pivots]
    for fc in free_cols:
        alpha = [Fraction(0)] * n
        alpha[fc] = Fraction(1)
        for i, col in enumerate(pivots):
            alpha[col] = -rows[i][fc]
        # scale to integers
        denom = 1
        for x in alpha:
            denom = denom * x.denominator // gcd(denom, x.denominator)
        ints = [int(x * denom) for x in alpha]
        beta = sum(c * p for c, p in zip(alpha, pa))
        beta_i = beta * denom
        if beta_i.denominator != 1:
            continue
        coeffs = {v: c for v, c in zip(variables, ints) if c != 0}
        if not coeffs:
            continue
        try:
            c = AffineConstraint.make(coeffs, -int(beta_i), True)
        except Infeasible:
            continue
        if c is not None:
            out.append(c)
    return out
