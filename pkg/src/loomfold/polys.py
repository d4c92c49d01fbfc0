"""Multivariate Laurent polynomials over Q(xi) and the relation polynomials.

LPoly is a finitely supported map from integer exponent vectors to CycNum,
over a fixed ordered variable tuple.  On top of it: the locality
polynomials f_ij, the Drinfeld polynomials p_ij built two independent ways
(from the difference sets, and from the closed-form case list), and the
Serre-weight families used by the mode-level verifier.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from loomfold.cartan import Gcm
from loomfold.errors import DivisionNotExact, P2Violation, ScopeViolation
from loomfold.exactnum import CycNum, cyc_root
from loomfold.folding import DiagramAut, FoldData, TupleSets, fold_data, index_pairs

__all__ = [
    "LPoly",
    "SerreFamily",
    "locality_poly",
    "drinfeld_poly_omega",
    "drinfeld_poly_closed",
    "family_p",
    "family_qlimit",
    "family_f",
    "check_P2",
]


class LPoly:
    """Sparse Laurent polynomial with CycNum coefficients."""

    __slots__ = ("vars", "terms")

    def __init__(self, variables, terms=None):
        self.vars = tuple(variables)
        clean = {}
        for exps, c in (terms or {}).items():
            if not isinstance(c, CycNum):
                c = CycNum.from_rational(Fraction(c))
            if c:
                clean[tuple(exps)] = c
        self.terms = clean

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def zero(variables) -> "LPoly":
        return LPoly(variables)

    @staticmethod
    def const(variables, c) -> "LPoly":
        n = len(tuple(variables))
        return LPoly(variables, {(0,) * n: c})

    @staticmethod
    def one(variables) -> "LPoly":
        return LPoly.const(variables, 1)

    @staticmethod
    def monomial(variables, exps, c=1) -> "LPoly":
        return LPoly(variables, {tuple(exps): c})

    def var_index(self, name: str) -> int:
        return self.vars.index(name)

    # -- ring operations -------------------------------------------------------

    def _check(self, other: "LPoly"):
        if self.vars != other.vars:
            raise ValueError(f"variable mismatch: {self.vars} vs {other.vars}")

    def __add__(self, other: "LPoly") -> "LPoly":
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            cur = out.get(e)
            out[e] = c if cur is None else cur + c
        return LPoly(self.vars, out)

    def __neg__(self) -> "LPoly":
        return LPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "LPoly") -> "LPoly":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CycNum)):
            return self.scaled(other)
        self._check(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = c1 * c2
                cur = out.get(e)
                out[e] = c if cur is None else cur + c
        return LPoly(self.vars, out)

    __rmul__ = __mul__

    def scaled(self, c) -> "LPoly":
        if not isinstance(c, CycNum):
            c = CycNum.from_rational(Fraction(c))
        return LPoly(self.vars, {e: x * c for e, x in self.terms.items()})

    def __pow__(self, k: int) -> "LPoly":
        assert k >= 0
        out = LPoly.one(self.vars)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, LPoly):
            return NotImplemented
        if self.vars != other.vars:
            return False
        if self.terms.keys() != other.terms.keys():
            return False
        return all(self.terms[e] == other.terms[e] for e in self.terms)

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    # -- structure queries -------------------------------------------------------

    def total_degree(self) -> int | None:
        if not self.terms:
            return None
        return max(sum(e) for e in self.terms)

    def is_homogeneous(self) -> bool:
        degrees = {sum(e) for e in self.terms}
        return len(degrees) <= 1

    def max_degree_in(self, name: str) -> int:
        idx = self.var_index(name)
        return max((e[idx] for e in self.terms), default=0)

    # -- substitution --------------------------------------------------------------

    def rename(self, variables) -> "LPoly":
        variables = tuple(variables)
        assert len(variables) == len(self.vars)
        return LPoly(variables, dict(self.terms))

    def embed(self, variables, mapping: dict[str, str]) -> "LPoly":
        """Move into a bigger variable tuple; mapping: old name -> new name."""
        variables = tuple(variables)
        positions = [variables.index(mapping[v]) for v in self.vars]
        out = {}
        for e, c in self.terms.items():
            new_e = [0] * len(variables)
            for pos, exp in zip(positions, e):
                new_e[pos] += exp
            key = tuple(new_e)
            cur = out.get(key)
            out[key] = c if cur is None else cur + c
        return LPoly(variables, out)

    def collapse_to_single(self, name: str = "w") -> "LPoly":
        """Substitute every variable by the same variable `name`."""
        out: dict = {}
        for e, c in self.terms.items():
            key = (sum(e),)
            cur = out.get(key)
            out[key] = c if cur is None else cur + c
        return LPoly((name,), out)

    def eval_rational(self, values: dict[str, Fraction]) -> CycNum:
        """Full evaluation at rational points (exponents may be negative)."""
        total = CycNum.zero()
        for e, c in self.terms.items():
            factor = Fraction(1)
            for name, exp in zip(self.vars, e):
                v = Fraction(values[name])
                factor *= v**exp
            total = total + c.mul_rational(factor)
        return total

    # -- division ------------------------------------------------------------------

    def divide_exact(self, divisor: "LPoly") -> "LPoly":
        """Exact multivariate division; raises DivisionNotExact on remainder."""
        self._check(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        div_terms = sorted(divisor.terms.items(), reverse=True)
        lead_e, lead_c = div_terms[0]
        rem = dict(self.terms)
        quot: dict = {}
        while rem:
            e = max(rem)
            c = rem[e]
            q_e = tuple(a - b for a, b in zip(e, lead_e))
            q_c = c / lead_c
            quot[q_e] = q_c
            for de, dc in div_terms:
                key = tuple(a + b for a, b in zip(q_e, de))
                cur = rem.get(key, None)
                val = (cur if cur is not None else CycNum.zero()) - q_c * dc
                if val:
                    rem[key] = val
                elif key in rem:
                    del rem[key]
            if e in rem:
                raise DivisionNotExact("leading term did not cancel")
            if len(quot) > 10000:
                raise DivisionNotExact("division does not terminate")
        return LPoly(self.vars, quot)

    # -- rendering ------------------------------------------------------------------

    def __repr__(self):
        return f"LPoly({self.vars}, {self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                f"{v}^{k}" if k != 1 else v for v, k in zip(self.vars, e) if k != 0
            )
            cs = str(c)
            if mono:
                if cs == "1":
                    parts.append(mono)
                elif cs == "-1":
                    parts.append(f"-{mono}")
                else:
                    needs_parens = "+" in cs or (("-" in cs) and not cs.startswith("-"))
                    parts.append(f"({cs})*{mono}" if needs_parens else f"{cs}*{mono}")
            else:
                parts.append(cs)
        return " + ".join(parts).replace("+ -", "- ")

    def latex(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "".join(
                (f"{_latex_var(v)}" if k == 1 else f"{_latex_var(v)}^{{{k}}}")
                for v, k in zip(self.vars, e)
                if k != 0
            )
            cl = c.latex()
            if mono:
                if cl == "1":
                    parts.append(mono)
                elif cl == "-1":
                    parts.append("-" + mono)
                elif "+" in cl or ("-" in cl[1:]):
                    parts.append(rf"\left({cl}\right){mono}")
                else:
                    parts.append(cl + mono)
            else:
                parts.append(cl)
        out = "+".join(parts).replace("+-", "-")
        return out

    def to_json(self) -> dict:
        items = sorted(self.terms.items())
        return {
            "vars": list(self.vars),
            "terms": [{"exps": list(e), "coeff": c.to_json()} for e, c in items],
        }

    @staticmethod
    def from_json(obj: dict) -> "LPoly":
        return LPoly(
            tuple(obj["vars"]),
            {
                tuple(t["exps"]): CycNum.from_json(t["coeff"])
                for t in obj["terms"]
            },
        )


def _latex_var(v: str) -> str:
    if len(v) > 1 and v[1:].isdigit():
        return f"{v[0]}_{{{v[1:]}}}"
    return v


# ---------------------------------------------------------------------------
# Building blocks


def linear_factor(order: int, k: int, variables=("z", "w")) -> LPoly:
    """z - xi^k w."""
    vz, vw = variables
    names = tuple(variables)
    return LPoly(
        names,
        {
            (1, 0): CycNum.one(order),
            (0, 1): -cyc_root(order, k),
        },
    )


def power_difference_ratio(a: int, b: int, variables=("z", "w")) -> LPoly:
    """(z^a - w^a) / (z^b - w^b) for b | a, written out as a geometric sum."""
    assert a % b == 0
    names = tuple(variables)
    terms = {}
    for k in range(a // b):
        terms[(b * k, a - b - b * k)] = CycNum.one()
    return LPoly(names, terms)


# ---------------------------------------------------------------------------
# Locality polynomials


def locality_poly(gcm: Gcm, mu: DiagramAut, i: int, j: int) -> LPoly:
    """The polynomial annihilating [x_i(z), x_j(w)].

    Ordinary case: product of (z - xi^k w) over k with a_{i mu^k(j)} != 0.
    For matrices of type A_1^(1) the constraint is stronger: an extra
    (z - w) factor and squared factors over k with a_{i mu^k(j)} < 0.
    """
    n = mu.order
    a = gcm.entries
    special = gcm.classify().label == "A1^(1)"
    out = LPoly.one(("z", "w"))
    if special:
        out = out * linear_factor(n, 0)
        for k in range(n):
            if a[i][mu.apply(j, k)] < 0:
                out = out * linear_factor(n, k) * linear_factor(n, k)
        return out
    for k in range(n):
        if a[i][mu.apply(j, k)] != 0:
            out = out * linear_factor(n, k)
    return out


# ---------------------------------------------------------------------------
# Drinfeld polynomials, two constructions


def drinfeld_poly_omega(sets: TupleSets, i: int, j: int, order: int) -> LPoly:
    """p_ij from the difference sets: linear factors over Omega^x, squared
    factors over Omega^0."""
    ps = sets[(i, j)]
    out = LPoly.one(("z", "w"))
    for k in sorted(ps.omega_real):
        out = out * linear_factor(order, k)
    for k in sorted(ps.omega_imag):
        out = out * linear_factor(order, k) * linear_factor(order, k)
    return out


def drinfeld_poly_closed(
    gcm: Gcm, mu: DiagramAut, fold: FoldData, i: int, j: int
) -> LPoly:
    """p_ij from the closed-form case list over s_i, N, N_ij."""
    n = mu.order
    s_i = fold.s[i]
    if fold.same_orbit(i, j):
        if s_i <= 2:
            return LPoly.one(("z", "w"))
        if n in (2, 3):
            return power_difference_ratio(n, 1) * power_difference_ratio(n, 1)
        if n in (4, 5):
            return power_difference_ratio(n, 1)
        out = LPoly.one(("z", "w"))
        for k in sorted(fold.gamma_minus(gcm, mu, i, i)):
            out = out * linear_factor(n, k) * linear_factor(n, (2 * k) % n)
        return out
    d_i = fold.d[i]
    d_ij = fold.d_pair(gcm, mu, i, j)
    first = power_difference_ratio(s_i * d_i, d_i)
    second = power_difference_ratio(d_ij, d_i) if d_ij % d_i == 0 else None
    if second is None:
        # fall back to exact division to surface an inconsistency loudly
        num = LPoly(("z", "w"), {(d_ij, 0): 1, (0, d_ij): -1})
        den = LPoly(("z", "w"), {(d_i, 0): 1, (0, d_i): -1})
        second = num.divide_exact(den)
    return first * second


# ---------------------------------------------------------------------------
# Serre families


def _z_vars(arity: int) -> tuple[str, ...]:
    return tuple(f"z{k+1}" for k in range(arity)) + ("w",)


def _permutations(arity: int):
    return list(itertools.permutations(range(arity)))


@dataclass
class SerreFamily:
    """For each pair (i, j) with a_ij < 0 and each permutation sigma, a
    homogeneous polynomial in z_1..z_{1-a_ij}, w."""

    name: str
    entries: dict = field(default_factory=dict)  # (i, j) -> {sigma: LPoly}

    def arity(self, i: int, j: int) -> int:
        sigmas = self.entries[(i, j)]
        some = next(iter(sigmas.values()))
        return len(some.vars) - 1

    def polynomials(self, i: int, j: int) -> dict:
        return self.entries[(i, j)]

    def assert_homogeneous(self):
        for (i, j), sigmas in self.entries.items():
            for sigma, poly in sigmas.items():
                if not poly.is_homogeneous():
                    raise P2Violation(
                        f"family {self.name}: P[{i},{j},{sigma}] is not homogeneous"
                    )

    def to_json(self) -> dict:
        pairs = []
        for (i, j), sigmas in sorted(self.entries.items()):
            pairs.append(
                {
                    "pair": [i, j],
                    "terms": {
                        ",".join(map(str, sigma)): poly.to_json()
                        for sigma, poly in sorted(sigmas.items())
                    },
                }
            )
        return {"family": self.name, "pairs": pairs}


def family_p(
    gcm: Gcm,
    mu: DiagramAut,
    fold: FoldData | None = None,
    sets: TupleSets | None = None,
) -> SerreFamily:
    """The product family: P_{ij,1} = prod over slot pairs of p_ij, rest 0."""
    from loomfold.folding import tuple_sets

    if fold is None:
        fold = fold_data(gcm, mu)
    if sets is None:
        sets = tuple_sets(gcm, mu, fold)
    fam = SerreFamily("p")
    for i, j in index_pairs(gcm):
        arity = 1 - gcm.entries[i][j]
        variables = _z_vars(arity)
        p = drinfeld_poly_omega(sets, i, j, mu.order)
        prod = LPoly.one(variables)
        for s in range(arity):
            for t in range(s + 1, arity):
                prod = prod * p.embed(
                    variables, {"z": variables[s], "w": variables[t]}
                )
        sigmas = {}
        for sigma in _permutations(arity):
            sigmas[sigma] = prod if sigma == tuple(range(arity)) else LPoly.zero(variables)
        fam.entries[(i, j)] = sigmas
    fam.assert_homogeneous()
    return fam


def p_pair_qlimit(
    gcm: Gcm, mu: DiagramAut, fold: FoldData, i: int, j: int, q: Fraction
) -> LPoly:
    """The two-variable weight for cross-orbit pairs, at rational q.

    (z^{d_i} + q^{-d_i} w^{d_i})^{s_i - 1} * (q^{2 d_ij} z^{d_ij} - w^{d_ij})
    divided exactly by (q^{2 d_i} z^{d_i} - w^{d_i}).
    """
    d_i = fold.d[i]
    d_ij = fold.d_pair(gcm, mu, i, j)
    s_i = fold.s[i]
    variables = ("z", "w")
    first = LPoly(
        variables, {(d_i, 0): 1, (0, d_i): CycNum.from_rational(q ** (-d_i))}
    ) ** (s_i - 1)
    num = LPoly(
        variables,
        {(d_ij, 0): CycNum.from_rational(q ** (2 * d_ij)), (0, d_ij): -1},
    )
    den = LPoly(
        variables,
        {(d_i, 0): CycNum.from_rational(q ** (2 * d_i)), (0, d_i): -1},
    )
    return first * num.divide_exact(den)


def p_node_qlimit(d_i: int, q: Fraction) -> LPoly:
    """q^{-d} z1^d - (q^d + 1) z2^d + q^{2d} z3^d at rational q."""
    variables = ("z1", "z2", "z3")
    return LPoly(
        variables,
        {
            (d_i, 0, 0): CycNum.from_rational(q ** (-d_i)),
            (0, d_i, 0): CycNum.from_rational(-(q**d_i) - 1),
            (0, 0, d_i): CycNum.from_rational(q ** (2 * d_i)),
        },
    )


def family_qlimit(
    gcm: Gcm,
    mu: DiagramAut,
    fold: FoldData | None = None,
    q: Fraction = Fraction(1),
) -> SerreFamily:
    """The classical-limit family of the twisted quantum affinization.

    Requires a simply-laced matrix and a non-transitive automorphism; all
    pairs then have a_ij = -1, so the family lives on two z-slots.
    """
    if fold is None:
        fold = fold_data(gcm, mu)
    a = gcm.entries
    n = gcm.n
    for i in range(n):
        for j in range(n):
            if i != j and a[i][j] not in (0, -1):
                raise ScopeViolation("classical-limit family requires a simply-laced matrix")
    if any(s == 3 for s in fold.s):
        raise ScopeViolation(
            "classical-limit family requires a non-transitive automorphism"
        )
    fam = SerreFamily("qlimit")
    variables = _z_vars(2)
    for i, j in index_pairs(gcm):
        sigmas = {}
        if not fold.same_orbit(i, j):
            p = p_pair_qlimit(gcm, mu, fold, i, j, q)
            for sigma in _permutations(2):
                mapping = {"z": variables[sigma[0]], "w": variables[sigma[1]]}
                sigmas[sigma] = p.embed(variables, mapping)
        else:
            base = p_node_qlimit(fold.d[i], q)
            for sigma in _permutations(2):
                mapping = {
                    "z1": variables[sigma[0]],
                    "z2": variables[sigma[1]],
                    "z3": "w",
                }
                poly = base.embed(variables, mapping)
                # the third slot carries -w
                flipped = {}
                widx = variables.index("w")
                for e, c in poly.terms.items():
                    sign = -1 if e[widx] % 2 else 1
                    flipped[e] = c.mul_rational(sign)
                sigmas[sigma] = LPoly(variables, flipped)
        fam.entries[(i, j)] = sigmas
    fam.assert_homogeneous()
    return fam


def family_f(base: SerreFamily, extra: dict) -> SerreFamily:
    """Multiply the identity-permutation slot of each pair by a fixed
    homogeneous polynomial that does not vanish on the diagonal."""
    fam = SerreFamily(f"f*{base.name}")
    for (i, j), sigmas in base.entries.items():
        f_ij = extra.get((i, j))
        new_sigmas = dict(sigmas)
        if f_ij is not None:
            variables = next(iter(sigmas.values())).vars
            if tuple(f_ij.vars) != tuple(variables):
                raise P2Violation(
                    f"extra factor for pair ({i},{j}) must use variables {variables}"
                )
            if not f_ij.is_homogeneous():
                raise P2Violation(f"extra factor for pair ({i},{j}) is not homogeneous")
            if f_ij.collapse_to_single().is_zero():
                raise P2Violation(
                    f"extra factor for pair ({i},{j}) vanishes on the diagonal"
                )
            ident = tuple(range(len(variables) - 1))
            new_sigmas[ident] = sigmas[ident] * f_ij
        fam.entries[(i, j)] = new_sigmas
    violations = [k for k, v in check_P2(fam).items() if v.is_zero()]
    if violations:
        raise P2Violation(f"resulting family vanishes on the diagonal at {violations}")
    return fam


def check_P2(fam: SerreFamily) -> dict:
    """Diagonal sum per pair: substitute every z by w, sum over sigma."""
    out = {}
    for (i, j), sigmas in fam.entries.items():
        total = LPoly.zero(("w",))
        for poly in sigmas.values():
            total = total + poly.collapse_to_single("w")
        out[(i, j)] = total
    return out
