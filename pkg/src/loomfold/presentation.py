"""Mode-level verification of the current-algebra relations.

A formal identity sum_sigma P(z_1..z_s, w) [x(z_sigma(1)), ..., [x(z_sigma(s)),
y(w)]] = 0 is checked by extracting the coefficient of each monomial
z_1^{-m_1-1} ... w^{-n-1} over a finite grid of output modes; each
coefficient is a finite exact combination of iterated brackets of generator
images in the realization.  A reported failure therefore carries an
explicit nonzero residual element that can be re-checked independently.

A pass certifies the identity on the tested grid only; for the built-in
families the grid is the whole statement being claimed here.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from loomfold.errors import OutOfWindow, ScopeViolation
from loomfold.exactnum import CycNum, cyc_root
from loomfold.folding import index_pairs
from loomfold.polys import LPoly, SerreFamily
from loomfold.realize import Realization, vec_add, vec_is_zero, vec_scale

__all__ = [
    "RelationCheck",
    "RelationReport",
    "Verifier",
    "suite_window",
    "serialize_elem",
]

MAX_RECORDED_FAILURES = 8


@dataclass
class RelationCheck:
    """Outcome of one relation family over its full mode grid."""

    kind: str
    pair: tuple
    sign: int  # +1, -1 or 0 when not sign-split
    grid: str
    checked: int = 0
    gaps: list = field(default_factory=list)  # mode tuples skipped (window)
    failures: list = field(default_factory=list)  # (modes, residual)
    failure_count: int = 0

    @property
    def passed(self) -> bool:
        return self.failure_count == 0

    def record_failure(self, modes, residual):
        self.failure_count += 1
        if len(self.failures) < MAX_RECORDED_FAILURES:
            self.failures.append((modes, residual))

    def to_json(self) -> dict:
        out = {
            "relation": self.kind,
            "pair": list(self.pair),
            "sign": self.sign,
            "modes": self.grid,
            "checked": self.checked,
            "pass": self.passed,
        }
        if self.gaps:
            out["out_of_window"] = [list(m) for m in self.gaps]
        if self.failures:
            out["failures"] = [
                {"modes": list(m), "residual": serialize_elem(r)}
                for m, r in self.failures
            ]
        return out


def serialize_elem(elem) -> list:
    """Stable JSON form of a realization element."""
    out = []
    for key in sorted(elem):
        entry = {"key": [str(key[0])] + [int(x) for x in key[1:]], "coeff": elem[key].to_json()}
        out.append(entry)
    return out


@dataclass
class RelationReport:
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def has_gaps(self) -> bool:
        return any(c.gaps for c in self.checks)

    def extend(self, other: "RelationReport"):
        self.checks.extend(other.checks)

    def sorted(self) -> "RelationReport":
        return RelationReport(
            sorted(self.checks, key=lambda c: (c.kind, c.pair, -c.sign))
        )

    def to_json(self) -> dict:
        checks = self.sorted().checks
        return {
            "pass": self.passed,
            "total": len(checks),
            "failed": sum(1 for c in checks if not c.passed),
            "checks": [c.to_json() for c in checks],
        }


# ---------------------------------------------------------------------------
# nested bracket evaluation with suffix caching


class _NestedBrackets:
    """Right-nested brackets [x_{i,k_1}, [..., [x_{i,k_s}, x_{j,n}]]].

    Values are cached by mode suffix, so a whole output grid reuses the
    inner layers.
    """

    def __init__(self, real: Realization, i: int, j: int, sign: int):
        self.real = real
        self.i = i
        self.j = j
        self.sign = sign
        self.memo: dict = {}

    def get(self, modes: tuple):
        if len(modes) == 1:
            return self.real.theta_x(self.j, modes[0], self.sign)
        hit = self.memo.get(modes)
        if hit is None:
            inner = self.get(modes[1:])
            outer = self.real.theta_x(self.i, modes[0], self.sign)
            hit = self.memo[modes] = self.real.bracket(outer, inner)
        return hit


def _sigma_terms(poly: LPoly):
    return [(c, e) for e, c in sorted(poly.terms.items())]


# ---------------------------------------------------------------------------
# verifier


class Verifier:
    """Runs relation families against one realization."""

    def __init__(self, real: Realization):
        self.real = real
        self.gcm = real.gcm
        self.mu = real.mu
        self.n_order = real.n_order

    # -- degree-zero relations ------------------------------------------------

    def verify_cartan_relations(self, mode_bound: int) -> RelationReport:
        real = self.real
        n = self.gcm.n
        a = self.gcm.entries
        big_n = self.n_order
        eps = real.eps
        grid = f"|m|,|n|<={mode_bound}"
        report = RelationReport()
        k1 = real.theta_c()

        for i in range(n):
            chk_h = RelationCheck("H", (i,), 0, grid)
            chk_x = RelationCheck("Xperiod", (i,), 0, grid)
            mi = self.mu.perm[i]
            for m in range(-mode_bound, mode_bound + 1):
                phase = cyc_root(big_n, m)
                lhs = real.theta_h(mi, m)
                rhs = vec_scale(real.theta_h(i, m), phase)
                chk_h.checked += 1
                if not _diff_zero(lhs, rhs):
                    chk_h.record_failure((m,), _diff(lhs, rhs))
                for sign in (+1, -1):
                    lhs2 = real.theta_x(mi, m, sign)
                    rhs2 = vec_scale(real.theta_x(i, m, sign), phase)
                    chk_x.checked += 1
                    if not _diff_zero(lhs2, rhs2):
                        chk_x.record_failure((m, sign), _diff(lhs2, rhs2))
                    xc = real.bracket(real.theta_x(i, m, sign), k1)
                    if not vec_is_zero(xc):
                        chk_x.record_failure((m, sign, "c"), xc)
                if not vec_is_zero(real.bracket(real.theta_h(i, m), k1)):
                    chk_h.record_failure((m, "c"), real.bracket(real.theta_h(i, m), k1))
            report.checks.append(chk_h)
            report.checks.append(chk_x)

        for i in range(n):
            for j in range(n):
                chk_hh = RelationCheck("H", (i, j), 0, grid)
                chk_hx_p = RelationCheck("HXplus", (i, j), +1, grid)
                chk_hx_m = RelationCheck("HXminus", (i, j), -1, grid)
                chk_xx = RelationCheck("XX", (i, j), 0, grid)
                for m in range(-mode_bound, mode_bound + 1):
                    hm = real.theta_h(i, m)
                    for nn in range(-mode_bound, mode_bound + 1):
                        got = real.bracket(hm, real.theta_h(j, nn))
                        want = {}
                        if m + nn == 0:
                            c = CycNum.zero(big_n)
                            for k in range(big_n):
                                c = c + cyc_root(big_n, k * m).mul_rational(
                                    Fraction(m * big_n * a[i][self.mu.apply(j, k)])
                                    / eps[j]
                                )
                            want = vec_scale(k1, c)
                        chk_hh.checked += 1
                        if not _diff_zero(got, want):
                            chk_hh.record_failure((m, nn), _diff(got, want))

                        for sign, chk in ((+1, chk_hx_p), (-1, chk_hx_m)):
                            got2 = real.bracket(hm, real.theta_x(j, nn, sign))
                            c2 = CycNum.zero(big_n)
                            for k in range(big_n):
                                c2 = c2 + cyc_root(big_n, k * m).mul_rational(
                                    Fraction(sign * a[i][self.mu.apply(j, k)])
                                )
                            want2 = vec_scale(real.theta_x(j, m + nn, sign), c2)
                            chk.checked += 1
                            if not _diff_zero(got2, want2):
                                chk.record_failure((m, nn), _diff(got2, want2))

                        got3 = real.bracket(
                            real.theta_x(i, m, +1), real.theta_x(j, nn, -1)
                        )
                        want3 = {}
                        for k in range(big_n):
                            if self.mu.apply(j, k) != i:
                                continue
                            phase = cyc_root(big_n, k * m)
                            vec_add(want3, real.theta_h(j, m + nn), phase)
                            if m + nn == 0:
                                vec_add(
                                    want3,
                                    k1,
                                    phase.mul_rational(Fraction(m * big_n) / eps[j]),
                                )
                        chk_xx.checked += 1
                        if not _diff_zero(got3, want3):
                            chk_xx.record_failure((m, nn), _diff(got3, want3))
                report.checks.append(chk_hh)
                report.checks.append(chk_hx_p)
                report.checks.append(chk_hx_m)
                report.checks.append(chk_xx)
        return report

    # -- locality ----------------------------------------------------------------

    def verify_locality(self, i: int, j: int, mode_bound: int) -> RelationReport:
        from loomfold.polys import locality_poly

        real = self.real
        poly = locality_poly(self.gcm, self.mu, i, j)
        terms = _sigma_terms(poly)
        report = RelationReport()
        grid = f"|m|,|n|<={mode_bound}"
        for sign in (+1, -1):
            kind = "Xplus" if sign > 0 else "Xminus"
            chk = RelationCheck(kind, (i, j), sign, grid)
            cache = _NestedBrackets(real, i, j, sign)
            for m in range(-mode_bound, mode_bound + 1):
                for nn in range(-mode_bound, mode_bound + 1):
                    total: dict = {}
                    try:
                        for coeff, (az, aw) in terms:
                            val = cache.get((m + az, nn + aw))
                            vec_add(total, val, coeff)
                    except OutOfWindow:
                        chk.gaps.append((m, nn))
                        continue
                    chk.checked += 1
                    if total:
                        chk.record_failure((m, nn), total)
            report.checks.append(chk)
        return report

    def verify_locality_all(self, mode_bound: int) -> RelationReport:
        report = RelationReport()
        for i in range(self.gcm.n):
            for j in range(self.gcm.n):
                report.extend(self.verify_locality(i, j, mode_bound))
        return report

    # -- weighted nested relations ---------------------------------------------------

    def _verify_weighted(
        self,
        kind: str,
        i: int,
        j: int,
        sigma_polys: dict,
        mode_bound: int,
        arity: int,
    ) -> RelationReport:
        real = self.real
        report = RelationReport()
        prepared = []
        for sigma, poly in sorted(sigma_polys.items()):
            if poly.is_zero():
                continue
            prepared.append((sigma, _sigma_terms(poly)))
        grid = f"modes in [-{mode_bound},{mode_bound}]^{arity + 1}"
        for sign in (+1, -1):
            chk = RelationCheck(kind + ("plus" if sign > 0 else "minus"), (i, j), sign, grid)
            cache = _NestedBrackets(real, i, j, sign)
            for out_modes in itertools.product(
                range(-mode_bound, mode_bound + 1), repeat=arity + 1
            ):
                total: dict = {}
                try:
                    for sigma, terms in prepared:
                        for coeff, exps in terms:
                            ops = tuple(
                                out_modes[sigma[p]] + exps[sigma[p]]
                                for p in range(arity)
                            )
                            wmode = out_modes[arity] + exps[arity]
                            vec_add(total, cache.get(ops + (wmode,)), coeff)
                except OutOfWindow:
                    chk.gaps.append(out_modes)
                    continue
                chk.checked += 1
                if total:
                    chk.record_failure(out_modes, total)
            report.checks.append(chk)
        return report

    def verify_serre(self, fam: SerreFamily, i: int, j: int, mode_bound: int) -> RelationReport:
        arity = fam.arity(i, j)
        return self._verify_weighted("DS", i, j, fam.polynomials(i, j), mode_bound, arity)

    def verify_serre_all(self, fam: SerreFamily, mode_bound: int) -> RelationReport:
        report = RelationReport()
        for i, j in index_pairs(self.gcm):
            report.extend(self.verify_serre(fam, i, j, mode_bound))
        return report

    def verify_AS(self, mode_bound: int) -> RelationReport:
        """The extra relation specific to matrices of type A_1^(1)."""
        report = RelationReport()
        if self.gcm.classify().label != "A1^(1)":
            chk = RelationCheck("ASplus", (), 0, "vacuous")
            chk.checked = 1
            report.checks.append(chk)
            chk = RelationCheck("ASminus", (), 0, "vacuous")
            chk.checked = 1
            report.checks.append(chk)
            return report
        n_ord = self.n_order
        variables = ("z1", "z2", "w")
        pref = LPoly(
            variables,
            {(n_ord, 0, 0): CycNum.one(), (0, n_ord, 0): -CycNum.one()},
        )
        for i, j in index_pairs(self.gcm):
            rep = self._verify_weighted("AS", i, j, {(0, 1): pref}, mode_bound, 2)
            report.extend(rep)
        return report

    def verify_P1_at_window(self, fam: SerreFamily, mode_bound: int) -> RelationReport:
        """Window-scale certificate for an arbitrary family.

        Covers exactly the pairs the family defines; a pass certifies the
        identities on the tested mode grid only.
        """
        report = RelationReport()
        for i, j in sorted(fam.entries):
            arity = fam.arity(i, j)
            report.extend(
                self._verify_weighted("P1", i, j, fam.polynomials(i, j), mode_bound, arity)
            )
        return report

    # -- the finite-type split-form relations --------------------------------------------

    def verify_thm1_ds(self, mode_bound: int) -> RelationReport:
        """The case-split nested relations for finite matrices with a twist."""
        if self.gcm.classify().kind != "finite":
            raise ScopeViolation("the split-form relation list is for finite matrices")
        report = RelationReport()
        a = self.gcm.entries
        mu = self.mu
        n_ord = self.n_order
        for i, j in index_pairs(self.gcm):
            arity = 1 - a[i][j]
            variables = tuple(f"z{k+1}" for k in range(arity)) + ("w",)
            ident = tuple(range(arity))
            sigma_polys: dict = {}
            if mu.perm[i] == i:
                sigma_polys[ident] = LPoly.one(variables)
            elif a[i][j] == -1 and j == mu.perm[i]:
                for sigma in itertools.permutations(range(2)):
                    terms = {}
                    e1 = [0, 0, 0]
                    e1[sigma[0]] = 1
                    terms[tuple(e1)] = CycNum.one()
                    e2 = [0, 0, 0]
                    e2[sigma[1]] = 1
                    terms[tuple(e2)] = CycNum.from_rational(-2)
                    terms[(0, 0, 1)] = CycNum.from_rational(-1)
                    sigma_polys[sigma] = LPoly(variables, terms)
            elif a[i][j] == -1 and a[i][mu.perm[i]] == 0 and mu.perm[j] != j:
                sigma_polys[ident] = LPoly.one(variables)
            elif a[i][j] == -1 and a[i][mu.perm[i]] == 0 and mu.perm[j] == j:
                terms = {
                    (k, n_ord - 1 - k, 0): CycNum.one() for k in range(n_ord)
                }
                sigma_polys[ident] = LPoly(variables, terms)
            elif a[i][j] == -1 and a[i][mu.perm[i]] == -1 and j != mu.perm[i]:
                sigma_polys[ident] = LPoly(
                    variables, {(1, 0, 0): CycNum.one(), (0, 1, 0): CycNum.one()}
                )
            else:
                raise ScopeViolation(f"pair ({i},{j}) matches no split-form case")
            report.extend(
                self._verify_weighted("THM1_DS", i, j, sigma_polys, mode_bound, arity)
            )
        return report

    # -- full suites --------------------------------------------------------------

    def run_suite(self, fam: SerreFamily, mode_bound: int) -> RelationReport:
        report = self.verify_cartan_relations(mode_bound)
        report.extend(self.verify_locality_all(mode_bound))
        report.extend(self.verify_AS(mode_bound))
        report.extend(self.verify_serre_all(fam, mode_bound))
        return report


def _diff(lhs, rhs) -> dict:
    out = dict(lhs)
    vec_add(out, rhs, CycNum.from_rational(-1))
    return out


def _diff_zero(lhs, rhs) -> bool:
    return vec_is_zero(_diff(lhs, rhs))


# ---------------------------------------------------------------------------
# window sizing


def family_max_degree(fam: SerreFamily) -> int:
    """Largest per-variable degree across all family polynomials."""
    best = 0
    for sigmas in fam.entries.values():
        for poly in sigmas.values():
            for exps in poly.terms:
                m = max(exps)
                if m > best:
                    best = m
    return best


def suite_window(gcm, mu, fam: SerreFamily | None, mode_bound: int) -> tuple[int, int]:
    """A window guaranteed to hold the whole relation suite at this bound.

    t1: the worst intermediate degree of a nested bracket with all operand
    modes at mode_bound plus the polynomial shifts; t2: nesting depth, since
    every generator lives in t2-degrees {-1, 0, 1}.
    """
    from loomfold.polys import locality_poly

    deg = family_max_degree(fam) if fam is not None else 0
    arity = 1
    for i in range(gcm.n):
        for j in range(gcm.n):
            if gcm.entries[i][j] < 0:
                arity = max(arity, 1 - gcm.entries[i][j])
    loc_deg = 0
    for i in range(gcm.n):
        for j in range(gcm.n):
            loc_deg = max(loc_deg, locality_poly(gcm, mu, i, j).total_degree() or 0)
    as_deg = mu.order if gcm.classify().label == "A1^(1)" else 0
    per_slot = mode_bound + max(deg, loc_deg, as_deg)
    m1 = (arity + 1) * per_slot + 2
    m2 = arity + 3
    return m1, m2
