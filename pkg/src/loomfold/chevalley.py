"""Finite-dimensional simple Lie algebras with exact structure constants.

Simply-laced types get the standard lattice construction: root vectors with
signs from a bimultiplicative asymmetry cocycle on the root lattice.  The
non-simply-laced types are built as fixed subalgebras of a simply-laced
source under a diagram automorphism, which keeps a single sign mechanism
for everything.  The builder asserts antisymmetry, the Jacobi identity and
invariance of the form on all basis triples before returning.

Elements are sparse dicts {basis index: Fraction}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from loomfold.cartan import _RootTable, _graph_iso, finite_matrix
from loomfold.errors import GeneratorAssertionFailed, InconsistentPropagation, UnknownType

Vec = dict[int, Fraction]

_FOLD_SOURCE = {
    # target letter -> (source constructor, permutation builder)
    "B": lambda rank: ("D", rank + 1),
    "C": lambda rank: ("A", 2 * rank - 1),
    "F": lambda rank: ("E", 6),
    "G": lambda rank: ("D", 4),
}


@dataclass
class FiniteAlg:
    """Chevalley-type basis with bracket and invariant-form tables."""

    label: str
    matrix: tuple  # Cartan matrix
    rank: int
    basis: list  # keys ("h", i) | ("x", coords)
    index: dict  # key -> int
    root_of: list  # per basis element: root coords tuple (zeros for Cartan)
    brackets: dict  # (i, j) -> Vec
    form: dict  # (i, j) -> Fraction, symmetric, sparse
    e_idx: list = field(default_factory=list)
    f_idx: list = field(default_factory=list)
    h_idx: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.basis)

    # -- element helpers ------------------------------------------------------

    def unit(self, i: int) -> Vec:
        return {i: Fraction(1)}

    def e(self, i: int) -> Vec:
        return self.unit(self.e_idx[i])

    def f(self, i: int) -> Vec:
        return self.unit(self.f_idx[i])

    def h(self, i: int) -> Vec:
        return self.unit(self.h_idx[i])

    def bracket(self, v: Vec, w: Vec) -> Vec:
        out: Vec = {}
        for i, a in v.items():
            for j, b in w.items():
                entry = self.brackets.get((i, j))
                if entry:
                    c = a * b
                    for k, s in entry.items():
                        cur = out.get(k)
                        val = c * s if cur is None else cur + c * s
                        if val:
                            out[k] = val
                        elif k in out:
                            del out[k]
        return out

    def pair(self, v: Vec, w: Vec) -> Fraction:
        total = Fraction(0)
        for i, a in v.items():
            for j, b in w.items():
                s = self.form.get((i, j))
                if s:
                    total += a * b * s
        return total

    def weight(self, idx: int) -> tuple:
        return self.root_of[idx]

    def highest_root(self) -> tuple:
        best = max(
            (coords for key, coords in zip(self.basis, self.root_of) if key[0] == "x"),
            key=lambda c: sum(c),
        )
        return best

    def x_index(self, coords) -> int:
        return self.index[("x", tuple(coords))]

    # -- structural assertions ---------------------------------------------------

    def assert_structure(self):
        """Antisymmetry, Jacobi and form invariance on all basis triples."""
        n = self.dim
        for i in range(n):
            for j in range(i, n):
                vij = self.brackets.get((i, j), {})
                vji = self.brackets.get((j, i), {})
                keys = set(vij) | set(vji)
                for k in keys:
                    if vij.get(k, Fraction(0)) != -vji.get(k, Fraction(0)):
                        raise GeneratorAssertionFailed(
                            f"{self.label}: bracket not antisymmetric at ({i},{j})"
                        )
        unit = self.unit
        for i in range(n):
            for j in range(i + 1, n):
                bij = self.brackets.get((i, j), {})
                for k in range(j, n):
                    acc: Vec = {}
                    for term in (
                        self.bracket(bij, unit(k)),
                        self.bracket(self.brackets.get((j, k), {}), unit(i)),
                        self.bracket(self.brackets.get((k, i), {}), unit(j)),
                    ):
                        for t, c in term.items():
                            acc[t] = acc.get(t, Fraction(0)) + c
                    if any(acc.values()):
                        raise GeneratorAssertionFailed(
                            f"{self.label}: Jacobi fails at ({i},{j},{k})"
                        )
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    lhs = self.pair(self.brackets.get((i, j), {}), unit(k))
                    rhs = self.pair(unit(i), self.brackets.get((j, k), {}))
                    if lhs != rhs:
                        raise GeneratorAssertionFailed(
                            f"{self.label}: form not invariant at ({i},{j},{k})"
                        )


# ---------------------------------------------------------------------------
# Simply-laced construction


def _positive_roots(matrix) -> list:
    table = _RootTable(matrix, None)
    top = table.close_finite()
    out = []
    for h in range(1, top + 1):
        out.extend(sorted(table.by_height[h]))
    return out


def _build_simply_laced(letter: str, rank: int) -> FiniteAlg:
    matrix = finite_matrix(letter, rank)
    n = rank
    pos = _positive_roots(matrix)
    roots = pos + [tuple(-c for c in r) for r in pos]
    root_set = set(roots)

    # asymmetry cocycle on the simple-root generators
    eps_gen = [[1] * n for _ in range(n)]
    for i in range(n):
        eps_gen[i][i] = -1
        for j in range(i + 1, n):
            if matrix[i][j] != 0:
                eps_gen[i][j] = -1

    def eps(a, b) -> int:
        parity = 0
        for i in range(n):
            if not a[i]:
                continue
            for j in range(n):
                if b[j] and eps_gen[i][j] == -1:
                    parity += a[i] * b[j]
        return -1 if parity % 2 else 1

    basis = [("h", i) for i in range(n)] + [("x", r) for r in roots]
    index = {k: i for i, k in enumerate(basis)}
    root_of = [tuple([0] * n)] * n + roots

    def sgn(r) -> int:
        return 1 if sum(r) > 0 else -1

    brackets: dict = {}
    form: dict = {}

    def put(i, j, vec: Vec):
        if vec:
            brackets[(i, j)] = vec
            brackets[(j, i)] = {k: -c for k, c in vec.items()}

    for i in range(n):
        for r in roots:
            xi = index[("x", r)]
            c = Fraction(sum(r[j] * matrix[i][j] for j in range(n)))
            if c:
                put(i, xi, {xi: c})
    for a in roots:
        ia = index[("x", a)]
        for b in roots:
            ib = index[("x", b)]
            if ib < ia:
                continue
            s = tuple(x + y for x, y in zip(a, b))
            if all(x == 0 for x in s):
                coeff = sgn(a) * sgn(b) * eps(a, b)
                vec = {
                    index[("h", i)]: Fraction(coeff * a[i]) for i in range(n) if a[i]
                }
                put(ia, ib, vec)
            elif s in root_set:
                coeff = sgn(a) * sgn(b) * sgn(s) * eps(a, b)
                put(ia, ib, {index[("x", s)]: Fraction(coeff)})

    for i in range(n):
        for j in range(n):
            if matrix[i][j]:
                form[(index[("h", i)], index[("h", j)])] = Fraction(matrix[i][j])
    for r in roots:
        neg = tuple(-c for c in r)
        form[(index[("x", r)], index[("x", neg)])] = Fraction(1)

    alg = FiniteAlg(
        label=f"{letter}{rank}",
        matrix=matrix,
        rank=n,
        basis=basis,
        index=index,
        root_of=root_of,
        brackets=brackets,
        form=form,
        e_idx=[index[("x", tuple(1 if j == i else 0 for j in range(n)))] for i in range(n)],
        f_idx=[index[("x", tuple(-1 if j == i else 0 for j in range(n)))] for i in range(n)],
        h_idx=[index[("h", i)] for i in range(n)],
    )
    return alg


# ---------------------------------------------------------------------------
# Automorphism propagation


class FractionPropagator:
    """Tracks a partial linear map from (element, image) pairs.

    Vectors are sparse dicts over basis indices.  Inserting a vector that
    reduces to zero checks that its image is consistent with the span built
    so far; a contradiction raises InconsistentPropagation.
    """

    def __init__(self):
        self.rows: dict[int, tuple[Vec, Vec]] = {}

    @staticmethod
    def _axpy(target: Vec, c: Fraction, src: Vec):
        for k, v in src.items():
            cur = target.get(k, Fraction(0)) + c * v
            if cur:
                target[k] = cur
            elif k in target:
                del target[k]

    def insert(self, v: Vec, img: Vec) -> bool:
        v = dict(v)
        img = dict(img)
        while v:
            p = max(v)
            row = self.rows.get(p)
            if row is None:
                c = v[p]
                inv = 1 / c
                vn = {k: x * inv for k, x in v.items()}
                imgn = {k: x * inv for k, x in img.items()}
                self.rows[p] = (vn, imgn)
                return True
            c = v[p]
            self._axpy(v, -c, row[0])
            self._axpy(img, -c, row[1])
        if img:
            raise InconsistentPropagation(
                "two presentations of one element map to different images"
            )
        return False

    def apply(self, v: Vec) -> Vec:
        v = dict(v)
        out: Vec = {}
        while v:
            p = max(v)
            row = self.rows.get(p)
            if row is None:
                raise InconsistentPropagation("element outside the propagated span")
            c = v[p]
            self._axpy(v, -c, row[0])
            self._axpy(out, c, row[1])
        return out

    @property
    def rank(self) -> int:
        return len(self.rows)


def mu_extend_finite(alg: FiniteAlg, perm) -> list[Vec]:
    """Extend a diagram automorphism from the generators to the whole algebra.

    Returns the images of the basis vectors, computed by propagating
    generator images along bracket words and checking linear consistency
    whenever an element is reached twice.
    """
    perm = tuple(perm)
    prop = FractionPropagator()
    seeds = []
    for i in range(alg.rank):
        seeds.append((alg.e(i), alg.e(perm[i])))
        seeds.append((alg.f(i), alg.f(perm[i])))
        seeds.append((alg.h(i), alg.h(perm[i])))
    atoms = []
    for v, img in seeds:
        if prop.insert(v, img):
            atoms.append((v, img))
    frontier = list(atoms)
    while frontier and prop.rank < alg.dim:
        new = []
        for av, aimg in frontier:
            for sv, simg in seeds:
                bv = alg.bracket(sv, av)
                if not bv:
                    continue
                bimg = alg.bracket(simg, aimg)
                if prop.insert(bv, bimg):
                    new.append((bv, bimg))
        frontier = new
    if prop.rank != alg.dim:
        raise InconsistentPropagation(
            f"{alg.label}: generator words span only {prop.rank} of {alg.dim}"
        )
    return [prop.apply(alg.unit(i)) for i in range(alg.dim)]


def apply_linear(images: list[Vec], v: Vec) -> Vec:
    out: Vec = {}
    for i, c in v.items():
        FractionPropagator._axpy(out, c, images[i])
    return out


# ---------------------------------------------------------------------------
# Folding construction


def fold_source(letter: str, rank: int):
    """Source simply-laced label and folding permutation for B, C, F, G."""
    if letter == "B":
        src_letter, src_rank = "D", rank + 1
        perm = list(range(src_rank))
        perm[src_rank - 2], perm[src_rank - 1] = perm[src_rank - 1], perm[src_rank - 2]
    elif letter == "C":
        src_letter, src_rank = "A", 2 * rank - 1
        perm = [src_rank - 1 - i for i in range(src_rank)]
    elif letter == "F":
        src_letter, src_rank = "E", 6
        perm = [4, 3, 2, 1, 0, 5]
    elif letter == "G":
        src_letter, src_rank = "D", 4
        perm = [2, 1, 3, 0]
    else:
        raise UnknownType(f"no folding source for {letter}{rank}")
    return src_letter, src_rank, tuple(perm)


def _orbits_of_perm(perm) -> list:
    seen = [False] * len(perm)
    orbits = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        orbit = []
        i = start
        while not seen[i]:
            seen[i] = True
            orbit.append(i)
            i = perm[i]
        orbits.append(tuple(sorted(orbit)))
    return orbits


def _build_folded(letter: str, rank: int) -> FiniteAlg:
    src_letter, src_rank, perm = fold_source(letter, rank)
    src = chevalley(f"{src_letter}{src_rank}")
    nu = mu_extend_finite(src, perm)
    node_orbits = _orbits_of_perm(perm)
    fold_matrix = tuple(
        tuple(
            sum(src.matrix[q][orb2[0]] for q in orb1) for orb2 in node_orbits
        )
        for orb1 in node_orbits
    )
    target = finite_matrix(letter, rank)
    iso = _graph_iso(fold_matrix, target)
    if iso is None:
        raise GeneratorAssertionFailed(f"folded matrix of {letter}{rank} does not match")
    orbit_for_node = [None] * rank
    for orb_idx, node in enumerate(iso):
        orbit_for_node[node] = node_orbits[orb_idx]

    n = rank
    # root-vector orbits of the source under nu
    root_orbit_reps = []
    seen = set()
    for key, coords in zip(src.basis, src.root_of):
        if key[0] != "x" or coords in seen:
            continue
        orbit = [coords]
        seen.add(coords)
        vec = src.unit(src.index[key])
        img = apply_linear(nu, vec)
        while True:
            (idx, c), = img.items() if len(img) == 1 else [(None, None)]
            assert idx is not None, "diagram automorphism must permute root vectors"
            nxt = src.root_of[idx]
            if nxt == coords:
                break
            seen.add(nxt)
            orbit.append(nxt)
            img = apply_linear(nu, {idx: Fraction(1)})
        root_orbit_reps.append((coords, len(orbit)))

    # fixed vectors: sums over nu-orbits of root vectors
    fixed_vectors = []
    for coords, m in root_orbit_reps:
        v = src.unit(src.x_index(coords))
        total = dict(v)
        cur = v
        for _ in range(m - 1):
            cur = apply_linear(nu, cur)
            for k, c in cur.items():
                total[k] = total.get(k, Fraction(0)) + c
        total = {k: c for k, c in total.items() if c}
        if apply_linear(nu, total) != total:
            raise GeneratorAssertionFailed(
                f"orbit sum at {coords} is not fixed; fold of {letter}{rank} broken"
            )
        fixed_vectors.append((coords, total))

    cartan_vectors = []
    for t in range(n):
        vec: Vec = {}
        for p in orbit_for_node[t]:
            vec[src.h_idx[p]] = Fraction(1)
        cartan_vectors.append(vec)

    # folded root coordinates: solve lambda = A_target . c per fixed vector
    inv = _invert_fraction_matrix([[Fraction(x) for x in row] for row in target])
    folded_keys = []
    folded_vecs = []
    for coords, vec in fixed_vectors:
        lam = []
        for t in range(n):
            br = src.bracket(cartan_vectors[t], vec)
            ratio = _proportionality(br, vec)
            lam.append(ratio)
        c = [sum(inv[r][t] * lam[t] for t in range(n)) for r in range(n)]
        assert all(x.denominator == 1 for x in c)
        folded_keys.append(("x", tuple(int(x) for x in c)))
        folded_vecs.append(vec)

    basis = [("h", t) for t in range(n)] + folded_keys
    vectors = cartan_vectors + folded_vecs
    index = {k: i for i, k in enumerate(basis)}
    root_of = [tuple([0] * n)] * n + [k[1] for k in folded_keys]

    expected_dim = n + len(_positive_roots(target)) * 2
    if len(basis) != expected_dim:
        raise GeneratorAssertionFailed(
            f"fixed subalgebra of {src.label} has dimension {len(basis)}, "
            f"expected {expected_dim} for {letter}{rank}"
        )

    # express arbitrary fixed source elements in the folded basis
    expander = FractionPropagator()
    for i, vec in enumerate(vectors):
        expander.insert(dict(vec), {i: Fraction(1)})

    brackets: dict = {}
    for i, vi in enumerate(vectors):
        for j, vj in enumerate(vectors):
            if j < i:
                continue
            br = src.bracket(vi, vj)
            out = expander.apply(br) if br else {}
            if out:
                brackets[(i, j)] = out
                brackets[(j, i)] = {k: -c for k, c in out.items()}
    form: dict = {}
    for i, vi in enumerate(vectors):
        for j, vj in enumerate(vectors):
            val = src.pair(vi, vj)
            if val:
                form[(i, j)] = val

    alg = FiniteAlg(
        label=f"{letter}{rank}",
        matrix=target,
        rank=n,
        basis=basis,
        index=index,
        root_of=root_of,
        brackets=brackets,
        form=form,
        e_idx=[index[("x", tuple(1 if j == i else 0 for j in range(n)))] for i in range(n)],
        f_idx=[index[("x", tuple(-1 if j == i else 0 for j in range(n)))] for i in range(n)],
        h_idx=[index[("h", t)] for t in range(n)],
    )
    return alg


def _proportionality(v: Vec, w: Vec) -> Fraction:
    """v = c * w with w != 0; returns c (0 for v = 0)."""
    if not v:
        return Fraction(0)
    k = next(iter(w))
    c = v.get(k, Fraction(0)) / w[k]
    assert all(v.get(t, Fraction(0)) == c * x for t, x in w.items())
    assert len(v) == len([x for x in w.values() if x])
    return c


def _invert_fraction_matrix(m):
    n = len(m)
    aug = [row[:] + [Fraction(1 if i == j else 0) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


# ---------------------------------------------------------------------------
# Entry point


@lru_cache(maxsize=None)
def chevalley(label: str, verify: bool = True) -> FiniteAlg:
    """Build (and cache) the finite algebra for a label like 'A2' or 'G2'."""
    letter = label[0]
    try:
        rank = int(label[1:])
    except ValueError as exc:
        raise UnknownType(f"bad finite type label {label!r}") from exc
    if letter in ("A", "D", "E"):
        finite_matrix(letter, rank)  # raises UnknownType for bad ranks
        alg = _build_simply_laced(letter, rank)
    elif letter in ("B", "C", "F", "G"):
        finite_matrix(letter, rank)
        alg = _build_folded(letter, rank)
    else:
        raise UnknownType(f"no finite type {label!r}")
    if verify:
        alg.assert_structure()
    return alg
