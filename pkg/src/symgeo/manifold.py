"""Invariant records for closed oriented 4-manifolds and the operations
that build new ones: connected sum, blow-up, and symplectic fiber sum
along square-zero tori.

A :class:`ManifoldClass` carries (chi, sigma) exactly and a symbolic
fundamental-group descriptor; b1 and b+ are derived from them. Named
constructions return a :class:`ConstructionTrace` recording every step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Iterable, Mapping, Optional, Sequence, Union

from .linalg import AbelianInvariants, IntMatrix, cokernel_invariants
from .presentation import (
    Presentation, Word, abelianize, commutator, double_index,
    parse_word, positive_rewrite,
)

TRIVIAL_COMPLEMENT = "trivial"
CYCLIC_COMPLEMENT = "infinite_cyclic_surjected_by_torus"
# complement group not recorded; such a torus can only be the killed side of a sum
UNTRACKED_COMPLEMENT = "untracked"


class ConstructionError(ValueError):
    """An operation was applied outside its preconditions."""


class InvariantViolation(RuntimeError):
    """A constructed record failed one of its own consistency checks."""


# -- fundamental group descriptors -------------------------------------------

@dataclass(frozen=True)
class Abelian:
    """Family tag for abelian groups; ``names`` label the free generators."""

    rank: int
    torsion: tuple[int, ...] = ()
    names: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.names:
            object.__setattr__(self, "names", tuple(f"e{i}" for i in range(1, self.rank + 1)))
        if len(self.names) != self.rank:
            raise ValueError("need one name per free generator")
        AbelianInvariants(self.rank, self.torsion)  # validates the torsion chain

    def abelianization(self) -> AbelianInvariants:
        return AbelianInvariants(self.rank, self.torsion)

    def as_presentation(self) -> Presentation:
        tnames = tuple(f"u{i}" for i in range(1, len(self.torsion) + 1))
        names = self.names + tnames
        rels = [commutator(Word(((i, 1),)), Word(((j, 1),)))
                for i in range(len(names)) for j in range(i + 1, len(names))]
        rels += [Word(((self.rank + k, t),)) for k, t in enumerate(self.torsion)]
        return Presentation(names, tuple(rels))

    def kill(self, images: Iterable[str]) -> "Pi1":
        images = [s.strip() for s in images if s.strip() != "1"]
        if all(s in self.names for s in images):
            keep = tuple(n for n in self.names if n not in images)
            return Abelian(len(keep), self.torsion, keep)
        return Explicit(self.as_presentation()).kill(images)

    def surface_group(self) -> Optional[bool]:
        return False

    def __str__(self) -> str:
        return str(self.abelianization())


@dataclass(frozen=True)
class Explicit:
    presentation: Presentation

    def abelianization(self) -> AbelianInvariants:
        return abelianize(self.presentation)

    def as_presentation(self) -> Presentation:
        return self.presentation

    def kill(self, images: Iterable[str]) -> "Pi1":
        P = self.presentation
        words = [parse_word(s, P.names) for s in images if s.strip() != "1"]
        return Explicit(P.with_relators(words))

    def surface_group(self) -> Optional[bool]:
        # genus >= 2 surface groups have torsion-free abelianization of even rank >= 4
        ab = self.abelianization()
        if ab.torsion or ab.rank % 2 or ab.rank < 4:
            return False
        return None

    def __str__(self) -> str:
        return str(self.presentation)


@dataclass(frozen=True)
class FreeProduct:
    factors: tuple["Pi1", ...]

    def abelianization(self) -> AbelianInvariants:
        rank = 0
        orders: list[int] = []
        for f in self.factors:
            ab = f.abelianization()
            rank += ab.rank
            orders += ab.torsion
        if not orders:
            return AbelianInvariants(rank)
        from .linalg import abelian_from_orders
        tors = abelian_from_orders(orders)
        return AbelianInvariants(rank, tors.torsion)

    def as_presentation(self) -> Presentation:
        names: list[str] = []
        rels: list[Word] = []
        for k, f in enumerate(self.factors):
            P = f.as_presentation()
            offset = len(names)
            for n in P.names:
                names.append(n if n not in names else f"{n}_{k + 1}")
            rels += [Word(tuple((g + offset, e) for g, e in w.syllables)) for w in P.relators]
        return Presentation(tuple(names), tuple(rels))

    def kill(self, images: Iterable[str]) -> "Pi1":
        return Explicit(self.as_presentation()).kill(images)

    def surface_group(self) -> Optional[bool]:
        nontrivial = [f for f in self.factors if not f.abelianization().is_trivial]
        if len(nontrivial) >= 2:
            return False
        return None

    def __str__(self) -> str:
        parts = [str(f) for f in self.factors if str(f) != "1"]
        return " * ".join(parts) if parts else "1"


Pi1 = Union[Abelian, Explicit, FreeProduct]


def free_product(a: Pi1, b: Pi1) -> Pi1:
    fa = a.factors if isinstance(a, FreeProduct) else (a,)
    fb = b.factors if isinstance(b, FreeProduct) else (b,)
    factors = tuple(f for f in fa + fb if not (isinstance(f, Abelian) and f.rank == 0 and not f.torsion))
    if not factors:
        return Abelian(0)
    if len(factors) == 1:
        return factors[0]
    return FreeProduct(factors)


# -- expressions, marks, records ---------------------------------------------

@dataclass(frozen=True)
class Expr:
    op: str
    params: tuple[tuple[str, Any], ...] = ()
    children: tuple["Expr", ...] = ()

    def to_dict(self) -> dict:
        d: dict = {"op": self.op}
        if self.params:
            d["params"] = {k: v for k, v in self.params}
        if self.children:
            d["children"] = [c.to_dict() for c in self.children]
        return d

    def __str__(self) -> str:
        if self.op == "connected_sum":
            return " # ".join(_paren(c) for c in self.children)
        if self.op == "blow_up":
            return f"{_paren(self.children[0])} # CP2bar"
        if self.op == "fiber_sum_torus":
            return f" #_{dict(self.params).get('along', 'T')} ".join(_paren(c) for c in self.children)
        if self.params:
            args = ",".join(str(v) for _, v in self.params)
            return f"{self.op}({args})"
        return self.op


def _paren(e: Expr) -> str:
    s = str(e)
    return f"({s})" if e.children else s


@dataclass(frozen=True)
class MarkedTorus:
    """A square-zero torus available for fiber sums.

    ``image`` gives the two generators of pi1(T) as words in the host's
    fundamental group ("1" for the identity).
    """

    label: str
    image: tuple[str, str] = ("1", "1")
    self_intersection: int = 0
    complement_pi1: str = TRIVIAL_COMPLEMENT
    symplectic: bool = True

    def __post_init__(self):
        if self.complement_pi1 not in (TRIVIAL_COMPLEMENT, CYCLIC_COMPLEMENT, UNTRACKED_COMPLEMENT):
            raise ValueError(f"unknown complement type {self.complement_pi1!r}")


@dataclass(frozen=True)
class ManifoldClass:
    expr: Expr
    chi: int
    sigma: int
    pi1: Pi1
    symplectic: bool = False
    spin: Optional[bool] = None
    minimal: Optional[bool] = None
    marks: tuple[MarkedTorus, ...] = ()
    notes: tuple[str, ...] = ()

    @cached_property
    def b1(self) -> int:
        return self.pi1.abelianization().rank

    @property
    def b_plus(self) -> Optional[int]:
        twice = self.chi + self.sigma - 2 + 2 * self.b1
        if twice % 2 or twice < 0:
            return None
        return twice // 2

    def mark(self, label: str) -> MarkedTorus:
        for m in self.marks:
            if m.label == label:
                return m
        raise ConstructionError(f"{self.expr} has no marked torus {label!r}")

    def to_dict(self) -> dict:
        return {
            "expr": self.expr.to_dict(),
            "name": str(self.expr),
            "chi": self.chi,
            "sigma": self.sigma,
            "b1": self.b1,
            "b_plus": self.b_plus,
            "spin": self.spin,
            "minimal": self.minimal,
            "symplectic": self.symplectic,
            "pi1": str(self.pi1),
            "notes": list(self.notes),
        }


# -- atoms -------------------------------------------------------------------

# Complex surfaces cited for small cyclic groups: (chi, sigma, order).
COMPLEX_SURFACES = {
    "catanese_z5": (10, -6, 5),
    "reid_z8": (10, -6, 8),
    "barlow_reid_z2": (11, -7, 2),
    "godeaux_z4": (11, -7, 4),
}

_FIBER = MarkedTorus("F")


def _coordinate_tori(names: Sequence[str]) -> tuple[MarkedTorus, ...]:
    return tuple(MarkedTorus(f"T_{a}{b}", (a, b), complement_pi1=UNTRACKED_COMPLEMENT)
                 for i, a in enumerate(names) for b in names[i + 1:])


def _sym2_tori(g: int) -> tuple[MarkedTorus, ...]:
    if g == 0:
        return ()
    # product of two curves from a symplectic basis; disjoint curves exist for g >= 2
    second = "a2" if g >= 2 else "b1"
    return (MarkedTorus("T_gamma", ("a1", second), complement_pi1=UNTRACKED_COMPLEMENT),)


def atomic(name: str, *params: Any) -> ManifoldClass:
    """Invariant record of a named building block.

    Tags: E1, K3, CP2, CP2bar, S2xS2, S4, T4, S2xT2, S2xF (genus), Sym2 (genus),
    dolgachev (p, q), lemma_K, complex_surface (name), gompf_abelian (orders).
    """
    def rec(chi, sigma, pi1, **kw):
        return ManifoldClass(Expr(name, tuple(zip(_PARAM_NAMES.get(name, ()), params))),
                             chi, sigma, pi1, **kw)

    def need(count):
        if len(params) != count:
            raise ConstructionError(f"{name} takes {count} parameter(s), got {len(params)}")

    if name in ("E1", "K3", "CP2", "CP2bar", "S2xS2", "S4", "T4", "S2xT2", "lemma_K"):
        need(0)
    if name == "E1":
        return rec(12, -8, Abelian(0), symplectic=True, spin=False, minimal=False, marks=(_FIBER,))
    if name == "K3":
        return rec(24, -16, Abelian(0), symplectic=True, spin=True, minimal=True, marks=(_FIBER,))
    if name == "CP2":
        return rec(3, 1, Abelian(0), symplectic=True, spin=False, minimal=True)
    if name == "CP2bar":
        return rec(3, -1, Abelian(0), symplectic=False, spin=False)
    if name == "S2xS2":
        return rec(4, 0, Abelian(0), symplectic=True, spin=True, minimal=True)
    if name == "S4":
        return rec(2, 0, Abelian(0), symplectic=False, spin=True)
    if name == "T4":
        names = ("a", "b", "c", "d")
        return rec(0, 0, Abelian(4, names=names), symplectic=True, spin=True, minimal=True,
                   marks=_coordinate_tori(names))
    if name == "S2xT2":
        return rec(0, 0, Abelian(2, names=("a", "b")), symplectic=True, spin=True, minimal=True,
                   marks=(MarkedTorus("T_ab", ("a", "b"), complement_pi1=UNTRACKED_COMPLEMENT),))
    if name == "S2xF":
        need(1)
        g = _nat(params[0], "genus")
        pres = _surface_presentation(g)
        return rec(4 - 4 * g, 0, Explicit(pres) if g >= 2 else Abelian(2 * g, names=pres.names),
                   symplectic=True, spin=True, minimal=True)
    if name == "Sym2":
        need(1)
        g = _nat(params[0], "genus")
        names = tuple(n for i in range(1, g + 1) for n in (f"a{i}", f"b{i}"))
        minimal = {0: True, 1: True, 2: False}.get(g)
        return rec(3 - 4 * g + math.comb(2 * g, 2), 1 - g, Abelian(2 * g, names=names),
                   symplectic=True, spin=False if g == 0 else None, minimal=minimal,
                   marks=_sym2_tori(g))
    if name == "dolgachev":
        need(2)
        p, q = (_nat(x, "multiplicity") for x in params)
        if p < 1 or q < 1:
            raise ConstructionError("dolgachev multiplicities must be >= 1")
        n = math.gcd(p, q)
        return rec(12, -8, Abelian(0, (n,) if n > 1 else ()), symplectic=True, spin=False)
    if name == "lemma_K":
        return rec(12, -8, Abelian(1, names=("x",)), symplectic=True,
                   marks=(MarkedTorus("T", ("x", "1"), complement_pi1=CYCLIC_COMPLEMENT),))
    if name == "complex_surface":
        need(1)
        if params[0] not in COMPLEX_SURFACES:
            raise ConstructionError(f"unknown complex surface {params[0]!r}")
        chi, sigma, order = COMPLEX_SURFACES[params[0]]
        return rec(chi, sigma, Abelian(0, (order,)), symplectic=True)
    if name == "gompf_abelian":
        need(1)
        return _gompf_abelian(tuple(params[0]), rec)
    raise ConstructionError(f"unknown atom {name!r}")


_PARAM_NAMES = {
    "S2xF": ("genus",), "Sym2": ("genus",), "dolgachev": ("p", "q"),
    "complex_surface": ("name",), "gompf_abelian": ("orders",),
}


def _nat(x: Any, what: str) -> int:
    if not isinstance(x, int) or isinstance(x, bool) or x < 0:
        raise ConstructionError(f"{what} must be a non-negative integer, got {x!r}")
    return x


def _gompf_abelian(orders: tuple[int, ...], rec) -> ManifoldClass:
    from .linalg import abelian_from_orders
    ab = abelian_from_orders(orders)
    k = len(ab.torsion)
    if (ab.summands <= 3 and not (ab.rank == 3 and k == 0)) or (ab.rank == 2 and k == 2):
        chi, chi_sigma = 12, 4
    elif (ab.rank == 1 and k <= 3) or (ab.rank == 3 and k <= 1):
        chi, chi_sigma = 24, 8
    else:
        raise ConstructionError(f"no torus-bundle construction recorded for {ab}")
    return rec(chi, chi_sigma - chi, Abelian(ab.rank, ab.torsion), symplectic=True)


def _surface_relators(pairs, names) -> tuple[Word, ...]:
    rel = Word()
    for x, y in pairs:
        rel = rel * commutator(Word(((names.index(x), 1),)), Word(((names.index(y), 1),)))
    return (rel,) if pairs else ()


def _surface_presentation(g: int) -> Presentation:
    names = tuple(n for i in range(1, g + 1) for n in (f"a{i}", f"b{i}"))
    rel = Word()
    for i in range(g):
        rel = rel * commutator(Word(((2 * i, 1),)), Word(((2 * i + 1, 1),)))
    return Presentation(names, (rel,) if g else ())


# -- operations ---------------------------------------------------------------

def _and3(a: Optional[bool], b: Optional[bool]) -> Optional[bool]:
    if a is False or b is False:
        return False
    if a is True and b is True:
        return True
    return None


def connected_sum(A: ManifoldClass, B: ManifoldClass) -> ManifoldClass:
    """Connected sum; marked tori are not carried over."""
    minimal = False if "CP2bar" in (A.expr.op, B.expr.op) else None
    return ManifoldClass(
        Expr("connected_sum", (), (A.expr, B.expr)),
        A.chi + B.chi - 2, A.sigma + B.sigma, free_product(A.pi1, B.pi1),
        symplectic=False, spin=_and3(A.spin, B.spin), minimal=minimal)


def blow_up(A: ManifoldClass) -> ManifoldClass:
    return ManifoldClass(Expr("blow_up", (), (A.expr,)), A.chi + 1, A.sigma - 1, A.pi1,
                         symplectic=A.symplectic, spin=False, minimal=False,
                         marks=A.marks, notes=A.notes)


def fiber_sum_torus(A: ManifoldClass, tA: Union[MarkedTorus, str],
                    B: ManifoldClass, tB: Union[MarkedTorus, str]) -> ManifoldClass:
    """Symplectic sum of A and B along square-zero tori.

    If B's torus has simply connected complement, the image of pi1(tA) is
    killed in pi1(A). If B's complement is infinite cyclic and surjected on
    by the torus, only the generator of tA paired with B's null direction
    is killed. chi and sigma add.
    """
    tA = A.mark(tA) if isinstance(tA, str) else tA
    tB = B.mark(tB) if isinstance(tB, str) else tB
    if tA not in A.marks or tB not in B.marks:
        raise ConstructionError("marked torus does not belong to its host")
    for host, t in ((A, tA), (B, tB)):
        if t.self_intersection != 0:
            raise ConstructionError(f"torus {t.label} has self-intersection {t.self_intersection}")
        if not t.symplectic:
            raise ConstructionError(f"torus {t.label} is not symplectic")
        if not host.symplectic:
            raise ConstructionError(f"{host.expr} is not symplectic")
    if tB.complement_pi1 == TRIVIAL_COMPLEMENT:
        killed = list(tA.image)
    elif tB.complement_pi1 == CYCLIC_COMPLEMENT:
        # B's null direction pairs with exactly one generator of tA
        null = [k for k in range(2) if tB.image[k] == "1"]
        if len(null) != 1:
            raise ConstructionError("pi1 effect not expressible for this pair of tori")
        killed = [tA.image[null[0]]]
    else:
        raise ConstructionError(
            f"torus {tB.label} has untracked complement; sum it as the first argument")
    pi1 = A.pi1.kill(killed)
    marks = tuple(m for m in A.marks if m != tA)
    if isinstance(A.pi1, Abelian) and isinstance(pi1, Abelian):
        gone = set(A.pi1.names) - set(pi1.names)
        marks = tuple(MarkedTorus(m.label, tuple("1" if s in gone else s for s in m.image),
                                  m.self_intersection, m.complement_pi1, m.symplectic)
                      for m in marks)
    marks += tuple(m for m in B.marks if m != tB and m.image == ("1", "1"))
    return ManifoldClass(
        Expr("fiber_sum_torus", (("along", tA.label),), (A.expr, B.expr)),
        A.chi + B.chi, A.sigma + B.sigma, pi1, symplectic=True,
        marks=marks, notes=A.notes + B.notes)


# -- traces -----------------------------------------------------------------

@dataclass(frozen=True)
class TraceStep:
    operation: str
    parameters: Mapping[str, Any]
    chi: Optional[int]
    sigma: Optional[int]
    pi1_effect: str

    def to_dict(self) -> dict:
        return {"operation": self.operation, "parameters": dict(self.parameters),
                "chi": self.chi, "sigma": self.sigma, "pi1_effect": self.pi1_effect}


@dataclass(frozen=True, eq=False)
class ConstructionTrace:
    steps: tuple[TraceStep, ...]
    final: ManifoldClass
    bookkeeping: Optional[Presentation] = None

    def to_dict(self) -> dict:
        d = {"format_version": 1, "steps": [s.to_dict() for s in self.steps],
             "final": self.final.to_dict()}
        if self.bookkeeping is not None:
            d["bookkeeping_abelianization"] = str(abelianize(self.bookkeeping))
        return d


def _mapping_torus_product(pairs: Sequence[tuple[str, str]],
                           monodromy: Mapping[str, str]) -> Presentation:
    """pi1 of (mapping torus of H on a closed surface) x S^1.

    ``pairs`` is a symplectic basis (x_i, y_i); ``monodromy`` maps every
    basis name to the word H_*(name). Generators t (the circle direction of
    the mapping torus) and s (the extra S^1) are appended last.
    """
    names = tuple(n for p in pairs for n in p) + ("t", "s")
    index = {n: k for k, n in enumerate(names)}
    t, s = len(names) - 2, len(names) - 1
    surface = []
    for x, y in pairs:
        surface += [(index[x], 1), (index[y], 1), (index[x], -1), (index[y], -1)]
    rels = [Word.of(*surface)] if pairs else []
    for k, n in enumerate(names[:-2]):
        image = parse_word(monodromy[n], names)
        rels.append(Word.of((t, 1), (k, 1), (t, -1), *(~image).syllables))
    for k in range(len(names) - 1):
        rels.append(Word.of((s, 1), (k, 1), (s, -1), (k, -1)))
    return Presentation(names, tuple(rels))


def theorem1_construct(P: Presentation) -> ConstructionTrace:
    """Symplectic manifold with pi1 = <P>, chi = 12(g+r+1), sigma = -8(g+r+1).

    Fiber sums g+r+1 copies of E(1) into N = (mapping torus of a finite
    order surface map) x S^1 along tori T_0, ..., T_{r+g}.
    """
    g, r = P.g, P.r
    PR = positive_rewrite(P)
    idx = double_index(PR)
    n = idx.n
    steps = [
        TraceStep("positive_rewrite",
                  {"generators": list(PR.base.names),
                   "pairing_relations": [w.render(PR.base.names) for w in PR.pairing_relations],
                   "rewritten_relations": [w.render(PR.base.names) for w in PR.rewritten_relations]},
                  None, None, "pi1 unchanged: y_i = x_i^-1 eliminates back to the input"),
        TraceStep("double_index", {"n": n, "words": str(idx)}, None, None,
                  "second indices 1..n-1 assigned left to right"),
    ]

    def xname(i, j):
        return f"X{i}_{j}"

    def yname(i, j):
        return f"Y{i}_{j}"

    pairs = [(xname(i, j), yname(i, j)) for i in range(1, g + 1) for j in range(1, n + 1)]
    mono = {}
    for i in range(1, g + 1):
        for j in range(1, n + 1):
            nxt = j % n + 1
            mono[xname(i, j)] = xname(i, nxt)
            mono[yname(i, j)] = yname(i, nxt)
    N_pres = _mapping_torus_product(pairs, mono)

    def letter(l):
        name = (xname if l.kind == "x" else yname)(l.pair, l.second)
        return name if l.exponent == 1 else f"{name}^{l.exponent}"

    marks = [MarkedTorus("T0", ("t", "s"))]
    for k, w in enumerate(idx.words, start=1):
        marks.append(MarkedTorus(f"T{k}", (" ".join(letter(l) for l in w) or "1", "s")))
    for k in range(1, g + 1):
        marks.append(MarkedTorus(f"T{r + k}", (f"{xname(k, n)} {yname(k, n)}", "s")))
    M = ManifoldClass(Expr("mapping_torus_product", (("genus", g * n), ("order", n))),
                      0, 0, Explicit(N_pres), symplectic=True, marks=tuple(marks))
    steps.append(TraceStep("base", {"surface_genus": g * n, "monodromy_order": n,
                                    "tori": [m.label for m in marks]},
                           0, 0, "pi1 = HNN(pi1 F, H_*) x Z<s>"))
    E1 = atomic("E1")
    for m in marks:
        M = fiber_sum_torus(M, m, E1, "F")
        if m.label == "T0":
            effect = "kills t and s"
        elif int(m.label[1:]) <= r:
            effect = f"kills {m.image[0]}"
        else:
            effect = f"sets {m.image[0].split()[0]} = {m.image[0].split()[1]}^-1"
        steps.append(TraceStep("fiber_sum_torus", {"along": m.label, "with": "E1"},
                               M.chi, M.sigma, effect))
    bookkeeping = M.pi1.as_presentation()
    if abelianize(bookkeeping) != abelianize(P):
        raise InvariantViolation(
            f"abelianization mismatch: {abelianize(bookkeeping)} vs {abelianize(P)}")
    final = ManifoldClass(Expr("presentation_sum", (("presentation", str(P)),), (M.expr,)),
                          M.chi, M.sigma, Explicit(P), symplectic=True)
    steps.append(TraceStep("identify_pi1", {"presentation": str(P)}, final.chi, final.sigma,
                           "quotient collapses to the input presentation"))
    return ConstructionTrace(tuple(steps), final, bookkeeping)


def _genus_one_words(matrix: Sequence[Sequence[int]]) -> dict[str, str]:
    (a, b), (c, d) = matrix
    if a * d - b * c != 1:
        raise ConstructionError(f"monodromy matrix {matrix} has determinant {a * d - b * c} != 1")

    def word(ex, ey):
        parts = [f"x1^{ex}" if ex != 1 else "x1"] if ex else []
        parts += [f"y1^{ey}" if ey != 1 else "y1"] if ey else []
        return " ".join(parts) or "1"
    # columns of the matrix are the images of x and y in H_1
    return {"x1": word(a, c), "y1": word(b, d)}


def theorem2_trace(genus: int, H_star: Union[Mapping[str, str], Sequence[Sequence[int]]]
                   ) -> ConstructionTrace:
    genus = _nat(genus, "genus")
    pairs = [(f"x{i}", f"y{i}") for i in range(1, genus + 1)]
    matrix = None
    if isinstance(H_star, Mapping):
        mono = dict(H_star)
    else:
        if genus != 1:
            raise ConstructionError("matrix monodromy data is only accepted for genus 1")
        matrix = [list(r) for r in H_star]
        mono = _genus_one_words(matrix)
    basis = [n for p in pairs for n in p]
    if set(mono) != set(basis):
        raise ConstructionError(f"monodromy must give images of exactly {basis}")
    N_pres = _mapping_torus_product(pairs, mono)
    N = ManifoldClass(Expr("mapping_torus_product", (("genus", genus),)), 0, 0,
                      Explicit(N_pres), symplectic=True, marks=(MarkedTorus("T0", ("t", "s")),))
    S = fiber_sum_torus(N, "T0", atomic("E1"), "F")
    bookkeeping = S.pi1.as_presentation()

    names = tuple(basis)
    rels = list(_surface_relators(pairs, names))
    for k, n in enumerate(names):
        rels.append(Word(((k, -1),)) * parse_word(mono[n], names))
    pres = Presentation(names, tuple(rels))
    notes: tuple[str, ...] = ()
    if matrix is not None:
        HmI = IntMatrix.from_rows([[matrix[i][j] - (i == j) for j in range(2)] for i in range(2)])
        ab = cokernel_invariants(HmI.transpose())
        if ab != abelianize(pres):
            raise InvariantViolation("cokernel of H_* - I disagrees with the abelianization")
        pi1: Pi1 = Abelian(ab.rank, ab.torsion, tuple(f"z{i}" for i in range(1, ab.rank + 1)))
    else:
        pi1 = Explicit(pres)
        if genus >= 2:
            notes = ("monodromy data is not certified to come from a surface diffeomorphism",)
    if abelianize(bookkeeping) != pi1.abelianization():
        raise InvariantViolation("bookkeeping presentation disagrees with the stated pi1")
    final = ManifoldClass(Expr("mapping_torus_sum", (("genus", genus),), (S.expr,)),
                          S.chi, S.sigma, pi1, symplectic=True, notes=notes)
    steps = (
        TraceStep("base", {"surface_genus": genus}, 0, 0, "pi1 = HNN(pi1 F, H_*) x Z<s>"),
        TraceStep("fiber_sum_torus", {"along": "T0", "with": "E1"}, S.chi, S.sigma,
                  "kills t and s"),
        TraceStep("identify_pi1", {"pi1": str(pi1)}, final.chi, final.sigma,
                  "quotient of pi1 F by x^-1 H_*(x)"),
    )
    return ConstructionTrace(steps, final, bookkeeping)


def theorem2_construct(genus: int, H_star) -> ManifoldClass:
    """chi = 12, sigma = -8, pi1 = pi1(F_genus) / << x^-1 H_*(x) >>."""
    return theorem2_trace(genus, H_star).final


def cyclic_monodromy(n: int) -> list[list[int]]:
    return [[0, 1], [-1, 2 - n]]


def dehn_twist_monodromy(genus: int) -> dict[str, str]:
    """Product of Dehn twists along y_1, ..., y_g: x_i -> x_i y_i, y_i -> y_i."""
    mono = {}
    for i in range(1, genus + 1):
        mono[f"x{i}"] = f"x{i} y{i}"
        mono[f"y{i}"] = f"y{i}"
    return mono


def free_group_witness(n: int) -> ManifoldClass:
    return theorem2_construct(n, dehn_twist_monodromy(n))


def odd_rank_trace(n: int) -> ConstructionTrace:
    """Sym^2(F_n) summed with K (pi1 = Z): pi1 = Z^(2n-1)."""
    if n < 1:
        raise ConstructionError("odd-rank construction needs n >= 1")
    S = atomic("Sym2", n)
    K = atomic("lemma_K")
    M = fiber_sum_torus(S, "T_gamma", K, "T")
    steps = (
        TraceStep("atomic", {"name": "Sym2", "genus": n}, S.chi, S.sigma, f"pi1 = {S.pi1}"),
        TraceStep("fiber_sum_torus", {"along": "T_gamma", "with": "lemma_K"}, M.chi, M.sigma,
                  f"kills {S.mark('T_gamma').image[1]}"),
    )
    return ConstructionTrace(steps, M)


def odd_rank_construct(n: int) -> ManifoldClass:
    return odd_rank_trace(n).final


def z3_trace() -> ConstructionTrace:
    """T^4 summed with K along a coordinate torus, killing one generator."""
    T4, K = atomic("T4"), atomic("lemma_K")
    M = fiber_sum_torus(T4, "T_cd", K, "T")
    steps = (
        TraceStep("atomic", {"name": "T4"}, 0, 0, "pi1 = Z^4 <a,b,c,d>"),
        TraceStep("fiber_sum_torus", {"along": "T_cd", "with": "lemma_K"}, M.chi, M.sigma,
                  "identifies x with c and s with d; kills d"),
    )
    return ConstructionTrace(steps, M)


def stipsicz_member(k: int) -> ManifoldClass:
    """M_k = 2k^2 CP2bar # (k^2 - k) S2xS2."""
    if not isinstance(k, int) or k < 1:
        raise ConstructionError("k must be a positive integer")
    parts = [atomic("CP2bar")] * (2 * k * k) + [atomic("S2xS2")] * (k * k - k)
    M = parts[0]
    for P in parts[1:]:
        M = connected_sum(M, P)
    return M


# -- checks ------------------------------------------------------------------

PASS, FAIL, UNKNOWN, NA = "pass", "fail", "unknown", "n/a"


def derived_checks(M: ManifoldClass) -> dict:
    b1, bp = M.b1, M.b_plus
    checks = {}
    twice = M.chi + M.sigma - 2 + 2 * b1
    checks["b_plus_integral"] = PASS if twice % 2 == 0 and twice >= 0 else FAIL
    if M.symplectic:
        checks["b_plus_positive"] = UNKNOWN if bp is None else (PASS if bp >= 1 else FAIL)
        checks["asd_parity"] = UNKNOWN if bp is None else (PASS if (1 - b1 + bp) % 2 == 0 else FAIL)
        checks["chi_sigma_mod4"] = PASS if (M.chi + M.sigma) % 4 == 0 else FAIL
    else:
        checks["b_plus_positive"] = checks["asd_parity"] = checks["chi_sigma_mod4"] = NA
    if M.minimal is True and M.symplectic:
        surface = M.pi1.surface_group()
        if surface is False:
            checks["minimal_K2_nonnegative"] = PASS if 2 * M.chi + 3 * M.sigma >= 0 else FAIL
        else:
            checks["minimal_K2_nonnegative"] = UNKNOWN
    else:
        checks["minimal_K2_nonnegative"] = NA
    return {
        "name": str(M.expr),
        "chi": M.chi,
        "sigma": M.sigma,
        "chi_plus_sigma": M.chi + M.sigma,
        "K2": 2 * M.chi + 3 * M.sigma,
        "b1": b1,
        "b_plus": bp,
        "checks": checks,
        "ok": FAIL not in checks.values(),
    }
