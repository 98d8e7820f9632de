"""Lower and upper bounds on chi and chi+sigma over symplectic manifolds
with a given fundamental group, layered into cited reports.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .linalg import AbelianInvariants, abelian_from_orders
from .manifold import (
    ManifoldClass, atomic, cyclic_monodromy, derived_checks,
    free_group_witness, odd_rank_construct, theorem2_construct, z3_trace,
)
from .presentation import Presentation, Word, abelianize, commutator

CHI = "chi"
CHI_SIGMA = "chi+sigma"
TARGETS = (CHI, CHI_SIGMA)


class UnrecognizedFamily(ValueError):
    pass


# -- closed-form bounds ------------------------------------------------------

def hopf_lower(b1: int, b2: int) -> int:
    return 2 - 2 * b1 + b2


def chi_sigma_lower(b1: int) -> int:
    """Lower bound on chi+sigma from b+ >= 1 and the parity of 1 - b1 + b+."""
    return 4 - 2 * b1 if b1 % 2 == 0 else 6 - 2 * b1


def symplectic_chi_lower(b1: int) -> int:
    """chi = 2 - 2 b1 + b+ + b- with b+ >= 1, and b+ even when b1 is odd."""
    return 2 - 2 * b1 + (1 if b1 % 2 == 0 else 2)


def thm1_upper(g: int, r: int) -> tuple[int, int]:
    return 12 * (g + r + 1), -8 * (g + r + 1)


def gompf_upper(r: int, edges: int, spin: bool = False) -> tuple[int, int]:
    """Fiber sum bound from a geometric surface presentation whose curves
    form a graph with ``edges`` edges."""
    m = r + 2 * edges + 1
    return (24 * m, -16 * m) if spin else (12 * m, -8 * m)


def corvague_upper(k: int, l: int, g: int, r: int, hypothetical: bool = False) -> int:
    """chi upper bound k + l(g+r) from summands E (chi = k) and K (chi = l).

    No E with chi < 12 or K with chi < 12 is known, and E must have chi >= 6;
    smaller values are refused unless ``hypothetical`` is set.
    """
    if not hypothetical and (l < 12 or k < 6):
        raise ValueError(f"no summands known with chi(E)={k}, chi(K)={l}; pass hypothetical=True")
    return k + l * (g + r)


_FREE_ABELIAN_SPECIAL = {0: 3, 1: 2, 3: 3, 5: 7}


def free_abelian_chi_lower(n: int) -> int:
    if n < 0:
        raise ValueError("rank must be non-negative")
    if n in _FREE_ABELIAN_SPECIAL:
        return _FREE_ABELIAN_SPECIAL[n]
    base = 2 - 2 * n + math.comb(n, 2)
    return base if n % 8 in (1, 4) else base + 1


def free_abelian_chi_sigma_lower(n: int) -> int:
    # chi+sigma >= 0 from finite covers; Z^3 and Z^5 carry metabolizers
    special = {0: 4, 1: 4, 3: 4, 5: 8}
    return special.get(n, max(0, chi_sigma_lower(n)))


# -- reports ---------------------------------------------------------------

@dataclass(frozen=True)
class Contribution:
    name: str
    kind: str  # "lower" or "upper"
    value: int
    citation: str
    witness: Optional[ManifoldClass] = None
    conjectural: bool = False

    def to_dict(self) -> dict:
        d = {"name": self.name, "kind": self.kind, "value": self.value,
             "citation": self.citation, "conjectural": self.conjectural}
        d["witness"] = None if self.witness is None else {
            "name": str(self.witness.expr), "chi": self.witness.chi,
            "sigma": self.witness.sigma, "pi1": str(self.witness.pi1)}
        return d


@dataclass(frozen=True)
class BoundReport:
    target: str
    group: str
    contributions: tuple[Contribution, ...]
    congruence: Optional[tuple[int, int]] = None
    caveats: tuple[str, ...] = ()

    def __post_init__(self):
        if self.target not in TARGETS:
            raise ValueError(f"unknown target {self.target!r}")
        lo, hi = self.lower, self.upper
        if lo is not None and hi is not None and lo > hi:
            raise AssertionError(f"inconsistent bounds {lo} > {hi} for {self.group}")

    @property
    def lower(self) -> Optional[int]:
        vals = [c.value for c in self.contributions if c.kind == "lower"]
        return max(vals) if vals else None

    @property
    def upper(self) -> Optional[int]:
        vals = [c.value for c in self.contributions if c.kind == "upper"]
        return min(vals) if vals else None

    @property
    def exact(self) -> bool:
        return self.lower is not None and self.lower == self.upper

    def witnesses(self) -> list[ManifoldClass]:
        return [c.witness for c in self.contributions if c.witness is not None]

    def best_witness(self) -> Optional[ManifoldClass]:
        best = [c for c in self.contributions
                if c.kind == "upper" and c.witness is not None and c.value == self.upper]
        return best[0].witness if best else None

    def to_dict(self) -> dict:
        w = self.best_witness()
        return {
            "format_version": 1,
            "target": self.target,
            "group": self.group,
            "lower": self.lower,
            "upper": self.upper,
            "exact": self.exact,
            "congruence": None if self.congruence is None else list(self.congruence),
            "witness": None if w is None else str(w.expr),
            "contributions": [c.to_dict() for c in self.contributions],
            "caveats": list(self.caveats),
        }

    def to_text(self) -> str:
        lines = [f"group   {self.group}", f"target  {self.target}",
                 f"lower   {_fmt(self.lower)}", f"upper   {_fmt(self.upper)}",
                 f"exact   {'yes' if self.exact else 'no'}"]
        if self.congruence:
            lines.append(f"mod     {self.target} = {self.congruence[1]} mod {self.congruence[0]}")
        w = self.best_witness()
        if w is not None:
            lines.append(f"witness {w.expr}")
        lines.append("")
        rows = [(c.kind, str(c.value), c.name, c.citation,
                 "" if c.witness is None else str(c.witness.expr),
                 "conjectural" if c.conjectural else "") for c in self.contributions]
        header = ("kind", "value", "bound", "source", "witness", "")
        widths = [max(len(r[i]) for r in rows + [header]) for i in range(6)]
        for r in [header] + rows:
            lines.append("  ".join(x.ljust(w) for x, w in zip(r, widths)).rstrip())
        for c in self.caveats:
            lines.append(f"caveat: {c}")
        return "\n".join(lines) + "\n"


def _fmt(v: Optional[int]) -> str:
    return "-" if v is None else str(v)


# -- families ------------------------------------------------------------------

@dataclass(frozen=True)
class GroupFamily:
    tag: str
    n: int = 0
    orders: tuple[int, ...] = ()

    def __post_init__(self):
        if self.tag not in ("Trivial", "Free", "Cyclic", "FreeAbelian", "SurfaceGroup", "AbelianSum"):
            raise UnrecognizedFamily(f"unknown family {self.tag!r}")
        if self.n < 0:
            raise UnrecognizedFamily("family parameter must be non-negative")
        if self.tag == "Cyclic" and self.n < 2:
            raise UnrecognizedFamily("Cyclic(n) needs n >= 2")

    @property
    def b1(self) -> int:
        if self.tag == "AbelianSum":
            return self.abelian().rank
        return {"Trivial": 0, "Free": self.n, "Cyclic": 0, "FreeAbelian": self.n,
                "SurfaceGroup": 2 * self.n}[self.tag]

    @property
    def b2(self) -> Optional[int]:
        """Rational second Betti number of K(G,1)."""
        if self.tag == "AbelianSum":
            return math.comb(self.abelian().rank, 2)
        return {"Trivial": 0, "Free": 0, "Cyclic": 0, "FreeAbelian": math.comb(self.n, 2),
                "SurfaceGroup": 1}[self.tag]

    def abelian(self) -> AbelianInvariants:
        if self.tag == "AbelianSum":
            return abelian_from_orders(self.orders)
        if self.tag == "Cyclic":
            return AbelianInvariants(0, (self.n,))
        if self.tag == "Trivial":
            return AbelianInvariants(0)
        return AbelianInvariants(self.b1)

    def __str__(self) -> str:
        if self.tag == "Trivial":
            return "1"
        if self.tag == "Free":
            return "Z" if self.n == 1 else f"F_{self.n}"
        if self.tag == "Cyclic":
            return f"Z/{self.n}"
        if self.tag == "FreeAbelian":
            return str(AbelianInvariants(self.n))
        if self.tag == "SurfaceGroup":
            return f"pi1(F_{self.n})"
        return str(self.abelian())


def parse_family(spec: str) -> GroupFamily:
    """Family spec: trivial, free:n, cyclic:n, zn:n, surface:g, gpf:k,l,... (inf for Z)."""
    spec = spec.strip()
    if spec == "trivial":
        return GroupFamily("Trivial")
    head, _, arg = spec.partition(":")
    try:
        if head == "gpf":
            orders = tuple(0 if a.strip() in ("inf", "0") else int(a) for a in arg.split(","))
            if not orders or any(o < 0 for o in orders):
                raise ValueError
            return GroupFamily("AbelianSum", orders=orders)
        n = int(arg)
    except ValueError:
        raise UnrecognizedFamily(f"bad family spec {spec!r}") from None
    tags = {"free": "Free", "cyclic": "Cyclic", "zn": "FreeAbelian", "surface": "SurfaceGroup"}
    if head not in tags:
        raise UnrecognizedFamily(f"unknown family {head!r}")
    if head == "cyclic" and n in (0, 1):
        return GroupFamily("FreeAbelian", 1) if n == 0 else GroupFamily("Trivial")
    return GroupFamily(tags[head], n)


def is_family_spec(text: str) -> bool:
    t = text.strip()
    return t == "trivial" or t.split(":")[0] in ("free", "cyclic", "zn", "surface", "gpf")


def _gpf_case(ab: AbelianInvariants) -> Optional[int]:
    r, t = ab.rank, len(ab.torsion)
    if (ab.summands <= 3 and not (r == 3 and t == 0)) or (r == 2 and t == 2):
        return 1
    if (r == 1 and t <= 3) or (r == 3 and t <= 1):
        return 2
    return None


class _Builder:
    def __init__(self, target: str):
        self.target = target
        self.items: list[Contribution] = []

    def lower(self, name, value, citation, conjectural=False):
        self.items.append(Contribution(name, "lower", value, citation, None, conjectural))

    def witness(self, name, M: ManifoldClass, citation):
        value = M.chi if self.target == CHI else M.chi + M.sigma
        self.items.append(Contribution(name, "upper", value, citation, M))

    def upper(self, name, value, citation):
        self.items.append(Contribution(name, "upper", value, citation))


def family_report(F: GroupFamily, target: str = CHI, assume_bmy: bool = False) -> BoundReport:
    if target not in TARGETS:
        raise ValueError(f"unknown target {target!r}")
    B = _Builder(target)
    chi_t = target == CHI
    congruence = None
    caveats: list[str] = []
    if chi_t:
        if F.b2 is not None:
            B.lower("hopf", hopf_lower(F.b1, F.b2), "b2(M) >= b2(K(G,1))")
        B.lower("b+ parity", symplectic_chi_lower(F.b1), "b+ >= 1 and ASD parity")
    else:
        B.lower("b+ parity", chi_sigma_lower(F.b1), "chi+sigma = 2-2b1+2b+ with b+ >= 1 and ASD parity")

    if F.tag == "Trivial":
        B.witness("CP2", atomic("CP2"), "f_M(e)(1,0) = 3 via CP2")
    elif F.tag == "Free":
        n = F.n
        e = n % 2
        if chi_t:
            B.lower("free parity", 3 - 2 * n + e, "b+ >= 1, even when n is odd")
            B.lower("kotschick", math.ceil(Fraction(6, 5) * (1 - n)), "Kotschick, from 2chi+3sigma >= 0")
        else:
            B.lower("free parity", 4 - 2 * n + 2 * e, "b+ >= 1, even when n is odd")
        if n == 0:
            B.witness("CP2", atomic("CP2"), "trivial group")
        else:
            B.witness("dehn twists", free_group_witness(n), "mapping torus of Dehn twists summed with E(1)")
    elif F.tag == "Cyclic":
        n = F.n
        B.witness("monodromy", theorem2_construct(1, cyclic_monodromy(n)), "mapping torus with cyclic monodromy summed with E(1)")
        for name, (chi, sigma, order) in sorted(_complex_for(n)):
            B.witness(name, atomic("complex_surface", name), "complex surface")
    elif F.tag == "FreeAbelian":
        _free_abelian(B, F.n, chi_t, caveats)
        congruence = None if chi_t else (4, 0)
    elif F.tag == "SurfaceGroup":
        g = F.n
        B.witness("S2xF", atomic("S2xF", g), "product of S2 with the surface")
        bound = thm1_upper(2 * g, 1)
        B.upper("presentation sum", bound[0] if chi_t else bound[0] + bound[1], "12(g+r+1) fiber sum construction")
    elif F.tag == "AbelianSum":
        _abelian_sum(B, F, chi_t, caveats)
    if assume_bmy and chi_t:
        # chi - 3 sigma >= 0 with chi+sigma >= s gives 4 chi >= 3 s
        cs = family_report(F, CHI_SIGMA).lower
        if cs is not None:
            B.lower("bmy", math.ceil(Fraction(3 * cs, 4)), "BMY inequality chi >= 3 sigma (conjectural)",
                    conjectural=True)
    return BoundReport(target, str(F), tuple(B.items), congruence, tuple(caveats))


def _complex_for(n: int):
    from .manifold import COMPLEX_SURFACES
    return [(k, v) for k, v in COMPLEX_SURFACES.items() if v[2] == n]


def _free_abelian(B: _Builder, n: int, chi_t: bool, caveats: list[str]) -> None:
    if chi_t:
        B.lower("chi", free_abelian_chi_lower(n), {0: "CP2 minimizes", 1: "b+ even and positive",
                3: "Z^3 metabolizer", 5: "Z^5 metabolizer"}.get(n, "cup products on H^2(T^n), mod 8 parity"))
    else:
        B.lower("finite covers", 0, "chi and sigma multiply in finite covers")
        if n in (3, 5):
            B.lower("metabolizer", free_abelian_chi_sigma_lower(n), f"Z^{n} metabolizer")
    if n == 0:
        B.witness("CP2", atomic("CP2"), "trivial group")
    if n % 2 == 0:
        g = n // 2
        if n == 2:
            B.witness("S2xT2", atomic("S2xT2"), "product")
        B.witness("Sym2", atomic("Sym2", g), "symmetric square of a surface")
        if n == 4:
            B.witness("T4", atomic("T4"), "4-torus")
        if g % 4 == 2 and n != 4 and chi_t:
            caveats.append(f"whether Sym2({g}) minimizes chi for Z^{n} is open (gap of 1)")
    else:
        m = (n + 1) // 2
        B.witness("odd rank sum", odd_rank_construct(m), "Sym2 summed with K, whose pi1 is Z")
        if n == 1:
            B.witness("dehn twists", free_group_witness(1), "mapping torus of a Dehn twist summed with E(1)")
        if n == 3:
            B.witness("Z3", z3_trace().final, "T4 summed with K along a coordinate torus")


def _abelian_sum(B: _Builder, F: GroupFamily, chi_t: bool, caveats: list[str]) -> None:
    ab = F.abelian()
    r, t = ab.rank, len(ab.torsion)
    case = _gpf_case(ab)
    if case is not None:
        W = atomic("gompf_abelian", tuple(ab.torsion) + (0,) * r)
        B.witness(f"torus bundle case {case}", W, f"Gompf torus bundle construction, case {case}")
    if not ab.torsion:
        _free_abelian(B, r, chi_t, caveats)
        return
    if case is None:
        raise UnrecognizedFamily(f"{ab} is not covered by the abelian-sum constructions")
    if case == 1 and r == 0 and t >= 1:
        if chi_t:
            B.lower("finite abelian", 3, "b+ >= 1 with b1 = 0")
    elif case == 1 and r == 1:
        if chi_t:
            B.lower("rank one", 2, "b+ even and positive with b1 = 1")
    elif case == 1 and r == 2 and t <= 1:
        if chi_t:
            B.lower("rank two", 0, "b2(M) >= 1 with b1 = 2")
        else:
            B.lower("finite covers", 0, "chi and sigma multiply in finite covers")
            caveats.append("minimum of chi+sigma is 0 or 4")


# -- presentations -----------------------------------------------------------

def _pair_commutators(P: Presentation) -> set[frozenset]:
    found = set()
    for w in P.relators:
        s = w.syllables
        if len(s) == 4 and all(abs(e) == 1 for _, e in s):
            (a, ea), (b, eb), (c, ec), (d, ed) = s
            if a == c and b == d and a != b and ea == -ec and eb == -ed:
                found.add(frozenset((a, b)))
    return found


def recognize(P: Presentation) -> Optional[GroupFamily]:
    """Conservative syntactic family recognition; None when unsure."""
    ab = abelianize(P)
    if P.r == 0:
        return GroupFamily("Free", P.g) if P.g else GroupFamily("Trivial")
    if P.g == 1:
        if ab.is_trivial:
            return GroupFamily("Trivial")
        if ab.rank == 1:
            return GroupFamily("FreeAbelian", 1)
        return GroupFamily("Cyclic", ab.torsion[0])
    if P.g == 0:
        return GroupFamily("Trivial")
    allpairs = {frozenset((i, j)) for i in range(P.g) for j in range(i + 1, P.g)}
    comms = _pair_commutators(P)
    if comms == allpairs and len(P.relators) == len(allpairs):
        return GroupFamily("FreeAbelian", P.g)
    if P.r == 1 and P.g % 2 == 0:
        target = Word()
        for i in range(0, P.g, 2):
            target = target * commutator(Word(((i, 1),)), Word(((i + 1, 1),)))
        if P.relators[0] == target:
            if P.g == 2:
                return GroupFamily("FreeAbelian", 2)
            return GroupFamily("SurfaceGroup", P.g // 2)
    return None


def layered_report(P: Presentation, target: str = CHI, assume_bmy: bool = False) -> BoundReport:
    fam = recognize(P)
    ab = abelianize(P)
    caveats: list[str] = []
    if fam is not None:
        base = family_report(fam, target, assume_bmy)
        items = list(base.contributions)
        caveats = list(base.caveats)
        congruence = base.congruence
    else:
        items = []
        congruence = None
        caveats.append("b2 of K(G,1) unknown; using b2 >= 0")
        if target == CHI:
            items.append(Contribution("hopf", "lower", hopf_lower(ab.rank, 0), "b2(M) >= 0"))
            items.append(Contribution("b+ parity", "lower", symplectic_chi_lower(ab.rank),
                                      "b+ >= 1 and ASD parity"))
        else:
            items.append(Contribution("b+ parity", "lower", chi_sigma_lower(ab.rank), "chi+sigma = 2-2b1+2b+ with b+ >= 1 and ASD parity"))
    chi, sigma = thm1_upper(P.g, P.r)
    items.append(Contribution("presentation sum", "upper", chi if target == CHI else chi + sigma,
                              "12(g+r+1) fiber sum construction"))
    group = str(fam) if fam is not None else str(P)
    return BoundReport(target, group, tuple(items), congruence, tuple(caveats))


def witness_checks(report: BoundReport) -> list[dict]:
    return [derived_checks(w) for w in report.witnesses()]
