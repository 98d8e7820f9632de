"""Envelope functions b -> min chi + b sigma over witness sets, the cone
domains where these are bounded below, and reference tables.

All b-axis arithmetic uses Fraction; floats only appear when drawing.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

Number = Union[int, Fraction]
NEG_INF = float("-inf")

EXACT = "exact"
UPPER_ENVELOPE = "upper_envelope"
UPPER_BOUND = "upper_bound"
UNKNOWN = "unknown"
_STATUS_RANK = {EXACT: 0, UPPER_ENVELOPE: 1, UPPER_BOUND: 2, UNKNOWN: 3}


def to_fraction(x: Union[str, Number]) -> Fraction:
    return Fraction(x) if not isinstance(x, str) else Fraction(x.strip())


def fmt(x: Number) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Witness:
    chi: int
    sigma: int
    label: str = ""

    @classmethod
    def of(cls, M) -> "Witness":
        return cls(M.chi, M.sigma, str(M.expr))

    def value(self, b: Number) -> Fraction:
        return self.chi + Fraction(b) * self.sigma


@dataclass(frozen=True)
class Piece:
    """value(b) = p + q b on [lo, hi]."""

    lo: Optional[Fraction]
    hi: Optional[Fraction]
    p: Fraction
    q: Fraction
    label: str = ""
    status: str = EXACT

    def value(self, b: Number) -> Fraction:
        return self.p + self.q * Fraction(b)

    def covers(self, b: Fraction) -> bool:
        return (self.lo is None or self.lo <= b) and (self.hi is None or b <= self.hi)


@dataclass(frozen=True)
class EnvelopeFn:
    """Piecewise affine function on an interval of the b axis.

    ``lo``/``hi`` of None mean the domain is unbounded on that side; the
    closed flags say whether a finite endpoint belongs to the domain.
    Outside the domain the function is -infinity.
    """

    lo: Optional[Fraction]
    hi: Optional[Fraction]
    pieces: tuple[Piece, ...]
    lo_closed: bool = True
    hi_closed: bool = True
    exact_points: tuple[tuple[Fraction, Fraction], ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def breakpoints(self) -> tuple[Fraction, ...]:
        return tuple(pc.hi for pc in self.pieces[:-1])

    def in_domain(self, b: Number) -> bool:
        b = Fraction(b)
        if self.lo is not None and (b < self.lo or (b == self.lo and not self.lo_closed)):
            return False
        if self.hi is not None and (b > self.hi or (b == self.hi and not self.hi_closed)):
            return False
        return True

    def piece_at(self, b: Number) -> Optional[Piece]:
        b = Fraction(b)
        if not self.in_domain(b):
            return None
        # at a shared endpoint the better-known piece wins
        hits = [pc for pc in self.pieces if pc.covers(b)]
        return min(hits, key=lambda pc: _STATUS_RANK[pc.status]) if hits else None

    def evaluate(self, b: Number) -> Union[Fraction, float]:
        b = Fraction(b)
        for x, v in self.exact_points:
            if x == b:
                return v
        pc = self.piece_at(b)
        return NEG_INF if pc is None else pc.value(b)

    def status_at(self, b: Number) -> str:
        b = Fraction(b)
        if any(x == b for x, _ in self.exact_points):
            return EXACT
        pc = self.piece_at(b)
        return "minus_infinity" if pc is None else pc.status

    def restrict(self, lo: Optional[Number], hi: Optional[Number]) -> "EnvelopeFn":
        lo = None if lo is None else Fraction(lo)
        hi = None if hi is None else Fraction(hi)
        new_lo = _max_lo(self.lo, lo)
        new_hi = _min_hi(self.hi, hi)
        pieces = []
        for pc in self.pieces:
            a = _max_lo(pc.lo, new_lo)
            z = _min_hi(pc.hi, new_hi)
            if a is not None and z is not None and a > z:
                continue
            if a is not None and z is not None and a == z and (pieces or len(self.pieces) > 1):
                continue
            pieces.append(Piece(a, z, pc.p, pc.q, pc.label, pc.status))
        lo_closed = self.lo_closed if new_lo == self.lo else True
        hi_closed = self.hi_closed if new_hi == self.hi else True
        pts = tuple((x, v) for x, v in self.exact_points
                    if (new_lo is None or x >= new_lo) and (new_hi is None or x <= new_hi))
        return EnvelopeFn(new_lo, new_hi, tuple(pieces), lo_closed, hi_closed, pts, self.notes)

    def merged(self) -> tuple[Piece, ...]:
        """Pieces with equal consecutive affine parts and status joined."""
        out: list[Piece] = []
        for pc in self.pieces:
            if out and (out[-1].p, out[-1].q, out[-1].status) == (pc.p, pc.q, pc.status):
                last = out.pop()
                pc = Piece(last.lo, pc.hi, pc.p, pc.q, last.label, pc.status)
            out.append(pc)
        return tuple(out)

    def to_dict(self) -> dict:
        def end(x):
            return None if x is None else fmt(x)
        return {
            "domain": {"lo": end(self.lo), "hi": end(self.hi),
                       "lo_closed": self.lo_closed, "hi_closed": self.hi_closed},
            "pieces": [{"lo": end(pc.lo), "hi": end(pc.hi), "p": fmt(pc.p), "q": fmt(pc.q),
                        "label": pc.label, "status": pc.status} for pc in self.pieces],
            "breakpoints": [fmt(x) for x in self.breakpoints],
            "exact_points": [{"b": fmt(x), "value": fmt(v)} for x, v in self.exact_points],
            "notes": list(self.notes),
        }

    def to_text(self) -> str:
        lines = []
        for pc in self.pieces:
            lo = "-inf" if pc.lo is None else fmt(pc.lo)
            hi = "inf" if pc.hi is None else fmt(pc.hi)
            lines.append(f"[{lo}, {hi}]  {affine_str(pc.p, pc.q)}  {pc.status}  {pc.label}".rstrip())
        for x, v in self.exact_points:
            lines.append(f"b = {fmt(x)}  value {fmt(v)}  exact")
        outside = []
        if self.lo is not None:
            outside.append(f"b {'<' if self.lo_closed else '<='} {fmt(self.lo)}")
        if self.hi is not None:
            outside.append(f"b {'>' if self.hi_closed else '>='} {fmt(self.hi)}")
        if outside:
            lines.append(f"-inf for {' or '.join(outside)}")
        lines += [f"note: {n}" for n in self.notes]
        return "\n".join(lines) + "\n"


def _max_lo(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


def _min_hi(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def affine_str(p: Number, q: Number) -> str:
    p, q = Fraction(p), Fraction(q)
    if q == 0:
        return fmt(p)
    qs = "b" if q == 1 else "-b" if q == -1 else f"{fmt(q)}b"
    if p == 0:
        return qs
    return f"{fmt(p)}{'+' if q > 0 else ''}{qs}"


def upper_envelope(ws: Sequence[Witness], lo: Optional[Number] = None,
                   hi: Optional[Number] = None) -> EnvelopeFn:
    """min over witnesses of chi + b sigma on [lo, hi] (None = unbounded).

    Over a finite witness set this only bounds the true infimum from above.
    """
    if not ws:
        raise ValueError("empty witness set")
    lo = None if lo is None else Fraction(lo)
    hi = None if hi is None else Fraction(hi)
    if lo is not None and hi is not None and lo > hi:
        raise ValueError("empty interval")
    lines: dict[tuple[int, int], str] = {}
    for w in ws:
        lines.setdefault((w.chi, w.sigma), w.label)
    items = list(lines.items())

    def lowest(b):
        # lowest line at b, ties broken toward the smallest slope
        return min(items, key=lambda it: (it[0][0] + b * it[0][1], it[0][1]))

    if lo is None:
        # far left the largest slope wins; ties by smallest intercept
        cur = min(items, key=lambda it: (-it[0][1], it[0][0]))
    else:
        cur = lowest(lo)
    start = lo
    pieces = []
    while True:
        (p, q), label = cur
        nxt = None
        for (p2, q2), lab2 in items:
            if q2 >= q:
                continue
            x = Fraction(p2 - p, q - q2)
            if start is not None and x <= start:
                continue
            key = (x, q2, p2)
            if nxt is None or key < nxt[0]:
                nxt = (key, ((p2, q2), lab2))
        if nxt is None or (hi is not None and nxt[0][0] >= hi):
            pieces.append(Piece(start, hi, Fraction(p), Fraction(q), label, UPPER_ENVELOPE))
            break
        x = nxt[0][0]
        pieces.append(Piece(start, x, Fraction(p), Fraction(q), label, UPPER_ENVELOPE))
        start = x
        cur = nxt[1]
    return EnvelopeFn(lo, hi, tuple(pieces))


def concavity_check(f: EnvelopeFn) -> bool:
    pcs = f.merged()
    for a, b in zip(pcs, pcs[1:]):
        if a.hi is None or b.lo is None or a.hi != b.lo:
            return False
        if not b.q < a.q:
            return False
        if a.value(a.hi) != b.value(b.lo):
            return False
    return True


# -- cone domains and moves ----------------------------------------------------

@dataclass(frozen=True)
class HalfPlane:
    """ca * a + cb * b >= 0 (or > 0 when not closed)."""

    ca: Fraction
    cb: Fraction
    closed: bool = True
    label: str = ""

    def contains(self, a: Number, b: Number) -> bool:
        v = self.ca * Fraction(a) + self.cb * Fraction(b)
        return v >= 0 if self.closed else v > 0

    def b_bound(self, a: Number = 1) -> tuple[str, Optional[Fraction]]:
        """The constraint on b at fixed a, as (relation, value)."""
        a = Fraction(a)
        if self.cb == 0:
            return ("any" if self.contains(a, 0) else "none", None)
        v = -self.ca * a / self.cb
        if self.cb > 0:
            return (">=" if self.closed else ">", v)
        return ("<=" if self.closed else "<", v)

    def __str__(self) -> str:
        ok = ">=" if self.closed else ">"
        ca, cb = self.ca, self.cb
        if cb == 0:
            return f"{fmt(ca)}a {ok} 0"
        if ca == 0:
            return f"{fmt(cb)}b {ok} 0"
        # written as (coefficient) a >= (coefficient) b with positive a side when possible
        if ca > 0:
            rhs = -cb / ca
            return f"a {ok} {affine_str(0, rhs)}" if rhs not in (1, -1) else f"a {ok} {'b' if rhs == 1 else '-b'}"
        rhs = -ca / cb
        return f"b {ok} {affine_str(0, rhs).replace('b', 'a')}"


@dataclass(frozen=True)
class Move:
    label: str
    delta_chi: int
    delta_sigma: int
    repeatable: bool = True


BLOW_UP = Move("blow_up", 1, -1)
CP2_SUM = Move("cp2_sum", 1, 1)
K3_SUM = Move("k3_fiber_sum", 24, -16)


def unbounded_directions(moves: Iterable[Move]) -> list[HalfPlane]:
    """a chi + b sigma is unbounded below along a repeatable move exactly when
    a dchi + b dsigma < 0; each move contributes the complementary constraint."""
    out = []
    for m in moves:
        if not m.repeatable:
            continue
        out.append(HalfPlane(Fraction(m.delta_chi), Fraction(m.delta_sigma), True, m.label))
    return out


@dataclass(frozen=True)
class ConeDomain:
    constraints: tuple[HalfPlane, ...]
    notes: tuple[str, ...] = ()

    def contains(self, a: Number, b: Number) -> bool:
        return all(h.contains(a, b) for h in self.constraints)

    def check_cone(self, grid: Optional[Sequence[tuple[Fraction, Fraction]]] = None) -> bool:
        """Closed under positive scaling and addition on a sample of directions."""
        if grid is None:
            vals = [Fraction(n, d) for n in range(-4, 5) for d in (1, 2, 3)]
            grid = [(a, b) for a in vals for b in vals]
        inside = [pt for pt in grid if self.contains(*pt)]
        for a, b in inside:
            for r in (Fraction(1, 3), Fraction(2), Fraction(7, 2)):
                if not self.contains(r * a, r * b):
                    return False
        for i, (a, b) in enumerate(inside):
            for c, d in inside[i::7]:
                if not self.contains(a + c, b + d):
                    return False
        return True


def domain_from_moves(moves: Iterable[Move], notes: Sequence[str] = ()) -> ConeDomain:
    return ConeDomain(tuple(unbounded_directions(moves)), tuple(notes))


# -- registered sequences ------------------------------------------------------

SEQUENCES = ("stipsicz_nonclosed", "stipsicz_ray")


def sequence_member(name: str, k: int) -> Witness:
    if name == "stipsicz_nonclosed":
        return Witness(2 + 4 * k * k - 2 * k, -2 * k * k, f"M_{k}")
    if name == "stipsicz_ray":
        # only the asymptotic direction (10, 3) of the family is modeled
        return Witness(10 * k, 3 * k, f"ray_{k}")
    raise ValueError(f"unregistered sequence {name!r}")


def sequence_bounded(name: str, a: Number, b: Number) -> bool:
    a, b = Fraction(a), Fraction(b)
    if name == "stipsicz_nonclosed":
        return 2 * a > b or (2 * a == b and a <= 0)
    if name == "stipsicz_ray":
        return 10 * a + 3 * b >= 0
    raise ValueError(f"unregistered sequence {name!r}")


def sequence_probe(name: str, a: Number, b: Number, kmax: int = 10_000) -> bool:
    """Empirical check: False if a chi + b sigma is still strictly decreasing
    at the end of k = 1..kmax. Necessary-only evidence of unboundedness."""
    a, b = Fraction(a), Fraction(b)
    den = a.denominator * b.denominator
    ai, bi = int(a * den), int(b * den)

    def v(k):
        w = sequence_member(name, k)
        return ai * w.chi + bi * w.sigma

    values = [v(k) for k in range(1, kmax + 1)]
    tail = values[-3:]
    decreasing = all(y < x for x, y in zip(tail, tail[1:]))
    return not (decreasing and values[-1] < min(values[: kmax // 2]))


# -- reference tables --------------------------------------------------------------

TABLES = ("smooth_trivial", "symplectic_trivial", "minimal_trivial", "smooth_Z6")

F = Fraction


def known_tables(tag: str) -> EnvelopeFn:
    if tag == "smooth_trivial":
        return EnvelopeFn(F(-1), F(1), (Piece(F(-1), F(1), F(2), F(0), "S4", EXACT),),
                          notes=("minimizer S4",))
    stip = F(-10, 3)
    unknown = Piece(stip, F(-1), F(3), F(1), "CP2", UNKNOWN)
    if tag == "symplectic_trivial":
        return EnvelopeFn(stip, F(1), (unknown, Piece(F(-1), F(1), F(3), F(1), "CP2", EXACT)),
                          notes=("value unknown on [-10/3, -1), bounded above by b+3",
                                 "critical angle theta_G undetermined"))
    if tag == "minimal_trivial":
        return EnvelopeFn(stip, F(3, 2), (
            unknown,
            Piece(F(-1), F(1), F(3), F(1), "CP2", EXACT),
            Piece(F(1), F(3, 2), F(12), F(-8), "E1", EXACT)),
            notes=("value unknown on [-10/3, -1), bounded above by b+3",))
    if tag == "smooth_Z6":
        return EnvelopeFn(F(-1), F(1), (
            Piece(F(-1), F(0), F(6), F(2), "Sym2(3) reversed", UPPER_BOUND),
            Piece(F(0), F(1), F(6), F(-2), "Sym2(3)", UPPER_BOUND)),
            exact_points=((F(0), F(6)),),
            notes=("equality on both sides is open; it holds iff chi+sigma >= 4 for Z^6",))
    raise ValueError(f"unknown table {tag!r}")


# -- export ----------------------------------------------------------------------

def sample_points(lo: Number, hi: Number, samples: int) -> list[Fraction]:
    lo, hi = Fraction(lo), Fraction(hi)
    if samples < 1:
        raise ValueError("need at least one sample")
    if samples == 1:
        return [lo]
    return [lo + (hi - lo) * i / (samples - 1) for i in range(samples)]


def sample_rows(f: EnvelopeFn, points: Iterable[Fraction]) -> list[tuple[str, str, str, str]]:
    rows = []
    for b in points:
        v = f.evaluate(b)
        pc = f.piece_at(b)
        value = "-inf" if v == NEG_INF else fmt(v)
        rows.append((fmt(b), value, "" if pc is None else pc.label, f.status_at(b)))
    return rows


def to_csv(f: EnvelopeFn, points: Iterable[Fraction]) -> str:
    buf = io.StringIO()
    buf.write("# format_version=1\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["b", "value", "label", "status"])
    w.writerows(sample_rows(f, points))
    return buf.getvalue()
