"""Noncommutative polynomials over Z on graded generators, and free DGAs.

Words are tuples of generator ids with integer coefficients.  Quotient
structures (central Laurent variables, composable edge units, the ribbon
relations) are realized by confluent word normalizers applied after every
product, so every Poly is always in canonical form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .diagram import GradingGroup


@dataclass(frozen=True, order=True)
class GenId:
    kind: str
    data: tuple

    def __str__(self) -> str:
        k, d = self.kind, self.data
        if k == "c":
            return str(d[0])
        if k == "v":
            name = "inf" if d[0] == "@inf" else str(d[0])
            return f"{name}[{d[1]},{d[2]}]"
        if k == "e":
            return f"u[{d[0]}]"
        if k == "t":
            return f"t[{d[0]}]" + ("^-1" if d[1] < 0 else "")
        if k == "rho":
            return f"rho[{d[0]},{d[1]}]"
        if k == "eta":
            return f"eta[{d[0]}]"
        if k == "cb":
            return f"cb[{d[0]}]"
        if k == "lam":
            return f"lam[{d[0]}]"
        raise ValueError(f"unknown generator kind {k}")


def crossing_gen(cid: str) -> GenId:
    return GenId("c", (cid,))


def vertex_gen(vid: str, i: int, ell: int) -> GenId:
    return GenId("v", (vid, i, ell))


def edge_unit(eid: str) -> GenId:
    return GenId("e", (eid,))


def tvar(i, sign: int = 1) -> GenId:
    return GenId("t", (i, 1 if sign >= 0 else -1))


def rho_gen(i: int, ell: int) -> GenId:
    return GenId("rho", (i, ell))


def eta_gen(i: int) -> GenId:
    return GenId("eta", (i,))


def cbar_gen(k: int) -> GenId:
    return GenId("cb", (k,))


def lam_gen(i) -> GenId:
    return GenId("lam", (i,))


Word = Tuple[GenId, ...]
Normalizer = Callable[[Word], Optional[Word]]


def _wkey(w: Word):
    return (len(w), tuple(str(g) for g in w))


class Poly:
    """Finite Z-linear combination of words, canonically ordered."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[Word, int]] = None):
        self.terms: Dict[Word, int] = {}
        if terms:
            for w, c in terms.items():
                if c:
                    self.terms[w] = self.terms.get(w, 0) + c
            self.terms = {w: c for w, c in self.terms.items() if c}

    @staticmethod
    def zero() -> "Poly":
        return Poly()

    @staticmethod
    def unit(coeff: int = 1) -> "Poly":
        return Poly({(): coeff}) if coeff else Poly()

    @staticmethod
    def gen(g: GenId, coeff: int = 1) -> "Poly":
        return Poly({(g,): coeff}) if coeff else Poly()

    @staticmethod
    def word(gens: Sequence[GenId], coeff: int = 1) -> "Poly":
        return Poly({tuple(gens): coeff}) if coeff else Poly()

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return Poly(out)

    def __sub__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) - c
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly({w: -c for w, c in self.terms.items()})

    def scale(self, k: int) -> "Poly":
        return Poly({w: k * c for w, c in self.terms.items()}) if k else Poly()

    def mul(self, other: "Poly", normalizer: Optional[Normalizer] = None) -> "Poly":
        out: Dict[Word, int] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                if normalizer is not None:
                    w = normalizer(w)
                    if w is None:
                        continue
                out[w] = out.get(w, 0) + c1 * c2
        return Poly(out)

    def __mul__(self, other: "Poly") -> "Poly":
        return self.mul(other)

    def map_words(self, fn) -> "Poly":
        out: Dict[Word, int] = {}
        for w, c in self.terms.items():
            res = fn(w)
            if res is None:
                continue
            w2, k = res
            out[w2] = out.get(w2, 0) + c * k
        return Poly(out)

    def normalized(self, normalizer: Optional[Normalizer]) -> "Poly":
        if normalizer is None:
            return self
        out: Dict[Word, int] = {}
        for w, c in self.terms.items():
            w2 = normalizer(w)
            if w2 is None:
                continue
            out[w2] = out.get(w2, 0) + c
        return Poly(out)

    def sorted_terms(self) -> List[Tuple[Word, int]]:
        return sorted(self.terms.items(), key=lambda wc: _wkey(wc[0]))

    def __str__(self) -> str:
        return format_poly(self)

    __repr__ = __str__


def format_poly(p: Poly) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for w, c in p.sorted_terms():
        body = "*".join(str(g) for g in w)
        if not w:
            txt = str(abs(c))
        elif abs(c) == 1:
            txt = body
        else:
            txt = f"{abs(c)}*{body}"
        if not parts:
            parts.append(txt if c > 0 else f"-{txt}")
        else:
            parts.append(("+ " if c > 0 else "- ") + txt)
    return " ".join(parts)


class PolyParseError(ValueError):
    pass


def parse_poly(text: str, gen_lookup: Callable[[str, Optional[tuple]], GenId]) -> Poly:
    """Parse the polynomial grammar: terms +/- separated, factors * separated,
    each factor an integer or name[args] with optional ^-1."""
    import re

    token = re.compile(r"\s*(?:(?P<num>-?\d+)|(?P<name>[A-Za-z_@][\w@]*)"
                       r"(?:\[(?P<args>[-\d,\s]*)\])?(?P<inv>\^-1)?|(?P<op>[+\-*]))")
    pos = 0
    terms: List[Tuple[int, List[GenId]]] = []
    sign, coeff, gens, started = 1, 1, [], False

    def flush():
        nonlocal sign, coeff, gens, started
        if started:
            terms.append((sign * coeff, gens))
        sign, coeff, gens, started = 1, 1, [], False

    while pos < len(text):
        m = token.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            raise PolyParseError(f"bad token at {text[pos:pos+10]!r}")
        pos = m.end()
        if m.group("op"):
            op = m.group("op")
            if op == "*":
                continue
            flush()
            sign = -1 if op == "-" else 1
        elif m.group("num") is not None:
            coeff *= int(m.group("num"))
            started = True
        else:
            args = m.group("args")
            parsed = tuple(int(a) for a in args.split(",")) if args not in (None, "") else None
            g = gen_lookup(m.group("name"), parsed)
            if m.group("inv"):
                if g.kind != "t":
                    raise PolyParseError("only t variables can be inverted")
                g = GenId("t", (g.data[0], -1))
            gens.append(g)
            started = True
    flush()
    out = Poly()
    for c, gs in terms:
        out = out + Poly.word(gs, c)
    return out


# -- word normalizers ------------------------------------------------------

def laurent_normalizer(word: Word) -> Optional[Word]:
    """Move central t variables to a sorted prefix, cancelling inverses."""
    if not any(g.kind == "t" for g in word):
        return word
    texp: Dict[object, int] = {}
    rest: List[GenId] = []
    for g in word:
        if g.kind == "t":
            i, s = g.data
            texp[i] = texp.get(i, 0) + s
        else:
            rest.append(g)
    prefix: List[GenId] = []
    for i in sorted(texp, key=str):
        e = texp[i]
        if e:
            prefix.extend([tvar(i, 1 if e > 0 else -1)] * abs(e))
    return tuple(prefix) + tuple(rest)


class ComposableNormalizer:
    """Relations of the extended/composable algebras.

    ends[g] = (start edge, end edge) for composable generators.  Units absorb
    into adjacent composable generators (e*g = g = g*e'); with orthogonal=True
    distinct adjacent units annihilate (e*e' = 0) and non-composable products
    vanish; units are idempotent.
    """

    def __init__(self, ends: Mapping[GenId, Tuple[str, str]], orthogonal: bool):
        self.ends = ends
        self.orthogonal = orthogonal

    def __call__(self, word: Word) -> Optional[Word]:
        out: List[GenId] = []
        for g in word:
            if not out:
                out.append(g)
                continue
            prev = out[-1]
            if prev.kind == "e" and g.kind == "e":
                if prev.data[0] == g.data[0]:
                    continue  # idempotent
                if self.orthogonal:
                    return None
                out.append(g)
            elif prev.kind == "e":
                se = self.ends.get(g)
                if se is not None and se[0] == prev.data[0]:
                    out[-1] = g  # absorb unit on the left
                elif self.orthogonal and se is not None:
                    return None
                else:
                    out.append(g)
            elif g.kind == "e":
                se = self.ends.get(prev)
                if se is not None and se[1] == g.data[0]:
                    continue  # absorb unit on the right
                if self.orthogonal and se is not None:
                    return None
                out.append(g)
            else:
                if self.orthogonal:
                    e1 = self.ends.get(prev)
                    e2 = self.ends.get(g)
                    if e1 is not None and e2 is not None and e1[1] != e2[0]:
                        return None
                out.append(g)
        return tuple(out)


@dataclass
class FreeDGA:
    """A (possibly non-unital) free differential graded algebra over Z.

    degrees maps generators to R-elements; diff maps generators to Polys.
    The word normalizer realizes the relation set; None is the free case.
    """

    grading: GradingGroup
    degrees: Dict[GenId, int]
    diff: Dict[GenId, Poly]
    normalizer: Optional[Normalizer] = None
    unital: bool = True
    name: str = ""

    def gens(self) -> List[GenId]:
        return sorted(self.degrees, key=str)

    def degree(self, g: GenId) -> int:
        return self.degrees[g]

    def word_degree(self, w: Word) -> int:
        return self.grading.reduce(sum(self.degrees[g] for g in w))

    def parity(self, w: Word) -> int:
        return self.grading.parity(sum(self.degrees[g] for g in w))

    def is_homogeneous(self, p: Poly):
        degs = {self.word_degree(w) for w in p.terms}
        if len(degs) > 1:
            return None
        return degs.pop() if degs else None

    def mul(self, a: Poly, b: Poly) -> Poly:
        return a.mul(b, self.normalizer)

    def product(self, *ps: Poly) -> Poly:
        out = Poly.unit()
        for p in ps:
            out = self.mul(out, p)
        return out

    def d_word(self, w: Word) -> Poly:
        out = Poly()
        sign = 1
        for i, g in enumerate(w):
            dg = self.diff.get(g)
            if dg is None:
                raise KeyError(f"no differential defined for {g}")
            if not dg.is_zero():
                left = Poly.word(w[:i], sign)
                right = Poly.word(w[i + 1:])
                out = out + self.mul(self.mul(left, dg), right)
            sign *= -1 if self.parity((g,)) else 1
        return out

    def d(self, p: Poly) -> Poly:
        out = Poly()
        for w, c in p.terms.items():
            out = out + self.d_word(w).scale(c)
        return out

    def check_d_squared(self, gens: Optional[Iterable[GenId]] = None):
        """Return [(gen, d(d(gen)))] for the generators with d^2 != 0."""
        bad = []
        for g in (gens if gens is not None else self.gens()):
            if g not in self.diff:
                continue
            dd = self.d(self.diff[g])
            if not dd.is_zero():
                bad.append((g, dd))
        return bad

    def check_degrees(self):
        """Each monomial of d(g) must have degree |g| - 1."""
        bad = []
        for g, dp in self.diff.items():
            want = self.grading.reduce(self.degrees[g] - 1)
            for w in dp.terms:
                if self.word_degree(w) != want:
                    bad.append((g, w, self.word_degree(w), want))
        return bad


class Morphism:
    """Algebra (or anti-algebra) morphism determined on generators."""

    def __init__(self, source: FreeDGA, target: FreeDGA,
                 images: Mapping[GenId, Poly], anti: bool = False):
        self.source = source
        self.target = target
        self.images = dict(images)
        self.anti = anti

    def __call__(self, p: Poly) -> Poly:
        out = Poly()
        for w, c in p.terms.items():
            term = Poly.unit(c)
            seq = reversed(w) if self.anti else w
            for g in seq:
                img = self.images.get(g)
                if img is None:
                    raise KeyError(f"no image for generator {g}")
                term = self.target.mul(term, img)
            out = out + term
        return out

    def check_degree_preserving(self):
        bad = []
        for g, img in self.images.items():
            dg = self.source.grading.reduce(self.source.degrees[g])
            for w in img.terms:
                dw = self.target.word_degree(w)
                if dw != self.target.grading.reduce(dg):
                    bad.append((g, w, dw, dg))
        return bad

    def chain_map_failures(self, gens: Optional[Iterable[GenId]] = None):
        """Generators where phi(d g) != d'(phi g) (with the anti twist for
        anti-morphisms: phi(d g) = (-1)^(|g|-1) d'(phi g) is NOT used; the
        mirror satisfies d' o phi = phi o d on the nose)."""
        bad = []
        for g in (gens if gens is not None else self.images):
            if g not in self.source.diff:
                continue
            lhs = self(self.source.diff[g])
            rhs = self.target.d(self(Poly.gen(g)))
            if lhs != rhs:
                bad.append((g, lhs, rhs))
        return bad


def substitute(dga: FreeDGA, images: Mapping[GenId, Poly],
               target: Optional[FreeDGA] = None, anti: bool = False) -> Morphism:
    """Build the induced algebra map; degree preservation is verified."""
    tgt = target if target is not None else dga
    phi = Morphism(dga, tgt, images, anti=anti)
    bad = phi.check_degree_preserving()
    if bad:
        g, w, dw, dg = bad[0]
        raise ValueError(f"substitution not degree-preserving at {g}: "
                         f"word {w} has degree {dw}, expected {dg}")
    return phi
