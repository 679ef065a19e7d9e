"""Combinatorics of coloured objects, braid words and Morse-word tangles.

Conventions, fixed once for the whole package:

* A coloured object is a sequence of signed colours c(1..n), entry +j meaning
  an upward-oriented strand of colour j at that boundary position, -j a
  downward one.  Every colour 1..mu must appear (up to sign) somewhere in a
  document that uses mu colours.
* Braid generators are 1-based: letter k > 0 is sigma_k (the strand entering
  at position k crosses OVER the strand at k+1), k < 0 its inverse.
* Tangles are Morse words read bottom to top.  ``compose(a, b)`` stacks b on
  top of a.
* A cup at position i inserts two new boundary points i, i+1; ``up=True``
  means the left end is the upward-oriented one.  A cap at position i joins
  the strands at i, i+1, which must carry the same colour and opposite
  orientations.

All values are immutable after construction.
"""

from __future__ import annotations

import cmath
import json
from dataclasses import dataclass, field

from .errors import ColourMismatch, NotAnEndomorphism, OmegaOnForbiddenLocus

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class ColouredObject:
    """An object of the coloured tangle category: signed colours at n points."""

    entries: tuple[int, ...]
    mu: int

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))
        if self.mu < 1:
            raise ValueError("mu must be a positive integer")
        for e in self.entries:
            if e == 0 or abs(e) > self.mu:
                raise ValueError(f"entry {e} outside colour range 1..{self.mu}")

    @property
    def n(self) -> int:
        return len(self.entries)

    def colours_used(self) -> set[int]:
        return {abs(e) for e in self.entries}

    def check_colours_cover(self):
        """Enforce that every colour 1..mu appears somewhere in this object."""
        missing = set(range(1, self.mu + 1)) - self.colours_used()
        if missing:
            raise ValueError(f"colours {sorted(missing)} never used (mu={self.mu})")


def exponent_sums(c: ColouredObject) -> tuple[int, ...]:
    """Signed strand counts i_j = sum of sgn(c(k)) over entries with |c(k)| = j."""
    sums = [0] * c.mu
    for e in c.entries:
        sums[abs(e) - 1] += 1 if e > 0 else -1
    return tuple(sums)


def check_omega(omega, mu: int, tol: float = DEFAULT_TOL) -> tuple[complex, ...]:
    """Validate a point of the torus (S^1 minus 1)^mu and return it as a tuple.

    Raises OmegaOnForbiddenLocus if any coordinate is 1 within tol, and
    ValueError if a coordinate is off the unit circle.
    """
    om = tuple(complex(w) for w in omega)
    if len(om) != mu:
        raise ValueError(f"omega has {len(om)} coordinates, expected mu={mu}")
    for w in om:
        if abs(abs(w) - 1.0) > 1e-6:
            raise ValueError(f"omega coordinate {w} is not on the unit circle")
        if abs(w - 1.0) <= tol:
            raise OmegaOnForbiddenLocus(f"omega coordinate {w} equals 1 within {tol}")
    return om


def admissibility(c: ColouredObject, omega, tol: float = DEFAULT_TOL) -> complex:
    """The product of omega_j^{i_j}; Theorem-level equalities need it != 1."""
    om = check_omega(omega, c.mu, tol)
    out = 1.0 + 0.0j
    for w, i in zip(om, exponent_sums(c)):
        out *= w ** i
    return out


def is_admissible(c: ColouredObject, omega, tol: float = DEFAULT_TOL) -> bool:
    return abs(admissibility(c, omega, tol) - 1.0) > tol


def omega_from_turns(turns) -> tuple[complex, ...]:
    """Angles as fractions of a full turn -> points on the unit circle."""
    return tuple(cmath.exp(2j * cmath.pi * float(t)) for t in turns)


# ---------------------------------------------------------------------------
# Braids
# ---------------------------------------------------------------------------

def _apply_word_to_colours(entries: tuple[int, ...], word) -> tuple[int, ...]:
    out = list(entries)
    for k in word:
        i = abs(k) - 1
        if i < 0 or i + 1 >= len(out):
            raise ValueError(f"generator {k} out of range for {len(out)} strands")
        out[i], out[i + 1] = out[i + 1], out[i]
    return tuple(out)


@dataclass(frozen=True)
class ColouredBraid:
    """A braid word on a coloured object; target colouring is derived."""

    source: ColouredObject
    word: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "word", tuple(int(k) for k in self.word))
        for k in self.word:
            if k == 0 or abs(k) > self.source.n - 1:
                raise ValueError(f"letter {k} invalid for n={self.source.n}")

    @property
    def n(self) -> int:
        return self.source.n

    @property
    def target(self) -> ColouredObject:
        return ColouredObject(_apply_word_to_colours(self.source.entries, self.word),
                              self.source.mu)

    def is_endomorphism(self) -> bool:
        return self.target == self.source

    def inverse(self) -> "ColouredBraid":
        return ColouredBraid(self.target, tuple(-k for k in reversed(self.word)))

    def permutation(self) -> tuple[int, ...]:
        """pi with pi[j] = bottom position of the strand ending at top slot j (0-based)."""
        perm = list(range(self.n))
        for k in self.word:
            i = abs(k) - 1
            perm[i], perm[i + 1] = perm[i + 1], perm[i]
        return tuple(perm)

    def as_tangle(self) -> "TangleWord":
        return TangleWord(self.source,
                          tuple(Slice("crossing", abs(k), sign=(1 if k > 0 else -1))
                                for k in self.word))


def free_reduce(word) -> tuple[int, ...]:
    """Cancel adjacent sigma sigma^{-1} pairs in a braid word."""
    out: list[int] = []
    for k in word:
        if out and out[-1] == -k:
            out.pop()
        else:
            out.append(int(k))
    return tuple(out)


# ---------------------------------------------------------------------------
# Morse-word tangles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Slice:
    """One elementary slice of a Morse word, acting at 1-based position pos."""

    kind: str  # "crossing" | "cup" | "cap"
    pos: int
    sign: int | None = None    # crossings only
    colour: int | None = None  # cups only
    up: bool | None = None     # cups only: left end oriented upward?

    def __post_init__(self):
        if self.kind not in ("crossing", "cup", "cap"):
            raise ValueError(f"unknown slice kind {self.kind!r}")
        if self.kind == "crossing" and self.sign not in (1, -1):
            raise ValueError("crossing needs sign +1 or -1")
        if self.kind == "cup" and (self.colour is None or self.up is None):
            raise ValueError("cup needs colour and orientation")


def _cup_entries(s: Slice) -> tuple[int, int]:
    j = s.colour
    return (j, -j) if s.up else (-j, j)


@dataclass(frozen=True)
class TangleWord:
    """A coloured tangle as an ordered list of elementary slices."""

    source: ColouredObject
    slices: tuple[Slice, ...]
    _levels: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "slices", tuple(self.slices))
        object.__setattr__(self, "_levels", self._sweep())

    def _sweep(self) -> tuple[tuple[int, ...], ...]:
        """Boundary colourings before each slice and at the top; validates."""
        cur = list(self.source.entries)
        levels = [tuple(cur)]
        for s in self.slices:
            i = s.pos - 1
            if s.kind == "crossing":
                if not (0 <= i < len(cur) - 1):
                    raise ValueError(f"crossing at {s.pos} out of range ({len(cur)} strands)")
                cur[i], cur[i + 1] = cur[i + 1], cur[i]
            elif s.kind == "cup":
                if not (0 <= i <= len(cur)):
                    raise ValueError(f"cup at {s.pos} out of range ({len(cur)} strands)")
                if not (1 <= s.colour <= self.source.mu):
                    raise ValueError(f"cup colour {s.colour} outside 1..{self.source.mu}")
                cur[i:i] = _cup_entries(s)
            else:  # cap
                if not (0 <= i < len(cur) - 1):
                    raise ValueError(f"cap at {s.pos} out of range ({len(cur)} strands)")
                a, b = cur[i], cur[i + 1]
                if a != -b:
                    raise ValueError(
                        f"cap at {s.pos} needs equal colours and opposite orientations, got {a},{b}")
                del cur[i:i + 2]
            levels.append(tuple(cur))
        return tuple(levels)

    @property
    def target(self) -> ColouredObject:
        return ColouredObject(self._levels[-1], self.source.mu)

    def levels(self) -> tuple[tuple[int, ...], ...]:
        """Colour sequences between slices: levels()[k] precedes slices[k]."""
        return self._levels

    def is_endomorphism(self) -> bool:
        return self.target == self.source

    def crossing_count(self) -> int:
        return sum(1 for s in self.slices if s.kind == "crossing")

    def as_braid(self) -> ColouredBraid:
        """Rewrite a crossings-only tangle as a braid word."""
        if any(s.kind != "crossing" for s in self.slices):
            raise ValueError("tangle contains cups or caps; not a braid")
        return ColouredBraid(self.source,
                             tuple(s.pos * s.sign for s in self.slices))

    def is_braid(self) -> bool:
        return all(s.kind == "crossing" for s in self.slices)


def identity_tangle(c: ColouredObject) -> TangleWord:
    return TangleWord(c, ())


def compose(a: TangleWord, b: TangleWord) -> TangleWord:
    """Stack b on top of a.  Boundary colourings must match exactly."""
    if a.target != b.source:
        raise ColourMismatch(
            f"target {a.target.entries} of first tangle != source {b.source.entries} of second")
    return TangleWord(a.source, a.slices + b.slices)


def reflect(t: TangleWord) -> TangleWord:
    """Mirror across a horizontal plane with all orientations reversed.

    Slices reverse order, crossings flip sign, cups and caps swap; boundary
    colourings are preserved, with source and target exchanged.
    """
    levels = t.levels()
    out: list[Slice] = []
    for s, pre in zip(reversed(t.slices), reversed(levels[:-1])):
        if s.kind == "crossing":
            out.append(Slice("crossing", s.pos, sign=-s.sign))
        elif s.kind == "cup":
            out.append(Slice("cap", s.pos))
        else:  # cap becomes a cup reintroducing the capped strands
            a = pre[s.pos - 1]
            out.append(Slice("cup", s.pos, colour=abs(a), up=(a > 0)))
    return TangleWord(t.target, tuple(out))


@dataclass(frozen=True)
class ClosureDescription:
    """Components of the closure of an endomorphism tangle.

    Each component is (colour, cycle), the cycle listing the bottom boundary
    positions (1-based) it visits; internal closed components have empty
    cycles.
    """

    components: tuple[tuple[int, tuple[int, ...]], ...]

    @property
    def count(self) -> int:
        return len(self.components)


def closure(t: TangleWord) -> ClosureDescription:
    """Join top to bottom with parallel strands and report the components."""
    if not t.is_endomorphism():
        raise NotAnEndomorphism("closure needs source == target")
    n = t.source.n

    parent: dict[int, int] = {}
    colour_of: dict[int, int] = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    def fresh(colour):
        sid = len(parent)
        parent[sid] = sid
        colour_of[sid] = colour
        return sid

    bottom = [fresh(abs(e)) for e in t.source.entries]
    cur = list(bottom)
    for s in t.slices:
        i = s.pos - 1
        if s.kind == "crossing":
            cur[i], cur[i + 1] = cur[i + 1], cur[i]
        elif s.kind == "cup":
            sid = fresh(s.colour)
            cur[i:i] = [sid, sid]
        else:
            union(cur[i], cur[i + 1])
            del cur[i:i + 2]
    for j in range(n):
        union(cur[j], bottom[j])

    by_root: dict[int, list[int]] = {}
    for sid in parent:
        by_root.setdefault(find(sid), []).append(sid)

    comps = []
    if t.is_braid():
        # report honest permutation cycles of the word
        perm = t.as_braid().permutation()
        seen = [False] * n
        for j in range(n):
            if seen[j]:
                continue
            cyc = []
            k = j
            while not seen[k]:
                seen[k] = True
                cyc.append(k + 1)
                k = perm[k]
            comps.append((abs(t.source.entries[j]), tuple(cyc)))
    else:
        for root, members in by_root.items():
            cols = {colour_of[m] for m in members}
            if len(cols) != 1:
                raise ValueError(f"component mixes colours {cols}")
            positions = tuple(sorted(j + 1 for j in range(n) if find(bottom[j]) == root))
            comps.append((cols.pop(), positions))
    comps.sort(key=lambda c: (c[1], c[0]))
    return ClosureDescription(tuple(comps))


# ---------------------------------------------------------------------------
# JSON documents
# ---------------------------------------------------------------------------

def braid_to_dict(b: ColouredBraid) -> dict:
    return {"mu": b.source.mu, "colours": list(b.source.entries), "word": list(b.word)}


def braid_from_dict(d: dict) -> ColouredBraid:
    c = ColouredObject(tuple(d["colours"]), int(d["mu"]))
    return ColouredBraid(c, tuple(d["word"]))


def tangle_to_dict(t: TangleWord) -> dict:
    slices = []
    for s in t.slices:
        entry: dict = {"kind": s.kind, "pos": s.pos}
        if s.kind == "crossing":
            entry["sign"] = s.sign
        elif s.kind == "cup":
            entry["colour"] = s.colour
            entry["up"] = s.up
        slices.append(entry)
    return {"mu": t.source.mu, "colours": list(t.source.entries), "slices": slices}


def tangle_from_dict(d: dict) -> TangleWord:
    if "word" in d and "slices" not in d:
        return braid_from_dict(d).as_tangle()
    c = ColouredObject(tuple(d["colours"]), int(d["mu"]))
    slices = []
    for s in d["slices"]:
        kind = s["kind"]
        if kind == "crossing":
            slices.append(Slice("crossing", int(s["pos"]), sign=int(s["sign"])))
        elif kind == "cup":
            slices.append(Slice("cup", int(s["pos"]), colour=int(s["colour"]),
                                up=bool(s["up"])))
        else:
            slices.append(Slice("cap", int(s["pos"])))
    return TangleWord(c, tuple(slices))


def load_tangle(path) -> TangleWord:
    with open(path) as f:
        return tangle_from_dict(json.load(f))


def load_braid(path) -> ColouredBraid:
    with open(path) as f:
        return braid_from_dict(json.load(f))
