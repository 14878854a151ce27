"""Points, terms, DNFs, factored DNFs, subcubes and exact relative distance.

A point of {0,1}^n is a Python int: bit ``i - 1`` holds coordinate ``x_i``.
Truth tables are numpy bool arrays indexed by that integer, so entry 0 is the
all-zero point.  Literals are signed ints: ``+i`` is ``x_i`` and ``-i`` is its
negation.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Union

import numpy as np

from .errors import DimensionTooLarge, EmptySupport

ENUM_CAP = 20

LiteralSet = frozenset


def check_dim(n: int, cap: int = ENUM_CAP) -> None:
    if n < 0:
        raise ValueError(f"dimension must be nonnegative, got {n}")
    if n > cap:
        raise DimensionTooLarge(f"n={n} exceeds enumeration cap {cap}")


@functools.lru_cache(maxsize=32)
def all_points(n: int) -> np.ndarray:
    check_dim(n)
    pts = np.arange(1 << n, dtype=np.int64)
    pts.flags.writeable = False
    return pts


def popcount(x: int) -> int:
    return x.bit_count()


def full_mask(n: int) -> int:
    return (1 << n) - 1


def coords_of(mask: int) -> list[int]:
    """1-based coordinates set in ``mask``."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_of(coords: Iterable[int]) -> int:
    m = 0
    for c in coords:
        if c < 1:
            raise ValueError(f"coordinates are 1-based, got {c}")
        m |= 1 << (c - 1)
    return m


def parse_point(bits: str) -> int:
    """``"100"`` is the point with x_1 = 1, x_2 = x_3 = 0."""
    x = 0
    for i, ch in enumerate(bits):
        if ch == "1":
            x |= 1 << i
        elif ch != "0":
            raise ValueError(f"bad bit {ch!r} in {bits!r}")
    return x


def format_point(x: int, n: int) -> str:
    return "".join("1" if (x >> i) & 1 else "0" for i in range(n))


def _lit_key(lit: int) -> tuple[int, int]:
    # negated sorts before positive on the same variable
    return (abs(lit), 1 if lit > 0 else 0)


@dataclass(frozen=True)
class Term:
    """A conjunction of literals, kept in canonical order."""

    lits: tuple[int, ...] = ()

    def __post_init__(self):
        lits = tuple(sorted(set(self.lits), key=_lit_key))
        vars_seen = set()
        for lit in lits:
            if lit == 0:
                raise ValueError("literal 0 is not a variable")
            if abs(lit) in vars_seen:
                raise ValueError(f"term contains both x{abs(lit)} and its negation")
            vars_seen.add(abs(lit))
        object.__setattr__(self, "lits", lits)

    @classmethod
    def of(cls, *lits: int) -> "Term":
        return cls(tuple(lits))

    @property
    def width(self) -> int:
        return len(self.lits)

    @functools.cached_property
    def mask(self) -> int:
        return mask_of(abs(l) for l in self.lits)

    @functools.cached_property
    def val(self) -> int:
        return mask_of(l for l in self.lits if l > 0)

    @property
    def vars(self) -> frozenset[int]:
        return frozenset(abs(l) for l in self.lits)

    @property
    def max_var(self) -> int:
        return max((abs(l) for l in self.lits), default=0)

    def sort_key(self) -> tuple:
        return (self.width, tuple(_lit_key(l) for l in self.lits))

    def __lt__(self, other: "Term") -> bool:
        return self.sort_key() < other.sort_key()

    def __call__(self, x: int) -> int:
        return int((x & self.mask) == self.val)

    def eval_many(self, xs: np.ndarray) -> np.ndarray:
        return (xs & self.mask) == self.val

    def table(self, n: int) -> np.ndarray:
        _check_vars(self.max_var, n)
        return self.eval_many(all_points(n))

    def __and__(self, other: "Term") -> "Term":
        return Term(tuple(set(self.lits) & set(other.lits)))

    def __sub__(self, other: "Term") -> "Term":
        return Term(tuple(set(self.lits) - set(other.lits)))

    def symmetric_difference(self, other: "Term") -> LiteralSet:
        return LiteralSet(set(self.lits) ^ set(other.lits))

    def __str__(self) -> str:
        return " ".join(str(l) for l in self.lits) if self.lits else "T"


def _check_vars(max_var: int, n: int) -> None:
    if max_var > n:
        raise IndexError(f"variable x{max_var} out of range for n={n}")


def eval_term(t: Term, x: int, n: int | None = None) -> int:
    if n is not None:
        _check_vars(t.max_var, n)
    return t(x)


def dist_point_term(x: int, t: Term) -> int:
    """Number of literals of ``t`` falsified by ``x``."""
    return ((x ^ t.val) & t.mask).bit_count()


def negate_literals(lits: Iterable[int]) -> LiteralSet:
    return LiteralSet(-l for l in lits)


@dataclass(frozen=True)
class Dnf:
    """Disjunction of terms over n variables; the empty disjunction is 0."""

    terms: tuple[Term, ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        for t in self.terms:
            _check_vars(t.max_var, self.n)

    @classmethod
    def from_lists(cls, terms: Sequence[Sequence[int]], n: int) -> "Dnf":
        return cls(tuple(Term(tuple(t)) for t in terms), n)

    @property
    def size(self) -> int:
        return len(self.terms)

    def __call__(self, x: int) -> int:
        for t in self.terms:
            if (x & t.mask) == t.val:
                return 1
        return 0

    def eval_many(self, xs: np.ndarray) -> np.ndarray:
        out = np.zeros(np.shape(xs), dtype=bool)
        for t in self.terms:
            out |= (xs & t.mask) == t.val
        return out

    @functools.cached_property
    def _table(self) -> np.ndarray:
        tab = self.eval_many(all_points(self.n))
        tab.flags.writeable = False
        return tab

    def table(self, n: int | None = None) -> np.ndarray:
        if n is not None and n != self.n:
            _check_vars(max((t.max_var for t in self.terms), default=0), n)
            return self.eval_many(all_points(n))
        return self._table

    def terms_of(self, x: int) -> list[int]:
        """Indices of terms satisfied by ``x``."""
        return [i for i, t in enumerate(self.terms) if (x & t.mask) == t.val]

    def __str__(self) -> str:
        return format_dnf(self)


@dataclass(frozen=True)
class FactoredDnf:
    """``head AND (t_1 OR ... OR t_k)`` with a variable-disjoint head."""

    head: Term
    tail: tuple[Term, ...]
    r: int
    mu: int
    n: int

    def __post_init__(self):
        object.__setattr__(self, "tail", tuple(self.tail))
        tail_vars = self.tail_vars
        if self.head.vars & tail_vars:
            raise ValueError("head and tail share variables")
        if len(tail_vars) > self.mu:
            raise ValueError(f"tail uses {len(tail_vars)} variables > mu={self.mu}")
        if len(self.tail) > self.r:
            raise ValueError(f"tail has {len(self.tail)} terms > r={self.r}")
        _check_vars(max(self.head.max_var, max((t.max_var for t in self.tail), default=0)), self.n)

    @property
    def tail_vars(self) -> frozenset[int]:
        out: set[int] = set()
        for t in self.tail:
            out |= t.vars
        return frozenset(out)

    def to_dnf(self) -> Dnf:
        return Dnf(tuple(Term(self.head.lits + t.lits) for t in self.tail), self.n)

    def __call__(self, x: int) -> int:
        return self.to_dnf()(x)

    def table(self, n: int | None = None) -> np.ndarray:
        return self.to_dnf().table(n)


def random_bits(rng: np.random.Generator, mask: int) -> int:
    """Uniform assignment to the coordinates in ``mask`` (others 0)."""
    return int(rng.bit_generator.random_raw()) & mask


def random_bits_many(rng: np.random.Generator, mask: int, m: int) -> np.ndarray:
    raw = rng.bit_generator.random_raw(m)
    return (raw & np.uint64(mask)).astype(np.int64)


@dataclass(frozen=True)
class Subcube:
    """Cube(a, b): agreeing coordinates fixed, the rest free.

    With ``exempt`` set this is Cube_X: coordinates in X are unconstrained and
    left for the caller to fill (they come back as 0 together with ``unset``).
    """

    a: int
    b: int
    exempt: int = 0

    @property
    def free(self) -> int:
        return (self.a ^ self.b) | self.exempt

    @property
    def unset(self) -> int:
        return self.exempt

    @property
    def size(self) -> int:
        return 1 << self.free.bit_count()

    def __contains__(self, z: int) -> bool:
        return ((z ^ self.a) & ~self.free) == 0

    def sample(self, rng: np.random.Generator) -> int:
        diff = (self.a ^ self.b) & ~self.exempt
        base = self.a & ~self.free
        return base | random_bits(rng, diff)

    def sample_many(self, rng: np.random.Generator, m: int) -> np.ndarray:
        diff = (self.a ^ self.b) & ~self.exempt
        base = self.a & ~self.free
        return base | random_bits_many(rng, diff, m)

    def members(self) -> np.ndarray:
        """All points of the cube (exempt coordinates enumerated too)."""
        free = coords_of(self.free)
        base = self.a & ~self.free
        out = np.full(1 << len(free), base, dtype=np.int64)
        idx = np.arange(1 << len(free), dtype=np.int64)
        for j, c in enumerate(free):
            out |= ((idx >> j) & 1) << (c - 1)
        return out


def sample_cube(c: Subcube, rng: np.random.Generator) -> int:
    return c.sample(rng)


BooleanFn = Union[np.ndarray, Dnf, Term, FactoredDnf, Callable[[int], int]]


def as_table(f: BooleanFn, n: int) -> np.ndarray:
    """Truth table of ``f`` over {0,1}^n as a bool array."""
    check_dim(n)
    if isinstance(f, np.ndarray):
        if f.shape != (1 << n,):
            raise ValueError(f"table has shape {f.shape}, expected {(1 << n,)}")
        return f.astype(bool, copy=False)
    if isinstance(f, (Dnf, FactoredDnf, Term)):
        return f.table(n)
    return np.fromiter((bool(f(x)) for x in range(1 << n)), dtype=bool, count=1 << n)


def support(f: BooleanFn, n: int) -> np.ndarray:
    return np.flatnonzero(as_table(f, n)).astype(np.int64)


def reldist_exhaustive(f: BooleanFn, g: BooleanFn, n: int) -> Fraction:
    """|f^-1(1) xor g^-1(1)| / |f^-1(1)| as an exact fraction."""
    tf = as_table(f, n)
    tg = as_table(g, n)
    nf = int(tf.sum())
    if nf == 0:
        raise EmptySupport("reldist undefined: f is identically 0")
    return Fraction(int(np.count_nonzero(tf ^ tg)), nf)


@dataclass(frozen=True)
class Restriction:
    """Partial assignment: coordinates in ``mask`` are pinned to ``value``."""

    mask: int
    value: int = 0

    def __post_init__(self):
        object.__setattr__(self, "value", self.value & self.mask)

    @classmethod
    def of(cls, assignment: dict[int, int]) -> "Restriction":
        mask = value = 0
        for var, bit in assignment.items():
            mask |= 1 << (var - 1)
            if bit:
                value |= 1 << (var - 1)
        return cls(mask, value)

    def apply(self, x):
        return (x & ~self.mask) | self.value


def restrict(f: BooleanFn, u: Restriction, n: int) -> np.ndarray:
    """Truth table of f restricted by u (pinned coordinates ignored in the input)."""
    tab = as_table(f, n)
    return tab[u.apply(all_points(n))]


def eval_dnf(f: Dnf, x: int) -> int:
    return f(x)


# serialization


def parse_dnf(text: str, n: int | None = None) -> Dnf:
    terms = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "T":
            terms.append(Term())
        else:
            terms.append(Term(tuple(int(tok) for tok in line.split())))
    max_var = max((t.max_var for t in terms), default=0)
    if n is None:
        n = max_var
    return Dnf(tuple(terms), n)


def format_dnf(f: Dnf) -> str:
    return "".join(str(t) + "\n" for t in f.terms)


def table_to_int(tab: np.ndarray) -> int:
    packed = np.packbits(np.asarray(tab, dtype=bool), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def int_to_table(v: int, n: int) -> np.ndarray:
    nbytes = max(1, (1 << n) // 8)
    raw = np.frombuffer(v.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[: 1 << n].astype(bool)


def format_table(tab: np.ndarray) -> str:
    size = len(tab)
    n = size.bit_length() - 1
    if 1 << n != size:
        raise ValueError("table length is not a power of two")
    width = max(1, (size + 3) // 4)
    return f"n={n} tt={table_to_int(tab):0{width}x}"


def parse_table(text: str) -> np.ndarray:
    fields = dict(tok.split("=", 1) for tok in text.split())
    n = int(fields["n"])
    check_dim(n)
    return int_to_table(int(fields["tt"], 16), n)
