"""Exact arithmetic for the four built-in group families.

Elements are immutable values with a canonical form: two elements are equal
as group elements if and only if their canonical data (and hence their
textual encodings) are identical.  All integer arithmetic is Python
arbitrary precision, so powers never overflow silently.

Families and their textual encodings (these round-trip exactly):

* free words        ``a b^-1 a``   (identity: ``1``)
* permutations      ``(1 2)(3 4 5)``   (identity: ``()``)
* lattice vectors   ``[3,-2]``
* Heisenberg        ``H(1,0,0)``

The commutator convention used across the whole package is
``[g, h] = g^-1 h^-1 g h``.
"""

from __future__ import annotations

from typing import Iterable, Sequence


class GroupError(Exception):
    """Base class for group arithmetic errors."""


class FamilyMismatchError(GroupError):
    """Raised when elements of different families (or sizes) are combined."""


class EncodingError(GroupError):
    """Raised when a textual encoding cannot be parsed."""


_GENERATOR_LETTERS = "abcdefghijklmnopqrstuvwxyz"


class GroupElement:
    """Common interface of the four families.

    Subclasses implement ``__mul__``, ``inverse``, ``identity`` and
    ``encode``; powers, conjugates and commutators are derived here.
    """

    family = "abstract"
    __slots__ = ()

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        raise NotImplementedError

    def inverse(self) -> "GroupElement":
        raise NotImplementedError

    def identity(self) -> "GroupElement":
        """Identity element of the same group (same rank/dimension)."""
        raise NotImplementedError

    def encode(self) -> str:
        raise NotImplementedError

    def is_identity(self) -> bool:
        return self == self.identity()

    def __invert__(self) -> "GroupElement":
        return self.inverse()

    def __pow__(self, n: int) -> "GroupElement":
        if not isinstance(n, int):
            raise TypeError(f"exponent must be an integer, got {type(n).__name__}")
        if n < 0:
            return self.inverse() ** (-n)
        result = self.identity()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def _require_same_family(self, other: "GroupElement") -> None:
        if type(self) is not type(other):
            raise FamilyMismatchError(
                f"cannot combine {self.family} element with "
                f"{getattr(other, 'family', type(other).__name__)} element"
            )


def group_mul(a: GroupElement, b: GroupElement) -> GroupElement:
    return a * b


def group_inv(a: GroupElement) -> GroupElement:
    return a.inverse()


def conjugate(a: GroupElement, b: GroupElement) -> GroupElement:
    """b^-1 a b."""
    return b.inverse() * a * b


def commutator(g: GroupElement, h: GroupElement) -> GroupElement:
    """[g, h] = g^-1 h^-1 g h (fixed convention, used everywhere)."""
    return g.inverse() * h.inverse() * g * h


def power(a: GroupElement, n: int) -> GroupElement:
    return a ** n


# ---------------------------------------------------------------------------
# free words


def free_reduce(letters: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    """Freely reduce a letter sequence; idempotent."""
    stack: list[tuple[int, int]] = []
    for idx, sign in letters:
        if stack and stack[-1][0] == idx and stack[-1][1] == -sign:
            stack.pop()
        else:
            stack.append((idx, sign))
    return tuple(stack)


class FreeWord(GroupElement):
    """A freely reduced word in the free group of the given rank.

    Letters are stored as ``(generator_index, sign)`` pairs with 1-based
    indices and sign in {+1, -1}; the constructor reduces eagerly.
    """

    family = "free"
    __slots__ = ("rank", "letters")

    def __init__(self, rank: int, letters: Iterable[tuple[int, int]] = ()):
        if rank < 1:
            raise ValueError("rank must be >= 1")
        reduced = free_reduce(letters)
        for idx, sign in reduced:
            if not (1 <= idx <= rank):
                raise ValueError(f"generator index {idx} out of range for rank {rank}")
            if sign not in (1, -1):
                raise ValueError(f"letter sign must be +-1, got {sign}")
        self.rank = rank
        self.letters = reduced

    @classmethod
    def generator(cls, rank: int, index: int, sign: int = 1) -> "FreeWord":
        return cls(rank, ((index, sign),))

    @classmethod
    def parse(cls, text: str, rank: int) -> "FreeWord":
        text = text.strip()
        if text == "1" or text == "":
            return cls(rank, ())
        letters = []
        for token in text.split():
            name, _, exp = token.partition("^")
            if len(name) != 1 or name not in _GENERATOR_LETTERS:
                raise EncodingError(f"bad generator token {token!r}")
            idx = _GENERATOR_LETTERS.index(name) + 1
            if idx > rank:
                raise EncodingError(f"generator {name!r} exceeds rank {rank}")
            if exp == "":
                sign = 1
            elif exp == "-1":
                sign = -1
            else:
                raise EncodingError(f"bad exponent in token {token!r} (only ^-1 allowed)")
            letters.append((idx, sign))
        return cls(rank, letters)

    def encode(self) -> str:
        if not self.letters:
            return "1"
        if self.rank > len(_GENERATOR_LETTERS):
            raise EncodingError(f"cannot encode words of rank > {len(_GENERATOR_LETTERS)}")
        parts = []
        for idx, sign in self.letters:
            name = _GENERATOR_LETTERS[idx - 1]
            parts.append(name if sign == 1 else name + "^-1")
        return " ".join(parts)

    def __mul__(self, other: GroupElement) -> "FreeWord":
        self._require_same_family(other)
        if self.rank != other.rank:
            raise FamilyMismatchError(f"rank mismatch: {self.rank} vs {other.rank}")
        return FreeWord(self.rank, self.letters + other.letters)

    def inverse(self) -> "FreeWord":
        return FreeWord(self.rank, tuple((i, -s) for i, s in reversed(self.letters)))

    def identity(self) -> "FreeWord":
        return FreeWord(self.rank, ())

    def __len__(self) -> int:
        return len(self.letters)

    def codes(self) -> tuple[int, ...]:
        """Signed integer codes (sign * index), the kernel input format."""
        return tuple(s * i for i, s in self.letters)

    def exponent_sums(self) -> tuple[int, ...]:
        """Abelianisation: total exponent of each generator."""
        sums = [0] * self.rank
        for idx, sign in self.letters:
            sums[idx - 1] += sign
        return tuple(sums)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FreeWord)
            and self.rank == other.rank
            and self.letters == other.letters
        )

    def __hash__(self) -> int:
        return hash(("free", self.rank, self.letters))

    def __repr__(self) -> str:
        return f"FreeWord({self.rank}, {self.encode()!r})"


# ---------------------------------------------------------------------------
# finite-support permutations


class Permutation(GroupElement):
    """Finite-support bijection of the positive integers.

    Only moved points are stored, so elements of S_infinity with small
    support stay small.  Products compose left to right: ``(p * q)`` first
    applies ``p``, then ``q``.
    """

    family = "perm"
    __slots__ = ("pairs", "_map")

    def __init__(self, mapping: dict[int, int] | Iterable[tuple[int, int]] = ()):
        items = dict(mapping)
        for point, image in items.items():
            if point < 1 or image < 1:
                raise ValueError("permutation points must be positive integers")
        support = {p for p, img in items.items() if p != img}
        cleaned = {p: items[p] for p in support}
        if set(cleaned.values()) != support:
            raise ValueError("mapping is not a bijection of its support")
        self.pairs = tuple(sorted(cleaned.items()))
        self._map = cleaned

    def apply(self, point: int) -> int:
        return self._map.get(point, point)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.pairs)

    @classmethod
    def from_cycles(cls, cycles: Sequence[Sequence[int]]) -> "Permutation":
        mapping: dict[int, int] = {}
        seen: set[int] = set()
        for cycle in cycles:
            if len(cycle) < 2:
                raise ValueError("cycles must have length >= 2")
            if len(set(cycle)) != len(cycle) or seen & set(cycle):
                raise ValueError("cycles must be disjoint and repetition-free")
            seen |= set(cycle)
            for a, b in zip(cycle, cycle[1:]):
                mapping[a] = b
            mapping[cycle[-1]] = cycle[0]
        return cls(mapping)

    @classmethod
    def transposition(cls, i: int, j: int) -> "Permutation":
        if i == j:
            raise ValueError("transposition needs two distinct points")
        return cls({i: j, j: i})

    @classmethod
    def parse(cls, text: str) -> "Permutation":
        text = text.strip()
        if text == "()":
            return cls()
        if not text.startswith("(") or not text.endswith(")"):
            raise EncodingError(f"bad permutation encoding {text!r}")
        cycles = []
        for chunk in text[1:-1].split(")("):
            points = chunk.split()
            if not points:
                raise EncodingError(f"empty cycle in {text!r}")
            try:
                cycle = [int(p) for p in points]
            except ValueError as exc:
                raise EncodingError(f"bad cycle entry in {text!r}") from exc
            cycles.append(cycle)
        try:
            return cls.from_cycles(cycles)
        except ValueError as exc:
            raise EncodingError(str(exc)) from exc

    def encode(self) -> str:
        cycles = cycle_decomposition(self)
        if not cycles:
            return "()"
        return "".join("(" + " ".join(str(p) for p in cycle) + ")" for cycle in cycles)

    def __mul__(self, other: GroupElement) -> "Permutation":
        self._require_same_family(other)
        points = set(self._map) | set(other._map)
        mapping = {p: other.apply(self.apply(p)) for p in points}
        return Permutation(mapping)

    def inverse(self) -> "Permutation":
        return Permutation({img: p for p, img in self.pairs})

    def identity(self) -> "Permutation":
        return Permutation()

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Permutation) and self.pairs == other.pairs

    def __hash__(self) -> int:
        return hash(("perm", self.pairs))

    def __repr__(self) -> str:
        return f"Permutation({self.encode()!r})"


def cycle_decomposition(p: Permutation) -> list[tuple[int, ...]]:
    """Disjoint cycles covering the support, each of length >= 2.

    Deterministic: cycles sorted by minimal element, each rotated to start
    at its minimum.
    """
    remaining = set(p.support)
    cycles = []
    while remaining:
        start = min(remaining)
        cycle = [start]
        point = p.apply(start)
        while point != start:
            cycle.append(point)
            point = p.apply(point)
        remaining -= set(cycle)
        cycles.append(tuple(cycle))
    return cycles


# ---------------------------------------------------------------------------
# lattice vectors


class LatticeVector(GroupElement):
    """Element of Z^d under addition, stored as an exact integer tuple."""

    family = "lattice"
    __slots__ = ("coords",)

    def __init__(self, coords: Iterable[int]):
        coords = tuple(coords)
        if not coords:
            raise ValueError("dimension must be >= 1")
        for c in coords:
            if not isinstance(c, int):
                raise ValueError("coordinates must be integers")
        self.coords = coords

    @property
    def dim(self) -> int:
        return len(self.coords)

    @classmethod
    def parse(cls, text: str) -> "LatticeVector":
        text = text.strip()
        if not (text.startswith("[") and text.endswith("]")):
            raise EncodingError(f"bad lattice encoding {text!r}")
        body = text[1:-1]
        if not body:
            raise EncodingError("empty lattice vector")
        try:
            coords = [int(part) for part in body.split(",")]
        except ValueError as exc:
            raise EncodingError(f"bad lattice coordinate in {text!r}") from exc
        return cls(coords)

    def encode(self) -> str:
        return "[" + ",".join(str(c) for c in self.coords) + "]"

    def __mul__(self, other: GroupElement) -> "LatticeVector":
        self._require_same_family(other)
        if self.dim != other.dim:
            raise FamilyMismatchError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return LatticeVector(a + b for a, b in zip(self.coords, other.coords))

    def inverse(self) -> "LatticeVector":
        return LatticeVector(-c for c in self.coords)

    def identity(self) -> "LatticeVector":
        return LatticeVector((0,) * self.dim)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LatticeVector) and self.coords == other.coords

    def __hash__(self) -> int:
        return hash(("lattice", self.coords))

    def __repr__(self) -> str:
        return f"LatticeVector({self.encode()})"


# ---------------------------------------------------------------------------
# discrete Heisenberg group


class Heisenberg(GroupElement):
    """Integer Heisenberg group: (x,y,z)*(x',y',z') = (x+x', y+y', z+z'+x*y').

    The centre is {(0,0,z)} and [a, b] = (0,0,1) for a=(1,0,0), b=(0,1,0);
    powers of the central commutator satisfy [a,b]^n = [a^n, b], which is
    why it is the package's standard distorted element.  z grows like n^2
    under powers, hence the arbitrary-precision integers.
    """

    family = "heisenberg"
    __slots__ = ("x", "y", "z")

    def __init__(self, x: int, y: int, z: int):
        for v in (x, y, z):
            if not isinstance(v, int):
                raise ValueError("Heisenberg coordinates must be integers")
        self.x = x
        self.y = y
        self.z = z

    @classmethod
    def parse(cls, text: str) -> "Heisenberg":
        text = text.strip()
        if not (text.startswith("H(") and text.endswith(")")):
            raise EncodingError(f"bad Heisenberg encoding {text!r}")
        parts = text[2:-1].split(",")
        if len(parts) != 3:
            raise EncodingError(f"Heisenberg encoding needs 3 coordinates: {text!r}")
        try:
            x, y, z = (int(p) for p in parts)
        except ValueError as exc:
            raise EncodingError(f"bad Heisenberg coordinate in {text!r}") from exc
        return cls(x, y, z)

    def encode(self) -> str:
        return f"H({self.x},{self.y},{self.z})"

    def __mul__(self, other: GroupElement) -> "Heisenberg":
        self._require_same_family(other)
        return Heisenberg(
            self.x + other.x,
            self.y + other.y,
            self.z + other.z + self.x * other.y,
        )

    def inverse(self) -> "Heisenberg":
        return Heisenberg(-self.x, -self.y, self.x * self.y - self.z)

    def identity(self) -> "Heisenberg":
        return Heisenberg(0, 0, 0)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Heisenberg)
            and (self.x, self.y, self.z) == (other.x, other.y, other.z)
        )

    def __hash__(self) -> int:
        return hash(("heisenberg", self.x, self.y, self.z))

    def __repr__(self) -> str:
        return f"Heisenberg({self.x}, {self.y}, {self.z})"


HEISENBERG_A = Heisenberg(1, 0, 0)
HEISENBERG_B = Heisenberg(0, 1, 0)


# ---------------------------------------------------------------------------
# decoding dispatch

FAMILIES = ("free", "perm", "lattice", "heisenberg")


def decode(family: str, text: str, rank: int | None = None) -> GroupElement:
    """Parse a canonical encoding; ``rank`` is required for free words."""
    if family == "free":
        if rank is None:
            raise EncodingError("free-word decoding requires a rank")
        return FreeWord.parse(text, rank)
    if family == "perm":
        return Permutation.parse(text)
    if family == "lattice":
        return LatticeVector.parse(text)
    if family == "heisenberg":
        return Heisenberg.parse(text)
    raise EncodingError(f"unknown family {family!r}")
