"""Finitely generated groups with canonical normal forms.

Every group here has a solvable word problem by construction: elements are
stored as canonical normal-form data, so equality of elements is equality of
that data.  The registry is a fixed menu:

* ``FreeGroup``         reduced words
* ``AbelianGroup``      Z^k x Z/m1 x ... (``FreeAbelian`` / ``Cyclic`` helpers)
* ``DirectProduct``     tuples of factor normal forms
* ``HeisenbergGroup``   triples (a, b, c) meaning x^a y^b z^c
* ``AffineGroupZ3``     subgroups of Aff(Z^3) given by generating maps

Heisenberg convention: yx = xy z^-1, equivalently [x, y] = x y x^-1 y^-1 = z.

The word metric always refers to the group's declared ordered generating set.
Balls are enumerated breadth first; inside a layer the order is the order of
discovery when each element of the previous layer is multiplied on the right
by the letters (g0, g0^-1, g1, g1^-1, ...).  That is shortlex order on
geodesic representatives, so it is deterministic.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InputError, ResourceCapError

DEFAULT_BALL_CAP = 5_000_000

Letter = tuple  # (generator index, +1 or -1)
Word = tuple  # tuple of letters; () is the identity


class GroupValue:
    """An element of a registered group, held in canonical normal form."""

    __slots__ = ("group", "nf")

    def __init__(self, group: Group, nf):
        self.group = group
        self.nf = nf

    def _check(self, other):
        if not isinstance(other, GroupValue):
            raise InputError(f"cannot combine {self!r} with {other!r}")
        if other.group is not self.group and other.group != self.group:
            raise InputError(f"elements of different groups: {self.group} vs {other.group}")

    def __mul__(self, other: GroupValue) -> GroupValue:
        self._check(other)
        return GroupValue(self.group, self.group._mul(self.nf, other.nf))

    def inverse(self) -> GroupValue:
        return GroupValue(self.group, self.group._inv(self.nf))

    __invert__ = inverse

    def __pow__(self, n: int) -> GroupValue:
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = self.group.identity()
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def is_identity(self) -> bool:
        return self.nf == self.group._identity_nf()

    def word(self) -> Word:
        return self.group.normal_word(self)

    def __eq__(self, other):
        if not isinstance(other, GroupValue):
            return NotImplemented
        return self.nf == other.nf and (other.group is self.group or other.group == self.group)

    def __hash__(self):
        return hash(self.nf)

    def __repr__(self):
        return self.group.format_nf(self.nf)


class Group:
    """Base class.  Subclasses provide the normal-form arithmetic."""

    kind = "Group"

    def __init__(self, generator_names: Sequence[str]):
        names = tuple(generator_names)
        if len(set(names)) != len(names):
            raise InputError(f"duplicate generator names {names}")
        self.generator_names = names
        self._lock = threading.Lock()
        self._layers: list[list] = []
        self._dist: dict = {}

    # -- subclass interface -------------------------------------------------
    def _identity_nf(self):
        raise NotImplementedError

    def _mul(self, a, b):
        raise NotImplementedError

    def _inv(self, a):
        raise NotImplementedError

    def _gen_nf(self, i: int):
        raise NotImplementedError

    def _exact_length(self, nf):
        """Closed-form word length, or None when only BFS knows it."""
        return None

    def _key(self):
        return (type(self).__name__, self.generator_names)

    def format_nf(self, nf) -> str:
        return f"{type(self).__name__}{nf}"

    # -- common API -----------------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, Group) and type(other) is type(self) and other._key() == self._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"{self.kind}({', '.join(self.generator_names)})"

    @property
    def rank(self) -> int:
        return len(self.generator_names)

    def identity(self) -> GroupValue:
        return GroupValue(self, self._identity_nf())

    def generators(self) -> list[GroupValue]:
        return [GroupValue(self, self._gen_nf(i)) for i in range(self.rank)]

    def letter(self, index: int, sign: int) -> GroupValue:
        if not 0 <= index < self.rank or sign not in (1, -1):
            raise InputError(f"invalid letter ({index}, {sign}) for {self}")
        nf = self._gen_nf(index)
        return GroupValue(self, nf if sign == 1 else self._inv(nf))

    def letters(self) -> list[Letter]:
        return [(i, s) for i in range(self.rank) for s in (1, -1)]

    def generator_index(self, name: str) -> int:
        try:
            return self.generator_names.index(name)
        except ValueError:
            raise InputError(f"unknown generator {name!r} for {self}") from None

    def normal_word(self, g: GroupValue) -> Word:
        """Some word evaluating to g; a shortlex geodesic unless overridden."""
        return geodesic_word(self, g)

    def format_word(self, w: Word) -> str:
        if not w:
            return "1"
        return " ".join(self.generator_names[i] + ("" if s == 1 else "^-1") for i, s in w)

    # -- BFS layers, shared by ball() and word_length() ---------------------------
    def _ensure_layers(self, r: int, cap: int):
        with self._lock:
            if not self._layers:
                e = self._identity_nf()
                self._layers.append([e])
                self._dist[e] = 0
            steps = [(self._gen_nf(i) if s == 1 else self._inv(self._gen_nf(i))) for i, s in self.letters()]
            while len(self._layers) <= r:
                nxt = []
                depth = len(self._layers)
                for g in self._layers[-1]:
                    for step in steps:
                        h = self._mul(g, step)
                        if h not in self._dist:
                            self._dist[h] = depth
                            nxt.append(h)
                if len(self._dist) > cap:
                    # discard the oversized layer so the cache stays consistent
                    for h in nxt:
                        del self._dist[h]
                    raise ResourceCapError(f"ball of radius {depth} in {self} is too large", cap)
                self._layers.append(nxt)
            return self._layers[: r + 1]


def ball(G: Group, r: int, cap: int = DEFAULT_BALL_CAP) -> list[GroupValue]:
    """All elements of word length <= r, BFS layer by layer, shortlex inside a layer."""
    if r < 0:
        raise InputError("radius must be non-negative")
    layers = G._ensure_layers(r, cap)
    size = sum(len(layer) for layer in layers)
    if size > cap:
        raise ResourceCapError(f"ball of radius {r} in {G} has {size} elements", cap)
    return [GroupValue(G, nf) for layer in layers for nf in layer]


def sphere(G: Group, r: int, cap: int = DEFAULT_BALL_CAP) -> list[GroupValue]:
    layers = G._ensure_layers(r, cap)
    return [GroupValue(G, nf) for nf in layers[r]]


def word_length(G: Group, g: GroupValue, cap: int = DEFAULT_BALL_CAP) -> int:
    """Length of a geodesic word for g in G's generating set.

    Uses the closed form when the kind has one; otherwise a meet-in-the-middle
    search: |g| = min |h| + |k| over g = h k with h, k in a common ball.
    """
    _check_member(G, g)
    exact = G._exact_length(g.nf)
    if exact is not None:
        return exact
    R = 0
    while True:
        layers = G._ensure_layers(R, cap)
        dist = G._dist
        best = None
        for j, layer in enumerate(layers):
            for k in layer:
                h = G._mul(g.nf, G._inv(k))
                d = dist.get(h)
                if d is not None and d <= R and (best is None or d + j < best):
                    best = d + j
        if best is not None:
            return best
        R += 1


def geodesic_word(G: Group, g: GroupValue, cap: int = DEFAULT_BALL_CAP) -> Word:
    """Shortlex-least geodesic word for g (walks back through the BFS layers)."""
    _check_member(G, g)
    n = word_length(G, g, cap) if G._exact_length(g.nf) is None else G._exact_length(g.nf)
    G._ensure_layers(n, cap)
    word = []
    cur = g.nf
    for depth in range(n, 0, -1):
        # the letter that reaches cur from the shortlex-first parent in layer depth-1
        found = None
        for parent in G._layers[depth - 1]:
            for i, s in G.letters():
                step = G._gen_nf(i) if s == 1 else G._inv(G._gen_nf(i))
                if G._mul(parent, step) == cur:
                    found = (parent, (i, s))
                    break
            if found:
                break
        cur, letter = found
        word.append(letter)
    return tuple(reversed(word))


def evaluate_word(G: Group, w: Iterable[Letter]) -> GroupValue:
    nf = G._identity_nf()
    for letter in w:
        try:
            i, s = letter
        except (TypeError, ValueError):
            raise InputError(f"malformed letter {letter!r}") from None
        if not (isinstance(i, int) and 0 <= i < G.rank) or s not in (1, -1):
            raise InputError(f"invalid letter {letter!r} for {G}")
        step = G._gen_nf(i)
        nf = G._mul(nf, step if s == 1 else G._inv(step))
    return GroupValue(G, nf)


def parse_word(G: Group, text: str) -> Word:
    """Parse whitespace separated generator names, e.g. ``x y x^-1 y^-1``.

    ``name^n`` for any integer n is accepted as shorthand; ``1`` or an empty
    string is the identity.
    """
    letters = []
    for token in text.split():
        if token == "1":
            continue
        name, _, power = token.partition("^")
        idx = G.generator_index(name)
        try:
            n = int(power) if power else 1
        except ValueError:
            raise InputError(f"bad exponent in {token!r}") from None
        letters.extend([(idx, 1 if n > 0 else -1)] * abs(n))
    return tuple(letters)


def element(G: Group, text: str) -> GroupValue:
    return evaluate_word(G, parse_word(G, text))


def invert_word(w: Word) -> Word:
    return tuple((i, -s) for i, s in reversed(w))


def _check_member(G: Group, g: GroupValue):
    if not isinstance(g, GroupValue) or (g.group is not G and g.group != G):
        raise InputError(f"{g!r} is not an element of {G}")


# ---------------------------------------------------------------------------
# Free groups


def _default_names(n: int, pool: str) -> tuple:
    if n <= len(pool):
        return tuple(pool[:n])
    return tuple(f"{pool[0]}{i + 1}" for i in range(n))


class FreeGroup(Group):
    kind = "Free"

    def __init__(self, n: int, names: Sequence[str] | None = None):
        if n < 1:
            raise InputError("free group rank must be >= 1")
        super().__init__(names or _default_names(n, "abcdefgh"))
        if len(self.generator_names) != n:
            raise InputError("wrong number of generator names")

    def _identity_nf(self):
        return ()

    def _gen_nf(self, i):
        return ((i, 1),)

    def _mul(self, a, b):
        k = 0
        la, lb = len(a), len(b)
        while k < la and k < lb and a[la - 1 - k] == (b[k][0], -b[k][1]):
            k += 1
        return a[: la - k] + b[k:]

    def _inv(self, a):
        return tuple((i, -s) for i, s in reversed(a))

    def _exact_length(self, nf):
        return len(nf)

    def normal_word(self, g):
        return g.nf

    def format_nf(self, nf):
        return self.format_word(nf)


# ---------------------------------------------------------------------------
# Finitely generated abelian groups; these double as coefficient groups K.


def _residue(x: int, m: int) -> int:
    """Minimal absolute representative, in (-m/2, m/2]."""
    r = x % m
    return r - m if r > m // 2 else r


class AbelianGroup(Group):
    """Z^k x Z/m1 x ... x Z/mt, normal form = coordinate tuple.

    Torsion coordinates are stored as minimal absolute residues, so the norm
    (L1 on the free part plus |residue| on torsion) is just the sum of
    absolute values of the stored coordinates.
    """

    def __init__(self, free_rank: int, torsion: Sequence[int] = (), names: Sequence[str] | None = None):
        torsion = tuple(int(m) for m in torsion)
        if free_rank < 0 or any(m < 1 for m in torsion):
            raise InputError(f"invalid abelian group Z^{free_rank} x {torsion}")
        self.free_rank = free_rank
        self.torsion = torsion
        dim = free_rank + len(torsion)
        if names is None:
            names = ("z",) if dim == 1 else tuple(f"z{i + 1}" for i in range(dim))
        super().__init__(names)
        if len(self.generator_names) != dim:
            raise InputError("wrong number of generator names")

    @property
    def kind(self):
        if not self.torsion:
            return "FreeAbelian"
        if self.free_rank == 0 and len(self.torsion) == 1:
            return "Cyclic"
        return "Abelian"

    @property
    def dim(self) -> int:
        return self.free_rank + len(self.torsion)

    def _key(self):
        return ("Abelian", self.free_rank, self.torsion, self.generator_names)

    def canonical(self, coords: Sequence[int]) -> tuple:
        coords = tuple(int(c) for c in coords)
        if len(coords) != self.dim:
            raise InputError(f"expected {self.dim} coordinates for {self}, got {coords}")
        k = self.free_rank
        return coords[:k] + tuple(_residue(c, m) for c, m in zip(coords[k:], self.torsion))

    def _identity_nf(self):
        return (0,) * self.dim

    def _gen_nf(self, i):
        return self.canonical(tuple(1 if j == i else 0 for j in range(self.dim)))

    def _mul(self, a, b):
        return self.canonical(tuple(x + y for x, y in zip(a, b)))

    def _inv(self, a):
        return self.canonical(tuple(-x for x in a))

    def _exact_length(self, nf):
        return sum(abs(c) for c in nf)

    def normal_word(self, g):
        w = []
        for i, c in enumerate(g.nf):
            w.extend([(i, 1 if c > 0 else -1)] * abs(c))
        return tuple(w)

    def format_nf(self, nf):
        return str(nf)

    def __repr__(self):
        parts = [f"Z^{self.free_rank}"] if self.free_rank else []
        parts += [f"Z/{m}" for m in self.torsion]
        return " x ".join(parts) or "1"

    # -- coefficient-group (KDescriptor) API ----------------------------------
    def zero(self) -> KValue:
        return KValue(self, (0,) * self.dim)

    def kvalue(self, coords) -> KValue:
        if isinstance(coords, int):
            coords = (coords,)
        return KValue(self, self.canonical(coords))

    def basis(self) -> list[KValue]:
        return [KValue(self, self._gen_nf(i)) for i in range(self.dim)]

    def to_value(self, k: KValue) -> GroupValue:
        return GroupValue(self, k.coords)

    def from_value(self, g: GroupValue) -> KValue:
        return KValue(self, g.nf)

    def kball(self, r: int, cap: int = DEFAULT_BALL_CAP) -> list[KValue]:
        return [KValue(self, g.nf) for g in ball(self, r, cap)]


def FreeAbelian(n: int, names=None) -> AbelianGroup:
    if n < 1:
        raise InputError("free abelian rank must be >= 1")
    if names is None:
        names = _default_names(n, "abcdefgh")
    return AbelianGroup(n, (), names)


def Cyclic(m: int, name: str = "t") -> AbelianGroup:
    return AbelianGroup(0, (m,), (name,))


class KValue:
    """Element of a coefficient group K, written additively."""

    __slots__ = ("owner", "coords")

    def __init__(self, owner: AbelianGroup, coords: tuple):
        self.owner = owner
        self.coords = coords

    def _coerce(self, other):
        if isinstance(other, KValue):
            if other.owner is not self.owner and other.owner != self.owner:
                raise InputError(f"coefficient mismatch: {self.owner} vs {other.owner}")
            return other.coords
        if isinstance(other, int) and (other == 0 or self.owner.dim == 1):
            return self.owner.canonical((other,) * self.owner.dim) if other == 0 else self.owner.canonical((other,))
        raise InputError(f"cannot combine {self!r} with {other!r}")

    def __add__(self, other):
        o = self._coerce(other)
        return KValue(self.owner, self.owner.canonical(tuple(a + b for a, b in zip(self.coords, o))))

    __radd__ = __add__

    def __neg__(self):
        return KValue(self.owner, self.owner.canonical(tuple(-a for a in self.coords)))

    def __sub__(self, other):
        o = self._coerce(other)
        return KValue(self.owner, self.owner.canonical(tuple(a - b for a, b in zip(self.coords, o))))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, n: int):
        return KValue(self.owner, self.owner.canonical(tuple(n * a for a in self.coords)))

    __rmul__ = __mul__

    def norm(self) -> int:
        return sum(abs(c) for c in self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __eq__(self, other):
        if isinstance(other, int) and self.owner.dim == 1:
            return self.coords == self.owner.canonical((other,))
        if isinstance(other, int) and other == 0:
            return self.is_zero()
        if not isinstance(other, KValue):
            return NotImplemented
        return self.coords == other.coords and (other.owner is self.owner or other.owner == self.owner)

    def __hash__(self):
        return hash(self.coords)

    def __int__(self):
        if self.owner.dim != 1 or self.owner.torsion:
            raise InputError(f"{self!r} is not a scalar")
        return self.coords[0]

    def __repr__(self):
        return str(self.coords[0]) if self.owner.dim == 1 else str(self.coords)


# ---------------------------------------------------------------------------
# Direct products


class DirectProduct(Group):
    kind = "DirectProduct"

    def __init__(self, factors: Sequence[Group]):
        self.factors = tuple(factors)
        if not self.factors:
            raise InputError("direct product needs at least one factor")
        names = [n for f in self.factors for n in f.generator_names]
        super().__init__(names)
        self._offsets = []
        off = 0
        for f in self.factors:
            self._offsets.append(off)
            off += f.rank

    def _key(self):
        return ("DirectProduct", tuple(f._key() for f in self.factors))

    def _identity_nf(self):
        return tuple(f._identity_nf() for f in self.factors)

    def _gen_nf(self, i):
        for j, (f, off) in enumerate(zip(self.factors, self._offsets)):
            if off <= i < off + f.rank:
                nf = list(self._identity_nf())
                nf[j] = f._gen_nf(i - off)
                return tuple(nf)
        raise InputError(f"generator index {i} out of range")

    def _mul(self, a, b):
        return tuple(f._mul(x, y) for f, x, y in zip(self.factors, a, b))

    def _inv(self, a):
        return tuple(f._inv(x) for f, x in zip(self.factors, a))

    def _exact_length(self, nf):
        total = 0
        for f, x in zip(self.factors, nf):
            n = f._exact_length(x)
            if n is None:
                return None
            total += n
        return total

    def component(self, g: GroupValue, j: int) -> GroupValue:
        return GroupValue(self.factors[j], g.nf[j])

    def embed(self, j: int, h: GroupValue) -> GroupValue:
        nf = list(self._identity_nf())
        nf[j] = h.nf
        return GroupValue(self, tuple(nf))

    def pair(self, *parts: GroupValue) -> GroupValue:
        return GroupValue(self, tuple(p.nf for p in parts))

    def normal_word(self, g):
        w = []
        for j, (f, off) in enumerate(zip(self.factors, self._offsets)):
            w.extend((i + off, s) for i, s in f.normal_word(GroupValue(f, g.nf[j])))
        return tuple(w)

    def format_nf(self, nf):
        return "(" + ", ".join(f.format_nf(x) for f, x in zip(self.factors, nf)) + ")"

    def __repr__(self):
        return " x ".join(repr(f) for f in self.factors)


# ---------------------------------------------------------------------------
# Heisenberg group H3 = <x, y | [x, y] central>


class HeisenbergGroup(Group):
    """Normal form (a, b, c) = x^a y^b z^c with z = [x, y] = x y x^-1 y^-1.

    y^b x^a' = x^a' y^b z^(-a' b), so
    (a, b, c)(a', b', c') = (a + a', b + b', c + c' - a' b).
    """

    kind = "Heisenberg"

    def __init__(self, names: Sequence[str] = ("x", "y")):
        super().__init__(names)
        if len(self.generator_names) != 2:
            raise InputError("Heisenberg group has exactly two generators")

    def _identity_nf(self):
        return (0, 0, 0)

    def _gen_nf(self, i):
        return (1, 0, 0) if i == 0 else (0, 1, 0)

    def _mul(self, p, q):
        return (p[0] + q[0], p[1] + q[1], p[2] + q[2] - q[0] * p[1])

    def _inv(self, p):
        a, b, c = p
        return (-a, -b, -c - a * b)

    def value(self, a: int, b: int, c: int) -> GroupValue:
        return GroupValue(self, (a, b, c))

    def center(self, c: int) -> GroupValue:
        return GroupValue(self, (0, 0, c))

    def normal_word(self, g):
        a, b, c = g.nf
        w = [(0, 1 if a > 0 else -1)] * abs(a) + [(1, 1 if b > 0 else -1)] * abs(b)
        comm = ((0, 1), (1, 1), (0, -1), (1, -1)) if c > 0 else ((1, 1), (0, 1), (1, -1), (0, -1))
        return tuple(w) + comm * abs(c)

    def format_nf(self, nf):
        x, y = self.generator_names
        return f"{x}^{nf[0]} {y}^{nf[1]} z^{nf[2]}"


# ---------------------------------------------------------------------------
# Affine maps of Z^3


@dataclass(frozen=True)
class AffineMapZ3:
    """v -> matrix @ v + translation, integer entries, det = +-1."""

    matrix: tuple  # row-major 3x3, tuple of 3 row tuples
    translation: tuple

    def __post_init__(self):
        m = tuple(tuple(int(x) for x in row) for row in self.matrix)
        t = tuple(int(x) for x in self.translation)
        if len(m) != 3 or any(len(row) != 3 for row in m) or len(t) != 3:
            raise InputError("affine map needs a 3x3 matrix and a 3-vector")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "translation", t)
        if abs(self.det()) != 1:
            raise InputError(f"matrix {m} is not invertible over Z (det {self.det()})")

    @classmethod
    def from_function(cls, f) -> AffineMapZ3:
        """Recover an affine map from its action on 0 and the unit vectors."""
        t = tuple(f((0, 0, 0)))
        cols = [tuple(a - b for a, b in zip(f(e), t)) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
        return cls(tuple(tuple(cols[j][i] for j in range(3)) for i in range(3)), t)

    @classmethod
    def translation_by(cls, v) -> AffineMapZ3:
        return cls(((1, 0, 0), (0, 1, 0), (0, 0, 1)), tuple(v))

    def det(self) -> int:
        (a, b, c), (d, e, f), (g, h, i) = self.matrix
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)

    def __call__(self, v):
        m, t = self.matrix, self.translation
        return tuple(sum(m[i][j] * v[j] for j in range(3)) + t[i] for i in range(3))

    def compose(self, other: AffineMapZ3) -> AffineMapZ3:
        """self o other (apply other first)."""
        m, n = self.matrix, other.matrix
        mn = tuple(tuple(sum(m[i][k] * n[k][j] for k in range(3)) for j in range(3)) for i in range(3))
        return AffineMapZ3(mn, self(other.translation))

    __matmul__ = compose

    def inverse(self) -> AffineMapZ3:
        (a, b, c), (d, e, f), (g, h, i) = self.matrix
        det = self.det()
        adj = (
            (e * i - f * h, c * h - b * i, b * f - c * e),
            (f * g - d * i, a * i - c * g, c * d - a * f),
            (d * h - e * g, b * g - a * h, a * e - b * d),
        )
        inv = tuple(tuple(x * det for x in row) for row in adj)  # det = +-1 so 1/det = det
        t = self.translation
        return AffineMapZ3(inv, tuple(-sum(inv[r][k] * t[k] for k in range(3)) for r in range(3)))

    def is_identity(self) -> bool:
        return self.matrix == ((1, 0, 0), (0, 1, 0), (0, 0, 1)) and self.translation == (0, 0, 0)

    def __repr__(self):
        names = "xyz"
        out = []
        for i in range(3):
            terms = []
            for j in range(3):
                c = self.matrix[i][j]
                if c:
                    terms.append(("" if c == 1 else "-" if c == -1 else f"{c}*") + names[j])
            expr = " + ".join(terms).replace("+ -", "- ") or "0"
            if self.translation[i]:
                expr += f" {'+' if self.translation[i] > 0 else '-'} {abs(self.translation[i])}"
            out.append(expr)
        return "(x, y, z) -> (" + ", ".join(out) + ")"


IDENTITY_MAP = AffineMapZ3(((1, 0, 0), (0, 1, 0), (0, 0, 1)), (0, 0, 0))


class AffineGroupZ3(Group):
    """The subgroup of Aff(Z^3) generated by named affine maps."""

    kind = "AffineZ3Subgroup"

    def __init__(self, generators: Sequence[tuple[str, AffineMapZ3]]):
        generators = tuple((str(n), m) for n, m in generators)
        if not generators:
            raise InputError("affine group needs generators")
        for _, m in generators:
            if not isinstance(m, AffineMapZ3):
                raise InputError(f"{m!r} is not an AffineMapZ3")
        self.maps = tuple(m for _, m in generators)
        super().__init__([n for n, _ in generators])

    def _key(self):
        return ("AffineZ3", self.generator_names, self.maps)

    def _identity_nf(self):
        return IDENTITY_MAP

    def _gen_nf(self, i):
        return self.maps[i]

    def _mul(self, a, b):
        return a.compose(b)

    def _inv(self, a):
        return a.inverse()

    def value(self, m: AffineMapZ3) -> GroupValue:
        return GroupValue(self, m)

    def format_nf(self, nf):
        return repr(nf)


# ---------------------------------------------------------------------------
# configuration documents


def group_from_config(doc: dict) -> Group:
    """Build a descriptor from a plain mapping (parsed JSON)."""
    if not isinstance(doc, dict) or "kind" not in doc:
        raise InputError(f"group configuration needs a 'kind': {doc!r}")
    kind = doc["kind"]
    names = doc.get("generators")
    if kind == "Free":
        return FreeGroup(int(doc["rank"]), names)
    if kind == "FreeAbelian":
        return FreeAbelian(int(doc["rank"]), names)
    if kind == "Cyclic":
        return Cyclic(int(doc["order"]), (names or ["t"])[0])
    if kind == "Abelian":
        return AbelianGroup(int(doc.get("free_rank", 0)), doc.get("torsion", ()), names)
    if kind == "DirectProduct":
        return DirectProduct([group_from_config(f) for f in doc["factors"]])
    if kind == "Heisenberg":
        return HeisenbergGroup(names or ("x", "y"))
    if kind == "AffineZ3Subgroup":
        gens = []
        for g in doc["generators"]:
            gens.append((g["name"], AffineMapZ3(tuple(map(tuple, g["matrix"])), tuple(g["translation"]))))
        return AffineGroupZ3(gens)
    raise InputError(f"unknown group kind {kind!r}")
