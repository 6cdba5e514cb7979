"""Monomial reflection groups G(m,p,n), coordinate cyclic groups, and their
one-dimensional characters.

Elements are monomial matrices: a permutation combined with m-th root of
unity phases.  The element g acts on points by

    (g z)_i = zeta_m^(phase_i) * z_{perm^{-1}(i)},

and on functions by composition, (R_g f)(z) = f(g z).  All phase arithmetic
is exact: phases are integers mod m, character values are rational turns
(value = exp(2*pi*i*turn)).
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product


def root_of_unity(turn: Fraction | int) -> complex:
    """exp(2*pi*i*turn), exact at quarter turns so +-1 and +-i carry no noise."""
    t = Fraction(turn) % 1
    if t == 0:
        return complex(1.0, 0.0)
    if t == Fraction(1, 2):
        return complex(-1.0, 0.0)
    if t == Fraction(1, 4):
        return complex(0.0, 1.0)
    if t == Fraction(3, 4):
        return complex(0.0, -1.0)
    return cmath.exp(2j * math.pi * (t.numerator / t.denominator))


class GroupSpecError(ValueError):
    pass


@dataclass(frozen=True)
class GroupSpec:
    """Which group to build: G(m,p,n) or the cyclic group Z_m acting on one
    coordinate of C^n (spec strings "G(m,p,n)" and "Z(m)@k^n")."""

    kind: str  # "Gmpn" | "CyclicCoord"
    m: int
    p: int
    n: int
    coord: int = 1  # 1-based, CyclicCoord only

    def __post_init__(self):
        if self.kind not in ("Gmpn", "CyclicCoord"):
            raise GroupSpecError(f"unknown group kind {self.kind!r}")
        if self.m < 1 or self.p < 1 or self.n < 1:
            raise GroupSpecError("m, p, n must be positive")
        if self.m % self.p != 0:
            raise GroupSpecError(f"p={self.p} does not divide m={self.m}")
        if self.kind == "Gmpn" and self.n < 2:
            raise GroupSpecError("G(m,p,n) requires n >= 2")
        if self.kind == "CyclicCoord":
            if self.p != 1:
                raise GroupSpecError("cyclic coordinate groups take p = 1")
            if not (1 <= self.coord <= self.n):
                raise GroupSpecError(f"coord={self.coord} out of range 1..{self.n}")

    def __str__(self) -> str:
        if self.kind == "Gmpn":
            return f"G({self.m},{self.p},{self.n})"
        return f"Z({self.m})@{self.coord}^{self.n}"


_GMPN_RE = re.compile(r"^G\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)$")
_CYC_RE = re.compile(r"^Z\(\s*(\d+)\s*\)@(\d+)\^(\d+)$")


def parse_group_spec(text: str) -> GroupSpec:
    """Parse "G(m,p,n)" or "Z(m)@k^n"."""
    s = text.strip()
    mo = _GMPN_RE.match(s)
    if mo:
        m, p, n = map(int, mo.groups())
        return GroupSpec("Gmpn", m, p, n)
    mo = _CYC_RE.match(s)
    if mo:
        m, k, n = map(int, mo.groups())
        return GroupSpec("CyclicCoord", m, 1, n, coord=k)
    raise GroupSpecError(f"cannot parse group spec {text!r}")


@dataclass(frozen=True)
class GroupElement:
    """perm[j] is the 0-based image of coordinate j; phase[i] is the phase
    exponent attached to row i, taken mod `mod`."""

    perm: tuple[int, ...]
    phase: tuple[int, ...]
    mod: int

    @property
    def n(self) -> int:
        return len(self.perm)

    def is_identity(self) -> bool:
        return all(self.perm[i] == i for i in range(self.n)) and not any(self.phase)

    def matrix(self) -> list[list[complex]]:
        """Dense monomial matrix: M[i][j] = zeta^phase_i if perm[j] == i."""
        n = self.n
        mat = [[0j] * n for _ in range(n)]
        for j in range(n):
            i = self.perm[j]
            mat[i][j] = root_of_unity(Fraction(self.phase[i], self.mod))
        return mat

    def apply_point(self, z: tuple[complex, ...]) -> tuple[complex, ...]:
        """Matrix-vector action (g . z)_i = zeta^phase_i * z_{perm^{-1}(i)}."""
        inv = _invert_perm(self.perm)
        return tuple(
            root_of_unity(Fraction(self.phase[i], self.mod)) * z[inv[i]]
            for i in range(self.n)
        )


def _invert_perm(perm: tuple[int, ...]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for j, i in enumerate(perm):
        inv[i] = j
    return tuple(inv)


def _perm_parity(perm: tuple[int, ...]) -> int:
    """0 for even, 1 for odd."""
    seen = [False] * len(perm)
    parity = 0
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        parity ^= (length - 1) & 1
    return parity


class Group:
    """Eagerly enumerated group with exact multiplication data.

    Supports |G| up to desk scale (~1e5); every downstream formula is a full
    group sum, so nothing lazier is needed.
    """

    def __init__(self, spec: GroupSpec):
        self.spec = spec
        self.m = spec.m
        self.p = spec.p
        self.n = spec.n
        self.q = spec.m // spec.p
        self.elements: list[GroupElement] = list(_enumerate_elements(spec))
        self.index: dict[GroupElement, int] = {g: i for i, g in enumerate(self.elements)}
        self.identity = GroupElement(tuple(range(spec.n)), (0,) * spec.n, spec.m)
        if self.identity not in self.index:
            raise GroupSpecError("enumeration is missing the identity")
        self._exponent: int | None = None

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __str__(self) -> str:
        return str(self.spec)

    def mul(self, a: GroupElement, b: GroupElement) -> GroupElement:
        """Matrix product: perm composes, phases permute.

        (ab).perm(j) = a.perm(b.perm(j)),
        (ab).phase_i = a.phase_i + b.phase_{a.perm^{-1}(i)} (mod m).
        """
        if a.mod != self.m or b.mod != self.m:
            raise ValueError("element modulus does not match group")
        perm = tuple(a.perm[b.perm[j]] for j in range(self.n))
        a_inv = _invert_perm(a.perm)
        phase = tuple((a.phase[i] + b.phase[a_inv[i]]) % self.m for i in range(self.n))
        return GroupElement(perm, phase, self.m)

    def inv(self, g: GroupElement) -> GroupElement:
        perm = _invert_perm(g.perm)
        phase = tuple((-g.phase[g.perm[j]]) % self.m for j in range(self.n))
        return GroupElement(perm, phase, self.m)

    def det_turn(self, g: GroupElement) -> Fraction:
        """det(g) as a rational turn: sign(perm) * zeta_m^(sum of phases)."""
        turn = Fraction(_perm_parity(g.perm), 2) + Fraction(sum(g.phase), self.m)
        return turn % 1

    def det_of(self, g: GroupElement) -> complex:
        return root_of_unity(self.det_turn(g))

    def element_order(self, g: GroupElement) -> int:
        k = 1
        h = g
        while not h.is_identity():
            h = self.mul(h, g)
            k += 1
        return k

    @property
    def exponent(self) -> int:
        if self._exponent is None:
            e = 1
            for g in self.elements:
                e = math.lcm(e, self.element_order(g))
            self._exponent = e
        return self._exponent

    def perm_images(self) -> list[tuple[int, ...]]:
        """Distinct permutation parts, sorted (full S_n for G(m,p,n))."""
        return sorted({g.perm for g in self.elements})

    # -- reflections -------------------------------------------------------

    def fixed_space_dim(self, g: GroupElement) -> int:
        """dim ker(I - g), exact: one dimension per perm cycle whose phase
        product is 1."""
        seen = [False] * self.n
        dim = 0
        for start in range(self.n):
            if seen[start]:
                continue
            total = 0
            j = start
            while not seen[j]:
                seen[j] = True
                total += g.phase[j]
                j = g.perm[j]
            if total % self.m == 0:
                dim += 1
        return dim

    def is_reflection(self, g: GroupElement) -> bool:
        return self.fixed_space_dim(g) == self.n - 1

    def reflections(self) -> list["Hyperplane"]:
        """All reflections grouped by fixed hyperplane.

        Each hyperplane carries the normalized linear form, the cyclic order
        m_i of its pointwise stabilizer, and the generator whose determinant
        is exp(2*pi*i/m_i).
        """
        buckets: dict[tuple, list[GroupElement]] = {}
        for g in self.elements:
            if not self.is_reflection(g):
                continue
            buckets.setdefault(self._hyperplane_key(g), []).append(g)
        planes = []
        for key in sorted(buckets, key=repr):
            members = buckets[key]
            order = len(members) + 1
            gen = None
            for g in members:
                if self.det_turn(g) == Fraction(1, order):
                    gen = g
                    break
            if gen is None:
                raise RuntimeError(f"no primitive generator for hyperplane {key}")
            planes.append(Hyperplane(self, key, members, order, gen))
        return planes

    def _hyperplane_key(self, g: GroupElement) -> tuple:
        """Exact key for the fixed hyperplane of a reflection.

        Monomial reflections come in two shapes: a single nonzero diagonal
        phase (hyperplane z_i = 0) or a phased transposition (i j) fixing
        z_i - zeta^t z_j = 0.
        """
        idp = tuple(range(self.n))
        if g.perm == idp:
            nz = [i for i in range(self.n) if g.phase[i] % self.m]
            if len(nz) != 1:
                raise RuntimeError("not a diagonal reflection")
            return ("axis", nz[0])
        moved = [j for j in range(self.n) if g.perm[j] != j]
        if len(moved) != 2:
            raise RuntimeError("not a reflection-shaped permutation")
        i, j = sorted(moved)
        # fixed locus of (g.z)_i = zeta^phase_i z_j is z_i = zeta^phase_i z_j
        return ("diff", i, j, g.phase[i] % self.m)

    def hyperplane_coeffs(self, key: tuple) -> dict[int, complex]:
        """Linear form coefficients; first nonzero coefficient normalized to 1."""
        if key[0] == "axis":
            return {key[1]: 1.0 + 0j}
        _, i, j, t = key
        return {i: 1.0 + 0j, j: -root_of_unity(Fraction(t, self.m))}


@dataclass
class Hyperplane:
    """One reflecting hyperplane with its cyclic pointwise stabilizer."""

    group: Group
    key: tuple
    members: list[GroupElement]  # the m_i - 1 reflections fixing it
    order: int  # m_i
    generator: GroupElement  # det = exp(2*pi*i/m_i)

    def coeffs(self) -> dict[int, complex]:
        return self.group.hyperplane_coeffs(self.key)

    def c_exponent(self, char: "Character") -> int:
        """Least c >= 0 with char(generator) = det(generator)^c."""
        turn = char.turn(self.generator)  # denominator divides the order m_i
        c = turn * self.order
        if c.denominator != 1:
            raise ValueError("character value is not a power of det on the stabilizer")
        return int(c) % self.order


def _enumerate_elements(spec: GroupSpec):
    if spec.kind == "CyclicCoord":
        k = spec.coord - 1
        for a in range(spec.m):
            phase = [0] * spec.n
            phase[k] = a
            yield GroupElement(tuple(range(spec.n)), tuple(phase), spec.m)
        return
    for perm in permutations(range(spec.n)):
        for phase in product(range(spec.m), repeat=spec.n):
            if sum(phase) % spec.p == 0:
                yield GroupElement(perm, phase, spec.m)


def make_group(spec: GroupSpec | str) -> Group:
    if isinstance(spec, str):
        spec = parse_group_spec(spec)
    group = Group(spec)
    expected = spec.m ** spec.n * math.factorial(spec.n) // spec.p \
        if spec.kind == "Gmpn" else spec.m
    if len(group) != expected:
        raise GroupSpecError(f"enumerated {len(group)} elements, expected {expected}")
    return group


# -- characters -------------------------------------------------------------

# sgn before det so dedup keeps sgn when the two coincide (e.g. G(1,1,n))
BUILTIN_CHARACTERS = ("trivial", "sgn", "det", "rho1", "rho2")


class CharacterError(ValueError):
    pass


class Character:
    """One-dimensional character stored as exact turns per element.

    chi(g) = exp(2*pi*i*turn(g)).  Multiplicativity is validated on
    construction: exhaustively for |G| <= 200, on seeded random pairs above.
    """

    def __init__(self, group: Group, name: str, turns: list[Fraction], validate=True):
        if len(turns) != len(group):
            raise CharacterError("one turn per group element required")
        self.group = group
        self.name = name
        self._turns = [Fraction(t) % 1 for t in turns]
        if validate:
            self.validate()

    def turn(self, g: GroupElement) -> Fraction:
        return self._turns[self.group.index[g]]

    def value(self, g: GroupElement) -> complex:
        return root_of_unity(self.turn(g))

    def value_inv(self, g: GroupElement) -> complex:
        """chi(g^{-1}) = conj(chi(g))."""
        return root_of_unity(-self.turn(g))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Character)
            and self.group is other.group
            and self._turns == other._turns
        )

    def __hash__(self):
        return hash((id(self.group), tuple(self._turns)))

    def validate(self):
        group = self.group
        pairs = None
        if len(group) <= 200:
            pairs = ((a, b) for a in group.elements for b in group.elements)
        else:
            import random

            rng = random.Random(1729)
            pairs = (
                (rng.choice(group.elements), rng.choice(group.elements))
                for _ in range(2000)
            )
        for a, b in pairs:
            if (self.turn(a) + self.turn(b) - self.turn(group.mul(a, b))) % 1 != 0:
                raise CharacterError(
                    f"character {self.name!r} is not multiplicative at "
                    f"({a.perm},{a.phase}) * ({b.perm},{b.phase})"
                )

    def to_json(self) -> dict:
        return {
            "group": str(self.group.spec),
            "name": self.name,
            "values": [
                [i, t.numerator, t.denominator] for i, t in enumerate(self._turns)
            ],
        }


def _dihedral_generators(group: Group) -> tuple[GroupElement, GroupElement]:
    """delta = diag(zeta_k, zeta_k^{-1}), sigma = coordinate swap, for G(k,k,2)."""
    k = group.m
    delta = GroupElement((0, 1), (1 % k, (k - 1) % k), k)
    sigma = GroupElement((1, 0), (0, 0), k)
    return delta, sigma


def extend_from_generators(
    group: Group, assignments: dict[GroupElement, Fraction], name="custom"
) -> Character:
    """Extend generator turn assignments multiplicatively over the group.

    Breadth-first closure from the identity; any conflicting product is
    reported with the violating pair, and generators that fail to generate
    the whole group are rejected.
    """
    turns: dict[GroupElement, Fraction] = {group.identity: Fraction(0)}
    frontier = [group.identity]
    gens = list(assignments.items())
    while frontier:
        nxt = []
        for g in frontier:
            for s, ts in gens:
                h = group.mul(g, s)
                t = (turns[g] + ts) % 1
                if h in turns:
                    if turns[h] != t:
                        raise CharacterError(
                            f"inconsistent generator values: element reached with "
                            f"turns {turns[h]} and {t} via ({g.perm},{g.phase})*"
                            f"({s.perm},{s.phase})"
                        )
                else:
                    turns[h] = t
                    nxt.append(h)
        frontier = nxt
    if len(turns) != len(group):
        raise CharacterError("generators do not generate the group")
    return Character(group, name, [turns[g] for g in group.elements])


def make_character(group: Group, source: str | dict[GroupElement, Fraction]) -> Character:
    """Built-in characters by name, or a custom one from generator values.

    Built-ins: trivial, det, sgn = det^{-1}; rho1 and rho2 exist on G(k,k,2)
    with k even (delta -> -1, with sigma -> +1 resp. delta*sigma -> +1).
    """
    if isinstance(source, dict):
        return extend_from_generators(group, source)
    name = source
    if name == "trivial":
        return Character(group, name, [Fraction(0)] * len(group), validate=False)
    if name == "det":
        return Character(group, name, [group.det_turn(g) for g in group.elements],
                         validate=False)
    if name == "sgn":
        return Character(group, name, [-group.det_turn(g) % 1 for g in group.elements],
                         validate=False)
    if name in ("rho1", "rho2"):
        spec = group.spec
        if spec.kind != "Gmpn" or spec.n != 2 or spec.p != spec.m or spec.m % 2:
            raise CharacterError(f"{name} requires G(k,k,2) with k even")
        delta, sigma = _dihedral_generators(group)
        half = Fraction(1, 2)
        if name == "rho1":
            assignments = {delta: half, sigma: Fraction(0)}
        else:
            # rho2(delta*sigma) = 1 forces rho2(sigma) = -1
            assignments = {delta: half, sigma: half}
        char = extend_from_generators(group, assignments, name=name)
        return char
    raise CharacterError(f"unknown character {source!r}")


def builtin_characters(group: Group) -> list[Character]:
    """All built-in characters that exist on this group, deduplicated."""
    chars: list[Character] = []
    for name in BUILTIN_CHARACTERS:
        try:
            c = make_character(group, name)
        except CharacterError:
            continue
        if all(c != d for d in chars):
            chars.append(c)
    return chars
