"""Sparse multivariate Laurent polynomials, group actions, exact torus and
sphere inner products, and pluriharmonic extensions.

A LaurentPoly is a dict from integer exponent vectors to complex
coefficients.  Functions on the n-torus are Laurent polynomials; conjugation
there sends z^a to z^{-a}.  A HarmonicPoly keeps z and conj(z) exponents
separately and is the only place where the two coexist.

Coefficients are complex doubles.  After every arithmetic operation, terms
with |c| below CLEANUP_REL times the largest coefficient are dropped, which
keeps zero tests reliable for the finite root-of-unity sums that arise here.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .groups import Group, GroupElement, root_of_unity

CLEANUP_REL = 1e-12

Expo = tuple[int, ...]


def _clean(terms: dict[Expo, complex]) -> dict[Expo, complex]:
    if not terms:
        return {}
    top = max(abs(c) for c in terms.values())
    if top == 0.0:
        return {}
    floor = CLEANUP_REL * top
    return {e: c for e, c in terms.items() if abs(c) >= floor}


class LaurentPoly:
    """Sum of c * z^e over exponent vectors e in Z^n."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: dict[Expo, complex] | None = None):
        self.dim = dim
        self.terms = _clean(dict(terms) if terms else {})

    # -- constructors --------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> "LaurentPoly":
        return cls(dim)

    @classmethod
    def constant(cls, dim: int, c: complex) -> "LaurentPoly":
        return cls(dim, {(0,) * dim: complex(c)})

    @classmethod
    def monomial(cls, dim: int, expo: Expo, c: complex = 1.0) -> "LaurentPoly":
        if len(expo) != dim:
            raise ValueError("exponent length does not match dim")
        return cls(dim, {tuple(int(e) for e in expo): complex(c)})

    @classmethod
    def variable(cls, dim: int, i: int) -> "LaurentPoly":
        e = [0] * dim
        e[i] = 1
        return cls.monomial(dim, tuple(e))

    # -- queries --------------------------------------------------------

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(c) <= tol for c in self.terms.values())

    def is_analytic(self) -> bool:
        return all(min(e) >= 0 for e in self.terms) if self.terms else True

    def degree_radius(self) -> int:
        """Sup-norm of the exponent support."""
        if not self.terms:
            return 0
        return max(max(abs(x) for x in e) for e in self.terms)

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def coeff(self, expo: Expo) -> complex:
        return self.terms.get(tuple(expo), 0j)

    def same_terms(self, other: "LaurentPoly") -> bool:
        """Exact term-mapping equality (integer coefficient arithmetic is
        exact in doubles, so this is meaningful for the basic maps)."""
        return self.dim == other.dim and self.terms == other.terms

    def approx_eq(self, other: "LaurentPoly", tol: float = 1e-10) -> bool:
        diff = self - other
        scale = max(self.max_abs_coeff(), other.max_abs_coeff(), 1.0)
        return diff.max_abs_coeff() <= tol * scale

    def __repr__(self):
        if not self.terms:
            return "LaurentPoly(0)"
        bits = [f"({c:.6g})*z^{e}" for e, c in sorted(self.terms.items())]
        return "LaurentPoly(" + " + ".join(bits) + ")"

    # -- arithmetic -------------------------------------------------------

    def _check_dim(self, other: "LaurentPoly"):
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch {self.dim} != {other.dim}")

    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(self.dim, other)
        self._check_dim(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0j) + c
        return LaurentPoly(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.dim, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(self.dim, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            return LaurentPoly(self.dim, {e: c * other for e, c in self.terms.items()})
        self._check_dim(other)
        out: dict[Expo, complex] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0j) + c1 * c2
        return LaurentPoly(self.dim, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not defined for polynomials")
        out = LaurentPoly.constant(self.dim, 1.0)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj_torus(self) -> "LaurentPoly":
        """Conjugate as a function on the torus: sum conj(c) z^{-e}."""
        return LaurentPoly(
            self.dim,
            {tuple(-x for x in e): c.conjugate() for e, c in self.terms.items()},
        )

    def dz(self, i: int) -> "LaurentPoly":
        """Formal z_i derivative, valid for Laurent exponents."""
        out: dict[Expo, complex] = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            f = list(e)
            f[i] -= 1
            out[tuple(f)] = out.get(tuple(f), 0j) + c * e[i]
        return LaurentPoly(self.dim, out)

    def eval(self, z: tuple[complex, ...]) -> complex:
        total = 0j
        for e in sorted(self.terms):
            c = self.terms[e]
            v = c
            for zi, ei in zip(z, e):
                if ei:
                    v *= zi ** ei
            total += v
        return total

    def substitute(self, polys: list["LaurentPoly"]) -> "LaurentPoly":
        """Composition f(p_1, ..., p_dim); requires analytic f."""
        if len(polys) != self.dim:
            raise ValueError("need one polynomial per variable")
        if not self.is_analytic():
            raise ValueError("substitution requires an analytic polynomial")
        out_dim = polys[0].dim
        total = LaurentPoly.zero(out_dim)
        for e in sorted(self.terms):
            c = self.terms[e]
            mono = LaurentPoly.constant(out_dim, c)
            for pk, ek in zip(polys, e):
                if ek:
                    mono = mono * (pk ** ek)
            total = total + mono
        return total

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "terms": [
                {"c": [c.real, c.imag], "e": list(e)}
                for e, c in sorted(self.terms.items())
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "LaurentPoly":
        terms = {
            tuple(t["e"]): complex(t["c"][0], t["c"][1]) for t in data["terms"]
        }
        return cls(int(data["dim"]), terms)


def poly_arith(op: str, *operands) -> LaurentPoly:
    """Named dispatch kept for the CLI: add / mul / scale / conj_torus."""
    if op == "add":
        a, b = operands
        return a + b
    if op == "mul":
        a, b = operands
        return a * b
    if op == "scale":
        a, s = operands
        return a * s
    if op == "conj_torus":
        (a,) = operands
        return a.conj_torus()
    raise ValueError(f"unknown operation {op!r}")


# -- group action ------------------------------------------------------------


def act(g: GroupElement, f: LaurentPoly) -> LaurentPoly:
    """(R_g f)(z) = f(g z), composition with the monomial matrix itself.

    Monomials transform exactly: z^a -> zeta^(sum_i phase_i a_i) z^b with
    b_j = a_{perm(j)}.  With this composition the Jacobian of the basic map
    transforms by det(g)^{-1}, i.e. by the sign character, which is what
    ties the relative invariant ell_sgn to the Jacobian.
    """
    if len(g.perm) != f.dim:
        raise ValueError("element dimension does not match polynomial")
    m = g.mod
    out: dict[Expo, complex] = {}
    for e, c in f.terms.items():
        b = tuple(e[g.perm[j]] for j in range(f.dim))
        turn = Fraction(sum(p * x for p, x in zip(g.phase, e)), m)
        out[b] = out.get(b, 0j) + c * root_of_unity(turn)
    return LaurentPoly(f.dim, out)


def orbit_exponents(group: Group, expo: Expo) -> list[Expo]:
    """Distinct images of an exponent vector under the permutation parts."""
    seen = set()
    for perm in group.perm_images():
        b = [0] * len(expo)
        for j, x in enumerate(expo):
            b[perm[j]] = x
        seen.add(tuple(b))
    return sorted(seen)


def canonical_exponent(group: Group, expo: Expo) -> Expo:
    """Lexicographic minimum over the permutation orbit; for G(m,p,n) this is
    the weakly increasing sort."""
    return min(orbit_exponents(group, expo))


# -- inner products ----------------------------------------------------------


def torus_inner(f: LaurentPoly, g: LaurentPoly) -> complex:
    """L^2 pairing on the torus under normalized Lebesgue measure.

    Distinct monomials are orthonormal, so this is the coefficient pairing
    sum_a f_a conj(g_a), computed exactly.
    """
    if f.dim != g.dim:
        raise ValueError("dimension mismatch")
    small, big = (f.terms, g.terms) if len(f.terms) <= len(g.terms) else (g.terms, f.terms)
    total = 0j
    for e in sorted(small):
        if e in big:
            total += f.terms[e] * g.terms[e].conjugate()
    return total


def torus_norm(f: LaurentPoly) -> float:
    return math.sqrt(sum(abs(c) ** 2 for c in f.terms.values()))


def sphere_monomial_weight(a: Expo) -> Fraction:
    """Exact squared norm of z^a in L^2 of the unit sphere in C^n:
    a! (n-1)! / (n-1+|a|)!.  Equals 1/k_a^2 for the usual normalization."""
    n = len(a)
    num = math.factorial(n - 1)
    for x in a:
        if x < 0:
            raise ValueError("sphere monomials need non-negative exponents")
        num *= math.factorial(x)
    return Fraction(num, math.factorial(n - 1 + sum(a)))


def sphere_pair_integral(a: Expo, b: Expo, n: int) -> float:
    """Integral of z^a conj(z)^b over the unit sphere in C^n: zero off the
    diagonal by rotation invariance, the exact monomial weight on it."""
    if len(a) != n or len(b) != n:
        raise ValueError("exponent length does not match dimension")
    if any(x < 0 for x in a) or any(x < 0 for x in b):
        raise ValueError("exponents must be componentwise non-negative")
    if tuple(a) != tuple(b):
        return 0.0
    return float(sphere_monomial_weight(tuple(a)))


def sphere_inner(f: LaurentPoly, g: LaurentPoly) -> complex:
    """L^2 pairing on the unit sphere for analytic polynomials."""
    if f.dim != g.dim:
        raise ValueError("dimension mismatch")
    if not (f.is_analytic() and g.is_analytic()):
        raise ValueError("sphere pairing requires analytic polynomials")
    total = 0j
    for e in sorted(f.terms):
        if e in g.terms:
            total += f.terms[e] * g.terms[e].conjugate() * float(sphere_monomial_weight(e))
    return total


def sphere_norm(f: LaurentPoly) -> float:
    return math.sqrt(max(sphere_inner(f, f).real, 0.0))


# -- pluriharmonic side ------------------------------------------------------

HTerm = tuple[Expo, Expo]  # (z exponents, conj(z) exponents), componentwise >= 0


class HarmonicPoly:
    """Sum of c * z^beta * conj(z)^gamma with beta, gamma >= 0.

    Outputs of harmonic_extension satisfy min(beta_i, gamma_i) = 0 termwise
    (the extension of a torus function is unique in that form).  Products of
    Wirtinger derivatives may carry genuinely mixed terms, so the class
    itself does not force disjointness.
    """

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: dict[HTerm, complex] | None = None):
        self.dim = dim
        self.terms = _clean(dict(terms) if terms else {})
        for beta, gamma in self.terms:
            if min(beta, default=0) < 0 or min(gamma, default=0) < 0:
                raise ValueError("harmonic terms need non-negative exponent pairs")

    @classmethod
    def zero(cls, dim: int) -> "HarmonicPoly":
        return cls(dim)

    @classmethod
    def constant(cls, dim: int, c: complex) -> "HarmonicPoly":
        z = (0,) * dim
        return cls(dim, {(z, z): complex(c)})

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(c) <= tol for c in self.terms.values())

    def is_disjoint(self) -> bool:
        """True when every stored term has min(beta_i, gamma_i) = 0."""
        return all(
            all(min(b, g) == 0 for b, g in zip(beta, gamma))
            for beta, gamma in self.terms
        )

    def __add__(self, other: "HarmonicPoly") -> "HarmonicPoly":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0j) + c
        return HarmonicPoly(self.dim, out)

    def __neg__(self):
        return HarmonicPoly(self.dim, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, HarmonicPoly):
            return HarmonicPoly(self.dim, {k: c * other for k, c in self.terms.items()})
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        out: dict[HTerm, complex] = {}
        for (b1, g1), c1 in self.terms.items():
            for (b2, g2), c2 in other.terms.items():
                key = (
                    tuple(x + y for x, y in zip(b1, b2)),
                    tuple(x + y for x, y in zip(g1, g2)),
                )
                out[key] = out.get(key, 0j) + c1 * c2
        return HarmonicPoly(self.dim, out)

    __rmul__ = __mul__

    def dz(self, i: int) -> "HarmonicPoly":
        out: dict[HTerm, complex] = {}
        for (beta, gamma), c in self.terms.items():
            if beta[i] == 0:
                continue
            nb = list(beta)
            nb[i] -= 1
            key = (tuple(nb), gamma)
            out[key] = out.get(key, 0j) + c * beta[i]
        return HarmonicPoly(self.dim, out)

    def dzbar(self, i: int) -> "HarmonicPoly":
        out: dict[HTerm, complex] = {}
        for (beta, gamma), c in self.terms.items():
            if gamma[i] == 0:
                continue
            ng = list(gamma)
            ng[i] -= 1
            key = (beta, tuple(ng))
            out[key] = out.get(key, 0j) + c * gamma[i]
        return HarmonicPoly(self.dim, out)

    def torus_restriction(self) -> LaurentPoly:
        """Substitute conj(z) = z^{-1} in every coordinate."""
        out: dict[Expo, complex] = {}
        for (beta, gamma), c in self.terms.items():
            e = tuple(b - g for b, g in zip(beta, gamma))
            out[e] = out.get(e, 0j) + c
        return LaurentPoly(self.dim, out)

    def reduce_coords_to_torus(self, coords: tuple[int, ...]) -> dict:
        """Collapse conj exponents into signed exponents on given coordinates.

        Returns a plain dict keyed by (signed-or-beta, gamma) pairs with the
        reduced coordinates carrying gamma = 0; used for zero tests of mixed
        identities that hold on disc-times-torus products.
        """
        out: dict[HTerm, complex] = {}
        for (beta, gamma), c in self.terms.items():
            nb, ng = list(beta), list(gamma)
            for i in coords:
                nb[i] = beta[i] - gamma[i]
                ng[i] = 0
            key = (tuple(nb), tuple(ng))
            out[key] = out.get(key, 0j) + c
        return _clean(out)

    def eval(self, z: tuple[complex, ...]) -> complex:
        total = 0j
        for (beta, gamma) in sorted(self.terms):
            c = self.terms[(beta, gamma)]
            v = c
            for zi, bi in zip(z, beta):
                if bi:
                    v *= zi ** bi
            for zi, gi in zip(z, gamma):
                if gi:
                    v *= zi.conjugate() ** gi
            total += v
        return total

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "terms": [
                {"c": [c.real, c.imag], "e": list(beta), "ebar": list(gamma)}
                for (beta, gamma), c in sorted(self.terms.items())
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "HarmonicPoly":
        terms = {
            (tuple(t["e"]), tuple(t.get("ebar", [0] * data["dim"]))): complex(
                t["c"][0], t["c"][1]
            )
            for t in data["terms"]
        }
        return cls(int(data["dim"]), terms)


def harmonic_extension(f: LaurentPoly) -> HarmonicPoly:
    """Pluriharmonic extension of a torus function, monomial by monomial:
    z^a -> z^(a+) conj(z)^(a-) with a+ = max(a,0), a- = max(-a,0)."""
    out: dict[HTerm, complex] = {}
    for e, c in f.terms.items():
        beta = tuple(max(x, 0) for x in e)
        gamma = tuple(max(-x, 0) for x in e)
        out[(beta, gamma)] = out.get((beta, gamma), 0j) + c
    return HarmonicPoly(f.dim, out)


def wirtinger_D(f: HarmonicPoly, g: HarmonicPoly, which: str) -> HarmonicPoly:
    """The two-variable derivative products used by the bidisc
    semi-commutator criterion:

        D1(f,g) = df/dz1 * dg/dzbar1,
        D2(f,g) = df/dz2 * dg/dzbar2,
        D12(f,g) = d^2 f/dz1 dz2 * d^2 g/dzbar1 dzbar2.
    """
    if f.dim != 2 or g.dim != 2:
        raise ValueError("wirtinger_D is defined for dimension 2")
    if which == "D1":
        return f.dz(0) * g.dzbar(0)
    if which == "D2":
        return f.dz(1) * g.dzbar(1)
    if which == "D12":
        return f.dz(0).dz(1) * g.dzbar(0).dzbar(1)
    raise ValueError(f"unknown derivative tag {which!r}")
