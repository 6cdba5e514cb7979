"""Basic polynomial maps, Jacobians, relative invariants, isotypic
projections, orbit index sets, and the lift/lower unitaries between the
quotient Hardy space and the isotypic component upstairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, permutations, product

from .groups import Character, Group, Hyperplane
from .laurent import (
    Expo,
    LaurentPoly,
    act,
    sphere_norm,
    torus_norm,
)


class NotInIsotypicError(ValueError):
    """Raised by lower() when the input is not of the form ell * (f o theta)."""


# -- basic polynomial maps ---------------------------------------------------


def _elementary_symmetric(n: int, i: int, inner_power: int) -> LaurentPoly:
    """e_i(z_1^m, ..., z_n^m) with exact integer coefficients."""
    terms = {}
    for subset in combinations(range(n), i):
        e = [0] * n
        for j in subset:
            e[j] = inner_power
        terms[tuple(e)] = terms.get(tuple(e), 0j) + 1.0
    return LaurentPoly(n, terms)


@dataclass
class BasicMap:
    """The components theta_1..theta_n generating the invariant ring."""

    group: Group
    components: tuple[LaurentPoly, ...]
    q: int

    @property
    def dim(self) -> int:
        return self.group.n

    def eval(self, z: tuple[complex, ...]) -> tuple[complex, ...]:
        return tuple(c.eval(z) for c in self.components)


def basic_map(group: Group) -> BasicMap:
    """For G(m,p,n): elementary symmetric polynomials of z_i^m in degrees
    1..n-1 together with (z_1...z_n)^q, q = m/p.  For the cyclic group on
    coordinate k: (z_1, ..., z_k^m, ..., z_n)."""
    spec = group.spec
    n = group.n
    if spec.kind == "Gmpn":
        comps = [_elementary_symmetric(n, i, group.m) for i in range(1, n)]
        e = (group.q,) * n
        comps.append(LaurentPoly.monomial(n, e))
        return BasicMap(group, tuple(comps), group.q)
    if spec.kind == "CyclicCoord":
        comps = []
        for i in range(n):
            power = group.m if i == spec.coord - 1 else 1
            e = [0] * n
            e[i] = power
            comps.append(LaurentPoly.monomial(n, tuple(e)))
        return BasicMap(group, tuple(comps), group.m)
    raise ValueError(f"unsupported group kind {spec.kind!r}")


def jacobian(bmap: BasicMap) -> LaurentPoly:
    """Determinant of the matrix of z-derivatives of the components,
    expanded symbolically over permutations (n stays small here)."""
    n = bmap.dim
    rows = [[bmap.components[i].dz(j) for j in range(n)] for i in range(n)]
    total = LaurentPoly.zero(n)
    for perm in permutations(range(n)):
        sign = 1.0 if _parity(perm) == 0 else -1.0
        term = LaurentPoly.constant(n, sign)
        for i in range(n):
            term = term * rows[i][perm[i]]
        total = total + term
    return total


def _parity(perm) -> int:
    p = 0
    for i, j in combinations(range(len(perm)), 2):
        if perm[i] > perm[j]:
            p ^= 1
    return p


def jacobian_closed_form(group: Group) -> LaurentPoly:
    """(m^n/p) (z_1...z_n)^(q-1) prod_{i<j} (z_i^m - z_j^m) for G(m,p,n)."""
    if group.spec.kind != "Gmpn":
        raise ValueError("closed form applies to G(m,p,n) only")
    n, m = group.n, group.m
    out = LaurentPoly.constant(n, group.m ** n / group.p)
    out = out * LaurentPoly.monomial(n, (group.q - 1,) * n)
    for i, j in combinations(range(n), 2):
        ei = [0] * n
        ei[i] = m
        ej = [0] * n
        ej[j] = m
        out = out * (LaurentPoly.monomial(n, tuple(ei)) - LaurentPoly.monomial(n, tuple(ej)))
    return out


def hyperplane_form(group: Group, plane: Hyperplane) -> LaurentPoly:
    coeffs = plane.coeffs()
    terms = {}
    for i, c in coeffs.items():
        e = [0] * group.n
        e[i] = 1
        terms[tuple(e)] = c
    return LaurentPoly(group.n, terms)


# -- projections -------------------------------------------------------------


def project(char: Character, f: LaurentPoly) -> LaurentPoly:
    """Group-averaged projection (1/|G|) sum_g conj(chi(g)) R_g f onto the
    isotypic component of a one-dimensional character."""
    group = char.group
    total = LaurentPoly.zero(f.dim)
    for g in group.elements:
        total = total + char.value_inv(g) * act(g, f)
    return total * (1.0 / len(group))


def monomial_stabilizer_turns(group: Group, alpha: Expo):
    """For every g fixing the exponent vector, the turn of the scalar with
    R_g z^alpha = zeta^turn z^alpha.  Exact."""
    alpha = tuple(alpha)
    out = []
    for g in group.elements:
        b = tuple(alpha[g.perm[j]] for j in range(len(alpha)))
        if b != alpha:
            continue
        turn = Fraction(sum(p * x for p, x in zip(g.phase, alpha)), g.mod) % 1
        out.append((g, turn))
    return out


def projection_norm_sq(char: Character, alpha: Expo) -> Fraction:
    """Exact squared torus norm of the projected monomial: |S_alpha|/|G| when
    the character matches the stabilizer's monomial character, else 0."""
    group = char.group
    stab = monomial_stabilizer_turns(group, alpha)
    for g, turn in stab:
        if char.turn(g) != turn:
            return Fraction(0)
    return Fraction(len(stab), len(group))


# -- relative invariants -----------------------------------------------------


@dataclass
class EllPoly:
    """Relative invariant ell_rho with its Hardy-space norm c_rho."""

    character: Character
    poly: LaurentPoly
    cnorm: float
    domain: str  # "polydisc" | "ball"


def ell(char: Character, domain: str = "polydisc", bmap: BasicMap | None = None) -> EllPoly:
    """Lowest-degree relative invariant for a one-dimensional character.

    Convention: ell_sgn is exactly the Jacobian of the basic map (constant
    unnormalized); every other character gets the monic hyperplane product
    prod L_i^(c_i) with the least non-negative exponents c_i.  The norm
    c_rho is recomputed from the chosen polynomial.
    """
    group = char.group
    if bmap is None:
        bmap = basic_map(group)
    sgn = [(-group.det_turn(g)) % 1 for g in group.elements]
    if char._turns == sgn:
        poly = jacobian(bmap)
    else:
        poly = LaurentPoly.constant(group.n, 1.0)
        for plane in group.reflections():
            c = plane.c_exponent(char)
            if c:
                poly = poly * (hyperplane_form(group, plane) ** c)
    if domain == "polydisc":
        cnorm = torus_norm(poly)
    elif domain == "ball":
        cnorm = sphere_norm(poly)
    else:
        raise ValueError(f"unknown domain tag {domain!r}")
    return EllPoly(char, poly, cnorm, domain)


# -- orbit index sets and basis elements -------------------------------------


@dataclass
class BasisIndexSet:
    """Canonical orbit representatives indexing the projected-monomial basis
    of one isotypic component, up to a sup-norm degree bound."""

    character: Character
    bound: int
    holomorphic: bool
    reps: list[Expo]

    def __contains__(self, expo: Expo) -> bool:
        return tuple(expo) in self._repset

    def __iter__(self):
        return iter(self.reps)

    def __len__(self):
        return len(self.reps)

    def __post_init__(self):
        self._repset = set(self.reps)


def _candidate_reps(group: Group, bound: int, holomorphic: bool):
    lo = 0 if holomorphic else -bound
    rng = range(lo, bound + 1)
    if group.spec.kind == "Gmpn":
        # canonical representatives are the weakly increasing tuples
        yield from combinations_with_replacement(rng, group.n)
    else:
        yield from product(rng, repeat=group.n)


def index_set(char: Character, bound: int, holomorphic: bool = True) -> BasisIndexSet:
    """All canonical orbit representatives with sup-norm <= bound whose
    projection is nonzero, ordered by (total degree, lex)."""
    if bound < 0:
        raise ValueError("degree bound must be >= 0")
    group = char.group
    reps = [
        alpha
        for alpha in _candidate_reps(group, bound, holomorphic)
        if projection_norm_sq(char, alpha) > 0
    ]
    reps.sort(key=lambda a: (sum(a), a))
    return BasisIndexSet(char, bound, holomorphic, reps)


def basis_element(iset: BasisIndexSet, mvec: Expo, domain: str = "polydisc") -> LaurentPoly:
    """Unit-normalized projected monomial gamma_m.

    On free orbits this equals sqrt(|G|) * P_rho z^m; orbits with nontrivial
    monomial stabilizer get the exact correction sqrt(|G|/|S_m|), so the
    family is orthonormal rather than merely orthogonal.
    """
    mvec = tuple(mvec)
    if mvec not in iset:
        raise KeyError(f"{mvec} is not a canonical representative of this index set")
    char = iset.character
    f = project(char, LaurentPoly.monomial(char.group.n, mvec))
    if domain == "polydisc":
        nsq = projection_norm_sq(char, mvec)
        return f * (1.0 / math.sqrt(nsq))
    if domain == "ball":
        return f * (1.0 / sphere_norm(f))
    raise ValueError(f"unknown domain tag {domain!r}")


# -- exact division and the theta rewrite ------------------------------------


def divide_exact(F: LaurentPoly, ell_poly: LaurentPoly, rel_tol: float = 1e-9) -> LaurentPoly:
    """Exact polynomial division F / ell for analytic inputs.

    Single-divisor reduction in lex order; terms never divisible by the
    divisor's leading term accumulate as a remainder, which must vanish up
    to rel_tol times the input scale.
    """
    if not (F.is_analytic() and ell_poly.is_analytic()):
        raise NotInIsotypicError("division expects analytic polynomials")
    if ell_poly.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    lt = max(ell_poly.terms)
    lc = ell_poly.terms[lt]
    rem = dict(F.terms)
    quot: dict[Expo, complex] = {}
    remainder_mass = 0.0
    guard = 0
    cap = 16 * (len(F.terms) + 1) * (F.total_degree() + 2) ** F.dim + 64
    while rem:
        guard += 1
        if guard > cap:
            raise NotInIsotypicError("division did not terminate (input not divisible)")
        e = max(rem)
        c = rem.pop(e)
        if abs(c) < 1e-14 * max(F.max_abs_coeff(), 1.0):
            continue
        diff = tuple(a - b for a, b in zip(e, lt))
        if min(diff) < 0:
            remainder_mass += abs(c)
            continue
        qc = c / lc
        quot[diff] = quot.get(diff, 0j) + qc
        for le, lcoef in ell_poly.terms.items():
            if le == lt:
                continue
            te = tuple(a + b for a, b in zip(diff, le))
            rem[te] = rem.get(te, 0j) - qc * lcoef
            if abs(rem[te]) < 1e-15 * max(F.max_abs_coeff(), 1.0):
                del rem[te]
    scale = max(F.max_abs_coeff(), 1.0)
    if remainder_mass > rel_tol * scale:
        raise NotInIsotypicError(
            f"nonzero division remainder (mass {remainder_mass:.3g}); "
            "input is not in the isotypic component"
        )
    return LaurentPoly(F.dim, quot)


def rewrite_in_theta(bmap: BasicMap, h: LaurentPoly, rel_tol: float = 1e-9) -> LaurentPoly:
    """Write a G-invariant analytic polynomial as a polynomial in the basic
    invariants, by leading-term elimination against the triangular system.

    For G(m,p,n) the lex-leading exponent lam of an invariant is weakly
    decreasing with m | (lam_i - lam_{i+1}) and q | lam_n; each step strips
    coeff * theta^a with a_i = (lam_i - lam_{i+1})/m, a_n = lam_n / q.
    """
    group = bmap.group
    n = group.n
    if not h.is_analytic():
        raise NotInIsotypicError("theta rewrite expects an analytic polynomial")
    if group.spec.kind == "CyclicCoord":
        k = group.spec.coord - 1
        out = {}
        for e, c in h.terms.items():
            if e[k] % group.m:
                raise NotInIsotypicError(
                    f"exponent {e} is not invariant under the cyclic action"
                )
            f = list(e)
            f[k] //= group.m
            out[tuple(f)] = c
        return LaurentPoly(n, out)

    m, q = group.m, group.q
    scale = max(h.max_abs_coeff(), 1.0)
    floor = rel_tol * scale * 1e-3
    work = LaurentPoly(n, {e: c for e, c in h.terms.items() if abs(c) > floor})
    out: dict[Expo, complex] = {}
    guard = 0
    cap = (h.total_degree() + 2) ** n + 64
    while work.terms:
        guard += 1
        if guard > cap:
            raise NotInIsotypicError("theta rewrite did not terminate")
        lam = max(work.terms)
        c = work.terms[lam]
        exps = []
        ok = all(lam[i] >= lam[i + 1] for i in range(n - 1))
        if ok:
            for i in range(n - 1):
                d = lam[i] - lam[i + 1]
                if d % m:
                    ok = False
                    break
                exps.append(d // m)
            if ok and lam[n - 1] % q == 0:
                exps.append(lam[n - 1] // q)
            else:
                ok = False
        if not ok:
            raise NotInIsotypicError(
                f"leading exponent {lam} is incompatible with the invariant ring"
            )
        a = tuple(exps)
        out[a] = out.get(a, 0j) + c
        prod = LaurentPoly.constant(n, c)
        for comp, ai in zip(bmap.components, a):
            if ai:
                prod = prod * (comp ** ai)
        diff = work - prod
        work = LaurentPoly(n, {e: v for e, v in diff.terms.items() if abs(v) > floor})
    return LaurentPoly(n, out)


# -- lift and lower ----------------------------------------------------------


def lift(ellp: EllPoly, bmap: BasicMap, f: LaurentPoly) -> LaurentPoly:
    """(1/c_rho) ell_rho * (f o theta): carries polynomials on the quotient
    into the isotypic component upstairs."""
    return ellp.poly * f.substitute(list(bmap.components)) * (1.0 / ellp.cnorm)


def lower(ellp: EllPoly, bmap: BasicMap, F: LaurentPoly) -> LaurentPoly:
    """Inverse of lift: exact division by ell_rho, then the theta rewrite,
    scaled by c_rho.  Raises NotInIsotypicError when F is not of the form
    ell_rho * (invariant)."""
    quotient = divide_exact(F, ellp.poly)
    return rewrite_in_theta(bmap, quotient) * ellp.cnorm
