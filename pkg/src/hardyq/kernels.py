"""Szego kernels: closed forms on the polydisc, ball and the rank-2 type-III
Cartan domain; group-averaged quotient kernels; the tetrablock kernel;
truncated series kernels in quotient coordinates; pushforward-measure
integrals; and reproducing-property residuals.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

from .groups import Character, Group, make_character, make_group, parse_group_spec
from .invariants import (
    BasicMap,
    EllPoly,
    basic_map,
    basis_element,
    ell,
    index_set,
    lift,
    lower,
)
from .laurent import HarmonicPoly, LaurentPoly, torus_inner

Point = tuple[complex, ...]


class DomainError(ValueError):
    pass


class SingularPointError(ValueError):
    """Evaluation at a zero of ell_rho; the limit exists but must be taken
    through the series kernel."""


# -- domains -----------------------------------------------------------------


def in_polydisc(z: Point) -> bool:
    return max(abs(x) for x in z) < 1.0


def in_ball(z: Point) -> bool:
    return sum(abs(x) ** 2 for x in z) < 1.0


def _sym2(z: Point) -> list[list[complex]]:
    """Identify (z1, z2, z3) with the symmetric matrix [[z1, z3], [z3, z2]]."""
    return [[z[0], z[2]], [z[2], z[1]]]


def in_cartan3_rank2(z: Point) -> bool:
    """I - Z Z* positive definite for the symmetric 2x2 matrix Z."""
    if len(z) != 3:
        return False
    Z = _sym2(z)
    # H = I - Z conj(Z)^T, Hermitian 2x2
    h11 = 1.0 - (Z[0][0] * Z[0][0].conjugate() + Z[0][1] * Z[0][1].conjugate())
    h22 = 1.0 - (Z[1][0] * Z[1][0].conjugate() + Z[1][1] * Z[1][1].conjugate())
    h12 = -(Z[0][0] * Z[1][0].conjugate() + Z[0][1] * Z[1][1].conjugate())
    det = h11.real * h22.real - abs(h12) ** 2
    return h11.real > 0 and det > 0


DOMAIN_PREDICATES = {
    "polydisc": in_polydisc,
    "ball": in_ball,
    "cartan3rank2": in_cartan3_rank2,
}


def check_point(domain: str, z: Point):
    pred = DOMAIN_PREDICATES.get(domain)
    if pred is None:
        raise DomainError(f"unknown domain tag {domain!r}")
    if not pred(tuple(z)):
        raise DomainError(f"point {z} is not in the {domain}")


# -- kernel specification ----------------------------------------------------


@dataclass
class KernelSpec:
    """Base kernel (no group) or quotient kernel (group + character + map)."""

    domain: str
    group: Group | None = None
    character: Character | None = None
    bmap: BasicMap | None = field(default=None, repr=False)
    ellp: EllPoly | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.domain not in DOMAIN_PREDICATES:
            raise DomainError(f"unknown domain tag {self.domain!r}")
        has_group = self.group is not None
        if has_group != (self.character is not None):
            raise DomainError("group and character must be given together")
        if has_group:
            if self.domain == "cartan3rank2":
                raise DomainError(
                    "quotient kernels are supported on the polydisc and ball; "
                    "the tetrablock case is hard-coded as tetrablock_kernel"
                )
            if self.domain == "ball" and self.group.spec.kind != "CyclicCoord":
                raise DomainError("ball quotients are provided for cyclic coordinate groups")
            if self.bmap is None:
                self.bmap = basic_map(self.group)
            if self.ellp is None:
                self.ellp = ell(self.character, domain=self.domain, bmap=self.bmap)

    @property
    def is_quotient(self) -> bool:
        return self.group is not None

    @classmethod
    def from_json(cls, data: dict) -> "KernelSpec":
        group = None
        character = None
        if data.get("group"):
            group = make_group(parse_group_spec(data["group"]))
            character = make_character(group, data.get("character", "sgn"))
        return cls(domain=data["domain"], group=group, character=character)


def make_kernel_spec(domain: str, group_text: str | None = None,
                     character_name: str = "sgn") -> KernelSpec:
    group = make_group(group_text) if group_text else None
    char = make_character(group, character_name) if group else None
    return KernelSpec(domain, group, char)


# -- base kernels ------------------------------------------------------------


def base_kernel(spec: KernelSpec | str, z: Point, w: Point) -> complex:
    """Szego kernel of the base domain.

    polydisc: prod 1/(1 - z_j conj(w_j)); ball: (1 - <z, w>)^(-n);
    cartan3rank2: principal branch of det(I - Z W*)^(-3/2), guarded so the
    determinant stays in the right half plane.
    """
    domain = spec.domain if isinstance(spec, KernelSpec) else spec
    z, w = tuple(z), tuple(w)
    check_point(domain, z)
    check_point(domain, w)
    if domain == "polydisc":
        out = 1.0 + 0j
        for a, b in zip(z, w):
            out /= 1.0 - a * b.conjugate()
        return out
    if domain == "ball":
        s = sum(a * b.conjugate() for a, b in zip(z, w))
        return (1.0 - s) ** (-len(z))
    # cartan3rank2
    Z, W = _sym2(z), _sym2(w)
    Wst = [[W[j][i].conjugate() for j in range(2)] for i in range(2)]
    prod = [
        [sum(Z[i][k] * Wst[k][j] for k in range(2)) for j in range(2)]
        for i in range(2)
    ]
    det = (1.0 - prod[0][0]) * (1.0 - prod[1][1]) - prod[0][1] * prod[1][0]
    if det.real <= 0:
        raise DomainError(
            f"branch guard violated: Re det(I - ZW*) = {det.real:.3g} <= 0"
        )
    return cmath.exp(-1.5 * cmath.log(det))


# -- quotient kernels --------------------------------------------------------


def _singularity_floor(ellp: EllPoly, z: Point) -> float:
    deg = ellp.poly.total_degree()
    margin = 1.0 - max(abs(x) for x in z)
    return 1e-6 * margin ** max(deg, 1)


def quotient_kernel(spec: KernelSpec, z: Point, w: Point) -> complex:
    """Group-averaged kernel on the quotient, evaluated at base points:

        (c^2/|G|) * (1/(ell(z) conj(ell(w)))) * sum_g conj(chi(g)) S(g^{-1}z, w).

    Depends on (z, w) only through (theta(z), theta(w)).  Near the zero set
    of ell the removable singularity is not evaluated here; use
    series_kernel instead.
    """
    if not spec.is_quotient:
        raise DomainError("quotient_kernel needs a group and character")
    z, w = tuple(z), tuple(w)
    ellp = spec.ellp
    lz = ellp.poly.eval(z)
    lw = ellp.poly.eval(w)
    if abs(lz) <= _singularity_floor(ellp, z) or abs(lw) <= _singularity_floor(ellp, w):
        raise SingularPointError(
            "ell_rho vanishes at an evaluation point; the kernel extends "
            "holomorphically there, evaluate via series_kernel"
        )
    group = spec.group
    char = spec.character
    total = 0j
    for g in group.elements:
        # matches the function action R_g f = f o g: the kernel section
        # transforms through the matrix itself
        gz = g.apply_point(z)
        total += char.value_inv(g) * base_kernel(spec.domain, gz, w)
    scale = ellp.cnorm ** 2 / len(group)
    return scale * total / (lz * lw.conjugate())


def tetrablock_kernel(z: Point, w: Point, tol: float = 1e-12) -> complex:
    """Szego kernel of the image of the rank-2 type-III domain under
    (z1, z2, z3) -> (z1, z2, z3^2 - z1 z2), via the two-term average

        [S(z, w) - S((z1, z2, -z3), w)] / (4 z3 conj(w3)).
    """
    z, w = tuple(z), tuple(w)
    check_point("cartan3rank2", z)
    check_point("cartan3rank2", w)
    if abs(z[2]) <= tol or abs(w[2]) <= tol:
        raise SingularPointError("z3 and w3 must stay away from the branch locus")
    flipped = (z[0], z[1], -z[2])
    num = base_kernel("cartan3rank2", z, w) - base_kernel("cartan3rank2", flipped, w)
    return num / (4.0 * z[2] * w[2].conjugate())


# -- series kernels in quotient coordinates ----------------------------------


class SeriesKernel:
    """Truncated expansion sum_m e_m(x) conj(e_m(y)) over the lowered
    orthonormal basis, for points x = theta(z) in quotient coordinates."""

    def __init__(self, spec: KernelSpec, bound: int):
        if not spec.is_quotient:
            raise DomainError("series kernels need a group and character")
        self.spec = spec
        self.bound = bound
        iset = index_set(spec.character, bound, holomorphic=True)
        self.basis_down: list[LaurentPoly] = []
        for mvec in iset:
            gam = basis_element(iset, mvec, domain=spec.domain)
            self.basis_down.append(lower(spec.ellp, spec.bmap, gam))

    def eval(self, x: Point, y: Point) -> complex:
        total = 0j
        for e in self.basis_down:
            total += e.eval(tuple(x)) * e.eval(tuple(y)).conjugate()
        return total


def series_kernel(spec: KernelSpec, x: Point, y: Point, bound: int) -> complex:
    return SeriesKernel(spec, bound).eval(x, y)


# -- pushforward measure and reproducing property -----------------------------


def pushforward_integral(spec: KernelSpec, f: HarmonicPoly) -> complex:
    """Integral of a polynomial in quotient coordinates t, conj(t) against
    the pushforward measure: substitute theta, multiply by |ell|^2 and take
    the torus constant term.  Exact (polydisc quotients)."""
    if not spec.is_quotient or spec.domain != "polydisc":
        raise DomainError("pushforward integrals are defined for polydisc quotients")
    comps = list(spec.bmap.components)
    comps_bar = [c.conj_torus() for c in comps]
    total = LaurentPoly.zero(spec.group.n)
    for (beta, gamma) in sorted(f.terms):
        c = f.terms[(beta, gamma)]
        term = LaurentPoly.constant(spec.group.n, c)
        for comp, b in zip(comps, beta):
            if b:
                term = term * (comp ** b)
        for comp, g in zip(comps_bar, gamma):
            if g:
                term = term * (comp ** g)
        total = total + term
    weighted = total * spec.ellp.poly * spec.ellp.poly.conj_torus()
    return weighted.coeff((0,) * spec.group.n)


def reproducing_check(spec: KernelSpec, f: LaurentPoly, w: Point, bound: int) -> float:
    """|<f, S(. , theta(w))> - f(theta(w))| for the truncated kernel; zero up
    to rounding once the truncation dominates deg f."""
    if not spec.is_quotient:
        raise DomainError("reproducing_check needs a quotient kernel spec")
    check_point(spec.domain, tuple(w))
    iset = index_set(spec.character, bound, holomorphic=True)
    tw = spec.bmap.eval(tuple(w))
    F = lift(spec.ellp, spec.bmap, f)
    total = 0j
    for mvec in iset:
        gam = basis_element(iset, mvec, domain=spec.domain)
        if spec.domain == "polydisc":
            coeff = torus_inner(F, gam)
        else:
            from .laurent import sphere_inner

            coeff = sphere_inner(F, gam)
        e_down = lower(spec.ellp, spec.bmap, gam)
        total += coeff * e_down.eval(tw)
    return abs(total - f.eval(tw))


# -- ellipsoid constants (reported, not asserted) ------------------------------


def ellipsoid_constants(m: int, n: int) -> dict:
    """Hardy-space norm of ell_sgn on the ball for the cyclic quotient
    z1 -> z1^m, recomputed from exact sphere monomial norms, next to the
    previously published values (c_{m,2} = 1, c_{m,3} = 2/(m+1)).  The two
    disagree; the recomputed value is what this package uses."""
    group = make_group(f"Z({m})@1^{n}")
    bmap = basic_map(group)
    char = make_character(group, "sgn")
    ellp = ell(char, domain="ball", bmap=bmap)
    recomputed_sq = ellp.cnorm ** 2
    published = {2: 1.0, 3: 2.0 / (m + 1)}.get(n)
    return {
        "m": m,
        "n": n,
        "c_squared_recomputed": recomputed_sq,
        "c_recomputed": ellp.cnorm,
        "c_published": published,
        "discrepancy": (
            published is not None
            and abs(recomputed_sq - published**2) > 1e-12 * max(recomputed_sq, 1.0)
        ),
        "note": "package uses the recomputed value; published constant kept for reference",
    }
