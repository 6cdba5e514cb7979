"""Exact Toeplitz computations on the quotient Hardy spaces of the polydisc
(and sphere entries for the ellipsoid case), plus verifiers for the operator
identities: shift relations, product and commuting correspondences across
realizations, bidisc semi-commutator criteria, symbol recovery from
stabilized windows, and the compactness probe.

Everything here is a finite Laurent-polynomial pairing; no quadrature.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .groups import Character, Group
from .invariants import (
    BasicMap,
    EllPoly,
    NotInIsotypicError,
    basic_map,
    ell,
    index_set,
    lower,
    project,
    projection_norm_sq,
)
from .laurent import (
    Expo,
    HarmonicPoly,
    LaurentPoly,
    act,
    canonical_exponent,
    harmonic_extension,
    orbit_exponents,
    sphere_monomial_weight,
    sphere_pair_integral,
    torus_inner,
    wirtinger_D,
)

RESIDUAL_TOL = 1e-10


class SymbolError(ValueError):
    pass


class WindowMarginError(ValueError):
    """Window too small for the requested comparison; message names the
    required bound."""


class RecoveryError(ValueError):
    pass


# -- symbols -----------------------------------------------------------------


@dataclass
class SymbolPair:
    """A bounded symbol on the quotient boundary, stored through its
    pullback u o theta: a G-invariant Laurent polynomial on the torus.  The
    representation in quotient coordinates (a polynomial in t and conj t) is
    computed on demand and cached."""

    group: Group
    pullback: LaurentPoly
    _theta_form: HarmonicPoly | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.pullback.dim != self.group.n:
            raise SymbolError("symbol dimension does not match the group")
        scale = max(self.pullback.max_abs_coeff(), 1.0)
        for g in self.group.elements:
            if not (act(g, self.pullback) - self.pullback).is_zero(tol=1e-9 * scale):
                raise SymbolError("pullback symbol is not G-invariant")

    def radius(self) -> int:
        return self.pullback.degree_radius()

    def theta_form(self, bmap: BasicMap) -> HarmonicPoly:
        """u as a polynomial in t, conj(t): clear torus denominators with
        theta_n (unimodular on the torus), rewrite the analytic invariant in
        theta coordinates, then restore conj(t_n)^K."""
        if self._theta_form is not None:
            return self._theta_form
        n = self.group.n
        q = bmap.q
        worst = 0
        for e in self.pullback.terms:
            worst = max(worst, max((-x for x in e), default=0))
        K = -(-worst // q)  # ceil
        theta_n = bmap.components[-1]
        cleared = self.pullback * (theta_n ** K)
        from .invariants import rewrite_in_theta

        analytic_t = rewrite_in_theta(bmap, cleared)
        terms: dict = {}
        gbar = [0] * n
        gbar[n - 1] = K
        for e, c in analytic_t.terms.items():
            terms[(e, tuple(gbar))] = c
        self._theta_form = HarmonicPoly(n, terms)
        return self._theta_form


def symbol_from_theta(group: Group, bmap: BasicMap, u: HarmonicPoly) -> SymbolPair:
    """Pull a quotient-coordinate symbol back to the torus."""
    comps = list(bmap.components)
    comps_bar = [c.conj_torus() for c in comps]
    total = LaurentPoly.zero(group.n)
    for (beta, gamma) in sorted(u.terms):
        c = u.terms[(beta, gamma)]
        term = LaurentPoly.constant(group.n, c)
        for comp, b in zip(comps, beta):
            if b:
                term = term * (comp ** b)
        for comp, g in zip(comps_bar, gamma):
            if g:
                term = term * (comp ** g)
        total = total + term
    return SymbolPair(group, total)


# -- Hardy projections and the operator action --------------------------------


def hol_project(f: LaurentPoly, character: Character | None = None) -> LaurentPoly:
    """Hardy projection on the polydisc: drop every term with a negative
    exponent.  With a character, also apply the isotypic projection; the two
    commute (permutations preserve the negativity pattern)."""
    kept = {e: c for e, c in f.terms.items() if min(e) >= 0}
    out = LaurentPoly(f.dim, kept)
    if character is not None:
        out = project(character, out)
    return out


def apply_toeplitz(symbol: SymbolPair, character: Character, f: LaurentPoly,
                   validate: bool = False) -> LaurentPoly:
    """T_u f = P(u f) for f in the isotypic Hardy component; exact.

    With validate=True the input's relative invariance is checked first.
    """
    if validate:
        scale = max(f.max_abs_coeff(), 1.0)
        for g in character.group.elements:
            if not (act(g, f) - character.value(g) * f).is_zero(tol=1e-9 * scale):
                raise SymbolError("input is not in this isotypic component")
    return hol_project(symbol.pullback * f, character)


# -- orthonormal gamma basis helpers ------------------------------------------


class GammaBasis:
    """Cache of unit-normalized projected monomials for one character."""

    def __init__(self, character: Character):
        self.character = character
        self.group = character.group
        self._cache: dict[Expo, LaurentPoly] = {}

    def __call__(self, rep: Expo) -> LaurentPoly:
        rep = tuple(rep)
        got = self._cache.get(rep)
        if got is None:
            nsq = projection_norm_sq(self.character, rep)
            if nsq == 0:
                raise KeyError(f"projection of z^{rep} vanishes")
            f = project(
                self.character, LaurentPoly.monomial(self.group.n, rep)
            )
            got = f * (1.0 / math.sqrt(nsq))
            self._cache[rep] = got
        return got

    def expand(self, poly: LaurentPoly, tol: float = 1e-9) -> dict[Expo, complex]:
        """Coefficients of an analytic isotypic polynomial over the basis;
        raises if a residual remains (input outside the component)."""
        group = self.group
        out: dict[Expo, complex] = {}
        recon = LaurentPoly.zero(poly.dim)
        reps = sorted({canonical_exponent(group, e) for e in poly.terms})
        for rep in reps:
            if projection_norm_sq(self.character, rep) == 0:
                continue
            g = self(rep)
            c = torus_inner(poly, g)
            if c != 0:
                out[rep] = c
                recon = recon + c * g
        scale = max(poly.max_abs_coeff(), 1.0)
        if not (poly - recon).is_zero(tol=tol * scale):
            raise NotInIsotypicError("polynomial is not in this isotypic component")
        return out


# -- windows ------------------------------------------------------------------


@dataclass
class ToeplitzWindow:
    character: Character
    bound: int
    reps: list[Expo]
    entries: np.ndarray  # entries[i, j] = <T gamma_reps[j], gamma_reps[i]>

    def __post_init__(self):
        self.pos = {r: i for i, r in enumerate(self.reps)}

    @property
    def group(self) -> Group:
        return self.character.group

    def entry(self, row: Expo, col: Expo):
        i = self.pos.get(tuple(row))
        j = self.pos.get(tuple(col))
        if i is None or j is None:
            return None
        return complex(self.entries[i, j])

    def scale(self) -> float:
        top = float(np.max(np.abs(self.entries))) if self.entries.size else 0.0
        return max(top, 1.0)

    def to_json(self) -> dict:
        return {
            "character": self.character.name,
            "group": str(self.group.spec),
            "bound": self.bound,
            "rows": [list(r) for r in self.reps],
            "cols": [list(r) for r in self.reps],
            "entries": [
                [[self.entries[i, j].real, self.entries[i, j].imag]
                 for j in range(len(self.reps))]
                for i in range(len(self.reps))
            ],
        }


def toeplitz_window(symbol: SymbolPair, character: Character, bound: int,
                    basis: GammaBasis | None = None) -> ToeplitzWindow:
    """Matrix of <T_u gamma_p, gamma_m> over the canonical index set with
    sup-norm <= bound.  Each entry is an exact torus pairing (gamma_m is
    analytic and isotypic, so the Hardy projection is absorbed)."""
    if bound < symbol.radius():
        warnings.warn(
            f"window bound {bound} is below the symbol degree radius "
            f"{symbol.radius()}; edge entries will not determine the symbol",
            stacklevel=2,
        )
    basis = basis or GammaBasis(character)
    iset = index_set(character, bound, holomorphic=True)
    reps = list(iset.reps)
    gammas = [basis(r) for r in reps]
    entries = np.zeros((len(reps), len(reps)), dtype=complex)
    for j, g_col in enumerate(gammas):
        prod = symbol.pullback * g_col
        for i, g_row in enumerate(gammas):
            entries[i, j] = torus_inner(prod, g_row)
    return ToeplitzWindow(character, bound, reps, entries)


def operator_window(op_columns: dict[Expo, LaurentPoly], character: Character,
                    bound: int, basis: GammaBasis | None = None) -> ToeplitzWindow:
    """Window of an operator given by its exact action on basis columns."""
    basis = basis or GammaBasis(character)
    iset = index_set(character, bound, holomorphic=True)
    reps = list(iset.reps)
    entries = np.zeros((len(reps), len(reps)), dtype=complex)
    for j, rep in enumerate(reps):
        col = op_columns[rep]
        for i, r in enumerate(reps):
            entries[i, j] = torus_inner(col, basis(r))
    return ToeplitzWindow(character, bound, reps, entries)


# -- Brown-Halmos window verification -----------------------------------------


@dataclass
class BHReport:
    max_violation: float
    worst_pair: tuple | None
    checked_pairs: int
    relation_max: dict[str, float]

    @property
    def ok(self) -> bool:
        return self.max_violation <= RESIDUAL_TOL

    def to_json(self) -> dict:
        return {
            "max_violation": self.max_violation,
            "worst_pair": repr(self.worst_pair),
            "checked_pairs": self.checked_pairs,
            "relation_max": self.relation_max,
            "ok": self.ok,
        }


def _shift(rep: Expo, k: int) -> Expo:
    return tuple(x + k for x in rep)


def bh_check(window: ToeplitzWindow, bmap: BasicMap,
             basis: GammaBasis | None = None) -> BHReport:
    """Verify the shift relations of a window against the basic map of
    G(m,p,n), restricted to pairs whose shifted and expanded indices stay
    inside the window:

        (a)  <T theta_n g_a, theta_n g_b> = <T g_a, g_b>
        (b)  <T theta_n^p g_a, theta_i g_b> = <T theta_{n-i} g_a, g_b>

    The expansions gamma -> theta_j gamma are exact ambient multiplications.
    Reports the worst violation; never raises on one.
    """
    group = window.group
    if group.spec.kind != "Gmpn":
        raise ValueError("the shift relations are stated for G(m,p,n) quotients")
    basis = basis or GammaBasis(window.character)
    n, q, m = group.n, group.q, group.m
    reps = window.reps
    scale = window.scale()
    worst = 0.0
    worst_pair = None
    checked = 0
    rel_max = {"shift": 0.0}

    # (a) diagonal shift invariance
    for a in reps:
        for b in reps:
            e0 = window.entry(b, a)
            e1 = window.entry(_shift(b, q), _shift(a, q))
            if e1 is None:
                continue
            checked += 1
            v = abs(e1 - e0) / scale
            rel_max["shift"] = max(rel_max["shift"], v)
            if v > worst:
                worst, worst_pair = v, ("shift", a, b)

    # (b) cross relations, one per coordinate of the map
    expansions: dict[int, dict[Expo, dict[Expo, complex]]] = {}
    for i in range(n - 1):
        exp_i: dict[Expo, dict[Expo, complex]] = {}
        exp_ni: dict[Expo, dict[Expo, complex]] = {}
        # 1-based labels: loop index i stands for theta_{i+1}'s relation,
        # pairing theta_{i+1} on the left with theta_{n-(i+1)} on the right
        theta_i = bmap.components[i]
        theta_ni = bmap.components[n - i - 2]
        for r in reps:
            try:
                exp_i[r] = basis.expand(theta_i * basis(r))
                exp_ni[r] = basis.expand(theta_ni * basis(r))
            except NotInIsotypicError:  # pragma: no cover - structural
                continue
        expansions[i] = {"i": exp_i, "ni": exp_ni}

    for i in range(n - 1):
        exp_i = expansions[i]["i"]
        exp_ni = expansions[i]["ni"]
        for a in reps:
            lhs_col = _shift(a, m)  # theta_n^p shifts every exponent by q*p = m
            if lhs_col not in window.pos:
                continue
            rhs_terms = exp_ni.get(a)
            if rhs_terms is None or not all(k in window.pos for k in rhs_terms):
                continue
            for b in reps:
                lhs_terms = exp_i.get(b)
                if lhs_terms is None or not all(k in window.pos for k in lhs_terms):
                    continue
                lhs = sum(
                    c.conjugate() * window.entry(k, lhs_col)
                    for k, c in lhs_terms.items()
                )
                rhs = sum(c * window.entry(b, k) for k, c in rhs_terms.items())
                checked += 1
                v = abs(lhs - rhs) / scale
                key = f"cross_{i + 1}"
                rel_max[key] = max(rel_max.get(key, 0.0), v)
                if v > worst:
                    worst, worst_pair = v, (key, a, b)

    return BHReport(worst, worst_pair, checked, rel_max)


# -- products, commutators, correspondences ------------------------------------


@dataclass
class CompareReport:
    mode: str
    verdict: bool
    max_residual: float
    reps: list[Expo]
    residuals: np.ndarray

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "verdict": bool(self.verdict),
            "max_residual": self.max_residual,
            "reps": [list(r) for r in self.reps],
        }


def _column_fn(mode: str, symbols: list[SymbolPair], character: Character):
    """Column map g -> (compared operator) g, built once per comparison."""
    if mode == "semi":
        u, v = symbols
        uv = SymbolPair(u.group, u.pullback * v.pullback)

        def col(g: LaurentPoly) -> LaurentPoly:
            lhs = apply_toeplitz(u, character, apply_toeplitz(v, character, g))
            return lhs - apply_toeplitz(uv, character, g)

        return col
    if mode == "commute":
        u, v = symbols

        def col(g: LaurentPoly) -> LaurentPoly:
            a = apply_toeplitz(u, character, apply_toeplitz(v, character, g))
            b = apply_toeplitz(v, character, apply_toeplitz(u, character, g))
            return a - b

        return col
    if mode in ("zeroProduct", "finiteProduct"):

        def col(g: LaurentPoly) -> LaurentPoly:
            out = g
            for s in reversed(symbols):
                out = apply_toeplitz(s, character, out)
            return out

        return col
    raise ValueError(f"unknown comparison mode {mode!r}")


def product_compare(u: SymbolPair, v: SymbolPair | None, mode: str,
                    character: Character, bound: int,
                    chain: list[SymbolPair] | None = None) -> CompareReport:
    """Entries of T_u T_v - T_{uv} (semi), T_u T_v - T_v T_u (commute), or a
    product chain (zeroProduct / finiteProduct) over the window.

    Columns are computed by exact repeated application, so every entry is
    exact; the margin requirement keeps the window verdict meaningful for
    the symbols' degree range.
    """
    if mode in ("zeroProduct", "finiteProduct"):
        symbols = chain if chain is not None else [u, v]
        symbols = [s for s in symbols if s is not None]
    else:
        symbols = [u, v]
    radius = sum(s.radius() for s in symbols)
    if bound < radius:
        raise WindowMarginError(
            f"window bound {bound} is below the combined symbol radius; "
            f"need D >= {radius}"
        )
    basis = GammaBasis(character)
    iset = index_set(character, bound, holomorphic=True)
    reps = list(iset.reps)
    res = np.zeros((len(reps), len(reps)), dtype=complex)
    scale = max(
        math.prod(max(s.pullback.max_abs_coeff(), 1.0) for s in symbols), 1.0
    )
    column = _column_fn(mode, symbols, character)
    for j, a in enumerate(reps):
        col = column(basis(a))
        for i, b in enumerate(reps):
            res[i, j] = torus_inner(col, basis(b))
    max_res = float(np.max(np.abs(res))) if res.size else 0.0
    verdict = max_res <= RESIDUAL_TOL * scale
    return CompareReport(mode, verdict, max_res, reps, res)


# -- quotient-realization entries via the pushforward measure ------------------


class QuotientRealization:
    """Operator entries computed on the quotient side: functions live in
    theta coordinates and inner products go through the pushforward measure
    (torus integrals against |ell|^2), never through the lift unitary.
    Agreement with the ambient windows is the unitary-equivalence check."""

    def __init__(self, character: Character, bmap: BasicMap, ellp: EllPoly | None = None):
        self.character = character
        self.group = character.group
        self.bmap = bmap
        self.ellp = ellp or ell(character, bmap=bmap)
        self.basis = GammaBasis(character)
        self._down: dict[Expo, HarmonicPoly] = {}
        self._weight = self.ellp.poly * self.ellp.poly.conj_torus()

    def basis_down(self, rep: Expo) -> HarmonicPoly:
        got = self._down.get(tuple(rep))
        if got is None:
            low = lower(self.ellp, self.bmap, self.basis(rep))
            got = HarmonicPoly(
                self.group.n, {(e, (0,) * self.group.n): c for e, c in low.terms.items()}
            )
            self._down[tuple(rep)] = got
        return got

    def _substitute(self, f: HarmonicPoly) -> LaurentPoly:
        comps = list(self.bmap.components)
        comps_bar = [c.conj_torus() for c in comps]
        total = LaurentPoly.zero(self.group.n)
        for (beta, gamma) in sorted(f.terms):
            c = f.terms[(beta, gamma)]
            term = LaurentPoly.constant(self.group.n, c)
            for comp, b in zip(comps, beta):
                if b:
                    term = term * (comp ** b)
            for comp, g in zip(comps_bar, gamma):
                if g:
                    term = term * (comp ** g)
            total = total + term
        return total

    def inner(self, f: HarmonicPoly, g: HarmonicPoly) -> complex:
        """<f, g> in L^2 of the pushforward measure, scaled by 1/c^2 so the
        lowered basis is orthonormal."""
        gbar = HarmonicPoly(
            g.dim, {(gam, beta): c.conjugate() for (beta, gam), c in g.terms.items()}
        )
        integrand = self._substitute(f * gbar) * self._weight
        return integrand.coeff((0,) * self.group.n) / self.ellp.cnorm ** 2

    def project_hardy(self, f: HarmonicPoly, exp_bound: int) -> HarmonicPoly:
        """Orthogonal projection onto the span of the lowered basis up to the
        given ambient sup-norm bound (exact once the bound dominates f)."""
        iset = index_set(self.character, exp_bound, holomorphic=True)
        out = HarmonicPoly.zero(self.group.n)
        for rep in iset:
            e = self.basis_down(rep)
            c = self.inner(f, e)
            if abs(c) > 1e-14:
                out = out + c * e
        return out

    def toeplitz_apply(self, u: HarmonicPoly, f: HarmonicPoly, exp_bound: int) -> HarmonicPoly:
        return self.project_hardy(u * f, exp_bound)

    def window_entry(self, u: HarmonicPoly, row: Expo, col: Expo) -> complex:
        return self.inner(u * self.basis_down(col), self.basis_down(row))


def _monomial_route_compare(u: SymbolPair, v: SymbolPair, mode: str,
                            character: Character, bound: int) -> CompareReport:
    """Same comparison computed on the full-Hardy monomial window restricted
    to the isotypic basis: columns use the plain negative-exponent cut with
    no isotypic projection step (multiplication by invariant symbols keeps
    the component invariant, so the verdicts must match product_compare)."""
    symbols = [u, v]
    radius = sum(s.radius() for s in symbols)
    if bound < radius:
        raise WindowMarginError(
            f"window bound {bound} is below the combined symbol radius; "
            f"need D >= {radius}"
        )
    basis = GammaBasis(character)
    iset = index_set(character, bound, holomorphic=True)
    reps = list(iset.reps)
    res = np.zeros((len(reps), len(reps)), dtype=complex)

    def T(sym: SymbolPair, f: LaurentPoly) -> LaurentPoly:
        return hol_project(sym.pullback * f)

    uv = SymbolPair(u.group, u.pullback * v.pullback)
    scale = max(u.pullback.max_abs_coeff() * v.pullback.max_abs_coeff(), 1.0)
    for j, a in enumerate(reps):
        g = basis(a)
        if mode == "semi":
            col = T(u, T(v, g)) - T(uv, g)
        elif mode == "commute":
            col = T(u, T(v, g)) - T(v, T(u, g))
        else:
            raise ValueError("monomial route supports semi and commute modes")
        for i, b in enumerate(reps):
            res[i, j] = torus_inner(col, basis(b))
    max_res = float(np.max(np.abs(res))) if res.size else 0.0
    return CompareReport(mode, max_res <= RESIDUAL_TOL * scale, max_res, reps, res)


def _quotient_route_compare(u: SymbolPair, v: SymbolPair, mode: str,
                            character: Character, bmap: BasicMap,
                            bound: int) -> CompareReport:
    """Same comparison computed entirely on the quotient side: functions in
    theta coordinates, inner products through the pushforward measure."""
    qr = QuotientRealization(character, bmap)
    uh = u.theta_form(bmap)
    vh = v.theta_form(bmap)
    iset = index_set(character, bound, holomorphic=True)
    reps = list(iset.reps)
    res = np.zeros((len(reps), len(reps)), dtype=complex)
    scale = max(u.pullback.max_abs_coeff() * v.pullback.max_abs_coeff(), 1.0)
    for j, a in enumerate(reps):
        fa = qr.basis_down(a)
        if mode == "semi":
            mid = qr.toeplitz_apply(vh, fa, v.radius() + bound)
            colL, colR = uh * mid, (uh * vh) * fa
        elif mode == "commute":
            mid_v = qr.toeplitz_apply(vh, fa, v.radius() + bound)
            mid_u = qr.toeplitz_apply(uh, fa, u.radius() + bound)
            colL, colR = uh * mid_v, vh * mid_u
        else:
            raise ValueError("quotient route supports semi and commute modes")
        for i, b in enumerate(reps):
            eb = qr.basis_down(b)
            res[i, j] = qr.inner(colL, eb) - qr.inner(colR, eb)
    max_res = float(np.max(np.abs(res))) if res.size else 0.0
    return CompareReport(mode, max_res <= RESIDUAL_TOL * scale, max_res, reps, res)


@dataclass
class CorrespondenceReport:
    mode: str
    verdicts: dict  # (character name, route) -> bool
    residuals: dict  # (character name, route) -> float
    agree: bool

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "verdicts": {f"{k[0]}/{k[1]}": bool(v) for k, v in self.verdicts.items()},
            "max_residuals": {f"{k[0]}/{k[1]}": v for k, v in self.residuals.items()},
            "agree": self.agree,
        }


def correspondence_check(u: SymbolPair, v: SymbolPair, characters: list[Character],
                         bound: int, mode: str = "semi",
                         quotient_bound: int | None = None) -> CorrespondenceReport:
    """Run the product comparison on every listed isotypic component and in
    three realizations (isotypic windows, the restricted full-Hardy monomial
    window, and quotient-side pushforward windows); the product and
    commuting correspondences say all verdicts agree.

    A disagreement is reported in detail, never raised: it would indicate a
    computation bug, not a property of the symbols.
    """
    bmap = basic_map(u.group)
    qb = quotient_bound if quotient_bound is not None else max(2, bound - 1)
    verdicts: dict = {}
    residuals: dict = {}
    for char in characters:
        amb = product_compare(u, v, mode, char, bound)
        mono = _monomial_route_compare(u, v, mode, char, bound)
        quo = _quotient_route_compare(u, v, mode, char, bmap, qb)
        for route, rep in (("isotypic", amb), ("monomial", mono), ("quotient", quo)):
            verdicts[(char.name, route)] = rep.verdict
            residuals[(char.name, route)] = rep.max_residual
    agree = len(set(verdicts.values())) <= 1
    return CorrespondenceReport(mode, verdicts, residuals, agree)


# -- bidisc semi-commutator criterion ------------------------------------------


@dataclass
class Semd2Report:
    d1_zero: bool
    d2_zero: bool
    d12_zero: bool
    window_verdict: bool

    @property
    def symbolic_verdict(self) -> bool:
        return self.d1_zero and self.d2_zero and self.d12_zero

    @property
    def consistent(self) -> bool:
        return self.symbolic_verdict == self.window_verdict

    def to_json(self) -> dict:
        return {
            "D1_zero": self.d1_zero,
            "D2_zero": self.d2_zero,
            "D12_zero": self.d12_zero,
            "symbolic_verdict": self.symbolic_verdict,
            "window_verdict": self.window_verdict,
            "consistent": self.consistent,
        }


def semd2_check(u: SymbolPair, v: SymbolPair, character: Character,
                bound: int | None = None, tol: float = 1e-10) -> Semd2Report:
    """Symbolic test of the three derivative conditions for T_u T_v = T_{uv}
    on quotients of the bidisc, cross-checked against the exact window
    residual.

    D1 is tested on disc x torus (coordinate 2 reduced to the torus), D2 on
    torus x disc, D12 on the bidisc; each must vanish identically.
    """
    group = u.group
    if group.n != 2:
        raise ValueError("the derivative criterion applies to bidisc quotients")
    uh = harmonic_extension(u.pullback)
    vh = harmonic_extension(v.pullback)
    scale = max(u.pullback.max_abs_coeff() * v.pullback.max_abs_coeff(), 1.0)

    def reduced_zero(p: HarmonicPoly, coords: tuple[int, ...]) -> bool:
        return all(abs(c) <= tol * scale for c in p.reduce_coords_to_torus(coords).values()) \
            if coords else p.is_zero(tol=tol * scale)

    d1 = wirtinger_D(uh, vh, "D1")
    d2 = wirtinger_D(uh, vh, "D2")
    d12 = wirtinger_D(uh, vh, "D12")
    d1_zero = reduced_zero(d1, (1,))
    d2_zero = reduced_zero(d2, (0,))
    d12_zero = reduced_zero(d12, ())

    if bound is None:
        bound = 2 * (u.radius() + v.radius()) + 2
    window = product_compare(u, v, "semi", character, bound)
    return Semd2Report(d1_zero, d2_zero, d12_zero, window.verdict)


# -- symbol recovery ------------------------------------------------------------


@dataclass
class RecoveryResult:
    symbol: SymbolPair
    coefficients: dict[Expo, complex]
    residual: float
    stabilization_shifts: int

    def to_json(self) -> dict:
        return {
            "coefficients": [
                {"rep": list(k), "c": [c.real, c.imag]}
                for k, c in sorted(self.coefficients.items())
            ],
            "residual": self.residual,
            "stabilization_shifts": self.stabilization_shifts,
        }


def _invariant_monomial(group: Group, rep: Expo) -> LaurentPoly | None:
    """Trivial-isotypic orbit sum with unit leading coefficient, or None when
    the orbit dies under averaging."""
    triv_nsq = None
    from .groups import make_character

    char = make_character(group, "trivial")
    if projection_norm_sq(char, rep) == 0:
        return None
    f = project(char, LaurentPoly.monomial(group.n, rep))
    lead = f.coeff(tuple(rep))
    return f * (1.0 / lead)


def symbol_recover(entry_fn, character: Character, bmap: BasicMap,
                   base_bound: int = 4, max_shifts: int = 8,
                   tol: float = 1e-10) -> RecoveryResult:
    """Recover the symbol of an operator given entry access on the gamma
    basis.

    entry_fn(col_rep, row_rep) must return <T gamma_col, gamma_row> for
    holomorphic canonical representatives.  The entries are first checked
    against the shift relations (windows that violate them are rejected),
    then stabilized along the diagonal shift and matched to the pairings of
    candidate invariant Laurent monomials by least squares.
    """
    group = character.group
    q = group.q
    basis = GammaBasis(character)
    iset = index_set(character, base_bound, holomorphic=True)
    reps = list(iset.reps)
    if not reps:
        raise RecoveryError("empty index window; increase base_bound")

    entries = np.zeros((len(reps), len(reps)), dtype=complex)
    for j, a in enumerate(reps):
        for i, b in enumerate(reps):
            entries[i, j] = entry_fn(a, b)
    window = ToeplitzWindow(character, base_bound, reps, entries)
    report = bh_check(window, bmap, basis=basis)
    if not report.ok:
        raise RecoveryError(
            f"entries violate the shift relations (max violation "
            f"{report.max_violation:.3g} at {report.worst_pair}); "
            "not a Toeplitz window"
        )

    scale = window.scale()
    stabilized = np.zeros_like(entries)
    shifts_used = 0
    for j, a in enumerate(reps):
        for i, b in enumerate(reps):
            prev = entry_fn(a, b)
            r = 0
            while True:
                r += 1
                cur = entry_fn(_shift(a, q * r), _shift(b, q * r))
                if abs(cur - prev) < tol * scale:
                    stabilized[i, j] = cur
                    shifts_used = max(shifts_used, r)
                    break
                if r >= max_shifts:
                    raise RecoveryError(
                        f"entry at ({a}, {b}) does not stabilize along the "
                        f"diagonal shift after {max_shifts} steps"
                    )
                prev = cur

    # candidate exponent lattice from observed entry differences
    cands: set[Expo] = set()
    for j, a in enumerate(reps):
        for i, b in enumerate(reps):
            if abs(stabilized[i, j]) <= tol * scale:
                continue
            for ob in orbit_exponents(group, b):
                for oa in orbit_exponents(group, a):
                    d = tuple(x - y for x, y in zip(ob, oa))
                    cands.add(canonical_exponent(group, d))
    monomials: list[tuple[Expo, LaurentPoly]] = []
    for rep in sorted(cands):
        mono = _invariant_monomial(group, rep)
        if mono is not None:
            monomials.append((rep, mono))
    if not monomials:
        zero = SymbolPair(group, LaurentPoly.zero(group.n))
        return RecoveryResult(zero, {}, 0.0, shifts_used)

    # Window pairings alone alias distant candidates, so anchor the system
    # at a widely spread index: with coordinate gaps beyond twice the
    # candidate radius, each candidate contributes to its own entry only.
    r_cand = max(max(abs(x) for x in rep) for rep, _ in monomials)
    spread = 2 * r_cand + q + 2
    anchor = _spread_anchor(character, spread)
    gammas = [basis(r) for r in reps]
    rows = []
    rhs = []
    for rep, _ in monomials:
        m_raw = tuple(x + y for x, y in zip(anchor, rep))
        lift_shift = max(0, -(min(m_raw) // q) * q) if min(m_raw) < 0 else 0
        while min(m_raw) + lift_shift < 0:
            lift_shift += q
        p_s = _shift(anchor, lift_shift)
        m_s = canonical_exponent(group, _shift(m_raw, lift_shift))
        if projection_norm_sq(character, m_s) == 0:
            continue
        gp, gm = basis(p_s), basis(m_s)
        rows.append([torus_inner(mono * gp, gm) for _, mono in monomials])
        rhs.append(entry_fn(p_s, m_s))
    for j, a in enumerate(reps):
        prod_cache = [mono * gammas[j] for _, mono in monomials]
        for i, b in enumerate(reps):
            rows.append([torus_inner(pc, gammas[i]) for pc in prod_cache])
            rhs.append(stabilized[i, j])
    A = np.array(rows, dtype=complex)
    y = np.array(rhs, dtype=complex)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    residual = float(np.linalg.norm(A @ coef - y))

    total = LaurentPoly.zero(group.n)
    out_coeffs: dict[Expo, complex] = {}
    for (rep, mono), c in zip(monomials, coef):
        if abs(c) > 1e-12 * max(scale, 1.0):
            out_coeffs[rep] = complex(c)
            total = total + complex(c) * mono
    return RecoveryResult(SymbolPair(group, total), out_coeffs, residual, shifts_used)


def _spread_anchor(character: Character, spread: int) -> Expo:
    """A holomorphic canonical representative with coordinate gaps of at
    least `spread`, found by a small offset search."""
    from itertools import product as iproduct

    group = character.group
    n, m = group.n, group.m
    base = tuple(i * spread for i in range(n))
    for off in iproduct(range(2 * m), repeat=n):
        cand = tuple(sorted(b + o for b, o in zip(base, off)))
        cand = canonical_exponent(group, cand)
        if projection_norm_sq(character, cand) > 0:
            return cand
    raise RecoveryError("no spread anchor index found for this character")


def window_entry_fn(symbol: SymbolPair, character: Character):
    """Exact Toeplitz entry oracle for symbol_recover round trips."""
    basis = GammaBasis(character)

    def fn(col: Expo, row: Expo) -> complex:
        return torus_inner(symbol.pullback * basis(col), basis(row))

    return fn


# -- ball entries ---------------------------------------------------------------


def ball_toeplitz_entry(u: HarmonicPoly, p: Expo, m: Expo, n: int) -> complex:
    """<u k_p z^p, k_m z^m> over the sphere: exact monomial integrals scaled
    by the orthonormal-basis constants."""
    p, m = tuple(p), tuple(m)
    if len(p) != n or len(m) != n or min(p) < 0 or min(m) < 0:
        raise ValueError("indices must be non-negative exponent vectors of length n")
    kp = 1.0 / math.sqrt(float(sphere_monomial_weight(p)))
    km = 1.0 / math.sqrt(float(sphere_monomial_weight(m)))
    total = 0j
    for (beta, gamma) in sorted(u.terms):
        c = u.terms[(beta, gamma)]
        a = tuple(x + y for x, y in zip(beta, p))
        b = tuple(x + y for x, y in zip(gamma, m))
        total += c * sphere_pair_integral(a, b, n)
    return kp * km * total


# -- compactness probe -----------------------------------------------------------


@dataclass
class CompactnessReport:
    max_shift_deviation: float
    persistent_entries: list[tuple]
    zero_window: bool

    @property
    def compatible_with_compact(self) -> bool:
        """Nonzero entries persist along every shift, so only the zero
        window is compatible with compactness."""
        return self.zero_window

    def to_json(self) -> dict:
        return {
            "max_shift_deviation": self.max_shift_deviation,
            "persistent_entries": [repr(t) for t in self.persistent_entries],
            "zero_window": self.zero_window,
            "compatible_with_compact": self.compatible_with_compact,
        }


def compactness_probe(windows: list[ToeplitzWindow], bmap: BasicMap,
                      tol: float = RESIDUAL_TOL) -> CompactnessReport:
    """Check entry constancy along the diagonal shift inside and across a
    family of windows; persistent nonzero entries rule out compactness."""
    q = bmap.group.q
    max_dev = 0.0
    persistent: list[tuple] = []
    all_zero = True
    scale = max(w.scale() for w in windows)
    base = windows[0]
    for a in base.reps:
        for b in base.reps:
            v0 = base.entry(b, a)
            if abs(v0) > tol * scale:
                all_zero = False
            persists = abs(v0) > tol * scale
            for w in windows:
                r = 1
                while True:
                    sa, sb = _shift(a, q * r), _shift(b, q * r)
                    v = w.entry(sb, sa)
                    if v is None:
                        break
                    max_dev = max(max_dev, abs(v - v0) / scale)
                    r += 1
            if persists:
                persistent.append((a, b, v0))
    return CompactnessReport(max_dev, persistent, all_zero)
