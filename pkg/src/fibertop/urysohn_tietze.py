"""Separating functions, the extension iteration, and the condition checkers
for the four-way normality characterization.

The separator route composes the binary-partition builder with the limit
assembly and checks the four separation inclusions at the level-2
neighborhood.  The extension route iterates separator subtraction with the
exact (2/3)^n residual chain.  Exact extension existence is decided
independently: a function with zero oscillation over the preimage of the
minimal neighborhood is precisely one that is constant on each
minimal-neighborhood component, so the boundary-value problem collapses to
a per-component consistency check.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .errors import (
    CheckFailed,
    MaxIterReached,
    NotFound,
    NotOpen,
    PreconditionNotFContinuous,
    SearchFailed,
)
from .normality import SeparationCertificate, build_binary_partitions
from .oscillation import (
    RationalFunction,
    is_f_continuous_at,
    norm,
    osc_on_set,
)
from .partitions import ApproximateLimitFunction, assemble_limit
from .spaces import FiberedMap, bits

HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)


# ------------------------------------------------------------- condition (C)


class ConditionCReport(NamedTuple):
    osc_ok: bool
    f_in_zero: bool
    t_in_one: bool
    f_off_upper_closure: bool
    t_in_upper_interior: bool
    osc_value: Fraction

    @property
    def all_ok(self) -> bool:
        return (self.osc_ok and self.f_in_zero and self.t_in_one
                and self.f_off_upper_closure and self.t_in_upper_interior)


def verify_condition_C(f: FiberedMap, f_side: int, t_side: int, y: int,
                       phi: RationalFunction, nbhd: int) -> ConditionCReport:
    """Evaluate the four separation inclusions and the osc < 1/2 bound.

    Usable on any candidate function, independent of how it was produced.
    """
    if not f.codomain.is_open(nbhd) or not nbhd >> y & 1:
        raise NotOpen(nbhd)
    space = f.domain
    pre = f.preimage(nbhd)
    osc_value = osc_on_set(phi, pre & phi.carrier)
    zeros = phi.preimage(lambda v: v == 0)
    ones = phi.preimage(lambda v: v == 1)
    upper = phi.preimage(lambda v: HALF <= v <= 1) & pre
    return ConditionCReport(
        osc_ok=osc_value < HALF,
        f_in_zero=not f_side & pre & ~zeros,
        t_in_one=not t_side & pre & ~ones,
        f_off_upper_closure=not f_side & space.rel_closure(pre, upper),
        t_in_upper_interior=not t_side & pre & ~space.rel_interior(pre, upper),
        osc_value=osc_value,
    )


@dataclass(frozen=True)
class SeparatorResult:
    limit: ApproximateLimitFunction
    nbhd: int
    checks: ConditionCReport

    @property
    def phi(self) -> RationalFunction:
        return self.limit.phi


def build_separator(f: FiberedMap, f_side: int, t_side: int, y: int,
                    depth: int, within: int | None = None) -> SeparatorResult:
    """Partition family -> stepwise limit -> verified separating function.

    The reported neighborhood is the level-2 one (the flat minimal chain
    makes it the minimal neighborhood of y), where the truncated limit has
    oscillation at most 1/(2^depth - 1) < 1/2.
    """
    if depth < 2:
        raise ValueError("a separator needs depth >= 2")
    family = build_binary_partitions(f, f_side, t_side, y, depth, within=within)
    limit = assemble_limit(family)
    nbhd = family.levels[2].nbhd
    checks = verify_condition_C(f, f_side, t_side, y, limit.phi, nbhd)
    if not checks.all_ok:
        failed = [name for name, ok in zip(checks._fields, checks) if ok is False]
        raise CheckFailed(f"separator conditions {failed}")
    return SeparatorResult(limit, nbhd, checks)


# --------------------------------------------------- exact extension kernel


class ExactExtension(NamedTuple):
    exists: bool
    phi: RationalFunction | None
    conflict: int | None  # component with inconsistent boundary values


def exact_extension_exists(f: FiberedMap, phit: RationalFunction,
                           y: int) -> ExactExtension:
    """Decide whether some f-continuous-at-y function extends phit exactly
    over the preimage of the minimal neighborhood of y, with norm control.

    phit is given on a carrier; the extension must agree with it on
    carrier /\\ f^{-1}(min_nbhd(y)).  Such a function exists iff phit is
    constant on each minimal-neighborhood component it meets there, and
    then the component-constant spread (zero elsewhere) realizes it without
    increasing the norm.
    """
    space = f.domain
    region = f.preimage(f.codomain.min_nbhd(y))
    values = [Fraction(0)] * space.n
    for comp in space.nbhd_classes(region):
        pinned = comp & phit.carrier
        val = None
        for x in bits(pinned):
            if val is None:
                val = phit.values[x]
            elif phit.values[x] != val:
                return ExactExtension(False, None, comp)
        if val is not None:
            for x in bits(comp):
                values[x] = val
    phi = RationalFunction(space, tuple(values), space.full)
    return ExactExtension(True, phi, None)


def exact_separator(f: FiberedMap, p_side: int, q_side: int, y: int
                    ) -> RationalFunction | None:
    """Exactly f-continuous-at-y {0,1} function, 0 on P and 1 on Q traces.

    This is the closed form of the stepwise limit once the partition chain
    stabilizes.  None when some component meets both traces, which refutes
    normality of the map.
    """
    space = f.domain
    region = f.preimage(f.codomain.min_nbhd(y))
    out = 0
    for comp in space.nbhd_classes(region):
        if comp & q_side:
            if comp & p_side:
                return None
            out |= comp
    return RationalFunction.indicator(space, out)


# ------------------------------------------------------------ the extension


@dataclass(frozen=True)
class ExtensionResult:
    phi: RationalFunction
    agreement_set: int
    norm_ok: bool
    residuals: tuple[Fraction, ...]
    iterations: int
    residual_bound: Fraction
    psis: tuple[RationalFunction, ...]


def tietze_extend(f: FiberedMap, f_carrier: int, phit: RationalFunction,
                  y: int, max_iter: int | None = None,
                  tolerance: Fraction = Fraction(1, 1024),
                  within: int | None = None) -> ExtensionResult:
    """Extend a function given on a closed carrier by separator subtraction.

    The carrier must be relatively closed over ``within`` (the whole
    codomain when omitted).  Each step separates the +/- mu/3 level
    closures with an exactly f-continuous-at-y two-valued function,
    subtracts the rescaled copy, and certifies mu_{n+1} <= (2/3) mu_n.  The
    loop stops at an exact residual of zero or once the geometric bound
    drops below the tolerance; an explicit max_iter that cuts the loop
    earlier raises MaxIterReached.
    """
    space, cod = f.domain, f.codomain
    if within is None:
        within = cod.full
    if not cod.is_open(within) or not within >> y & 1:
        raise NotOpen(within)
    if phit.carrier != f_carrier:
        raise ValueError("phit must be given exactly on the carrier")
    if not space.rel_is_closed(f.preimage(within), f_carrier):
        raise ValueError("the carrier must be relatively closed over the context open")
    res = is_f_continuous_at(f, phit, y)
    if not res.holds:
        raise PreconditionNotFContinuous(
            f"osc {res.osc} over the carrier trace of the minimal neighborhood")
    zero = RationalFunction.constant(space, 0)
    mu0 = norm(phit)
    nbhd = cod.min_nbhd(y)
    pre = f.preimage(nbhd)
    carrier = f_carrier & pre
    if carrier == 0 or mu0 == 0:
        agree = _agreement(phit, zero, carrier)
        return ExtensionResult(zero, agree, True, (mu0,), 0,
                               _sup_difference(phit, zero, carrier), ())

    third = Fraction(1, 3)
    cur = phit.restrict(carrier) if carrier != f_carrier else phit
    residuals = [mu0]
    psis = []
    mu = mu0
    total = [Fraction(0)] * space.n
    n = 0
    while True:
        mu = norm(cur) if n else mu0
        if n:
            residuals.append(mu)
        if mu == 0:
            break
        geometric = mu0 * Fraction(2, 3) ** n
        if geometric <= tolerance:
            break
        if max_iter is not None and n >= max_iter:
            raise MaxIterReached(mu)
        thresh = mu * third
        p_side = space.rel_closure(pre, cur.preimage(lambda v: v <= -thresh))
        q_side = space.rel_closure(pre, cur.preimage(lambda v: v >= thresh))
        if p_side & q_side:
            raise CheckFailed("level closures overlap despite the osc bound")
        xi = exact_separator(f, p_side, q_side, y)
        if xi is None:
            raise SearchFailed(n, "exact separator")
        psi = xi.affine(2 * thresh, -thresh)
        if norm(psi) > thresh:
            raise CheckFailed("psi norm above mu/3")
        psis.append(psi)
        for x in range(space.n):
            total[x] += psi.values[x]
        nxt_vals = tuple(cur.values[x] - psi.values[x] if carrier >> x & 1 else None
                         for x in range(space.n))
        nxt = RationalFunction(space, nxt_vals, carrier)
        if norm(nxt) > Fraction(2, 3) * mu:
            raise CheckFailed("residual contraction failed")
        cur = nxt
        n += 1
    phi = RationalFunction(space, tuple(total), space.full)
    total_norm = norm(phi)
    norm_ok = total_norm <= mu0
    if not norm_ok:
        raise CheckFailed("norm of the extension above the boundary norm")
    agree = _agreement(phit, phi, carrier)
    if mu == 0 and (carrier & ~agree):
        raise CheckFailed("zero residual without exact agreement")
    sup = _sup_difference(phit, phi, carrier)
    if sup > mu:
        raise CheckFailed("reported residual below the actual difference")
    return ExtensionResult(phi, agree, norm_ok, tuple(residuals), n, mu,
                           tuple(psis))


def _agreement(a: RationalFunction, b: RationalFunction, mask: int) -> int:
    out = 0
    for x in bits(mask & a.carrier & b.carrier):
        if a.values[x] == b.values[x]:
            out |= 1 << x
    return out


def _sup_difference(a: RationalFunction, b: RationalFunction, mask: int) -> Fraction:
    best = Fraction(0)
    for x in bits(mask & a.carrier & b.carrier):
        d = abs(a.values[x] - b.values[x])
        if d > best:
            best = d
    return best


# ------------------------------------------------------------- condition (D)


class ConditionDReport(NamedTuple):
    agreement_ok: bool
    agreement_nbhd: int | None
    norm_ok: bool
    eps_ok: bool
    eps_failures: tuple[int, ...]
    f_continuous: bool

    @property
    def all_ok(self) -> bool:
        return self.agreement_ok and self.norm_ok and self.eps_ok and self.f_continuous


def verify_condition_D(f: FiberedMap, f_carrier: int, phit: RationalFunction,
                       phi: RationalFunction, y: int,
                       eps_levels: int = 12) -> ConditionDReport:
    """Check the extension contract independently of how phi was produced.

    (a) needs an open G around y with exact agreement on the carrier trace;
    agreement over a bigger G implies it over the minimal neighborhood, so
    the minimal one decides.  The epsilon sweep runs over 1/2^k and is
    equivalent to the same minimal-neighborhood check.
    """
    nbhd = f.codomain.min_nbhd(y)
    trace = f_carrier & f.preimage(nbhd)
    agreement = phit.agrees_with(phi, trace)
    sup = _sup_difference(phit, phi, trace)
    failures = tuple(k for k in range(1, eps_levels + 1)
                     if not sup < Fraction(1, 1 << k))
    return ConditionDReport(
        agreement_ok=agreement,
        agreement_nbhd=nbhd if agreement else None,
        norm_ok=norm(phi) <= norm(phit),
        eps_ok=not failures,
        eps_failures=failures,
        f_continuous=is_f_continuous_at(f, phi, y).holds,
    )


def separation_from_extension(f: FiberedMap, f_side: int, t_side: int,
                              y: int) -> SeparationCertificate:
    """Run the extension direction of the proof to get a separation witness.

    The two-valued boundary function on F union T extends exactly; the
    quarter-level interiors of the extension then separate the traces over
    the minimal neighborhood.
    """
    space = f.domain
    union = f_side | t_side
    vals = tuple(Fraction(1) if t_side >> x & 1 else
                 (Fraction(0) if f_side >> x & 1 else None)
                 for x in range(space.n))
    phit = RationalFunction(space, vals, union)
    ext = exact_extension_exists(f, phit, y)
    if not ext.exists:
        raise NotFound(f"no exact extension; component {ext.conflict:#x} "
                       f"meets both sides")
    phi = ext.phi.clamp(0, 1)
    rep = verify_condition_D(f, union, phit, phi, y)
    if not rep.all_ok:
        raise CheckFailed("exact extension failed the (D) contract")
    nbhd = f.codomain.min_nbhd(y)
    pre = f.preimage(nbhd)
    if osc_on_set(phi, pre) >= QUARTER:
        raise CheckFailed("oscillation bound for the separation step")
    low = space.rel_interior(pre, phi.preimage(lambda v: v <= QUARTER) & pre)
    high = space.rel_interior(pre, phi.preimage(lambda v: v >= 3 * QUARTER) & pre)
    cert = SeparationCertificate(y, nbhd, high, low, t_side & pre, f_side & pre)
    if not cert.valid_for(f, t_side, f_side):
        raise CheckFailed("separation certificate invalid")
    return cert


# ------------------------------------------------------ sigma separator route


@dataclass(frozen=True)
class SigmaSeparatorResult:
    nbhd: int
    limits: tuple[ApproximateLimitFunction, ...]
    osc_values: tuple[Fraction, ...]


def sigma_separator_family(f: FiberedMap, f_side: int, t_list, y: int,
                           depth: int, within: int | None = None
                           ) -> SigmaSeparatorResult:
    """Per-piece separators sharing one neighborhood, equicontinuous there.

    Asserts the characterization conditions: shared osc < 1/2, value
    pinning on F and each T_l, and the strict upper-set interior/closure
    conditions per piece.
    """
    if depth < 2:
        raise ValueError("the sigma family needs depth >= 2")
    space = f.domain
    results = []
    nbhd = None
    for l, t_piece in enumerate(t_list):
        try:
            sep = build_separator(f, f_side, t_piece, y, depth, within=within)
        except SearchFailed as exc:
            raise SearchFailed(exc.level, exc.step, l) from exc
        if nbhd is None:
            nbhd = sep.nbhd
        elif sep.nbhd != nbhd:
            raise CheckFailed("separators disagree on the shared neighborhood")
        results.append(sep)
    if nbhd is None:
        nbhd = f.codomain.min_nbhd(y)
    pre = f.preimage(nbhd)
    oscs = []
    for l, (sep, t_piece) in enumerate(zip(results, t_list)):
        phi = sep.phi
        o = osc_on_set(phi, pre)
        oscs.append(o)
        if not o < HALF:
            raise CheckFailed(f"shared oscillation bound, piece {l}")
        upper = phi.preimage(lambda v: HALF < v <= 1) & pre
        if t_piece & pre & ~space.rel_interior(pre, upper):
            raise CheckFailed(f"piece {l} not interior to its upper set")
        if space.rel_closure(pre, upper) & f_side:
            raise CheckFailed(f"upper set closure of piece {l} meets F")
    return SigmaSeparatorResult(nbhd, tuple(r.limit for r in results),
                                tuple(oscs))
