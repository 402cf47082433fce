"""Euler-class twists of the genus-0 theory.

This module houses everything attached to a split bundle E = O(l_1) + ... +
O(l_r): the Bernoulli/Todd coefficients, the Gamma-function asymptotic
exponent that transforms the untwisted cone into the twisted one, the
hypergeometric modification of the J-function, and the Serre-dual twist with
its finite product identity.

Conventions for the multiplier exponent attached to a Chern root rho = l*P:

    1/z slot:    rho*log(lam) + sum_{k>=1} (-1)^(k-1) rho^(k+1) / (k (k+1) lam^k)
    z^0 slot:    (1/2) log(1 + rho/lam) expanded in 1/lam
    z^(2m-1):    B_{2m} / (2m (2m-1)) * (lam + rho)^(1-2m)

The 1/z slot is the antiderivative of log(lam + x) with its x-independent
part removed (the removed constant generates the string flow, which fixes
the cone).  The z^0 slot is the lam^(1/2)-free remainder of the square-root
normalization; carrying it keeps the whole multiplier inside the Laurent
ring while still mapping the untwisted cone onto the twisted one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .errors import EngineError, InsufficientFloorError
from .ring import BundleSpec, CohElement, LambdaScalar, RingDescriptor
from .series import REDUCED, ZSeries


@lru_cache(maxsize=None)
def bernoulli(k: int) -> Fraction:
    """Bernoulli number B_k with B_1 = -1/2 (generating function x/(e^x - 1))."""
    if k < 0:
        raise ValueError("Bernoulli numbers are indexed by k >= 0")
    if k == 0:
        return Fraction(1)
    if k > 1 and k % 2 == 1:
        return Fraction(0)
    # sum_{j=0}^{k} C(k+1, j) B_j = 0 for k >= 1
    acc = Fraction(0)
    for j in range(k):
        acc += comb(k + 1, j) * bernoulli(j)
    return -acc / comb(k + 1, k)


def todd_series(order: int) -> list[Fraction]:
    """Coefficients of psi^r, r = 0..order, in the expansion of psi/(e^psi - 1)."""
    if order < 0:
        raise ValueError("order must be >= 0")
    return [bernoulli(r) / factorial(r) for r in range(order + 1)]


@dataclass
class BSeriesExponent:
    """Exponent of the cone-transform multiplier for a single Chern root l*P."""

    desc: RingDescriptor
    degree: int
    one_over_z_part: CohElement
    z_zero_part: CohElement
    positive_z_part: dict[int, CohElement]

    def z_slots(self, sign: int) -> dict[int, CohElement]:
        """All z-slots of the exponent evaluated at sign*z.

        Every stored z-power is odd, so substituting -z negates the 1/z slot
        and every positive slot while fixing the z-independent one.
        """
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        out: dict[int, CohElement] = {}
        if not self.one_over_z_part.is_zero():
            out[-1] = self.one_over_z_part.scale(sign)
        if not self.z_zero_part.is_zero():
            out[0] = self.z_zero_part
        for ze, el in self.positive_z_part.items():
            out[ze] = el.scale(sign)
        return out


def _lam_inverse_power_expansion(
    desc: RingDescriptor, l: int, exponent: int
) -> CohElement:
    """(lam + l*P)^exponent for negative exponent, expanded modulo P^n.

    Terms below the Laurent floor are dropped (and flagged on the scalars).
    """
    comps = [LambdaScalar.zero(desc) for _ in range(desc.n)]
    for j in range(desc.n):
        binom = Fraction(1)
        for i in range(j):
            binom *= Fraction(exponent - i, i + 1)
        comps[j] = LambdaScalar(
            desc, {(exponent - j, 0): binom * Fraction(l) ** j}
        )
    return CohElement(desc, comps)


def b_series(l: int, desc: RingDescriptor, z_cap: int) -> BSeriesExponent:
    """Multiplier exponent for the line bundle O(l) on P^(n-1).

    z_cap bounds the stored positive z-powers; the default downstream choice
    is 2*D + 1, beyond which no term can influence Novikov degrees <= D.
    """
    if l < 1:
        raise ValueError("line bundle degree must be >= 1")
    if z_cap < 1:
        raise ValueError("z_cap must be >= 1")
    if desc.lambda_floor < 1:
        raise InsufficientFloorError(
            "the multiplier exponent needs lambda_floor >= 1"
        )
    n = desc.n

    one_over_z = CohElement.p_power(desc, 1, l).scale_scalar(
        LambdaScalar.log_lambda(desc)
    )
    for k in range(1, n - 1):
        coeff = Fraction((-1) ** (k - 1), k * (k + 1)) * Fraction(l) ** (k + 1)
        term = CohElement.p_power(desc, k + 1, coeff)
        one_over_z = one_over_z + term.scale_scalar(LambdaScalar.lam_power(desc, -k))

    z_zero = CohElement.zero(desc)
    for k in range(1, n):
        coeff = Fraction((-1) ** (k - 1), 2 * k) * Fraction(l) ** k
        term = CohElement.p_power(desc, k, coeff)
        z_zero = z_zero + term.scale_scalar(LambdaScalar.lam_power(desc, -k))

    positive: dict[int, CohElement] = {}
    m = 1
    while 2 * m - 1 <= z_cap:
        coeff = bernoulli(2 * m) / Fraction(2 * m * (2 * m - 1))
        el = _lam_inverse_power_expansion(desc, l, 1 - 2 * m).scale(coeff)
        if not el.is_zero():
            positive[2 * m - 1] = el
        m += 1
    return BSeriesExponent(desc, l, one_over_z, z_zero, positive)


def stirling_oracle(m_max: int) -> list[Fraction]:
    """Coefficients c_m of x^(1-2m) in the log-Gamma asymptotic tail, m = 1..m_max.

    Derived from scratch out of the functional equation of log Gamma: the tail
    R(x) = log Gamma(x) - (x - 1/2) log x + x - log(2 pi)/2 satisfies

        R(x+1) - R(x) = 1 - (x + 1/2) log(1 + 1/x),

    and matching 1/x expansions determines the c_m triangularly.  The odd
    1/x-orders carry no unknown and must balance on their own; that they do is
    asserted here, making this an oracle independent of Bernoulli numbers.
    """
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    k_max = 2 * m_max + 1

    # RHS coefficients of u^k, u = 1/x.
    rhs = {}
    for k in range(1, k_max + 1):
        rhs[k] = Fraction((-1) ** (k + 1), k + 1) + Fraction((-1) ** k, 2 * k)

    # LHS: sum_m c_m [ (x+1)^(1-2m) - x^(1-2m) ] = sum_m c_m sum_{j>=1} C(1-2m, j) u^(j+2m-1).
    def binom_gen(e: int, j: int) -> Fraction:
        out = Fraction(1)
        for i in range(j):
            out *= Fraction(e - i, i + 1)
        return out

    coeffs: list[Fraction] = []
    for k in range(1, k_max + 1):
        acc = Fraction(0)
        for m in range(1, len(coeffs) + 1):
            j = k - (2 * m - 1)
            if j >= 1:
                acc += coeffs[m - 1] * binom_gen(1 - 2 * m, j)
        if k % 2 == 0:
            m_new = k // 2
            # the new unknown enters with j = 1: coefficient (1 - 2m)
            c = (rhs[k] - acc) / Fraction(1 - 2 * m_new)
            coeffs.append(c)
        else:
            if acc != rhs[k]:
                raise EngineError(
                    f"Stirling functional equation fails at 1/x order {k}"
                )
    return coeffs


def stirling_check(z_cap: int) -> tuple[bool, int | None]:
    """Compare the scalar multiplier coefficients with the log-Gamma oracle.

    The z^(2m-1) slot of the exponent, restricted to P = 0 and the top Laurent
    coefficient lam^(1-2m), must equal the oracle coefficient c_m for every
    2m-1 <= z_cap.  Returns (ok, failing_2m).
    """
    if z_cap < 1 or z_cap % 2 == 0:
        raise ValueError("z_cap must be odd and >= 1")
    m_max = (z_cap + 1) // 2
    oracle = stirling_oracle(m_max)
    desc = RingDescriptor(n=2, lambda_floor=2 * m_max + 2)
    exponent = b_series(1, desc, z_cap)
    for m in range(1, m_max + 1):
        slot = exponent.positive_z_part.get(2 * m - 1, CohElement.zero(desc))
        got = slot.component(0).coefficient(1 - 2 * m)
        if got != oracle[m - 1]:
            return False, 2 * m
    return True, None


# -- hypergeometric modification ------------------------------------------------


def _linear_factor_product(
    desc: RingDescriptor, factors: list[tuple[CohElement, Fraction]]
) -> dict[int, CohElement]:
    """Product of factors (a + c z) as a z-polynomial with CohElement coefficients."""
    poly: dict[int, CohElement] = {0: CohElement.one(desc)}
    for a, c in factors:
        out: dict[int, CohElement] = {}
        for ze, el in poly.items():
            t = el * a
            if not t.is_zero():
                out[ze] = out.get(ze, CohElement.zero(desc)) + t
            t = el.scale(c)
            if not t.is_zero():
                out[ze + 1] = out.get(ze + 1, CohElement.zero(desc)) + t
        poly = {ze: el for ze, el in out.items() if not el.is_zero()}
    return poly


def _root_class(desc: RingDescriptor, l: int, equivariant: bool) -> CohElement:
    root = CohElement.p_power(desc, 1, l)
    if equivariant:
        root = root + CohElement.from_scalar(LambdaScalar.lam_power(desc, 1))
    return root


def i_function(J: ZSeries, bundle: BundleSpec) -> ZSeries:
    """Hypergeometric modification: slice d picks up prod_i prod_{k=1}^{l_i d} (lam + l_i P + k z)."""
    desc = J.desc
    out: dict[int, dict[int, CohElement]] = {}
    for d, row in J.slices.items():
        factors: list[tuple[CohElement, Fraction]] = []
        for l in bundle.degrees:
            root = _root_class(desc, l, bundle.equivariant)
            factors.extend((root, Fraction(k)) for k in range(1, l * d + 1))
        multiplier = _linear_factor_product(desc, factors)
        tgt: dict[int, CohElement] = {}
        for z1, el in row.items():
            for z2, mel in multiplier.items():
                prod = el * mel
                if prod.is_zero():
                    continue
                ze = z1 + z2
                tgt[ze] = tgt.get(ze, CohElement.zero(desc)) + prod
        out[d] = tgt
    result = ZSeries(desc, J.max_degree, out, REDUCED)
    top_allowed = {
        d: (sum(bundle.degrees) - desc.n) * d for d in result.slices if d > 0
    }
    for d, bound in top_allowed.items():
        top = max(result.z_exponents(d))
        if top > bound:
            raise AssertionError(f"slice {d} exceeds derived z-bound {bound}")
    return result


def serre_dual_i(J: ZSeries, bundle: BundleSpec):
    """Twist by the dual bundle with the dual circle action.

    Slice d of the output is J_d * prod_i prod_{k=0}^{l_i d - 1} (lam + l_i P + k z)
    with the Novikov sign (-1)^(sum_i l_i d).  The finite product identity

        prod_{k=1-l_i d}^{0} (-lam - l_i P + k z) = (-1)^(l_i d) prod_{k=0}^{l_i d - 1} (lam + l_i P + k z)

    is expanded on both sides for every root and degree; the residual must
    vanish identically.  Returns (series, ok, first_failure).
    """
    desc = J.desc
    first_failure = None
    ok = True
    out: dict[int, dict[int, CohElement]] = {}
    for d, row in J.slices.items():
        factors: list[tuple[CohElement, Fraction]] = []
        sign = 1
        for i, l in enumerate(bundle.degrees):
            root = _root_class(desc, l, bundle.equivariant)
            count = l * d
            sign *= (-1) ** count
            factors.extend((root, Fraction(k)) for k in range(0, count))
            if d > 0:
                lhs = _linear_factor_product(
                    desc,
                    [(-root, Fraction(k)) for k in range(1 - count, 1)],
                )
                rhs = _linear_factor_product(
                    desc, [(root, Fraction(k)) for k in range(0, count)]
                )
                rhs = {ze: el.scale((-1) ** count) for ze, el in rhs.items()}
                keys = set(lhs) | set(rhs)
                for ze in keys:
                    diff = lhs.get(ze, CohElement.zero(desc)) - rhs.get(
                        ze, CohElement.zero(desc)
                    )
                    if not diff.is_zero():
                        ok = False
                        if first_failure is None:
                            first_failure = (i, d)
        multiplier = _linear_factor_product(desc, factors)
        tgt: dict[int, CohElement] = {}
        for z1, el in row.items():
            for z2, mel in multiplier.items():
                prod = (el * mel).scale(sign)
                if prod.is_zero():
                    continue
                ze = z1 + z2
                tgt[ze] = tgt.get(ze, CohElement.zero(desc)) + prod
        out[d] = tgt
    return ZSeries(desc, J.max_degree, out, REDUCED), ok, first_failure


# -- cone transformation -----------------------------------------------------------


def bundle_exponent_slots(
    bundle: BundleSpec, desc: RingDescriptor, z_cap: int, sign: int
) -> dict[int, CohElement]:
    """Summed multiplier exponent of a bundle, as z-slot -> CohElement."""
    slots: dict[int, CohElement] = {}
    for l in bundle.degrees:
        for ze, el in b_series(l, desc, z_cap).z_slots(sign).items():
            slots[ze] = slots.get(ze, CohElement.zero(desc)) + el
    return slots


def cone_transform(
    f: ZSeries,
    bundle: BundleSpec,
    sign: int = 1,
    invert: bool = False,
    z_cap: int | None = None,
) -> ZSeries:
    """Multiply by the exponentiated asymptotic-expansion multiplier of the bundle.

    sign substitutes z -> sign*z in the exponent; invert negates the whole
    exponent, so transforming and inverse-transforming is exactly the
    identity at any truncation.  The empty bundle gives the identity map.
    """
    if not bundle.degrees:
        return f
    if not bundle.equivariant:
        raise EngineError("the cone transform requires the equivariant parameter")
    desc = f.desc
    if z_cap is None:
        z_cap = 2 * f.max_degree + 1
    slots = bundle_exponent_slots(bundle, desc, z_cap, sign)
    if invert:
        slots = {ze: -el for ze, el in slots.items()}
    exponent = ZSeries(desc, f.max_degree, {0: slots}, f.convention)
    return f * exponent.exp()
