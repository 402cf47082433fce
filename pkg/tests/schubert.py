"""Independent intersection-theory oracle for the line count on the quintic.

The number of lines on a generic quintic threefold is the Euler number of
Sym^5 of the dual tautological bundle on the Grassmannian G(2, 5).  With
Chern roots x1, x2 of the dual tautological bundle, that Euler class is

    prod_{i=0}^{5} (i x1 + (5 - i) x2),

a symmetric polynomial of degree 6 = dim G(2, 5), and integration sends the
Schur polynomial s_{(3,3)} = (x1 x2)^3 to 1 and every other degree-6 Schur
polynomial to 0.  Multiplying by the Vandermonde x1 - x2 turns Schur
extraction into plain coefficient extraction:

    s_{(a,b)} (x1 - x2) = x1^(a+1) x2^b - x1^b x2^(a+1),

so the integral is the coefficient of x1^4 x2^3 in the product above times
x1 - x2.  Everything here is plain integer polynomial arithmetic with no
shared code with the engine.
"""

from __future__ import annotations

Poly = dict[tuple[int, int], int]


def _mul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for (a1, b1), c1 in p.items():
        for (a2, b2), c2 in q.items():
            key = (a1 + a2, b1 + b2)
            out[key] = out.get(key, 0) + c1 * c2
    return {k: c for k, c in out.items() if c}


def lines_on_quintic() -> int:
    product: Poly = {(0, 0): 1}
    for i in range(6):
        product = _mul(product, {(1, 0): i, (0, 1): 5 - i})
    vandermonde: Poly = {(1, 0): 1, (0, 1): -1}
    integrand = _mul(product, vandermonde)
    return integrand.get((4, 3), 0)
