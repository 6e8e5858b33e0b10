"""Reference stencil coefficients by adaptive quadrature.

Integrates the bilinear hat times the reweighted kernel over each mesh cell
of the quarter disc with scipy's dblquad, independently of the Rust
quadrature. Usage: python3 make_stencil_golden.py ALPHA DELTA H > out.txt
"""
import math
import sys

from scipy.integrate import dblquad


def coefficients(alpha, delta, h):
    radius = math.floor(delta / h) + 1
    norm = 2.0 * (4.0 - alpha) / (math.pi * delta ** (4.0 - alpha))

    def weight(y, x):
        r = math.hypot(x, y)
        if r == 0.0 or r > delta:
            return 0.0
        return norm * r ** (2.0 - alpha) / (x + y)

    def cell(a, b, p, q):
        x0, x1 = a * h, min((a + 1) * h, delta)
        if x0 >= x1:
            return 0.0

        def top(x):
            return min((b + 1) * h, math.sqrt(max(delta * delta - x * x, 0.0)))

        def f(y, x):
            hat = (1.0 - abs(x / h - p)) * (1.0 - abs(y / h - q))
            return hat * weight(y, x)

        val, _ = dblquad(f, x0, x1, lambda x: b * h, lambda x: max(top(x), b * h),
                         epsabs=1e-15, epsrel=1e-13)
        return val

    table = [[0.0] * (radius + 1) for _ in range(radius + 1)]
    for p in range(radius + 1):
        for q in range(radius + 1):
            if p == 0 and q == 0:
                continue
            total = 0.0
            for a in (p - 1, p):
                for b in (q - 1, q):
                    if a >= 0 and b >= 0:
                        total += cell(a, b, p, q)
            table[p][q] = (p + q) / ((p * p + q * q) * h) * total
    for p in range(radius + 1):
        for q in range(p):
            table[p][q] = table[q][p] = 0.5 * (table[p][q] + table[q][p])
    return radius, table


def main():
    alpha, delta, h = (float(v) for v in sys.argv[1:4])
    radius, table = coefficients(alpha, delta, h)
    print(f"r={radius} alpha={alpha!r} delta={delta!r} h={h!r}")
    for row in table:
        print(" ".join(f"{c:.16e}" for c in row))


if __name__ == "__main__":
    main()
