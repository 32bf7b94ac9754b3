"""Independent reference values frozen into the C++ unit tests.

Evaluates the scalar Green's function and its integrals with mpmath (30
significant digits) and adaptive quadrature, sharing no code with the library.
Run: python3 tests/oracles/generate_oracles.py
"""

import mpmath as mp

mp.mp.dps = 30
Z0 = 120 * mp.pi


def green(x, d, lam):
    x, d, lam = mp.mpf(x), mp.mpf(d), mp.mpf(lam)
    R = mp.sqrt(x * x + d * d)
    k = 2 * mp.pi / lam
    ang = (d * d - 2 * x * x) / (x * x + d * d)
    bracket = 1j / (k * R) * ang + d * d / (x * x + d * d) - ang / (k * k * (x * x + d * d))
    return 1j * Z0 * mp.exp(1j * k * R) / (2 * lam * R) * bracket


def energy(x, d, lam):
    return abs(green(x, d, lam)) ** 2


def kernel(r, rp, d, lam, l, P):
    # Integrand oscillates slowly at d = 10; split [0, l] into panels for mp.quad.
    pts = [mp.mpf(l) * i / 16 for i in range(17)]
    re = mp.quad(lambda s: mp.re(green(r - s, d, lam) * mp.conj(green(rp - s, d, lam))), pts)
    im = mp.quad(lambda s: mp.im(green(r - s, d, lam) * mp.conj(green(rp - s, d, lam))), pts)
    return P * re, P * im


def diag(r, d, lam, l, P):
    pts = [mp.mpf(l) * i / 16 for i in range(17)]
    return P * mp.quad(lambda s: energy(r - s, d, lam), pts)


def energy_double_integral(d, lam, l):
    # int_0^l int_0^l h(r - s) dr ds = 2 int_0^l (l - x) h(x) dx for even h.
    pts = [mp.mpf(l) * i / 32 for i in range(33)]
    return 2 * mp.quad(lambda x: (l - x) * energy(x, d, lam), pts)


def main():
    mp.nprint(green(0, 1.0, 0.04), 25)
    g = green(0, 1.0, 0.04)
    print("green x=0 d=1:", mp.nstr(mp.re(g), 20), mp.nstr(mp.im(g), 20))
    g = green(0.3, 0.5, 0.04)
    print("green x=0.3 d=0.5:", mp.nstr(mp.re(g), 20), mp.nstr(mp.im(g), 20))
    g = green(-1.7, 0.1, 0.04)
    print("green x=-1.7 d=0.1:", mp.nstr(mp.re(g), 20), mp.nstr(mp.im(g), 20))

    kr, ki = kernel(0.5, 1.5, 10.0, 0.04, 2.0, 1.0)
    print("kernel r=0.5 r'=1.5 d=10:", mp.nstr(kr, 20), mp.nstr(ki, 20))

    l, d, lam = 2.0, 10.0, 0.04
    e = energy_double_integral(d, lam, l)
    print("trace d=10 (P=1):", mp.nstr(e, 20))

    # n1 at m = 4, n0 = 2: n0 * sum K(r_i, r_i) / int K(r, r) dr
    m = 4
    num = sum(diag((i + 0.5) * l / m, d, lam, l, 1.0) for i in range(m))
    print("n1 m=4 d=10:", mp.nstr(2 * num / e, 20))

    # n2 at m1 = m2 = 4: n0 * sum |G(r_i - s_j)|^2 / int int |G|^2
    num = sum(energy((i + 0.5) * l / m - (j + 0.5) * l / m, d, lam) for i in range(m) for j in range(m))
    print("n2 m1=m2=4 d=10:", mp.nstr(2 * num / e, 20))


if __name__ == "__main__":
    main()
