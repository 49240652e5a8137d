"""Reference values for the Aubry quantities, computed with mpmath quadrature
independently of the C++ code. Run with `python3 aubry_oracles.py`; the printed
numbers are frozen into tests/test_aubry.cpp."""

import mpmath as mp

mp.mp.dps = 30
two_pi = 2 * mp.pi


def quad(f, a, b):
    return mp.quad(f, [a, (a + b) / 2, b])


def aubry(B, Hu):
    inv = quad(lambda x: 1 / B(x), 0, 1)
    mu = quad(lambda x: Hu(x) / B(x), 0, 1) / inv
    rho = lambda x: mp.e ** quad(lambda s: (mu - Hu(s)) / B(s), 0, x)
    f = lambda x: two_pi * quad(lambda s: 1 / B(s), 0, x) / inv
    return mu, -inv, rho, f


def report(name, B, Hu, points=(0.25, 0.5, 0.75)):
    mu, Z, rho, f = aubry(B, Hu)
    print(f"[{name}]")
    print(f"  mu = {mp.nstr(mu, 17)}")
    print(f"  Z  = {mp.nstr(Z, 17)}")
    for x in points:
        print(f"  rho({x}) = {mp.nstr(rho(x), 17)}   f({x}) = {mp.nstr(f(x), 17)}")
    grid = [mp.mpf(i) / 2048 for i in range(2048)]
    rho_vals = [rho(x) for x in grid[::16]]
    print(f"  min rho (coarse) = {mp.nstr(min(rho_vals), 12)}  max rho (coarse) = {mp.nstr(max(rho_vals), 12)}")


# H = p^2 + p + lambda(x) u, u0 = 0: B = 1, H_u = lambda.
lam1 = lambda x: 1 + 0.5 * mp.sin(two_pi * x) + 0.25 * mp.cos(2 * two_pi * x)
report("example1 lambda = 1 + 0.5 sin 2pi x + 0.25 cos 4pi x", lambda x: mp.mpf(1), lam1)

lam1b = lambda x: 1 + 0.5 * mp.sin(two_pi * x)
report("example1 lambda = 1 + 0.5 sin 2pi x", lambda x: mp.mpf(1), lam1b)

# H = p^2 + V p + lambda (sqrt(u^2+1) - sqrt 2), u0 = +-1: B = V, H_u = lambda u / sqrt 2.
V = lambda x: 1 + 0.3 * mp.sin(two_pi * x)
lam2 = lambda x: 1 + 0.5 * mp.cos(two_pi * x)
for u in (1, -1):
    report(f"example2 V = 1 + 0.3 sin 2pi x, lambda = 1 + 0.5 cos 2pi x, u0 = {u}", V,
           lambda x, u=u: lam2(x) * u / mp.sqrt(2))
report("example2 V = 1 + 0.3 sin 2pi x, lambda = 1, u0 = 1", V, lambda x: 1 / mp.sqrt(2))
