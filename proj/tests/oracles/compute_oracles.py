"""Independent high-precision oracles for frozen test values (mpmath)."""
import mpmath as mp

mp.mp.dps = 40
e = mp.e

def psi(alpha, x):
    return x * mp.log(e + x) ** alpha

def eta(N, x):
    return x ** N * mp.log(e + 1 / x) ** (mp.mpf(N) / 2)

print("psi(1,1)          =", mp.nstr(psi(1, 1), 20))
print("psi(2,e^2-e)      =", mp.nstr(psi(2, e**2 - e), 20), "x=", mp.nstr(e**2 - e, 20))
print("psi_inv(1,10)     =", mp.nstr(mp.findroot(lambda x: psi(1, x) - 10, 4.6), 20))
print("eta(2,1)          =", mp.nstr(eta(2, 1), 20))
print("eta(1,1)          =", mp.nstr(eta(1, 1), 20))

def c_eta(N, m):
    f = lambda s: s * eta(N, s) ** (m - 1)
    return mp.quad(f, [0, mp.mpf('1e-8'), mp.mpf('1e-4'), mp.mpf('0.01'), 1])

def cumulative(N, m, g):
    f = lambda s: s * eta(N, s) ** (m - 1)
    pts = [0] + [g * mp.mpf(10) ** (-k) for k in (8, 4, 2)] + [g]
    return mp.quad(f, pts)

for (N, m) in [(1, 0.5), (2, 0.5), (2, 0.8)]:
    m = mp.mpf(m)
    C = c_eta(N, m)
    g = mp.findroot(lambda gg: cumulative(N, m, gg) - C * mp.mpf('0.5'), 0.5)
    print(f"C_eta(N={N},m={m}) =", mp.nstr(C, 20), " gamma(0.5) =", mp.nstr(g, 20))

print("critical profile N=2 at 1 =", mp.nstr(mp.log(e + 1) ** -2, 20))
print("0.12^(-1/1.1)     =", mp.nstr(mp.mpf('0.12') ** (-1 / mp.mpf('1.1')), 20))

# Orlicz ball average: PowerLaw(1, 0.8), N=1, alpha=1, z=0, sigma=0.1
sig = mp.mpf('0.1')
avg = mp.quad(lambda r: psi(1, r ** mp.mpf('-0.8')), [0, mp.mpf('1e-12'), mp.mpf('1e-6'), sig]) / sig
val = mp.findroot(lambda x: psi(1, x) - avg, 10)
print("orlicz avg PL(1,.8) N=1 a=1 s=.1 =", mp.nstr(val, 20), " (avg psi =", mp.nstr(avg, 20), ")")

print("gronwall 2.25e    =", mp.nstr(mp.mpf('2.25') * e, 20))
print("Barenblatt U(0,2) N=1 m=.5 =", mp.nstr(mp.mpf(2) ** (-mp.mpf(2) / 3), 20))

# Energy of linear field u = 1 + r on 1-D ball radius 1 with m=0.5, beta=2:
m, beta = mp.mpf('0.5'), 2
val = 2 * mp.quad(lambda r: (1 + r) ** (m + beta - 3), [0, 1])
print("dirichlet linear 1-D (a=1,b=1,m=.5,beta=2,sigma=1) =", mp.nstr(val, 20))
print("mass_beta linear  =", mp.nstr(2 * mp.quad(lambda r: (1 + r) ** beta, [0, 1]), 20))
