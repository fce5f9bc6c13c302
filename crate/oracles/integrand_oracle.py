"""High-precision profile values and conjugates (mpmath, 40 digits)."""
import mpmath as mp

mp.mp.dps = 40


def g(mu, r):
    return mp.quad(lambda t: (r - t) * (1 + t * t) ** (-mu / 2), [0, r])


def g1(mu, r):
    return mp.quad(lambda t: (1 + t * t) ** (-mu / 2), [0, r])


def c_inf(mu):
    # int_0^inf (1+t^2)^(-mu/2) dt = B(1/2, (mu-1)/2) / 2; direct quadrature
    # of the slowly decaying tail is unreliable for mu near 1.
    return mp.beta(mp.mpf(1) / 2, (mu - 1) / 2) / 2


def conj(mu, s):
    # g*(s) = s r - g(r) at g'(r) = s.
    r = mp.findroot(lambda r: g1(mu, r) - s, 1)
    return s * r - g(mu, r)


mu = mp.mpf("1.5")
for r in ["0.5", "1", "2", "5", "10"]:
    print(f"phi(1.5, {r}) = {mp.nstr(g(mu, mp.mpf(r)), 20)}")
print(f"c_inf(1.5) = {mp.nstr(c_inf(mu), 20)}")
print(f"c_inf(1.2) = {mp.nstr(c_inf(mp.mpf('1.2')), 20)}")
for s in ["0.5", "1", "1.5"]:
    print(f"conj(1.5, {s}) = {mp.nstr(conj(mu, mp.mpf(s)), 20)}")
print(f"conj(3, 0.5) = {mp.nstr(conj(mp.mpf(3), mp.mpf('0.5')), 20)}")
