"""Independent arbitrary-precision oracles for the poisson and metric tests.

Run with `python3 poisson_oracle.py`; the printed values are frozen into
tests/test_poisson.cpp and tests/acceptance.cpp.
"""
import mpmath as mp
from scipy import integrate

mp.mp.dps = 50


def cdf(mean, r):
    mean = mp.mpf(mean)
    return mp.fsum(mean**i * mp.e**(-mean) / mp.factorial(i) for i in range(r + 1))


def upper(mean, conf):
    if mean == 0:
        return 0
    r = 0
    while cdf(mean, r) < mp.mpf(conf):
        r += 1
    return r


print("lambda_at(0.5,-0.002,1000) =", mp.nstr(mp.mpf("0.5") * mp.e**(mp.mpf("-0.002") * 1000), 17))
val, err = integrate.quad(lambda x: mp.e**(-0.001 * x), 0, 1000, epsabs=1e-13)
print("quad int_0^1000 e^-0.001x =", repr(float(val)), "err", err)
print("pmf(2,2) =", mp.nstr(4 * mp.e**-2 / 2, 17))
print("pmf(1,0) =", mp.nstr(mp.e**-1, 17))
for m, c in [(10, 0.95), (5, 0.5)]:
    r = upper(m, c)
    print(f"upper({m},{c}) = {r}  cdf(r)={mp.nstr(cdf(m, r), 6)} cdf(r-1)={mp.nstr(cdf(m, r-1), 6)}")
print("table for acceptance 3a:")
for m in ["0.1", "1", "5", "10", "50", "200"]:
    print(m, [upper(mp.mpf(m), mp.mpf(c)) for c in ["0.5", "0.9", "0.95", "0.99"]])
