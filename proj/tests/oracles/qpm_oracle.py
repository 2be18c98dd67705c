"""Independent reference values for the QPM unit tests (mpmath, 40 digits).

Run: python3 tests/oracles/qpm_oracle.py
"""
from mpmath import mp, mpf, sqrt, pi, sin, findroot

mp.dps = 40


def jundt(lam_um, T, offset=mpf("0.03")):
    a1, a2, a3, a4, a5, a6 = map(mpf, ["5.35583", "0.100473", "0.20692", "100", "11.34927", "1.5334e-2"])
    b1, b2, b3, b4 = map(mpf, ["4.629e-7", "3.862e-8", "-0.89e-8", "2.657e-5"])
    f = (T - mpf("24.5")) * (T + mpf("570.82"))
    l2 = lam_um ** 2
    n2 = a1 + b1 * f + (a2 + b2 * f) / (l2 - (a3 + b3 * f) ** 2) + (a4 + b4 * f) / (l2 - a5 ** 2) - a6 * l2
    return sqrt(n2) + offset


def cauchy(lam_um, T):
    return mpf("2.2") + mpf("0.5") / lam_um ** 2


def k(n, lam_m, T):
    return 2 * pi * n(lam_m * 10 ** 6, T) / lam_m


def mismatch(n, lp, ls, T, period=None):
    li = 1 / (1 / lp - 1 / ls)
    dk = k(n, lp, T) - k(n, ls, T) - k(n, li, T)
    return dk - (2 * pi / period if period else 0)


def period(n, lp, ls, T):
    return 2 * pi / mismatch(n, lp, ls, T)


def fwhm(n, lp, ls0, T, L):
    """Walk outwards from the matched wavelength, then bisect the half-maximum."""
    P = period(n, lp, ls0, T)

    def I(ls):
        x = mismatch(n, lp, ls, T, P) * L / 2
        return (sin(x) / x) ** 2 if x != 0 else mpf(1)

    def edge(step):
        a = ls0
        b = a + step
        while I(b) > mpf("0.5"):
            a, b = b, b + step
        for _ in range(200):
            m = (a + b) / 2
            a, b = (m, b) if I(m) > mpf("0.5") else (a, m)
        return (a + b) / 2

    return edge(mpf("1e-10")) - edge(mpf("-1e-10"))


lp = mpf("657e-9")
print("conjugate(657,1000) nm =", 1 / (1 / mpf(657) - 1 / mpf(1000)))
print("N_P(1uW,657nm) =", mpf("1e-6") * lp / (mpf("6.62607015e-34") * mpf(299792458)))
print("ppp(4uW,80MHz) =", mpf("4e-6") * lp / (mpf("6.62607015e-34") * mpf(299792458)) / mpf("80e6"))
print("eta(150k,150k,1500,1uW) =", mpf(150e3) ** 2 / (2 * mpf(1500)) * mpf("6.62607015e-34") * mpf(299792458) / (mpf("1e-6") * lp))
print("cauchy period degenerate um =", period(cauchy, lp, 2 * lp, 25) * 10 ** 6)
print("cauchy period at 1200 nm um =", period(cauchy, lp, mpf("1200e-9"), 25) * 10 ** 6)
print("LN period degenerate 100C um =", period(jundt, lp, 2 * lp, 100) * 10 ** 6)
print("LN period at 1200 nm 100C um =", period(jundt, lp, mpf("1200e-9"), 100) * 10 ** 6)
print("LN n_eff(1314nm,100C) =", jundt(mpf("1.314"), 100))
for L in (mpf("0.032"), mpf("0.064")):
    print("LN FWHM degenerate L=%s nm =" % L, fwhm(jundt, lp, 2 * lp, 100, L) * 10 ** 9)
print("LN FWHM at 1200 nm L=3.2cm nm =", fwhm(jundt, lp, mpf("1200e-9"), 100, mpf("0.032")) * 10 ** 9)
print("LN FWHM at 1200 nm L=6.4cm nm =", fwhm(jundt, lp, mpf("1200e-9"), 100, mpf("0.064")) * 10 ** 9)
