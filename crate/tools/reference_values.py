"""Reference values for crates/core/tests/reference_values.rs.

Evaluates the spectral averages with mpmath's adaptive tanh-sinh quadrature
at 30 digits, directly from the rational phase factor, so the numbers do not
share any code path with the Rust quadrature rules.
"""
import mpmath as mp

mp.mp.dps = 30
I = mp.mpc(0, 1)


def phase(k, lam2, kappa, gamma, delta_e):
    d = delta_e - I * gamma
    wp = k * k - (d + I * kappa) * k - lam2 + I * kappa * d
    wm = k * k - (d - I * kappa) * k - lam2 - I * kappa * d
    return (k + I * kappa) * wp / ((k - I * kappa) * wm)


def density(profile, delta_p, kappa_p):
    if profile == "gaussian":
        return lambda k: mp.exp(-((k - delta_p) / kappa_p) ** 2) / (mp.sqrt(mp.pi) * kappa_p)
    return lambda k: kappa_p / mp.pi / ((k - delta_p) ** 2 + kappa_p**2)


def average(g, profile, delta_p, kappa_p):
    rho = density(profile, delta_p, kappa_p)
    pts = sorted({-mp.inf, delta_p - 10 * kappa_p, -3, 0, 3, delta_p, delta_p + 10 * kappa_p, mp.inf})
    return mp.quad(lambda k: rho(k) * g(k), pts, maxdegree=10)


def moments(c, kappa_p, profile="gaussian", delta_e=0.0, delta_p=0.0, kappa=2.0, gamma=1.0):
    lam2 = c * kappa * gamma
    h = lambda k: (phase(k, lam2, kappa, gamma, delta_e) - 1) / 2
    mean = average(h, profile, delta_p, kappa_p)
    sq = average(lambda k: abs(h(k)) ** 2, profile, delta_p, kappa_p)
    return mean, sq


def f_qm(*args, **kw):
    mean, sq = moments(*args, **kw)
    return abs(mean) ** 2 / sq


def f_swap(*args, **kw):
    return moments(*args, **kw)[1]


def tabulated_storage_retrieval(c, kappa_p, x, ratio, eta):
    """F and P(k_L), P(L) for input with |c_L|^2 = x and efficiency eta(k)."""
    lam2 = c * 2.0
    s2 = (2 * ratio / (1 + ratio**2)) ** 2  # sin^2 2xi
    t = lambda k: (phase(k, lam2, 2.0, 1.0, 0.0) - 1) / 2 * mp.sqrt(s2)
    avg = lambda g: average(g, "gaussian", 0.0, kappa_p)
    m, a = avg(t), avg(lambda k: abs(t(k)) ** 2)
    y = 1 - x
    num = avg(lambda k: eta(k) * abs(y * t(k) + x * m) ** 2)
    den = avg(lambda k: eta(k) * (y * abs(t(k)) ** 2 + x * a))
    p_kl = avg(lambda k: eta(k) * (y * abs(t(k)) ** 2 + x))
    return num / den, p_kl, den / p_kl


def eta_table(k):
    # piecewise linear through (-0.5, 0.6), (0.5, 0.9), clamped
    if k <= -0.5:
        return mp.mpf("0.6")
    if k >= 0.5:
        return mp.mpf("0.9")
    return mp.mpf("0.6") + (k + 0.5) * mp.mpf("0.3")


if __name__ == "__main__":
    rows = {
        "F_qm gaussian C=10 kp/k=0.1": f_qm(10, 0.2),
        "F_qm gaussian C=100 kp/k=0.1": f_qm(100, 0.2),
        "F_qm gaussian C=20 kp/k=0.05": f_qm(20, 0.1),
        "F_qm gaussian C=20 kp/k=0.01": f_qm(20, 0.02),
        "F_qm lorentzian C=20 kp/k=0.01": f_qm(20, 0.02, "lorentzian"),
        "F_qm lorentzian C=20 kp/k=0.1 de=10": f_qm(20, 0.2, "lorentzian", delta_e=10.0),
        "F_qm gaussian C=10 kp/k=0.1 dp=0.5": f_qm(10, 0.2, delta_p=0.5),
        "F_swap gaussian C=200 kp/k=1e-3": f_swap(200, 0.002),
        "F_swap gaussian C=10 kp/k=0.1 de=5": f_swap(10, 0.2, delta_e=5.0),
    }
    for name, v in rows.items():
        print(f"{name}: {mp.nstr(v, 17)}")
    f, p_kl, p_l = tabulated_storage_retrieval(10, 0.4, mp.mpf("0.3"), 0.5, eta_table)
    print(f"tabulated F_sr C=10 kp=0.4 x=0.3 ratio=0.5: {mp.nstr(f, 17)}")
    print(f"tabulated P_kL: {mp.nstr(p_kl, 17)}")
    print(f"tabulated P_L: {mp.nstr(p_l, 17)}")
