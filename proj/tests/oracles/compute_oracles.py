"""Independent high-precision oracles for frozen test values (mpmath)."""
import mpmath as mp

mp.mp.dps = 40


def matrix_ode_diag(a0, lam, t):
    # For diagonal A with real diagonal entries, each entry solves the scalar
    # equation a' = -i a^2 + 2 i lam Re a independently.
    def f(s, y):
        a = mp.mpc(y[0], y[1])
        da = -1j * a * a + 2j * lam * a.real
        return [da.real, da.imag]
    sol = mp.odefun(f, 0, [mp.mpf(a0), mp.mpf(0)])
    return sol(t)


def breather(alpha_r, alpha_i, lam, t):
    def f(s, y):
        r, rd = y
        return [rd, 1 / r**3 - 2 * lam / r]
    return mp.odefun(f, 0, [mp.mpf(alpha_r), mp.mpf(alpha_i)])(t)


def breather_period(lam):
    # alpha = (1, 0): r oscillates between r_min and 1, H = 1/2.
    H = mp.mpf(1) / 2
    g = lambda r: 2 * (H - 1 / (2 * r * r) - 2 * lam * mp.log(r))
    rmin = mp.findroot(lambda r: g(r), 0.5)
    T = 2 * mp.quad(lambda r: 1 / mp.sqrt(g(r)), [rmin, 1])
    return rmin, T


def breather_phase(lam, t):
    # Phi(t) = 1/2 int 1/r^2 + lam int ln(r / alpha_r) - lam t, alpha = (1, 0)
    def f(s, y):
        r, rd, ph = y
        return [rd, 1 / r**3 - 2 * lam / r, 1 / (2 * r * r) + lam * mp.log(r) - lam]
    return mp.odefun(f, 0, [mp.mpf(1), mp.mpf(0), mp.mpf(0)])(t)[2]


if __name__ == "__main__":
    for a0 in (1, 3):
        print("A_diag", a0, [mp.nstr(v, 20) for v in matrix_ode_diag(a0, mp.mpf("0.5"), 1)])
    rmin, T = breather_period(1)
    print("rmin", mp.nstr(rmin, 20), "period", mp.nstr(T, 20))
    print("r(10)", [mp.nstr(v, 20) for v in breather(1, 0, 1, 10)])
    print("Phi(1)", mp.nstr(breather_phase(1, 1), 20))
    print("gausson mass d=1 lam=1", mp.nstr(mp.e * mp.sqrt(mp.pi / 2), 20))
    print("sqrt mass", mp.nstr(mp.sqrt(mp.e * mp.sqrt(mp.pi / 2)), 20))
    print("tail y=1 g=1", mp.nstr(mp.quad(lambda x: mp.exp(-x * x), [1, mp.inf]), 20), mp.nstr(mp.exp(-1) / 2, 20))
    print("tail y=10", mp.nstr(mp.sqrt(mp.pi) / 2 * mp.erfc(10), 20), mp.nstr(mp.exp(-100) / 20, 20))
    print("I4 g=2 R=3", mp.nstr(mp.quad(lambda x: x**4 * mp.exp(-2 * x * x), [3, mp.inf]), 20))
    print("gausson tail R=5", mp.nstr(mp.e * mp.sqrt(mp.pi / 2) * mp.erfc(5 * mp.sqrt(2)), 20))

    def smoothstep(s):
        if s <= -1:
            return mp.mpf(1)
        if s >= 1:
            return mp.mpf(0)
        u = (s + 1) / 2
        return 1 - u**3 * (10 - 15 * u + 6 * u * u)

    # Gausson d=1, lam=1, omega=0: |G|^2 = exp(1 - 2 x^2); smooth tail weight 1 - phi(|x| - R0).
    R0 = mp.mpf(3)
    w = lambda x: 1 - smoothstep(x - R0)
    tail2 = 2 * mp.quad(lambda x: w(x) * mp.exp(1 - 2 * x * x), [R0 - 1, R0, R0 + 1, mp.inf])
    print("smooth tail l2 R0=3", mp.nstr(mp.sqrt(tail2), 20))
    g2 = 2 * mp.quad(lambda x: w(x) * (1 + 4 * x * x) * mp.exp(1 - 2 * x * x), [R0 - 1, R0, R0 + 1, mp.inf])
    print("smooth tail grad R0=3 v=1", mp.nstr(mp.sqrt(g2), 20))

    # Two Gaussons d=1, lam=1, omega=0, v=+1 at -2 and v=-1 at +2 (s = 4).
    s = mp.mpf(4)
    ga = lambda x: mp.sqrt(1 + 4 * (x + 2) ** 2) * mp.exp(mp.mpf(1) / 2 - (x + 2) ** 2)
    gb = lambda x: mp.sqrt(1 + 4 * (x - 2) ** 2) * mp.exp(mp.mpf(1) / 2 - (x - 2) ** 2)
    Gb = lambda x: mp.exp(mp.mpf(1) / 2 - (x - 2) ** 2)
    print("overlap grad_mod s=4", mp.nstr(mp.quad(lambda x: ga(x) * Gb(x), [-mp.inf, -2, 0, 2, mp.inf]), 20))
    print("overlap grad_grad s=4", mp.nstr(mp.quad(lambda x: ga(x) * gb(x), [-mp.inf, -2, 0, 2, mp.inf]), 20))
    Ga = lambda x: mp.exp(mp.mpf(1) / 2 - (x + 2) ** 2)
    print("overlap weighted s=4", mp.nstr(mp.quad(lambda x: Ga(x) * Gb(x) * (1 + (x + 2) ** 2), [-mp.inf, -2, 0, 2, mp.inf]), 20))
