"""Re-derive the radial Euler-Lagrange equation from the Lagrangian and
compare it with the displayed coefficient forms used by the library.

    python3 scripts/derive_el.py

Prints, for several dimensions, the coefficient M~ in H'' = (H - s K) M~,
checks it against -G(H/s, K)/s^2 built from U, V, W, and against the
literal (I + II)/III form.
"""
import random
import sympy as sp

s, H, K, a, b = sp.symbols("s H K a b", positive=True)
t, y = sp.symbols("t y", positive=True)


def lagrangian(n):
    return (a * s ** (n - 1) * ((n - 1) * H**2 / s**2 + K**2) ** sp.Rational(n, 2)
            + b * H ** (n - 1) * ((n - 1) * s**2 / H**2 + 1 / K**2) ** sp.Rational(n, 2) * K)


def el_coefficient(n):
    L = lagrangian(n)
    LK = sp.diff(L, K)
    LH = sp.diff(L, H)
    LKK = sp.diff(LK, K)
    LKs = sp.diff(LK, s)
    LKH = sp.diff(LK, H)
    hdd = (LH - LKs - LKH * K) / LKK
    return sp.simplify(hdd / (H - s * K)), LKK


def uvw(n):
    e = sp.Rational(n - 4, 2)
    U = a * ((n - 1) * t**2 + y**2) ** e * ((n - 1) * t**2 + (n - 2) * t * y + y**2)
    V = b * ((n - 1) * y**2 + t**2) ** e * (t**2 + (n - 2) * t * y + (n - 1) * y**2) / (t * y ** (n - 1))
    W = (t**2 + y**2) * (a * ((n - 1) * t**2 + y**2) ** e + b * t * ((n - 1) * y**2 + t**2) ** e / y ** (n + 1))
    return U, V, W


def displayed_m(n):
    e = sp.Rational(n - 4, 2)
    I = a / s * ((n - 1) * H**2 + s**2 * K**2) ** e * ((n - 1) * H**2 + (n - 2) * s * H * K + s**2 * K**2)
    II = b * H ** (n - 1) * ((n - 1) * K**2 * s**2 + H**2) ** e * K ** (1 - n) * (H**2 + (n - 2) * s * H * K + (n - 1) * s**2 * K**2)
    III = (H**2 + s**2 * K**2) * (a * s * ((n - 1) * H**2 + K**2 * s**2) ** e
                                  + b * H * ((n - 1) * s**2 * K**2 + H**2) ** e / K ** (1 + n))
    return (I + II) / III


def corrected_m(n):
    e = sp.Rational(n - 4, 2)
    I = a / s * ((n - 1) * H**2 + s**2 * K**2) ** e * ((n - 1) * H**2 + (n - 2) * s * H * K + s**2 * K**2)
    II = b / H * ((n - 1) * K**2 * s**2 + H**2) ** e * K ** (1 - n) * (H**2 + (n - 2) * s * H * K + (n - 1) * s**2 * K**2)
    III = (H**2 + s**2 * K**2) * (a * s * ((n - 1) * H**2 + K**2 * s**2) ** e
                                  + b * H * ((n - 1) * s**2 * K**2 + H**2) ** e / K ** (1 + n))
    return (I + II) / III


def factored_lkk(n):
    e = sp.Rational(n - 4, 2)
    return (n - 1) * n * (K**2 * s**2 + H**2) * (
        a * s * (s**2 * K**2 + (n - 1) * H**2) ** e
        + b * H * ((n - 1) * s**2 * K**2 + H**2) ** e / K ** (n + 1))


def main():
    rng = random.Random(7)
    for n in range(2, 7):
        m_true, _ = el_coefficient(n)
        U, V, W = uvw(n)
        g = -(U + V) / W
        m_disp = displayed_m(n)
        m_fix = corrected_m(n)
        lkk_fix = factored_lkk(n)
        _, lkk = el_coefficient(n)
        worst_g = worst_d = worst_f = worst_k = 0.0
        for _ in range(50):
            vals = {s: rng.uniform(0.3, 3), H: rng.uniform(0.3, 3), K: rng.uniform(0.3, 3),
                    a: rng.uniform(0.1, 2), b: rng.uniform(0.1, 2)}
            mt = float(m_true.subs(vals))
            gv = float(g.subs({t: vals[H] / vals[s], y: vals[K], a: vals[a], b: vals[b]}))
            md = float(m_disp.subs(vals))
            # H'' = (H - sK) M~  and  H'' = G (sK - H)/s^2  =>  M~ = -G/s^2
            worst_g = max(worst_g, abs(mt - (-gv / vals[s] ** 2)) / abs(mt))
            worst_d = max(worst_d, abs(mt - md) / abs(mt))
            worst_f = max(worst_f, abs(mt - float(m_fix.subs(vals))) / abs(mt))
            kk = float(lkk.subs(vals))
            worst_k = max(worst_k, abs(kk - float(lkk_fix.subs(vals))) / kk)
        print(f"n={n}: max rel |M~ + G/s^2| = {worst_g:.3e};  max rel |M~ - (I+II)/III| = {worst_d:.3e}")
        print(f"      with II using H^-1: {worst_f:.3e};  factored L_KK: {worst_k:.3e}")
        if n == 2:
            print("  n=2 M~ =", sp.factor(m_true))


if __name__ == "__main__":
    main()
