"""Regenerate lp_roots.txt: LP01/LP11 roots u(V) at 30 significant digits with mpmath."""

from pathlib import Path

import mpmath as mp

mp.mp.dps = 40


def root(m, v):
    v = mp.mpf(v)
    w = lambda u: mp.sqrt(v * v - u * u)
    if m == 0:
        f = lambda u: u * mp.besselj(1, u) / mp.besselj(0, u) - w(u) * mp.besselk(1, w(u)) / mp.besselk(0, w(u))
        lo, hi = mp.mpf("1e-6"), min(mp.besseljzero(0, 1), v) - mp.mpf("1e-12")
    else:
        f = lambda u: u * mp.besselj(0, u) / mp.besselj(1, u) + w(u) * mp.besselk(0, w(u)) / mp.besselk(1, w(u))
        lo, hi = mp.besseljzero(0, 1) + mp.mpf("1e-12"), min(mp.besseljzero(1, 1), v) - mp.mpf("1e-12")
    return mp.findroot(f, (lo, hi), solver="anderson")


if __name__ == "__main__":
    lines = ["# m V u"]
    for v in ("1.0", "2.0", "2.4", "3.0", "3.5", "4.0", "4.66", "5.5", "7.0"):
        lines.append(f"0 {v} {mp.nstr(root(0, v), 30)}")
    for v in ("2.5", "3.0", "3.5", "4.0", "4.66", "5.5", "7.0"):
        lines.append(f"1 {v} {mp.nstr(root(1, v), 30)}")
    Path(__file__).with_name("lp_roots.txt").write_text("\n".join(lines) + "\n")
