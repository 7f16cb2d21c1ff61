"""Regenerate the Butcher tableau data files shipped with cubicmars.

RK4 and Verner's 6(5) "DVERK" weights are exact rationals. The 13-stage
Dormand-Prince 8(7) coefficients are only published as rational
approximations whose order-8 residuals are near 6e-18, so they are polished
here by minimum-norm Gauss-Newton in 80-digit arithmetic. The first six
stages are exact and kept fixed, as is the sparsity pattern.

Run from the repository root::

    python3 tools/write_tableaus.py
"""

from __future__ import annotations

import sys
from fractions import Fraction
from pathlib import Path

import mpmath as mp
import numpy as np
import scipy.linalg

sys.path.insert(0, str(Path(__file__).parent))
from _rktrees import residuals  # noqa: E402

OUT = Path(__file__).resolve().parents[1] / "src" / "cubicmars" / "tableaus"
DIGITS = 40

RK4 = (
    [[], ["1/2"], ["0", "1/2"], ["0", "0", "1"]],
    ["1/6", "1/3", "1/3", "1/6"],
)

VERNER6 = (
    [
        [],
        ["1/6"],
        ["4/75", "16/75"],
        ["5/6", "-8/3", "5/2"],
        ["-165/64", "55/6", "-425/64", "85/96"],
        ["12/5", "-8", "4015/612", "-11/36", "88/255"],
        ["-8263/15000", "124/75", "-643/680", "-81/250", "2484/10625", "0"],
        ["3501/1720", "-300/43", "297275/52632", "-319/2322", "24068/84065", "0", "3850/26703"],
    ],
    ["3/40", "0", "875/2244", "23/72", "264/1955", "0", "125/11592", "43/616"],
)

DP8 = (
    [
        [],
        ["1/18"],
        ["1/48", "1/16"],
        ["1/32", "0", "3/32"],
        ["5/16", "0", "-75/64", "75/64"],
        ["3/80", "0", "0", "3/16", "3/20"],
        ["29443841/614563906", "0", "0", "77736538/692538347", "-28693883/1125000000", "23124283/1800000000"],
        ["16016141/946692911", "0", "0", "61564180/158732637", "22789713/633445777", "545815736/2771057229",
         "-180193667/1043307555"],
        ["39632708/573591083", "0", "0", "-433636366/683701615", "-421739975/2616292301", "100302831/723423059",
         "790204164/839813087", "800635310/3783071287"],
        ["246121993/1340847787", "0", "0", "-37695042795/15268766246", "-309121744/1061227803",
         "-12992083/490766935", "6005943493/2108947869", "393006217/1396673457", "123872331/1001029789"],
        ["-1028468189/846180014", "0", "0", "8478235783/508512852", "1311729495/1432422823",
         "-10304129995/1701304382", "-48777925059/3047939560", "15336726248/1032824649",
         "-45442868181/3398467696", "3065993473/597172653"],
        ["185892177/718116043", "0", "0", "-3185094517/667107341", "-477755414/1098053517",
         "-703635378/230739211", "5731566787/1027545527", "5232866602/850066563", "-4093664535/808688257",
         "3962137247/1805957418", "65686358/487910083"],
        ["403863854/491063109", "0", "0", "-5068492393/434740067", "-411421997/543043805",
         "652783627/914296604", "11173962825/925320556", "-13158990841/6184727034",
         "3936647629/1978049680", "-160528059/685178525", "248638103/1413531060", "0"],
    ],
    ["14005451/335480064", "0", "0", "0", "0", "-59238493/1068277825", "181606767/758867731",
     "561292985/797845732", "-1041891430/1371343529", "760417239/1151165299", "118820643/751138087",
     "-528747749/2220607170", "1/4"],
)


def _square(rows, conv):
    s = len(rows)
    a = [[conv("0") for _ in range(s)] for _ in range(s)]
    for i, row in enumerate(rows):
        for j, x in enumerate(row):
            a[i][j] = conv(x)
    return a


def polish(rows, weights, order, fixed_rows, iters=8):
    """Minimum-norm Gauss-Newton on the free nonzero entries of ``a`` and ``b``."""
    mp.mp.dps = 80
    conv = lambda x: mp.mpf(Fraction(x).numerator) / Fraction(x).denominator  # noqa: E731
    a = _square(rows, conv)
    b = [conv(x) for x in weights]
    slots = [("a", i, j) for i, row in enumerate(rows) if i >= fixed_rows
             for j, x in enumerate(row) if Fraction(x) != 0]
    slots += [("b", i, None) for i, x in enumerate(weights) if Fraction(x) != 0]

    def get(slot):
        kind, i, j = slot
        return a[i][j] if kind == "a" else b[i]

    def put(slot, v):
        kind, i, j = slot
        if kind == "a":
            a[i][j] = v
        else:
            b[i] = v

    def resid():
        return mp.matrix([r for _, r in residuals(a, b, order, one=mp.mpf(1))])

    eps = mp.mpf(10) ** -45
    for it in range(iters):
        r = resid()
        norm = max(abs(x) for x in r)
        print(f"iter {it}: max residual {mp.nstr(norm, 5)}")
        if norm < mp.mpf(10) ** -60:
            break
        jac = mp.matrix(len(r), len(slots))
        for k, slot in enumerate(slots):
            v0 = get(slot)
            put(slot, v0 + eps)
            rp = resid()
            put(slot, v0)
            for m in range(len(r)):
                jac[m, k] = (rp[m] - r[m]) / eps
        jf = np.array(jac.tolist(), dtype=float)
        _, rdiag, piv = scipy.linalg.qr(jf.T, pivoting=True)
        rank = int(np.sum(np.abs(np.diag(rdiag)) > 1e-9 * abs(rdiag[0, 0])))
        sel = sorted(int(p) for p in piv[:rank])
        jr = mp.matrix([[jac[m, k] for k in range(len(slots))] for m in sel])
        rr = mp.matrix([r[m] for m in sel])
        y = mp.lu_solve(jr * jr.T, rr)
        step = jr.T * y
        for k, slot in enumerate(slots):
            put(slot, get(slot) - step[k])
    return a, b


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        x = mp.mpf(x.numerator) / x.denominator
    if x == 0:
        return "0"
    return mp.nstr(x, DIGITS, strip_zeros=False, min_fixed=-5, max_fixed=5)


def write(name, title, order, a, b):
    s = len(b)
    lines = [f"# {title}", f"name {name}", f"order {order}", f"stages {s}", "c"]
    lines += [_fmt(mp.fsum(a[i][:i])) for i in range(s)]
    lines.append("a")
    for i in range(s):
        for j in range(i):
            if a[i][j] != 0:
                lines.append(f"{i} {j} {_fmt(a[i][j])}")
    lines.append("b")
    lines += [_fmt(x) for x in b]
    (OUT / f"{name}.txt").write_text("\n".join(lines) + "\n")


def main():
    mp.mp.dps = 80
    conv = lambda x: mp.mpf(Fraction(x).numerator) / Fraction(x).denominator  # noqa: E731
    for name, title, order, (rows, w) in [
        ("rk4", "Classical 4-stage Runge-Kutta", 4, RK4),
        ("verner6", "Verner 6(5) 8-stage pair, sixth-order weights", 6, VERNER6),
    ]:
        write(name, title, order, _square(rows, conv), [conv(x) for x in w])
    a, b = polish(DP8[0], DP8[1], 8, fixed_rows=6)
    write("dormand_prince8", "Dormand-Prince 8(7) 13-stage pair, eighth-order weights, polished", 8, a, b)


if __name__ == "__main__":
    main()
