#!/usr/bin/env python3
"""Generate the Fourier table of the first degree-2 weight-10 cusp form.

The form is the Maass lift of the weight-10 index-1 Jacobi cusp form
phi_10,1 = Delta * phi_{-2,1}.  Everything is exact integer arithmetic:

  phi_{-2,1} = theta_11(tau,z)^2 / eta(tau)^6,

whose coefficients depend only on D = 4n - r^2 and are assembled from
u = prod (1-q^n)^{-6} by the two convolution identities (r = 1, 0):

  c(D = 4N - 1) =  sum_{t in Z} u[N - t^2]
  c(D = 4N)     = -2 sum_{a odd >= 1} u[N - (a^2-1)/4]

Jacobi coefficients of the lift input: c10(D) = sum_m tau(m) c(D - 4m).
Maass lift:  a(T) = sum_{d | content(T)} d^9 c10(det(2T)/d^2)
for 2T = [[2a, b], [b, 2c]], det(2T) = 4ac - b^2, content = gcd(a, b, c).

Writes the JSON schema used by the library loader:
  {degree, weight, level, ring_minpoly, b_supp, entries: [{t2, a}]}
"""

import argparse
import json
import math
import sys


def pentagonal_series(n_max):
    """prod_{n>=1} (1 - q^n) as a dense coefficient list, Euler's theorem."""
    e = [0] * (n_max + 1)
    e[0] = 1
    k = 1
    while True:
        g1 = k * (3 * k - 1) // 2
        g2 = k * (3 * k + 1) // 2
        if g1 > n_max and g2 > n_max:
            break
        s = 1 if k % 2 == 0 else -1
        if g1 <= n_max:
            e[g1] += s
        if g2 <= n_max:
            e[g2] += s
        k += 1
    return e


def sparse(series):
    return [(i, c) for i, c in enumerate(series) if c]


def mul_sparse(dense, sp, n_max):
    out = [0] * (n_max + 1)
    for i, c in sp:
        if c == 1:
            for j in range(0, n_max + 1 - i):
                out[i + j] += dense[j]
        elif c == -1:
            for j in range(0, n_max + 1 - i):
                out[i + j] -= dense[j]
        else:
            for j in range(0, n_max + 1 - i):
                out[i + j] += c * dense[j]
    return out


def div_sparse(dense, sp, n_max):
    """q = dense / sp, valid when sp[0] = (0, 1)."""
    assert sp[0] == (0, 1)
    out = [0] * (n_max + 1)
    for m in range(n_max + 1):
        acc = dense[m]
        for g, c in sp[1:]:
            if g > m:
                break
            acc -= c * out[m - g]
        out[m] = acc
    return out


def tau_list(m_max):
    """Ramanujan tau(1..m_max) from q * prod (1-q^n)^24."""
    e = sparse(pentagonal_series(m_max))
    t = [0] * (m_max + 1)
    t[0] = 1
    for _ in range(24):
        t = mul_sparse(t, e, m_max)
    return [0] + t[: m_max]  # tau[m] = t[m-1]


def u_list(n_max):
    """prod (1-q^n)^{-6}."""
    e = sparse(pentagonal_series(n_max))
    u = [0] * (n_max + 1)
    u[0] = 1
    for _ in range(6):
        u = div_sparse(u, e, n_max)
    return u


def c_weak(d_max):
    """coefficients c(D) of theta_11^2/eta^6 for -1 <= D <= d_max (0 off-class)."""
    n_max = d_max // 4 + 1
    u = u_list(n_max)
    c = {-1: 0, 0: 0}
    for d in range(-1, d_max + 1):
        if d % 4 == 3 or d == -1:
            n = (d + 1) // 4
            acc = u[n]
            t = 1
            while t * t <= n:
                acc += 2 * u[n - t * t]
                t += 1
            c[d] = acc
        elif d % 4 == 0:
            n = d // 4
            acc = 0
            a = 1
            while (a * a - 1) // 4 <= n:
                acc += u[n - (a * a - 1) // 4]
                a += 2
            c[d] = -2 * acc
        else:
            c[d] = 0
    return c


def c10_table(d_max):
    """c10(D) = sum_m tau(m) c(D - 4m), the Jacobi coefficients of the lift."""
    cw = c_weak(d_max)
    tau = tau_list(d_max // 4 + 1)
    c10 = {}
    for d in range(0, d_max + 1):
        if d % 4 not in (0, 3):
            c10[d] = 0
            continue
        acc = 0
        for m in range(1, (d + 1) // 4 + 1):
            acc += tau[m] * cw[d - 4 * m]
        c10[d] = acc
    return c10


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--b-supp", type=int, required=True, help="support box bound")
    ap.add_argument("--out", required=True)
    args = ap.parse_args()
    b = args.b_supp

    d_max = 4 * b * b
    c10 = c10_table(d_max)

    # self-checks: classical low coefficients of the two series
    cw = c_weak(8)
    assert cw[-1] == 1 and cw[0] == -2 and cw[3] == 8 and cw[4] == -12, cw
    assert tau_list(6)[1:4] == [1, -24, 252]
    assert c10[3] == 1 and c10[4] == -2 and c10[7] == -16 and c10[8] == 36, c10

    entries = []
    for a in range(1, b + 1):
        for c in range(1, b + 1):
            bmax = math.isqrt(4 * a * c - 1)
            for bb in range(-bmax, bmax + 1):
                det2 = 4 * a * c - bb * bb
                g = math.gcd(math.gcd(a, c), abs(bb))
                val = 0
                for d in range(1, g + 1):
                    if g % d:
                        continue
                    if det2 % (d * d):
                        continue
                    val += d**9 * c10[det2 // (d * d)]
                if val:
                    entries.append(([2 * a, bb, 2 * c], val))
    entries.sort(key=lambda e: e[0])

    doc = {
        "degree": 2,
        "weight": 10,
        "level": 1,
        "ring_minpoly": ["0", "1"],
        "b_supp": b,
        "entries": [{"t2": t2, "a": [str(v)]} for t2, v in entries],
    }
    with open(args.out, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    print(f"wrote {args.out}: {len(entries)} nonzero keys, box bound {b}", file=sys.stderr)


if __name__ == "__main__":
    main()
