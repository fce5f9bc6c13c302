"""Per-edge Lipschitz dual norm solved with HiGHS (scipy.optimize.linprog)."""
import numpy as np
from scipy.optimize import linprog


def weights(n, seed_a, seed_b):
    h = 1.0 / (n - 1)
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return np.sin(seed_a * i + 0.7 * j) * h * h, np.cos(0.4 * i - seed_b * j) * h * h


def scalar_norm(t):
    n = t.shape[0]
    h = 1.0 / (n - 1)
    idx = -np.ones((n, n), int)
    k = 0
    for a in range(1, n - 1):
        for b in range(1, n - 1):
            idx[a, b] = k
            k += 1
    rows, rhs = [], []
    for a in range(n):
        for b in range(n):
            for a2, b2 in [(a + 1, b), (a, b + 1)]:
                if a2 >= n or b2 >= n:
                    continue
                p, q = idx[a, b], idx[a2, b2]
                if p < 0 and q < 0:
                    continue
                for sgn in (1.0, -1.0):
                    row = np.zeros(k)
                    if p >= 0:
                        row[p] += sgn
                    if q >= 0:
                        row[q] -= sgn
                    rows.append(row)
                    rhs.append(h)
    c = -np.array([t[a, b] for a in range(1, n - 1) for b in range(1, n - 1)])
    res = linprog(c, A_ub=np.array(rows), b_ub=np.array(rhs), bounds=[(None, None)] * k, method="highs")
    assert res.status == 0
    return -res.fun


for n, sa, sb in [(6, 1.3, 0.9), (8, 1.3, 0.9), (8, 2.1, 0.3)]:
    t0, t1 = weights(n, sa, sb)
    print(f"n={n} a={sa} b={sb}: {scalar_norm(t0) + scalar_norm(t1)!r}")
