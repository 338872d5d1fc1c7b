"""Independent reference values frozen into the unit tests.

Run with numpy and scipy; prints C++ initialisers. Nothing here imports the
library: filters come from closed forms and transforms are dense matrices.
"""
import math

import numpy as np
from scipy.optimize import brentq
from scipy.special import kolmogorov
from scipy.stats import ks_2samp

np.set_printoptions(precision=17)


def fmt(v):
    return ", ".join(repr(float(x)) for x in v)


def db2():
    s3 = math.sqrt(3.0)
    d = 4.0 * math.sqrt(2.0)
    return np.array([(1 + s3) / d, (3 + s3) / d, (3 - s3) / d, (1 - s3) / d])


def haar():
    return np.array([1.0, 1.0]) / math.sqrt(2.0)


def step_matrix(n, h):
    L = len(h)
    g = np.array([(-1) ** k * h[L - 1 - k] for k in range(L)])
    lo = np.zeros((n // 2, n))
    hi = np.zeros((n // 2, n))
    for k in range(n // 2):
        for m in range(L):
            lo[k, (2 * k + m) % n] += h[m]
            hi[k, (2 * k + m) % n] += g[m]
    return lo, hi


def pyramid(x, h, j0):
    """Coefficients ordered (coarse at j0, details j0 .. J-1)."""
    c = np.asarray(x, float)
    details = []
    while len(c) > 2 ** j0:
        lo, hi = step_matrix(len(c), h)
        details.append(hi @ c)
        c = lo @ c
    return np.concatenate([c] + details[::-1]), details[::-1]


x8 = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0]
flat, _ = pyramid(x8, db2(), 1)
print("db2 j0=1 x8:", fmt(flat))
flat, _ = pyramid(x8, haar(), 2)
print("haar j0=2 x8:", fmt(flat))

# Mono spectrum: log2 mean d^2 per level, Haar, j0 = 1.
x64 = [math.sin(0.3 * i) + 0.01 * i ** 1.5 for i in range(64)]
_, det = pyramid(x64, haar(), 1)
print("haar x64 log2 energy:", fmt([math.log2(np.mean(d ** 2)) for d in det]))

# Deterministic cascade (m0 always on the left), depth 10, Haar, window [3, 8].
m0 = 0.6
mass = np.array([1.0])
for _ in range(10):
    mass = np.column_stack([mass * m0, mass * (1 - m0)]).ravel()
_, det = pyramid(mass, haar(), 1)
levels = list(range(1, 10))


def suprema(det, j):
    out = []
    for k in range(2 ** j):
        best = 0.0
        for jp in range(j, 10):
            span = 2 ** (jp - j)
            seg = det[jp - 1][k * span:(k + 1) * span]
            best = max(best, 2.0 ** (-jp / 2) * np.max(np.abs(seg)))
        out.append(2.0 ** (j / 2) * best)
    return np.array(out)


def tau(q, jmin=3, jmax=8):
    js = np.arange(jmin, jmax + 1)
    ys = []
    for j in js:
        v = suprema(det, j) if q < 0 else np.abs(det[j - 1])
        ys.append(math.log2(np.mean(v ** q)))
    return np.polyfit(js, ys, 1)[0]


print("cascade tau q=2:", repr(float(tau(2.0))), "q=-2:", repr(float(tau(-2.0))), "q=0.5:", repr(float(tau(0.5))))


# Closed-form cascade spectrum and dense-grid broadness at a = -0.2.
def alpha_exact(q, m0):
    m1 = 1 - m0
    a, b = m0 ** q, m1 ** q
    return -(a * math.log(m0) + b * math.log(m1)) / ((a + b) * math.log(2))


def f_exact(q, m0):
    m1 = 1 - m0
    t = math.log2(m0 ** q + m1 ** q) - 1 + 0.5 * q
    dt = 0.5 - alpha_exact(q, m0)
    return t - q * dt


for m0 in (0.55, 0.6, 0.7):
    ql = brentq(lambda q: f_exact(q, m0) + 0.2, 1e-9, 60)
    qr = brentq(lambda q: f_exact(q, m0) + 0.2, -60, -1e-9)
    print("cascade m0", m0, "B(-0.2) exact:", repr(alpha_exact(qr, m0) - alpha_exact(ql, m0)),
          "support", repr(-math.log2(m0)), repr(-math.log2(1 - m0)))

for lam in (0.3, 0.5, 0.8, 1.0, 1.17, 1.19, 1.5, 2.0):
    print("kolmogorov", lam, repr(float(kolmogorov(lam))))

a = [0.1, 0.4, 0.35, 0.8, 1.2, 0.05, 0.9, 0.66]
b = [0.5, 1.1, 1.3, 0.95, 1.7, 1.25, 0.7]
r = ks_2samp(a, b, method="asymp")
ne = math.sqrt(len(a) * len(b) / (len(a) + len(b)))
print("ks D", repr(float(r.statistic)), "p", repr(float(kolmogorov((ne + 0.12 + 0.11 / ne) * r.statistic))))
x = np.array(a)
q = np.percentile(x, [25, 75])
h = 0.9 * min(x.std(ddof=1), (q[1] - q[0]) / 1.34) * len(x) ** -0.2
print("silverman", repr(float(h)))
print("kde at 0.5", repr(float(np.mean(np.exp(-0.5 * ((0.5 - x) / h) ** 2)) / (h * math.sqrt(2 * math.pi)))))
