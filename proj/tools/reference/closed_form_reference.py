#!/usr/bin/env python3
"""Independent reference values for the C++ test suite.

Everything here is computed straight from the estimator definition and the
closed-form bias/variance expressions by direct enumeration, in plain Python,
with no dependency on the C++ library. The printed constants are frozen into
tests/; rerun this script if a fixture world changes.
"""

import math

INF = float("inf")


# ---------------------------------------------------------------------------
# Weight triplets (alpha, beta, gamma) as functions of the target probability
# pi and the estimated logging probability p0h, for one action.
# ---------------------------------------------------------------------------

def clipped_ratio(M, p0h, pi):
    """min{M*p0h/pi, 1} with the limiting conventions at pi==0 and p0h==0."""
    if pi <= 0.0:
        return 1.0
    if p0h <= 0.0:
        return 0.0
    r = M * (p0h / pi)
    return r if r < 1.0 else 1.0


def weights(scheme, pi, p0h):
    kind = scheme[0]
    if kind == "DM":
        return (1.0, 0.0, 0.0)
    if kind == "IPS":
        return (0.0, 1.0, 0.0)
    if kind == "cIPS":
        return (0.0, clipped_ratio(scheme[1], p0h, pi), 0.0)
    if kind == "DR":
        return (1.0, 1.0, -1.0)
    if kind == "SB":
        tau = scheme[1]
        return (1.0 - tau, tau, 0.0)
    if kind == "SWITCH":
        M = scheme[1]
        ratio = 0.0 if pi <= 0.0 else (INF if p0h <= 0.0 else pi / p0h)
        return (1.0 if ratio > M else 0.0, 1.0 if ratio <= M else 0.0, 0.0)
    if kind == "CAB":
        m = clipped_ratio(scheme[1], p0h, pi)
        return (1.0 - m, m, 0.0)
    if kind == "CABDR":
        m = clipped_ratio(scheme[1], p0h, pi)
        return (1.0, m, -m)
    raise ValueError(kind)


# ---------------------------------------------------------------------------
# Enumerable world + closed forms.
# ---------------------------------------------------------------------------

class World:
    def __init__(self, px, pi0, pi0_hat, pi, delta, sigma2, delta_hat):
        self.px = px
        self.pi0 = pi0
        self.pi0_hat = pi0_hat
        self.pi = pi
        self.delta = delta
        self.sigma2 = sigma2
        self.delta_hat = delta_hat
        self.C = len(px)
        self.K = len(pi0[0])

    def zeta(self, i, j):
        return 1.0 - self.pi0[i][j] / self.pi0_hat[i][j]


def true_value(w):
    return sum(w.px[i] * sum(w.pi[i][j] * w.delta[i][j] for j in range(w.K))
               for i in range(w.C))


def exact_bias(w, scheme):
    acc = 0.0
    for i in range(w.C):
        for j in range(w.K):
            p = w.pi[i][j]
            if p <= 0.0:
                continue
            a, b, g = weights(scheme, p, w.pi0_hat[i][j])
            z = w.zeta(i, j)
            d = w.delta[i][j]
            D = w.delta_hat[i][j] - d
            term = a * D - b * z * d + g * (D - z * (d + D)) + (a + b + g) * d - d
            acc += w.px[i] * p * term
    return acc


def exact_variance(w, scheme, n):
    # V_x of the conditional mean
    gx = []
    for i in range(w.C):
        s = 0.0
        for j in range(w.K):
            p = w.pi[i][j]
            if p <= 0.0:
                continue
            a, b, g = weights(scheme, p, w.pi0_hat[i][j])
            z = w.zeta(i, j)
            d = w.delta[i][j]
            D = w.delta_hat[i][j] - d
            s += p * (a * D - b * z * d + g * (D - z * (d + D)) + (a + b + g) * d)
        gx.append(s)
    m = sum(w.px[i] * gx[i] for i in range(w.C))
    term1 = sum(w.px[i] * gx[i] ** 2 for i in range(w.C)) - m * m

    # reward-noise term
    term2 = 0.0
    for i in range(w.C):
        s = 0.0
        for j in range(w.K):
            p = w.pi[i][j]
            if p <= 0.0:
                continue
            _, b, _ = weights(scheme, p, w.pi0_hat[i][j])
            c = p / w.pi0[i][j]
            z = w.zeta(i, j)
            s += p * b * b * c * (1.0 - z) ** 2 * w.sigma2[i][j]
        term2 += w.px[i] * s

    # action-sampling term; c(1-z) == pi/pi0_hat
    term3 = 0.0
    for i in range(w.C):
        ez = ez2 = 0.0
        for j in range(w.K):
            q = w.pi0[i][j]
            if q <= 0.0:
                continue
            p = w.pi[i][j]
            _, b, g = weights(scheme, p, w.pi0_hat[i][j])
            chat = p / w.pi0_hat[i][j]
            d = w.delta[i][j]
            D = w.delta_hat[i][j] - d
            Z = b * chat * d + g * chat * (d + D)
            ez += q * Z
            ez2 += q * Z * Z
        term3 += w.px[i] * (ez2 - ez * ez)

    return (term1 + term2 + term3) / n


def exact_bias_cab(w, M):
    acc = 0.0
    for i in range(w.C):
        for j in range(w.K):
            p = w.pi[i][j]
            if p <= 0.0:
                continue
            z = w.zeta(i, j)
            d = w.delta[i][j]
            D = w.delta_hat[i][j] - d
            chat = p / w.pi0_hat[i][j]
            if chat <= M:
                term = -d * z
            else:
                term = D * (1.0 - M / chat) - (M / chat) * d * z
            acc += w.px[i] * p * term
    return acc


def exact_variance_cab(w, M, n):
    gx = []
    for i in range(w.C):
        s = 0.0
        for j in range(w.K):
            p = w.pi[i][j]
            if p <= 0.0:
                continue
            z = w.zeta(i, j)
            d = w.delta[i][j]
            D = w.delta_hat[i][j] - d
            chat = p / w.pi0_hat[i][j]
            if chat <= M:
                s += p * (d - d * z)
            else:
                s += p * (d + D * (1.0 - M / chat) - (M / chat) * d * z)
        gx.append(s)
    m = sum(w.px[i] * gx[i] for i in range(w.C))
    term1 = sum(w.px[i] * gx[i] ** 2 for i in range(w.C)) - m * m

    term2 = 0.0
    for i in range(w.C):
        s = 0.0
        for j in range(w.K):
            p = w.pi[i][j]
            if p <= 0.0:
                continue
            c = p / w.pi0[i][j]
            z = w.zeta(i, j)
            chat = p / w.pi0_hat[i][j]
            if chat <= M:
                s += p * c * (1.0 - z) ** 2 * w.sigma2[i][j]
            else:
                s += p * (M * M / c) * w.sigma2[i][j]
        term2 += w.px[i] * s

    term3 = 0.0
    for i in range(w.C):
        ez = ez2 = 0.0
        for j in range(w.K):
            q = w.pi0[i][j]
            if q <= 0.0:
                continue
            p = w.pi[i][j]
            chat = p / w.pi0_hat[i][j]
            d = w.delta[i][j]
            Z = chat * d if chat <= M else M * d
            ez += q * Z
            ez2 += q * Z * Z
        term3 += w.px[i] * (ez2 - ez * ez)

    return (term1 + term2 + term3) / n


def exact_bias_cabdr(w, M):
    acc = 0.0
    for i in range(w.C):
        for j in range(w.K):
            p = w.pi[i][j]
            if p <= 0.0:
                continue
            z = w.zeta(i, j)
            d = w.delta[i][j]
            D = w.delta_hat[i][j] - d
            chat = p / w.pi0_hat[i][j]
            c = p / w.pi0[i][j]
            term = z * D if chat <= M else D * (1.0 - M / c)
            acc += w.px[i] * p * term
    return acc


def exact_variance_cabdr(w, M, n):
    gx = []
    for i in range(w.C):
        s = 0.0
        for j in range(w.K):
            p = w.pi[i][j]
            if p <= 0.0:
                continue
            z = w.zeta(i, j)
            d = w.delta[i][j]
            D = w.delta_hat[i][j] - d
            chat = p / w.pi0_hat[i][j]
            c = p / w.pi0[i][j]
            s += p * (d + (z * D if chat <= M else D * (1.0 - M / c)))
        gx.append(s)
    m = sum(w.px[i] * gx[i] for i in range(w.C))
    term1 = sum(w.px[i] * gx[i] ** 2 for i in range(w.C)) - m * m

    term2 = 0.0
    for i in range(w.C):
        s = 0.0
        for j in range(w.K):
            p = w.pi[i][j]
            if p <= 0.0:
                continue
            c = p / w.pi0[i][j]
            z = w.zeta(i, j)
            chat = p / w.pi0_hat[i][j]
            s += p * (c * (1.0 - z) ** 2 if chat <= M else M * M / c) * w.sigma2[i][j]
        term2 += w.px[i] * s

    term3 = 0.0
    for i in range(w.C):
        ez = ez2 = 0.0
        for j in range(w.K):
            q = w.pi0[i][j]
            if q <= 0.0:
                continue
            p = w.pi[i][j]
            chat = p / w.pi0_hat[i][j]
            d = w.delta[i][j]
            D = w.delta_hat[i][j] - d
            Z = -chat * D if chat <= M else -M * D
            ez += q * Z
            ez2 += q * Z * Z
        term3 += w.px[i] * (ez2 - ez * ez)

    return (term1 + term2 + term3) / n


# ---------------------------------------------------------------------------
# Direct estimator on a logged sample (the Definition-1 sum, enumerated).
# ---------------------------------------------------------------------------

def evaluate(scheme, records, target_rows, model_rows):
    """records: list of (xid, y, r, p0h, p0h_row). Rows indexed by xid."""
    n = len(records)
    acc = 0.0
    for (xid, y, r, p0h, row) in records:
        pis = target_rows[xid]
        vals = model_rows[xid]
        for ybar in range(len(pis)):
            a, _, _ = weights(scheme, pis[ybar], row[ybar])
            acc += pis[ybar] * a * vals[ybar]
        _, b, g = weights(scheme, pis[y], p0h)
        acc += pis[y] * b * r / p0h
        acc += pis[y] * g * vals[y] / p0h
    return acc / n


# ---------------------------------------------------------------------------
# Fixture worlds (mirror the C++ builders).
# ---------------------------------------------------------------------------

def small_world():
    px = [0.5, 0.5]
    pi0 = [[0.5, 0.5], [0.5, 0.5]]
    pi = [[0.9, 0.1], [0.9, 0.1]]
    delta = [[1.0, 0.0], [0.2, 0.7]]
    sigma2 = [[0.25, 0.25], [0.25, 0.25]]
    delta_hat = [[0.8, 0.1], [0.4, 0.5]]
    return World(px, pi0, [r[:] for r in pi0], pi, delta, sigma2, delta_hat)


def softmax(scores):
    mx = max(scores)
    e = [math.exp(s - mx) for s in scores]
    t = sum(e)
    return [v / t for v in e]


def medium_world():
    C, K = 10, 5
    px = [(i + 1) / 55.0 for i in range(C)]
    pi0 = [softmax([math.sin(0.7 * (i + 1) * (j + 1)) for j in range(K)])
           for i in range(C)]
    pi = [softmax([1.3 * math.cos(0.4 * (i + 2) * (j + 1))
                   + 0.5 * math.sin(0.9 * (j + 1)) for j in range(K)])
          for i in range(C)]
    pi0_hat = []
    for i in range(C):
        raw = [pi0[i][j] * math.exp(0.3 * math.sin(1.1 * (i + 1) + 0.8 * (j + 1)))
               for j in range(K)]
        t = sum(raw)
        pi0_hat.append([v / t for v in raw])
    delta = [[math.sin((i + 1) * (j + 2) * 0.35) for j in range(K)] for i in range(C)]
    sigma2 = [[0.05 + 0.2 * (0.5 + 0.5 * math.cos((i + 1) + (j + 1)))
               for j in range(K)] for i in range(C)]
    delta_hat = [[delta[i][j] + 0.25 * math.cos(0.6 * (i + 1) * (j + 1))
                  for j in range(K)] for i in range(C)]
    return World(px, pi0, pi0_hat, pi, delta, sigma2, delta_hat)


def heavy_tail_world():
    px = [0.4, 0.3, 0.2, 0.1]
    pi0 = [[0.01, 0.59, 0.20, 0.20],
           [0.02, 0.48, 0.25, 0.25],
           [0.30, 0.30, 0.20, 0.20],
           [0.25, 0.25, 0.25, 0.25]]
    pi = [[0.60, 0.20, 0.10, 0.10],
          [0.50, 0.30, 0.10, 0.10],
          [0.25, 0.25, 0.25, 0.25],
          [0.10, 0.20, 0.30, 0.40]]
    C, K = 4, 4
    delta = [[1.0 + 0.5 * math.sin(i + 2.0 * j) for j in range(K)] for i in range(C)]
    resid = [[0.12 + 0.06 * (0.5 + 0.5 * math.sin(i + j)) for j in range(K)]
             for i in range(C)]
    delta_hat = [[delta[i][j] + resid[i][j] for j in range(K)] for i in range(C)]
    sigma2 = [[0.5] * K for _ in range(C)]
    return World(px, pi0, [r[:] for r in pi0], pi, delta, sigma2, delta_hat)


def main():
    w1 = small_world()
    print("== small world ==")
    print("true_value %.17g" % true_value(w1))
    schemes = [("DM",), ("IPS",), ("cIPS", 1.0), ("DR",), ("SB", 0.3),
               ("SWITCH", 1.0), ("CAB", 1.0), ("CABDR", 1.0)]
    for s in schemes:
        b = exact_bias(w1, s)
        v = exact_variance(w1, s, 50)
        print("%-12s bias %.17g   var(n=50) %.17g" % (str(s), b, v))
    # cross checks: specialized forms agree with the generic ones
    for M in (0.5, 1.0, 1.7):
        assert abs(exact_bias_cab(w1, M) - exact_bias(w1, ("CAB", M))) < 1e-14
        assert abs(exact_variance_cab(w1, M, 50) - exact_variance(w1, ("CAB", M), 50)) < 1e-14
        assert abs(exact_bias_cabdr(w1, M) - exact_bias(w1, ("CABDR", M))) < 1e-14
        assert abs(exact_variance_cabdr(w1, M, 50) - exact_variance(w1, ("CABDR", M), 50)) < 1e-14

    print()
    print("== evaluate fixture (3 records on small world, pi0_hat rows) ==")
    target_rows = w1.pi
    model_rows = w1.delta_hat
    records = [(0, 0, 1.0, 0.5, [0.5, 0.5]),
               (0, 1, 0.5, 0.5, [0.5, 0.5]),
               (1, 0, -1.0, 0.5, [0.5, 0.5])]
    for s in schemes:
        print("%-12s evaluate %.17g" % (str(s), evaluate(s, records, target_rows, model_rows)))

    print()
    w2 = medium_world()
    print("== medium world ==")
    print("true_value %.17g" % true_value(w2))
    for s in [("DM",), ("IPS",), ("DR",), ("cIPS", 2.0), ("SB", 0.5),
              ("SWITCH", 2.0), ("CAB", 2.0), ("CABDR", 2.0)]:
        print("%-12s bias %.17g   var(n=50) %.17g" % (str(s), exact_bias(w2, s),
                                                      exact_variance(w2, s, 50)))
    chats = sorted(w2.pi[i][j] / w2.pi0_hat[i][j] for i in range(w2.C) for j in range(w2.K))
    print("chat range [%.4g, %.4g]" % (chats[0], chats[-1]))

    print()
    w3 = heavy_tail_world()
    print("== heavy-tail world (design check) ==")
    print("true_value %.17g" % true_value(w3))
    cs = [w3.pi[i][j] / w3.pi0[i][j] for i in range(w3.C) for j in range(w3.K)]
    print("max c = %.4g" % max(cs))
    n = 200
    grid = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0]
    print("M      mse_CAB        mse_cIPS       (bias_cab, var_cab)")
    mses = []
    for M in grid:
        bc = exact_bias(w3, ("CAB", M))
        vc = exact_variance(w3, ("CAB", M), n)
        bi = exact_bias(w3, ("cIPS", M))
        vi = exact_variance(w3, ("cIPS", M), n)
        mc = bc * bc + vc
        mi = bi * bi + vi
        mses.append((mc, mi))
        print("%6.1f %.6e  %.6e  (%.4f, %.5f)" % (M, mc, mi, bc, vc))
    best = min(range(len(grid)), key=lambda t: mses[t][0])
    print("argmin_M mse_CAB = %.1f (index %d of %d)" % (grid[best], best, len(grid) - 1))
    assert 0 < best < len(grid) - 1, "interior minimum violated"
    for t in range(len(grid)):
        assert mses[t][0] <= mses[t][1] + 1e-12, "CAB dominance violated at M=%g" % grid[t]
    print("interior minimum + pointwise dominance over cIPS: OK")


if __name__ == "__main__":
    main()
