"""Dev oracle: sample planar line configurations and read off the Gauss-local
data (order bits + signs) for the triangle and band moves; compare against the
intrinsic admissibility predicates in weldmoves.moves."""
import math
import random
import sys


def sgn(x):
    return 1 if x > 0 else -1


def det(a, b):
    return a[0] * b[1] - a[1] * b[0]


def unit(theta):
    return (math.cos(theta), math.sin(theta))


def solve2(a, b, rhs):
    # x*a + y*b = rhs
    D = det(a, b)
    x = det(rhs, b) / D
    y = det(a, rhs) / D
    return x, y


def sample_r3(rng):
    while True:
        th = [rng.uniform(0, 2 * math.pi) for _ in range(3)]
        dT, dM, dB = (unit(t) for t in th)
        if min(abs(det(dT, dM)), abs(det(dT, dB)), abs(det(dM, dB))) > 0.05:
            break
    c = (rng.uniform(-1, 1), rng.uniform(-1, 1))
    if math.hypot(*c) < 0.05:
        return None
    # L_T: t*dT ; L_B: b*dB ; L_M: c + m*dM
    # P_TM: t*dT = c + m*dM  -> t*dT - m*dM = c
    t, m = solve2(dT, (-dM[0], -dM[1]), c)
    # P_MB: c + m2*dM = b*dB -> b*dB - m2*dM = c
    b, m2 = solve2(dB, (-dM[0], -dM[1]), c)
    if min(abs(t), abs(b), abs(m2 - m)) < 1e-9:
        return None
    o_T, o_B, o_M = sgn(t), sgn(b), sgn(m2 - m)
    s_u = sgn(det(dT, dM))   # T over M
    s_v = sgn(det(dT, dB))   # T over B
    s_w = sgn(det(dM, dB))   # M over B
    return (o_T, o_M, o_B, s_u, s_v, s_w)


def r3_pred(o_T, o_M, o_B, s_u, s_v, s_w):
    return o_T * o_B == -s_u * s_w and o_T * o_M == -s_v * s_w


def sample_delta(rng):
    while True:
        th = [rng.uniform(0, 2 * math.pi) for _ in range(3)]
        dA, dB, dC = (unit(t) for t in th)
        if min(abs(det(dA, dB)), abs(det(dB, dC)), abs(det(dC, dA))) > 0.05:
            break
    c = (rng.uniform(-1, 1), rng.uniform(-1, 1))
    if math.hypot(*c) < 0.05:
        return None
    # L_A: a*dA ; L_B: b*dB (X_AB = origin); L_C: c + s*dC
    # X_BC: b1*dB = c + s1*dC
    b1, s1 = solve2(dB, (-dC[0], -dC[1]), c)
    # X_CA: a1*dA = c + s2*dC
    a1, s2 = solve2(dA, (-dC[0], -dC[1]), c)
    if min(abs(a1), abs(b1), abs(s2 - s1)) < 1e-9:
        return None
    o_A = sgn(a1)            # X_CA after X_AB along A
    o_B = -sgn(b1)           # X_AB (param 0) after X_BC (param b1)
    o_C = sgn(s2 - s1)       # X_CA after X_BC along C
    s_u = sgn(det(dA, dB))   # A over B
    s_v = sgn(det(dB, dC))   # B over C
    s_w = sgn(det(dC, dA))   # C over A
    return (o_A, o_B, o_C, s_u, s_v, s_w)


def delta_pred(o_A, o_B, o_C, s_u, s_v, s_w):
    return o_A * o_B == s_v * s_w and o_A * o_C == -s_u * s_v


def sample_bp(rng):
    while True:
        t1 = rng.uniform(0, 2 * math.pi)
        t3 = rng.uniform(0, 2 * math.pi)
        e, f = unit(t1), unit(t3)
        if abs(det(e, f)) > 0.05:
            break
    etaA = rng.choice([1, -1])
    etaB = rng.choice([1, -1])
    d1, d2, d3, d4 = e, (etaA * e[0], etaA * e[1]), f, (etaB * f[0], etaB * f[1])
    p1 = (0.0, 0.0)
    p2 = (rng.uniform(-1, 1), rng.uniform(-1, 1))
    q3 = (rng.uniform(-1, 1), rng.uniform(-1, 1))
    q4 = (rng.uniform(-1, 1), rng.uniform(-1, 1))

    def cross_param(p, dp, q, dq):
        # p + t*dp = q + s*dq -> t*dp - s*dq = q - p
        rhs = (q[0] - p[0], q[1] - p[1])
        t, s = solve2(dp, (-dq[0], -dq[1]), rhs)
        return t, s

    t13, s13 = cross_param(p1, d1, q3, d3)
    t14, s14 = cross_param(p1, d1, q4, d4)
    t23, s23 = cross_param(p2, d2, q3, d3)
    t24, s24 = cross_param(p2, d2, q4, d4)
    vals = [t13 - t14, t23 - t24, s13 - s23, s14 - s24]
    if min(abs(v) for v in vals) < 1e-9:
        return None
    w_p = sgn(t14 - t13)     # +1 iff meets 3 first along 1
    w_q = sgn(t24 - t23)
    w_r = sgn(s23 - s13)     # +1 iff meets 1 first along 3
    w_s = sgn(s24 - s14)
    sg13 = sgn(det(d1, d3))
    sg14 = sgn(det(d1, d4))
    sg23 = sgn(det(d2, d3))
    sg24 = sgn(det(d2, d4))
    return (w_p, w_q, w_r, w_s, sg13, sg14, sg23, sg24)


def bp_pred(w_p, w_q, w_r, w_s, sg13, sg14, sg23, sg24):
    return (sg13 * sg23 == w_p * w_q and sg13 * sg14 == w_r * w_s
            and sg13 * sg14 * sg23 * sg24 == 1)


def run(name, sampler, pred, nvars, trials=200000, seed=7):
    rng = random.Random(seed)
    realized = set()
    for _ in range(trials):
        got = sampler(rng)
        if got is not None:
            realized.add(got)
    allowed = {c for c in realized if pred(*c)}
    viol = realized - allowed
    import itertools
    universe = set(itertools.product([1, -1], repeat=nvars))
    accepted = {c for c in universe if pred(*c)}
    print("%s: realized=%d accepted-by-pred=%d violations=%d missing=%d"
          % (name, len(realized), len(accepted), len(viol),
             len(accepted - realized)))
    if viol:
        print("  REALIZED BUT REJECTED:", sorted(viol)[:8])
    if accepted - realized:
        print("  ACCEPTED BUT NEVER REALIZED:", sorted(accepted - realized)[:8])
    return not viol and not (accepted - realized)


ok = True
ok &= run("R3", sample_r3, r3_pred, 6)
ok &= run("DELTA", sample_delta, delta_pred, 6)
ok &= run("BP", sample_bp, bp_pred, 8)
print("ALL OK" if ok else "MISMATCH")
sys.exit(0 if ok else 1)
