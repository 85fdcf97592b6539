"""Prototype v2: batched Pr(P1 > P2), panel quadrature in power-stretched coordinates."""
import numpy as np
from scipy import special, integrate

GL_NODES, GL_WEIGHTS = np.polynomial.legendre.leggauss(6)


def _upper_bound(a, b, z=8.0, c=24.0):
    m = a / (a + b)
    return 1.0 - (1.0 - m) * np.exp(-(z / np.sqrt(b) + c / b))


def _panel_nodes(t0, t1, tau):
    """GL nodes/weights for ∫ p^(a-1) g(p) dp over [t0,t1] via w = p^tau, tau=min(a,1).

    Returns p nodes (..., n) and weights absorbing dp/dw; caller multiplies by
    p^(a-tau) * g(p).
    """
    w0 = t0 ** tau
    w1 = t1 ** tau
    half = 0.5 * (w1 - w0)
    mid = 0.5 * (w1 + w0)
    w = mid[..., None] + half[..., None] * GL_NODES
    inv_tau = 1.0 / tau[..., None]
    p = w ** inv_tau
    wt = half[..., None] * GL_WEIGHTS * inv_tau
    return p, wt


def _pdf_factor(p, a, b, tau, lognorm):
    # p^(a-tau) * (1-p)^(b-1) / B(a,b); exponent a-tau >= 0 so p=0 is safe
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.exp((a - tau) * np.log(np.maximum(p, 1e-320)) + (b - 1.0) * np.log1p(-p) - lognorm)
    return np.where(p >= 1.0, 0.0, out)


def gt_prob_batch(a1, b1, a2, b2, n_geom=4):
    a1, b1, a2, b2 = np.broadcast_arrays(*map(np.atleast_1d, (a1, b1, a2, b2)))
    a1 = a1.astype(float); b1 = b1.astype(float)
    a2 = a2.astype(float); b2 = b2.astype(float)

    m1 = a1 / (a1 + b1); s1 = np.sqrt(m1 * (1 - m1) / (a1 + b1 + 1))
    m2 = a2 / (a2 + b2); s2 = np.sqrt(m2 * (1 - m2) / (a2 + b2 + 1))
    U = np.clip(_upper_bound(a2, b2), 1e-300, 1 - 1e-13)

    gtop = np.clip(np.minimum(m1, m2), 1e-300, U)
    gbot = gtop * 1e-8
    ratio = (gtop / gbot) ** (1.0 / n_geom)
    geom = gbot[..., None] * ratio[..., None] ** np.arange(n_geom)[None, :]
    anchors = np.stack([
        np.clip(m2 - 3 * s2, 0, U), np.clip(m2 - s2, 0, U), np.clip(m2, 0, U),
        np.clip(m2 + s2, 0, U), np.clip(m2 + 3 * s2, 0, U),
        np.clip(m1 - 3 * s1, 0, U), np.clip(m1 - s1, 0, U), np.clip(m1, 0, U),
        np.clip(m1 + s1, 0, U), np.clip(m1 + 3 * s1, 0, U),
    ], axis=-1)
    zero = np.zeros_like(U[..., None])
    bp = np.concatenate([zero, geom, anchors, U[..., None]], axis=-1)
    bp = np.sort(bp, axis=-1)

    t0 = bp[..., :-1]
    t1 = bp[..., 1:]
    tau1 = np.minimum(a1, 1.0)
    tau2 = np.minimum(a2, 1.0)
    lb1 = special.betaln(a1, b1)
    lb2 = special.betaln(a2, b2)

    # exact panel masses via regularized incomplete beta at breakpoints
    F1 = special.betainc(a1[..., None], b1[..., None], bp)
    F2 = special.betainc(a2[..., None], b2[..., None], bp)
    S1 = np.diff(F1, axis=-1)
    S2 = np.diff(F2, axis=-1)
    C2 = F2[..., :-1]
    cross = np.sum(S1 * C2, axis=-1)

    # within-panel overlap term by stretched Gauss-Legendre
    p1n, w1n = _panel_nodes(t0, t1, tau1[..., None])
    f1 = _pdf_factor(p1n, a1[..., None, None], b1[..., None, None], tau1[..., None, None], lb1[..., None, None])
    ip, iw = _panel_nodes(np.broadcast_to(t0[..., None], p1n.shape), p1n, tau2[..., None, None])
    fi = _pdf_factor(ip, a2[..., None, None, None], b2[..., None, None, None],
                     tau2[..., None, None, None], lb2[..., None, None, None])
    inner = np.sum(iw * fi, axis=-1)
    within = np.sum(np.sum(w1n * f1 * inner, axis=-1), axis=-1)

    tail = special.betainc(b1, a1, 1.0 - U)
    return cross + within + tail


def gt_prob_quad(a1, b1, a2, b2):
    lb1 = special.betaln(a1, b1)

    def f(p):
        if p <= 0.0 or p >= 1.0:
            return 0.0
        return np.exp((a1 - 1) * np.log(p) + (b1 - 1) * np.log1p(-p) - lb1) \
            * special.betainc(a2, b2, p)

    m1 = a1 / (a1 + b1); s1 = np.sqrt(m1 * (1 - m1) / (a1 + b1 + 1))
    m2 = a2 / (a2 + b2); s2 = np.sqrt(m2 * (1 - m2) / (a2 + b2 + 1))
    pts = sorted({float(np.clip(v, 1e-12, 1 - 1e-12))
                  for v in (m1 - 6 * s1, m1 - 2 * s1, m1, m1 + 2 * s1, m1 + 6 * s1,
                            m2 - 6 * s2, m2 - 2 * s2, m2, m2 + 2 * s2, m2 + 6 * s2)})
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        val, err = integrate.quad(f, 0, 1, points=pts, epsabs=1e-10, epsrel=1e-11, limit=400)
    return val


if __name__ == "__main__":
    import time
    rng = np.random.default_rng(42)

    def sweep(name, a1, b1, a2, b2):
        batch = gt_prob_batch(a1, b1, a2, b2)
        errs = np.array([abs(batch[i] - gt_prob_quad(a1[i], b1[i], a2[i], b2[i]))
                         for i in range(len(a1))])
        i = int(np.argmax(errs))
        print(f"{name}: worst abs err {errs.max():.2e} "
              f"(a1={a1[i]:.3g} b1={b1[i]:.3g} a2={a2[i]:.3g} b2={b2[i]:.3g}); "
              f"median {np.median(errs):.1e}")

    n = 400
    sweep("ICS regime",
          rng.uniform(0.5, 200, n), np.exp(rng.uniform(np.log(500), np.log(2e5), n)),
          rng.uniform(0.5, 200, n), np.exp(rng.uniform(np.log(500), np.log(2e5), n)))
    sweep("moderate generic",
          np.exp(rng.uniform(np.log(1.0), np.log(1e3), n)), np.exp(rng.uniform(np.log(1.0), np.log(1e5), n)),
          np.exp(rng.uniform(np.log(1.0), np.log(1e3), n)), np.exp(rng.uniform(np.log(1.0), np.log(1e5), n)))
    sweep("small shapes",
          np.exp(rng.uniform(np.log(5e-2), np.log(2.0), n)), np.exp(rng.uniform(np.log(1.0), np.log(1e4), n)),
          np.exp(rng.uniform(np.log(5e-2), np.log(2.0), n)), np.exp(rng.uniform(np.log(1.0), np.log(1e4), n)))

    # Monte Carlo sanity on a handful
    g = np.random.default_rng(7)
    for (A1, B1, A2, B2) in [(5, 2, 2, 5), (45, 45000, 12, 45000), (0.5, 3, 2, 9), (8, 4e4, 40, 4e4)]:
        mc = (g.beta(A1, B1, 4_000_000) > g.beta(A2, B2, 4_000_000)).mean()
        print(f"({A1},{B1},{A2},{B2}): batch={gt_prob_batch(A1, B1, A2, B2)[0]:.6f} "
              f"quad={gt_prob_quad(A1, B1, A2, B2):.6f} mc={mc:.6f}")

    I = 200
    a1 = rng.uniform(5, 60, I); b1 = np.full(I, 45000.0)
    a2 = rng.uniform(5, 20, I); b2 = np.full(I, 45000.0)
    t = time.perf_counter()
    for _ in range(100):
        gt_prob_batch(a1, b1, a2, b2)
    print("batch I=200:", (time.perf_counter() - t) / 100 * 1e3, "ms/eval")
