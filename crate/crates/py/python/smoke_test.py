"""Smoke test for the nsmimo_py extension module.

Run after installing the module, e.g. `maturin develop` in crates/py.
"""

import math

import nsmimo_py as ns


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    cfg = ns.SystemConfig(100, 10, 0.5, 10.0)
    assert cfg.effective_dim() == 50
    assert close(cfg.omega_star(), 1.2, 1e-12)
    assert close(ns.omega_star(60, 10, 0.5), 4.0 / 3.0, 1e-12)

    try:
        ns.SystemConfig(60, 10, 0.33, 10.0)
    except ValueError as e:
        print("rejected non-integer cM:", e)
    else:
        raise AssertionError("expected ValueError")

    a, b = ns.mp_edges(0.2)
    assert close(a, (1 - math.sqrt(0.2)) ** 2, 1e-12) and close(b, (1 + math.sqrt(0.2)) ** 2, 1e-12)

    c1, c2, c3 = ns.ins_coefficients(100, 10, 0.5, 1.0)
    assert close(c1, 0.6448, 1e-4) and close(c2, 0.84, 1e-4) and close(c3, 0.0048, 1e-4)
    assert close(ns.ins_sum_rate(100, 10, 0.5, 1.0, 10.0), 37.55, 0.05)
    assert close(ns.zf_sum_rate(100, 10, 0.5, 10.0), 10 * math.log2(81), 1e-9)
    assert close(ns.r_star(0.5, 10.0), 0.9071 * 0.5, 1e-3 * 0.5)
    assert ns.complexity("ICNS", 10) == (400, 0, False)
    assert ns.case1_gaps(0.3)["int_gap_user1"] > 0

    g = ns.draw_gram(cfg, 7)
    d, d_inv = ns.build_precondition("ICNS", g, cfg.omega_star())
    k = len(g)
    for i in range(k):
        for j in range(k):
            s = sum(d[i][n] * d_inv[n][j] for n in range(k))
            assert abs(s - (1.0 if i == j else 0.0)) < 1e-10
    print("spectral check ICNS:", round(ns.spectral_check(d_inv, g), 4))

    theo = ns.icns_sum_rate(100, 10, 0.5, 1.2, 10.0)
    simu = ns.sum_rate_simu_approx(cfg, "ICNS", trials=2000, seed=3)
    assert abs(theo - simu["mean"]) / simu["mean"] < 0.05
    zf = ns.ergodic_sum_rate(cfg, "ZF", trials=500)
    again = ns.ergodic_sum_rate(cfg, "ZF", trials=500, threads=1)
    assert zf == again
    print(f"ICNS theo {theo:.3f} simu-approx {simu['mean']:.3f}, ZF ergodic {zf['mean']:.3f}")

    exact = [r for r in ns.gram_moments(4, trials=20000) if r[4]]
    assert all(r[3] < 0.05 for r in exact), exact
    print("smoke test passed")


if __name__ == "__main__":
    main()
