"""Smoke test for the cellwait Python extension.

Build and install first, e.g. ``pip install --no-build-isolation ./crates/py``.
"""

import math

import cellwait as cw


def main():
    cfg = cw.NetworkConfig.reference().noiseless()
    scen = cw.AccessScenario(10.0, 10.0)

    probs = cw.access_probabilities(cfg, scen)
    assert abs(sum(probs.values()) - 1.0) < 1e-15, probs

    g = cw.db_to_linear(0.0)
    closed = cw.coverage(cfg, scen, g, method="closed")
    quad = cw.coverage(cfg, scen, g, method="quadrature")
    assert abs(closed - quad) <= 1e-6 * closed, (closed, quad)
    assert closed >= cw.baseline_coverage(cfg, g) - 1e-12

    cov = cw.optimal_threshold_coverage(cfg, 10.0, g)
    assert cov.method == "taylor_quadratic" and cov.grid_optimum is not None
    rate = cw.optimal_threshold_rate(cfg, 10.0)
    assert rate.iterations > 0 and rate.r_star > 0.0
    assert math.isclose(cw.capacity(cfg, scen), cw.capacity(cfg, cw.AccessScenario(10.0, 10.0)))
    assert cw.normalized_energy_efficiency(cfg, scen) >= 1.0

    mean, ci = cw.simulate_coverage(cfg, scen, g, n_trials=20_000, seed=7)
    assert abs(mean - closed) < 3.0 * ci, (mean, ci, closed)

    try:
        cw.NetworkConfig(0.005, 0.5, 0.5, 0.5, 0.1, 0.1)
    except ValueError:
        pass
    else:
        raise AssertionError("bad fractions accepted")

    print(f"coverage at 0 dB: closed {closed:.6f}, MC {mean:.4f} +/- {ci:.4f}")
    print(f"coverage-optimal r_th {cov.r_star:.3f} m, rate-optimal r_th {rate.r_star:.3f} m")
    print("smoke test ok")


if __name__ == "__main__":
    main()
