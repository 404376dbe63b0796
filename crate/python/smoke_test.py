"""Smoke test for the pygravdec extension module.

Build and install first:
    maturin build --release -m crates/python/Cargo.toml
    pip install target/wheels/pygravdec-*.whl
"""

import math

import pygravdec as g


def main():
    assert abs(g.cutoff_f(0.0) - 1.0 / 6.0) < 1e-15
    assert g.cutoff_f(-3.0) == g.cutoff_f(3.0)
    assert g.contract_k((1.0, 0.0, 0.0), (0.0, 1.0, 0.0)) == 3.0
    assert g.projector_component(1, 2, 1, 2) == 3.0

    p = g.DecoherenceParams(
        m0=1.0, lambda_g=1.0, xi=(1.0, 0.0, 0.0), v=(0.0, 1.0, 0.0), t_f=10.0,
        lambda_=1.0, gamma=1e-4 * 108.0 / math.pi,
    )
    assert abs(p.kappa - 1e-4) < 1e-15
    closed = p.gamma_closed()
    quad = p.gamma_quadrature()
    assert abs(closed["total"] - quad["total"]) < 1e-6 * closed["total"]

    x_star = g.crossover(1e-4)
    assert 22.0 < x_star < 23.5

    light = g.DecoherenceParams(
        m0=0.46, lambda_g=1.0, xi=(1.0, 0.0, 0.0), v=(0.0, 1.0, 0.0), t_f=10.0, lambda_=0.0,
    )
    mc = light.mc_decoherence_factor(n=48, n_real=4000, seed=1)
    target = math.exp(-mc["gamma_discretized"])
    assert abs(mc["estimate"] - target) < 4.0 * mc["std_error"], mc

    samples = g.sample_noise(1.0, 1.0, 0.0, 5.0, 8, 3, 42)
    assert samples == g.sample_noise(1.0, 1.0, 0.0, 5.0, 8, 3, 42)
    for m in samples[0]:
        assert abs(m[0][0] + m[1][1] + m[2][2]) < 1e-10
        assert m[0][1] == m[1][0]

    csv, ok = g.run_config("mode = figure\nkappa_list = 0,1e-4\nx_count = 10\n")
    assert ok and csv.splitlines()[0] == "x,G,cross_kappa_0e0,total_kappa_0e0,cross_kappa_1e-4,total_kappa_1e-4"

    try:
        g.DecoherenceParams(m0=-1.0, lambda_g=1.0, xi=(1, 0, 0), v=(0, 1, 0), t_f=1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative mass accepted")

    print("python smoke test passed; x* =", x_star, "rng:", g.RNG_NAME)


if __name__ == "__main__":
    main()
