"""
Acceptance criteria, one test each. Every test prints a single PASS/FAIL line
and the lines are repeated in the pytest terminal summary.
"""

import math

import numpy as np

from tvfixpoint import analysis as an
from tvfixpoint import functions as fn
from tvfixpoint import operators as ops
from tvfixpoint import oracle, problems, running, sets
from tvfixpoint.config import parse_config
from tvfixpoint.experiment import execute
from tvfixpoint.problems import ProblemInstance, ProblemStream


def scenario(name, **kw):
    return problems.make_scenario({"scenario": name, **kw})


def verified(stream, algorithm, lam=None, B=None, form=None):
    rec = running.run_algorithm(stream, algorithm, lam, B=B, form=form)
    traj = oracle.solution_trajectory(stream, running.oracle_family(algorithm, stream), lam=rec.params["lambda"])
    return rec, traj, an.measure_and_verify(rec, traj, stream)


def test_c01_time_invariant_contraction_rate(criterion):
    s = scenario("static_quadratic", n=10, m=1.0, M=2.0, T=200)
    rec, traj, _ = verified(s, "projected_gradient", 0.1)
    L = max(abs(1 - 0.1 * 1.0), abs(1 - 0.1 * 2.0))
    err = np.linalg.norm(rec.states - traj[0].x_star, axis=1)[:200]  # k = 1..200
    per_step = bool(np.all(err <= L ** np.arange(200) * err[0] + 1e-9))
    rate = an.fit_rate(err, last=100)
    ok = per_step and abs(rate - L) <= 0.02 * L
    criterion("C1 contraction rate", ok, f"per-step {per_step}, fitted rate {rate:.5f} vs L {L}")


def test_c02_tracking_asymptote(criterion):
    s = scenario("moving_quadratic", drift=0.01, T=400)
    rec, traj, rep = verified(s, "projected_gradient", 0.1)
    err = rep.measured["state_error"]
    floor = 0.01 / (1 - 0.9)
    tail_ok = bool(np.all(err[99:] <= floor + 1e-6))  # k >= 100
    bound = an.bound_tracking_contraction(rec.contraction, rep.variation["delta_hat"], err[0]).curve
    dominates = bool(np.all(err <= bound + 1e-12))
    criterion("C2 tracking asymptote", tail_ok and dominates,
              f"max error for k>=100 {err[99:].max():.9f}, floor {floor}, bound dominates {dominates}")


def lasso_run():
    s = scenario("tv_lasso", T=500)
    return (s, *verified(s, "forward_backward"))


def prefix_check(measured_avg, rhs, init, floor):
    """
    Check prefixes 50, 100, ..., 500 against `rhs` (initial term over the
    prefix length) and against the stricter full-horizon initial term.
    """
    prefixes = np.arange(50, 501, 50)
    margins = measured_avg[prefixes - 1] - rhs[prefixes - 1]
    strict = measured_avg[prefixes - 1] - (init ** 2 / 500 + floor)
    worst = float(max(margins.max(), strict.max()))
    return worst <= 1e-9, worst


def test_c03_averaged_fpr_bounded_image(criterion):
    s, rec, traj, rep = lasso_run()
    X = s.sample(1).feasible_set.norm
    states = rec.states
    star = np.array([t.x_star for t in traj])
    delta = np.linalg.norm(np.diff(star, axis=0), axis=1).max()
    g = rec.t_residual / rec.alpha
    weighted = np.cumsum(rec.alpha * (1 - rec.alpha) * g ** 2) / np.arange(1, 501)
    init = np.linalg.norm(states[0] - star[0])
    rhs = init ** 2 / np.arange(1, 501) + delta * (4 * X + delta)
    ok, worst = prefix_check(weighted, rhs, init, delta * (4 * X + delta))
    # the library route must agree with the direct computation
    same = np.allclose(rep.measured["fpr_avg"], weighted, rtol=1e-12) and np.allclose(
        rep.curves["fpr_bounded"], rhs, rtol=1e-12)
    criterion("C3 averaged FPR, bounded image", ok and same and rep.verdicts["fpr_bounded"]["holds"],
              f"X {X:.4f}, delta {delta:.3e}, worst prefix margin {worst:.3e}")


def test_c04_averaged_fpr_iterate_variation(criterion):
    s, rec, traj, rep = lasso_run()
    star = np.array([t.x_star for t in traj])
    nxt = rec.states[1:]
    gaps = np.sum((nxt - star[1:]) ** 2, axis=1) - np.sum((nxt - star[:-1]) ** 2, axis=1)
    d2 = max(0.0, gaps.max())
    init = np.linalg.norm(rec.states[0] - star[0])
    rhs = init ** 2 / np.arange(1, 501) + d2
    ok, worst = prefix_check(rep.measured["fpr_avg"], rhs, init, d2)
    criterion("C4 averaged FPR, iterate variation", ok and rep.verdicts["fpr_squared"]["holds"],
              f"d {math.sqrt(d2):.3e}, worst prefix margin {worst:.3e}")


def test_c05_vanishing_variation(criterion):
    s = scenario("moving_quadratic", drift=1.0, decay=0.5, T=200)
    rec, traj, rep = verified(s, "projected_gradient")
    star = np.array([t.x_star for t in traj])
    steps = np.linalg.norm(np.diff(star, axis=0), axis=1)
    geometric = np.allclose(steps, 0.5 ** np.arange(2, 202), rtol=1e-9, atol=1e-15)
    final = float(rec.g_residual[-1])
    ok = geometric and final < 1e-6 and rep.info["vanishing"]["summable"]
    criterion("C5 vanishing variation", ok, f"final g_residual {final:.3e}")


def test_c06_composition_constants(criterion):
    rng = np.random.default_rng(6)
    n = 4
    R = rng.normal(size=(n, n))
    f = fn.Quadratic(R @ R.T + np.eye(n), rng.normal(size=n))
    box = sets.box(-0.5, 0.5, n)
    cases = []
    for lam in (1.0 / f.M, 1.5 / f.M):
        pg = running.build_projected_gradient(ProblemInstance(f, feasible_set=box), lam)
        cases.append((f"proj o grad lam*M={lam * f.M:.1f}", pg, 1 / (2 - lam * f.M / 2)))
        prox = running.build_forward_backward(ProblemInstance(f, g=fn.L1Norm(n, 0.3)), lam)
        cases.append((f"prox o grad lam*M={lam * f.M:.1f}", prox, 1 / (2 - lam * f.M / 2)))
    dr = running.build_douglas_rachford(ProblemInstance(f, g=fn.L1Norm(n, 0.3)), 0.7)
    cases.append(("proj_B o DR", ops.compose_averaged(ops.projection_operator(sets.ball(2.0, dim=n)), dr), 2 / 3))
    lines, ok = [], True
    for name, T, expected in cases:
        formula = abs(T.alpha - expected) <= 1e-12
        passed, worst = ops.check_averaged(T, T.alpha, ops.random_pairs(rng, n, 10_000, scale=2.0), slack=1e-9)
        ok &= formula and passed
        lines.append(f"{name} alpha {T.alpha:.4f} worst {worst:.1e}")
    has_two_thirds = any(abs(T.alpha - 2 / 3) <= 1e-12 for _, T, _ in cases)
    criterion("C6 composed averagedness", ok and has_two_thirds, "; ".join(lines))


def dual_function(inst, p):
    x = running.lagrangian_argmin(inst, p)
    A, b = inst.linear_eq
    return inst.f(x) + p @ (A @ x - b)


def test_c07_dual_function_curvature(criterion):
    rng = np.random.default_rng(7)
    worst_lo = worst_hi = np.inf
    for _ in range(20):
        n, rows = rng.integers(1, 6, size=2)
        m, M = rng.uniform(0.5, 1.5), rng.uniform(2.0, 6.0)
        Q = problems.spectrum_matrix(rng, n, m, M)
        A = rng.normal(size=(rows, n))
        inst = ProblemInstance(fn.Quadratic(Q, rng.normal(size=n)), linear_eq=(A, rng.normal(size=rows)))
        dc = an.dual_constants(A, m, M)
        h = 1e-3
        p0 = rng.normal(size=rows)
        H = np.zeros((rows, rows))
        E = np.eye(rows) * h
        for i in range(rows):
            for j in range(rows):
                H[i, j] = -(dual_function(inst, p0 + E[i] + E[j]) - dual_function(inst, p0 + E[i] - E[j])
                            - dual_function(inst, p0 - E[i] + E[j]) + dual_function(inst, p0 - E[i] - E[j])) / (4 * h * h)
        eig = np.linalg.eigvalsh(0.5 * (H + H.T))
        lo, hi = dc.sigma_min ** 2 / M, dc.sigma_max ** 2 / m
        # a rank-deficient A gives a flat dual direction, checked to roundoff
        worst_lo = min(worst_lo, eig.min() - (0.95 * lo if lo > 0 else -1e-6))
        worst_hi = min(worst_hi, hi * 1.05 - eig.max())
    ok = worst_lo >= 0 and worst_hi >= 0
    criterion("C7 dual curvature within constants", ok, f"lower slack {worst_lo:.3e}, upper slack {worst_hi:.3e}")


def test_c08_primal_recovery(criterion):
    s = scenario("tv_equality_qp", omega=0.0, T=200)
    rec, traj, rep = verified(s, "dual_ascent")
    inst = s.sample(1)
    A, _ = inst.linear_eq
    sigma_max = np.linalg.svd(A, compute_uv=False).max()
    perr = np.linalg.norm(rec.states - traj[0].p_star, axis=1)
    xerr = np.linalg.norm(rec.aux["x"] - traj[0].x_star, axis=1)
    margin = float(np.max(xerr - sigma_max / inst.f.m * perr))
    ok = margin <= 1e-9 and rep.verdicts["primal_recovery"]["holds"]
    criterion("C8 primal recovery", ok, f"worst margin {margin:.3e}")


def test_c09_admm_equivalence(criterion):
    worst = 0.0
    for seed in range(5):
        s = scenario("tv_admm_consensus", T=100, seed=seed, omega=0.0)
        std = running.run_admm(s, 1.0, form="standard")
        dim = std.aux["p"].shape[1]
        bnd = running.run_admm(s, 1.0, {"x": std.aux["x"][1]}, B=sets.whole_space(dim), form="bounded")
        T = s.horizon
        worst = max(worst,
                    np.abs(bnd.aux["x"][:T] - std.aux["x"][1:]).max(),
                    np.abs(bnd.aux["z"] - std.aux["z"]).max(),
                    np.abs(bnd.aux["p"] - std.aux["nu"]).max())
    s = scenario("tv_admm_consensus", T=150, seed=11, omega=0.0)
    std = running.run_admm(s, 1.0, form="standard")
    dim = std.aux["p"].shape[1]
    huge = running.run_admm(s, 1.0, {"x": std.aux["x"][1]}, B=sets.box(-1e6, 1e6, dim), form="bounded")
    tail = float(max(np.abs(huge.aux["z"][20:] - std.aux["z"][20:]).max(),
                     np.abs(huge.aux["p"][20:] - std.aux["nu"][20:]).max()))
    ok = worst <= 1e-10 and tail <= 1e-10
    criterion("C9 ADMM bounded vs standard", ok, f"whole space {worst:.2e}, huge box after 20 steps {tail:.2e}")


def moving_stream(sampler, T=100):
    return ProblemStream(sampler, T, name="moving")


def test_c10_forward_backward_special_cases(criterion):
    n = 5
    rng = np.random.default_rng(10)
    R = rng.normal(size=(n, n))
    Q = R @ R.T + 0.5 * np.eye(n)
    box = sets.box(-0.4, 0.4, n)

    def center(k):
        return np.sin(0.1 * k + np.arange(n))

    f_only = moving_stream(lambda k: ProblemInstance(problems.centered_quadratic(Q, center(k)), feasible_set=box))
    lam = 1.0 / np.linalg.eigvalsh(Q).max()
    x1 = rng.normal(size=n)
    fb = running.run_forward_backward(f_only, lam, x1)
    pg = running.run_projected_gradient(f_only, lam, x1)
    gap_pg = float(np.abs(fb.states - pg.states).max())

    g_of = lambda k: problems.centered_quadratic(np.diag(np.linspace(0.5, 2, n)), center(k))  # noqa: E731
    fb0 = running.run_forward_backward(
        moving_stream(lambda k: ProblemInstance(fn.ZeroFunction(n), g=g_of(k), feasible_set=box)), 0.8, x1)
    pp = running.run_proximal_point(moving_stream(lambda k: ProblemInstance(g_of(k), feasible_set=box)), 0.8, x1)
    gap_pp = float(np.abs(fb0.states - pp.states).max())
    ok = gap_pg <= 1e-12 and gap_pp <= 1e-12 and fb.horizon == 100
    criterion("C10 FB reduces to PG and PP", ok, f"FB vs PG {gap_pg:.1e}, FB vs PP {gap_pp:.1e}")


def test_c11_objective_bound(criterion):
    s = scenario("tv_lasso", T=300)
    M = running.max_smoothness(s)
    rec, traj, rep = verified(s, "forward_backward", 1.0 / M)
    X = s.sample(1).feasible_set.norm
    star = np.array([t.x_star for t in traj])
    delta = np.linalg.norm(np.diff(star, axis=0), axis=1).max()
    sigma = rep.variation["sigma_hat"]
    init = np.linalg.norm(rec.states[0] - star[0])
    lam, Tp = 1.0 / M, np.arange(1, 301)
    gaps = np.array([s.sample(k).objective(x) - t.objective for k, (x, t) in enumerate(zip(rec.states, traj), start=1)])
    avg = np.cumsum(gaps[1:]) / Tp
    rhs = init ** 2 / (2 * lam * Tp) + delta * (4 * X + delta) / (2 * lam) + sigma
    fb_ok = bool(np.all(avg <= rhs + 1e-9)) and np.allclose(rep.curves["objective"], rhs, rtol=1e-9)

    s0 = scenario("tv_lasso", T=300, l1=0.0)
    rec0, traj0, rep0 = verified(s0, "proximal_point", 2.0)
    pp_ok = "objective" in rep0.verdicts and rep0.verdicts["objective"]["holds"]
    ok = fb_ok and rep.verdicts["objective"]["holds"] and pp_ok
    criterion("C11 objective bound", ok, f"FB worst margin {float(np.max(avg - rhs)):.3e}, "
              f"PP worst margin {rep0.verdicts['objective']['worst_margin']:.3e}")


LOC = """\
[scenario]
name = localization_lite
nodes = 8
anchors = 5
noise = 0.1
T = 300
omega = {omega}

[algorithm]
name = admm
lambda = 0.3
form = bounded
bounding = whole
"""


def test_c12_localization_tracking_floors(criterion):
    means, variances = [], []
    for omega in ("0", "pi/200", "pi/100", "pi/50"):
        exp = execute(parse_config(LOC.format(omega=omega)))
        mean, var = an.steady_state(exp.report.measured["tracking_error"])
        means.append(mean)
        variances.append(var)
    static_ok = means[0] < 1e-6
    increasing = all(a < b for a, b in zip(means, means[1:]))
    settled = all(v < 0.1 * m for m, v in zip(means, variances))
    criterion("C12 localization floors", static_ok and increasing and settled,
              "means " + ", ".join(f"{m:.3e}" for m in means) + "; variance/mean "
              + ", ".join(f"{v / m:.2e}" for m, v in zip(means, variances)))


def test_c13_triangle_equality(criterion):
    rng = np.random.default_rng(13)
    theta = rng.normal(scale=3.0, size=10_000)
    a = rng.normal(size=(10_000, 5))
    b = rng.normal(size=(10_000, 5))
    sq = lambda v: np.sum(v * v, axis=1)  # noqa: E731
    lhs = sq((1 - theta)[:, None] * a + theta[:, None] * b)
    rhs = (1 - theta) * sq(a) + theta * sq(b) - theta * (1 - theta) * sq(a - b)
    scale = np.abs(1 - theta) * sq(a) + np.abs(theta) * sq(b) + np.abs(theta * (1 - theta)) * sq(a - b)
    rel = float(np.max(np.abs(lhs - rhs) / scale))
    criterion("C13 triangle equality", rel <= 1e-10, f"worst relative error {rel:.2e}")
