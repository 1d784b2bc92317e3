"""Acceptance gate: one test per headline claim, each printing a verdict line.

Run `pytest tests/test_acceptance.py -v -s` to watch the verdicts land. Every
test recomputes its claim from scratch at the stated tolerance; nothing here
reuses state from the unit suite.
"""

import math
import os
import shutil
import subprocess
import time

import numpy as np
import yaml

from oracles import (
    max_abs_diff,
    oracle_feedback,
    oracle_novelty,
    oracle_renyi,
    oracle_shannon,
    oracle_step,
)

from entropy_collapse.dynamics import (
    DynamicsParams,
    UpdateRule,
    apply_feedback,
    apply_noise,
    inject_novelty,
    evolve,
    step,
)
from entropy_collapse.experiments import (
    run_irreversibility,
    run_sensitivity,
    run_universality,
    sweep_alpha,
)
from entropy_collapse.metrics import renyi_entropy, shannon_entropy
from entropy_collapse.simplex import (
    RngStream,
    StateDistribution,
    derive_stream_index,
    sample_dirichlet_uniform,
)

RULES = tuple(UpdateRule)


def _verdict(number: int, name: str, failures: list, detail: str = "") -> None:
    status = "PASS" if not failures else "FAIL"
    line = f"criterion {number} ({name}): {status}"
    if detail:
        line += f" [{detail}]"
    print(line)
    assert not failures, "\n".join(str(f) for f in failures)


def test_criterion_1_collapse_transition_sweep(monkeypatch):
    """Default sweep finds a sharp, monotone collapse transition near 1.2,
    single threaded, inside a minute."""
    monkeypatch.setenv("ECL_THREADS", "1")
    t0 = time.perf_counter()
    sweep = sweep_alpha()
    elapsed = time.perf_counter() - t0

    failures = []
    means = sweep.means()
    if elapsed >= 60.0:
        failures.append(f"sweep took {elapsed:.1f}s, budget is 60s")
    worst_rise = float(np.diff(means).max())
    if worst_rise > 0.02:
        failures.append(f"steady entropy rises by {worst_rise:.4f} along the grid")
    if means.max() <= 0.8:
        failures.append(f"no adaptive plateau: max steady entropy {means.max():.3f}")
    if means.min() >= 0.3:
        failures.append(f"no collapsed floor: min steady entropy {means.min():.3f}")
    if sweep.alpha_c is None:
        failures.append("no collapse threshold detected")
    elif abs(sweep.alpha_c - 1.2) > 0.15:
        failures.append(f"threshold {sweep.alpha_c} is not within 0.15 of 1.2")
    _verdict(
        1,
        "collapse transition sweep",
        failures,
        f"alpha_c={sweep.alpha_c}, span {means.max():.3f}->{means.min():.3f}, {elapsed:.1f}s",
    )


def test_criterion_2_shock_irreversibility():
    """Ten independent shocked runs above threshold: the novelty burst lifts
    entropy while it lasts, and the system falls back to the same collapsed
    floor with a dominant state intact."""
    failures = []
    gaps = []
    for r in range(10):
        rep = run_irreversibility(alpha=1.875, n_states=100, horizon=300, replicate=r)
        gaps.append(rep.recovery_gap)
        if rep.shock_peak < rep.baseline + 0.05:
            failures.append(
                f"replicate {r}: shock peak {rep.shock_peak:.3f} "
                f"did not clear baseline {rep.baseline:.3f} by 0.05"
            )
        if abs(rep.recovery_gap) >= 0.05:
            failures.append(
                f"replicate {r}: post-shock floor drifted {rep.recovery_gap:+.3f} from baseline"
            )
        if rep.dominant_share_final < 0.4:
            failures.append(
                f"replicate {r}: dominant share ended at {rep.dominant_share_final:.3f}"
            )
    worst_gap = max(abs(g) for g in gaps)
    _verdict(2, "shock irreversibility", failures, f"worst |recovery gap| {worst_gap:.4f}")


def test_criterion_3_rule_universality():
    """After a per-rule time dilation, all three rules trace one collapse
    curve to within 0.15 RMS."""
    report = run_universality()
    failures = []
    if report.max_pairwise_rms > 0.15:
        failures.append(f"max pairwise RMS {report.max_pairwise_rms:.4f} exceeds 0.15")
    dil = ", ".join(f"{k}={v:.3g}" for k, v in report.dilations.items())
    _verdict(3, "rule universality", failures, f"rms={report.max_pairwise_rms:.4f}, {dil}")


def test_criterion_4_sensitivity_axes():
    """The three-regime picture and the threshold survive changes of system
    size, noise level, entropy order and novelty schedule."""
    report = run_sensitivity(replicates=4)
    failures = []
    want = {"Adaptive", "Metastable", "Collapsed"}
    for point in report.axis_points():
        if set(point.regimes) != want:
            failures.append(
                f"axis {point.axis}={point.setting}: regimes {sorted(point.regimes)}"
            )
    for point in report.n_axis:
        if point.alpha_c is None:
            failures.append(f"n_states={point.setting}: no threshold detected")
    spread = report.alpha_c_over_beta_spread
    if spread is None:
        failures.append("threshold spread undefined on the size axis")
    elif spread > 0.30:
        failures.append(f"alpha_c/beta spread {spread:.3f} exceeds 0.30")
    if not report.noisy_transient_mean > report.noiseless_transient_mean:
        failures.append(
            f"noise did not raise the post-collapse entropy: "
            f"{report.noisy_transient_mean:.4f} vs {report.noiseless_transient_mean:.4f}"
        )
    _verdict(4, "sensitivity axes", failures, f"alpha_c/beta spread {spread}")


def test_criterion_5_entropy_descent_near_collapse():
    """Past the early transient, a supercritical replicator run loses entropy
    on at least 95 percent of steps, for every one of 100 random starts."""
    params = DynamicsParams(alpha=2.5, beta=0.003, rule=UpdateRule.REPLICATOR)
    failures = []
    fractions = []
    for i in range(100):
        rng = RngStream(42, derive_stream_index("dhneg", i)).generator()
        p0 = sample_dirichlet_uniform(100, rng)
        traj = evolve(p0, params, 300)
        diffs = np.diff(traj.column("entropy"))[21:]
        frac = float((diffs < 0.0).mean())
        fractions.append(frac)
        if frac < 0.95:
            failures.append(f"start {i}: entropy fell on only {frac:.1%} of steps")
    _verdict(
        5, "entropy descent near collapse", failures, f"min fraction {min(fractions):.3f}"
    )


def test_criterion_6_oracle_agreement():
    """Entropies, every update rule, novelty and the composed step agree with
    50-digit reference arithmetic to 1e-10."""
    rng = np.random.default_rng(60001)
    failures = []
    worst = 0.0

    def check(label, err):
        nonlocal worst
        worst = max(worst, err)
        if err > 1e-10:
            failures.append(f"{label}: error {err:.3e}")

    for n in (2, 3, 5):
        for case in range(50):
            state = sample_dirichlet_uniform(n, rng)
            p = state.probs
            alpha = float(rng.uniform(0.0, 3.0))
            beta = float(rng.uniform(0.0, 0.05))
            q = 0.5 if case % 2 else 2.0
            rule = RULES[case % len(RULES)]

            check(f"shannon n={n}", max_abs_diff([shannon_entropy(state)], [oracle_shannon(p)]))
            check(
                f"renyi q={q} n={n}",
                max_abs_diff([renyi_entropy(state, q)], [oracle_renyi(p, q)]),
            )
            for r in RULES:
                check(
                    f"feedback {r.value} n={n}",
                    max_abs_diff(
                        apply_feedback(state, alpha, r).probs,
                        oracle_feedback(p, alpha, r.value),
                    ),
                )
            check(
                f"novelty n={n}",
                max_abs_diff(inject_novelty(state, beta).probs, oracle_novelty(p, beta)),
            )
            check(
                f"step {rule.value} n={n}",
                max_abs_diff(
                    step(state, DynamicsParams(alpha=alpha, beta=beta, rule=rule)).probs,
                    oracle_step(p, alpha, beta, rule.value),
                ),
            )
    _verdict(6, "oracle agreement", failures, f"worst error {worst:.2e}")


def test_criterion_7_invariant_battery():
    """A thousand random cases of the five structural invariants: simplex
    closure, entropy monotonicity, novelty contraction, zero-parameter
    identity and permutation equivariance."""
    rng = np.random.default_rng(70001)
    failures = []
    for i in range(1000):
        if len(failures) > 5:
            break
        n = int(rng.integers(2, 50))
        state = sample_dirichlet_uniform(n, rng)
        rule = RULES[i % len(RULES)]
        alpha = float(rng.uniform(0.0, 3.0))
        beta = float(rng.uniform(0.0, 1.0))
        sigma = float(rng.uniform(0.0, 0.2))

        fed = apply_feedback(state, alpha, rule)
        mixed = inject_novelty(fed, beta)
        noised = apply_noise(mixed, sigma, rng)
        for stage, out in (("feedback", fed), ("novelty", mixed), ("noise", noised)):
            if not (np.all(out.probs >= 0.0) and abs(math.fsum(out.probs) - 1.0) <= 1e-12):
                failures.append(f"case {i}: {stage} left the simplex")

        if shannon_entropy(fed) > shannon_entropy(state) + 1e-12:
            failures.append(f"case {i}: feedback raised entropy")

        moved = 0.5 * float(np.abs(mixed.probs - fed.probs).sum())
        available = 0.5 * float(np.abs(fed.probs - 1.0 / n).sum())
        if abs(moved - beta * available) > 1e-12:
            failures.append(f"case {i}: novelty moved {moved:.3e}, not beta * distance")

        idle = step(state, DynamicsParams(alpha=0.0, beta=0.0, rule=rule))
        if not np.array_equal(idle.probs, state.probs):
            failures.append(f"case {i}: zero-parameter step is not the identity")

        perm = rng.permutation(n)
        direct = apply_feedback(state, alpha, rule).probs[perm]
        relabeled = apply_feedback(StateDistribution(state.probs[perm]), alpha, rule).probs
        if float(np.max(np.abs(direct - relabeled))) > 1e-12:
            failures.append(f"case {i}: feedback does not commute with relabeling")
    _verdict(7, "invariant battery", failures)


def test_criterion_8_cli_byte_determinism(tmp_path):
    """The installed CLI writes byte-identical output trees across repeat runs
    and across worker thread counts."""
    failures = []
    ecl = shutil.which("ecl")
    if ecl is None:
        _verdict(8, "cli byte determinism", ["ecl entry point is not on PATH"])

    config = tmp_path / "sweep.yaml"
    config.write_text(
        yaml.safe_dump(
            {
                "kind": "sweep",
                "alphas": [0.5, 1.5, 2.5],
                "n_states": 20,
                "horizon": 150,
                "replicates": 2,
                "noise_sigma": 0.05,
            }
        )
    )

    def battery(root, threads):
        env = {**os.environ, "ECL_THREADS": threads}
        commands = [
            [ecl, "run", "--alpha", "1.5", "--n", "20", "--steps", "80",
             "--seed", "7", "--out", str(root)],
            [ecl, "sweep", "--config", str(config), "--out", str(root)],
            [ecl, "irrev", "--alpha", "1.875", "--n", "20", "--steps", "160",
             "--out", str(root)],
            [ecl, "universal", "--n", "20", "--steps", "100", "--out", str(root)],
        ]
        for cmd in commands:
            proc = subprocess.run(cmd, env=env, capture_output=True, text=True)
            if proc.returncode != 0:
                failures.append(f"{cmd[1]} exited {proc.returncode}: {proc.stderr.strip()}")

    def tree(root):
        out = {}
        for dirpath, _, filenames in os.walk(root):
            for name in filenames:
                full = os.path.join(dirpath, name)
                out[os.path.relpath(full, root)] = open(full, "rb").read()
        return out

    battery(tmp_path / "a", "1")
    battery(tmp_path / "b", "2")
    if not failures:
        ta, tb = tree(tmp_path / "a"), tree(tmp_path / "b")
        if sorted(ta) != sorted(tb):
            failures.append(f"file sets differ: {sorted(ta)} vs {sorted(tb)}")
        else:
            for rel in sorted(ta):
                if ta[rel] != tb[rel]:
                    failures.append(f"{rel} differs between runs")
        _verdict(8, "cli byte determinism", failures, f"{len(ta)} files compared")
    else:
        _verdict(8, "cli byte determinism", failures)
