"""Oracle-vs-closed-form verification battery.

Runs every cross-engine comparison the library supports: Kraus evolution vs
closed-form channels, numeric negativity vs closed forms, pipeline vs
per-input expressions, closed-form averages vs quadrature, and the audited
formula variants that are documented to deviate. Checks carry tolerances and
fail the run; audits record measured deviations that are expected to be
nonzero and never fail the run.
"""

from __future__ import annotations

import math
import time

import numpy as np

from . import averages, entanglement, teleport
from .averages import QuadratureSpec
from .channels import (
    ChannelParams,
    evolve,
    hybrid_pc_initial,
    hybrid_ps_initial,
    rho_pc_analytic,
    rho_ps_analytic,
)
from .fock import VAC_IDX, default_fock_dim, trace_distance
from .teleport import BlochInput, Direction

DEFAULT_R_GRID = tuple(round(0.05 * i, 2) for i in range(20))  # 0.0 .. 0.95
DEFAULT_ALPHAS = (0.1, 0.54, 1.0, 2.0, 10.0)
ORACLE_ALPHAS = (0.5, 1.0, 2.0)
PIPELINE_R = (0.0, 0.3, 0.6, 0.8)


def _check(name: str, dev: float, tol: float, worst_at=None, note: str = "") -> dict:
    entry = {
        "name": name,
        "max_abs_deviation": float(dev),
        "tolerance": float(tol),
        "pass": bool(dev <= tol),
    }
    if worst_at is not None:
        entry["worst_at"] = worst_at
    if note:
        entry["note"] = note
    return entry


def _audit(name: str, description: str, measured: dict) -> dict:
    return {"name": name, "description": description, "measured": measured}


def _angle_grid(n_theta: int, n_phi: int):
    thetas = np.linspace(0.0, math.pi, n_theta + 2)[1:-1]
    phis = np.linspace(0.0, 2.0 * math.pi, n_phi, endpoint=False)
    return [(float(t), float(p)) for t in thetas for p in phis]


def _channel_checks(r_grid, oracle_alphas) -> list[dict]:
    worst_pc, at_pc = 0.0, None
    worst_ps, at_ps = 0.0, None
    for alpha in oracle_alphas:
        dim = default_fock_dim(alpha)
        initial = hybrid_pc_initial(alpha, dim).density()
        for r in r_grid:
            params = ChannelParams.from_r(r, alpha)
            dev = trace_distance(evolve(initial, params.t), rho_pc_analytic(params, dim))
            if dev > worst_pc:
                worst_pc, at_pc = dev, {"r": r, "alpha": alpha}
    ps_initial = hybrid_ps_initial().density()
    for r in r_grid:
        params = ChannelParams.from_r(r, 1.0)
        dev = trace_distance(evolve(ps_initial, params.t), rho_ps_analytic(params))
        if dev > worst_ps:
            worst_ps, at_ps = dev, {"r": r}
    # semigroup: two loss steps compose into one with the product decay
    worst_sg = 0.0
    rho = rho_pc_analytic(ChannelParams(t=1.0, alpha=1.0), 22)
    for t1, t2 in ((0.9, 0.8), (0.7, 0.95), (0.6, 0.6)):
        dev = trace_distance(evolve(evolve(rho, t1), t2), evolve(rho, t1 * t2))
        worst_sg = max(worst_sg, dev)
    return [
        _check("channel_pc_kraus_vs_closed", worst_pc, 1e-9, at_pc),
        _check("channel_ps_kraus_vs_closed", worst_ps, 1e-12, at_ps),
        _check("channel_semigroup", worst_sg, 1e-10),
    ]


def _negativity_checks(r_grid, oracle_alphas) -> tuple[list[dict], list[dict]]:
    worst_ps, worst_pc, at_pc = 0.0, 0.0, None
    ratios = []
    for r in r_grid:
        params = ChannelParams.from_r(r, 1.0)
        num = entanglement.negativity_numeric(rho_ps_analytic(params))
        worst_ps = max(worst_ps, abs(num - entanglement.negativity_ps_analytic(params.t)))
    for alpha in oracle_alphas:
        dim = default_fock_dim(alpha)
        for r in r_grid:
            params = ChannelParams.from_r(r, alpha)
            num = entanglement.negativity_numeric(rho_pc_analytic(params, dim))
            dev = abs(num - entanglement.negativity_pc_closed(params))
            if dev > worst_pc:
                worst_pc, at_pc = dev, {"r": r, "alpha": alpha}
            if num > 1e-6:
                ratios.append(entanglement.negativity_pc_variant(params) / num)
    schmidt = abs(
        entanglement.negativity_numeric(rho_pc_analytic(ChannelParams(1.0, 1.0), 24))
        - math.sqrt(1.0 - math.exp(-4.0))
    )
    checks = [
        _check("negativity_ps_numeric_vs_quartic", worst_ps, 1e-12),
        _check("negativity_pc_numeric_vs_closed", worst_pc, 1e-9, at_pc),
        _check("negativity_pc_schmidt_point", schmidt, 1e-9),
    ]
    audits = [
        _audit(
            "negativity_pc_variant_scale",
            "closed-form variant over numeric negativity; a constant scale, "
            "the variant must be divided by this factor to match",
            {"ratio_min": float(min(ratios)), "ratio_max": float(max(ratios)),
             "ratio_mean": float(np.mean(ratios))},
        )
    ]
    return checks, audits


def _pipeline_checks(pipeline_r, oracle_alphas, n_theta=6, n_phi=8) -> tuple[list[dict], list[dict]]:
    angles = _angle_grid(n_theta, n_phi)
    worst_f = {d: (0.0, None) for d in Direction}
    worst_p = {d: (0.0, None) for d in Direction}
    worst_sum = 0.0
    worst_valid = 0.0
    worst_post = 0.0
    worst_vacuum = 0.0
    variant_dev_pc = 0.0
    variant_dev_cp = 0.0
    fitted_mod = []
    fitted_weight = []

    for alpha in oracle_alphas:
        dim = default_fock_dim(alpha)
        for r in pipeline_r:
            params = ChannelParams.from_r(r, alpha)
            chan_pc = evolve(hybrid_pc_initial(alpha, dim).density(), params.t)
            chan_ps = evolve(hybrid_ps_initial().density(), params.t)
            for theta, phi in angles:
                inp = BlochInput(theta, phi)
                for d in Direction:
                    chan = chan_pc if d in (Direction.P_TO_C, Direction.C_TO_P) else chan_ps
                    summary = teleport.pipeline_summary(d, inp, params, channel=chan)
                    dev_f = abs(summary["fidelity"] - teleport.per_input_fidelity(d, inp, params))
                    dev_p = abs(summary["success_probability"]
                                - teleport.per_input_success_probability(d, inp, params))
                    where = {"r": r, "alpha": alpha, "theta": theta, "phi": phi, "direction": d.value}
                    if dev_f > worst_f[d][0]:
                        worst_f[d] = (dev_f, where)
                    if dev_p > worst_p[d][0]:
                        worst_p[d] = (dev_p, where)
                    total = sum(o.probability for o in summary["outcomes"])
                    worst_sum = max(worst_sum, abs(total - 1.0))
                    for o in summary["outcomes"]:
                        if o.output is not None and o.probability > 1e-12:
                            worst_valid = max(
                                worst_valid,
                                o.output.hermiticity_defect(),
                                max(0.0, -o.output.min_eigenvalue()),
                                abs(o.output.trace() - 1.0),
                            )
                    if d in (Direction.C_TO_P, Direction.S_TO_P):
                        post = teleport.pipeline_summary(d, inp, params, channel=chan,
                                                         postselected=True)
                        worst_post = max(
                            worst_post,
                            abs(post["fidelity"]
                                - teleport.per_input_fidelity(d, inp, params, postselected=True)),
                            abs(post["success_probability"]
                                - teleport.per_input_success_probability(
                                    d, inp, params, postselected=True)),
                        )
                    if d is Direction.P_TO_C:
                        dev = abs(teleport.per_input_fidelity_variant(d, inp, params)
                                  - summary["fidelity"])
                        variant_dev_pc = max(variant_dev_pc, dev)
                    if d is Direction.C_TO_P:
                        dev = abs(teleport.per_input_fidelity_variant(d, inp, params)
                                  - summary["fidelity"])
                        variant_dev_cp = max(variant_dev_cp, dev)

            # vacuum removal and the success-modulation constant, once per (r, alpha)
            inp = BlochInput(math.pi / 2, 0.0)
            base = teleport.combined_success_output(
                teleport.teleport_c_to_p(inp, params, channel=chan_pc))
            projected, _ = teleport.postselect_polarization(base)
            worst_vacuum = max(worst_vacuum, float(projected.matrix[VAC_IDX, VAC_IDX].real))
            prob = teleport.pipeline_summary(Direction.P_TO_C, inp, params,
                                             channel=chan_pc)["success_probability"]
            measured_a = 2.0 * prob / params.t**2 - 1.0  # u = 1 at this input
            fitted_mod.append((alpha, measured_a, math.exp(-2.0 * alpha * alpha)))
            # coherence weight of the c->p output, read off the pipeline fidelity
            f_pipe = teleport.pipeline_summary(Direction.C_TO_P, inp, params,
                                               channel=chan_pc)["fidelity"]
            q = params.coherence_factor
            p2 = 0.25  # |a|^2 |b|^2 at the equator
            weight = (f_pipe / params.t**2 - 0.5) / (q * p2)
            fitted_weight.append(weight)

    checks = [
        _check(f"pipeline_vs_closed_fidelity_{d.value}", worst_f[d][0], 1e-6, worst_f[d][1])
        for d in Direction
    ] + [
        _check(f"pipeline_vs_closed_probability_{d.value}", worst_p[d][0], 1e-6, worst_p[d][1])
        for d in Direction
    ] + [
        _check("pipeline_branch_probability_sum", worst_sum, 1e-10),
        _check("pipeline_outputs_valid_density", worst_valid, 1e-10),
        _check("pipeline_postselected_vs_closed", worst_post, 1e-10),
        _check("postselect_removes_vacuum", worst_vacuum, 1e-14),
    ]
    mod_residual = max(abs(m - qs) for _, m, qs in fitted_mod)
    audits = [
        _audit(
            "pc_success_modulation_constant",
            "modulation of the p->c success probability around t^2/2, fitted from "
            "the pipeline at the equator input; equals exp(-2 alpha^2), i.e. the "
            "product of the coherence and overlap factors",
            {"fits": [{"alpha": a, "fitted": m, "exp_minus_2a2": qs} for a, m, qs in fitted_mod],
             "max_fit_residual": mod_residual},
        ),
        _audit(
            "cp_coherence_weight",
            "weight of the coherence term in the c->p output fidelity, read off the "
            "pipeline; the weight-1 closed-form variant deviates by the measured amount",
            {"fitted_weight": float(np.mean(fitted_weight)),
             "variant_max_deviation": variant_dev_cp},
        ),
        _audit(
            "pc_per_input_conjugation",
            "p->c per-input fidelity variant with swapped conjugations in the "
            "coherence term; agrees with the pipeline only at phi in {0, pi}",
            {"variant_max_deviation": variant_dev_pc},
        ),
    ]
    return checks, audits


def _moment_checks(spec: QuadratureSpec) -> tuple[list[dict], list[dict]]:
    kernels = {
        1: lambda th, ph: np.cos(th / 2) ** 4,
        2: lambda th, ph: (np.cos(th / 2) * np.sin(th / 2)) ** 2,
        3: lambda th, ph: np.sin(th) * np.cos(ph),
        4: lambda th, ph: 2.0 * (np.cos(th / 2) * np.sin(th / 2)) ** 2 * np.cos(2 * ph),
    }
    worst, at = 0.0, None
    xs = [0.05 * i for i in range(1, 20)]
    for kind in (1, 2, 3, 4):
        for x in xs:
            quad = averages.bloch_average(
                lambda th, ph: kernels[kind](th, ph) / (1.0 + x * np.sin(th) * np.cos(ph)), spec
            )
            dev = abs(quad - averages.moment_integral(kind, x))
            if dev > worst:
                worst, at = dev, {"kind": kind, "x": x}
    # series and closed form must agree around the switch point; the closed
    # forms carry ~1e-11 cancellation noise this close to zero, which is the
    # point of switching
    seam = max(
        abs(averages._moment_series(kind, x) - averages._moment_closed(kind, x))
        for kind in (1, 2, 3, 4)
        for x in (9e-4, 1e-3, 2e-3, 5e-3)
    )
    variant_devs = {}
    for x in (1e-3, 0.1, 0.5):
        measured = averages.moment_integral_variant4(x) - averages.moment_integral(4, x)
        predicted = (1 - x * x) * math.atanh(x) / (4 * x**3) - 1.0 / (4 * x * x)
        variant_devs[x] = {"deviation": measured, "residual_vs_formula": abs(measured - predicted)}
    checks = [
        _check("moment_integrals_vs_quadrature", worst, 1e-8, at),
        _check("moment_series_closed_seam", seam, 1e-9),
    ]
    audits = [
        _audit(
            "fourth_moment_variant_limit",
            "kind-4 closed-form variant approaches -1/6 instead of 0 at x -> 0; "
            "deviation equals (1-x^2) artanh(x)/(4x^3) - 1/(4x^2)",
            {"value_at_1e-3": averages.moment_integral_variant4(1e-3),
             "deviations": {str(k): v for k, v in variant_devs.items()}},
        )
    ]
    return checks, audits


def _average_checks(r_grid, alphas, spec: QuadratureSpec) -> tuple[list[dict], list[dict]]:
    worst, at = 0.0, None

    def track(dev, where):
        nonlocal worst, at
        if dev > worst:
            worst, at = dev, where

    for alpha in alphas:
        for r in r_grid:
            params = ChannelParams.from_r(r, alpha)
            for d in Direction:
                dev = abs(averages.avg_fidelity(d, params)
                          - averages.avg_fidelity_quadrature(d, params, spec))
                track(dev, {"what": f"F_{d.value}", "r": r, "alpha": alpha})
                dev = abs(averages.avg_success_probability(d, params)
                          - averages.avg_success_quadrature(d, params, spec))
                track(dev, {"what": f"P_{d.value}", "r": r, "alpha": alpha})
                if d in (Direction.C_TO_P, Direction.S_TO_P):
                    dev = abs(averages.avg_fidelity(d, params, postselected=True)
                              - averages.avg_fidelity_quadrature(d, params, spec, postselected=True))
                    track(dev, {"what": f"F_post_{d.value}", "r": r, "alpha": alpha})
                    dev = abs(averages.avg_success_probability(d, params, postselected=True)
                              - averages.avg_success_quadrature(d, params, spec, postselected=True))
                    track(dev, {"what": f"P_post_{d.value}", "r": r, "alpha": alpha})
            dev = abs(averages.classical_limit(Direction.P_TO_C, params)
                      - averages.classical_limit_quadrature(params, spec))
            track(dev, {"what": "F_cl_p->c", "r": r, "alpha": alpha})

    # exact identities
    p_half = ChannelParams(t=0.5, alpha=1.0)
    exact = max(
        abs(averages.avg_success_probability(Direction.P_TO_C, ChannelParams.from_r(r, 1.0))
            - (1 - r * r) / 2) for r in r_grid
    )
    exact = max(exact, abs(averages.avg_success_probability(Direction.S_TO_P, p_half) - 0.5))
    exact = max(exact, abs(averages.avg_fidelity(Direction.P_TO_S, ChannelParams(1.0, 1.0)) - 1.0))
    exact = max(exact, abs(averages.avg_fidelity(Direction.P_TO_S, p_half) - 17.0 / 24.0))

    # gap approximation at large amplitude, closed forms only
    gap_dev = 0.0
    for r in r_grid:
        if r > 0.5:
            continue
        params = ChannelParams.from_r(r, 10.0)
        gap = (averages.avg_fidelity(Direction.P_TO_C, params)
               - averages.avg_fidelity(Direction.C_TO_P, params))
        gap_dev = max(gap_dev, abs(gap - averages.fidelity_gap_large_alpha(params)))

    # amplitude making the two success probabilities closest in sup norm
    best_alpha, best_sup = None, None
    for k in range(0, 61):
        a = 0.30 + 0.01 * k
        sup = max(
            abs(averages.avg_success_probability(Direction.C_TO_P, ChannelParams.from_r(r, a))
                - (1 - r * r) / 2)
            for r in r_grid
        )
        if best_sup is None or sup < best_sup:
            best_alpha, best_sup = a, sup

    checks = [
        _check("avg_closed_vs_quadrature", worst, 1e-8, at),
        _check("exact_reference_numbers", exact, 1e-12),
        _check("gap_formula_large_alpha", gap_dev, 1e-3),
        _check("crossing_alpha_star", abs(best_alpha - 0.54), 0.05 + 1e-9,
               {"alpha_star": best_alpha, "sup_at_star": best_sup}),
    ]

    # audited variants
    ref = ChannelParams.from_r(0.6, 1.0)
    variant_avg = abs(averages.avg_fidelity_variant_pc(ref)
                      - averages.avg_fidelity_quadrature(Direction.P_TO_C, ref, spec))
    variant_cl = abs(averages.classical_limit_variant(ref)
                     - averages.classical_limit_quadrature(ref, spec))
    gap_fn = lambda r: abs(
        averages.avg_fidelity(Direction.P_TO_S, ChannelParams.from_r(r, 1.0))
        - averages.avg_fidelity(Direction.S_TO_P, ChannelParams.from_r(r, 1.0), postselected=True)
    )
    gaps = [(r, gap_fn(r)) for r in np.linspace(0.01, 0.99, 99)]
    max_r, max_gap = max(gaps, key=lambda kv: kv[1])
    r_below = [r for r, g in gaps if g < 0.01]
    audits = [
        _audit(
            "pc_average_assembly",
            "p->c average assembled through the single-scale moment differences "
            "with a q/(q-1) prefactor; not the partial-fraction identity, so it "
            "deviates from the quadrature by O(1)",
            {"deviation_at_r0.6_alpha1": variant_avg},
        ),
        _audit(
            "classical_limit_expression",
            "literal alternative classical-limit expression for p->c; wrong "
            "small-overlap limit, deviation measured against the quadrature",
            {"deviation_at_r0.6_alpha1": variant_cl},
        ),
        _audit(
            "postselect_sp_fidelity_gap",
            "largest difference between the p->s average fidelity and the "
            "postselected s->p average fidelity over r; stays below 0.01 only "
            "on the small-r side",
            {"max_gap": float(max_gap), "at_r": float(max_r),
             "largest_r_with_gap_below_0.01": float(max(r_below)) if r_below else None},
        ),
    ]
    return checks, audits


def run_battery(
    r_grid=DEFAULT_R_GRID,
    alphas=DEFAULT_ALPHAS,
    oracle_alphas=ORACLE_ALPHAS,
    pipeline_r=PIPELINE_R,
    spec: QuadratureSpec | None = None,
    angle_grid=(6, 8),
) -> dict:
    """Run every check and audit; returns a JSON-serializable report."""
    spec = spec or QuadratureSpec()
    started = time.time()
    checks: list[dict] = []
    audits: list[dict] = []

    checks.extend(_channel_checks(r_grid, oracle_alphas))

    c, a = _negativity_checks(r_grid, oracle_alphas)
    checks.extend(c)
    audits.extend(a)

    c, a = _pipeline_checks(pipeline_r, oracle_alphas, *angle_grid)
    checks.extend(c)
    audits.extend(a)

    c, a = _moment_checks(spec)
    checks.extend(c)
    audits.extend(a)

    c, a = _average_checks(r_grid, alphas, spec)
    checks.extend(c)
    audits.extend(a)

    return {
        "passed": all(ch["pass"] for ch in checks),
        "elapsed_seconds": round(time.time() - started, 3),
        "grid": {"r": list(r_grid), "alphas": list(alphas),
                 "oracle_alphas": list(oracle_alphas), "pipeline_r": list(pipeline_r),
                 "quadrature": [spec.n_theta, spec.n_phi]},
        "checks": checks,
        "audits": audits,
    }


def format_report(report: dict) -> str:
    lines = []
    width = max(len(c["name"]) for c in report["checks"])
    for c in report["checks"]:
        status = "PASS" if c["pass"] else "FAIL"
        lines.append(
            f"{status}  {c['name']:<{width}}  max dev {c['max_abs_deviation']:.3e}"
            f"  (tol {c['tolerance']:.0e})"
        )
    lines.append("")
    lines.append("audited formula variants (documented deviations, informational):")
    for a in report["audits"]:
        lines.append(f"  {a['name']}: {a['description']}")
        lines.append(f"    measured: {a['measured']}")
    verdict = "ALL CHECKS PASSED" if report["passed"] else "CHECK FAILURES PRESENT"
    lines.append("")
    lines.append(f"{verdict} in {report['elapsed_seconds']} s")
    return "\n".join(lines)
