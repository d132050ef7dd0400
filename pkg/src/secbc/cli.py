"""Command-line front end.

Exit codes: 0 success, 2 validation/precondition failure (one-line
diagnostic, also used when a verification suite exceeds its tolerance),
3 resource-budget refusal, 64 usage errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import capacity as cap
from . import verify as ver
from .channels import RegimeTag, classify
from .errors import ResourceBudgetError, SecbcError, ValidationError
from .gaussian import GaussianSpec, gauss_capacity, sweep
from .io import SpecDocument, format_sweep_csv, load_spec_file, render_sweep_svg
from .probcore import Distribution, JointDistribution, uniform
from .simulate import (
    build_superposition_codebook,
    build_wiretap_codebook,
    hybrid_sizes,
    simulate_hybrid_middle,
    simulate_otp_equal_outputs,
    simulate_weakest_scheme,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_BUDGET = 3
EXIT_USAGE = 64


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="secbc", description="Broadcast channels with independent secret keys")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="print the ordering regime of a DMC spec")
    p.add_argument("spec")

    p = sub.add_parser("capacity", help="secrecy capacity of a DMC spec, by regime")
    p.add_argument("spec")
    p.add_argument("--resolution", type=int, default=64)
    p.add_argument("--refine", type=int, default=3)

    p = sub.add_parser("wiretap", help="wiretap channel (y1 vs z) with a shared key")
    p.add_argument("spec")
    p.add_argument("--key-rate", type=float, required=True)
    p.add_argument("--resolution", type=int, default=64)
    p.add_argument("--refine", type=int, default=3)

    p = sub.add_parser("gaussian", help="Gaussian secrecy capacity")
    p.add_argument("spec")

    p = sub.add_parser("sweep", help="capacity versus eavesdropper noise, CSV/SVG out")
    p.add_argument("spec")
    p.add_argument("--z-grid", required=True, metavar="A:B:STEP")
    p.add_argument("--out", required=True)
    p.add_argument("--svg")

    p = sub.add_parser("simulate", help="run a coding-scheme simulation")
    p.add_argument("spec")
    p.add_argument("--scheme", choices=("otp", "wiretap", "hybrid"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--rates", default="0.2,0.2,0.2", help="wiretap scheme per-symbol R,RK1,RK2")
    p.add_argument("--message-bits", type=int, default=1, help="otp scheme message size")
    p.add_argument("--rate-fraction", type=float, default=0.8, help="hybrid reliability backoff")

    p = sub.add_parser("verify", help="run a seeded verification suite")
    p.add_argument("suite", choices=("lemma2", "boundaries", "fm", "otp"))
    p.add_argument("--cases", type=int, default=0, help="0 = suite default")
    p.add_argument("--seed", type=int, default=0, help="0 = suite default")

    return parser


def _require_dmc(doc: SpecDocument) -> "BroadcastSpec":
    if doc.kind != "dmc":
        raise ValidationError("this command needs a DMC spec file (three channel matrices)")
    return doc.broadcast


def _require_gaussian(doc: SpecDocument, need_sigmaz: bool = True) -> SpecDocument:
    if doc.kind != "gaussian":
        raise ValidationError("this command needs a gaussian spec file")
    if need_sigmaz and doc.sigmaz_sq is None:
        raise ValidationError("gaussian block is missing sigmaz_sq")
    return doc


def _fmt_vec(v: np.ndarray) -> str:
    return "[" + ", ".join("%.6g" % x for x in v) + "]"


def _print_capacity(result: cap.CapacityResult, label: str) -> None:
    print(f"{label}: {result.value:.9f} bits")
    print(f"binding terms: {', '.join(result.binding_terms)}")
    print(f"argmax input: {_fmt_vec(result.argmax_input.probs)}")
    if result.argmax_aux:
        for name, obj in result.argmax_aux.items():
            arr = obj.probs if isinstance(obj, Distribution) else obj.matrix
            print(f"argmax {name}: {np.array2string(np.asarray(arr), precision=6)}")
    meta = ", ".join(f"{k}={v}" for k, v in result.grid_meta.items())
    print(f"grid: {meta}")


def _cmd_classify(args) -> int:
    bc = _require_dmc(load_spec_file(args.spec))
    regime = classify(bc)
    print(regime.tag.value)
    for chain, kernel in regime.witnesses.items():
        print(f"witness {chain}: {np.array2string(kernel.matrix, precision=6)}")
    return EXIT_OK


def _cmd_capacity(args) -> int:
    bc = _require_dmc(load_spec_file(args.spec))
    config = cap.GridConfig(resolution=args.resolution, refine_rounds=args.refine)
    regime = classify(bc)
    print(f"regime: {regime.tag.value}")
    if regime.tag == RegimeTag.EQUAL_OUTPUTS:
        _print_capacity(cap.capacity_equal(bc.ch_y1, config), "capacity (equal outputs)")
    elif regime.tag == RegimeTag.REVERSELY_DEGRADED_CHAIN:
        _print_capacity(cap.capacity_reversely_degraded(bc, config), "capacity (reversely degraded)")
    elif regime.tag == RegimeTag.DETERMINISTIC_REVERSELY:
        _print_capacity(cap.capacity_deterministic(bc, config), "capacity (deterministic)")
    elif regime.tag == RegimeTag.STRONGEST_EAVESDROPPER:
        _print_capacity(cap.uv_outer_bound(bc, config), "outer-bound estimate (grid)")
    elif regime.tag in (
        RegimeTag.WEAKEST_EAVESDROPPER_DEGRADED,
        RegimeTag.WEAKEST_EAVESDROPPER_LESS_NOISY,
    ):
        _print_capacity(cap.capacity_weakest(bc, config), "capacity (weakest eavesdropper)")
    elif regime.tag == RegimeTag.EAVESDROPPER_IN_MIDDLE:
        _print_capacity(cap.capacity_middle(bc, config), "capacity (eavesdropper in middle)")
    else:
        raise ValidationError(
            "no capacity formula for the General regime; only the Marton rate applies"
        )
    return EXIT_OK


def _cmd_wiretap(args) -> int:
    bc = _require_dmc(load_spec_file(args.spec))
    config = cap.GridConfig(resolution=args.resolution, refine_rounds=args.refine)
    result = cap.wiretap_key_capacity(bc.ch_y1, bc.ch_z, args.key_rate, config)
    _print_capacity(result, f"wiretap capacity at key rate {args.key_rate:g}")
    return EXIT_OK


def _cmd_gaussian(args) -> int:
    doc = _require_gaussian(load_spec_file(args.spec))
    spec = GaussianSpec(doc.power, doc.sigma1_sq, doc.sigma2_sq, doc.sigmaz_sq)
    res = gauss_capacity(spec)
    print(f"regime: {res.regime}")
    print(f"capacity: {res.value:.9f} bits")
    if res.alpha_star is not None:
        print(f"alpha_star: {res.alpha_star:.9f}")
    print(f"binding term: {res.binding_term}")
    return EXIT_OK


def _parse_grid(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValidationError(f"--z-grid must be A:B:STEP, got {text!r}")
    try:
        a, b, step = (float(p) for p in parts)
    except ValueError:
        raise ValidationError(f"--z-grid values must be numbers, got {text!r}") from None
    if step <= 0 or b < a:
        raise ValidationError("--z-grid needs step > 0 and B >= A")
    values = []
    k = 0
    while True:
        v = a + k * step
        if v > b + 1e-12:
            break
        values.append(v)
        k += 1
    return values


def _cmd_sweep(args) -> int:
    doc = _require_gaussian(load_spec_file(args.spec), need_sigmaz=False)
    rows = sweep(doc.power, doc.sigma1_sq, doc.sigma2_sq, _parse_grid(args.z_grid))
    csv_text = format_sweep_csv(rows)
    Path(args.out).write_text(csv_text)
    print(f"wrote {len(rows)} rows to {args.out}")
    if args.svg:
        Path(args.svg).write_text(render_sweep_svg(rows))
        print(f"wrote plot to {args.svg}")
    return EXIT_OK


def _print_report(report) -> None:
    print(f"rx1 error: {report.error_rx1.rate:.5f} ({report.error_rx1.errors}/{report.error_rx1.trials}, "
          f"wilson99 [{report.error_rx1.wilson_low:.5f}, {report.error_rx1.wilson_high:.5f}])")
    print(f"rx2 error: {report.error_rx2.rate:.5f} ({report.error_rx2.errors}/{report.error_rx2.trials}, "
          f"wilson99 [{report.error_rx2.wilson_low:.5f}, {report.error_rx2.wilson_high:.5f}])")
    print(f"leakage: {report.leakage_bits:.3e} bits ({report.leakage_per_symbol:.3e}/symbol)")
    print(f"note: {report.caveat}")


def _cmd_simulate(args) -> int:
    bc = _require_dmc(load_spec_file(args.spec))
    if args.scheme == "otp":
        report = simulate_otp_equal_outputs(
            bc.ch_y1, n=args.n, message_bits=args.message_bits, seed=args.seed, trials=args.trials
        )
    elif args.scheme == "wiretap":
        try:
            rates = tuple(float(r) for r in args.rates.split(","))
        except ValueError:
            raise ValidationError(f"--rates must be R,RK1,RK2, got {args.rates!r}") from None
        if len(rates) != 3 or any(r < 0 for r in rates):
            raise ValidationError(f"--rates must be three non-negative numbers, got {args.rates!r}")
        sizes = tuple(max(1, round(2.0 ** (args.n * r))) for r in rates)
        cb = build_wiretap_codebook(args.n, sizes, uniform(bc.x_size), args.seed)
        report = simulate_weakest_scheme(bc, cb, trials=args.trials, seed=args.seed)
    else:
        best = cap.capacity_middle(bc)
        p_u = best.argmax_aux["p_u"]
        x_given_u = best.argmax_aux["p_x_given_u"]
        joint = JointDistribution(p_u.probs[:, None] * x_given_u.matrix, ("u", "x"))
        mis = cap.hybrid_budgets(bc, joint)
        f = args.rate_fraction
        point = cap.hybrid_rate_oracle(
            f * mis["i_u_y1"],
            f * mis["i_u_y2"],
            f * mis["i_x_y1_given_u"],
            mis["i_u_z"],
            mis["i_x_z_given_u"],
        )
        if not point.feasible:
            raise ValidationError(
                "hybrid rate system infeasible at this spec; lower --rate-fraction"
            )
        cb = build_superposition_codebook(args.n, hybrid_sizes(point, args.n), p_u, x_given_u, args.seed)
        report = simulate_hybrid_middle(bc, cb, point, trials=args.trials, seed=args.seed)
    _print_report(report)
    return EXIT_OK


def _cmd_verify(args) -> int:
    cases = args.cases or 0
    seed = args.seed or 0
    if args.suite == "lemma2":
        rep = ver.verify_lemma2(cases=cases or 100, seed=seed or 1)
        print(f"lemma2: {rep.cases} cases, max deviation {rep.max_deviation:.3e}")
        if rep.max_deviation > 1e-6:
            raise ValidationError(f"lemma2 deviation {rep.max_deviation:.3e} exceeds 1e-6")
    elif args.suite == "boundaries":
        rep = ver.verify_boundaries(cases=cases or 20, seed=seed or 2)
        print(
            f"boundaries: dmc max gap {rep.max_dmc_gap:.3e}, gaussian strong-edge "
            f"{rep.max_gap_strong_edge:.3e}, weak-edge {rep.max_gap_weak_edge:.3e}"
        )
        if rep.max_dmc_gap > 2e-3 or rep.max_gap_strong_edge > 1e-3 or rep.max_gap_weak_edge > 1e-9:
            raise ValidationError("boundary gaps exceed tolerances")
    elif args.suite == "fm":
        rep = ver.verify_fm(cases=cases or 50, seed=seed or 3)
        print(
            f"fm: {rep.cases} cases ({rep.infeasible_cases} infeasible), "
            f"max |LP - closed| {rep.max_difference:.3e}"
        )
        if rep.max_difference > 1e-9:
            raise ValidationError(f"fm difference {rep.max_difference:.3e} exceeds 1e-9")
    else:
        rep = ver.verify_otp(seed=seed or 4)
        print(f"otp: {rep.cases} cases, max leakage {rep.max_leakage:.3e} bits")
        if rep.max_leakage > 1e-12:
            raise ValidationError(f"otp leakage {rep.max_leakage:.3e} exceeds 1e-12")
    print("ok")
    return EXIT_OK


_COMMANDS = {
    "classify": _cmd_classify,
    "capacity": _cmd_capacity,
    "wiretap": _cmd_wiretap,
    "gaussian": _cmd_gaussian,
    "sweep": _cmd_sweep,
    "simulate": _cmd_simulate,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError:
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except ResourceBudgetError as exc:
        print(f"secbc: resource budget: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except SecbcError as exc:
        print(f"secbc: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
