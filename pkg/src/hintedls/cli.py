"""Command-line experiment runner.

Subcommands:

* ``run --preset NAME | --config FILE [--override key=value ...] --out DIR``
  simulate and run every learner variant, writing per-variant CSV files and
  a summary.
* ``list-presets`` show the registered experiment presets.
* ``verify`` run the full acceptance battery, one pass/fail line per
  criterion; exit status reflects the outcome.
* ``bounds --preset NAME`` print the closed-form bound evaluations next to
  the values measured on a run of that preset.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import acceptance, analysis
from .exceptions import NotApplicableError
from .experiments import (
    apply_overrides,
    config_from_dict,
    preset_dict,
    preset_names,
    run_experiment,
    write_outputs,
)
from .systems import growth_envelope


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hintedls",
        description="Online hinted least-squares prediction experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment")
    source = run_p.add_mutually_exclusive_group(required=True)
    source.add_argument("--preset", choices=preset_names())
    source.add_argument("--config", help="YAML configuration file")
    run_p.add_argument("--override", action="append", default=[],
                       metavar="KEY=VALUE", help="dotted config override")
    run_p.add_argument("--out", required=True, help="output directory")

    sub.add_parser("list-presets", help="list preset names")

    sub.add_parser("verify", help="run the acceptance battery")

    bounds_p = sub.add_parser("bounds", help="bound evaluations vs measured values")
    bounds_p.add_argument("--preset", choices=preset_names(), required=True)
    return parser


def _load_run_config(args):
    if args.preset:
        data = preset_dict(args.preset)
        name = args.preset
    else:
        import yaml

        with open(args.config) as f:
            data = yaml.safe_load(f)
        name = "config"
    if args.override:
        data = apply_overrides(data, args.override)
    return config_from_dict(data), name


def _cmd_run(args) -> int:
    config, name = _load_run_config(args)
    result = run_experiment(config, name=name)
    files = write_outputs(result, args.out)
    for path in files:
        print(path)
    return 0


def _cmd_verify() -> int:
    results = acceptance.run_all()
    for res in results:
        print(res.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 1 if failed else 0


def _residual_bound_kind(hint_spec: dict, system) -> str | None:
    """Bound family matching the hint, or None when the system class does not
    support one (lag filters only bound real spectra)."""
    kind = hint_spec.get("kind")
    if kind == "luenberger":
        return "luenberger_hint"
    real_spectrum = system.spectrum_tag in ("real_diagonalizable", "real_jordan",
                                            "stable")
    two_lag = (kind == "diff" and int(hint_spec.get("order", 1)) == 1) or (
        kind == "lag" and int(hint_spec.get("lag", 0)) == 2)
    if two_lag and system.spectrum_tag in ("real_diagonalizable", "stable"):
        return "two_lag"
    if kind == "diff" and real_spectrum:
        return "high_order_diff"
    return None


def _cmd_bounds(args) -> int:
    config = config_from_dict(preset_dict(args.preset))
    system = config.resolved_system()
    result = run_experiment(config, name=args.preset)
    try:
        c_w, c_v = config.noise.effective_bounds()
        _, c_y = growth_envelope(system, config.noise)
    except NotApplicableError:
        print(f"preset {args.preset}: bounds need the nonstochastic noise model")
        return 1
    comp = config.comparator
    kappa = float(comp.get("kappa", 1.0))
    gamma = float(comp.get("gamma", 1.0))
    print(f"preset {args.preset}: |C|={system.norm_c:.4g} r={system.jordan_r} "
          f"kappa_A={system.kappa_a} C_w={c_w:.4g} C_v={c_v:.4g} C_y={c_y:.4g}")
    for label, variant in result.variants.items():
        record = variant.trials[0]
        line = [f"[{label}]"]
        delta_max = record.summary.get("delta_max")
        hint_spec = variant.info if variant.info.get("kind") in (
            "luenberger", "diff", "lag") else None
        if delta_max is not None and hint_spec is not None:
            kind = _residual_bound_kind(hint_spec, system)
            if kind == "luenberger_hint" and (
                    "kappa" not in hint_spec or "target_gamma" not in hint_spec):
                kind = None  # explicit gain without a decay certificate
            if kind is not None:
                b = analysis.BoundInputs(
                    norm_C=system.norm_c, n=system.n, r=system.jordan_r,
                    kappa_A=system.kappa_a, C_w=c_w, C_v=c_v,
                    kappa_tilde=float(hint_spec.get("kappa", 1.0)),
                    gamma_tilde=float(hint_spec.get("target_gamma", 1.0)),
                )
                bound = analysis.residual_bound(kind, b)
                line.append(f"delta_max {delta_max:.4g} <= {kind} bound {bound:.4g}")
        if "final_regret" in record.summary and comp.get("kind") == "grid":
            b = analysis.BoundInputs(
                norm_C=system.norm_c, p=system.p, n=system.n, r=system.jordan_r,
                kappa_A=system.kappa_a, kappa=kappa, gamma=gamma,
                C_w=c_w, C_v=c_v, C_y=c_y, lam=config.lam,
                H=config.memory, T=config.horizon,
                delta_max=delta_max if delta_max is not None else 0.0,
            )
            bound = analysis.theorem2_bound(b)
            line.append(
                f"final_regret {record.summary['final_regret']:.6g} "
                f"<= regret bound {bound:.6g}"
            )
        if len(line) == 1:
            line.append("no applicable closed-form bound")
        print(" ".join(line))
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    np.set_printoptions(precision=6)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "list-presets":
        for name in preset_names():
            print(name)
        return 0
    if args.command == "verify":
        return _cmd_verify()
    if args.command == "bounds":
        return _cmd_bounds(args)
    return 2  # pragma: no cover


if __name__ == "__main__":
    sys.exit(main())
