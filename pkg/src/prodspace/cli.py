"""Command-line front end.

Subcommands: run (full pipeline), synth (synthetic data file), rca,
density, decompose, logit (single-stage tables on an input file), smooth
(generic trend smoothing of any x/y CSV). The run output directory can
also be set through the PRODSPACE_OUTPUT_DIR environment variable.
"""

from __future__ import annotations

import argparse
import os
import sys

import pandas as pd

from .decomposition import decompose_density, fit_transition_models
from .errors import InputError, ProdspaceError
from .ingest import IngestConfig, load_panel, truncate_product_level
from .pipeline import STAGES, RunConfig, _restrict_to_active, run_pipeline
from .product_space import conditional_probabilities, density
from .rca import compute_rca, transitions
from .regression import summary_frame
from .smoothing import KERNELS, SmoothSpec, lpoly
from .synthetic import MODELS, synthetic_records

OUTPUT_DIR_ENV = "PRODSPACE_OUTPUT_DIR"


def _years(text: str) -> tuple[int, int]:
    try:
        t0, t1 = (int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected T0,T1 integers, got {text!r}")
    return t0, t1


def _add_data_flags(p: argparse.ArgumentParser, input_required: bool = True):
    p.add_argument("--input", required=input_required, help="export records file")
    p.add_argument("--years", type=_years, default=(2012, 2018), metavar="T0,T1")
    p.add_argument("--digits", type=int, choices=(2, 4, 6), default=4)
    p.add_argument("--threshold", type=float, default=1.0)
    p.add_argument("--delimiter", default=",")


def _add_smooth_flags(p: argparse.ArgumentParser):
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--bandwidth", type=float, default=50.0)
    p.add_argument("--se-bandwidth", type=float, default=75.0)
    p.add_argument("--kernel", choices=sorted(KERNELS), default="epanechnikov")


def _write_frame(frame: pd.DataFrame, path: str | None, index: bool = False):
    target = path if path else sys.stdout
    frame.to_csv(target, index=index, float_format="%.6g", lineterminator="\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prodspace",
        description="Specialization dynamics pipeline: RCA, product space, "
        "complexity, and transition prediction.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the pipeline and write all artifacts")
    _add_data_flags(run, input_required=False)
    _add_smooth_flags(run)
    run.add_argument("--synthetic", action="store_true", help="generate input data")
    run.add_argument("--seed", type=int, default=7)
    run.add_argument("--m", type=int, default=20, help="synthetic product count")
    run.add_argument("--n", type=int, default=12, help="synthetic country count")
    run.add_argument("--model", choices=MODELS, default="capability")
    run.add_argument("--zero-diagonal", action="store_true",
                     help="drop the unit proximity diagonal from density")
    run.add_argument("--raw-gamma", action="store_true",
                     help="aggregate unstandardized complexity into the outlook index")
    run.add_argument("--stage", choices=STAGES, default=STAGES[-1],
                     help="stop after this stage")
    run.add_argument("--output", help=f"output directory (or ${OUTPUT_DIR_ENV})")

    synth = sub.add_parser("synth", help="write a synthetic export records file")
    synth.add_argument("--seed", type=int, default=7)
    synth.add_argument("--m", type=int, default=20)
    synth.add_argument("--n", type=int, default=12)
    synth.add_argument("--model", choices=MODELS, default="capability")
    synth.add_argument("--years", type=_years, default=(2012, 2018), metavar="T0,T1")
    synth.add_argument("--output", help="destination file (default stdout)")

    rca = sub.add_parser("rca", help="write one year's binary RCA matrix")
    _add_data_flags(rca)
    rca.add_argument("--year", type=int, help="defaults to the first year")
    rca.add_argument("--output", help="destination file (default stdout)")

    dens = sub.add_parser("density", help="write the base-year density matrix")
    _add_data_flags(dens)
    dens.add_argument("--zero-diagonal", action="store_true")
    dens.add_argument("--output", help="destination file (default stdout)")

    dec = sub.add_parser("decompose",
                         help="regress density on diversity and ubiquity")
    _add_data_flags(dec)
    dec.add_argument("--zero-diagonal", action="store_true")
    dec.add_argument("--output", help="destination file (default stdout)")

    logit = sub.add_parser("logit", help="fit the gain/loss transition logits")
    _add_data_flags(logit)
    logit.add_argument("--zero-diagonal", action="store_true")
    logit.add_argument("--output", help="destination file (default stdout)")

    smooth = sub.add_parser("smooth", help="smooth an x/y column pair of a CSV")
    smooth.add_argument("--input", required=True)
    smooth.add_argument("--x", required=True, help="x column name")
    smooth.add_argument("--y", required=True, help="y column name")
    _add_smooth_flags(smooth)
    smooth.add_argument("--delimiter", default=",")
    smooth.add_argument("--output", help="destination file (default stdout)")

    return parser


def _load_restricted(args):
    panel = load_panel(
        args.input, IngestConfig(years=args.years, delimiter=args.delimiter)
    )
    panel = truncate_product_level(panel, args.digits)
    panel, _ = _restrict_to_active(panel)
    return panel


def _cmd_run(args) -> int:
    output = args.output or os.environ.get(OUTPUT_DIR_ENV) or "prodspace_out"
    if args.input is None and not args.synthetic:
        raise InputError("run needs --input PATH or --synthetic")
    config = RunConfig(
        input=None if args.synthetic else args.input,
        years=args.years,
        digits=args.digits,
        threshold=args.threshold,
        include_diagonal=not args.zero_diagonal,
        standardize_gamma=not args.raw_gamma,
        degree=args.degree,
        bandwidth=args.bandwidth,
        se_bandwidth=args.se_bandwidth,
        kernel=args.kernel,
        delimiter=args.delimiter,
        output_dir=output,
        stage=args.stage,
        seed=args.seed,
        synthetic_m=args.m,
        synthetic_n=args.n,
        synthetic_model=args.model,
    )
    report = run_pipeline(config)
    counts = report.manifest["counts"]
    print(f"wrote {len(report.artifact_paths)} artifacts to {report.output_dir}")
    if "n_gains" in counts:
        print(
            f"gains {counts['n_gains']} / at risk {counts['n_at_risk_gain']}, "
            f"losses {counts['n_losses']} / at risk {counts['n_at_risk_loss']}"
        )
    return 0


def _cmd_synth(args) -> int:
    records = synthetic_records(args.seed, args.m, args.n, args.model, args.years)
    _write_frame(records, args.output)
    return 0


def _cmd_rca(args) -> int:
    panel = _load_restricted(args)
    year = args.year if args.year is not None else args.years[0]
    rca = compute_rca(panel, year, args.threshold)
    frame = pd.DataFrame(rca.x, index=rca.products, columns=rca.countries)
    frame.index.name = "product"
    _write_frame(frame, args.output, index=True)
    return 0


def _density_matrix(args):
    panel = _load_restricted(args)
    rca0 = compute_rca(panel, args.years[0], args.threshold)
    prox = conditional_probabilities(rca0)
    return rca0, density(rca0, prox, include_diagonal=not args.zero_diagonal)


def _cmd_density(args) -> int:
    rca0, dens = _density_matrix(args)
    frame = pd.DataFrame(dens.d, index=dens.products, columns=dens.countries)
    frame.index.name = "product"
    _write_frame(frame, args.output, index=True)
    return 0


def _cmd_decompose(args) -> int:
    rca0, dens = _density_matrix(args)
    dec = decompose_density(dens, rca0)
    frame = summary_frame(
        {"1": dec.source_fit, "2": dec.diversity_fit, "3": dec.ubiquity_fit}
    )
    _write_frame(frame, args.output)
    return 0


def _cmd_logit(args) -> int:
    panel = _load_restricted(args)
    rca0 = compute_rca(panel, args.years[0], args.threshold)
    rca1 = compute_rca(panel, args.years[1], args.threshold)
    t = transitions(rca0, rca1)
    prox = conditional_probabilities(rca0)
    dens = density(rca0, prox, include_diagonal=not args.zero_diagonal)
    dec = decompose_density(dens, rca0)
    models = {
        event: fit_transition_models(t, dens, dec, rca0, event)
        for event in ("gain", "loss")
    }
    frame = summary_frame(
        {
            "gains_1": models["gain"].fit_density,
            "gains_2": models["gain"].fit_three,
            "losses_1": models["loss"].fit_density,
            "losses_2": models["loss"].fit_three,
        }
    )
    _write_frame(frame, args.output)
    return 0


def _cmd_smooth(args) -> int:
    table = pd.read_csv(args.input, sep=args.delimiter)
    for col in (args.x, args.y):
        if col not in table.columns:
            raise InputError(f"column {col!r} not in {args.input}")
    spec = SmoothSpec(
        degree=args.degree,
        bandwidth=args.bandwidth,
        se_bandwidth=args.se_bandwidth,
        kernel=args.kernel,
    )
    result = lpoly(table[args.x].to_numpy(), table[args.y].to_numpy(), spec)
    frame = pd.DataFrame(
        {
            "x": result.x,
            "fitted": result.fitted,
            "lower": result.lower,
            "upper": result.upper,
            "effective_n": result.effective_n,
        }
    )
    _write_frame(frame, args.output)
    return 0


COMMANDS = {
    "run": _cmd_run,
    "synth": _cmd_synth,
    "rca": _cmd_rca,
    "density": _cmd_density,
    "decompose": _cmd_decompose,
    "logit": _cmd_logit,
    "smooth": _cmd_smooth,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ProdspaceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
