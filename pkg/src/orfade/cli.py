"""Command-line experiment runner emitting curve files and figures."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, montecarlo, report, scenario


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orfade",
        description="Outage curves for opportunistic AF/DF relaying over "
                    "log-normal fading with imperfect channel estimation.",
    )
    parser.add_argument("--version", action="version", version=f"orfade {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    commands = [
        ("analytic", "closed-form curves only"),
        ("simulate", "Monte Carlo curves only"),
        ("compare", "both engines plus per-point gap columns"),
        ("sweep", "both engines along the configured axis"),
    ]
    for name, help_text in commands:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--scenario", required=True, help="scenario file (YAML)")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE", help="override a scenario value, e.g. mc.trials=10000")
        p.add_argument("--out", help="output file; '-' or omitted (with no scenario "
                                     "output.path) writes CSV to stdout")
        p.add_argument("--format", choices=("csv", "json"),
                       help="output format (default from scenario, csv)")
        plot = p.add_mutually_exclusive_group()
        plot.add_argument("--plot", dest="plot", action="store_true", default=None,
                          help="force figure rendering next to the output file")
        plot.add_argument("--no-plot", dest="plot", action="store_false",
                          help="suppress figure rendering")
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        doc = scenario.load_scenario(args.scenario)
        doc = scenario.apply_overrides(doc, args.overrides)
        run = scenario.build_run(doc)
    except scenario.ScenarioParseError as err:
        print(f"orfade: error: {err}", file=sys.stderr)
        return 2
    except scenario.ScenarioFieldError as err:
        print(f"orfade: error: {err}", file=sys.stderr)
        return 3

    run_analytic = args.command in ("analytic", "compare", "sweep")
    run_mc = args.command in ("simulate", "compare", "sweep")
    try:
        curve = montecarlo.sweep(
            run.cfg, run.protocol, run.axis, run.points,
            trials=run.trials, seed=run.seed, sampling=run.sampling,
            run_analytic=run_analytic, run_mc=run_mc)
    except ValueError as err:
        print(f"orfade: error: {err}", file=sys.stderr)
        return 1
    curve.metadata.update({
        "tool": f"orfade {__version__}",
        "command": args.command,
        "gamma_th": run.cfg.gamma_th,
        "config_digest": scenario.config_digest(run.effective),
        "effective_scenario": run.effective,
        "errors": curve.errors,
    })
    for entry_ in curve.errors:
        print(f"orfade: warning: point {entry_['axis_value']}: {entry_['error']}",
              file=sys.stderr)
    for pt in curve.points:
        if pt.mc is not None and pt.mc.low_confidence:
            print(f"orfade: warning: point {pt.axis_value}: fewer than 20 outage "
                  "events, estimate is low-confidence", file=sys.stderr)
    if not curve.points:
        print("orfade: error: no valid sweep points", file=sys.stderr)
        return 1

    include_gap = args.command == "compare"
    out = args.out if args.out is not None else run.output_path
    fmt = args.format or run.output_format

    if out is None or out == "-":
        if fmt == "csv":
            sys.stdout.write(report.csv_text(curve, include_gap))
        else:
            json.dump(report.json_payload(curve, include_gap), sys.stdout,
                      indent=2, sort_keys=True)
            sys.stdout.write("\n")
        return 0

    out_path = Path(out)
    if out_path.parent and not out_path.parent.exists():
        out_path.parent.mkdir(parents=True, exist_ok=True)
    written = [out_path]
    if fmt == "csv":
        report.write_csv(curve, out_path, include_gap)
        meta_path = report.meta_path_for(out_path)
        report.write_meta(curve, meta_path)
        written.append(meta_path)
    else:
        report.write_json(curve, out_path, include_gap)
    do_plot = args.plot if args.plot is not None else run.plot != "off"
    if do_plot:
        png_path = out_path.with_suffix(".png")
        report.render_png(curve, png_path)
        written.append(png_path)
    for path in written:
        print(f"wrote {path}")
    return 0


def entry() -> None:
    raise SystemExit(main())
