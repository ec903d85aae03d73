# Copyright 2024 The artgallery Authors. All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

# Imports
import os
import sys
import json
import logging
import argparse
from typing import List, Optional, Tuple

import yaml

import artgallery
from artgallery.geometry import Point, Polygon, format_polygon, read_polygon, write_polygon
from artgallery.model import CutConstraint, build_model, load_checkpoint, save_checkpoint
from artgallery.lp import write_lp_file
from artgallery.engine import SolveConfig, Solver
from artgallery.bench import GenSpec, generate, run_batch
from artgallery.facets import (check_ec_facet, check_sc_facet, check_trivial_facets, circulant_matrix, ec_coefficients,
                               facet_by_oracle, is_full_circulant, is_full_dimensional, pairs_cover_polygon,
                               sc_coefficients)
from artgallery.render import render_gap_plot, render_record
from artgallery.utils import configure_logging, read_json, write_json


EXIT_OPTIMAL = 0
EXIT_ERROR = 1
EXIT_TIME_LIMIT = 2
CLI_TIME_LIMIT = 60.0
ORACLE_MAX_GUARDS = 16


def resolve_instance(name_or_path: str) -> Tuple[str, Polygon, Optional[str]]:
    """Read an instance file, or a packaged instance by name; returns (name, polygon, checkpoint path)."""
    if os.path.exists(name_or_path):
        name = os.path.splitext(os.path.basename(name_or_path))[0]
        return name, read_polygon(name_or_path), None
    if name_or_path in artgallery.INSTANCES:
        entry = artgallery.INSTANCES[name_or_path]
        return name_or_path, read_polygon(entry["polygon_path"]), entry["checkpoint_path"]
    raise ValueError(f"'{name_or_path}' is neither a file nor a packaged instance ({list(artgallery.INSTANCES)})")


def build_config(args: argparse.Namespace) -> SolveConfig:
    """YAML values (from --config) first, then explicit flags on top."""
    values: dict = {"time_limit_s": CLI_TIME_LIMIT}
    if args.config:
        with open(args.config, "r") as f:
            values.update(yaml.safe_load(f) or {})
    flags = {"mode": args.mode, "cuts": args.cuts, "time_limit_s": args.time_limit,
             "arithmetic": args.arithmetic, "seed": args.seed}
    values.update({k: v for k, v in flags.items() if v is not None})
    return SolveConfig.from_dict(values)


def cmd_solve(args: argparse.Namespace) -> int:
    name, P, packaged_checkpoint = resolve_instance(args.input)
    config = build_config(args)
    guards: Optional[List[Point]] = None
    witnesses: Optional[List[Point]] = None
    cuts: List[CutConstraint] = []
    if args.checkpoint:
        guards, witnesses, cuts = load_checkpoint(args.checkpoint)
    state = Solver(P, config, guards=guards, witnesses=witnesses, initial_cuts=cuts).run()

    record = state.to_record(name, config)
    if args.json:
        write_json(record, args.json)
    else:
        print(json.dumps(record["result"], indent=2))
    if args.svg:
        render_record(record, P, args.svg, shade=args.shade)
    if args.save_checkpoint:
        save_checkpoint(args.save_checkpoint, state.matrix.guards, state.matrix.witnesses, state.cuts)
    if args.lp_file:
        write_lp_file(build_model(state.matrix, state.cuts), args.lp_file)
    return EXIT_OPTIMAL if state.reason == "optimal" else EXIT_TIME_LIMIT


def cmd_generate(args: argparse.Namespace) -> int:
    P = generate(GenSpec(args.cls, args.size, args.seed))
    if args.output:
        write_polygon(P, args.output)
        logging.info(f"Wrote {len(P.vertices())} vertices to {args.output}")
    else:
        sys.stdout.write(format_polygon(P))
    return EXIT_OPTIMAL


def facet_report(name: str, P: Polygon, guards: List[Point], witnesses: List[Point], oracle: bool) -> dict:
    """Facet checks of the SC inequality of all witnesses, the EC inequality of the witness cycle and the trivial facets."""
    A = circulant_matrix(guards, witnesses, P)
    report: dict = {"instance": name, "n_guards": len(guards), "n_witnesses": len(witnesses),
                    "full_dimensional": is_full_dimensional(A)}
    use_oracle = oracle and len(guards) <= ORACLE_MAX_GUARDS
    all_witnesses = list(range(len(witnesses)))
    if len(witnesses) >= 2:
        sc = check_sc_facet(A, all_witnesses).to_dict()
        sc["oracle"] = facet_by_oracle(A, sc_coefficients(A, all_witnesses), 2) if use_oracle else None
        report["sc"] = sc
    if len(witnesses) >= 3 and len(witnesses) % 2 == 1:
        ec = check_ec_facet(A, all_witnesses).to_dict()
        rhs = (len(witnesses) + 1)//2
        ec["oracle"] = facet_by_oracle(A, ec_coefficients(A, all_witnesses), rhs) if use_oracle else None
        report["ec"] = ec
    report["trivial"] = check_trivial_facets(A).to_dict()
    return report


def cmd_verify(args: argparse.Namespace) -> int:
    name, P, packaged_checkpoint = resolve_instance(args.input)
    checkpoint = args.checkpoint or packaged_checkpoint
    if checkpoint:
        guards, witnesses, _ = load_checkpoint(checkpoint)
    else:
        guards, witnesses = P.vertices(), P.vertices()

    report: dict = {"instance": name, "n_guards": len(guards), "n_witnesses": len(witnesses),
                    "full_dimensional": is_full_dimensional(circulant_matrix(guards, witnesses, P))}
    if args.facets:
        report.update(facet_report(name, P, guards, witnesses, args.oracle))
    if args.full_circulant:
        report["full_circulant"] = is_full_circulant(P, guards, witnesses)
        report["pairs_cover"] = pairs_cover_polygon(P, guards) if report["full_circulant"] else None
    if args.json:
        write_json(report, args.json)
    print(json.dumps(report, indent=2))
    return EXIT_OPTIMAL


def cmd_render(args: argparse.Namespace) -> int:
    record = read_json(args.record)
    if "result" not in record:
        render_gap_plot(record, args.svg)
        return EXIT_OPTIMAL
    if not args.instance:
        raise ValueError("rendering a run record needs --instance")
    _, P, _ = resolve_instance(args.instance)
    render_record(record, P, args.svg, shade=args.shade)
    return EXIT_OPTIMAL


def cmd_bench(args: argparse.Namespace) -> int:
    with open(args.batch, "r") as f:
        batch = yaml.safe_load(f)
    specs = [GenSpec(cls, int(size), int(seed)) for cls in batch["classes"] for size in batch["sizes"]
             for seed in batch["seeds"]]
    configs = batch["configs"]
    if isinstance(configs, list):
        configs = {c.get("name", f"{c.get('cuts', 'sc3+ec')}-{c.get('mode', 'lp')}"): {k: v for k, v in c.items() if k != "name"}
                   for c in configs}
    output_dir = args.output_dir or batch.get("output_dir")
    ncpu = args.ncpu or batch.get("ncpu", 1)
    result = run_batch(specs, configs, ncpu=ncpu, output_dir=output_dir)
    print(result.table)
    if output_dir:
        series = {name: s.to_dict() for name, s in result.series.items()}
        render_gap_plot(series, os.path.join(output_dir, "gap.svg"))
    return EXIT_OPTIMAL


def add_solve_options(parser: argparse.ArgumentParser):
    parser.add_argument("--mode", choices=["lp", "ip"], default=None, help="Solve LPs only, or IPs in the primal phase (default lp)")
    parser.add_argument("--cuts", choices=list(artgallery.CUT_CONFIGS), default=None, help="Cut separators (default sc3+ec)")
    parser.add_argument("--time-limit", type=float, default=None, help=f"Time limit in seconds (default {CLI_TIME_LIMIT:g})")
    parser.add_argument("--arithmetic", choices=["exact", "float"], default=None, help="LP arithmetic (default exact)")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--config", default=None, help="YAML file with SolveConfig values")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="artgallery", description="Minimum guard covers of polygons with holes")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="Solve an instance")
    solve.add_argument("input", help="Instance file or packaged instance name")
    add_solve_options(solve)
    solve.add_argument("--checkpoint", default=None, help="Start from the guards, witnesses and cuts of a checkpoint")
    solve.add_argument("--save-checkpoint", default=None, help="Save the final guards, witnesses and cuts")
    solve.add_argument("--lp-file", default=None, help="Write the final model in CPLEX LP format")
    solve.add_argument("--json", default=None, help="Write the run record to this path")
    solve.add_argument("--svg", default=None, help="Draw the final solution to this path")
    solve.add_argument("--shade", action="store_true", help="Shade the visibility regions of the guards")
    solve.set_defaults(func=cmd_solve)

    gen = sub.add_parser("generate", help="Generate a benchmark instance")
    gen.add_argument("--class", dest="cls", choices=list(artgallery.GENERATORS), required=True)
    gen.add_argument("--size", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--output", default=None)
    gen.set_defaults(func=cmd_generate)

    verify = sub.add_parser("verify", help="Check facet and circulant properties of a guard/witness configuration")
    verify.add_argument("input", help="Instance file or packaged instance name")
    verify.add_argument("--checkpoint", default=None, help="Guards and witnesses to check (default: the packaged ones, or the vertices)")
    verify.add_argument("--facets", action="store_true")
    verify.add_argument("--full-circulant", action="store_true")
    verify.add_argument("--oracle", action="store_true", help="Confirm facets with the brute-force dimension oracle")
    verify.add_argument("--json", default=None)
    verify.set_defaults(func=cmd_verify)

    render = sub.add_parser("render", help="Draw a run record, or a gap series")
    render.add_argument("record")
    render.add_argument("--instance", default=None)
    render.add_argument("--svg", required=True)
    render.add_argument("--shade", action="store_true")
    render.set_defaults(func=cmd_render)

    bench = sub.add_parser("bench", help="Run a batch described in YAML")
    bench.add_argument("batch")
    bench.add_argument("--ncpu", type=int, default=None)
    bench.add_argument("--output-dir", default=None)
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    level = configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as e:
        if level <= logging.DEBUG:
            logging.exception(e)
        else:
            logging.error(str(e))
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
