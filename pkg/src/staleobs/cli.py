"""Command-line entry points for the evaluation harness.

Subcommands::

    staleobs generate  --network net.bn --count 100 --seed 7 --output out.scn [--labeled]
    staleobs calibrate --network net.bn --scenarios out.scn --grid 1e-1,1e-2,1e-3
    staleobs evaluate  --network net.bn --scenarios out.scn --epsilon 1e-2
    staleobs compare   --network net.bn --scenarios out.scn [--epsilon 1e-2]

Exit code 0 on success, 2 on validation failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .detection import DEFAULT_EPSILON, detect
from .evaluation import calibrate_threshold, compare_formulas, evaluate, tree_to_formula
from .network import NetworkError, load_network
from .scenarios import (
    dump_scenarios,
    generate_labeled_scenarios,
    generate_scenarios,
    load_scenarios,
)


def _load_net(path: str):
    return load_network(Path(path).read_text(encoding="utf-8"))


def _parse_grid(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise NetworkError(f"bad threshold grid {text!r}") from None


def cmd_generate(args: argparse.Namespace) -> int:
    net = _load_net(args.network)
    if args.labeled:
        scenarios = generate_labeled_scenarios(net, args.count, args.seed)
    else:
        scenarios = generate_scenarios(net, args.count, args.seed)
    text = dump_scenarios(scenarios)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        print(f"wrote {args.count} scenarios to {args.output}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_calibrate(args: argparse.Namespace) -> int:
    net = _load_net(args.network)
    labeled = load_scenarios(Path(args.scenarios).read_text(encoding="utf-8"))
    eps, table = calibrate_threshold(net, labeled, _parse_grid(args.grid))
    lines = [
        f"threshold {eps:g}",
        f"tp {table.tp}  fn {table.fn}  fp {table.fp}  tn {table.tn}",
        f"tp_rate {table.tp_rate:.4f}  fp_rate {table.fp_rate:.4f}  youden {table.youden:.4f}",
    ]
    out = "\n".join(lines) + "\n"
    if args.output:
        Path(args.output).write_text(out, encoding="utf-8")
    sys.stdout.write(out)
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    net = _load_net(args.network)
    labeled = load_scenarios(Path(args.scenarios).read_text(encoding="utf-8"))
    table = evaluate(net, labeled, args.epsilon)
    out = (
        f"n {table.total}\n"
        f"tp {table.tp}  fn {table.fn}  fp {table.fp}  tn {table.tn}\n"
        f"tp_rate {table.tp_rate:.4f}  fp_rate {table.fp_rate:.4f}  "
        f"accuracy {table.accuracy:.4f}\n"
    )
    if args.output:
        Path(args.output).write_text(out, encoding="utf-8")
    sys.stdout.write(out)
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    net = _load_net(args.network)
    labeled = load_scenarios(Path(args.scenarios).read_text(encoding="utf-8"))
    with_reference = [l for l in labeled if l.expert_formula is not None]
    if not with_reference:
        print("no scenarios carry a reference formula", file=sys.stderr)
        return 2
    matched = 0
    lines = []
    for item in with_reference:
        tree = detect(
            net, item.scenario.prior_observations, item.scenario.new_observation, args.epsilon
        )
        if tree is None:
            lines.append(f"{item.scenario.id}: no contradiction detected")
            continue
        report = compare_formulas(tree_to_formula(tree), item.expert_formula)
        if report.matches:
            matched += 1
            lines.append(f"{item.scenario.id}: match")
        else:
            lines.append(f"{item.scenario.id}: {report.describe()}")
    lines.append(f"{matched}/{len(with_reference)} formulas match")
    out = "\n".join(lines) + "\n"
    if args.output:
        Path(args.output).write_text(out, encoding="utf-8")
    sys.stdout.write(out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="staleobs", description="obsolete-observation evaluation harness"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate random scenarios")
    gen.add_argument("--network", required=True)
    gen.add_argument("--count", type=int, default=100)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--output")
    gen.add_argument(
        "--labeled",
        action="store_true",
        help="plant balanced ground-truth labels during construction",
    )
    gen.set_defaults(func=cmd_generate)

    cal = sub.add_parser("calibrate", help="choose a detection threshold")
    cal.add_argument("--network", required=True)
    cal.add_argument("--scenarios", required=True)
    cal.add_argument("--grid", default="1e-1,1e-2,1e-3,1e-4")
    cal.add_argument("--output")
    cal.set_defaults(func=cmd_calibrate)

    ev = sub.add_parser("evaluate", help="contingency table at a threshold")
    ev.add_argument("--network", required=True)
    ev.add_argument("--scenarios", required=True)
    ev.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    ev.add_argument("--output")
    ev.set_defaults(func=cmd_evaluate)

    cmp_ = sub.add_parser("compare", help="compare detector trees to reference formulas")
    cmp_.add_argument("--network", required=True)
    cmp_.add_argument("--scenarios", required=True)
    cmp_.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    cmp_.add_argument("--output")
    cmp_.set_defaults(func=cmd_compare)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (NetworkError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
