"""Command-line interface.

Subcommands: certify one graph, enumerate-and-certify a whole size class,
tabulate GHZ fidelity ceilings, explore a local-complementation orbit,
re-verify a stored certificate, and run the randomized self-test suites.

Exit codes: 0 success/certified, 1 usage or input error, 2 not certified
or verification failure, 3 budget exhausted.  JSON output is
deterministic: the same inputs and seed produce identical bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from . import __version__
from .certify import (
    Certificate,
    DEFAULT_ORBIT_CAP,
    NotCertified,
    TableReport,
    certificate_from_json,
    certificate_to_json_obj,
    certify_any,
    exhaustive_table,
    verify_obs3,
)
from .errors import NetcertError
from .ghzbound import bound_report
from .multigraph import (
    DEFAULT_ENUMERATION_BUDGET,
    Multigraph,
    lc_orbit,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NEGATIVE = 2
EXIT_BUDGET = 3

FORMATS = ("json", "tsv", "human")


@dataclass(frozen=True)
class RunConfig:
    """Resolved options shared by the subcommands."""

    fmt: str
    output: Path | None
    seed: int
    workers: int
    budget_graphs: int
    budget_orbit: int
    verify: bool
    trials: int


def _fmt6(x: float) -> str:
    return f"{x:.6g}"


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output is not None:
        cfg.output.write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(cfg: RunConfig, obj: object) -> None:
    _emit(cfg, json.dumps(obj, indent=2) + "\n")


def _load_graph(args: argparse.Namespace) -> Multigraph:
    if args.inline is not None:
        text = args.inline.replace(";", "\n")
        return Multigraph.from_text(text)
    if args.input is None:
        raise NetcertError("provide a graph via --inline or --input")
    text = Path(args.input).read_text()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return Multigraph.from_json_obj(json.loads(text))
    return Multigraph.from_text(text)


def _parse_range(text: str) -> list[int]:
    if ".." in text:
        lo_s, hi_s = text.split("..", 1)
        lo, hi = int(lo_s), int(hi_s)
        if hi < lo:
            raise NetcertError(f"empty range {text!r}")
        return list(range(lo, hi + 1))
    return [int(text)]


def _config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        fmt=getattr(args, "format", "json"),
        output=Path(args.output) if getattr(args, "output", None) else None,
        seed=getattr(args, "seed", 0),
        workers=getattr(args, "workers", 1),
        budget_graphs=getattr(args, "budget_graphs", DEFAULT_ENUMERATION_BUDGET),
        budget_orbit=getattr(args, "budget_orbit", DEFAULT_ORBIT_CAP),
        verify=getattr(args, "verify", False),
        trials=getattr(args, "trials", 1000),
    )


def _not_certified_obj(res: NotCertified) -> dict:
    return {
        "graph": res.graph.to_json_obj(),
        "certified": False,
        "reasons": list(res.reasons),
        "orbit_size": res.orbit_size,
        "orbit_truncated": res.orbit_truncated,
    }


def _certificate_obj(cert: Certificate, verify: bool) -> dict:
    obj = {"certified": True, "certificate": certificate_to_json_obj(cert)}
    if verify:
        report = verify_obs3(cert)
        obj["verification"] = {
            "all_passed": report.all_passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "detail": c.detail}
                for c in report.checks
            ],
        }
    return obj


def _human_certificate(cert: Certificate) -> str:
    lines = [
        f"certified: yes ({cert.method})",
        f"graph: d={cert.graph.d} n={cert.graph.n} "
        + " ".join(f"{i}-{j}:{m}" for i, j, m in _graph_edges(cert.graph)),
        f"triple: {cert.triple} ({cert.kind})",
        f"lc_path: {list(cert.lc_path) or '[]'}",
        "groups: "
        + "; ".join(
            f"G{i}={{{', '.join(grp)}}}" for i, grp in enumerate(cert.groups, 1)
        ),
        f"exponents: {dict(cert.exponents)}",
        f"kappa: {cert.kappa}",
        f"lambda_prime: {_fmt6(cert.lambda_prime)}",
        f"fidelity_bound: {_fmt6(cert.fidelity_bound)}",
    ]
    return "\n".join(lines) + "\n"


def _graph_edges(g: Multigraph) -> list[tuple[int, int, int]]:
    from .multigraph import edges

    return edges(g)


def cmd_certify(args: argparse.Namespace) -> int:
    cfg = _config(args)
    graph = _load_graph(args)
    result = certify_any(graph, orbit_cap=cfg.budget_orbit)
    if isinstance(result, Certificate):
        if cfg.fmt == "human":
            text = _human_certificate(result)
            if cfg.verify:
                report = verify_obs3(result)
                status = "pass" if report.all_passed else "FAIL"
                text += f"verification: {status}\n"
            _emit(cfg, text)
        else:
            _emit_json(cfg, _certificate_obj(result, cfg.verify))
        return EXIT_OK
    if cfg.fmt == "human":
        lines = ["certified: no"] + [f"  - {r}" for r in result.reasons]
        _emit(cfg, "\n".join(lines) + "\n")
    else:
        _emit_json(cfg, _not_certified_obj(result))
    return EXIT_BUDGET if result.orbit_truncated else EXIT_NEGATIVE


def _table_obj(report: TableReport) -> dict:
    return {
        "n": report.n,
        "d": report.d,
        "total": report.total,
        "certified": report.certified,
        "all_certified": report.all_certified,
        "complete": report.complete,
        "methods": {name: count for name, count in report.methods},
        "uncertified": [_not_certified_obj(res) for res in report.uncertified],
    }


def cmd_enumerate(args: argparse.Namespace) -> int:
    cfg = _config(args)
    reports = []
    for d in _parse_range(args.d):
        reports.append(
            exhaustive_table(
                args.n,
                d,
                budget=cfg.budget_graphs,
                orbit_cap=cfg.budget_orbit,
                workers=cfg.workers,
            )
        )
    if cfg.fmt == "json":
        _emit_json(cfg, [_table_obj(r) for r in reports])
    else:
        rows = [["n", "d", "total", "certified", "methods", "complete"]]
        for r in reports:
            rows.append(
                [
                    str(r.n),
                    str(r.d),
                    str(r.total),
                    str(r.certified),
                    ",".join(f"{k}:{v}" for k, v in r.methods) or "-",
                    "yes" if r.complete else "no",
                ]
            )
        sep = "\t" if cfg.fmt == "tsv" else "  "
        _emit(cfg, "\n".join(sep.join(row) for row in rows) + "\n")
    if any(not r.complete for r in reports):
        return EXIT_BUDGET
    if any(r.certified < r.total for r in reports):
        return EXIT_NEGATIVE
    return EXIT_OK


def cmd_ghz_bound(args: argparse.Namespace) -> int:
    cfg = _config(args)
    reports = [bound_report(d) for d in _parse_range(args.d)]
    if cfg.fmt == "json":
        objs = []
        for r in reports:
            obj: dict = {"d": r.d, "bound_closed_form": r.bound_closed_form}
            if r.bound_prime is not None:
                obj["bound_prime"] = r.bound_prime
            if r.bound_numeric is not None:
                obj["bound_numeric"] = r.bound_numeric
                obj["constraints_active"] = list(r.constraints_active)
                obj["solver_trace"] = [
                    {"f": f, "feasible": ok, "cells": cells}
                    for f, ok, cells in r.solver_trace
                ]
            objs.append(obj)
        _emit_json(cfg, objs)
    else:
        rows = [["d", "closed_form", "prime", "numeric"]]
        for r in reports:
            rows.append(
                [
                    str(r.d),
                    _fmt6(r.bound_closed_form),
                    _fmt6(r.bound_prime) if r.bound_prime is not None else "-",
                    _fmt6(r.bound_numeric) if r.bound_numeric is not None else "-",
                ]
            )
        sep = "\t" if cfg.fmt == "tsv" else "  "
        _emit(cfg, "\n".join(sep.join(row) for row in rows) + "\n")
    return EXIT_OK


def cmd_orbit(args: argparse.Namespace) -> int:
    cfg = _config(args)
    graph = _load_graph(args)
    result = lc_orbit(graph, cap=cfg.budget_orbit)
    if cfg.fmt == "json":
        obj = {
            "size": result.size,
            "truncated": result.truncated,
            "members": [
                {
                    "graph": g.to_json_obj(),
                    "path": list(path),
                }
                for g, path in zip(result.graphs, result.paths)
            ],
        }
        _emit_json(cfg, obj)
    else:
        lines = [f"orbit size: {result.size} (truncated: {result.truncated})"]
        for g, path in zip(result.graphs, result.paths):
            edge_text = " ".join(f"{i}-{j}:{m}" for i, j, m in _graph_edges(g)) or "(none)"
            lines.append(f"  path {list(path)}: {edge_text}")
        _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_BUDGET if result.truncated else EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = _config(args)
    if args.input is None:
        raise NetcertError("provide a certificate file via --input")
    text = Path(args.input).read_text()
    obj = json.loads(text)
    if "certificate" in obj:
        obj = obj["certificate"]
    cert = certificate_from_json(json.dumps(obj))
    report = verify_obs3(cert)
    if cfg.fmt == "human":
        lines = [
            f"{'pass' if c.passed else 'FAIL'}  {c.name}"
            + (f"  ({c.detail})" if c.detail else "")
            for c in report.checks
        ]
        lines.append("all passed" if report.all_passed else "VERIFICATION FAILED")
        _emit(cfg, "\n".join(lines) + "\n")
    else:
        _emit_json(
            cfg,
            {
                "all_passed": report.all_passed,
                "checks": [
                    {"name": c.name, "passed": c.passed, "detail": c.detail}
                    for c in report.checks
                ],
            },
        )
    return EXIT_OK if report.all_passed else EXIT_NEGATIVE


def cmd_selftest(args: argparse.Namespace) -> int:
    cfg = _config(args)
    from .errors import PropertyViolation
    from .oracle import ALL_LEMMA_CHECKS

    results = []
    failed = False
    for check in ALL_LEMMA_CHECKS:
        try:
            report = check(cfg.trials, seed=cfg.seed)
            results.append(
                {
                    "name": report.name,
                    "trials": report.trials,
                    "violations": report.violations,
                    "extremal_slack": report.extremal_slack,
                    "branch_counts": dict(report.branch_counts),
                }
            )
        except PropertyViolation as exc:
            failed = True
            results.append({"name": check.__name__, "violation": str(exc)})
    if cfg.fmt == "human":
        lines = []
        for r in results:
            if "violation" in r:
                lines.append(f"FAIL  {r['name']}: {r['violation']}")
            else:
                lines.append(
                    f"pass  {r['name']}: {r['trials']} trials, "
                    f"min slack {_fmt6(r['extremal_slack'])}"
                )
        _emit(cfg, "\n".join(lines) + "\n")
    else:
        _emit_json(cfg, results)
    return EXIT_NEGATIVE if failed else EXIT_OK


def _add_graph_arguments(p: argparse.ArgumentParser) -> None:
    p.add_argument("--inline", help="graph text: 'd n; i j m; ...'")
    p.add_argument("--input", help="graph file (text or JSON)")


def _add_common_arguments(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=FORMATS, default="json")
    p.add_argument("--output", help="write to a file instead of stdout")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netcert",
        description="Certify that graph states cannot arise from bipartite sources.",
    )
    parser.add_argument("--version", action="version", version=f"netcert {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="certify one multigraph")
    _add_graph_arguments(p)
    p.add_argument("--budget-orbit", type=int, default=DEFAULT_ORBIT_CAP)
    p.add_argument("--verify", action="store_true", help="re-verify the certificate")
    _add_common_arguments(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("enumerate", help="certify every class of one size")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", required=True, help="dimension or range 'a..b'")
    p.add_argument("--budget-graphs", type=int, default=DEFAULT_ENUMERATION_BUDGET)
    p.add_argument("--budget-orbit", type=int, default=4096)
    p.add_argument("--workers", type=int, default=1)
    _add_common_arguments(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("ghz-bound", help="GHZ fidelity ceilings")
    p.add_argument("--d", required=True, help="dimension or range 'a..b'")
    _add_common_arguments(p)
    p.set_defaults(func=cmd_ghz_bound)

    p = sub.add_parser("orbit", help="local-complementation orbit of a graph")
    _add_graph_arguments(p)
    p.add_argument("--budget-orbit", type=int, default=DEFAULT_ORBIT_CAP)
    _add_common_arguments(p)
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("verify", help="re-verify a stored certificate")
    p.add_argument("--input", help="certificate JSON file")
    _add_common_arguments(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("selftest", help="randomized operator-inequality suites")
    p.add_argument("--trials", type=int, default=1000)
    _add_common_arguments(p)
    p.set_defaults(func=cmd_selftest)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    func: Callable[[argparse.Namespace], int] = args.func
    try:
        return func(args)
    except NetcertError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main(None))
