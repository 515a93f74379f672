"""Command-line interface.

Exit status: 0 when the formula holds / the model is valid / an equilibrium
exists / a fuzz run is clean, 1 when it does not, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .checker import Checker, VocabularyError, check_vocabulary
from .dynamics import RewriteBudgetError, apply_op, reduce
from .games import MODES, GameError, game_report
from .genfuzz import SUITES, GenSpec, fuzz_validities, replay_failure
from .model import ModelError, UnknownAgentError, dumps_model, load_model, model_to_dict, validate_model
from .syntax import OP_KEYWORDS, DynamicOperatorError, ParseError, RevisionOp, has_dynamic, parse_formula, render

OUTPUT_VERSION = 1


class UsageError(Exception):
    pass


def _emit(args, obj: dict, text: str) -> None:
    if args.json:
        print(json.dumps({"version": OUTPUT_VERSION, **obj}, sort_keys=True))
    else:
        print(text)


def _model(args):
    if not args.model:
        raise UsageError("--model is required")
    return load_model(args.model)


def _formula_text(args) -> str:
    if args.formula is not None and args.formula_file is not None:
        raise UsageError("give either --formula or --formula-file, not both")
    if args.formula_file is not None:
        return Path(args.formula_file).read_text(encoding="utf-8").strip()
    if args.formula is None:
        raise UsageError("--formula or --formula-file is required")
    return args.formula


def _formula(args, m=None):
    f = parse_formula(_formula_text(args), core_only=args.core_only)
    if m is not None:
        check_vocabulary(m, f)
    return f


def _worlds(args, m) -> list:
    if args.world is None:
        return list(m.world_ids)
    if args.world not in m.index:
        raise UsageError(f"unknown world {args.world!r}")
    return [args.world]


# ---------------------------------------------------------------- commands


def cmd_check(args) -> int:
    m = _model(args)
    f = _formula(args, m)
    chk = Checker(m, dynamic=has_dynamic(f))
    mask = chk.truth(f)
    ok = True
    for w in _worlds(args, m):
        holds = bool(mask >> m.index[w] & 1)
        ok &= holds
        _emit(args, {"world": w, "holds": holds}, f"{w}\t{'true' if holds else 'false'}")
    return 0 if ok else 1


def cmd_truthset(args) -> int:
    m = _model(args)
    f = _formula(args, m)
    mask = Checker(m, dynamic=has_dynamic(f)).truth(f)
    if args.agent is not None:
        if args.world is None:
            raise UsageError("--agent needs --world")
        if args.agent not in m.agents:
            raise UsageError(f"unknown agent {args.agent!r}")
        _worlds(args, m)
        mask &= m.cell_of(args.agent)[m.index[args.world]]
    ws = [w for w in m.world_ids if mask >> m.index[w] & 1]
    _emit(args, {"worlds": ws}, "{" + ", ".join(ws) + "}")
    return 0


def cmd_validate(args) -> int:
    m = _model(args)
    rep = validate_model(m)
    if args.json:
        for v in rep.violations:
            _emit(args, {"constraint": v.constraint, "message": v.message, "worlds": list(v.worlds),
                         "agent": v.agent}, "")
        _emit(args, {"ok": rep.ok, "violations": len(rep.violations)}, "")
    else:
        for v in rep.violations:
            print(f"{v.constraint}: {v.message}")
        print("valid" if rep.ok else f"{len(rep.violations)} violation(s)")
    return 0 if rep.ok else 1


def cmd_transform(args) -> int:
    m = _model(args)
    if not (args.op and args.agent and args.input is not None):
        raise UsageError("transform needs --op, --agent and --input")
    if args.agent not in m.agents:
        raise UsageError(f"unknown agent {args.agent!r}")
    flavor, dim = OP_KEYWORDS[args.op]
    phi = parse_formula(args.input, core_only=args.core_only)
    check_vocabulary(m, phi)
    res = apply_op(m, RevisionOp(flavor, dim, args.agent, phi))
    log = {"version": OUTPUT_VERSION, "agent": res.changed_agent, "dim": res.dim,
           "op": render(RevisionOp(flavor, dim, args.agent, phi)),
           "normalization_log": {c: {w: list(p) for w, p in ws.items()}
                                 for c, ws in res.normalization_log.items()}}
    if args.out:
        out = Path(args.out)
        out.write_text(dumps_model(res.model), encoding="utf-8")
        side = out.with_name(out.stem + ".log.json")
        side.write_text(json.dumps(log, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        _emit(args, {"model_file": str(out), "log_file": str(side)}, f"wrote {out} and {side}")
    elif args.json:
        _emit(args, {"model": model_to_dict(res.model), "normalization_log": log["normalization_log"]}, "")
    else:
        sys.stdout.write(dumps_model(res.model))
        print(json.dumps(log, sort_keys=True), file=sys.stderr)
    return 0


def cmd_rewrite(args) -> int:
    f = _formula(args)
    r = reduce(f)
    _emit(args, {"input": render(f), "output": render(r), "size": r.size}, render(r))
    return 0


def cmd_game(args) -> int:
    m = _model(args)
    worlds = _worlds(args, m)
    rep = game_report(m, worlds)
    modes = [args.mode] if args.mode else list(MODES)
    if args.json:
        doc = rep.to_dict()
        doc.pop("version")
        _emit(args, doc, "")
    else:
        print(rep.table())
    found = all(g["equilibria"][md] for g in rep.groups for md in modes)
    return 0 if found else 1


def cmd_fuzz(args) -> int:
    if not args.suite:
        raise UsageError(f"--suite is required; known: {', '.join(SUITES)}")
    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; known: {', '.join(SUITES)}")
    spec = GenSpec(seed=args.seed)
    cex = args.cex_dir
    if cex is None and args.out:
        cex = str(Path(args.out).with_suffix("")) + "-cex"
    rep = fuzz_validities(args.suite, args.models, spec, out_dir=cex)
    if args.out:
        Path(args.out).write_text(rep.to_json() + "\n", encoding="utf-8")
    if args.json:
        _emit(args, {k: v for k, v in rep.to_dict().items() if k != "version"}, "")
    else:
        print(f"suite {rep.suite}: {rep.models} models, {rep.checks} checks, "
              f"{rep.failure_count} failure(s) in {rep.elapsed:.2f}s")
        for f in rep.failures[:10]:
            print(f"  {f['check']} at {f['world']}: {f['formula']}"
                  + (f"  [{f['model_file']}]" if f["model_file"] else ""))
    return 0 if rep.ok else 1


def cmd_replay(args) -> int:
    if not args.report:
        raise UsageError("--report is required")
    doc = json.loads(Path(args.report).read_text(encoding="utf-8"))
    override = load_model(args.model) if args.model else None
    reproduced = 0
    for k, rec in enumerate(doc.get("failures", [])):
        if override is None and not rec.get("model_file"):
            raise UsageError(f"failure {k} has no model file; rerun fuzz with --out or pass --model")
        still = replay_failure(rec, override)
        reproduced += still
        _emit(args, {"index": k, "check": rec.get("check"), "world": rec["world"], "reproduced": still},
              f"{k}\t{rec.get('check')}\t{rec['world']}\t{'reproduced' if still else 'not reproduced'}")
    return 1 if reproduced else 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cogmodal", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="line-oriented JSON output")
    common.add_argument("--core-only", action="store_true", help="reject program sugar")
    common.add_argument("--model", metavar="PATH")
    common.add_argument("--formula", metavar="STR")
    common.add_argument("--formula-file", metavar="PATH")
    common.add_argument("--world", metavar="ID")
    common.add_argument("--out", metavar="PATH")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("check", parents=[common], help="evaluate a formula at worlds").set_defaults(fn=cmd_check)
    ts = sub.add_parser("truthset", parents=[common], help="worlds satisfying a formula")
    ts.add_argument("--agent", help="restrict to the agent's cell at --world")
    ts.set_defaults(fn=cmd_truthset)
    sub.add_parser("validate", parents=[common], help="check model constraints").set_defaults(fn=cmd_validate)
    tr = sub.add_parser("transform", parents=[common], help="revise a model")
    tr.add_argument("--op", choices=sorted(OP_KEYWORDS))
    tr.add_argument("--agent")
    tr.add_argument("--input", metavar="STR")
    tr.set_defaults(fn=cmd_transform)
    sub.add_parser("rewrite", parents=[common], help="eliminate dynamic operators").set_defaults(fn=cmd_rewrite)
    gm = sub.add_parser("game", parents=[common], help="equilibria, best responses, rationality")
    gm.add_argument("--mode", choices=MODES)
    gm.set_defaults(fn=cmd_game)
    fz = sub.add_parser("fuzz", parents=[common], help="run a fuzz suite")
    fz.add_argument("--suite")
    fz.add_argument("--models", type=int, default=500)
    fz.add_argument("--seed", type=int, default=0)
    fz.add_argument("--cex-dir", metavar="DIR", help="where counterexample models go")
    fz.set_defaults(fn=cmd_fuzz)
    rp = sub.add_parser("replay", parents=[common], help="rerun failures from a fuzz report")
    rp.add_argument("--report", metavar="PATH")
    rp.set_defaults(fn=cmd_replay)
    return p


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.fn(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
    except (UsageError, ModelError, VocabularyError, UnknownAgentError, GameError,
            DynamicOperatorError, RewriteBudgetError, OSError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
    return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
