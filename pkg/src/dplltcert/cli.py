"""Command-line interface: solve, certify, check, translate, replay."""
from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import dpll, lkdpll, lkt, sim1, sim2
from .formats import (FormatError, Problem, format_trace, parse_problem, parse_trace,
                      read_certificate, write_certificate)
from .theory import Theory, make_theory

EXIT_SAT = 10
EXIT_UNSAT = 20
EXIT_ERROR = 1


class CliError(Exception):
    pass


def _load_problem(path: str) -> Problem:
    try:
        return parse_problem(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror}") from None
    except FormatError as e:
        raise CliError(f"{path}: {e}") from None


def _theory(kind: str, problem: Problem) -> tuple[str, Theory]:
    if kind == "auto":
        kind = "eq" if problem.has_theory_atoms else "empty"
    return kind, make_theory(kind, problem.table)


def _strategy(args):
    if args.strategy == "learning":
        return dpll.LearningStrategy(restarts=args.restarts, budget=args.lemma_budget)
    if args.seed is not None:
        rng = random.Random(args.seed)
        return lambda state, theory: dpll.default_strategy_next(state, theory, rng)
    return None


def _solve(args, problem: Problem, theory: Theory) -> dpll.RunResult:
    return dpll.run(problem.clauses, theory, step_limit=args.step_limit,
                    strategy=_strategy(args), lemma_budget=args.lemma_budget)


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise CliError(f"cannot write {path}: {e.strerror}") from None


def _write_sizes(path: str, records: list[dict]) -> None:
    _write(path, "".join(json.dumps(r, sort_keys=True) + "\n" for r in records))


def cmd_solve(args) -> int:
    problem = _load_problem(args.file)
    _, theory = _theory(args.theory, problem)
    result = _solve(args, problem, theory)
    if args.trace:
        _write(args.trace, format_trace(result.trace))
    if result.status == "SAT":
        print("SAT")
        print("v " + " ".join(str(l) for l in sorted(result.model)) + " 0")
        return EXIT_SAT
    if result.status == "UNSAT":
        print("UNSAT")
        return EXIT_UNSAT
    print(f"UNKNOWN (step limit {args.step_limit} reached)")
    return 0


def _translate(tree: lkdpll.Proof, problem: Problem, theory: Theory) -> sim2.Translation:
    clean = lkdpll.eliminate_admissible(tree, theory, allow_cut=True)
    return sim2.translate_proof(clean, problem.clauses, theory)


def _translation_sizes(tr: sim2.Translation) -> list[dict]:
    return [{"rule": r.rule, "emitted": r.emitted, "formula_count": r.formula_count,
             "symbol_size": r.symbol_size, "bound": r.bound, "ok": r.ok} for r in tr.log]


def cmd_certify(args) -> int:
    problem = _load_problem(args.file)
    name, theory = _theory(args.theory, problem)
    if args.trace:
        try:
            trace = parse_trace(Path(args.trace).read_text(encoding="utf-8"))
        except OSError as e:
            raise CliError(f"cannot read {args.trace}: {e.strerror}") from None
        except FormatError as e:
            raise CliError(f"{args.trace}: {e}") from None
    else:
        result = _solve(args, problem, theory)
        if result.status != "UNSAT":
            raise CliError(f"problem is {result.status}; only UNSAT answers are certified")
        trace = result.trace
    try:
        session = sim1.certify_unsat_session(problem.clauses, trace, theory, args.lemma_budget)
    except dpll.SideConditionViolated as e:
        raise CliError(f"trace rejected: {e}") from None
    tree = session.tree
    _write(args.out, write_certificate(tree, problem, name))
    _write_sizes(args.out + ".sizes.jsonl",
                 [{"step": r.step_index, "rule": r.rule, "delta": r.delta, "bound": r.bound,
                   "phi_size": r.phi_size, "ok": r.ok} for r in session.log])
    bad = [r for r in session.log if not r.ok]
    print(f"LKDPLL certificate: {lkdpll.tree_size(tree)} counted nodes, "
          f"{len(trace)} steps, {len(bad)} step-bound violations")
    if args.lkt:
        tr = _translate(tree, problem, theory)
        _write(args.lkt, write_certificate(tr.proof, problem, name))
        _write_sizes(args.lkt + ".sizes.jsonl", _translation_sizes(tr))
        nbad = sum(not r.ok for r in tr.log)
        print(f"LKT certificate: {lkt.lkt_tree_size(tr.proof)} counted nodes, "
              f"{len(tr.log)} translated inferences, {nbad} translation-bound violations")
    return 0


def _read_cert(path: str, problem: Problem):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror}") from None
    except UnicodeDecodeError:
        raise CliError(f"{path}: not a UTF-8 text file") from None
    try:
        return text, read_certificate(text, problem)
    except FormatError as e:
        raise CliError(f"{path}: {e}") from None


def cmd_check(args) -> int:
    problem = _load_problem(args.problem)
    text, cert = _read_cert(args.cert, problem)
    if cert.theory not in ("empty", "eq"):
        raise CliError(f"unknown theory {cert.theory!r} in certificate")
    theory = make_theory(cert.theory, problem.table)
    if args.strict:
        theory = theory.fresh()
        if write_certificate(cert.tree, problem, cert.theory) != text:
            raise CliError("certificate is not in canonical form")
    if cert.calculus == "LKDPLL":
        why = lkdpll.tree_violation(cert.tree, theory, lkdpll.ALL_RULES, complete=True)
        size = lkdpll.tree_size(cert.tree)
    else:
        why = lkt.lkt_tree_violation(cert.tree, theory, complete=True)
        size = lkt.lkt_tree_size(cert.tree)
    if why is not None:
        print(f"REJECTED: {why}")
        return EXIT_ERROR
    print(f"ACCEPTED {cert.calculus} proof, {size} counted nodes")
    return 0


def cmd_translate(args) -> int:
    problem = _load_problem(args.problem)
    _, cert = _read_cert(args.cert, problem)
    if cert.calculus != "LKDPLL":
        raise CliError("translate expects an LKDPLL certificate")
    theory = make_theory(cert.theory, problem.table)
    why = lkdpll.tree_violation(cert.tree, theory, lkdpll.ALL_RULES, complete=True)
    if why is not None:
        raise CliError(f"input certificate rejected: {why}")
    tr = _translate(cert.tree, problem, theory)
    _write(args.out, write_certificate(tr.proof, problem, cert.theory))
    _write_sizes(args.out + ".sizes.jsonl", _translation_sizes(tr))
    nbad = sum(not r.ok for r in tr.log)
    print(f"LKT certificate: {lkt.lkt_tree_size(tr.proof)} counted nodes, "
          f"{nbad} translation-bound violations")
    return 0


def cmd_replay(args) -> int:
    problem = _load_problem(args.file)
    _, theory = _theory(args.theory, problem)
    try:
        trace = parse_trace(Path(args.trace).read_text(encoding="utf-8"))
    except OSError as e:
        raise CliError(f"cannot read {args.trace}: {e.strerror}") from None
    except FormatError as e:
        raise CliError(f"{args.trace}: {e}") from None
    try:
        state = dpll.replay(problem.clauses, trace, theory, args.lemma_budget)
    except dpll.SideConditionViolated as e:
        print(f"REJECTED at step {e.index}: {e}")
        return EXIT_ERROR
    print(f"replayed {len(trace)} steps: {state}")
    return EXIT_UNSAT if state is dpll.UNSAT else 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--theory", choices=("auto", "empty", "eq"), default="auto",
                        help="background theory (auto: eq when the problem declares theory atoms)")
    common.add_argument("--step-limit", type=int, default=100_000)
    common.add_argument("--lemma-budget", type=int, default=dpll.DEFAULT_LEMMA_BUDGET,
                        help="step budget for certifying learned or backjump clauses")
    common.add_argument("--seed", type=int, default=None,
                        help="draw the phase of decisions at random from this seed")
    common.add_argument("--strategy", choices=("basic", "learning"), default="basic")
    common.add_argument("--restarts", type=int, default=1,
                        help="restarts allowed by the learning strategy")

    p = argparse.ArgumentParser(prog="dplltcert", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", parents=[common], help="decide a problem")
    s.add_argument("file")
    s.add_argument("--trace", help="write the DPLL(T) step trace here")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("certify", parents=[common], help="write proof certificates for UNSAT")
    s.add_argument("file")
    s.add_argument("--out", required=True, help="LKDPLL certificate path")
    s.add_argument("--lkt", help="also write the translated LK(T)p certificate here")
    s.add_argument("--trace", help="certify this trace instead of solving")
    s.set_defaults(func=cmd_certify)

    s = sub.add_parser("check", parents=[common], help="check a certificate")
    s.add_argument("cert")
    s.add_argument("--problem", required=True)
    s.add_argument("--strict", action="store_true",
                   help="uncached theory calls and canonical-form check")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("translate", parents=[common], help="LKDPLL certificate to LK(T)p")
    s.add_argument("cert")
    s.add_argument("--problem", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_translate)

    s = sub.add_parser("replay", parents=[common], help="validate a step trace")
    s.add_argument("file")
    s.add_argument("trace")
    s.set_defaults(func=cmd_replay)
    return p


def run_command(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except (sim1.SimulationError, lkdpll.EliminationError, sim2.CorrespondenceViolation,
            dpll.StrategyStuck) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run_command())
