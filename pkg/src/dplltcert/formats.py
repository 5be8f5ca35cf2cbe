"""Plain-text formats: problems, DPLL traces and proof certificates.

Problem::

    p cnft <natoms> <nclauses>
    a <id> eq|neq <c1> <c2>      # optional theory payload for an atom
    1 -2 0                       # clauses, signed atom ids, 0-terminated

Certificate::

    lkcert 1
    calculus LKDPLL|LKT
    theory empty|eq
    problem <sha256>
    nodes <n>
    <rule> <params> | <children> | <digest>     (pre-order, one per node)
    end

The digest of a node is a hash of the sequent it concludes.  Sequents are
never written; the reader re-derives them from the problem and the rule
parameters and compares digests.
"""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from typing import Callable, Optional

from . import dpll
from . import lkdpll as lkd
from . import lkt
from .core import Clause, ClauseSet, Literal
from .lkdpll import Proof, Sequent
from .lkt import LktProof
from .sim2 import initial_correspondence
from .theory import EqAtom


class FormatError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


# -- problems ---------------------------------------------------------------

@dataclass(frozen=True)
class Problem:
    clauses: ClauseSet
    table: dict
    natoms: int

    @property
    def has_theory_atoms(self) -> bool:
        return any(v is not None for v in self.table.values())

    def digest(self) -> str:
        h = hashlib.sha256()
        for k in sorted(self.table):
            h.update(f"a {k} {self.table[k]}\n".encode())
        for c in self.clauses.sorted():
            h.update((" ".join(str(l) for l in c) + " 0\n").encode())
        return h.hexdigest()


def parse_problem(text: str) -> Problem:
    header = None
    table: dict[int, Optional[EqAtom]] = {}
    clauses: list[Clause] = []
    pending: list[Literal] = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if toks[0] == "p":
            if header is not None:
                raise FormatError("second header", no)
            if len(toks) != 4 or toks[1] != "cnft":
                raise FormatError("header must be 'p cnft <natoms> <nclauses>'", no)
            try:
                header = (int(toks[2]), int(toks[3]))
            except ValueError:
                raise FormatError("non-integer in header", no) from None
            continue
        if header is None:
            raise FormatError("missing 'p cnft' header", no)
        if toks[0] == "a":
            if len(toks) != 5 or toks[2] not in ("eq", "neq"):
                raise FormatError("atom line must be 'a <id> eq|neq <c1> <c2>'", no)
            try:
                aid = int(toks[1])
            except ValueError:
                raise FormatError(f"bad atom id {toks[1]!r}", no) from None
            if not 1 <= aid <= header[0]:
                raise FormatError(f"atom {aid} outside 1..{header[0]}", no)
            if aid in table:
                raise FormatError(f"atom {aid} declared twice", no)
            table[aid] = EqAtom(toks[3], toks[4], toks[2] == "eq")
            continue
        for tok in toks:
            try:
                n = int(tok)
            except ValueError:
                raise FormatError(f"bad literal {tok!r}", no) from None
            if n == 0:
                if not pending:
                    raise FormatError("empty clause; such a problem is trivially "
                                      "unsatisfiable and needs no certificate", no)
                clauses.append(Clause(pending))
                pending = []
                continue
            if abs(n) > header[0]:
                raise FormatError(f"atom {abs(n)} outside 1..{header[0]}", no)
            pending.append(Literal.from_int(n))
    if header is None:
        raise FormatError("missing 'p cnft' header")
    if pending:
        raise FormatError("last clause not terminated by 0")
    if len(clauses) != header[1]:
        raise FormatError(f"header announces {header[1]} clauses, found {len(clauses)}")
    for c in clauses:
        for l in c:
            table.setdefault(l.atom, None)
    return Problem(ClauseSet(clauses), table, header[0])


def format_problem(phi: ClauseSet, table: Optional[dict] = None) -> str:
    table = table or {}
    natoms = max([l.atom for c in phi for l in c] + [a for a in table] + [0])
    out = [f"p cnft {natoms} {len(phi)}"]
    for a in sorted(table):
        v = table[a]
        if v is not None:
            out.append(f"a {a} {'eq' if v.equal else 'neq'} {v.left} {v.right}")
    out += [" ".join(str(l) for l in c) + " 0" for c in phi]
    return "\n".join(out) + "\n"


# -- tokens -----------------------------------------------------------------

_TOKEN = re.compile(r"\(|\)|\[|\]|\{|\}|[^\s()\[\]{}]+")


def _lit(tok: str) -> Literal:
    try:
        return Literal.from_int(int(tok))
    except ValueError:
        raise FormatError(f"bad literal {tok!r}") from None


def _lits_between(toks: list[str], i: int, open_: str, close: str) -> tuple[list[Literal], int]:
    if i >= len(toks) or toks[i] != open_:
        raise FormatError(f"expected {open_!r}")
    out = []
    i += 1
    while i < len(toks) and toks[i] != close:
        out.append(_lit(toks[i]))
        i += 1
    if i >= len(toks):
        raise FormatError(f"missing {close!r}")
    return out, i + 1


def fmt_clause(c: Clause) -> str:
    return "[" + " ".join(str(l) for l in c) + "]"


def fmt_litset(s) -> str:
    return "{" + " ".join(str(l) for l in sorted(s)) + "}"


def fmt_litlist(s) -> str:
    return "(" + " ".join(str(l) for l in s) + ")"


# -- traces -----------------------------------------------------------------

def format_trace(trace) -> str:
    return "".join(f"{s}\n" for s in trace)


def parse_step(line: str) -> dpll.Step:
    toks = _TOKEN.findall(line)
    if not toks:
        raise FormatError("empty step")
    op, args = toks[0], toks[1:]
    try:
        if op == "fail" and len(args) == 1:
            return dpll.Fail(int(args[0]))
        if op == "backtrack" and len(args) == 1:
            return dpll.Backtrack(int(args[0]))
        if op == "decide" and len(args) == 1:
            return dpll.Decide(_lit(args[0]))
        if op == "unit" and len(args) == 2:
            return dpll.UnitPropagate(int(args[0]), _lit(args[1]))
        if op == "tprop" and len(args) == 1:
            return dpll.TheoryPropagate(_lit(args[0]))
        if op == "backjump":
            idx = int(args[0])
            cp, j = _lits_between(args, 1, "[", "]")
            rest = args[j:]
            if len(rest) not in (1, 2):
                raise FormatError(f"malformed backjump {line!r}")
            level = int(rest[1]) if len(rest) == 2 else None
            return dpll.TBackjump(idx, Clause(cp), _lit(rest[0]), level)
        if op == "learn":
            c, j = _lits_between(args, 0, "[", "]")
            if j != len(args):
                raise FormatError(f"trailing tokens in {line!r}")
            return dpll.TLearn(Clause(c))
        if op == "forget" and len(args) == 1:
            return dpll.TForget(int(args[0]))
        if op == "restart" and not args:
            return dpll.Restart()
    except (ValueError, IndexError) as e:
        if isinstance(e, FormatError):
            raise
        raise FormatError(f"malformed step {line!r}") from None
    raise FormatError(f"unknown step {line!r}")


def parse_trace(text: str) -> list[dpll.Step]:
    steps = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            steps.append(parse_step(line))
        except FormatError as e:
            raise FormatError(str(e), no) from None
    return steps


# -- formulae ---------------------------------------------------------------

_CONNECTIVES = {"&+": lkt.AndP, "|+": lkt.OrP, "&-": lkt.AndN, "|-": lkt.OrN}
_SYMBOL = {v: k for k, v in _CONNECTIVES.items()}


def fmt_formula(f: lkt.Formula) -> str:
    if isinstance(f, lkt.Lit):
        return str(f.lit)
    if isinstance(f, lkt.TopP):
        return "T+"
    if isinstance(f, lkt.BotN):
        return "F-"
    return f"({_SYMBOL[type(f)]} {fmt_formula(f.left)} {fmt_formula(f.right)})"


def _parse_formula(toks: list[str], i: int) -> tuple[lkt.Formula, int]:
    if i >= len(toks):
        raise FormatError("truncated formula")
    t = toks[i]
    if t == "T+":
        return lkt.TopP(), i + 1
    if t == "F-":
        return lkt.BotN(), i + 1
    if t == "(":
        if i + 1 >= len(toks) or toks[i + 1] not in _CONNECTIVES:
            raise FormatError("expected a connective after '('")
        cls = _CONNECTIVES[toks[i + 1]]
        a, j = _parse_formula(toks, i + 2)
        b, j = _parse_formula(toks, j)
        if j >= len(toks) or toks[j] != ")":
            raise FormatError("missing ')' in formula")
        return cls(a, b), j + 1
    return lkt.Lit(_lit(t)), i + 1


def parse_formula(text: str) -> lkt.Formula:
    toks = _TOKEN.findall(text)
    f, j = _parse_formula(toks, 0)
    if j != len(toks):
        raise FormatError(f"trailing tokens in formula {text!r}")
    return f


# -- rules ------------------------------------------------------------------

def fmt_lkd_rule(r: lkd.Rule) -> str:
    if isinstance(r, lkd.Split):
        return f"split {r.lit}"
    if isinstance(r, lkd.Empty):
        return "empty"
    if isinstance(r, lkd.Assert):
        return f"assert {r.lit}"
    if isinstance(r, lkd.Subsume):
        return f"subsume {r.lit} {fmt_clause(r.rest)}"
    if isinstance(r, lkd.Resolve):
        return f"resolve {r.lit} {fmt_clause(r.rest)}"
    if isinstance(r, lkd.InvResolve):
        return f"invresolve {r.lit} {fmt_clause(r.rest)}"
    if isinstance(r, lkd.Weak1):
        return f"weak1 {fmt_clause(r.clause)}"
    if isinstance(r, lkd.Weak2):
        return f"weak2 {fmt_litset(r.source)}"
    if isinstance(r, lkd.Cut):
        return f"cut {fmt_litlist(r.lits)}"
    raise TypeError(r)


def parse_lkd_rule(text: str) -> Optional[lkd.Rule]:
    toks = _TOKEN.findall(text)
    if not toks:
        raise FormatError("missing rule")
    op, a = toks[0], toks[1:]

    def done(j: int) -> None:
        if j != len(a):
            raise FormatError(f"trailing tokens in {text!r}")

    if op == "open":
        done(0)
        return None
    if op == "empty":
        done(0)
        return lkd.Empty()
    if op in ("split", "assert"):
        done(1)
        return (lkd.Split if op == "split" else lkd.Assert)(_lit(a[0]))
    if op in ("subsume", "resolve", "invresolve"):
        if not a:
            raise FormatError(f"{op} needs a literal")
        rest, j = _lits_between(a, 1, "[", "]")
        done(j)
        cls = {"subsume": lkd.Subsume, "resolve": lkd.Resolve, "invresolve": lkd.InvResolve}[op]
        return cls(_lit(a[0]), Clause(rest))
    if op == "weak1":
        c, j = _lits_between(a, 0, "[", "]")
        done(j)
        return lkd.Weak1(Clause(c))
    if op == "weak2":
        s, j = _lits_between(a, 0, "{", "}")
        done(j)
        return lkd.Weak2(frozenset(s))
    if op == "cut":
        s, j = _lits_between(a, 0, "(", ")")
        done(j)
        return lkd.Cut(tuple(s))
    raise FormatError(f"unknown rule {op!r}")


def fmt_lkt_rule(r: lkt.LktRule) -> str:
    name = lkt.rule_name(r)
    if isinstance(r, lkt.OrPRule):
        return f"{name} {r.index}"
    if isinstance(r, lkt.Polarize):
        return f"{name} {r.lit}" + (" o" if r.from_o else "")
    if isinstance(r, lkt.Decide):
        return f"{name} {fmt_formula(r.focus)}"
    if isinstance(r, lkt.AnalyticCut):
        return f"{name} {r.lit}"
    if isinstance(r, lkt.GeneralCut):
        return f"{name} {fmt_litlist(r.lits)}"
    return name


_LKT_NULLARY = {name: cls for cls, name in lkt.RULE_NAMES.items()
                if cls not in (lkt.OrPRule, lkt.Polarize, lkt.Decide,
                               lkt.AnalyticCut, lkt.GeneralCut)}


def parse_lkt_rule(text: str) -> Optional[lkt.LktRule]:
    toks = _TOKEN.findall(text)
    if not toks:
        raise FormatError("missing rule")
    op, a = toks[0], toks[1:]
    if op == "open" and not a:
        return None
    if op in _LKT_NULLARY and not a:
        return _LKT_NULLARY[op]()
    if op == "or+" and len(a) == 1 and a[0] in ("0", "1"):
        return lkt.OrPRule(int(a[0]))
    if op == "pol" and len(a) in (1, 2) and (len(a) == 1 or a[1] == "o"):
        return lkt.Polarize(_lit(a[0]), len(a) == 2)
    if op == "acut" and len(a) == 1:
        return lkt.AnalyticCut(_lit(a[0]))
    if op == "decide" and a:
        f, j = _parse_formula(a, 0)
        if j == len(a):
            return lkt.Decide(f)
    if op == "gcut":
        s, j = _lits_between(a, 0, "(", ")")
        if j == len(a):
            return lkt.GeneralCut(tuple(s))
    raise FormatError(f"malformed rule {text!r}")


# -- sequent digests --------------------------------------------------------

def _digest(s: str) -> str:
    return hashlib.sha256(s.encode()).hexdigest()[:16]


def lkd_sequent_key(s: Sequent) -> str:
    ctx = " ".join(str(l) for l in sorted(s.context))
    goal = ";".join(" ".join(str(l) for l in c) for c in s.goal.sorted())
    return f"{ctx}|{goal}"


def lkt_sequent_key(s: lkt.LktSequent) -> str:
    gamma = ";".join(sorted(fmt_formula(f) for f in s.gamma))
    pol = " ".join(str(l) for l in sorted(s.pol))
    if isinstance(s, lkt.Focused):
        return f"F|{gamma}|{fmt_formula(s.focus)}|{pol}"
    delta = ";".join(fmt_formula(f) for f in s.delta)
    o = " ".join(str(l) for l in s.o)
    return f"U|{gamma}|{delta}|{o}|{pol}"


# -- certificates -----------------------------------------------------------

@dataclass(frozen=True)
class _Calculus:
    tag: str
    fmt_rule: Callable
    parse_rule: Callable
    premises_of: Callable
    key: Callable
    node: Callable


LKDPLL = _Calculus("LKDPLL", fmt_lkd_rule, parse_lkd_rule, lkd.premises_of,
                   lkd_sequent_key, Proof)
LKT = _Calculus("LKT", fmt_lkt_rule, parse_lkt_rule, lkt.lkt_premises_of,
                lkt_sequent_key, LktProof)


def lkd_root(phi: ClauseSet) -> Sequent:
    return Sequent(frozenset(), phi)


def lkt_root(phi: ClauseSet) -> lkt.Unfocused:
    return initial_correspondence(phi).target


def write_certificate(tree, problem: Problem, theory_name: str) -> str:
    cal = LKT if isinstance(tree, LktProof) else LKDPLL
    nodes = list(tree)
    lines = ["lkcert 1", f"calculus {cal.tag}", f"theory {theory_name}",
             f"problem {problem.digest()}", f"nodes {len(nodes)}"]
    for n in nodes:
        rule = "open" if n.rule is None else cal.fmt_rule(n.rule)
        lines.append(f"{rule} | {len(n.premises)} | {_digest(cal.key(n.sequent))}")
    lines.append("end")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Certificate:
    calculus: str
    theory: str
    problem_digest: str
    tree: object


def read_certificate(text: str, problem: Problem) -> Certificate:
    """Parse and rebuild a certificate against ``problem``.

    Rebuilding checks that each rule fits the shape of its re-derived
    conclusion and that every recorded digest matches; side conditions are
    left to the proof checker.
    """
    lines = [l.strip() for l in text.splitlines()]
    lines = [l for l in lines if l and not l.startswith("#")]
    head = {}
    for i, key in enumerate(("lkcert", "calculus", "theory", "problem", "nodes")):
        if i >= len(lines) or not lines[i].startswith(key + " "):
            raise FormatError(f"missing '{key}' header line")
        head[key] = lines[i].split(None, 1)[1].strip()
    if head["lkcert"] != "1":
        raise FormatError(f"unsupported certificate version {head['lkcert']}")
    cal = {"LKDPLL": LKDPLL, "LKT": LKT}.get(head["calculus"])
    if cal is None:
        raise FormatError(f"unknown calculus {head['calculus']!r}")
    if head["problem"] != problem.digest():
        raise FormatError("certificate is for a different problem")
    try:
        n = int(head["nodes"])
    except ValueError:
        raise FormatError("bad node count") from None
    body = lines[5:]
    if len(body) != n + 1 or body[-1] != "end":
        raise FormatError(f"expected {n} node records and 'end', file is truncated or padded")
    records = []
    for k, rec in enumerate(body[:-1]):
        parts = [p.strip() for p in rec.split("|")]
        if len(parts) != 3:
            raise FormatError(f"node record {k} malformed: {rec!r}")
        try:
            rule = cal.parse_rule(parts[0])
            kids = int(parts[1])
        except (FormatError, ValueError) as e:
            raise FormatError(f"node record {k}: {e}") from None
        records.append((rule, kids, parts[2]))

    root = lkd_root(problem.clauses) if cal is LKDPLL else lkt_root(problem.clauses)
    pos = 0

    def build(seq):
        nonlocal pos
        if pos >= len(records):
            raise FormatError("fewer node records than the tree needs")
        k = pos
        rule, kids, dig = records[k]
        pos += 1
        if dig != _digest(cal.key(seq)):
            raise FormatError(f"node record {k}: digest mismatch")
        if rule is None:
            if kids:
                raise FormatError(f"node record {k}: open leaf with children")
            return cal.node(seq)
        try:
            prem = cal.premises_of(seq, rule)
        except (ValueError, TypeError) as e:
            raise FormatError(f"node record {k}: {e}") from None
        if len(prem) != kids:
            raise FormatError(f"node record {k}: {kids} children recorded, rule has {len(prem)}")
        return cal.node(seq, rule, tuple(build(p) for p in prem))

    lkd._recursion_headroom()
    tree = build(root)
    if pos != len(records):
        raise FormatError("more node records than the tree uses")
    return Certificate(cal.tag, head["theory"], head["problem"], tree)
