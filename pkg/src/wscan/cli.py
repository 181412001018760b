"""Command line: ``wscan {scan,wscan,enumerate,verify,bench}``.

Exit codes: 0 success or verified, 1 counterexample, 2 a limit was hit
(search, derivation length or truncated witness), 3 input error.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import asdict, dataclass, field

from . import render
from .calculus import IllegalStep
from .logic import size, symbol_count
from .parser import ParseError, ProblemFile, parse_problem, parse_witness
from .saturation import (
    Derivation,
    Failure,
    LimitExceeded,
    SaturationConfig,
    derivation_from_choices,
    enumerate_derivations,
    one_sided,
    saturate,
)
from .verifier import CheckReport, VerifierError, check_wsoqe
from .witness import DEFAULT_DEPTH_LIMIT, extract_witness, generate_size_family, instantiate_params

EXIT_OK, EXIT_COUNTEREXAMPLE, EXIT_LIMIT, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


@dataclass
class RunResult:
    """Everything a run reports, as plain data."""

    command: str
    status: str  # ok | counterexample | limit | stuck
    conclusion: list = field(default_factory=list)
    derivation: dict | None = None
    witness: dict | None = None
    witness_text: str | None = None
    flags: dict = field(default_factory=dict)
    verification: dict | None = None
    metrics: dict = field(default_factory=dict)
    detail: str = ""

    def to_json(self) -> dict:
        out = asdict(self)
        # the published witness schema sits at the top level
        if self.witness is not None:
            out.update(self.witness)
        return out

    @classmethod
    def from_json(cls, j: dict) -> RunResult:
        keys = cls.__dataclass_fields__
        kw = {k: v for k, v in j.items() if k in keys}
        if j.get("witness") is not None:
            kw["witness"] = {k: j[k] for k in ("witness", "first_order", "truncated")}
        return cls(**kw)


# ---------------------------------------------------------------------------
# Helpers


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _load(path: str) -> ProblemFile:
    try:
        return parse_problem(_read(path))
    except ParseError as e:
        raise InputError(f"{path}: {e}") from None


def _opt(args, problem: ProblemFile, name: str, default, conv=None):
    v = getattr(args, name, None)
    if v is not None:
        return v
    if name in problem.options:
        raw = problem.options[name]
        return conv(raw) if conv else raw
    return default


def _config(args, problem: ProblemFile) -> SaturationConfig:
    one = args.one_sided_only or problem.options.get("one_sided_only", "").lower() in ("1", "true", "yes")
    try:
        return SaturationConfig(
            max_steps=_opt(args, problem, "max_steps", 400, int),
            max_purification_resolvents=_opt(args, problem, "max_resolvents", 24, int),
            one_sided_only=one,
            selection=problem.options.get("selection", "prefer-one-sided"),
            extended_purity=problem.options.get("extended_purity", "occurrence"),
            enumerate_limit=getattr(args, "limit", None) or 16,
        )
    except ValueError as e:
        raise InputError(str(e)) from None


def _choices(spec: str) -> list:
    out = []
    for tok in spec.replace(",", " ").split():
        if "." in tok:
            cid, idx = tok.split(".", 1)
            try:
                out.append((int(cid), int(idx) - 1))
            except ValueError:
                raise InputError(f"bad choice {tok!r}; use CLAUSE.LITERAL or a predicate variable") from None
        else:
            out.append(("ext", tok))
    return out


def _k(args, problem: ProblemFile, n) -> int:
    k = _opt(args, problem, "k", None, int)
    if k is None:
        k = 2 if any(_has_fn(c) for c in n) else 3
    return k


def _has_fn(c) -> bool:
    from .logic import term_has_function

    return any(term_has_function(a) for l in c.literals for a in l.args)


def _derive(args, problem: ProblemFile, cfg: SaturationConfig):
    n = problem.clause_set()
    spec = getattr(args, "choices", None) or problem.options.get("choices")
    if spec:
        try:
            d = derivation_from_choices(n, _choices(spec), cfg)
        except LimitExceeded as e:
            return Failure("limit", str(e))
        except (IllegalStep, ValueError, KeyError, IndexError) as e:
            raise InputError(f"cannot follow the given choices: {e}") from None
        if not d.eliminating:
            return Failure("stuck", "the given choices leave predicate variables in the clause set", d.conclusion)
        return d
    return saturate(n, cfg)


def _shorten(text: str, limit: int = 600) -> str:
    # truncated witnesses can run to many kilobytes; --json carries the full form
    return text if len(text) <= limit else text[:limit] + " …"


def _emit(result: RunResult, args, text: str):
    if args.json:
        print(render.dumps(result.to_json()))
    else:
        print(text)


def _status_code(status: str) -> int:
    return {"ok": EXIT_OK, "counterexample": EXIT_COUNTEREXAMPLE}.get(status, EXIT_LIMIT)


# ---------------------------------------------------------------------------
# Commands


def cmd_scan(args) -> int:
    problem = _load(args.file)
    cfg = _config(args, problem)
    t0 = time.perf_counter()
    d = _derive(args, problem, cfg)
    if isinstance(d, Failure):
        res = RunResult("scan", d.reason, detail=d.detail, metrics={"elapsed": time.perf_counter() - t0})
        _emit(res, args, f"{d.reason}: {d.detail}")
        return EXIT_LIMIT
    res = _base_result("scan", problem, d, t0)
    _emit(res, args, _scan_text(d, args.show_derivation))
    return EXIT_OK


def _scan_text(d: Derivation, show: bool) -> str:
    lines = []
    if show:
        lines += [render.render_derivation(d), ""]
    lines.append("eliminated:")
    lines += [f"  {c}" for c in d.conclusion] or ["  (empty: ⊤)"]
    return "\n".join(lines)


def _base_result(command: str, problem: ProblemFile, d: Derivation, t0: float) -> RunResult:
    return RunResult(
        command,
        "ok",
        conclusion=[render.clause_to_json(c) for c in d.conclusion],
        derivation=render.derivation_to_json(d),
        flags={"one_sided": all(one_sided(p) for p in d.purified())},
        metrics={
            "input_size": symbol_count(problem.clauses),
            "steps": len(d.steps),
            "elapsed": time.perf_counter() - t0,
        },
    )


def cmd_wscan(args) -> int:
    problem = _load(args.file)
    cfg = _config(args, problem)
    depth = _opt(args, problem, "depth_limit", DEFAULT_DEPTH_LIMIT, int)
    mode = _opt(args, problem, "witness_params", "keep")
    if mode not in ("top", "bottom", "keep"):
        raise InputError(f"unknown witness parameter mode {mode!r}")
    t0 = time.perf_counter()
    d = _derive(args, problem, cfg)
    if isinstance(d, Failure):
        res = RunResult("wscan", d.reason, detail=d.detail, metrics={"elapsed": time.perf_counter() - t0})
        _emit(res, args, f"{d.reason}: {d.detail}")
        return EXIT_LIMIT
    trace = extract_witness(d, depth)
    if trace.final.truncated and not (getattr(args, "choices", None) or problem.options.get("choices")):
        # prefer a derivation with a first-order witness when one is cheap to find
        for alt in enumerate_derivations(problem.clause_set(), cfg):
            t = extract_witness(alt, depth)
            if not t.final.truncated:
                d, trace = alt, t
                break
    w = instantiate_params(trace.final, mode)
    res = _base_result("wscan", problem, d, t0)
    res.witness = render.witness_to_json(w)
    res.witness_text = str(w)
    res.flags.update(first_order=w.first_order, truncated=w.truncated)
    res.metrics["witness_size"] = None if w.truncated else size(w)
    lines = [_scan_text(d, args.show_derivation), "witness:", f"  {_shorten(str(w))}"]
    status = "ok"
    if w.truncated:
        status = "limit"
        res.detail = f"witness truncated at depth limit {depth}; not first-order"
        lines.append(f"  ({res.detail})")
    elif not args.no_verify:
        k = _k(args, problem, problem.clauses)
        vmode = mode if mode in ("top", "bottom") else "top"
        rep = _check(problem, trace.final, k, vmode)
        res.verification = rep.to_json()
        lines.append(f"check: {rep}")
        if not rep.ok:
            status = "counterexample"
    res.status = status
    res.metrics["elapsed"] = time.perf_counter() - t0
    _emit(res, args, "\n".join(lines))
    return _status_code(status)


def _check(problem: ProblemFile, w, k: int, params: str) -> CheckReport:
    try:
        return check_wsoqe(problem.clause_set(), w, k, params, extra_constants=problem.consts)
    except VerifierError as e:
        raise InputError(str(e)) from None


def cmd_enumerate(args) -> int:
    problem = _load(args.file)
    cfg = _config(args, problem)
    depth = _opt(args, problem, "depth_limit", DEFAULT_DEPTH_LIMIT, int)
    mode = _opt(args, problem, "witness_params", "keep")
    n = problem.clause_set()
    seen = []
    items = []
    status = "ok"
    for d in enumerate_derivations(n, cfg):
        w = instantiate_params(extract_witness(d, depth).final, mode)
        text = str(w)
        if text in seen:
            continue
        seen.append(text)
        item = {"choices": [list(c) for c in d.choice_signature()], "witness": render.witness_to_json(w), "text": text}
        line = f"{len(seen)}. {_shorten(text)}"
        if args.verify and not w.truncated:
            rep = _check(problem, w, _k(args, problem, problem.clauses), mode if mode != "keep" else "keep")
            item["verification"] = rep.to_json()
            line += f"   [{rep.label()}]"
            if not rep.ok:
                status = "counterexample"
        items.append(item)
        if not args.json:
            print(line, flush=True)
        if len(seen) >= args.limit:
            break
    if args.json:
        print(render.dumps({"command": "enumerate", "status": status, "witnesses": items}))
    if not seen:
        if not args.json:
            print("no eliminating derivation found within the limits")
        return EXIT_LIMIT
    return _status_code(status)


def cmd_verify(args) -> int:
    problem = _load(args.file)
    try:
        w = parse_witness(_read(args.witness), problem.pvars)
    except ParseError as e:
        raise InputError(f"{args.witness}: {e}") from None
    k = _k(args, problem, problem.clauses)
    mode = args.witness_params or "top"
    rep = _check(problem, w, k, mode)
    res = RunResult("verify", "ok" if rep.ok else "counterexample", witness=render.witness_to_json(w),
                    witness_text=str(w), verification=rep.to_json())
    _emit(res, args, f"witness: {w}\ncheck: {rep}")
    return EXIT_OK if rep.ok else EXIT_COUNTEREXAMPLE


def cmd_bench(args) -> int:
    try:
        p, n = (int(x) for x in args.family.split(","))
        if p < 1 or n < 1:
            raise ValueError
    except ValueError:
        raise InputError("--family expects two positive integers P,N") from None
    rows = []
    for pp in range(1, p + 1):
        t0 = time.perf_counter()
        cs, d = generate_size_family(pp, n)
        trace = extract_witness(d, simplify_steps=False)
        elapsed = time.perf_counter() - t0
        closed = 2 * n**pp + (n + 2) * sum(n ** (pp - j - 1) for j in range(pp))
        rows.append({"p": pp, "n": n, "input_size": symbol_count(cs.clauses), "witness_size": size(trace.final),
                     "closed_form": closed, "elapsed": elapsed})
    if args.json:
        print(render.dumps({"command": "bench", "rows": rows}))
    else:
        print(f"{'p':>3} {'n':>3} {'input':>7} {'|wit|':>9} {'formula':>9} {'time(s)':>9}")
        for r in rows:
            print(f"{r['p']:>3} {r['n']:>3} {r['input_size']:>7} {r['witness_size']:>9} {r['closed_form']:>9} {r['elapsed']:>9.4f}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wscan", description="Second-order quantifier elimination with witnesses.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, search=True):
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("-k", type=int, default=None, help="largest domain size for verification")
        p.add_argument("--witness-params", choices=("top", "bottom", "keep"), default=None,
                       help="instantiate witness parameters W_i (default: keep)")
        if search:
            p.add_argument("--max-steps", type=int, default=None)
            p.add_argument("--max-resolvents", type=int, default=None, help="resolvents per purification")
            p.add_argument("--depth-limit", type=int, default=None, help="resolution rounds per unit closure")
            p.add_argument("--one-sided-only", action="store_true")
            p.add_argument("--choices", default=None,
                           help="follow a fixed derivation, e.g. '1.1 2.2 X2' (CLAUSE.LITERAL purifies, a name applies extended purity)")
            p.add_argument("--show-derivation", action="store_true")

    p = sub.add_parser("scan", help="print the eliminated clause set")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("wscan", help="eliminate, extract and verify a witness")
    p.add_argument("file")
    p.add_argument("--no-verify", action="store_true")
    common(p)
    p.set_defaults(func=cmd_wscan)

    p = sub.add_parser("enumerate", help="stream distinct witnesses")
    p.add_argument("file")
    p.add_argument("--limit", type=int, default=8)
    p.add_argument("--verify", action="store_true", help="check each witness")
    common(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("verify", help="check a given witness")
    p.add_argument("file")
    p.add_argument("--witness", required=True)
    common(p, search=False)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="witness sizes of the size family")
    p.add_argument("--family", required=True, help="P,N")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bench)
    return ap


def run_cli(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


def main():
    sys.exit(run_cli())
