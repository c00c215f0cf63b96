"""Command-line interface.

Exit status: 0 for a definite answer, 2 when a search ran out of budget,
1 for bad input. ``--emit structured`` prints the same fields as the text
mode, as JSON with sorted keys.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

from . import perms
from .context import Budget, Conjugate, GroupContext, NonConjugate, Undecided
from .cosets import todd_coxeter
from .fibre import FibreContext, FibreRejection, PairWord, fibre_conj, fibre_generators, index_ratio_check
from .oracles import PresentationOracle
from .presentation import Presentation, parse_presentation
from .profinite import (
    Exhausted,
    Witness,
    enumerate_perm_reps,
    separate_conjugacy,
    separate_elements,
    separate_from_double_coset,
    separate_from_subgroup,
)
from .rips import ConstructionFailure, RipsOutput, RipsParams, dump_rips, load_rips, preimage_subgroup, rips_build
from .smallcanc import CertificateMissing, symmetrize, verify_metric, word_problem
from .subgrp import RejectionTranscript, membership_via_conj, normal_subgroup_context, quotient_word_problem
from .words import Word

EXIT_OK, EXIT_INPUT, EXIT_UNDECIDED = 0, 1, 2


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_INPUT)


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if v <= 0:
        raise argparse.ArgumentTypeError("budgets must be positive")
    return v


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"{text!r} is not a rational number")


# ---------------------------------------------------------------------------
# output


def _render_text(record: dict) -> str:
    lines = []

    def emit(key: str, value: Any):
        if isinstance(value, dict):
            for k, v in value.items():
                emit(f"{key}.{k}", v)
        elif isinstance(value, list):
            for v in value:
                emit(key, v)
        elif isinstance(value, bool):
            lines.append(f"{key}: {'true' if value else 'false'}")
        else:
            lines.append(f"{key}: {value}")

    for k, v in record.items():
        emit(k, v)
    return "\n".join(lines) + "\n"


def _render(record: dict, emit: str) -> str:
    if emit == "structured":
        return json.dumps(record, sort_keys=True, indent=2) + "\n"
    return _render_text(record)


def _write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# inputs


def _read_presentation(path: str) -> Presentation:
    try:
        return parse_presentation(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}")


def _read_rips(prefix: str) -> RipsOutput:
    try:
        g = Path(prefix + ".pres").read_text(encoding="utf-8")
        side = Path(prefix + ".rips").read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read Rips output {prefix}.pres / {prefix}.rips: {e.strerror}")
    return load_rips(g, side)


def _word(p: Presentation, text: str) -> Word:
    return p.word(text)


def _budget(args) -> Budget:
    return Budget(
        max_length=args.max_length,
        max_degree=args.max_degree,
        time_ms=args.time_ms,
        max_cosets=args.max_cosets,
    )


def _witness_fields(w: Any) -> dict:
    if isinstance(w, (Witness, RejectionTranscript, FibreRejection)):
        return w.to_dict()
    return {"kind": type(w).__name__}


def _verdict(v) -> tuple[dict, int]:
    if isinstance(v, Conjugate):
        return {"verdict": "conjugate", "conjugator": str(v.conjugator), "path": v.path}, EXIT_OK
    if isinstance(v, NonConjugate):
        return {"verdict": "non-conjugate", "path": v.path, "witness": _witness_fields(v.witness)}, EXIT_OK
    assert isinstance(v, Undecided)
    spent = {k: v.spent[k] for k in sorted(v.spent)}
    return {"verdict": "undecided", "reason": v.reason, "frontier": spent}, EXIT_UNDECIDED


def _search(result) -> tuple[dict, int]:
    if isinstance(result, Witness):
        return {"found": True, "witness": result.to_dict()}, EXIT_OK
    assert isinstance(result, Exhausted)
    return {"found": False, "kind": result.kind, "frontier": dict(sorted(result.frontier.items())), "skipped": list(result.skipped)}, EXIT_UNDECIDED


# ---------------------------------------------------------------------------
# commands


def cmd_verify_sc(args):
    p = _read_presentation(args.presentation)
    ok, rep = verify_metric(p, args.lam)
    rec = {"lambda": str(args.lam), "holds": ok}
    for line in rep.to_record().splitlines():
        k, _, v = line.partition(": ")
        rec[k] = v
    return rec, EXIT_OK


def cmd_wp(args):
    p = _read_presentation(args.presentation)
    w = _word(p, args.word)
    s = symmetrize(p) if all(p.relators) else None
    if s is not None and s.certified:
        return {"word": str(w), "trivial": word_problem(w, s), "method": "dehn"}, EXIT_OK
    verdict = PresentationOracle(p, args.max_cosets)(w)
    if verdict is None:
        return {"word": str(w), "trivial": "undecided", "method": "none"}, EXIT_UNDECIDED
    return {"word": str(w), "trivial": verdict, "method": "enumeration"}, EXIT_OK


def cmd_conj(args):
    from .profinite import parallel_decide_conjugacy

    p = _read_presentation(args.presentation)
    x, y = _word(p, args.x), _word(p, args.y)
    ctx = GroupContext(p, _budget(args))
    rec, code = _verdict(parallel_decide_conjugacy(ctx, x, y))
    return {"x": str(x), "y": str(y), **rec}, code


def cmd_member(args):
    out = _read_rips(args.prefix)
    g = _word(out.G, args.word)
    N = normal_subgroup_context(out, _budget(args))
    via_conj = membership_via_conj(N, g)
    via_quot = quotient_word_problem(out, g)
    fmt = lambda v: "undecided" if v is None else v  # noqa: E731
    rec = {"word": str(g), "member": fmt(via_conj), "via_conjugacy": fmt(via_conj), "via_quotient": fmt(via_quot)}
    if via_conj is not None and via_quot is not None and via_conj != via_quot:
        raise RuntimeError("membership routes disagree")
    return rec, EXIT_OK if via_conj is not None else EXIT_UNDECIDED


def cmd_rips(args):
    P = _read_presentation(args.presentation)
    targets = {Path(args.output + ext).resolve() for ext in (".pres", ".rips")}
    if Path(args.presentation).resolve() in targets:
        raise InputError("output prefix would overwrite the input presentation")
    params = RipsParams(lambda_target=args.lam, max_rounds=args.max_rounds)
    try:
        out = rips_build(P, params)
    except ConstructionFailure as e:
        rec = {"built": False, "error": str(e)}
        for line in e.report.to_record().splitlines():
            k, _, v = line.partition(": ")
            rec[k] = v
        return rec, EXIT_UNDECIDED
    g_text, side = dump_rips(out)
    _write_atomic(Path(args.output + ".pres"), g_text)
    _write_atomic(Path(args.output + ".rips"), side)
    rec = {
        "built": True,
        "presentation": args.output + ".pres",
        "sidecar": args.output + ".rips",
        "generators": len(out.G.generators),
        "relators": len(out.G.relators),
        "blocks": out.blocks,
        "ratio": str(out.report.ratio),
    }
    return rec, EXIT_OK


def cmd_preimage(args):
    out = _read_rips(args.prefix)
    F = [_word(out.P, f) for f in args.F]
    H = preimage_subgroup(out, F)
    rec: dict = {"generators": [str(h) for h in H]}
    if args.index:
        t = todd_coxeter(out.G, H, args.max_cosets)
        rec["index"] = t.index if t.complete else "overflow"
        return rec, EXIT_OK if t.complete else EXIT_UNDECIDED
    return rec, EXIT_OK


def _fibre_ctx(args) -> FibreContext:
    out = _read_rips(args.prefix)
    return FibreContext(out, [_word(out.P, f) for f in args.F], budget=_budget(args))


def cmd_fibre_gens(args):
    ctx = _fibre_ctx(args)
    return {"generators": [str(p) for p in fibre_generators(ctx)]}, EXIT_OK


def cmd_fibre_conj(args):
    ctx = _fibre_ctx(args)
    x, y = PairWord.parse(args.x), PairWord.parse(args.y)
    for pw in (x, y):
        ctx.out.G.check_alphabet(pw.left), ctx.out.G.check_alphabet(pw.right)
    rec, code = _verdict(fibre_conj(ctx, x, y))
    return {"x": str(x), "y": str(y), **rec}, code


def cmd_fibre_index(args):
    ctx = _fibre_ctx(args)
    lhs, rhs, equal = index_ratio_check(ctx)
    return {"lhs": lhs, "rhs": rhs, "equal": equal}, EXIT_OK


def cmd_quotients(args):
    p = _read_presentation(args.presentation)
    rec: dict = {"max_degree": args.max_degree, "quotients": [], "counts": {}}
    for n in range(1, args.max_degree + 1):
        count = 0
        for q in enumerate_perm_reps(p, n, args.limit):
            images = " ".join(f"{g}={perms.to_cycle_notation(im)}" for g, im in zip(p.generators, q.images))
            rec["quotients"].append(f"{n}: {images}".rstrip())
            count += 1
        rec["counts"][str(n)] = count
    return rec, EXIT_OK


def cmd_separate(args):
    p = _read_presentation(args.presentation)
    budget = _budget(args)
    words = [_word(p, w) for w in args.words]
    kind = args.kind
    if kind in ("conj", "element"):
        if len(words) != 2:
            raise InputError(f"'{kind}' takes exactly two words")
        fn = separate_conjugacy if kind == "conj" else separate_elements
        return _search(fn(p, words[0], words[1], budget))
    if kind == "subgroup":
        if not words:
            raise InputError("'subgroup' takes g followed by subgroup generators")
        return _search(separate_from_subgroup(p, words[0], words[1:], budget))
    if len(words) < 2:
        raise InputError("'double-coset' takes g, x, then subgroup generators")
    return _search(separate_from_double_coset(p, words[0], words[1], words[2:], budget))


def cmd_tc(args):
    p = _read_presentation(args.presentation)
    subs = [_word(p, w) for w in args.sub]
    t = todd_coxeter(p, subs, args.max_cosets)
    rec: dict = {"status": t.status, "index": t.index if t.complete else "overflow"}
    if t.complete:
        if args.output is None:
            rec["table"] = t.to_csv().splitlines()
        else:
            _write_atomic(Path(args.output), t.to_csv())
            rec["table"] = args.output
    return rec, EXIT_OK if t.complete else EXIT_UNDECIDED


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lambda", dest="lam", type=_fraction, default=Fraction(1, 6), metavar="R")
    common.add_argument("--max-length", type=_positive, default=8, metavar="N")
    common.add_argument("--max-degree", type=_positive, default=4, metavar="N")
    common.add_argument("--max-cosets", type=_positive, default=100_000, metavar="N")
    common.add_argument("--time-ms", type=_positive, default=10_000, metavar="N")
    common.add_argument("--seed", type=int, default=0, metavar="N")
    common.add_argument("--emit", choices=("text", "structured"), default="text")

    parser = _Parser(prog="ripsconj", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, metavar="command")

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("verify-sc", cmd_verify_sc, "check the metric small-cancellation condition")
    sp.add_argument("presentation")
    sp = add("wp", cmd_wp, "word problem")
    sp.add_argument("presentation")
    sp.add_argument("word")
    sp = add("conj", cmd_conj, "conjugacy in a C'(1/6) group")
    sp.add_argument("presentation")
    sp.add_argument("x")
    sp.add_argument("y")
    sp = add("member", cmd_member, "membership in N for a Rips output")
    sp.add_argument("prefix")
    sp.add_argument("word")
    sp = add("rips", cmd_rips, "build a Rips group over P")
    sp.add_argument("presentation")
    sp.add_argument("-o", "--output", required=True, metavar="PREFIX")
    sp.add_argument("--max-rounds", type=_positive, default=6, metavar="N")
    sp = add("preimage", cmd_preimage, "generators of psi^-1(<F>)")
    sp.add_argument("prefix")
    sp.add_argument("F", nargs="*")
    sp.add_argument("--index", action="store_true", help="also enumerate cosets of the preimage")
    for name, fn, help_ in (
        ("fibre-gens", cmd_fibre_gens, "generators of the fibre product"),
        ("fibre-index", cmd_fibre_index, "index identity through eta-images"),
    ):
        sp = add(name, fn, help_)
        sp.add_argument("prefix")
        sp.add_argument("F", nargs="*")
    sp = add("fibre-conj", cmd_fibre_conj, "conjugacy in the fibre product")
    sp.add_argument("prefix")
    sp.add_argument("x")
    sp.add_argument("y")
    sp.add_argument("--F", action="append", default=[], metavar="WORD")
    sp = add("quotients", cmd_quotients, "permutation representations of one degree")
    sp.add_argument("presentation")
    sp.add_argument("--limit", type=_positive, default=None, metavar="N")
    sp = add("separate", cmd_separate, "search for a finite-quotient witness")
    sp.add_argument("presentation")
    sp.add_argument("kind", choices=("conj", "element", "subgroup", "double-coset"))
    sp.add_argument("words", nargs="+")
    sp = add("tc", cmd_tc, "Todd-Coxeter coset enumeration (CSV table)")
    sp.add_argument("presentation")
    sp.add_argument("sub", nargs="*")
    sp.add_argument("-o", "--output", default=None, metavar="FILE")
    return parser


def run(argv: Optional[list[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.command is None:
        parser.print_usage(stderr)
        return EXIT_INPUT
    try:
        record, code = args.fn(args)
    except (InputError, CertificateMissing, ValueError, KeyError) as e:
        stderr.write(f"error: {e}\n")
        return EXIT_INPUT
    stdout.write(_render(record, args.emit))
    stdout.flush()
    return code


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
