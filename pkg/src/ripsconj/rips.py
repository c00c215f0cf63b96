"""The Rips construction.

From a finite presentation P = <x_1..x_m | r_1..r_k> build

    G = <x_1..x_m, a_1..a_n | r_i w_i^-1,  x_j^-1 a_t x_j u_jt^-1,  x_j a_t x_j^-1 v_jt^-1>

where every w, u, v is a block word  a_1 a_2^e_1 a_1 a_2^e_2 ... a_1 a_2^e_l  whose
exponents come from one strictly increasing counter. N = <a_1..a_n> is normal
(the last two relator families rewrite its conjugates inside N) and G/N = P.
The number of blocks l grows until the metric condition C'(lambda) holds.

Pieces between block words look like a_2^s a_1 a_2^t, about twice the
largest exponent, while a relator has l blocks. The counter therefore starts
at 2·l·W (W = number of block words) so that exponents stay within a factor
of 1.5 of one another, giving ratio close to 3/l.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .presentation import GroupHom, HomCheck, Presentation, WordOracle, check_hom, parse_presentation
from .smallcanc import SIXTH, SmallCancellationReport, verify_metric
from .words import Word, cyclic_reduce, free_reduce, letter_code

__all__ = [
    "ConstructionFailure",
    "RipsOutput",
    "RipsParams",
    "RipsVerification",
    "dump_rips",
    "load_rips",
    "preimage_subgroup",
    "rips_build",
    "verify_rips",
]


class ConstructionFailure(RuntimeError):
    def __init__(self, message: str, report: SmallCancellationReport):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class RipsParams:
    num_a_generators: int = 2
    initial_blocks_per_word: int = 7
    lambda_target: Fraction = SIXTH
    max_rounds: int = 6

    def __post_init__(self):
        object.__setattr__(self, "lambda_target", Fraction(self.lambda_target))
        if self.num_a_generators < 2:
            raise ValueError("need at least two a-generators")
        if self.initial_blocks_per_word < 7:
            raise ValueError("need at least 7 blocks per word")
        if not 0 < self.lambda_target <= SIXTH:
            raise ValueError("lambda_target must lie in (0, 1/6]")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be positive")


@dataclass(frozen=True)
class RipsOutput:
    P: Presentation
    G: Presentation
    N_gens: tuple[Word, ...]
    psi: GroupHom
    report: SmallCancellationReport
    exponent_log: tuple[tuple[str, tuple[int, int]], ...]
    blocks: int
    params: RipsParams = field(default_factory=RipsParams)

    @property
    def a_names(self) -> tuple[str, ...]:
        return tuple(w[0].name for w in self.N_gens)

    def lift(self, w: Word) -> Word:
        """Rewrite a word over P as the same-named word over G."""
        self.P.check_alphabet(w)
        return free_reduce(w)


def _a_names(P: Presentation, n: int) -> tuple[str, ...]:
    taken = set(P.generators)
    prefix = "a"
    while any(f"{prefix}{t}" in taken for t in range(1, n + 1)):
        prefix += "_"
    return tuple(f"{prefix}{t}" for t in range(1, n + 1))


def _block_word(a1: str, a2: str, exps: range) -> Word:
    c1, c2 = letter_code(a1, 1), letter_code(a2, 1)
    return Word.from_code("".join(c1 + c2 * e for e in exps), True)


def _assemble(P: Presentation, a: tuple[str, ...], blocks: int):
    k, m = len(P.relators), len(P.generators)
    count = k + 2 * len(a) * m
    counter = 2 * blocks * count

    def take(role: str) -> Word:
        nonlocal counter
        exps = range(counter, counter + blocks)
        counter += blocks
        log.append((role, (exps[0], exps[-1])))
        return _block_word(a[0], a[1], exps)

    log: list[tuple[str, tuple[int, int]]] = []
    rels: list[Word] = []
    for i, r in enumerate(P.relators):
        rels.append(r.concat(take(f"w:{i}").inverse()))
    for x in P.generators:
        X, Xi = Word.gen(x), Word.gen(x, -1)
        for t in a:
            A = Word.gen(t)
            rels.append(Xi.concat(A).concat(X).concat(take(f"u:{x}:{t}").inverse()))
            rels.append(X.concat(A).concat(Xi).concat(take(f"v:{x}:{t}").inverse()))
    G = Presentation(P.generators + a, tuple(rels))
    return G, tuple(log)


def rips_build(P: Presentation, params: RipsParams | None = None) -> RipsOutput:
    """Build a certified Rips group over ``P``.

    Raises :class:`ConstructionFailure` (with the last report) if the metric
    condition still fails after ``max_rounds`` block-count increases.
    """
    params = params or RipsParams()
    a = _a_names(P, params.num_a_generators)
    lam = params.lambda_target
    blocks = params.initial_blocks_per_word
    report = None
    for _ in range(params.max_rounds):
        G, log = _assemble(P, a, blocks)
        ok, report = verify_metric(G, lam)
        if ok:
            psi = GroupHom.deletion(G, P)
            return RipsOutput(P, G, tuple(Word.gen(t) for t in a), psi, report, log, blocks, params)
        grow = math.ceil(blocks * float(report.ratio / lam) * 1.1)
        blocks = max(blocks + 1, grow)
    raise ConstructionFailure(f"metric condition C'({lam}) not reached in {params.max_rounds} rounds", report)


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class RipsVerification:
    """Outcome of each check: ``(ok, detail)``; ``ok`` may be ``None`` if an
    oracle could not decide."""

    metric: tuple[Optional[bool], str]
    psi: tuple[Optional[bool], str]
    normality: tuple[Optional[bool], str]
    quotient: tuple[Optional[bool], str]

    @property
    def ok(self) -> bool:
        return all(c[0] is True for c in (self.metric, self.psi, self.normality, self.quotient))

    def failures(self) -> list[tuple[str, str]]:
        return [(name, c[1]) for name, c in self.items() if c[0] is not True]

    def items(self):
        return [("metric", self.metric), ("psi", self.psi), ("normality", self.normality), ("quotient", self.quotient)]


def _exhibits_conjugate(r: Word, x: str, t: str, eps: int, a_codes: set[str]) -> bool:
    # some rotation reads x^-eps a_t x^eps followed by letters from a-generators only
    pattern = letter_code(x, -eps) + letter_code(t, 1) + letter_code(x, eps)
    code = r.code
    n = len(code)
    if n < 3:
        return False
    doubled = code + code
    start = doubled.find(pattern)
    while 0 <= start < n:
        rest = doubled[start + 3 : start + n]
        if all(ch in a_codes for ch in rest):
            return True
        start = doubled.find(pattern, start + 1)
    return False


def verify_rips(out: RipsOutput, p_oracle: WordOracle | None = None) -> RipsVerification:
    """Re-check a Rips output: metric certificate, psi well defined,
    normality of N (syntactic), and G / <<N>> = P at the presentation level."""
    if p_oracle is None:
        from .oracles import PresentationOracle

        p_oracle = PresentationOracle(out.P)
    G, P = out.G, out.P

    ok, rep = verify_metric(G, out.params.lambda_target)
    metric = (ok, f"ratio {rep.ratio} vs lambda {out.params.lambda_target}; proper_power {rep.proper_power}")

    hc: HomCheck = check_hom(out.psi, p_oracle)
    psi = (hc.ok, "all relators map to the identity" if hc.ok else f"relator {hc.index}: {hc.failing}")

    a_names = out.a_names
    a_codes = {letter_code(t, s) for t in a_names for s in (1, -1)}
    missing = []
    for x in P.generators:
        for t in a_names:
            for eps in (1, -1):
                if not any(_exhibits_conjugate(r, x, t, eps, a_codes) or _exhibits_conjugate(~r, x, t, eps, a_codes) for r in G.relators):
                    missing.append(f"({x}, {t}, {'+' if eps > 0 else '-'})")
    normality = (not missing, "missing conjugates " + ", ".join(missing) if missing else "every x^-e a x^e rewrites into N")

    expected = list(P.relators)
    bad = None
    for i, r in enumerate(G.relators):
        img = cyclic_reduce(free_reduce(Word.from_code("".join(ch for ch in r.code if ch not in a_codes))))[0]
        if not img:
            continue
        if img in expected:
            expected.remove(img)
        else:
            bad = f"relator {i} maps to {img}, not a relator of P"
            break
    if bad is None and expected:
        bad = f"relators of P not produced: {', '.join(map(str, expected))}"
    quotient = (bad is None, bad or "deleting a-letters gives P's relators plus free identities")
    return RipsVerification(metric, psi, normality, quotient)


def preimage_subgroup(out: RipsOutput, F_gens: Sequence[Word]) -> list[Word]:
    """Generators of psi^-1(<F_gens>): N's generators followed by the lifts."""
    return list(out.N_gens) + [out.lift(f) for f in F_gens]


# ---------------------------------------------------------------------------
# text form


def dump_rips(out: RipsOutput) -> tuple[str, str]:
    """``(presentation of G, sidecar record)``."""
    p = out.params
    lines = [
        "ngens: " + " ".join(out.a_names),
        "psi: delete",
        f"blocks: {out.blocks}",
        f"num_a: {p.num_a_generators}",
        f"initial_blocks: {p.initial_blocks_per_word}",
        f"lambda: {p.lambda_target}",
        f"max_rounds: {p.max_rounds}",
    ]
    lines += [f"exponents: {role} {lo} {hi}" for role, (lo, hi) in out.exponent_log]
    lines.append("p-gens: " + " ".join(out.P.generators) if out.P.generators else "p-gens:")
    lines += [f"p-rel: {r}" for r in out.P.relators]
    sidecar = "\n".join(lines) + "\n" + out.report.to_record()
    return out.G.to_text(), sidecar


def load_rips(g_text: str, sidecar: str) -> RipsOutput:
    G = parse_presentation(g_text)
    fields: dict[str, list[str]] = {}
    for raw in sidecar.splitlines():
        key, sep, value = raw.partition(":")
        if sep:
            fields.setdefault(key.strip(), []).append(value.strip())

    def one(key: str) -> str:
        if key not in fields:
            raise ValueError(f"sidecar is missing {key!r}")
        return fields[key][0]

    if one("psi") != "delete":
        raise ValueError("only the deletion map is supported for psi")
    a_names = tuple(one("ngens").split())
    P = Presentation(tuple(one("p-gens").split()), tuple(Word.parse(r) for r in fields.get("p-rel", [])))
    params = RipsParams(int(one("num_a")), int(one("initial_blocks")), Fraction(one("lambda")), int(one("max_rounds")))
    log = []
    for v in fields.get("exponents", []):
        role, lo, hi = v.split()
        log.append((role, (int(lo), int(hi))))
    report = SmallCancellationReport.from_record(sidecar)
    if G.generators != P.generators + a_names:
        raise ValueError("generators of G must be P's generators followed by the a-generators")
    return RipsOutput(
        P, G, tuple(Word.gen(t) for t in a_names), GroupHom.deletion(G, P), report, tuple(log), int(one("blocks")), params
    )
