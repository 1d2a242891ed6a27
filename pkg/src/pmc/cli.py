"""Command-line front end.

Exit codes: 0 ok, 1 input or usage error, 2 backend capability missing,
3 the checked relation does not hold, 4 a law suite reported failures.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .backend import BACKEND_NAMES, DEFAULT_TOL, get_backend
from .diagram import ObjectType, Signature, load_signature, signature_to_dict, typecheck
from .errors import CapabilityError, InputError
from .inference import bayes_invert, conditional
from .laws import SUITES, applicable, check_validity_increase, run_suite
from .order import conditional_leq, restriction_leq
from .sampling import random_morphism
from .text import parse

EXIT_OK, EXIT_INPUT, EXIT_CAPABILITY, EXIT_RELATION, EXIT_SUITE = 0, 1, 2, 3, 4


class UsageError(InputError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--backend", choices=BACKEND_NAMES, default="finstoch")
    p.add_argument("--sig", type=Path, help="signature file (JSON)")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--seed", type=int, default=0, help="overridden by $PMC_SEED")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--max-card", type=int, default=None)
    p.add_argument("--json", action="store_true", help="emit one JSON document on stdout")
    return p


def _terms(p: argparse.ArgumentParser):
    p.add_argument("files", nargs="*", type=Path, help="diagram files")
    p.add_argument("--expr", action="append", default=[], help="inline term (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="pmc", description="Evaluate and check string diagrams in finite semantics.")
    parser.add_argument("--version", action="version", version=f"pmc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", parents=[common], help="evaluate a term")
    _terms(p)

    p = sub.add_parser("order", parents=[common], help="decide f ⪯ g or f ⊑ g")
    _terms(p)
    p.add_argument("--relation", choices=("restriction", "conditional"), default="conditional")

    p = sub.add_parser("conditional", parents=[common], help="factor a joint X -> A⊗B")
    _terms(p)
    p.add_argument("--split", type=int, default=1,
                   help="number of codomain factors that form A (default 1)")

    p = sub.add_parser("bayes", parents=[common], help="Bayesian inverse of a channel given a prior")
    _terms(p)

    p = sub.add_parser("validity", parents=[common], help="validity of evidence before and after updating")
    _terms(p)

    p = sub.add_parser("laws", parents=[common], help="run seeded law suites")
    p.add_argument("--suites", default="all", help=f"'all' or a comma list of: {', '.join(SUITES)}")
    p.add_argument("--out", type=Path, help="directory for one JSON report per suite")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("gen-sig", parents=[common], help="write a random signature")
    p.add_argument("--objects", default="X=2,Y=3", help="comma list NAME=CARD")
    p.add_argument("--generators", type=int, default=2)
    p.add_argument("--out", type=Path)
    return parser


# -- helpers -------------------------------------------------------------------


def _config(args):
    env = os.environ.get("PMC_SEED")
    if env is not None:
        try:
            args.seed = int(env)
        except ValueError:
            raise UsageError(f"PMC_SEED must be an integer, got {env!r}") from None
    if args.tol < 0:
        raise UsageError("--tol must be non-negative")
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    if args.max_card is not None and args.max_card < 1:
        raise UsageError("--max-card must be at least 1")


def _signature(args) -> Signature:
    if args.sig is None:
        raise UsageError("--sig is required for this command")
    return load_signature(args.sig, tol=args.tol)


def _sources(args, count: int) -> list[str]:
    texts = [f.read_text(encoding="utf-8") for f in args.files] + list(args.expr)
    if len(texts) != count:
        raise UsageError(f"expected {count} term(s) from files or --expr, got {len(texts)}")
    return texts


def _load_terms(args, count: int):
    sig = _signature(args)
    b = get_backend(args.backend)
    out = []
    for text in _sources(args, count):
        term = parse(text, sig)
        dom, cod = typecheck(term, sig)
        out.append((term, dom, cod, b.evaluate(term, sig)))
    return sig, b, out


def _word(o: ObjectType) -> list[str]:
    return list(o.word)


def _emit(args, doc: dict, human: str):
    if args.json:
        print(json.dumps(doc, default=_plain))
    else:
        print(human)


def _plain(o):
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(type(o))


# -- commands ----------------------------------------------------------------


def cmd_eval(args) -> int:
    _, b, [(_, dom, cod, m)] = _load_terms(args, 1)
    doc = {"backend": b.name, "dom": _word(dom), "cod": _word(cod), "morphism": b.to_payload(m)}
    _emit(args, doc, f"{dom} -> {cod}\n{b.format(m)}")
    return EXIT_OK


def cmd_order(args) -> int:
    _, b, [(_, d1, c1, f), (_, d2, c2, g)] = _load_terms(args, 2)
    if (d1, c1) != (d2, c2):
        raise UsageError(f"terms are not parallel: {d1} -> {c1} vs {d2} -> {c2}")
    decide = restriction_leq if args.relation == "restriction" else conditional_leq
    v = decide(b, f, g, args.tol)
    doc = {"backend": b.name, **v.to_dict(b)}
    lines = [f"{v.relation}: {'holds' if v.holds else 'does not hold'} (residual {v.residual:.3g})"]
    if v.witness is not None:
        lines += ["witness:", b.format(v.witness)]
    _emit(args, doc, "\n".join(lines))
    return EXIT_OK if v.holds else EXIT_RELATION


def cmd_conditional(args) -> int:
    sig, b, [(_, dom, cod, f)] = _load_terms(args, 1)
    if not 0 <= args.split <= len(cod):
        raise UsageError(f"--split must be between 0 and {len(cod)}")
    a_obj, b_obj = ObjectType(cod.word[:args.split]), ObjectType(cod.word[args.split:])
    fac = conditional(b, f, sig.card(a_obj), sig.card(b_obj), args.tol)
    doc = {
        "backend": b.name,
        "marginal": {"dom": _word(dom), "cod": _word(a_obj), "morphism": b.to_payload(fac.marginal)},
        "conditional": {"dom": _word(a_obj @ dom), "cod": _word(b_obj),
                        "morphism": b.to_payload(fac.conditional)},
    }
    human = (f"marginal {dom} -> {a_obj}\n{b.format(fac.marginal)}\n"
             f"conditional {a_obj @ dom} -> {b_obj}\n{b.format(fac.conditional)}")
    _emit(args, doc, human)
    return EXIT_OK


def cmd_bayes(args) -> int:
    _, b, [(_, a, bo, g), (_, x, a2, f)] = _load_terms(args, 2)
    if a != a2:
        raise UsageError(f"channel domain {a} does not match prior codomain {a2}")
    inv = bayes_invert(b, g, f, args.tol)
    doc = {"backend": b.name, "dom": _word(bo @ x), "cod": _word(a), "inverse": b.to_payload(inv)}
    _emit(args, doc, f"inverse {bo @ x} -> {a}\n{b.format(inv)}")
    return EXIT_OK


def cmd_validity(args) -> int:
    _, b, [(_, sd, sx, sigma), (_, px, pc, p)] = _load_terms(args, 2)
    if len(sd) or len(pc) or sx != px:
        raise UsageError(f"need a state I -> X and an effect X -> I, got {sd} -> {sx} and {px} -> {pc}")
    rep = check_validity_increase(b, sigma, p, args.tol)
    doc = {"backend": b.name, **rep.to_dict(b)}
    human = (f"prior validity: {b.scalar(rep.prior_validity)}\n"
             f"posterior I -> {sx}:\n{b.format(rep.posterior)}\n"
             f"posterior validity: {b.scalar(rep.posterior_validity)}\n"
             f"holds: {rep.holds}" + (" (degenerate: zero prior validity)" if rep.degenerate else ""))
    _emit(args, doc, human)
    return EXIT_OK if rep.holds else EXIT_RELATION


def _fixed_from_signature(args, b):
    if args.sig is None:
        return ()
    sig = _signature(args)
    return tuple((name, g.payloads[b.name]) for name, g in sorted(sig.generators.items())
                 if b.name in g.payloads)


def cmd_laws(args) -> int:
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    b = get_backend(args.backend)
    if args.suites == "all":
        names = [s for s in SUITES if applicable(s, b.name)]
    else:
        names = [s.strip() for s in args.suites.split(",") if s.strip()]
        unknown = [s for s in names if s not in SUITES]
        if unknown or not names:
            raise UsageError(f"unknown suite(s): {', '.join(unknown) or '(none)'}")
        bad = [s for s in names if not applicable(s, b.name)]
        if bad:
            raise UsageError(f"suite(s) {', '.join(bad)} do not apply to backend {b.name}")
    fixed = _fixed_from_signature(args, b)
    reports = []
    for name in names:
        extra = {"fixed_morphisms": fixed} if name == "enrichment" and fixed else {}
        rep = run_suite(name, b, args.trials, args.seed, args.max_card, args.tol, args.jobs, **extra)
        reports.append(rep)
        if args.out is not None:
            args.out.mkdir(parents=True, exist_ok=True)
            (args.out / f"{name}-{b.name}.json").write_text(rep.to_json() + "\n", encoding="utf-8")
        if not args.json:
            print(rep.summary(), flush=True)
    ok = all(r.passed for r in reports)
    if args.json:
        print(json.dumps({"backend": b.name, "seed": args.seed, "trials": args.trials, "passed": ok,
                          "reports": [r.to_dict() for r in reports]}, default=_plain))
    return EXIT_OK if ok else EXIT_SUITE


def cmd_gen_sig(args) -> int:
    objects = {}
    for item in args.objects.split(","):
        name, _, card = item.partition("=")
        try:
            objects[name.strip()] = int(card)
        except ValueError:
            raise UsageError(f"bad object spec {item!r}; expected NAME=CARD") from None
    sig = Signature(objects)
    names = sorted(objects)
    rng = np.random.default_rng(args.seed)
    for k in range(args.generators):
        dom = ObjectType((names[int(rng.integers(len(names)))],))
        cod = ObjectType((names[int(rng.integers(len(names)))],))
        n, m = sig.card(dom), sig.card(cod)
        payloads = {name: random_morphism(get_backend(name), rng, n, m) for name in BACKEND_NAMES}
        sig = sig.with_generator(f"g{k}", dom, cod, **payloads)
    text = json.dumps(signature_to_dict(sig), indent=2, default=_plain) + "\n"
    if args.out is not None:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {
    "eval": cmd_eval,
    "order": cmd_order,
    "conditional": cmd_conditional,
    "bayes": cmd_bayes,
    "validity": cmd_validity,
    "laws": cmd_laws,
    "gen-sig": cmd_gen_sig,
}


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # usage errors exit 1, --help and --version exit 0
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    try:
        _config(args)
        return COMMANDS[args.command](args)
    except CapabilityError as exc:
        print(f"pmc: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except (InputError, OSError, ValueError) as exc:
        print(f"pmc: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
