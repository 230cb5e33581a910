"""Command-line interface.

Exit codes: 0 success, 2 input/schema error, 3 model error (reducible chain,
absorbing state, bad shape), 4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import documents, verify
from .errors import ChainError, SchemaError, ShapeError
from .markov import (
    RateParams,
    conjugate,
    ktazrp_chain,
    mlq_chain,
    ring_forward,
    ring_forward_bosonic,
    ring_reverse,
    ring_reverse_bosonic,
    simulate_ctmc,
    stationary_exact,
    tasep_chain,
    tazrp_chain,
)
from .mlq import FermionicMLQ, count_queues, enumerate_queues, twist
from .projection import ctm_project, label_trace, project


def _load_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read JSON from {path}: {exc}") from exc


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(",") if p.strip() != "")
    except ValueError as exc:
        raise SchemaError(f"bad integer list {text!r}") from exc


def _parse_x(text: str | None, n: int) -> RateParams:
    if not text:
        return RateParams.ones(n)
    vals = [documents.parse_fraction(p) for p in text.split(",")]
    if len(vals) != n:
        raise SchemaError(f"x must have {n} entries")
    return RateParams(tuple(vals))


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def cmd_project(args) -> int:
    q = documents.parse_queue(_load_json(args.infile))
    by_labels = project(q)
    by_ctm = ctm_project(q)
    if by_labels != by_ctm:
        print("projection routes disagree", file=sys.stderr)
        _emit({"label": documents.emit_word(by_labels), "ctm": documents.emit_word(by_ctm)})
        return 4
    word = by_ctm if args.method == "ctm" else by_labels
    out = documents.emit_word(word)
    if args.trace:
        out = {"word": out, "trace": [documents.emit_word(w) for w in label_trace(q)]}
    _emit(out)
    return 0


def cmd_sigma(args) -> int:
    q = documents.parse_queue(_load_json(args.infile))
    image = twist(q, args.i)
    if args.check_braid:
        if twist(image, args.i) != q:
            print("twist is not an involution here", file=sys.stderr)
            return 4
        i = args.i
        if i + 1 < q.k:
            left = twist(twist(twist(q, i), i + 1), i)
            right = twist(twist(twist(q, i + 1), i), i + 1)
            if left != right:
                print("braid relation failed here", file=sys.stderr)
                return 4
    _emit(documents.emit_queue(image))
    return 0


def cmd_stationary(args) -> int:
    lam = _parse_int_list(args.lam)
    n = args.n
    x = _parse_x(args.x, n)
    model = args.model
    show_x = None if model in ("tasep", "mlq-fermionic", "ktazrp") else x.x

    if model == "tasep":
        chain = tasep_chain(lam, n)
    elif model == "tazrp":
        chain = tazrp_chain(lam, n, x)
    elif model == "ktazrp":
        chain = ktazrp_chain(lam, n)
    elif model == "mlq-fermionic":
        chain = mlq_chain("fermionic", lam, n)
    elif model == "mlq-bosonic":
        chain = mlq_chain("bosonic", lam, n, x)
    else:
        raise SchemaError(f"unknown model {model!r}")

    queue_states = model.startswith("mlq-")
    if args.method == "exact":
        dist = stationary_exact(chain)
        probs = {s: dist[s] for s in chain.states}
    elif args.method == "mc":
        freqs = simulate_ctmc(chain, args.seed, args.jumps)
        total = sum((Fraction(v) for v in freqs.values()), Fraction(0))
        probs = {s: Fraction(v) / total for s, v in freqs.items()}
    elif args.method == "mlq":
        probs = _fiber_probs(model, lam, n, x)
    else:
        raise SchemaError(f"unknown method {args.method!r}")

    if queue_states:
        entries = [
            {"state": documents.emit_queue(s), "prob": documents.format_fraction(p), "weight": list(s.weight().exponents)}
            for s, p in probs.items()
        ]
        _emit(
            {
                "model": model,
                "lambda": list(lam),
                "n": n,
                "x": None if show_x is None else [documents.format_fraction(v) for v in show_x],
                "entries": entries,
            }
        )
    else:
        _emit(
            documents.emit_distribution(
                model, lam, n, show_x, [(s, p, None) for s, p in sorted(probs.items(), key=lambda kv: str(kv[0]))]
            )
        )
    return 0


def _fiber_probs(model: str, lam, n: int, x: RateParams) -> dict:
    """Stationary law via projection fibers over the conjugate-shape queues."""
    shape = conjugate(lam)
    if model == "tasep":
        fibers: dict = {}
        total = 0
        for q in enumerate_queues(shape, n, "fermionic"):
            w = project(q)
            fibers[w] = fibers.get(w, 0) + 1
            total += 1
        return {w: Fraction(c, total) for w, c in fibers.items()}
    if model in ("tazrp", "ktazrp"):
        if model == "ktazrp":
            x = RateParams.ones(n)
        weights: dict = {}
        z = Fraction(0)
        for d in enumerate_queues(shape, n, "bosonic"):
            w = project(d)
            wt = d.weight().evaluate(x.x)
            weights[w] = weights.get(w, Fraction(0)) + wt
            z += wt
        return {w: v / z for w, v in weights.items()}
    if model == "mlq-fermionic":
        states = list(enumerate_queues(lam, n, "fermionic"))
        return {s: Fraction(1, len(states)) for s in states}
    if model == "mlq-bosonic":
        states = list(enumerate_queues(lam, n, "bosonic"))
        z = sum((s.weight().evaluate(x.x) for s in states), Fraction(0))
        return {s: s.weight().evaluate(x.x) / z for s in states}
    raise SchemaError(f"no fiber method for model {model!r}")


def cmd_ring(args) -> int:
    q = documents.parse_queue(_load_json(args.infile))
    if isinstance(q, FermionicMLQ):
        fn = ring_reverse if args.reverse else ring_forward
        image, exit_site = fn(q, args.site)
        rate = Fraction(1)
    else:
        x = _parse_x(args.x, q.n)
        fn = ring_reverse_bosonic if args.reverse else ring_forward_bosonic
        image, exit_site, rate = fn(q, args.site, x)
    _emit(
        {
            "queue": documents.emit_queue(image),
            "exit_site": exit_site,
            "rate": documents.format_fraction(rate),
        }
    )
    return 0


def cmd_enumerate(args) -> int:
    alpha = _parse_int_list(args.alpha)
    try:
        total = count_queues(alpha, args.n, args.kind)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
    if args.count_only:
        print(total)
        return 0
    sink = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        for q in enumerate_queues(alpha, args.n, args.kind):
            sink.write(json.dumps(documents.emit_queue(q)))
            sink.write("\n")
    finally:
        if args.out:
            sink.close()
    return 0


SUITES = {
    "r-invariance": lambda bounds, seed: verify.suite_r_invariance(bounds, seed),
    "projection": lambda bounds, seed: verify.suite_phi_equals_ctm(bounds, seed),
    "stationary-tasep": lambda bounds, seed: _grid_report(verify.suite_stationary_tasep, verify.TASEP_GRID),
    "stationary-tazrp": lambda bounds, seed: _tazrp_grid_report(),
    "ringing": lambda bounds, seed: verify.suite_ringing(bounds, seed),
    "all": lambda bounds, seed: verify.suite_all({"bounds": bounds, "seed": seed}),
}


def _grid_report(fn, grid):
    reports = [fn(lam, n) for lam, n in grid]
    failures = [f for r in reports for f in r.failures]
    return verify.SuiteReport(
        reports[0].suite, {"grid": [[list(lam), n] for lam, n in grid]},
        sum(r.cases for r in reports), failures, sum(r.wall_time for r in reports),
    )


def _tazrp_grid_report():
    reports = []
    for lam, n in verify.TAZRP_GRID:
        for xs in verify.TAZRP_X:
            reports.append(verify.suite_stationary_tazrp(lam, n, RateParams(tuple(Fraction(v) for v in xs[:n]))))
    failures = [f for r in reports for f in r.failures]
    return verify.SuiteReport(
        "stationary-tazrp", {"grid": "desk-scale defaults"}, sum(r.cases for r in reports), failures,
        sum(r.wall_time for r in reports),
    )


def _parse_bounds(text: str | None) -> dict | None:
    if not text:
        return None
    out = {}
    for pair in text.split(","):
        key, _, val = pair.partition("=")
        if not val:
            raise SchemaError(f"bad bounds entry {pair!r}, expected key=value")
        try:
            out[key.strip()] = int(val)
        except ValueError as exc:
            raise SchemaError(f"bad bounds value {val!r}") from exc
    return out


def cmd_verify(args) -> int:
    if args.witness:
        witness = _load_json(args.witness)
        ok = verify.replay_witness(witness)
        print("witness reproduces" if ok else "witness does NOT reproduce", file=sys.stderr)
        return 0 if ok else 4
    if args.suite not in SUITES:
        raise SchemaError(f"unknown suite {args.suite!r}; choose from {sorted(SUITES)}")
    bounds = _parse_bounds(args.bounds)
    report = SUITES[args.suite](bounds, args.seed)
    print(report.to_text(), file=sys.stderr)
    _emit(report.to_dict())
    return 0 if report.passed else 4


def cmd_render(args) -> int:
    doc = _load_json(args.infile)
    kind = doc.get("kind") if isinstance(doc, dict) else None
    if kind in ("fermionic", "bosonic"):
        print(documents.render_queue(documents.parse_queue(doc)))
    elif kind in ("fermionic_word", "bosonic_word"):
        print(documents.render_word(documents.parse_word(doc)))
    else:
        raise SchemaError(f"cannot render document of kind {kind!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mlq", description="Multiline queues, projections, and ring processes.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("project", help="project a queue to a ring word")
    p.add_argument("--in", dest="infile", required=True, help="queue JSON file, or - for stdin")
    p.add_argument("--trace", action="store_true", help="include the per-row labelled words")
    p.add_argument("--method", choices=("label", "ctm"), default="label")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("sigma", help="twist two adjacent rows")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--i", type=int, required=True, help="row index, 1-based from the bottom")
    p.add_argument("--check-braid", action="store_true", help="also verify the involution and braid relations here")
    p.set_defaults(func=cmd_sigma)

    p = sub.add_parser("stationary", help="stationary distribution of a ring process")
    p.add_argument("--model", required=True, choices=("tasep", "tazrp", "ktazrp", "mlq-fermionic", "mlq-bosonic"))
    p.add_argument("--lambda", dest="lam", required=True, help="comma-separated content/shape, e.g. 2,1")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", default=None, help="comma-separated site rates, default all ones")
    p.add_argument("--method", choices=("exact", "mlq", "mc"), default="exact")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jumps", type=int, default=100_000)
    p.set_defaults(func=cmd_stationary)

    p = sub.add_parser("ring", help="one ringing transition of a queue")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--site", type=int, required=True)
    p.add_argument("--reverse", action="store_true")
    p.add_argument("--x", default=None)
    p.set_defaults(func=cmd_ring)

    p = sub.add_parser("enumerate", help="stream all queues of a given shape")
    p.add_argument("--alpha", required=True, help="comma-separated row sizes, bottom row first")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kind", choices=("fermionic", "bosonic"), required=True)
    p.add_argument("--count-only", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", default="all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bounds", default=None, help="comma-separated key=value overrides")
    p.add_argument("--witness", default=None, help="replay a witness JSON file instead of running a suite")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("render", help="plain-text dot diagram of a queue or word")
    p.add_argument("--in", dest="infile", required=True)
    p.set_defaults(func=cmd_render)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except (ShapeError, ChainError) as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, IndexError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
