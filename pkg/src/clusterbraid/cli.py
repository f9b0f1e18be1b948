"""Command-line entry point.  Every command prints one JSON report on stdout.

Exit status is 0 when the report's status is ``pass``, 1 otherwise, and 2
for usage errors or malformed input.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from pathlib import Path

from . import webs
from .cluster import RationalPair, mutation_path, var_key
from .exact import MultiPoly
from .explorer import enumerate_clusters, enumerate_quiver_classes, orbit, plucker_labels
from .fock_goncharov import Triangulation, fg_function, flip_sequence, generic_flag_config, triangulation_seed
from .grassmannian import GenericConfig, frozen_indices, matrix_ring, plucker_poly, scott_initial_seed
from .identities import braid_relation, image_columns, quasi_isomorphism_suite, twist_suite
from .maps import GroupWord, dot_action, parse_expr, scalar_invariant
from .quiver import ExtQuiver, canonical_form, mutate, restrict_mutable
from .suites import criteria_for_tier, run_acceptance

RELATIONS = ("adjacent", "inverse", "rho", "rho-inverse", "distant")


class UsageError(Exception):
    pass


# input helpers -----------------------------------------------------------------------


def read_json(path: str):
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: not valid JSON ({exc})") from exc


def parse_index(text: str) -> tuple[int, ...]:
    """``2,3,4,7`` or, when every index is a single digit, ``2347``."""
    text = text.strip()
    try:
        if "," in text:
            return tuple(int(t) for t in text.split(","))
        return tuple(int(c) for c in text)
    except ValueError as exc:
        raise UsageError(f"bad index list {text!r}") from exc


def parse_vertices(values: list[str]) -> list[int]:
    """1-based vertex labels given as repeated or comma-separated values."""
    out = []
    for v in values:
        for t in v.split(","):
            if t.strip():
                try:
                    out.append(int(t))
                except ValueError as exc:
                    raise UsageError(f"bad vertex {t!r}") from exc
    return out


def load_config(path: str, k: int, n: int) -> GenericConfig:
    """A k x n JSON matrix whose entries are numbers or polynomial text in x_{i,j}."""
    rows = read_json(path)
    if len(rows) != k or any(len(r) != n for r in rows):
        raise UsageError(f"{path}: expected a {k} x {n} matrix")
    ring = matrix_ring(k, n)
    cols = tuple(tuple(ring.parse(str(rows[i][j])) for i in range(k)) for j in range(n))
    return GenericConfig(k, n, cols)


def load_diagram(path: str) -> webs.TensorDiagram:
    return webs.TensorDiagram.from_json(read_json(path))


def plucker_name(k: int, n: int):
    labels = plucker_labels(k, n)

    def name(x) -> str:
        if isinstance(x, MultiPoly):
            index = labels.get(var_key(x))
            if index is not None:
                return "D" + ",".join(map(str, index))
        return str(x)

    return name


def checks_status(reports) -> str:
    return "pass" if all(r.passed for r in reports) else "fail"


def strip_timing(data: dict) -> dict:
    data = dict(data)
    data.pop("seconds", None)
    return data


# commands ------------------------------------------------------------------------------


def cmd_quiver(args):
    q = ExtQuiver.from_json(read_json(args.input))
    if args.action == "mutate":
        path = [v - 1 for v in parse_vertices(args.at)]
        for v in path:
            if not 0 <= v < q.n_mutable:
                raise UsageError(f"vertex {v + 1} is not mutable")
            q = mutate(q, v)
        return "pass", {"sequence": [v + 1 for v in path], "quiver": q.to_json()}
    form = canonical_form(restrict_mutable(q) if args.mutable_only else q)
    findings = {"canonical_form": form.hex(), "mutable_only": args.mutable_only}
    if args.compare:
        other = ExtQuiver.from_json(read_json(args.compare))
        other_form = canonical_form(restrict_mutable(other) if args.mutable_only else other)
        findings["isomorphic"] = form == other_form
        return ("pass" if form == other_form else "fail"), findings
    return "pass", findings


def cmd_seed(args):
    k, n = args.grassmannian
    if args.input:
        from .cluster import Seed

        seed = Seed.from_json(read_json(args.input), matrix_ring(k, n))
    else:
        seed, _ = scott_initial_seed(k, n)
    path = [v - 1 for v in parse_vertices(args.at or [])]
    if args.action == "mutate":
        for v in path:
            if not 0 <= v < seed.n_mutable:
                raise UsageError(f"vertex {v + 1} is not mutable")
        seed = mutation_path(seed, path)
    name = plucker_name(k, n)
    entries = [name(x) for x in seed.cluster]
    findings = {
        "grassmannian": [k, n],
        "sequence": [v + 1 for v in path],
        "quiver": seed.quiver.to_json(),
        "cluster": entries,
        "non_plucker_entries": sum(1 for e in entries if not e.startswith("D")),
    }
    polynomial = all(isinstance(x, MultiPoly) for x in seed.cluster)
    findings["polynomial_entries"] = polynomial
    if not polynomial:
        findings["cluster"] = [
            {"numerator": str(x.num), "denominator": str(x.den)} if isinstance(x, RationalPair) else str(x)
            for x in seed.cluster
        ]
    return "pass", findings


def cmd_explore(args, figures: Path | None):
    from .suites import EXPECTED_CLASSES

    if args.quiver:
        q = ExtQuiver.from_json(read_json(args.quiver))
        key = None
    else:
        k, n = args.grassmannian
        seed, _ = scott_initial_seed(k, n)
        q = seed.quiver
        key = (k, n)
    atlas = enumerate_quiver_classes(
        q, identify_opposite=args.identify_opp, budget=args.budget, threads=args.threads
    )
    findings = atlas.summary()
    flags = [atlas.complete]
    if key in EXPECTED_CLASSES and not args.identify_opp:
        want = EXPECTED_CLASSES[key]
        findings["expected"] = {"classes": want[0], "cycles": want[1]}
        flags.append((atlas.class_count, atlas.cycle_rank) == want)
    if args.clusters:
        if args.quiver:
            raise UsageError("--clusters needs --grassmannian")
        clusters = enumerate_clusters(seed, budget=args.cluster_budget)
        findings["finite_type"] = clusters.summary()
        flags.append(clusters.complete)
    if args.out:
        Path(args.out).write_text(json.dumps(atlas.to_json(), sort_keys=True) + "\n")
        findings["atlas"] = args.out
    if figures:
        findings["figures"] = [str(p) for p in plot_class_depths(atlas, figures)]
    if all(flags):
        status = "pass"
    else:
        status = "fail" if atlas.complete else "partial"
    return status, findings


def plot_class_depths(atlas, directory: Path) -> list[Path]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    depths = [len(p) for p in atlas.witness]
    counts = [depths.count(d) for d in range(max(depths) + 1)]
    directory.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.bar(range(len(counts)), counts)
    ax.set_xlabel("mutation distance from the initial quiver")
    ax.set_ylabel("new classes")
    ax.set_title(f"{atlas.class_count} classes, cycle rank {atlas.cycle_rank}")
    fig.tight_layout()
    out = directory / "class_depths.png"
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return [out]


def cmd_braid(args):
    if args.action == "twist":
        reports = twist_suite(args.k, args.n)
    else:
        reports = [braid_relation(args.k, args.n, args.relation, args.i)]
    return checks_status(reports), {"checks": [strip_timing(r.to_json()) for r in reports]}


def cmd_map(args):
    word = GroupWord.parse(args.word, args.k, args.n)
    if args.action == "apply":
        m = word.as_map()
        if args.point:
            image = m.apply(load_config(args.point, args.k, args.n)).columns
        else:
            image = image_columns(m, args.n)
        rows = [[str(col[i]) for col in image] for i in range(args.k)]
        return "pass", {"word": str(word), "image": rows}
    if bool(args.var) == bool(args.expr):
        raise UsageError("give exactly one of --var and --expr")
    if args.var:
        x = plucker_poly(args.k, args.n, parse_index(args.var))
    else:
        x = scalar_invariant(parse_expr(args.expr), args.k, args.n)
    known = {var_key(plucker_poly(args.k, args.n, s)): "".join(map(str, s)) for s in _subsets(args.k, args.n)}
    result = dot_action(word, x, known=dict(known))
    labels = ["D" + "".join(map(str, s)) for s in frozen_indices(args.k, args.n)]
    return "pass", {
        "word": str(word),
        "core": known.get(result.key) or str(result.core),
        "core_terms": len(result.core),
        "is_plucker": result.key in known,
        "frozen_factor": result.monomial.to_json(labels),
    }


def _subsets(k, n):
    from .grassmannian import all_k_subsets

    return all_k_subsets(k, n)


def cmd_qi(args):
    reports = quasi_isomorphism_suite()
    return checks_status(reports), {"checks": [strip_timing(r.to_json()) for r in reports]}


def cmd_web(args):
    if args.action == "example":
        if args.name == "product":
            d = webs.product_124_135()
        elif args.name == "cycle":
            d = webs.single_cycle_web()
        else:
            if not args.n or not args.index:
                raise UsageError("a tripod needs --n and --index")
            d = webs.tripod(args.n, *parse_index(args.index))
        return "pass", {"web": d.to_json(), "summary": d.describe()}
    if not args.input:
        raise UsageError(f"web {args.action} needs --in")
    d = load_diagram(args.input)
    if args.action == "reduce":
        expr = webs.reduce(d, rng=random.Random(args.seed))
        terms = expr.terms()
        findings = expr.to_json()
        findings["term_count"] = len(terms)
        findings["all_non_elliptic"] = all(webs.is_non_elliptic(t) for _, t in terms)
        return ("pass" if findings["all_non_elliptic"] else "fail"), findings
    if args.action == "arborize":
        out = webs.arborize(d)
        return "pass", {
            "web": out.to_json(),
            "summary": out.describe(),
            "changed": out.key != d.key,
            "indecomposable": webs.is_indecomposable(d),
        }
    if args.action == "eval":
        config = load_config(args.point, 3, d.n) if args.point else GenericConfig.generic(3, d.n)
        return "pass", {"value": str(webs.evaluate(d, config))}
    if args.action == "compatible":
        if not args.with_:
            raise UsageError("web compatible needs --with")
        other = load_diagram(args.with_)
        return "pass", {"compatible": webs.compatible(d, other)}
    try:
        pos = webs.layout(d)
    except webs.LayoutError as exc:
        return "fail", {"error": str(exc)}
    return "pass", {
        "positions": {str(v + 1): [float(x), float(y)] for v, (x, y) in sorted(pos.items())},
        "exact": {str(v + 1): [str(x), str(y)] for v, (x, y) in sorted(pos.items())},
    }


def cmd_fg(args):
    if args.diagonals:
        diagonals = [parse_index(t) for t in args.diagonals]
        T = Triangulation(args.r, tuple(diagonals))
    else:
        T = Triangulation.fan(args.r)
    if args.action == "seed":
        seed, labels = triangulation_seed(T, args.k)
        return "pass", {
            "diagonals": [list(d) for d in T.diagonals],
            "quiver": seed.quiver.to_json(),
            "labels": [f.label() for f in labels],
        }
    if args.action == "coord":
        if not args.vertices or not args.weights:
            raise UsageError("fg coord needs --vertices and --weights")
        f = fg_function(args.k, parse_index(args.vertices), parse_index(args.weights))
        value = f.evaluate(generic_flag_config(args.k, args.r))
        return "pass", {"label": f.label(), "terms": len(value), "value": str(value)}
    if not args.flip:
        raise UsageError("fg flipcheck needs --flip")
    result = flip_sequence(T, parse_index(args.flip), args.k)
    return result["status"], result


def cmd_orbit(args):
    word = GroupWord.parse(args.word, args.k, args.n)
    if bool(args.var) == bool(args.expr):
        raise UsageError("give exactly one of --var and --expr")
    if args.var:
        index = parse_index(args.var)
        x = plucker_poly(args.k, args.n, index)
        label = None
    else:
        x = scalar_invariant(parse_expr(args.expr), args.k, args.n)
        index, label = None, args.expr
    record = orbit(
        word, x, budget=args.budget, mode=args.mode, seed=args.seed, threads=args.threads,
        x_index=index, start_label=label,
    )
    status = "pass" if record.period is not None and record.period_verified else "partial"
    return status, record.to_json()


def cmd_suite(args):
    if args.criterion:
        from .suites import CRITERIA

        known = set(CRITERIA)
        if any(c not in known for c in args.criterion):
            raise UsageError(f"criteria are numbered {min(known)}..{max(known)}")
        numbers = args.criterion
    else:
        numbers = None

    def progress(result):
        print(result.line(), file=sys.stderr, flush=True)

    if numbers is None:
        results = run_acceptance(args.tier, seed=args.seed, threads=args.threads, on_result=progress)
    else:
        from .suites import CRITERIA

        results = []
        for number in numbers:
            kwargs = {"seed": args.seed} if number in (6, 7, 8) else {}
            if number in (1, 7):
                kwargs["threads"] = args.threads
            results.append(CRITERIA[number](**kwargs))
            progress(results[-1])
    findings = {
        "tier": args.tier if numbers is None else None,
        "criteria": [r.to_json() for r in results],
        "passed": sum(r.passed for r in results),
        "total": len(results),
    }
    if args.timing:
        findings["criterion_seconds"] = {str(r.number): round(r.elapsed, 2) for r in results}
    return ("pass" if all(r.passed for r in results) else "fail"), findings


# argument parsing ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    def global_flags(defaults: bool) -> argparse.ArgumentParser:
        # subcommands repeat the flags without defaults so they never mask earlier values
        p = argparse.ArgumentParser(add_help=False)
        d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
        p.add_argument("--seed", type=int, default=d(0), help="PRNG seed for randomized checks")
        p.add_argument("--threads", type=int, default=d(os.cpu_count() or 1), help="worker processes")
        p.add_argument("--figures", metavar="DIR", default=d(None), help="also write matplotlib figures to DIR")
        p.add_argument("--timing", action="store_true", default=d(False), help="include wall time in the report")
        return p

    common = global_flags(False)

    parser = argparse.ArgumentParser(
        prog="clusterbraid", parents=[global_flags(True)],
        description="Exact cluster-algebra, braid-action and web computations with JSON reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, help_text):
        return sub.add_parser(name, help=help_text, parents=[common])

    p = command("quiver", "mutate or canonically label a quiver")
    p.add_argument("action", choices=("mutate", "canon"))
    p.add_argument("--in", dest="input", required=True, help="quiver JSON ('-' for stdin)")
    p.add_argument("--at", nargs="+", default=[], help="1-based vertices to mutate at, in order")
    p.add_argument("--mutable-only", action="store_true", help="drop frozen vertices before labeling")
    p.add_argument("--compare", help="second quiver JSON to test for isomorphism")

    p = command("seed", "show or mutate a Grassmannian seed")
    p.add_argument("action", choices=("show", "mutate"))
    p.add_argument("--grassmannian", nargs=2, type=int, metavar=("K", "N"), required=True)
    p.add_argument("--in", dest="input", help="seed JSON; defaults to the rectangles seed")
    p.add_argument("--at", nargs="+", help="1-based mutable vertices, in order")

    p = command("explore", "enumerate quiver mutation classes")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--grassmannian", nargs=2, type=int, metavar=("K", "N"))
    g.add_argument("--quiver", help="quiver JSON to start from")
    p.add_argument("--identify-opp", action="store_true", help="identify each quiver with its opposite")
    p.add_argument("--budget", type=int, help="stop after this many classes")
    p.add_argument("--clusters", action="store_true", help="also enumerate clusters (finite type only)")
    p.add_argument("--cluster-budget", type=int, default=20000)
    p.add_argument("--out", help="write the class atlas to this JSON file")

    p = command("braid", "verify braid-group identities")
    p.add_argument("action", choices=("verify", "twist"))
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--relation", choices=RELATIONS, default="adjacent")
    p.add_argument("--i", type=int, default=1)

    p = command("map", "apply a word to a configuration or pull a function back")
    p.add_argument("action", choices=("apply", "pullback"))
    p.add_argument("--word", required=True, help='tokens such as "s1 s2i r"')
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--point", help="k x n JSON matrix to apply the word to")
    p.add_argument("--var", help="Plücker index, e.g. 2,3,4,7")
    p.add_argument("--expr", help="meet expression, e.g. (v7v8v1)^(v4v6v7)^(v2v3)")

    p = command("qi", "verify the quasi-isomorphisms with flag configurations")
    p.add_argument("action", choices=("verify",))

    p = command("web", "tensor diagram operations")
    p.add_argument("action", choices=("reduce", "arborize", "eval", "compatible", "layout", "example"))
    p.add_argument("--in", dest="input", help="diagram JSON ('-' for stdin)")
    p.add_argument("--with", dest="with_", help="second diagram for 'compatible'")
    p.add_argument("--point", help="3 x n JSON matrix for 'eval'; generic when omitted")
    p.add_argument("--name", choices=("product", "cycle", "tripod"), default="product")
    p.add_argument("--n", type=int, help="boundary points of an example tripod")
    p.add_argument("--index", help="example tripod indices, e.g. 1,2,4")

    p = command("fg", "Fock-Goncharov seeds, coordinates and flips")
    p.add_argument("action", choices=("seed", "coord", "flipcheck"))
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--r", type=int, required=True, help="number of flags (polygon vertices)")
    p.add_argument("--diagonals", nargs="+", help="triangulation as pairs like 1,3; fan at 1 when omitted")
    p.add_argument("--vertices", help="flags of a coordinate, e.g. 1,2,3")
    p.add_argument("--weights", help="weights of a coordinate, e.g. 1,1,1")
    p.add_argument("--flip", help="diagonal to flip, e.g. 1,3")

    p = command("orbit", "iterate the dot action of a word on a function")
    p.add_argument("--word", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--var", help="Plücker index, e.g. 2,3,4,7")
    p.add_argument("--expr", help="meet expression")
    p.add_argument("--budget", type=int, default=32)
    p.add_argument("--mode", choices=("specialized", "symbolic"), default="specialized")

    p = command("suite", "run the acceptance criteria")
    p.add_argument("action", choices=("acceptance",))
    p.add_argument("--tier", type=int, choices=(1, 2, 3), default=2)
    p.add_argument("--criterion", type=int, nargs="+", help="run only these criteria")
    return parser


def dispatch(args) -> tuple[str, dict]:
    figures = Path(args.figures) if args.figures else None
    if args.command == "explore":
        return cmd_explore(args, figures)
    handler = {
        "quiver": cmd_quiver, "seed": cmd_seed, "braid": cmd_braid, "map": cmd_map,
        "qi": cmd_qi, "web": cmd_web, "fg": cmd_fg, "orbit": cmd_orbit, "suite": cmd_suite,
    }[args.command]
    return handler(args)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else argv
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be positive")
    start = time.perf_counter()
    try:
        status, findings = dispatch(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (FileNotFoundError, KeyError, ValueError, TypeError, webs.InvalidDiagram, webs.LayoutError) as exc:
        print(f"clusterbraid: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    report = {"command": ["clusterbraid", *argv], "status": status, "findings": findings}
    if args.timing:
        report["wall_time_seconds"] = round(time.perf_counter() - start, 3)
    json.dump(report, sys.stdout, indent=2, sort_keys=True, ensure_ascii=False, default=str)
    sys.stdout.write("\n")
    return 0 if status == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())
