"""Command line front end.

One subcommand per concern; subcommands talk to each other through files
(tree/poset JSON, coloring CSV, decomposition JSON). Exit codes: 0 success,
1 domain failure (error JSON on stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from . import coloring as col
from . import goodsets, hierarchy, ideal, ordinal, ramsey
from .errors import ArborError, StructureError
from .tree import FinitePoset, FiniteTree, gen_tree, sigma_prime

FORMAT_VERSION = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # noqa: D401 - argparse hook
        raise UsageError(f"{self.prog}: {message}")

    def exit(self, status: int = 0, message: str | None = None):
        if status:
            raise UsageError(message or "usage error")
        if message:
            sys.stdout.write(message)
        raise SystemExit(0)


@dataclass
class CommandPlan:
    subcommand: str
    inputs: dict[str, Path] = field(default_factory=dict)
    params: dict[str, Any] = field(default_factory=dict)
    output: Path | None = None
    seed: int | None = None


INPUT_FLAGS = ("tree", "poset", "coloring", "sets", "decomp", "verify", "verify_witness")


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="arbor", description="Finite partition calculus on trees and posets.")
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def ambient(sp, coloring=False, required=True):
        g = sp.add_mutually_exclusive_group(required=required)
        g.add_argument("--tree")
        g.add_argument("--poset")
        if coloring:
            sp.add_argument("--coloring", required=True)
            sp.add_argument("--k", type=int)

    def out(sp):
        sp.add_argument("-o", "--out")

    sp = sub.add_parser("gen", help="generate a tree")
    sp.add_argument("--kind", required=True, choices=["path", "complete", "wq", "random"])
    for name in ("n", "branching", "levels", "m", "d"):
        sp.add_argument(f"--{name}", type=int)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--dot", action="store_true", help="emit DOT instead of JSON")
    out(sp)

    sp = sub.add_parser("color", help="build a pair coloring")
    ambient(sp, required=False)
    sp.add_argument("--kind", required=True, choices=["galvin", "sierpinski", "random", "constant"])
    sp.add_argument("--labels", help="specializing labels, one per node (default: depth)")
    sp.add_argument("--perm", help="second linear order for sierpinski")
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--color", type=int, default=0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tree-out", help="sierpinski: also write the path tree here")
    out(sp)

    sp = sub.add_parser("chi", help="predecessors joined to a node in one color")
    ambient(sp, coloring=True)
    sp.add_argument("--node", type=int, required=True)
    sp.add_argument("--color", type=int, required=True)
    out(sp)

    sp = sub.add_parser("diag", help="diagonal unions and diagonal-ideal membership")
    sp.add_argument("--tree", required=True)
    mode = sp.add_mutually_exclusive_group(required=True)
    mode.add_argument("--sets", help='JSON object {"t": [nodes], ...}')
    mode.add_argument("--family", help="mspecial:<m> | principal:<set> | gens:<set>;<set>")
    sp.add_argument("--set", dest="nodeset", help="comma-separated nodes to test")
    sp.add_argument("--iterate", type=int, help="materialize this many closure rounds")
    out(sp)

    sp = sub.add_parser("nsmember", help="nonstationary-subtree membership")
    sp.add_argument("--tree", required=True)
    sp.add_argument("--set", dest="nodeset", required=True)
    sp.add_argument("--m", type=int, required=True)
    out(sp)

    sp = sub.add_parser("cover", help="minimum antichain cover")
    sp.add_argument("--tree", required=True)
    sp.add_argument("--set", dest="nodeset")
    out(sp)

    sp = sub.add_parser("arrow", help="decide the arrow relation")
    ambient(sp)
    sp.add_argument("--goals")
    sp.add_argument("--method", choices=["prune", "gray"], default="prune")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--witness", help="write a counterexample coloring CSV here")
    sp.add_argument("--verify-witness", help="check that a coloring CSV has no goal-length chain")
    sp.add_argument("--sweep", type=int, help="equal goals 2..SWEEP with --k colors")
    sp.add_argument("--k", type=int, default=2)
    out(sp)

    sp = sub.add_parser("maxchain", help="longest homogeneous chain")
    ambient(sp, coloring=True)
    sp.add_argument("--color", type=int, required=True)
    out(sp)

    sp = sub.add_parser("good", help="build or verify a (rho, sigma)-good decomposition")
    sp.add_argument("--tree", required=True)
    sp.add_argument("--coloring", required=True)
    sp.add_argument("--k", type=int)
    sp.add_argument("--rho", type=int, required=True)
    sp.add_argument("--sigma", required=True, help="comma-separated colors, innermost first")
    sp.add_argument("--chain", help="candidate chain (default: longest root path)")
    sp.add_argument("--verify", help="decomposition JSON to check instead of building")
    out(sp)

    sp = sub.add_parser("refine", help="pigeonhole refinement of a good decomposition")
    sp.add_argument("--tree", required=True)
    sp.add_argument("--coloring", required=True)
    sp.add_argument("--k", type=int)
    sp.add_argument("--decomp", required=True)
    sp.add_argument("--g", required=True, help="g-color per node index, comma-separated")
    sp.add_argument("--xi", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    out(sp)

    sp = sub.add_parser("hier", help="I/J hierarchy report")
    sp.add_argument("--tree", required=True)
    sp.add_argument("--coloring", required=True)
    sp.add_argument("--k", type=int)
    sp.add_argument("--base", action="append", default=[], help="t=<family spec>, repeatable")
    sp.add_argument("--s0", help="S_0 (default: all nodes)")
    sp.add_argument("--S", dest="S", help="set for the Sigma(t, S) table (default: S_0)")
    sp.add_argument("--depth", type=int, default=2)
    out(sp)

    sp = sub.add_parser("sigmaprime", help="tree of chains of a poset")
    sp.add_argument("--poset", required=True)
    out(sp)

    sp = sub.add_parser("ord", help="ordinal arithmetic")
    sp.add_argument("op", choices=["cmp", "add", "indecomposable", "pigeonhole", "verify"])
    sp.add_argument("args", nargs="+")
    out(sp)
    return p


def parse_args(argv: Sequence[str]) -> CommandPlan:
    """Validate ``argv`` into a plan; raises :class:`UsageError`."""
    ns = _build_parser().parse_args(list(argv))
    params = {k: v for k, v in vars(ns).items() if k not in INPUT_FLAGS + ("subcommand", "out")}
    inputs = {}
    for key in INPUT_FLAGS:
        value = getattr(ns, key, None)
        if value is not None:
            path = Path(value)
            if not path.is_file():
                raise UsageError(f"{ns.subcommand}: input file not found: {value}")
            inputs[key] = path
    if ns.subcommand == "arrow" and ns.goals is None and ns.sweep is None:
        raise UsageError("arrow: one of --goals or --sweep is required")
    if ns.subcommand == "diag" and ns.family and ns.nodeset is None and ns.iterate is None:
        raise UsageError("diag: --family needs --set or --iterate")
    if ns.subcommand == "color":
        if ns.kind == "sierpinski" and not ns.perm:
            raise UsageError("color: sierpinski needs --perm")
        if ns.kind != "sierpinski" and "tree" not in inputs and "poset" not in inputs:
            raise UsageError(f"color: {ns.kind} needs --tree or --poset")
    if getattr(ns, "workers", 1) < 1:
        raise UsageError("--workers must be >= 1")
    out = Path(ns.out) if getattr(ns, "out", None) else None
    return CommandPlan(ns.subcommand, inputs, params, out, params.get("seed"))


# -- helpers -------------------------------------------------------------------


def _read(path: Path) -> str:
    try:
        return path.read_text()
    except (OSError, UnicodeDecodeError) as exc:
        raise StructureError(f"cannot read {path}: {exc}") from None


def _ambient(plan: CommandPlan):
    if "tree" in plan.inputs:
        return FiniteTree.from_json(_read(plan.inputs["tree"]))
    if "poset" in plan.inputs:
        return FinitePoset.from_json(_read(plan.inputs["poset"]))
    raise UsageError("need --tree or --poset")


def _coloring(plan: CommandPlan, amb, key: str = "coloring"):
    return col.PairColoring.from_csv(_read(plan.inputs[key]), amb, plan.params.get("k"))


def _ints(text: str | None) -> list[int]:
    if text is None or not text.strip():
        return []
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _emit(plan: CommandPlan, payload: Any) -> None:
    if isinstance(payload, dict):
        payload = {"format_version": FORMAT_VERSION, **payload}
        text = json.dumps(payload, sort_keys=True) + "\n"
    else:
        text = payload
    if plan.output is None:
        sys.stdout.write(text)
    else:
        plan.output.write_text(text)


def _sorted(nodes) -> list[int]:
    return sorted(nodes)


# -- subcommands ---------------------------------------------------------------


def _gen(plan):
    p = plan.params
    names = {"path": ("n",), "complete": ("branching", "levels"), "wq": ("m", "d"), "random": ("n",)}[p["kind"]]
    kwargs = {}
    for name in names:
        if p.get(name) is None:
            raise UsageError(f"gen --kind {p['kind']} needs --{name}")
        kwargs[name] = p[name]
    T = gen_tree(p["kind"], seed=p["seed"], **kwargs)
    _emit(plan, T.to_dot() if p["dot"] else T.to_json())


def _color(plan):
    p = plan.params
    if p["kind"] == "sierpinski":
        perm = _ints(p["perm"])
        c = col.sierpinski_coloring(len(perm), perm)
        if "tree" in plan.inputs:
            T = _ambient(plan)
            labels = _ints(p["labels"]) if p["labels"] else T.depth
            c = col.label_pullback(T, col.SpecializingMap(T, tuple(labels)), c)
        elif p["tree_out"]:
            Path(p["tree_out"]).write_text(c.ambient.to_json())
        _emit(plan, c.to_csv())
        return
    amb = _ambient(plan)
    if p["kind"] == "galvin":
        labels = _ints(p["labels"]) if p["labels"] else getattr(amb, "depth", None)
        if labels is None:
            raise UsageError("color galvin on a poset needs --labels")
        c = col.galvin_coloring(amb, col.SpecializingMap(amb, tuple(labels)))
    elif p["kind"] == "random":
        c = col.random_coloring(amb, p["k"], p["seed"])
    else:
        c = col.constant_coloring(amb, p["color"], p["k"])
    _emit(plan, c.to_csv())


def _chi(plan):
    amb = _ambient(plan)
    c = _coloring(plan, amb)
    nodes = col.c_chi(c, plan.params["node"], plan.params["color"])
    _emit(plan, {"node": plan.params["node"], "color": plan.params["color"], "nodes": _sorted(nodes)})


def _diag(plan):
    T = _ambient(plan)
    p = plan.params
    if "sets" in plan.inputs:
        try:
            raw = json.loads(_read(plan.inputs["sets"]))
            family = {int(t): [int(v) for v in nodes] for t, nodes in raw.items()}
        except (json.JSONDecodeError, AttributeError, TypeError, ValueError):
            raise StructureError('sets file must be a JSON object {"t": [nodes]}') from None
        _emit(plan, {"union": _sorted(ideal.diag_union(T, family))})
        return
    F = ideal.parse_family(T, p["family"])
    if p["iterate"] is not None:
        G = ideal.diag_iterate(T, F, p["iterate"])
        _emit(plan, {"rounds": p["iterate"], "members": [_sorted(m) for m in map(_members, G.member_masks())]})
        return
    res = ideal.in_diag_ideal(T, _ints(p["nodeset"]), F)
    _emit(plan, _membership(res))


def _members(mask):
    from .tree import members

    return members(mask)


def _membership(res: ideal.Membership) -> dict:
    return {"member": res.member, "witness": None if res.witness is None else res.witness.to_dict()}


def _nsmember(plan):
    T = _ambient(plan)
    _emit(plan, _membership(ideal.ns_member(T, _ints(plan.params["nodeset"]), plan.params["m"])))


def _cover(plan):
    T = _ambient(plan)
    X = _ints(plan.params["nodeset"]) if plan.params["nodeset"] is not None else list(T.nodes)
    res = ideal.special_cover(T, X)
    _emit(plan, {"cover": [_sorted(a) for a in res.cover], "min_count": res.min_count})


def _arrow(plan):
    amb = _ambient(plan)
    p = plan.params
    if "verify_witness" in plan.inputs:
        goal = ramsey.ArrowGoal.parse(p["goals"])
        c = col.PairColoring.from_csv(_read(plan.inputs["verify_witness"]), amb, goal.k)
        lengths = [ramsey.max_homog_chain(amb, c, chi).length for chi in range(goal.k)]
        ok = all(length < need for length, need in zip(lengths, goal.goals))
        _emit(plan, {"verdict": "valid" if ok else "invalid", "max_lengths": lengths})
        return
    if p["sweep"] is not None:
        rows = []
        for ell in range(2, p["sweep"] + 1):
            v = ramsey.arrows_decide(amb, (ell,) * p["k"], method=p["method"], workers=p["workers"])
            rows.append({"goals": [ell] * p["k"], "holds": v.holds, "colorings_examined": v.colorings_examined})
        _emit(plan, {"sweep": rows})
        return
    goal = ramsey.ArrowGoal.parse(p["goals"])
    v = ramsey.arrows_decide(amb, goal, method=p["method"], workers=p["workers"])
    payload = {
        "holds": v.holds,
        "witness_coloring_path": None,
        "elapsed_ms": round(v.elapsed_ms, 3),
        "colorings_examined": v.colorings_examined,
        "witness_chain": None if v.witness_chain is None else {"nodes": _sorted(v.witness_chain[0]), "color": v.witness_chain[1]},
    }
    if v.witness_coloring is not None:
        if p["witness"]:
            Path(p["witness"]).write_text(v.witness_coloring.to_csv())
            payload["witness_coloring_path"] = p["witness"]
        else:
            payload["witness_coloring"] = [[u, w, c] for (u, w), c in sorted(v.witness_coloring.values.items())]
    _emit(plan, payload)


def _maxchain(plan):
    amb = _ambient(plan)
    c = _coloring(plan, amb)
    h = ramsey.max_homog_chain(amb, c, plan.params["color"])
    _emit(plan, {"length": h.length, "chain": amb.sort_chain(h.chain), "color": h.color})


def _good(plan):
    T = _ambient(plan)
    c = _coloring(plan, T)
    p = plan.params
    sigma = _ints(p["sigma"])
    if "verify" in plan.inputs:
        D = _load_decomp(plan.inputs["verify"])
        ok = goodsets.is_good(T, c, D, p["rho"], sigma)
        _emit(plan, {"verdict": "valid" if ok else "invalid"})
        return
    if p["chain"] is not None:
        X = _ints(p["chain"])
    else:
        deepest = max(T.nodes, key=lambda v: (T.depth[v], -v))
        X = T.path_to(deepest)
    D = goodsets.build_good(T, c, X, p["rho"], sigma)
    if D is None:
        _emit(plan, {"found": False, "rho": p["rho"], "sigma": sigma, "decomposition": None})
        return
    homog = {str(j): _sorted(goodsets.extract_homog(D, c, j)) for j in sorted(set(sigma))}
    _emit(
        plan,
        {
            "found": True,
            "rho": p["rho"],
            "sigma": sigma,
            "decomposition": D.to_obj(),
            "valid": goodsets.is_good(T, c, D, p["rho"], sigma),
            "homogeneous": homog,
        },
    )


def _load_decomp(path: Path) -> goodsets.GoodDecomposition:
    try:
        data = json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise StructureError(f"invalid JSON: {exc}") from None
    if isinstance(data, dict) and "decomposition" in data:
        data = data["decomposition"]
    return goodsets.GoodDecomposition.from_obj(data)


def _refine(plan):
    T = _ambient(plan)
    c = _coloring(plan, T)
    p = plan.params
    D = _load_decomp(plan.inputs["decomp"])
    g = _ints(p["g"])
    if len(g) != T.n:
        raise UsageError(f"--g needs {T.n} values, one per node")
    r = goodsets.refine_good(D, c, g, p["xi"], p["m"])
    sigma = list(D.colors())
    _emit(
        plan,
        {
            "rho": p["xi"],
            "sigma": sigma,
            "decomposition": r.refined.to_obj(),
            "g_color": r.g_color,
            "valid": goodsets.is_good(T, c, r.refined, p["xi"], sigma),
        },
    )


def _hier(plan):
    T = _ambient(plan)
    c = _coloring(plan, T)
    p = plan.params
    specs = {}
    for item in p["base"]:
        t, sep, spec = item.partition("=")
        if not sep:
            raise UsageError(f"--base expects t=<spec>, got {item!r}")
        try:
            specs[int(t)] = spec
        except ValueError:
            raise UsageError(f"--base node must be an integer, got {t!r}") from None
    s0 = _ints(p["s0"]) if p["s0"] is not None else None
    cfg = hierarchy.HierarchyConfig.from_specs(T, c, specs, s0)
    eng = cfg.engine
    depth = p["depth"]
    levels = eng.s_sequence(depth + 1)
    S = _ints(p["S"]) if p["S"] is not None else cfg.S0
    sigma_table = {str(t): [list(s) for s in eng.sigma_set(t, S)] for t in T.nodes}
    inclusion, equality = True, True
    for n in range(depth + 1):
        for sigma in _sequences(c.k, n):
            for t in levels[n]:
                for x in _submasks(T.down[t]):
                    in_j = eng.in_J(t, sigma, x)
                    in_all = all(eng.in_I(t, sigma + (i,), x) for i in range(c.k))
                    inclusion &= (not in_j) or in_all
                    equality &= in_j == in_all
    _emit(
        plan,
        {
            "levels": [_sorted(s) for s in levels],
            "sigma_table": sigma_table,
            "principal": cfg.is_principal,
            "J_subset_meet_I": inclusion,
            "J_equals_meet_I": equality,
        },
    )


def _sequences(k, n):
    import itertools

    return list(itertools.product(range(k), repeat=n))


def _submasks(u):
    out, x = [], u
    while True:
        out.append(x)
        if x == 0:
            return out
        x = (x - 1) & u


def _sigmaprime(plan):
    P = _ambient(plan)
    sp = sigma_prime(P)
    _emit(plan, {"parent": list(sp.tree.parent), "chains": [list(ch) for ch in sp.chains], "max_map": list(sp.max_map)})


def _ord(plan):
    op, args = plan.params["op"], plan.params["args"]
    need = {"cmp": 2, "add": 2, "indecomposable": 1, "pigeonhole": 2, "verify": 3}[op]
    if len(args) != need:
        raise UsageError(f"ord {op} takes {need} arguments")
    if op == "cmp":
        result: Any = ordinal.ord_compare(ordinal.parse_ordinal(args[0]), ordinal.parse_ordinal(args[1]))
    elif op == "add":
        result = str(ordinal.ord_add(ordinal.parse_ordinal(args[0]), ordinal.parse_ordinal(args[1])))
    elif op == "indecomposable":
        result = ordinal.is_indecomposable(ordinal.parse_ordinal(args[0]))
    elif op == "pigeonhole":
        result = str(ordinal.pigeonhole_goal(ordinal.parse_ordinal(args[0]), _int(args[1])))
    else:
        rho, xi, m = (_int(a) for a in args)
        result = ordinal.verify_pigeonhole_finite(rho, xi, m)
    _emit(plan, {"op": op, "args": args, "result": result})


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"expected an integer, got {text!r}") from None


HANDLERS = {
    "gen": _gen,
    "color": _color,
    "chi": _chi,
    "diag": _diag,
    "nsmember": _nsmember,
    "cover": _cover,
    "arrow": _arrow,
    "maxchain": _maxchain,
    "good": _good,
    "refine": _refine,
    "hier": _hier,
    "sigmaprime": _sigmaprime,
    "ord": _ord,
}


def _fail(code: str, message: str) -> None:
    sys.stderr.write(json.dumps({"format_version": FORMAT_VERSION, "error": code, "message": message}) + "\n")


def execute(plan: CommandPlan) -> int:
    try:
        HANDLERS[plan.subcommand](plan)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return 2
    except ArborError as exc:
        _fail(exc.code, str(exc))
        return 1
    except RecursionError:
        _fail("RecursionError", "input too deep")
        return 1
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    try:
        plan = parse_args(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return 2
    return execute(plan)


if __name__ == "__main__":
    raise SystemExit(main())
