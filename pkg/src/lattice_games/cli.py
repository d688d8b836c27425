"""Command-line front end: solve games, test cores, share network traffic.

Reports are deterministic: JSON with keys in a fixed order and every
rational rendered "p/q", or CSV with an extra column of decimal
approximations clearly marked as such.  Exit codes: 0 on success, 1 when
the self-check bundle finds a mismatch, 2 on malformed input, 3 when a
size cap is exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from fractions import Fraction
from itertools import combinations
from math import comb

from .lattice import SizeLimitError, bell, class_count, class_vectors, ground_cap, lattice_for
from .transform import (
    LatticeGame,
    MobiusCoefficients,
    format_fraction,
    parse_fraction,
    zeta_game,
)
from .games import clustering_restrict, is_supermodular, is_totally_positive
from .solutions import (
    SOLVERS,
    cu,
    egalitarian,
    is_fixed_point,
    myerson,
    shapley_chain,
    shapley_dividends,
    split_to_nodes,
    su,
    symmetric_solution,
    transport_solution,
)
from .coresep import core_contains, core_feasible, separability_test


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as err:
        raise ValueError(f"{path}: {err}") from None


def _print_json(report):
    print(json.dumps(report, indent=2))


def _print_csv(header, rows):
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    sys.stdout.write(out.getvalue())


def _approx(text):
    """Decimal rendering of a "p/q" string, for the approximate column."""
    try:
        return repr(float(Fraction(text)))
    except (ValueError, ZeroDivisionError):
        return ""


def _edge_key(atom):
    for b in atom.blocks:
        if len(b) == 2:
            return f"{b[0]},{b[1]}"
    raise AssertionError("pair atom without a pair block")


def _parse_weights(path, n):
    raw = _load_json(path)
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: weight file must map edges to weight pairs")
    weights = {}
    for key, pair in raw.items():
        edge = _parse_edge(key, n)
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ValueError(f"weights for edge {key} must be a pair")
        weights[edge] = (parse_fraction(pair[0]), parse_fraction(pair[1]))
    return weights


def _parse_edge(key, n):
    try:
        i, j = (int(tok) for tok in str(key).split(","))
    except ValueError:
        raise ValueError(f"bad edge key {key!r}; expected \"i,j\"") from None
    if i == j or not (1 <= i <= n and 1 <= j <= n):
        raise ValueError(f"edge {key!r} is not a pair of distinct elements of 1..{n}")
    return (i, j) if i < j else (j, i)


# ---------------------------------------------------------------------------
# solve


def _load_game(args):
    game = LatticeGame.from_payload(_load_json(args.game), max_n=args.max_n)
    cluster_label = None
    if args.cluster_file:
        raw = _load_json(args.cluster_file)
        if isinstance(raw, dict):
            raw = raw.get("cluster")
        if not isinstance(raw, str):
            raise ValueError(f"{args.cluster_file}: expected an element key")
        cluster = game.lattice.parse_element(raw)
        game = clustering_restrict(game, cluster)
        cluster_label = game.lattice.key(cluster)
    shift = Fraction(0)
    if not args.no_bottom_normalize:
        game, shift = game.normalize_bottom()
    return game, shift, cluster_label


def cmd_solve(args):
    game, shift, cluster_label = _load_game(args)
    if args.solver == "myerson":
        if not args.graph_file:
            raise ValueError("the myerson solver needs --graph-file")
        sol = myerson(game, _load_edges(args.graph_file))
    else:
        sol = SOLVERS[args.solver](game)
    report = {"command": "solve", "solver": args.solver}
    report.update(sol.payload())
    report["normalized"] = not args.no_bottom_normalize
    report["bottomShift"] = format_fraction(shift)
    if cluster_label is not None:
        report["clustering"] = cluster_label
    nodes = None
    if args.split is not None:
        weights = None
        if args.split != "equal":
            weights = _parse_weights(args.split, game.lattice.n)
        nodes = split_to_nodes(sol, weights)
        report["nodeShares"] = nodes.payload()["shares"]
    if args.format == "csv":
        rows = [("meta", "lattice", report["lattice"], ""),
                ("meta", "n", str(report["n"]), ""),
                ("meta", "solver", args.solver, ""),
                ("meta", "bottomShift", report["bottomShift"], "")]
        for key, text in report["shares"].items():
            rows.append(("share", key, text, _approx(text)))
        rows.append(("efficiency", "", report["efficiencyCheck"],
                     _approx(report["efficiencyCheck"])))
        if nodes is not None:
            for key, text in report["nodeShares"].items():
                rows.append(("node", key, text, _approx(text)))
        _print_csv(("kind", "key", "value", "approx"), rows)
    else:
        _print_json(report)
    return 0


def _load_edges(path):
    raw = _load_json(path)
    if isinstance(raw, dict):
        raw = raw.get("edges")
    if not isinstance(raw, list):
        raise ValueError(f"{path}: expected an \"edges\" list")
    return raw


# ---------------------------------------------------------------------------
# core


def cmd_core(args):
    game, shift, _ = _load_game(args)
    result = core_feasible(game)
    supermod = is_supermodular(game)
    positive = is_totally_positive(game)
    lat = game.lattice
    report = {"command": "core"}
    report.update(result.payload())
    report["violated"] = []
    report["normalized"] = not args.no_bottom_normalize
    report["bottomShift"] = format_fraction(shift)
    report["supermodular"] = bool(supermod)
    report["supermodularWitness"] = (
        None if supermod else [lat.key(supermod.witness[0]),
                               lat.key(supermod.witness[1])])
    report["totallyPositive"] = bool(positive)
    report["negativeDividendAt"] = None if positive else lat.key(positive.witness)
    if args.format == "csv":
        rows = [("meta", "lattice", report["lattice"], ""),
                ("meta", "n", str(report["n"]), ""),
                ("status", "", report["status"], ""),
                ("supermodular", "", str(report["supermodular"]).lower(), ""),
                ("totallyPositive", "", str(report["totallyPositive"]).lower(), "")]
        for key, text in report.get("witness", {}).items():
            rows.append(("witness", key, text, _approx(text)))
        cert = report.get("certificate")
        if cert:
            for key, text in cert["lowerBounds"].items():
                rows.append(("certificateLowerBound", key, text, _approx(text)))
            rows.append(("certificateEfficiency", "", cert["efficiency"],
                         _approx(cert["efficiency"])))
        _print_csv(("kind", "key", "value", "approx"), rows)
    else:
        _print_json(report)
    return 0


# ---------------------------------------------------------------------------
# netshare


def _read_trace(path):
    """Traffic trace: JSON with a periods array, or CSV period,i,j,volume."""
    if path.endswith(".csv"):
        return _read_trace_csv(path)
    raw = _load_json(path)
    if not isinstance(raw, dict) or "periods" not in raw:
        raise ValueError(f"{path}: expected an object with \"n\" and \"periods\"")
    n = raw.get("n")
    if isinstance(n, bool) or not isinstance(n, int):
        raise ValueError(f"{path}: \"n\" must be an integer")
    periods = []
    for idx, entry in enumerate(raw["periods"]):
        if not isinstance(entry, dict):
            raise ValueError(f"{path}: period {idx} is not an object")
        label = entry.get("period", idx)
        volumes = entry.get("volumes", {})
        if not isinstance(volumes, dict):
            raise ValueError(f"{path}: period {label}: \"volumes\" must be an object")
        edges = {}
        for key, text in volumes.items():
            edge = _parse_edge(key, n)
            if edge in edges:
                raise ValueError(f"period {label}: duplicate edge {key}")
            edges[edge] = _volume(text, label, key)
        periods.append({"period": label, "volumes": edges,
                        "clustering": entry.get("clustering")})
    return n, periods


def _read_trace_csv(path):
    periods = []
    seen = {}
    n = 0
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["period", "i", "j", "volume"]:
            raise ValueError(f"{path}: expected header period,i,j,volume")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 4:
                raise ValueError(f"{path}:{lineno}: expected 4 columns")
            label, i, j, volume = (cell.strip() for cell in row)
            try:
                i, j = int(i), int(j)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: bad edge {i!r},{j!r}") from None
            n = max(n, i, j)
            if label not in seen:
                seen[label] = {"period": label, "volumes": {}, "clustering": None}
                periods.append(seen[label])
            entry = seen[label]
            if i == j:
                raise ValueError(f"{path}:{lineno}: edge {i},{j} is a loop")
            edge = (i, j) if i < j else (j, i)
            if edge in entry["volumes"]:
                raise ValueError(f"period {label}: duplicate edge {i},{j}")
            entry["volumes"][edge] = _volume(volume, label, f"{i},{j}")
    if n < 2:
        raise ValueError(f"{path}: trace names fewer than two network elements")
    for entry in periods:
        for i, j in entry["volumes"]:
            if not (1 <= i < j <= n):
                raise ValueError(f"edge {i},{j} is out of range for n={n}")
    return n, periods


def _volume(text, label, key):
    q = parse_fraction(text)
    if q < 0:
        raise ValueError(f"period {label}: negative volume on edge {key}")
    return q


def _cluster_map(path):
    raw = _load_json(path)
    if isinstance(raw, str):
        return lambda label: raw
    if isinstance(raw, dict):
        return lambda label: raw.get(str(label))
    raise ValueError(f"{path}: expected a partition key or a period-to-key object")


def cmd_netshare(args):
    n, periods = _read_trace(args.trace)
    solver = SOLVERS[args.solver]
    lat = lattice_for("P^N", n, args.max_n)
    atom_of = {_parse_edge(_edge_key(a), n): a for a in lat.atoms}
    cluster_of = _cluster_map(args.cluster_file) if args.cluster_file else lambda label: None
    weights = None
    if args.split and args.split != "equal":
        weights = _parse_weights(args.split, n)
    out_periods = []
    for entry in periods:
        coeffs = {atom_of[edge]: q for edge, q in entry["volumes"].items()}
        game = MobiusCoefficients(lat, coeffs).zeta_expand()
        label = cluster_of(entry["period"]) or entry["clustering"]
        if label is not None:
            cluster = lat.parse_element(label)
            game = clustering_restrict(game, cluster)
            label = lat.key(cluster)
        sol = solver(game)
        nodes = split_to_nodes(sol, weights)
        out_periods.append({
            "period": entry["period"],
            "clustering": label,
            "edgeShares": {_edge_key(a): format_fraction(sol[a]) for a in lat.atoms},
            "nodeShares": nodes.payload()["shares"],
            "efficiencyCheck": format_fraction(sol.efficiency()),
            "fixedPoint": is_fixed_point(solver, game),
        })
    report = {"command": "netshare", "n": n, "solver": args.solver,
              "split": "equal" if weights is None else args.split,
              "periods": out_periods}
    if args.format == "csv":
        rows = []
        for entry in out_periods:
            label = entry["period"]
            rows.append((label, "clustering", "", entry["clustering"] or "", ""))
            for key, text in entry["edgeShares"].items():
                rows.append((label, "edgeShare", key, text, _approx(text)))
            for key, text in entry["nodeShares"].items():
                rows.append((label, "nodeShare", key, text, _approx(text)))
            rows.append((label, "efficiency", "", entry["efficiencyCheck"],
                         _approx(entry["efficiencyCheck"])))
            rows.append((label, "fixedPoint", "", str(entry["fixedPoint"]).lower(), ""))
        _print_csv(("period", "kind", "key", "value", "approx"), rows)
    else:
        _print_json(report)
    return 0


# ---------------------------------------------------------------------------
# selfcheck: the worked examples as an executable regression bundle


def _expect(cond, detail):
    return None if cond else detail


def _check_pair_shares_on_partitions():
    lat = lattice_for("P^N", 3)
    z = zeta_game(lat, lat.parse_element("1,2|3"))
    su_vec = su(z).vector()
    cu_vec = cu(z).vector()
    return _expect(su_vec == (1, 0, 0)
                   and cu_vec == (Fraction(2, 3), Fraction(1, 6), Fraction(1, 6)),
                   f"su {su_vec}, cu {cu_vec}")


def _check_pair_shares_on_embedded():
    lat = lattice_for("E^N", 2)
    z = zeta_game(lat, lat.parse_element(";1,2"))
    su_vec = su(z).vector()
    cu_vec = cu(z).vector()
    return _expect(su_vec == (0, 0, 1)
                   and cu_vec == (Fraction(1, 6), Fraction(1, 6), Fraction(2, 3)),
                   f"su {su_vec}, cu {cu_vec}")


def _check_transport_of_pair_example():
    e2 = lattice_for("E^N", 2)
    p3 = lattice_for("P^N", 3)
    z = zeta_game(e2, e2.parse_element(";1,2"))
    moved = transport_solution(su(z))
    target = su(zeta_game(p3, p3.parse_element("1,2|3")))
    return _expect(moved == target, "transported shares disagree")


def _check_rank_thirds():
    for tag, n in [("P^N", 3), ("E^N", 2)]:
        lat = lattice_for(tag, n)
        g = LatticeGame(lat, {x: lat.rank(x) for x in lat.elements})
        for solver in (su, cu, egalitarian):
            vec = solver(g).vector()
            if vec != (Fraction(2, 3),) * 3:
                return f"{tag} {solver.__name__} gave {vec}"
    return None


def _check_full_surplus_shares():
    lat = lattice_for("P^N", 3)
    g = 3 * zeta_game(lat, lat.top)
    for solver in (su, cu, egalitarian, symmetric_solution):
        vec = solver(g).vector()
        if vec != (1, 1, 1):
            return f"{solver.__name__} gave {vec}"
    return None


def _check_size_uniform():
    lat = lattice_for("P^N", 4)
    g = LatticeGame(lat, {x: lat.size(x) for x in lat.elements})
    fast = symmetric_solution(g).vector()
    return _expect(fast == su(g).vector() == cu(g).vector() == (1,) * 6,
                   f"got {fast}")


def _check_empty_core():
    lat = lattice_for("P^N", 3)
    g = LatticeGame(lat, {x: lat.rank(x) for x in lat.elements})
    report = core_feasible(g)
    return _expect(is_supermodular(g).holds
                   and not is_totally_positive(g).holds
                   and report.status == "empty"
                   and report.certificate is not None,
                   f"status {report.status}")


def _check_size_core_witness():
    lat = lattice_for("P^N", 3)
    g = LatticeGame(lat, {x: lat.size(x) for x in lat.elements})
    report = core_feasible(g)
    return _expect(report.status == "nonempty"
                   and core_contains(g, report.witness).holds,
                   f"status {report.status}")


def _check_myerson_path():
    lat = lattice_for("2^N", 3)
    sol = myerson(zeta_game(lat, frozenset({1, 3})), [(1, 2), (2, 3)])
    third = Fraction(1, 3)
    return _expect(sol.vector() == (third, third, third), f"got {sol.vector()}")


def _check_shapley_forms():
    rng = random.Random(2024)
    lat = lattice_for("2^N", 4)
    g = LatticeGame(lat, {x: Fraction(rng.randint(-20, 20), rng.randint(1, 5))
                          for x in lat.elements})
    if shapley_chain(g) != shapley_dividends(g):
        return "permutation and dividend forms disagree"
    z = zeta_game(lat, frozenset({1, 3}))
    vec = shapley_dividends(z).vector()
    return _expect(vec == (Fraction(1, 2), 0, Fraction(1, 2), 0), f"got {vec}")


def _check_rank_separation():
    lat = lattice_for("P^N", 4)
    g = LatticeGame(lat, {x: lat.rank(x) for x in lat.elements})
    report = separability_test(g)
    if not report:
        return f"rank reported non-separable at {lat.key(report.violated)}"
    base = report.family.base
    if any(base[g_] != len(g_) - 1 for g_ in base if g_):
        return "base is not |A|-1"
    variant = _alternating_pattern(4, lambda k: (-1) ** k if k > 1 else 0)
    return _expect(report.family.contains(variant), "alternating variant rejected")


def _check_size_separation():
    lat = lattice_for("P^N", 4)
    g = LatticeGame(lat, {x: lat.size(x) for x in lat.elements})
    report = separability_test(g)
    if not report:
        return f"size reported non-separable at {lat.key(report.violated)}"
    base = report.family.base
    if any(base[g_] != len(g_) * (len(g_) - 1) // 2 for g_ in base):
        return "base is not C(|A|,2)"
    variant = _alternating_pattern(4, lambda k: (-1) ** (k + 1) if k != 2 else 0)
    return _expect(report.family.contains(variant), "alternating variant rejected")


def _alternating_pattern(n, mu_of_size):
    v = {}
    for size in range(n + 1):
        for combo in combinations(range(1, n + 1), size):
            v[frozenset(combo)] = sum(comb(size, k) * Fraction(mu_of_size(k))
                                      for k in range(size + 1))
    return v


def _check_nonseparable_witness():
    lat = lattice_for("P^N", 4)
    report = separability_test(zeta_game(lat, lat.parse_element("1,2|3,4")))
    return _expect(not report and report.violated == lat.parse_element("1,2|3,4"),
                   "two-pair indicator not flagged")


def _check_netshare_volumes():
    lat = lattice_for("P^N", 3)
    volumes = {(1, 2): Fraction(4), (1, 3): Fraction(1), (2, 3): Fraction(0)}
    atom_of = {_parse_edge(_edge_key(a), 3): a for a in lat.atoms}
    game = MobiusCoefficients(
        lat, {atom_of[e]: q for e, q in volumes.items()}).zeta_expand()
    sol = su(game)
    if sol.vector() != (4, 1, 0) or not is_fixed_point(su, game):
        return f"edge shares {sol.vector()}"
    nodes = split_to_nodes(sol).vector()
    return _expect(nodes == (Fraction(5, 2), 2, Fraction(1, 2)), f"nodes {nodes}")


def _check_netshare_clustered():
    lat = lattice_for("P^N", 3)
    atom_of = {_parse_edge(_edge_key(a), 3): a for a in lat.atoms}
    game = MobiusCoefficients(lat, {atom_of[(1, 2)]: 4,
                                    atom_of[(1, 3)]: 1}).zeta_expand()
    cluster = lat.parse_element("1,2|3")
    vec = su(clustering_restrict(game, cluster)).vector()
    return _expect(vec == (4, 0, 0), f"got {vec}")


def _check_chain_totals():
    for tag, n, total in [("P^N", 4, 18), ("P^N", 5, 180), ("E^N", 3, 18)]:
        lat = lattice_for(tag, n)
        if lat.chain_count_total() != total:
            return f"{tag} n={n}: {lat.chain_count_total()} != {total}"
        if len(lat.maximal_chains()) != total:
            return f"{tag} n={n}: enumeration disagrees"
    return None


def _check_class_counts():
    top = min(ground_cap(), 8)
    for n in range(1, top + 1):
        if sum(class_count(c) for c in class_vectors(n)) != bell(n):
            return f"class counts at n={n} do not sum to the Bell number"
    return None


CHECKS = [
    ("pair-shares-partitions", 3, _check_pair_shares_on_partitions),
    ("pair-shares-embedded", 3, _check_pair_shares_on_embedded),
    ("transport-pair-example", 3, _check_transport_of_pair_example),
    ("rank-thirds", 3, _check_rank_thirds),
    ("full-surplus-shares", 3, _check_full_surplus_shares),
    ("size-uniform", 4, _check_size_uniform),
    ("empty-core", 3, _check_empty_core),
    ("size-core-witness", 3, _check_size_core_witness),
    ("myerson-path", 3, _check_myerson_path),
    ("shapley-forms", 4, _check_shapley_forms),
    ("rank-separation", 4, _check_rank_separation),
    ("size-separation", 4, _check_size_separation),
    ("nonseparable-witness", 4, _check_nonseparable_witness),
    ("netshare-volumes", 3, _check_netshare_volumes),
    ("netshare-clustered", 3, _check_netshare_clustered),
    ("chain-totals", 5, _check_chain_totals),
    ("class-counts", 1, _check_class_counts),
]


def cmd_selfcheck(args):
    cap = ground_cap(args.max_n)
    # the checks build their own lattices, so a --max-n flag has to win
    # through the environment while the bundle runs
    saved = os.environ.get("LATTICE_GAMES_MAX_N")
    if args.max_n is not None:
        os.environ["LATTICE_GAMES_MAX_N"] = str(args.max_n)
    try:
        failures = 0
        skipped = 0
        for name, ground, fn in CHECKS:
            if ground > cap:
                print(f"skip {name} (needs ground size {ground}, cap is {cap})")
                skipped += 1
                continue
            try:
                detail = fn()
            except Exception as err:  # a crash is a failure of that check
                detail = f"{type(err).__name__}: {err}"
            if detail is None:
                print(f"ok   {name}")
            else:
                print(f"FAIL {name}: {detail}")
                failures += 1
    finally:
        if args.max_n is not None:
            if saved is None:
                os.environ.pop("LATTICE_GAMES_MAX_N", None)
            else:
                os.environ["LATTICE_GAMES_MAX_N"] = saved
    ran = len(CHECKS) - skipped
    tail = f", {skipped} skipped" if skipped else ""
    print(f"{ran - failures}/{ran} checks passed{tail}")
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# argument plumbing


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lattice-games",
        description="Exact cooperative-game solutions on subset, partition, "
                    "and embedded-subset lattices.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    solve = sub.add_parser("solve", help="solve a game file for atom shares")
    solve.add_argument("game", help="JSON game file")
    solve.add_argument("--solver", default="su",
                       choices=["shapley", "su", "cu", "egalitarian", "myerson"])
    solve.add_argument("--graph-file", help="JSON edge list for the myerson solver")
    solve.add_argument("--split", metavar="equal|WEIGHTS",
                       help="split edge shares to nodes (partition games only)")
    solve.add_argument("--cluster-file", help="JSON element key to restrict to")
    solve.add_argument("--no-bottom-normalize", action="store_true")
    solve.add_argument("--max-n", type=int)
    solve.add_argument("--format", default="json", choices=["json", "csv"])
    solve.set_defaults(func=cmd_solve)

    core = sub.add_parser("core", help="decide core feasibility of a game file")
    core.add_argument("game", help="JSON game file")
    core.add_argument("--cluster-file", help="JSON element key to restrict to")
    core.add_argument("--no-bottom-normalize", action="store_true")
    core.add_argument("--max-n", type=int)
    core.add_argument("--format", default="json", choices=["json", "csv"])
    core.set_defaults(func=cmd_core)

    net = sub.add_parser("netshare",
                         help="share per-period traffic surplus across edges")
    net.add_argument("trace", help="JSON trace or CSV with period,i,j,volume")
    net.add_argument("--solver", default="su",
                     choices=["su", "cu", "egalitarian"])
    net.add_argument("--split", default="equal", metavar="equal|WEIGHTS")
    net.add_argument("--cluster-file",
                     help="partition key, or JSON object period -> key")
    net.add_argument("--max-n", type=int)
    net.add_argument("--format", default="json", choices=["json", "csv"])
    net.set_defaults(func=cmd_netshare)

    check = sub.add_parser("selfcheck",
                           help="run the bundled worked examples and report")
    check.add_argument("--max-n", type=int)
    check.set_defaults(func=cmd_selfcheck)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SizeLimitError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
