"""Point-valued solutions: shares per atom of the cooperation lattice.

A solution of a game f picks one rational share per atom, summing to
f(top) - f(bottom).  The size-uniform solution spreads each Mobius
dividend over the atoms below its element, the chain-uniform solution
averages per-size marginal contributions over uniformly random maximal
chains (in closed form), and the egalitarian solution ignores structure
entirely.  On the subset lattice the first two collapse to the Shapley
value.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import factorial

from .lattice import EmbeddedSubset, lattice_for
from .transform import LatticeGame, format_fraction, mobius, parse_fraction
from .games import SymmetricGame, is_symmetric


class Solution:
    """Shares per atom; an exact allocation of f(top) - f(bottom)."""

    def __init__(self, lattice, shares):
        table = {}
        for a in lattice.atoms:
            if a not in shares:
                raise ValueError(f"missing share for atom {lattice.key(a)}")
            table[a] = parse_fraction(shares[a])
        if len(shares) != len(table):
            stray = next(k for k in shares if k not in table)
            raise ValueError(f"{stray!r} is not an atom of {lattice.describe()}")
        self.lattice = lattice
        self.shares = table

    def value(self, a):
        try:
            return self.shares[a]
        except (KeyError, TypeError):
            raise ValueError(f"{a!r} is not an atom of {self.lattice.describe()}") from None

    __getitem__ = value

    def vector(self):
        return tuple(self.shares[a] for a in self.lattice.atoms)

    def efficiency(self):
        return sum(self.shares.values(), Fraction(0))

    def __eq__(self, other):
        return (isinstance(other, Solution)
                and other.lattice is self.lattice and other.shares == self.shares)

    def __repr__(self):
        return f"Solution({self.lattice.describe()}, {self.vector()!r})"

    def expand(self):
        """The lattice function x -> sum of shares over atoms below x."""
        lat = self.lattice
        return LatticeGame(lat, {
            x: sum((self.shares[a] for a in lat.atoms if lat.leq(a, x)), Fraction(0))
            for x in lat.elements})

    def payload(self):
        lat = self.lattice
        return {"lattice": lat.tag, "n": lat.n,
                "shares": {lat.key(a): format_fraction(self.shares[a])
                           for a in lat.atoms},
                "efficiencyCheck": format_fraction(self.efficiency())}


def _subset_only(game, who):
    if game.lattice.tag != "2^N":
        raise ValueError(f"{who} works on subset games, got {game.lattice.tag}")


def shapley_chain(game):
    """Average marginal contribution over uniformly random player orderings."""
    _subset_only(game, "shapley_chain")
    n = game.lattice.n
    vals = game.values
    denom = factorial(n)
    shares = {}
    for i in range(1, n + 1):
        rest = [x for x in range(1, n + 1) if x != i]
        acc = Fraction(0)
        for k in range(n):
            weight = Fraction(factorial(k) * factorial(n - k - 1), denom)
            for combo in combinations(rest, k):
                before = frozenset(combo)
                acc += weight * (vals[before | {i}] - vals[before])
        shares[frozenset((i,))] = acc
    return Solution(game.lattice, shares)


def shapley_dividends(game):
    """Each Mobius dividend splits evenly among the members of its coalition."""
    _subset_only(game, "shapley_dividends")
    mu = mobius(game)
    shares = {a: Fraction(0) for a in game.lattice.atoms}
    for coalition, q in mu.coefficients.items():
        if q == 0 or not coalition:
            continue
        part = q / len(coalition)
        for i in coalition:
            shares[frozenset((i,))] += part
    return Solution(game.lattice, shares)


def su(game):
    """Size-uniform sharing: each dividend spreads evenly over the atoms
    below its element.  Works on any of the three lattices."""
    lat = game.lattice
    mu = mobius(game)
    shares = {a: Fraction(0) for a in lat.atoms}
    for x in lat.elements:
        q = mu.coefficients[x]
        if q == 0:
            continue
        s = lat.size(x)
        if s == 0:
            continue  # the bottom coefficient reaches no atom
        part = q / s
        for a in lat.atoms:
            if lat.leq(a, x):
                shares[a] += part
    return Solution(lat, shares)


def cu(game):
    """Chain-uniform sharing, via the closed-form chain ratios.

    An atom is credited the per-size marginal of the covering step where
    it first appears under a uniformly random maximal chain.
    """
    lat = game.lattice
    vals = game.values
    shares = {}
    for a in lat.atoms:
        acc = Fraction(0)
        for x in lat.elements:
            if lat.leq(a, x):
                continue
            y = lat.join(x, a)
            jump = lat.size(y) - lat.size(x)
            acc += lat.chain_pair_ratio(x, a) * (vals[y] - vals[x]) / jump
        shares[a] = acc
    return Solution(lat, shares)


def cu_chain_oracle(game):
    """cu recomputed from an explicit chain census; small n only."""
    lat = game.lattice
    vals = game.values
    credit = {a: Fraction(0) for a in lat.atoms}
    for chain in lat.maximal_chains():
        for x, y in zip(chain, chain[1:]):
            marginal = (vals[y] - vals[x]) / (lat.size(y) - lat.size(x))
            for a in lat.atoms:
                if lat.leq(a, y) and not lat.leq(a, x):
                    credit[a] += marginal
    total = lat.chain_count_total()
    return Solution(lat, {a: q / total for a, q in credit.items()})


def egalitarian(game):
    """The structure-blind extreme: the same share for every atom."""
    lat = game.lattice
    q = (game.top_value - game.bottom_value) / len(lat.atoms)
    return Solution(lat, {a: q for a in lat.atoms})


def symmetric_solution(game):
    """Uniform share for a class-symmetric game, without touching dividends.

    Accepts a SymmetricGame or a LatticeGame (which must be symmetric).
    Equals su and cu of the expansion.
    """
    if isinstance(game, SymmetricGame):
        sym = game
    else:
        sym = is_symmetric(game)
        if sym is None:
            raise ValueError("game is not constant on relabeling classes")
    lat = lattice_for(sym.tag, sym.n)
    top_value = sym.class_values[lat.class_of(lat.top)]
    bottom_value = sym.class_values[lat.class_of(lat.bottom)]
    q = (top_value - bottom_value) / len(lat.atoms)
    return Solution(lat, {a: q for a in lat.atoms})


SOLVERS = {
    "shapley": shapley_dividends,
    "su": su,
    "cu": cu,
    "egalitarian": egalitarian,
}


def is_fixed_point(solver, game):
    """Whether expanding the solution reproduces the game itself.

    The comparison removes any bottom shift first; solver is a name from
    SOLVERS or a callable.
    """
    if isinstance(solver, str):
        try:
            fn = SOLVERS[solver]
        except KeyError:
            raise ValueError(f"unknown solver {solver!r}; "
                             f"pick one of {sorted(SOLVERS)}") from None
    else:
        fn = solver
    base, _ = game.normalize_bottom()
    return fn(game).expand() == base


def transport_solution(sol):
    """Relabel shares along the atom bijection between E^n and P^(n+1)."""
    lat = sol.lattice
    if lat.tag == "E^N":
        target = lattice_for("P^N", lat.n + 1)
        moved = {a.to_partition(): q for a, q in sol.shares.items()}
    elif lat.tag == "P^N":
        if lat.n < 2:
            raise ValueError("nothing to peel off a one-element ground set")
        target = lattice_for("E^N", lat.n - 1)
        moved = {EmbeddedSubset.from_partition(a): q for a, q in sol.shares.items()}
    else:
        raise ValueError("transport connects E^N with P^(n+1)")
    return Solution(target, moved)


class NodeShares:
    """Per-node totals after splitting edge shares between endpoints."""

    def __init__(self, n, shares):
        self.n = n
        self.shares = {i: parse_fraction(shares.get(i, 0)) for i in range(1, n + 1)}

    def vector(self):
        return tuple(self.shares[i] for i in range(1, self.n + 1))

    def total(self):
        return sum(self.shares.values(), Fraction(0))

    def __eq__(self, other):
        return (isinstance(other, NodeShares)
                and other.n == self.n and other.shares == self.shares)

    def __repr__(self):
        return f"NodeShares({self.vector()!r})"

    def payload(self):
        return {"n": self.n,
                "shares": {str(i): format_fraction(self.shares[i])
                           for i in range(1, self.n + 1)}}


def _atom_pair(p):
    for b in p.blocks:
        if len(b) == 2:
            return b
    raise AssertionError("pair atom without a pair block")


def split_to_nodes(sol, weights=None):
    """Split each edge share between its endpoints.

    weights maps (i, j) with i < j to the pair of endpoint weights, which
    must sum to one; edges without an entry split evenly.
    """
    lat = sol.lattice
    if lat.tag != "P^N":
        raise ValueError("node splitting applies to edge shares on P^N")
    n = lat.n
    half = Fraction(1, 2)
    table = {}
    if weights:
        for key, pair in weights.items():
            i, j = key
            if not (1 <= i < j <= n):
                raise ValueError(f"weight key {key!r} is not an edge of 1..{n}")
            wi, wj = (parse_fraction(w) for w in pair)
            if wi + wj != 1:
                raise ValueError(f"weights for edge {key!r} sum to {wi + wj}, not 1")
            table[(i, j)] = (wi, wj)
    totals = {i: Fraction(0) for i in range(1, n + 1)}
    for a, q in sol.shares.items():
        i, j = _atom_pair(a)
        wi, wj = table.get((i, j), (half, half))
        totals[i] += wi * q
        totals[j] += wj * q
    return NodeShares(n, totals)


def _adjacency(n, edges):
    adj = {i: set() for i in range(1, n + 1)}
    for edge in edges:
        pair = tuple(edge)
        if len(pair) != 2:
            raise ValueError(f"bad edge {edge!r}")
        i, j = pair
        if not (isinstance(i, int) and isinstance(j, int)) or i == j \
                or not (1 <= i <= n and 1 <= j <= n):
            raise ValueError(f"bad edge {edge!r} for n={n}")
        adj[i].add(j)
        adj[j].add(i)
    return adj


def _is_connected(coalition, adj):
    if len(coalition) <= 1:
        return True
    members = set(coalition)
    seen = set()
    stack = [next(iter(members))]
    while stack:
        v = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        stack.extend(adj[v] & members - seen)
    return seen == members


def graph_restrict(game, edges):
    """Confine cooperation to a communication graph.

    The restricted game keeps v on coalitions inducing a connected
    subgraph; dividends of disconnected coalitions are forced to zero and
    their values follow by expansion.
    """
    _subset_only(game, "graph_restrict")
    lat = game.lattice
    adj = _adjacency(lat.n, edges)
    dividends = {}
    values = {}
    for coalition in lat.elements:  # listed by size, so subsets come first
        below = Fraction(0)
        members = sorted(coalition)
        for k in range(len(members)):
            for combo in combinations(members, k):
                below += dividends[frozenset(combo)]
        if _is_connected(coalition, adj):
            values[coalition] = game.values[coalition]
            dividends[coalition] = values[coalition] - below
        else:
            dividends[coalition] = Fraction(0)
            values[coalition] = below
    return LatticeGame(lat, values)


def myerson(game, edges):
    """Dividend sharing of the graph-restricted game."""
    return shapley_dividends(graph_restrict(game, edges))
