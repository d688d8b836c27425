"""Core feasibility and additive separability, in exact arithmetic.

The core of a lattice game asks for atom shares that are efficient at
the top and weakly dominate f everywhere below it.  Feasibility is
decided by a phase-1 simplex over Fractions; an empty core comes with a
Farkas certificate, a nonempty one with a witness point, and both are
re-verified before they are returned.

Separability asks the converse of building a partition game from a set
function on the affected groups: which games arise that way?  The test
recovers the only candidate set functions and checks them against every
partition.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from .lattice import EmbeddedSubset, Partition
from .transform import format_fraction, parse_fraction
from .games import PredicateReport
from .solutions import Solution


# ---------------------------------------------------------------------------
# constraint systems and feasibility


class CoreSystem:
    """The linear system behind a core: one lower bound per element plus
    the efficiency equality at the top."""

    def __init__(self, game):
        lat = game.lattice
        atoms = lat.atoms
        rows = []
        for x in lat.elements:
            coeffs = tuple(Fraction(1 if lat.leq(a, x) else 0) for a in atoms)
            rows.append((x, coeffs, game.values[x]))
        self.lattice = lat
        self.atoms = atoms
        self.inequalities = rows
        self.equality = (tuple(Fraction(1) for _ in atoms), game.top_value)

    def __len__(self):
        return len(self.inequalities)

    def check(self, shares):
        """Elements whose lower bound the shares violate; the top equality
        counts when it fails in either direction."""
        violated = []
        for x, coeffs, rhs in self.inequalities:
            if sum(c * shares[a] for c, a in zip(coeffs, self.atoms)) < rhs:
                violated.append(x)
        coeffs, rhs = self.equality
        if sum(c * shares[a] for c, a in zip(coeffs, self.atoms)) != rhs:
            if self.lattice.top not in violated:
                violated.append(self.lattice.top)
        return violated


def _phase1(inequalities, equality, nvars):
    """Decide {x : Ax >= b, cx = d} by minimizing artificial slack.

    inequalities is a list of (coeffs, rhs); equality a single pair.
    Returns ("feasible", point) or ("infeasible", (y, lam)) where y >= 0
    pairs with the inequalities, lam with the equality, and
    sum y_i a_i + lam c = 0 while sum y_i b_i + lam d > 0.
    """
    n_ineq = len(inequalities)
    ncols = 2 * nvars + n_ineq  # x = u - w, one surplus per inequality
    rows = []
    rhs = []
    sigma = []
    for k, (coeffs, b) in enumerate(list(inequalities) + [equality]):
        row = [Fraction(0)] * ncols
        for j, c in enumerate(coeffs):
            row[j] = Fraction(c)
            row[nvars + j] = -Fraction(c)
        if k < n_ineq:
            row[2 * nvars + k] = Fraction(-1)
        b = Fraction(b)
        if b < 0:
            row = [-c for c in row]
            b = -b
            sigma.append(-1)
        else:
            sigma.append(1)
        rows.append(row)
        rhs.append(b)
    m = len(rows)
    for i, row in enumerate(rows):  # artificial identity
        row.extend(Fraction(1 if k == i else 0) for k in range(m))
    total = ncols + m
    basis = [ncols + i for i in range(m)]
    # reduced costs for min sum(artificials) with the artificial basis
    red = [-sum(rows[i][j] for i in range(m)) for j in range(ncols)]
    red += [Fraction(0)] * m

    while True:
        enter = next((j for j in range(total) if red[j] < 0), None)
        if enter is None:
            break
        leave = None
        best = None
        for i in range(m):
            if rows[i][enter] > 0:
                ratio = rhs[i] / rows[i][enter]
                if best is None or ratio < best or \
                        (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        assert leave is not None, "phase-1 objective is bounded below by zero"
        piv = rows[leave][enter]
        rows[leave] = [c / piv for c in rows[leave]]
        rhs[leave] /= piv
        for i in range(m):
            if i != leave and rows[i][enter] != 0:
                f = rows[i][enter]
                rows[i] = [c - f * d for c, d in zip(rows[i], rows[leave])]
                rhs[i] -= f * rhs[leave]
        if red[enter] != 0:
            f = red[enter]
            red = [c - f * d for c, d in zip(red, rows[leave])]
        basis[leave] = enter

    slack = sum(rhs[i] for i in range(m) if basis[i] >= ncols)
    if slack == 0:
        x = [Fraction(0)] * ncols
        for i, bv in enumerate(basis):
            if bv < ncols:
                x[bv] = rhs[i]
        point = [x[j] - x[nvars + j] for j in range(nvars)]
        return "feasible", point
    # optimal duals of the phase-1 problem, read off the artificial columns
    y = [Fraction(1) - red[ncols + i] for i in range(m)]
    multipliers = [sigma[i] * y[i] for i in range(n_ineq)]
    lam = sigma[n_ineq] * y[n_ineq]
    return "infeasible", (multipliers, lam)


class CoreReport:
    """Outcome of a core feasibility check, with its proof object."""

    def __init__(self, game, status, witness=None, certificate=None):
        self.game = game
        self.status = status
        self.witness = witness          # Solution, when nonempty
        self.certificate = certificate  # (multipliers dict, lam), when empty

    def __bool__(self):
        return self.status == "nonempty"

    def __repr__(self):
        return f"CoreReport({self.status})"

    def payload(self):
        lat = self.game.lattice
        out = {"lattice": lat.tag, "n": lat.n, "status": self.status}
        if self.witness is not None:
            out["witness"] = self.witness.payload()["shares"]
        if self.certificate is not None:
            multipliers, lam = self.certificate
            out["certificate"] = {
                "lowerBounds": {lat.key(x): format_fraction(q)
                                for x, q in multipliers.items()},
                "efficiency": format_fraction(lam)}
        return out


def core_feasible(game):
    """Decide core nonemptiness; the answer carries a verified witness or
    a verified infeasibility certificate."""
    system = CoreSystem(game)
    ineq = [(coeffs, rhs) for _, coeffs, rhs in system.inequalities]
    status, proof = _phase1(ineq, system.equality, len(system.atoms))
    if status == "feasible":
        shares = dict(zip(system.atoms, proof))
        assert not system.check(shares), "simplex returned an infeasible point"
        return CoreReport(game, "nonempty", witness=Solution(game.lattice, shares))
    multipliers, lam = proof
    _check_certificate(system, multipliers, lam)
    named = {x: q for (x, _, _), q in zip(system.inequalities, multipliers) if q != 0}
    return CoreReport(game, "empty", certificate=(named, lam))


def _check_certificate(system, multipliers, lam):
    """Farkas check: the combination cancels every variable yet demands a
    positive total, so no shares can satisfy the system."""
    assert all(q >= 0 for q in multipliers), "negative inequality multiplier"
    eq_coeffs, eq_rhs = system.equality
    for j in range(len(system.atoms)):
        acc = lam * eq_coeffs[j]
        for (_, coeffs, _), q in zip(system.inequalities, multipliers):
            acc += q * coeffs[j]
        assert acc == 0, "certificate does not cancel the shares"
    value = lam * eq_rhs
    for (_, _, rhs), q in zip(system.inequalities, multipliers):
        value += q * rhs
    assert value > 0, "certificate combination is not positive"


def core_contains(game, shares):
    """Whether given shares lie in the core; lists violated elements."""
    if isinstance(shares, Solution):
        if shares.lattice is not game.lattice:
            raise ValueError("shares live on a different lattice than the game")
        table = shares.shares
    else:
        table = Solution(game.lattice, shares).shares
    violated = CoreSystem(game).check(table)
    return PredicateReport(not violated, violated or None)


# ---------------------------------------------------------------------------
# additive separability


def _merge_bottom(n, group):
    """The partition with the given group as a block and all else single."""
    blocks = [tuple(sorted(group))] if group else []
    blocks.extend((i,) for i in range(1, n + 1) if i not in group)
    return Partition(n, blocks)


def _recover(game, singletons):
    """The only set function with these singleton values that could
    separate the game: read each larger value off the partition that
    merges exactly that group."""
    lat = game.lattice
    n = lat.n
    total = sum(singletons.values(), Fraction(0))
    v = {frozenset((i,)): singletons[i] for i in range(1, n + 1)}
    for size in range(2, n + 1):
        for combo in combinations(range(1, n + 1), size):
            group = frozenset(combo)
            outside = total - sum(singletons[i] for i in combo)
            v[group] = game.values[_merge_bottom(n, group)] - outside
    return v


def _first_violation(game, v):
    """First partition (in lattice order) where the blockwise sum misses."""
    for p in game.lattice.elements:
        acc = sum((v[frozenset(b)] for b in p.blocks), Fraction(0))
        if acc != game.values[p]:
            return p
    return None


class SeparatingFamily:
    """All set functions whose blockwise sums give one partition game.

    Singleton values are free up to their fixed sum f(bottom); every
    value on a larger group then follows, and v(empty) plays no part in
    any blockwise sum.  base spreads the singleton total uniformly and
    sets v(empty) = 0.
    """

    def __init__(self, game, base):
        self.game = game
        self.n = game.lattice.n
        self.base = base

    def singleton_total(self):
        return self.game.bottom_value

    def member(self, singletons):
        """The member with the given singleton values (dict i -> value)."""
        n = self.n
        if sorted(singletons) != list(range(1, n + 1)):
            raise ValueError(f"need one singleton value per element of 1..{n}")
        chosen = {i: parse_fraction(q) for i, q in singletons.items()}
        total = sum(chosen.values(), Fraction(0))
        if total != self.singleton_total():
            raise ValueError(
                f"singleton values sum to {total}, "
                f"need {self.singleton_total()}")
        v = _recover(self.game, chosen)
        v[frozenset()] = Fraction(0)
        assert _first_violation(self.game, v) is None, \
            "member of a verified family fails to separate"
        return v

    def contains(self, v):
        """Whether a set function separates the game; v(empty) is ignored."""
        table = {frozenset(k): parse_fraction(q) for k, q in v.items()}
        needed = {frozenset(c) for size in range(1, self.n + 1)
                  for c in combinations(range(1, self.n + 1), size)}
        if not needed <= set(table):
            return False
        return _first_violation(self.game, table) is None


def separating_variant(family, singletons):
    """Convenience wrapper: the family member with these singleton values."""
    return family.member(singletons)


class SeparabilityReport:
    """Outcome of a separability test; true iff a decomposition exists."""

    def __init__(self, separable, family=None, v=None, violated=None):
        self.separable = separable
        self.family = family    # P^N case
        self.v = v              # E^N case: the unique set function
        self.violated = violated

    def __bool__(self):
        return self.separable

    def __repr__(self):
        return f"SeparabilityReport({self.separable})"


def separability_test(game):
    """Decide whether a game is a blockwise sum of one set function.

    On P^N the decomposition, when it exists, is unique up to shifting
    singleton values (keeping their sum), so checking the uniform-spread
    candidate decides the question; the report carries the family or the
    first violated partition.  On E^N the distinguished block pins the
    set function completely, so the report carries the unique v or the
    first violated element.
    """
    tag = game.lattice.tag
    if tag == "P^N":
        return _separate_partition_game(game)
    if tag == "E^N":
        return _separate_embedded_game(game)
    raise ValueError(f"separability concerns P^N and E^N games, got {tag}")


def _separate_partition_game(game):
    n = game.lattice.n
    spread = game.bottom_value / n
    v = _recover(game, {i: spread for i in range(1, n + 1)})
    bad = _first_violation(game, v)
    if bad is not None:
        return SeparabilityReport(False, violated=bad)
    base = dict(v)
    base[frozenset()] = Fraction(0)
    return SeparabilityReport(True, family=SeparatingFamily(game, base))


def _separate_embedded_game(game):
    """With a distinguished block the set function is forced, the empty
    group included: marking a singleton counts it twice, so differences
    along the bottom row untangle everything."""
    lat = game.lattice
    n = lat.n
    h = game.values

    def at_bottom(group):
        inner = _merge_bottom(n, group) if len(group) > 1 else Partition.bottom(n)
        return h[EmbeddedSubset(group, inner)]

    base = at_bottom(frozenset())  # v(empty) + sum of singletons
    diffs = {i: at_bottom(frozenset((i,))) - base for i in range(1, n + 1)}
    # each diff is v({i}) - v(empty), so the base row pins v(empty)
    empty = (base - sum(diffs.values(), Fraction(0))) / (n + 1)
    v = {frozenset(): empty}
    for i in range(1, n + 1):
        v[frozenset((i,))] = empty + diffs[i]
    for size in range(2, n + 1):
        for combo in combinations(range(1, n + 1), size):
            group = frozenset(combo)
            outside = sum(v[frozenset((i,))]
                          for i in range(1, n + 1) if i not in group)
            v[group] = (at_bottom(group) - outside) / 2
    bad = _first_pff_violation(game, v)
    if bad is not None:
        return SeparabilityReport(False, violated=bad)
    return SeparabilityReport(True, v=v)


def _first_pff_violation(game, v):
    for x in game.lattice.elements:
        acc = v[frozenset(x.subset)]
        for b in x.partition.blocks:
            acc += v[frozenset(b)]
        if acc != game.values[x]:
            return x
    return None


def pff_value(v, x):
    """Evaluate the embedded-subset game built from a set function."""
    acc = parse_fraction(v[frozenset(x.subset)])
    for b in x.partition.blocks:
        acc += parse_fraction(v[frozenset(b)])
    return acc
