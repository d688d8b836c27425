"""Set partitions, embedded subsets, and the three lattices they form.

The ground set is {1, ..., n}.  Three graded lattices are supported:

* ``2^N`` - subsets ordered by inclusion,
* ``P^N`` - set partitions ordered by refinement (bottom = all singletons),
* ``E^N`` - embedded subsets (A, P) with P a partition and A a block of P
  or the empty set.

E^N is never handled directly: the order isomorphism with P^(n+1) that
inserts the extra element n+1 into the distinguished block (a fresh
singleton when A is empty) carries every question over to partitions.

``rank`` counts covering steps from the bottom, ``size`` counts atoms
below an element.  Chain counts are exact integers; the pair ratios used
by the chain-uniform solution are exact rationals.
"""

from __future__ import annotations

import os
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb, factorial

DEFAULT_MAX_N = 8
CHAIN_CAP = 5
ENV_MAX_N = "LATTICE_GAMES_MAX_N"

LATTICE_TAGS = ("2^N", "P^N", "E^N")


class SizeLimitError(ValueError):
    """A requested ground set exceeds the configured size cap."""


def ground_cap(override=None):
    """Effective cap on ground-set size.

    An explicit override wins, then the LATTICE_GAMES_MAX_N environment
    variable, then the default of 8 (Bell(8) = 4140 lattice elements).
    """
    if override is not None:
        return int(override)
    raw = os.environ.get(ENV_MAX_N)
    if raw is None:
        return DEFAULT_MAX_N
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{ENV_MAX_N} must be an integer, got {raw!r}") from None


@lru_cache(maxsize=None)
def bell(n):
    """Number of set partitions of an n-element set."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return 1
    return sum(comb(n - 1, k) * bell(k) for k in range(n))


def class_vectors(n):
    """All block-size class vectors (c_1, ..., c_n), largest parts first.

    A class vector records c_k blocks of size k, so sum k*c_k = n.  One
    vector per integer partition of n.
    """
    out = []
    counts = [0] * n

    def rec(remaining, max_part):
        if remaining == 0:
            out.append(tuple(counts))
            return
        for part in range(min(max_part, remaining), 0, -1):
            counts[part - 1] += 1
            rec(remaining - part, part)
            counts[part - 1] -= 1

    if n > 0:
        rec(n, n)
    return out


def class_count(cvec):
    """How many partitions of {1..n} share the class vector (c_1, ..., c_n)."""
    n = 0
    for k, c in enumerate(cvec, start=1):
        if c < 0:
            raise ValueError("class vector entries must be nonnegative")
        n += k * c
    if n == 0:
        raise ValueError("class vector describes an empty ground set")
    den = 1
    for k, c in enumerate(cvec, start=1):
        den *= factorial(k) ** c * factorial(c)
    num = factorial(n)
    assert num % den == 0
    return num // den


def class_key(cvec):
    """Serialize a class vector as its block sizes, largest first: "3,1,1"."""
    sizes = []
    for k, c in enumerate(cvec, start=1):
        sizes.extend([k] * c)
    sizes.sort(reverse=True)
    return ",".join(str(s) for s in sizes)


def parse_class_key(text, n):
    """Inverse of class_key for a ground set of size n."""
    try:
        sizes = [int(tok) for tok in text.split(",")]
    except ValueError:
        raise ValueError(f"bad class key {text!r}") from None
    if any(s < 1 for s in sizes) or sum(sizes) != n:
        raise ValueError(f"class key {text!r} does not describe a partition of {n}")
    cvec = [0] * n
    for s in sizes:
        cvec[s - 1] += 1
    return tuple(cvec)


def _rgs_codes(n):
    """All restricted-growth codes of length n, one per set partition."""
    out = []
    code = [0] * n

    def rec(i, top):
        if i == n:
            out.append(tuple(code))
            return
        for d in range(top + 2):
            code[i] = d
            rec(i + 1, d if d > top else top)

    rec(0, -1)
    return out


class Partition:
    """A set partition of {1, ..., n} in canonical form.

    Blocks are tuples sorted ascending and listed by least element, so
    equal partitions compare and hash equal.
    """

    __slots__ = ("n", "blocks")

    def __init__(self, n, blocks):
        if n < 1:
            raise ValueError("ground set must have at least one element")
        seen = set()
        norm = []
        for block in blocks:
            b = tuple(sorted(block))
            if not b:
                raise ValueError("empty block")
            for x in b:
                if not isinstance(x, int) or not 1 <= x <= n:
                    raise ValueError(f"element {x!r} outside 1..{n}")
                if x in seen:
                    raise ValueError(f"element {x} appears in two blocks")
                seen.add(x)
            norm.append(b)
        if len(seen) != n:
            missing = sorted(set(range(1, n + 1)) - seen)
            raise ValueError(f"blocks do not cover {missing}")
        norm.sort()
        self.n = n
        self.blocks = tuple(norm)

    @classmethod
    def bottom(cls, n):
        return cls(n, [(i,) for i in range(1, n + 1)])

    @classmethod
    def top(cls, n):
        return cls(n, [range(1, n + 1)])

    @classmethod
    def pair(cls, n, i, j):
        """The atom joining i and j, every other element a singleton."""
        if i == j:
            raise ValueError("a pair atom needs two distinct elements")
        rest = [(x,) for x in range(1, n + 1) if x not in (i, j)]
        return cls(n, [(i, j)] + rest)

    def __eq__(self, other):
        return (isinstance(other, Partition)
                and self.n == other.n and self.blocks == other.blocks)

    def __hash__(self):
        return hash((self.n, self.blocks))

    def __repr__(self):
        return f"Partition({self.n}, {self.blocks!r})"

    def __str__(self):
        return self.label()

    @property
    def rank(self):
        return self.n - len(self.blocks)

    @property
    def size(self):
        """Atoms below this partition: pairs lying inside a common block."""
        return sum(len(b) * (len(b) - 1) // 2 for b in self.blocks)

    def class_vector(self):
        cvec = [0] * self.n
        for b in self.blocks:
            cvec[len(b) - 1] += 1
        return tuple(cvec)

    def _owner_map(self):
        owner = {}
        for idx, b in enumerate(self.blocks):
            for x in b:
                owner[x] = idx
        return owner

    def block_containing(self, x):
        for b in self.blocks:
            if x in b:
                return b
        raise ValueError(f"element {x!r} outside 1..{self.n}")

    def refines(self, other):
        """True when every block here sits inside a block of other (self <= other)."""
        if not isinstance(other, Partition) or self.n != other.n:
            raise ValueError("mismatched ground sets")
        owner = other._owner_map()
        for b in self.blocks:
            first = owner[b[0]]
            for x in b[1:]:
                if owner[x] != first:
                    return False
        return True

    def coarsens(self, other):
        """True when self >= other in the refinement order."""
        return other.refines(self)

    def meet(self, other):
        """Greatest lower bound: blockwise intersections."""
        if not isinstance(other, Partition) or self.n != other.n:
            raise ValueError("mismatched ground sets")
        mine, theirs = self._owner_map(), other._owner_map()
        groups = {}
        for x in range(1, self.n + 1):
            groups.setdefault((mine[x], theirs[x]), []).append(x)
        return Partition(self.n, groups.values())

    def join(self, other):
        """Least common coarsening (union the blocks, take connected components)."""
        if not isinstance(other, Partition) or self.n != other.n:
            raise ValueError("mismatched ground sets")
        parent = list(range(self.n + 1))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for p in (self, other):
            for b in p.blocks:
                root = find(b[0])
                for x in b[1:]:
                    parent[find(x)] = root
        groups = {}
        for x in range(1, self.n + 1):
            groups.setdefault(find(x), []).append(x)
        return Partition(self.n, groups.values())

    def covers(self, other):
        """True when self is exactly one merge above other."""
        return self.rank == other.rank + 1 and other.refines(self)

    def cover_ups(self):
        """Partitions obtained by merging one pair of blocks."""
        out = []
        for i, j in combinations(range(len(self.blocks)), 2):
            merged = [b for k, b in enumerate(self.blocks) if k not in (i, j)]
            merged.append(self.blocks[i] + self.blocks[j])
            out.append(Partition(self.n, merged))
        return out

    def rgs_tuple(self):
        owner = self._owner_map()
        return tuple(owner[x] for x in range(1, self.n + 1))

    def rgs(self):
        """Restricted-growth string, e.g. "00102"; needs at most ten blocks."""
        code = self.rgs_tuple()
        if max(code) > 9:
            raise ValueError("restricted-growth strings stop at ten blocks")
        return "".join(str(d) for d in code)

    @classmethod
    def from_rgs(cls, code, n=None):
        if isinstance(code, str):
            try:
                digits = [int(ch) for ch in code]
            except ValueError:
                raise ValueError(f"bad restricted-growth string {code!r}") from None
        else:
            digits = list(code)
        if not digits:
            raise ValueError("empty restricted-growth code")
        if n is not None and n != len(digits):
            raise ValueError(f"code {code!r} has length {len(digits)}, expected {n}")
        top = -1
        groups = {}
        for pos, d in enumerate(digits, start=1):
            if not 0 <= d <= top + 1:
                raise ValueError(f"not a restricted-growth code: {code!r}")
            top = max(top, d)
            groups.setdefault(d, []).append(pos)
        return cls(len(digits), groups.values())

    def label(self):
        """Block notation: "1,2|3|4,5"."""
        return "|".join(",".join(str(x) for x in b) for b in self.blocks)

    @classmethod
    def parse(cls, text, n=None):
        """Read block notation; a string starting with '0' is read as an RGS."""
        text = text.strip()
        if not text:
            raise ValueError("empty partition string")
        if text[0] == "0":
            return cls.from_rgs(text, n)
        blocks = []
        for part in text.split("|"):
            try:
                block = [int(tok) for tok in part.split(",")]
            except ValueError:
                raise ValueError(f"bad partition string {text!r}") from None
            blocks.append(block)
        total = sum(len(b) for b in blocks)
        if n is not None and total != n:
            raise ValueError(f"partition {text!r} covers {total} elements, expected {n}")
        return cls(total, blocks)


class EmbeddedSubset:
    """A pair (A, P): a partition P of {1..n} together with one of its
    blocks A, or the empty set."""

    __slots__ = ("subset", "partition")

    def __init__(self, subset, partition):
        sub = tuple(sorted(subset))
        if sub and sub not in partition.blocks:
            raise ValueError(f"{sub} is not a block of {partition}")
        self.subset = sub
        self.partition = partition

    @property
    def n(self):
        return self.partition.n

    @property
    def rank(self):
        return self.partition.rank + (1 if self.subset else 0)

    @property
    def size(self):
        return len(self.subset) + self.partition.size

    def __eq__(self, other):
        return (isinstance(other, EmbeddedSubset)
                and self.subset == other.subset
                and self.partition == other.partition)

    def __hash__(self):
        return hash((self.subset, self.partition))

    def __repr__(self):
        return f"EmbeddedSubset({self.subset!r}, {self.partition!r})"

    def __str__(self):
        return self.label()

    def label(self):
        """Composite notation "A;P", e.g. "1,2;1,2|3" or ";1|2|3" for empty A."""
        return ",".join(str(x) for x in self.subset) + ";" + self.partition.label()

    @classmethod
    def parse(cls, text, n=None):
        head, sep, tail = text.strip().partition(";")
        if not sep:
            raise ValueError(f"embedded subsets read as \"A;P\", got {text!r}")
        part = Partition.parse(tail, n)
        if head:
            try:
                subset = [int(tok) for tok in head.split(",")]
            except ValueError:
                raise ValueError(f"bad embedded subset {text!r}") from None
        else:
            subset = []
        return cls(subset, part)

    def to_partition(self):
        """Image in P^(n+1): insert n+1 into A, or add it as a singleton."""
        m = self.n + 1
        if self.subset:
            blocks = [b if b != self.subset else b + (m,) for b in self.partition.blocks]
        else:
            blocks = list(self.partition.blocks) + [(m,)]
        return Partition(m, blocks)

    @classmethod
    def from_partition(cls, part):
        """Inverse image: the block holding the top element becomes A."""
        m = part.n
        if m < 2:
            raise ValueError("need at least two elements to peel one off")
        rest = []
        subset = ()
        for b in part.blocks:
            if m in b:
                subset = tuple(x for x in b if x != m)
            else:
                rest.append(b)
        if subset:
            rest.append(subset)
        return cls(subset, Partition(m - 1, rest))


def _kappa(k):
    """Maximal chains of the partition lattice on k elements: k!(k-1)!/2^(k-1)."""
    assert k >= 1
    num = factorial(k) * factorial(k - 1)
    den = 1 << (k - 1)
    assert num % den == 0
    return num // den


def _chains_below(p):
    """Maximal chains of the interval [bottom, p].

    The interval is a product of one partition lattice per block, and the
    factor chains interleave freely: r(p)! / prod (|b|-1)! ways, times the
    per-block chain counts.  Everything collapses to
    r(p)! * prod |b|! / 2^r(p).
    """
    num = factorial(p.rank)
    for b in p.blocks:
        num *= factorial(len(b))
    den = 1 << p.rank
    assert num % den == 0
    return num // den


class Lattice:
    """Canonical element order plus cached order tables and chain machinery.

    Subclasses fill in ``elements`` (bottom first, top last), ``atoms``,
    the order test and meet/join; up-sets and down-sets are derived on
    first use.
    """

    tag = "?"

    def __init__(self, n):
        self.n = n
        self.elements = ()
        self.atoms = ()
        self._pos = {}
        self._atom_set = frozenset()
        self._ups = None
        self._downs = None

    def _finish(self):
        self._pos = {e: i for i, e in enumerate(self.elements)}
        self._atom_set = frozenset(self.atoms)

    def describe(self):
        return f"{self.tag} with n={self.n}"

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return x in self._pos

    @property
    def bottom(self):
        return self.elements[0]

    @property
    def top(self):
        return self.elements[-1]

    def index(self, x):
        try:
            return self._pos[x]
        except (KeyError, TypeError):
            raise ValueError(f"{x!r} is not an element of {self.describe()}") from None

    def leq(self, x, y):
        raise NotImplementedError

    def meet(self, x, y):
        raise NotImplementedError

    def join(self, x, y):
        raise NotImplementedError

    def rank(self, x):
        raise NotImplementedError

    def size(self, x):
        """Number of atoms below x."""
        raise NotImplementedError

    def covers_of(self, x):
        """Elements covering x, in a fixed order."""
        raise NotImplementedError

    def class_of(self, x):
        """Relabeling-invariant class of x (see each lattice)."""
        raise NotImplementedError

    def key(self, x):
        raise NotImplementedError

    def parse_element(self, text):
        raise NotImplementedError

    def covers(self, x, y):
        """True when x covers y."""
        return self.rank(x) == self.rank(y) + 1 and self.leq(y, x)

    # -- order tables ---------------------------------------------------

    def _order_tables(self):
        if self._ups is None:
            size = len(self.elements)
            ups = [[] for _ in range(size)]
            downs = [[] for _ in range(size)]
            for i in range(size):
                for j in range(size):
                    if i == j or self.leq(self.elements[i], self.elements[j]):
                        ups[i].append(j)
                        downs[j].append(i)
            self._ups = tuple(tuple(u) for u in ups)
            self._downs = tuple(tuple(d) for d in downs)
        return self._ups, self._downs

    def upset_indices(self, i):
        return self._order_tables()[0][i]

    def downset_indices(self, i):
        return self._order_tables()[1][i]

    def upset(self, x):
        return tuple(self.elements[j] for j in self.upset_indices(self.index(x)))

    def downset(self, x):
        return tuple(self.elements[j] for j in self.downset_indices(self.index(x)))

    # -- chains ---------------------------------------------------------

    def _chain_ground(self):
        return self.n

    def chain_count_total(self):
        raise NotImplementedError

    def chain_count_through(self, x):
        raise NotImplementedError

    def _chain_pair_count(self, x, a):
        raise NotImplementedError

    def chain_pair_ratio(self, x, a):
        """Fraction of maximal chains taking the covering step x -> x v a.

        a must be an atom not below x.
        """
        if a not in self._atom_set:
            raise ValueError(f"{a!r} is not an atom of {self.describe()}")
        if self.leq(a, x):
            raise ValueError("atom already lies below the element, no crossing step")
        return Fraction(self._chain_pair_count(x, a), self.chain_count_total())

    def maximal_chains(self):
        """All maximal chains bottom -> top, as tuples of elements."""
        ground = self._chain_ground()
        if ground > CHAIN_CAP:
            raise SizeLimitError(
                f"maximal-chain listing on {self.describe()} needs ground size "
                f"{ground}, over the cap {CHAIN_CAP}; counts remain available")
        chains = []
        trail = [self.bottom]
        top = self.top

        def walk(x):
            if x == top:
                chains.append(tuple(trail))
                return
            for y in self.covers_of(x):
                trail.append(y)
                walk(y)
                trail.pop()

        walk(self.bottom)
        assert len(chains) == self.chain_count_total()
        return chains


class SubsetLattice(Lattice):
    """Subsets of {1..n} ordered by inclusion, listed by size then lex."""

    tag = "2^N"

    def __init__(self, n):
        super().__init__(n)
        elems = []
        for k in range(n + 1):
            for combo in combinations(range(1, n + 1), k):
                elems.append(frozenset(combo))
        self.elements = tuple(elems)
        self.atoms = tuple(frozenset((i,)) for i in range(1, n + 1))
        self._finish()

    def leq(self, x, y):
        return x <= y

    def meet(self, x, y):
        return x & y

    def join(self, x, y):
        return x | y

    def rank(self, x):
        return len(x)

    def size(self, x):
        return len(x)

    def covers_of(self, x):
        return tuple(x | {i} for i in range(1, self.n + 1) if i not in x)

    def class_of(self, x):
        return len(x)

    def key(self, x):
        return ",".join(str(i) for i in sorted(x))

    def parse_element(self, text):
        text = text.strip()
        if not text:
            return frozenset()
        try:
            items = [int(tok) for tok in text.split(",")]
        except ValueError:
            raise ValueError(f"bad subset {text!r}") from None
        out = frozenset(items)
        if len(out) != len(items) or not all(1 <= i <= self.n for i in out):
            raise ValueError(f"bad subset {text!r} for n={self.n}")
        return out

    def chain_count_total(self):
        return factorial(self.n)

    def chain_count_through(self, x):
        k = len(x)
        return factorial(k) * factorial(self.n - k)

    def _chain_pair_count(self, x, a):
        k = len(x)
        return factorial(k) * factorial(self.n - k - 1)


class PartitionLattice(Lattice):
    """Set partitions of {1..n} under refinement.

    Canonical order is descending lexicographic on restricted-growth
    codes, which puts the all-singleton bottom first and the one-block
    top last.
    """

    tag = "P^N"

    def __init__(self, n):
        super().__init__(n)
        parts = [Partition.from_rgs(code) for code in _rgs_codes(n)]
        parts.sort(key=Partition.rgs_tuple, reverse=True)
        self.elements = tuple(parts)
        self.atoms = tuple(Partition.pair(n, i, j)
                           for i, j in combinations(range(1, n + 1), 2))
        self._finish()

    def leq(self, x, y):
        return x.refines(y)

    def meet(self, x, y):
        return x.meet(y)

    def join(self, x, y):
        return x.join(y)

    def rank(self, x):
        return x.rank

    def size(self, x):
        return x.size

    def covers_of(self, x):
        return tuple(x.cover_ups())

    def class_of(self, x):
        return x.class_vector()

    def key(self, x):
        return x.label()

    def parse_element(self, text):
        return Partition.parse(text, self.n)

    def _order_tables(self):
        # Walk coarsenings directly (group the block list) instead of testing
        # all pairs: sum over P of Bell(#blocks) merges.
        if self._ups is None:
            size = len(self.elements)
            ups = [None] * size
            downs = [[] for _ in range(size)]
            for i, p in enumerate(self.elements):
                blocks = p.blocks
                seen = set()
                for g in _rgs_codes(len(blocks)):
                    buckets = {}
                    for b_idx, g_idx in enumerate(g):
                        buckets.setdefault(g_idx, []).extend(blocks[b_idx])
                    j = self._pos[Partition(self.n, buckets.values())]
                    seen.add(j)
                ups[i] = tuple(sorted(seen))
                for j in ups[i]:
                    downs[j].append(i)
            self._ups = tuple(ups)
            self._downs = tuple(tuple(sorted(d)) for d in downs)
        return self._ups, self._downs

    def chain_count_total(self):
        return _kappa(self.n)

    def chain_count_through(self, x):
        return _chains_below(x) * _kappa(len(x.blocks))

    def _chain_pair_count(self, x, a):
        return _chains_below(x) * _kappa(len(x.blocks) - 1)


class EmbeddedLattice(Lattice):
    """Embedded subsets of {1..n}, ordered through their images in P^(n+1)."""

    tag = "E^N"

    def __init__(self, n, inner):
        super().__init__(n)
        assert inner.n == n + 1
        self.inner = inner
        self.elements = tuple(EmbeddedSubset.from_partition(p) for p in inner.elements)
        bot = Partition.bottom(n)
        node_atoms = [EmbeddedSubset((i,), bot) for i in range(1, n + 1)]
        pair_atoms = [EmbeddedSubset((), Partition.pair(n, i, j))
                      for i, j in combinations(range(1, n + 1), 2)]
        self.atoms = tuple(node_atoms + pair_atoms)
        self._finish()

    def _lift(self, x):
        if not isinstance(x, EmbeddedSubset) or x.n != self.n:
            raise ValueError(f"{x!r} is not an element of {self.describe()}")
        return x.to_partition()

    def leq(self, x, y):
        return self.inner.leq(self._lift(x), self._lift(y))

    def meet(self, x, y):
        return EmbeddedSubset.from_partition(self.inner.meet(self._lift(x), self._lift(y)))

    def join(self, x, y):
        return EmbeddedSubset.from_partition(self.inner.join(self._lift(x), self._lift(y)))

    def rank(self, x):
        return x.rank

    def size(self, x):
        return x.size

    def covers_of(self, x):
        return tuple(EmbeddedSubset.from_partition(q)
                     for q in self.inner.covers_of(self._lift(x)))

    def class_of(self, x):
        """Class vector of the image partition in P^(n+1).

        These are the orbits of the relabeling group once the embedded
        structure is carried over, and the solution theory for symmetric
        games holds at exactly this granularity.
        """
        return self._lift(x).class_vector()

    def key(self, x):
        return x.label()

    def parse_element(self, text):
        return EmbeddedSubset.parse(text, self.n)

    def _order_tables(self):
        # identical element order, so the inner tables apply verbatim
        return self.inner._order_tables()

    def _chain_ground(self):
        return self.n + 1

    def chain_count_total(self):
        return self.inner.chain_count_total()

    def chain_count_through(self, x):
        return self.inner.chain_count_through(self._lift(x))

    def _chain_pair_count(self, x, a):
        return self.inner._chain_pair_count(self._lift(x), self._lift(a))


@lru_cache(maxsize=None)
def _build(tag, n):
    if tag == "2^N":
        return SubsetLattice(n)
    if tag == "P^N":
        return PartitionLattice(n)
    assert tag == "E^N"
    return EmbeddedLattice(n, _build("P^N", n + 1))


def lattice_for(tag, n, max_n=None):
    """Shared lattice instance for a tag in {"2^N", "P^N", "E^N"}.

    Raises SizeLimitError when n is over the cap (see ground_cap); E^N
    works inside P^(n+1), so its ground size is n+1.
    """
    if tag not in LATTICE_TAGS:
        raise ValueError(f"unknown lattice tag {tag!r}; expected one of {LATTICE_TAGS}")
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    cap = ground_cap(max_n)
    ground = n + 1 if tag == "E^N" else n
    if ground > cap:
        raise SizeLimitError(
            f"{tag} with n={n} needs ground size {ground}, over the cap {cap}; "
            f"raise it via max_n or {ENV_MAX_N}")
    return _build(tag, n)


def enumerate_subsets(n, max_n=None):
    return lattice_for("2^N", n, max_n).elements


def enumerate_partitions(n, max_n=None):
    return lattice_for("P^N", n, max_n).elements


def enumerate_embedded(n, max_n=None):
    return lattice_for("E^N", n, max_n).elements


def enumerate_maximal_chains(lattice):
    return lattice.maximal_chains()
