"""Game constructions: additive families, symmetric storage, predicates."""

import random
from fractions import Fraction
from math import comb

import pytest

from lattice_games.lattice import class_vectors, lattice_for
from lattice_games.transform import LatticeGame, MobiusCoefficients, mobius, zeta_game
from lattice_games.games import (
    PredicateReport,
    SymmetricGame,
    additive_global,
    additive_pff,
    clustering_restrict,
    is_monotone,
    is_supermodular,
    is_symmetric,
    is_totally_positive,
    symmetric_expand,
)


def subset_game(n, fn):
    lat = lattice_for("2^N", n)
    return LatticeGame(lat, {x: fn(x) for x in lat.elements})


def rank_game(lat):
    return LatticeGame(lat, {x: lat.rank(x) for x in lat.elements})


def size_game(lat):
    return LatticeGame(lat, {x: lat.size(x) for x in lat.elements})


def test_blockwise_sums_of_cardinality_games():
    """|A|-1 per block totals the rank, C(|A|,2) per block the size."""
    for n in (3, 4):
        lat = lattice_for("P^N", n)
        assert additive_global(subset_game(n, lambda a: len(a) - 1)) == rank_game(lat)
        assert additive_global(subset_game(n, lambda a: comb(len(a), 2))) == size_game(lat)


def test_additive_global_rejects_other_lattices():
    g = rank_game(lattice_for("P^N", 3))
    with pytest.raises(ValueError, match="subset"):
        additive_global(g)
    with pytest.raises(ValueError, match="subset"):
        additive_pff(g)


def test_additive_pff_hand_example():
    v = subset_game(2, lambda a: {(): 0, (1,): 1, (2,): 2, (1, 2): 5}[tuple(sorted(a))])
    h = additive_pff(v)
    lat = h.lattice
    expected = {";1|2": 3, "2;1|2": 5, "1;1|2": 4, ";1,2": 5, "1,2;1,2": 10}
    for key, q in expected.items():
        assert h[lat.parse_element(key)] == q


def test_additive_pff_marks_one_block_on_top_of_the_blockwise_sum():
    rng = random.Random(5)
    for n in (2, 3):
        v = subset_game(n, lambda a: rng.randint(-9, 9))
        f = additive_global(v)
        h = additive_pff(v)
        for e in h.lattice.elements:
            p = f.lattice.parse_element(e.partition.label())
            assert h.values[e] == v.values[frozenset(e.subset)] + f.values[p]


def test_symmetric_game_expands_to_rank():
    sym = SymmetricGame("P^N", 3, {(3, 0, 0): 0, (1, 1, 0): 1, (0, 0, 1): 2})
    lat = lattice_for("P^N", 3)
    assert sym.expand() == rank_game(lat)
    assert symmetric_expand(sym) == rank_game(lat)
    assert is_symmetric(rank_game(lat)) == sym
    assert sym.value((1, 1, 0)) == 1
    with pytest.raises(ValueError, match="not a class"):
        sym.value((2, 0, 0))


def test_symmetric_game_on_embedded_lattice():
    sym = SymmetricGame("E^N", 2, {(3, 0, 0): "1/3", (1, 1, 0): 4, (0, 0, 1): -2})
    g = sym.expand()
    lat = g.lattice
    keyed = {lat.key(x): g.values[x] for x in lat.elements}
    assert keyed == {";1|2": Fraction(1, 3), "2;1|2": 4, "1;1|2": 4,
                     ";1,2": 4, "1,2;1,2": -2}
    assert is_symmetric(g) == sym


def test_symmetric_game_on_subsets():
    sym = SymmetricGame("2^N", 3, {0: 0, 1: 0, 2: 1, 3: 1})
    g = sym.expand()
    assert g[frozenset({1, 3})] == 1
    assert g[frozenset({2})] == 0
    assert is_symmetric(g) == sym


def test_asymmetric_games_are_detected():
    lat3 = lattice_for("P^N", 3)
    assert is_symmetric(zeta_game(lat3, lat3.parse_element("1,2|3"))) is None
    e2 = lattice_for("E^N", 2)
    # worth 1 once the pair forms, regardless of marking: constant on the
    # coarse classes it is not, since node atoms share a class with the pair
    assert is_symmetric(zeta_game(e2, e2.parse_element(";1,2"))) is None
    lat = lattice_for("2^N", 3)
    assert is_symmetric(zeta_game(lat, frozenset({1}))) is None
    top = zeta_game(lat3, lat3.top)
    assert is_symmetric(top) is not None


def test_symmetric_game_rejects_bad_tables():
    with pytest.raises(ValueError, match="missing value"):
        SymmetricGame("P^N", 3, {(3, 0, 0): 0, (1, 1, 0): 1})
    full = {(3, 0, 0): 0, (1, 1, 0): 1, (0, 0, 1): 2}
    with pytest.raises(ValueError, match="not a class"):
        SymmetricGame("P^N", 3, {**full, (2, 0, 0): 9})
    with pytest.raises(ValueError, match="tag"):
        SymmetricGame("Q^N", 3, full)
    with pytest.raises(ValueError):
        SymmetricGame("P^N", 0, {})


def test_symmetric_payload_roundtrip():
    sym = SymmetricGame("P^N", 4, {cls: Fraction(i, 3)
                                   for i, cls in enumerate(class_vectors(4))})
    payload = sym.payload()
    assert payload["lattice"] == "P^N" and payload["n"] == 4
    assert SymmetricGame.from_payload(payload) == sym


def test_symmetric_payload_rejects_bad_keys():
    good = SymmetricGame("2^N", 2, {0: 0, 1: 1, 2: 2}).payload()
    with pytest.raises(ValueError, match="class key"):
        SymmetricGame.from_payload({**good, "classValues": {"x": "0"}})
    with pytest.raises(ValueError, match="out of range"):
        SymmetricGame.from_payload(
            {**good, "classValues": {**good["classValues"], "7": "0"}})
    psym = SymmetricGame("P^N", 3, {(3, 0, 0): 0, (1, 1, 0): 1, (0, 0, 1): 2})
    p = psym.payload()
    assert SymmetricGame.from_payload(p) == psym
    dup = {**p["classValues"], "1,2": "5"}  # same class as "2,1", resorted
    with pytest.raises(ValueError, match="duplicate"):
        SymmetricGame.from_payload({**p, "classValues": dup})


def test_clustering_restrict_on_partitions():
    lat = lattice_for("P^N", 3)
    cluster = lat.parse_element("1,2|3")
    restricted = clustering_restrict(size_game(lat), cluster)
    keyed = {lat.key(x): restricted.values[x] for x in lat.elements}
    assert keyed == {"1|2|3": 0, "1,2|3": 1, "1,3|2": 0, "1|2,3": 0, "1,2,3": 1}
    assert restricted.top_value == size_game(lat)[cluster]


def test_clustering_restrict_on_subsets():
    g = subset_game(3, lambda a: comb(len(a), 2))
    cluster = frozenset({1, 2})
    restricted = clustering_restrict(g, cluster)
    for x in g.lattice.elements:
        assert restricted.values[x] == (1 if cluster <= x else 0)


def test_clustering_restrict_at_top_is_identity():
    lat = lattice_for("P^N", 3)
    g = size_game(lat)
    assert clustering_restrict(g, lat.top) == g


def test_supermodular_but_not_totally_positive():
    """Rank on three elements: every pair check passes (atom meets are
    bottom, joins the top), yet the top dividend is negative."""
    lat = lattice_for("P^N", 3)
    g = rank_game(lat)
    report = is_supermodular(g)
    assert report
    assert report.witness is None
    tp = is_totally_positive(g)
    assert not tp
    assert tp.witness == lat.top
    assert mobius(g).coefficients[lat.top] == -1


def test_rank_game_is_not_supermodular_for_four():
    lat = lattice_for("P^N", 4)
    report = is_supermodular(rank_game(lat))
    assert not report
    x, y = report.witness
    vals = rank_game(lat).values
    assert vals[lat.join(x, y)] + vals[lat.meet(x, y)] < vals[x] + vals[y]


def test_totally_positive_games_are_supermodular_here():
    rng = random.Random(23)
    for tag, n in [("P^N", 3), ("2^N", 3), ("E^N", 2)]:
        lat = lattice_for(tag, n)
        coeffs = {x: Fraction(rng.randint(0, 5)) for x in lat.elements}
        g = MobiusCoefficients(lat, coeffs).zeta_expand()
        assert is_totally_positive(g)
        assert is_supermodular(g)


def test_monotone_witnesses():
    lat = lattice_for("P^N", 3)
    assert is_monotone(rank_game(lat))
    falling = LatticeGame(lat, {x: -lat.rank(x) for x in lat.elements})
    report = is_monotone(falling)
    assert not report
    x, y = report.witness
    assert lat.leq(x, y) and falling.values[y] < falling.values[x]


def test_predicate_report_shapes():
    assert bool(PredicateReport(True)) is True
    bad = PredicateReport(False, witness="spot")
    assert not bad
    assert "spot" in repr(bad)
