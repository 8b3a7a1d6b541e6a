"""Core pi-space construction, axioms, and the basic derived spaces."""

from itertools import combinations

import pytest

from pispace import bitsets
from pispace.core import (
    CapExceeded,
    DependentSeed,
    EmptyRestriction,
    InvalidSpec,
    NotDownwardClosed,
    OutOfRange,
    PiSpace,
    boolean,
    build_family,
    check_axioms,
    explicit,
    graphic,
    linear_gfp,
    uniform,
    w_equals_fin_check,
    _w_fin_mismatch,
)

K3_EDGES = [(0, 1), (0, 2), (1, 2)]
K4_EDGES = [(i, j) for i in range(4) for j in range(i + 1, 4)]


def brute_family(M):
    """Independent sets by full powerset scan, independent of the DFS path."""
    return [m for m in range(1 << M.size) if M.independent_mask(m)]


def test_uniform_counts_and_rank():
    M = uniform(4, 2)
    assert M.rank == 2
    # 1 + 4 + 6 subsets of size <= 2
    assert len(brute_family(M)) == 11
    assert len(M.independent_family()) == 11


def test_uniform_membership():
    M = uniform(4, 2)
    assert M.independent([0, 1])
    assert not M.independent([0, 1, 2])
    assert M.independent([])


def test_graphic_k3_rank_and_triangle():
    M = graphic(3, K3_EDGES)
    assert M.rank == 2
    assert not M.independent([0, 1, 2])  # the triangle is a cycle
    assert M.independent([0, 1])


def test_graphic_self_loop_is_dependent():
    M = graphic(3, [(0, 1), (1, 2), (2, 2)])
    assert not M.independent([2])
    assert M.independent([0, 1])


def test_linear_gfp_parallel_and_zero_columns():
    M = linear_gfp(3, [[1, 0], [0, 1], [1, 1], [2, 0], [0, 0]])
    assert M.rank == 2
    assert M.independent([0, 1])
    assert not M.independent([0, 3])  # parallel columns
    assert not M.independent([4])     # zero column is a loop
    assert not M.independent([0, 1, 2])


def test_linear_gfp_rejects_bad_params():
    with pytest.raises(InvalidSpec):
        linear_gfp(4, [[1]])
    with pytest.raises(InvalidSpec):
        linear_gfp(2, [[1, 0], [1]])


def test_explicit_requires_downward_closure():
    with pytest.raises(NotDownwardClosed):
        explicit(["1", "2"], independent=[[], ["1", "2"]])


def test_explicit_completion_is_opt_in():
    M = explicit(["1", "2"], independent=[["1", "2"]], complete_downward=True)
    assert sorted(brute_family(M)) == [0, 1, 2, 3]


def test_explicit_from_bases():
    M = explicit(["a", "b", "c"], bases=[["a", "b"], ["b", "c"]])
    assert M.rank == 2
    assert M.independent([0, 1])
    assert not M.independent([0, 2])  # {a,c} is in no basis


def test_explicit_from_circuits():
    M = explicit(["a", "b", "c"], circuits=[["a", "b", "c"]])
    # same family as uniform(3, 2)
    assert sorted(brute_family(M)) == sorted(brute_family(uniform(3, 2)))


def test_check_axioms_uniform_all_hold():
    rep = check_axioms(uniform(5, 3))
    assert rep.all_hold
    assert rep.witnesses == ()


def test_check_axioms_exchange_failure_with_witness():
    M = explicit(["1", "2", "3"],
                 independent=[[], ["1"], ["2"], ["1", "2"], ["3"]])
    rep = check_axioms(M)
    assert rep.i1_holds
    assert not rep.i2_holds
    pairs = {(w.sigma, w.tau) for w in rep.witnesses if w.axiom == "I2"}
    assert ((0, 1), (2,)) in pairs  # sigma={1,2}, tau={3}
    assert not rep.i2prime_holds


@pytest.mark.parametrize("M", [uniform(5, 3), boolean(4), graphic(4, K4_EDGES),
                               linear_gfp(2, [[1, 0], [0, 1], [1, 1]])])
def test_i2_matches_i2prime_on_finite_instances(M):
    rep = check_axioms(M)
    assert rep.i2_holds == rep.i2prime_holds


def test_check_axioms_cap():
    with pytest.raises(CapExceeded):
        check_axioms(boolean(6), max_ground=5)


def test_restrict_uniform_matches_smaller_uniform():
    M = uniform(4, 2).restrict([0, 1, 2])
    expected = uniform(3, 2)
    assert sorted(brute_family(M)) == sorted(brute_family(expected))


def test_restrict_identity_and_errors():
    M = uniform(4, 2)
    R = M.restrict(range(4))
    assert brute_family(R) == brute_family(M)
    with pytest.raises(EmptyRestriction):
        M.restrict([])
    with pytest.raises(OutOfRange):
        M.restrict([9])


def test_restrict_k4_to_triangle_is_k3():
    M = graphic(4, K4_EDGES)
    tri = [M.index_of("0-1"), M.index_of("0-2"), M.index_of("1-2")]
    R = M.restrict(tri)
    assert sorted(brute_family(R)) == sorted(brute_family(graphic(3, K3_EDGES)))


def test_skeleton():
    S = boolean(5).skeleton(1)
    assert sorted(brute_family(S)) == sorted(brute_family(uniform(5, 2)))
    M = uniform(4, 2)
    assert brute_family(M.skeleton(5)) == brute_family(M)
    S0 = graphic(3, [(0, 1), (1, 2), (2, 2)]).skeleton(0)
    assert sorted(S0.independent_family()) == [0, 1, 2]  # empty set + 2 non-loops


def test_link():
    L = uniform(4, 2).link([0])
    assert L.size == 3 and L.rank == 1
    M = uniform(4, 2)
    assert brute_family(M.link([])) == brute_family(M)
    LK3 = graphic(3, K3_EDGES).link([0])
    assert LK3.rank == 1 and LK3.size == 2
    with pytest.raises(DependentSeed):
        graphic(3, K3_EDGES).link([0, 1, 2])


def test_link_dimension_law_small_instances():
    for M in [uniform(4, 2), boolean(4), graphic(4, K4_EDGES)]:
        for mask in M.independent_family():
            assert M.link(bitsets.indices_of(mask)).rank == M.rank - mask.bit_count()


def test_bases():
    assert uniform(4, 2).bases() == [tuple(c) for c in combinations(range(4), 2)]
    assert boolean(3).bases() == [(0, 1, 2)]
    k3 = graphic(3, K3_EDGES).bases()
    assert k3 == [(0, 1), (0, 2), (1, 2)]


@pytest.mark.parametrize("M", [uniform(5, 3), boolean(4), graphic(4, K4_EDGES),
                               linear_gfp(3, [[1, 0], [0, 1], [1, 1], [1, 2]])])
def test_bases_equicardinal_and_derived_instances_valid(M):
    bs = M.bases()
    assert {len(b) for b in bs} == {M.rank}
    assert check_axioms(M.restrict([0, 1])).all_hold
    assert check_axioms(M.skeleton(1)).all_hold
    assert check_axioms(M.link([0]) if M.independent([0]) else M).all_hold


def test_oracle_determinism():
    M = graphic(4, K4_EDGES)
    masks = list(range(1 << M.size))
    first = [M.independent_mask(m) for m in masks]
    again = [M.independent_mask(m) for m in masks]
    assert first == again


def test_w_equals_fin_on_valid_instances():
    assert w_equals_fin_check(uniform(4, 2))
    assert w_equals_fin_check(graphic(4, K4_EDGES))


def test_w_equals_fin_detects_non_closed_family():
    # bypass build validation: {}, {0,1} independent but {0} not
    M = PiSpace(["a", "b"], lambda m: m in (0, 3), provenance="corrupt")
    assert not w_equals_fin_check(M)
    assert _w_fin_mismatch(M) == (0, 1)


def test_build_family_json_and_sugar():
    M = build_family({"kind": "uniform", "n": 4, "r": 2})
    assert M.rank == 2
    M = build_family('{"kind":"graphic","vertices":3,"edges":[[0,1],[0,2],[1,2]]}')
    assert M.rank == 2
    M = build_family("complete(4)")
    assert M.size == 6 and M.rank == 3
    M = build_family("path(4)")
    assert M.rank == 3
    M = build_family("cycle(5)")
    assert M.rank == 4
    M = build_family('{"kind":"explicit","ground":["a","b"],'
                     '"independent":[[],["a"],["b"]],"complete_downward":false}')
    assert M.rank == 1
    with pytest.raises(InvalidSpec):
        build_family({"kind": "nope"})
    with pytest.raises(InvalidSpec):
        build_family("uniform(4)")


def test_duplicate_labels_rejected():
    with pytest.raises(InvalidSpec):
        PiSpace(["a", "a"], lambda m: True)
