import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fixtrace import catalog
from fixtrace.simplicial import (SimplicialComplex, SimplicialError, SimplicialMap, chain_map, chains, hopf_lefschetz,
                                 lefschetz, quotient_homology, random_complex, random_self_map, random_subcomplex,
                                 verify_additivity)


def rotation(n, k):
    c = SimplicialComplex.circle(n)
    return SimplicialMap(c, c, {v: (v + k) % n for v in range(n)})


def reflection(n):
    c = SimplicialComplex.circle(n)
    return SimplicialMap(c, c, {v: (-v) % n for v in range(n)})


def test_euler_characteristics():
    assert SimplicialComplex.point().euler_characteristic() == 1
    for n in range(3, 8):
        assert SimplicialComplex.circle(n).euler_characteristic() == 0
    for d in range(1, 5):
        assert SimplicialComplex.simplex_boundary(d).euler_characteristic() == 1 + (-1) ** d
    tetra = catalog.load("tetra_boundary.json")
    assert [tetra.count(k) for k in range(3)] == [4, 6, 4]


def test_validation():
    with pytest.raises(SimplicialError, match="missing"):
        SimplicialComplex([0, 1, 2], [[0, 1, 2]])
    with pytest.raises(SimplicialError, match="unknown vertex"):
        SimplicialComplex([0], [[0, 1]])
    c = SimplicialComplex.circle(4)
    with pytest.raises(SimplicialError, match="not a simplex"):
        SimplicialMap(c, c, {0: 0, 1: 2, 2: 2, 3: 3})
    with pytest.raises(SimplicialError, match="no image"):
        SimplicialMap(c, c, {0: 0})


def test_chain_complex_of_tetrahedron_boundary():
    h = catalog.homology_labels(chains(catalog.load("tetra_boundary.json")))
    assert h == {"0": "Z", "2": "Z"}


def test_lefschetz_examples():
    tetra = catalog.load("tetra_boundary.json")
    assert lefschetz(SimplicialMap.identity(tetra)) == 2
    assert lefschetz(rotation(6, 1)) == 0
    # reflection has degree -1 on H_1, so L = 1 - (-1)
    assert lefschetz(reflection(6)) == 2
    assert lefschetz(SimplicialMap.constant(SimplicialComplex.circle(5), 3)) == 1


def test_lefschetz_needs_self_map():
    c, p = SimplicialComplex.circle(3), SimplicialComplex.point()
    with pytest.raises(SimplicialError):
        lefschetz(SimplicialMap(c, p, {v: 0 for v in range(3)}))


def has_fixed_simplex(f):
    # a simplicial map has a fixed point iff some simplex is mapped onto itself
    return any(f.image(s) == s for s in f.source.all_simplices())


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_hopf_formula_and_fixed_point_theorem(seed):
    rng = random.Random(seed)
    x = random_complex(rng)
    f = random_self_map(rng, x)
    lf = lefschetz(f)
    assert lf == hopf_lefschetz(f)
    if lf:
        assert has_fixed_simplex(f)


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_additivity(seed):
    rng = random.Random(seed)
    x = random_complex(rng)
    a = random_subcomplex(rng, x)
    f = random_self_map(rng, x, a)
    rep = verify_additivity(x, a, f)
    assert rep.passed
    assert rep.L_fA == (lefschetz(f.restrict(a)) if a.vertices else 0)


def test_additivity_circle_arc():
    circle6, arc = catalog.load("circle6.json"), catalog.load("arc3.json")
    rep = verify_additivity(circle6, arc, SimplicialMap.identity(circle6))
    assert rep.breakdown() == {"L_f": 0, "L_fA": 1, "L_cone": -1}


def test_additivity_rejects_bad_inputs():
    c = SimplicialComplex.circle(6)
    arc = SimplicialComplex.from_facets([[0, 1], [1, 2]])
    with pytest.raises(SimplicialError, match="into A"):
        verify_additivity(c, arc, rotation(6, 3))
    with pytest.raises(SimplicialError, match="subcomplex"):
        verify_additivity(c, SimplicialComplex.from_facets([[0, 3]]), SimplicialMap.identity(c))


def test_quotient_homology():
    c = SimplicialComplex.circle(6)
    arc = SimplicialComplex.from_facets([[0, 1], [1, 2]])
    h = {n: str(g) for n, g in quotient_homology(c, arc).items() if g.free_rank or g.torsion}
    assert h == {1: "Z"}
    tetra = SimplicialComplex.simplex_boundary(2)
    h = {n: str(g) for n, g in quotient_homology(tetra, SimplicialComplex.point()).items() if g.free_rank or g.torsion}
    assert h == {2: "Z"}


def test_chain_map_orientation_signs():
    # swapping the endpoints of an edge negates it
    seg = SimplicialComplex.from_facets([[0, 1]])
    flip = SimplicialMap(seg, seg, {0: 1, 1: 0})
    assert chain_map(flip).component(1).tolist() == [[-1]]
    # trace 0 on vertices, -1 on the edge
    assert lefschetz(flip) == 0 - (-1)


def test_compose_restrict():
    r = rotation(6, 2)
    assert r.compose(r).compose(r) == SimplicialMap.identity(SimplicialComplex.circle(6))
    assert lefschetz(r.compose(reflection(6))) == 2
