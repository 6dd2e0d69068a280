import json
import random

import pytest

from leavitt_complex.bimodule import Bimodule, windowed_terms
from leavitt_complex.complex import BasisVector, build_window, component_basis, differential
from leavitt_complex.homology import (Coboundary, CocycleError, HomWindow, Normalizer, RhoMap,
                                      build_homotopy, certify_cocycle, decompose_cocycle,
                                      extract_x, generators, interior_vectors, maps_agree,
                                      quasi_balanced_report, rho, sample_cocycle,
                                      verify_coboundary_lemma, verify_embedding,
                                      verify_rho_cocycle, verify_roundtrip)
from leavitt_complex.quiver import Path


@pytest.fixture(scope="module")
def setup2(two_loops):
    return build_window(two_loops, -2, 2, 4), Bimodule(two_loops)


@pytest.fixture(scope="module")
def setup1(one_loop):
    return build_window(one_loop, -3, 3, 6), Bimodule(one_loop)


@pytest.fixture(scope="module")
def setupc(cycle):
    return build_window(cycle, -1, 1, 4), Bimodule(cycle)


def test_rho_of_vertex_is_projection(setupc, cycle):
    w, M = setupc
    for i in cycle.vertices:
        r = rho(M, M.algebra.vertex(i))
        for v in interior_vectors(w):
            assert r(v) == ({v: 1} if v.q.target == i else {})


def test_rho_one_loop_sign(setup1, one_loop):
    w, M = setup1
    r = rho(M, M.algebra.arrow("a"))
    for l in range(-3, 3):
        e_l, _ = component_basis(one_loop, l, abs(l) + 1)
        e_next, _ = component_basis(one_loop, l + 1, abs(l) + 2)
        assert r(e_l) == {e_next: (-1) ** (l % 2)}


def test_rho_is_cocycle(setup2, setupc):
    for w, M in (setup2, setupc):
        B = M.algebra
        for n in (-1, 0, 1):
            for seed in range(4):
                x = B.random_element(seed, n, 3, 3)
                assert verify_rho_cocycle(w, M, x)


def test_rho_multiplicative(setup2, setupc):
    # rho(b b') = rho(b) o_opp rho(b') = (-1)^{|b||b'|} rho(b') o rho(b)
    for w, M in (setup2, setupc):
        B = M.algebra
        vecs = interior_vectors(w)
        rng = random.Random(2)
        for _ in range(12):
            n1, n2 = rng.randint(-1, 1), rng.randint(-1, 1)
            b = B.random_element(rng.randrange(10**6), n1, 2, 2)
            c = B.random_element(rng.randrange(10**6), n2, 2, 2)
            if not b or not c:
                continue
            sign = -1 if (n1 * n2) % 2 else 1
            rb, rc = RhoMap(M, b), RhoMap(M, c)
            prod = b * c
            lhs = RhoMap(M, prod) if prod else None
            for v in vecs[:60]:
                rhs = {k: sign * d for k, d in rc.apply(rb(v)).items() if d}
                assert (lhs(v) if lhs else {}) == rhs


def test_rho_zero_is_zero_map(setup2):
    w, M = setup2
    z = rho(M, M.algebra.zero())
    assert all(z(v) == {} for v in interior_vectors(w))


def test_D_squared_zero(setup2, setupc):
    for w, M in (setup2, setupc):
        rng = random.Random(7)
        for n in (-1, 0, 1):
            h = HomWindow(w, n).random_element(rng, sources=5)
            dd = Coboundary(Coboundary(h))
            assert all(dd(v) == {} for v in interior_vectors(w))


def test_hom_window_elements_are_module_maps(setupc, cycle):
    from leavitt_complex.complex import check_module_map_shape
    w, M = setupc
    h = HomWindow(w, 1).random_element(random.Random(1), sources=6)
    assert check_module_map_shape(cycle, h, interior_vectors(w)) is None


def test_hom_differential_matrix(one_loop):
    w = build_window(one_loop, -1, 1, 4)
    hw = HomWindow(w, 0)
    m = hw.differential_matrix(generators(w))
    assert len(m.domain) == len(hw.basis())


def test_coboundaries_land_in_kernel(setup1, setup2):
    w, M = setup1
    assert verify_coboundary_lemma(w, M, 0, samples=20).passed
    w, M = setup2
    assert verify_coboundary_lemma(w, M, 1, samples=10).passed
    zero = HomWindow(w, 0).element({})
    assert all(Coboundary(zero)(v) == {} for v in interior_vectors(w))


def test_embedding(setup1, setup2, setupc):
    for w, M in (setup1, setup2, setupc):
        cert = verify_embedding(w, M, range(-2, 3) if w.lmin <= -2 else w.degrees)
        assert cert.passed
    w, M = setup1
    cert = verify_embedding(w, M, range(-2, 3))
    assert all(cert.dimensions[f"B^{n}"] == 1 for n in range(-2, 3))


def test_decompose_examples(setup2, two_loops):
    w, M = setup2
    B = M.algebra
    zero = HomWindow(w, 0).element({})
    for b in generators(w):
        y, mu = decompose_cocycle(zero, M, b)
        assert y == B.zero() and mu == {}
        y, mu = decompose_cocycle(rho(M, B.vertex("1")), M, b)
        assert mu == {}
    with pytest.raises(ValueError):
        decompose_cocycle(zero, M, BasisVector("1", "a1", Path.trivial("1"), Path.trivial("1")))


def test_closed_form_for_rho(setup2):
    w, M = setup2
    B = M.algebra
    x = B.random_element(5, 1, 3, 3)
    nz = Normalizer(rho(M, x), M)
    for b in generators(w):
        want = B.term(B.chi(b.p, b.q)) * x * (-1 if (b.degree % 2) else 1)
        assert nz.ypq(b.p, b.q) == want


def test_extract_x(setup2, setupc):
    for w, M in (setup2, setupc):
        B = M.algebra
        assert extract_x(HomWindow(w, 0).element({}), w, M) == B.zero()
        for n in (-1, 0, 1):
            x = B.random_element(n + 10, n, 3, 3)
            assert extract_x(rho(M, x), w, M) == x


def test_extract_x_of_coboundary_is_zero(setup2, setupc):
    # rho(x) cohomologous to zero forces x = 0 since H(rho) is injective
    for w, M in (setup2, setupc):
        rng = random.Random(4)
        for n in (-1, 0, 1):
            for _ in range(4):
                y = Coboundary(HomWindow(w, n - 1).random_element(rng, sources=4))
                assert extract_x(y, w, M) == M.algebra.zero()
                cert = build_homotopy(y, M.algebra.zero(), w, M)
                assert cert.passed


def test_roundtrip_exhaustive(setup2, setupc):
    for w, M in (setup2, setupc):
        for n in w.degrees:
            assert verify_roundtrip(w, M, n).passed


def test_homotopy_for_rho_is_zero(setup2):
    w, M = setup2
    B = M.algebra
    x = B.random_element(8, 0, 4, 4)
    cert = build_homotopy(rho(M, x), x, w, M)
    assert cert.passed
    assert all(not v for v in cert.h._memo.values())


def test_certify_random_cocycles(setup2, setupc):
    for w, M in (setup2, setupc):
        rng = random.Random(0)
        for n in w.degrees:
            for _ in range(4):
                y, x0, h0 = sample_cocycle(w, M, n, rng)
                cert = certify_cocycle(y, w, M)
                assert cert.passed, cert.witness
                assert cert.x == x0
                assert cert.checked > 0 and cert.arrow_checked > 0


def test_wrong_x_is_rejected(setup2, setupc):
    for w, M in (setup2, setupc):
        B = M.algebra
        rng = random.Random(3)
        for n in (-1, 0, 1):
            y, x0, h0 = sample_cocycle(w, M, n, rng)
            extra = B.term(windowed_terms(B, n, 2)[0])
            cert = build_homotopy(y, x0 + extra, w, M)
            assert not cert.passed and "vector" in cert.witness


def test_non_cocycle_is_rejected(setup2):
    w, M = setup2
    # a single elementary map is not a cocycle
    hw = HomWindow(w, 0)
    e = Path.trivial("1")
    src = BasisVector("1", None, e, e)
    y = hw.element({(src, src): 1})
    with pytest.raises(CocycleError):
        extract_x(y, w, M)
    assert not certify_cocycle(y, w, M).passed


def test_certificate_serializes_x_and_h(setup2):
    w, M = setup2
    y, x0, h0 = sample_cocycle(w, M, 0, random.Random(9))
    c = certify_cocycle(y, w, M).to_certificate(w)
    d = json.loads(c.to_json())
    assert d["status"] == "pass"
    assert d["x"] == M.algebra.format(x0)
    assert isinstance(d["h"], dict)


def test_quasi_balanced_report(one_loop, two_loops):
    rep = quasi_balanced_report(one_loop, range(-2, 3), samples=5)
    assert rep.passed
    w = build_window(two_loops, -1, 1, 4)
    assert quasi_balanced_report(two_loops, range(-1, 2), w, samples=5).passed


def test_flipped_action_fails_report(two_loops):
    w = build_window(two_loops, -2, 2, 4)
    bad = Bimodule(two_loops, flip_special=True)
    assert not quasi_balanced_report(two_loops, range(-2, 3), w, samples=5, module=bad).passed


def test_maps_agree(setup2):
    w, M = setup2
    B = M.algebra
    vecs = interior_vectors(w)
    assert maps_agree(rho(M, B.one()), rho(M, B.one()), vecs) is None
    assert maps_agree(rho(M, B.one()), rho(M, B.zero()), vecs) is not None
