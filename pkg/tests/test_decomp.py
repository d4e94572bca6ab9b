import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loopdecomp import series as ps
from loopdecomp.decomp import (
    Check,
    DecompositionResult,
    TorsionInput,
    _wedge_identity_check,
    control_prime,
    decompose,
    loop_M_decomposition,
    loop_skeleton_wedge_decomposition,
    loop_V_decomposition,
    skeleton_decomposition,
    sphere_bundle_decomposition,
    two_torsion_decomposition,
)
from loopdecomp.errors import HypothesisNotMet, InvalidInput
from loopdecomp.spaces import (
    POINT,
    RATIONAL,
    FibS,
    Loop,
    LoopSphere,
    Moore,
    OpaqueLoop,
    Product,
    Wedge,
    canonical,
    localize,
    mod_p_series,
    parse_expr,
    render,
)


def T(n, *orders, even=()):
    return TorsionInput.from_orders(n, list(orders) + [2**r for r in even])


# input and skeleton


def test_input_is_sorted():
    assert TorsionInput(2, ((5, 1), (3, 2), (3, 1))).odd == ((3, 1), (3, 2), (5, 1))
    assert T(2, 9, 5, 3) == T(2, 3, 5, 9)
    assert T(2, 3, even=(3, 2)).even == (2, 3)
    assert T(2, 9, 5, 3).describe() == "3,3^2,5"


@pytest.mark.parametrize(
    "args",
    [
        dict(n=1, odd=((3, 1),)),
        dict(n=2, odd=((2, 1),)),
        dict(n=2, odd=((9, 1),)),
        dict(n=2, odd=((3, 0),)),
        dict(n=2, odd=((3, 1),), even=(1,)),
        dict(n=2),
    ],
)
def test_input_validation(args):
    with pytest.raises(InvalidInput):
        TorsionInput(**args)


def test_from_orders_rejects_composites():
    with pytest.raises(InvalidInput):
        TorsionInput.from_orders(2, [6])


def test_skeleton_examples():
    sk = skeleton_decomposition(T(2, 9, 5, 3))
    assert sk.m == 45 and sk.m_factors == ((3, 2), (5, 1))
    assert sk.A == Moore(3, 3)
    assert sk.skeleton == canonical(Wedge((Moore(4, 9), Moore(4, 5), Moore(4, 3))))
    sk = skeleton_decomposition(T(3, 7))
    assert sk.m == 7 and sk.A == POINT and sk.skeleton == Moore(6, 7)
    sk = skeleton_decomposition(T(2, 3, 3))
    assert sk.m == 3 and sk.A == Moore(3, 3)
    sk = skeleton_decomposition(T(2, 3, 3, even=(2,)))
    assert sk.even_summands == (Moore(4, 4),)
    assert sk.skeleton == canonical(Wedge((Moore(4, 4), Moore(4, 3), Moore(4, 3))))


def test_control_prime():
    assert control_prime([3, 5]) == 2
    assert control_prime([2, 3, 5]) == 7
    assert control_prime([3, 5], odd_only=True) == 7
    assert control_prime([], odd_only=True) == 3


# ΩV


def test_loop_v_examples():
    V = loop_V_decomposition(2, [(3, 2), (5, 1)], 40)
    assert V.loop_factors == canonical(Product((FibS(3, 3, 2), FibS(3, 5, 1), LoopSphere(7))))
    assert render(V.loop_factors) == "S^3{9} x S^3{5} x Om S^7"
    assert V.verified
    routes = {(c.prime, c.route) for c in V.certificate}
    assert {(3, "polynomial"), (3, "adams-hilton"), (5, "adams-hilton"), (2, "sphere-loop"), (RATIONAL, "sphere-loop")} <= routes


def test_loop_v_series_identity():
    V = loop_V_decomposition(3, [(7, 1)], 30)
    assert render(V.loop_factors) == "S^5{7} x Om S^11"
    # (1+t^5)/((1-t^4)(1-t^10)) = 1/((1-t^4)(1-t^5))
    fibre = ps.ps_from_rational([1, 0, 0, 0, 0, 1], [1, 0, 0, 0, -1], 30)
    loop11 = ps.ps_from_rational([1], [1] + [0] * 9 + [-1], 30)
    poly = ps.ps_from_rational([1], ps.poly_mul([1, 0, 0, 0, -1], [1, 0, 0, 0, 0, -1]), 30)
    assert fibre * loop11 == poly
    assert mod_p_series(V.loop_factors, 7, 30) == poly
    assert V.verified


def test_loop_v_rejects_bad_factors():
    with pytest.raises(InvalidInput):
        loop_V_decomposition(2, [(3, 1), (3, 2)], 40)
    with pytest.raises(InvalidInput):
        loop_V_decomposition(2, [(2, 2)], 40)
    with pytest.raises(InvalidInput):
        loop_V_decomposition(2, [(3, 1)], 5)


# ΩM


def test_loop_m_single_prime_power():
    res = loop_M_decomposition(T(3, 7), 30)
    assert res.complement == POINT
    assert res.render() == "Omega M ~ S^5{7} x Om S^11"
    assert res.verified
    assert res.loop_factors == loop_V_decomposition(3, [(7, 1)], 30).loop_factors


def test_loop_m_two_equal_primes():
    res = loop_M_decomposition(T(2, 3, 3), 12)
    assert res.verified
    assert res.complement_truncated
    W = res.complement
    assert render(W).startswith("P^4(3) v P^6(3) v P^7(3) v P^8(3)")
    fibre = res.fibration.fibre
    for p in (3, 2, RATIONAL):
        assert mod_p_series(W, p, 13) == mod_p_series(fibre, p, 13)


def test_loop_m_certificate_routes():
    res = loop_M_decomposition(T(2, 9, 5, 3), 24)
    assert res.verified
    routes = {c.route for c in res.certificate}
    assert routes == {"polynomial", "adams-hilton", "sphere-loop", "fibre-rewrite", "wedge-identity"}
    primes = {c.prime for c in res.certificate if c.route == "wedge-identity"}
    assert primes == {3, 5, 2, RATIONAL}


def test_loop_m_rejects_even():
    with pytest.raises(InvalidInput):
        loop_M_decomposition(T(2, 3, even=(2,)), 20)


def test_broken_decomposition_is_caught():
    sk = skeleton_decomposition(T(2, 3, 3))
    wrong = canonical(Product((FibS(3, 3, 1), LoopSphere(7))))  # ΩV alone, W forgotten
    check = _wedge_identity_check(sk.skeleton, 2, sk.m, wrong, 3, 20)
    assert not check.passed
    assert check.mismatch[0] <= 20


# rigidity and localization


@pytest.mark.parametrize("orders", [(9, 5, 3), (3, 3, 5), (7, 7, 7, 3)])
def test_rigidity(orders):
    results = {decompose(T(2, *perm), 20) for perm in itertools.permutations(orders)}
    assert len(results) == 1


@given(st.lists(st.sampled_from([3, 9, 5, 25, 7]), min_size=1, max_size=3), st.data())
@settings(max_examples=15)
def test_rigidity_property(orders, data):
    shuffled = data.draw(st.permutations(orders))
    assert loop_M_decomposition(T(2, *orders), 14) == loop_M_decomposition(T(2, *shuffled), 14)


@pytest.mark.parametrize("orders,p", [((9, 5, 3), 3), ((9, 5, 3), 5), ((3, 3, 7), 7), ((3, 3, 7), 3)])
def test_localization_coherence(orders, p):
    local = [q for q in orders if q % p == 0]
    full = loop_M_decomposition(T(2, *orders), 20)
    part = loop_M_decomposition(T(2, *local), 20)
    assert localize(full.loop_factors, p) == localize(part.loop_factors, p)


# wedge identity


def test_skeleton_wedge():
    res = loop_skeleton_wedge_decomposition(T(3, 7), 30)
    assert res.verified
    assert res.subject == "Omega (M_6 v S^11)"
    assert render(res.complement) == "P^11(7) v ((S^5{7} x Om S^11) /\\ P^11(7))"
    assert res.loop_factors == canonical(Product((loop_M_decomposition(T(3, 7), 30).loop_factors, Loop(res.complement))))


def test_skeleton_wedge_control_prime_trivial():
    res = loop_skeleton_wedge_decomposition(T(2, 3, 3), 20)
    by_prime = {c.prime: c for c in res.certificate}
    assert set(by_prime) == {3, 2, RATIONAL}
    assert all(c.passed for c in res.certificate)


# 2-primary torsion


def test_two_torsion_no_leftover():
    res = two_torsion_decomposition(T(2, 3, even=(2,)), 20)
    assert res.verified
    assert res.complement == POINT
    assert res.loop_factors == OpaqueLoop("V'")


def test_two_torsion_acyclic():
    res = two_torsion_decomposition(T(2, 3, 3, even=(2,)), 30)
    assert res.verified
    mod2 = [c for c in res.certificate if c.route == "mod2-acyclic"]
    assert len(mod2) == 1 and mod2[0].passed
    assert any("not determined" in note for note in res.notes)
    assert isinstance(res.loop_factors, Product)


def test_two_torsion_reduces_to_odd_case():
    inp = T(2, 9, 5, 3)
    assert two_torsion_decomposition(inp, 24) == loop_M_decomposition(inp, 24)


def test_two_torsion_needs_odd():
    with pytest.raises(InvalidInput):
        two_torsion_decomposition(T(2, even=(2, 3)), 20)


def test_decompose_dispatch():
    assert decompose(T(3, 7), 30) == loop_M_decomposition(T(3, 7), 30)
    assert decompose(T(2, 3, even=(3,)), 20).loop_factors == OpaqueLoop("V'")


# sphere bundles


def test_sphere_bundles():
    res = sphere_bundle_decomposition(2, 3, 40)
    assert res.render() == "Om tau_3(S^4) ~ S^3{8} x Om S^7"
    assert res.verified
    res = sphere_bundle_decomposition(4, 4, 40)
    assert render(res.loop_factors) == "S^7{16} x Om S^15"
    assert res.verified


@pytest.mark.parametrize("n,r", [(3, 5), (2, 2), (4, 3), (2, 1), (5, 9)])
def test_sphere_bundle_out_of_range(n, r):
    with pytest.raises(HypothesisNotMet):
        sphere_bundle_decomposition(n, r, 40)


# results


def test_result_is_parseable():
    res = loop_M_decomposition(T(2, 3, 3), 10)
    assert canonical(parse_expr(render(res.loop_factors))) == res.loop_factors


def test_first_failure():
    bad = Check(3, "polynomial", False, 10, (4, 1, 2))
    good = Check(3, "adams-hilton", True, 10)
    res = DecompositionResult("Omega V", POINT, certificate=(good, bad))
    assert not res.verified and res.first_failure() is bad
    assert "degree 4: 1 != 2" in bad.describe()


def test_no_verify_skips_certificate():
    res = decompose(T(2, 9, 5, 3), 40, verify=False)
    assert res.certificate == ()
    assert res.loop_factors == decompose(T(2, 9, 5, 3), 40).loop_factors
