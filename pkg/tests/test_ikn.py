"""Certificate verification, obstructions, and the tau search for I(K_n)."""

import math

import pytest

from ggraphs import _tauengine
from ggraphs.algebra import Perm
from ggraphs.errors import BudgetExceeded, ParseError, PreconditionFailed
from ggraphs.ikn import (
    Obstruction,
    TauCertificate,
    build_and_verify,
    canonical_tau,
    conjugate_tau,
    make_rho_sigma,
    obstructions,
    orbit_structure,
    pi_map,
    search_tau,
    verify_tau,
)
from ggraphs.multigraph import Multigraph, isomorphic


def cycle_graph(n):
    g = Multigraph()
    for i in range(n):
        g.add_vertex(str(i))
    for i in range(n):
        g.add_edge(i, (i + 1) % n)
    return g


KNOWN_TAUS = {
    2: "(1,2)",
    3: "(1)(2,3)",
    4: "(1,2)(3,4)",
    5: "(1)(2,3)(4,5)",
    7: "(2)(1,5)(3,4)(6,7)",
    8: "(1,3)(2,6)(4,5)(7,8)",
    9: "(4)(1,2)(3,6)(5,7)(8,9)",
    11: "(1)(2,4)(3,6)(5,9)(7,8)(10,11)",
    13: "(1)(2,10)(3,4)(5,8)(6,11)(7,9)(12,13)",
    16: "(1,12)(3,4)(11,14),(2,9)(6,8)(7,13)(5,10)(15,16)",
    17: "(14)(2,8)(1,13)(3,12)(4,15)(5,6)(7,10)(9,11)(16,17)",
    19: "(1)(9,17)(3,15)(2,7)(4,11)(14,16)(5,8)(6,10)(12,13)(18,19)",
}
NO_CERTIFICATE = (6, 10, 12, 14, 15, 18)


def known_tau(n):
    return Perm.parse(KNOWN_TAUS[n], n)


def brute_taus(n):
    """Oracle: filter every involution with tau(n) = n-1 through verify_tau."""
    found = []

    def extend(img, free):
        if not free:
            tau = Perm(tuple(img[p] for p in range(1, n + 1)))
            if verify_tau(n, tau).ok:
                found.append(tau)
            return
        a = free[0]
        img[a] = a
        extend(img, free[1:])
        for b in free[1:]:
            img[a], img[b] = b, a
            extend(img, tuple(x for x in free[1:] if x != b))
            img[b] = 0
        img[a] = 0

    img = {p: 0 for p in range(1, n + 1)}
    img[n], img[n - 1] = n - 1, n
    extend(img, tuple(range(1, n - 1)))
    return sorted(found, key=lambda t: t.img)


def test_rho_sigma_shapes():
    rs = make_rho_sigma(4)
    assert rs.sigma.cycle_string() == "(1,2,3)(4)"
    assert rs.rho.cycle_string() == "(1,2)(3,4)"
    rs2 = make_rho_sigma(2)
    assert rs2.sigma == Perm.identity(2)
    assert rs2.rho.cycle_string() == "(1,2)"
    for n in (2, 3, 5, 8, 13):
        rs = make_rho_sigma(n)
        assert rs.rho * rs.rho == Perm.identity(n)
        assert rs.sigma.order == max(n - 1, 1)
        assert rs.sigma(n) == n
    with pytest.raises(PreconditionFailed):
        make_rho_sigma(1)


def test_verify_accepts_known_certificates():
    for n in KNOWN_TAUS:
        report = verify_tau(n, known_tau(n))
        assert report.ok, (n, report.failures)


def test_verify_failure_details():
    rep = verify_tau(5, Perm.identity(5))
    assert not rep.ok
    assert any("expected 4" in f for f in rep.failures)
    rep = verify_tau(5, Perm.parse("(1,2,3)(4,5)", 5))
    assert any("not an involution" in f for f in rep.failures)
    # involution of the right shape that breaks the defining relation
    rep = verify_tau(8, Perm.parse("(1,2)(3,6)(4,5)(7,8)", 8))
    assert not rep.ok
    assert any("relation fails at k=" in f for f in rep.failures)
    with pytest.raises(PreconditionFailed):
        verify_tau(6, known_tau(5))


def test_obstruction_kinds():
    assert [o.kind for o in obstructions(6)] == ["Mod4", "Mod6"]
    assert [o.kind for o in obstructions(10)] == ["Mod4"]
    assert [o.kind for o in obstructions(12)] == ["Mod6"]
    assert [o.kind for o in obstructions(14)] == ["Mod4"]
    assert [o.kind for o in obstructions(15)] == ["Mod24"]
    assert [o.kind for o in obstructions(18)] == ["Mod4", "Mod6"]
    assert [o.kind for o in obstructions(39)] == ["Mod24"]
    assert obstructions(2) == ()
    for n in KNOWN_TAUS:
        assert obstructions(n) == ()
    with pytest.raises(PreconditionFailed):
        obstructions(1)


def test_search_agrees_with_brute_force_oracle():
    for n in (5, 6, 7, 8, 9, 10, 12):
        oracle = brute_taus(n)
        result = search_tau(n, "all", short_circuit=False, backend="python")
        assert sorted(c.tau.img for c in result.certificates) == [
            t.img for t in oracle
        ], n
        assert result.complete


def test_search_finds_certificates():
    for n in (2, 3, 4, 5, 7, 8, 9, 11, 13):
        result = search_tau(n, backend="python")
        assert len(result.certificates) == 1
        cert = result.certificates[0]
        assert verify_tau(n, cert.tau).ok
        assert cert.canonical == (canonical_tau(n, cert.tau) == cert.tau)
        assert not result.obstructions


def test_search_short_circuit_and_exhaustion():
    res = search_tau(6)
    assert res.certificates == ()
    assert [o.kind for o in res.obstructions] == ["Mod4", "Mod6"]
    assert res.nodes == 0 and res.complete and res.backend == "none"
    full = search_tau(6, "all", short_circuit=False)
    assert full.certificates == ()
    assert [o.kind for o in full.obstructions] == ["Mod4", "Mod6", "ExhaustiveSearch"]
    assert full.nodes > 0 and full.complete
    # n = 20 has no modular obstruction; emptiness comes from exhaustion only
    res20 = search_tau(20, "all")
    assert res20.certificates == ()
    assert [o.kind for o in res20.obstructions] == ["ExhaustiveSearch"]


def test_search_modes_are_consistent():
    for n in (5, 9, 13):
        first = search_tau(n, "first_only", backend="python")
        every = search_tau(n, "all", backend="python")
        classes = search_tau(n, "up_to_conjugacy", backend="python")
        assert first.certificates[0] == every.certificates[0]
        assert not first.complete and every.complete
        assert len(classes.certificates) == 1
        rep = classes.certificates[0]
        assert rep.canonical
        orbit = {
            conjugate_tau(n, rep.tau, a).img
            for a in range(1, n - 1)
            if math.gcd(a, n - 1) == 1
        }
        assert {c.tau.img for c in every.certificates} == orbit


@pytest.mark.skipif(not _tauengine.HAVE_NUMBA, reason="numba unavailable")
def test_backends_agree():
    for n in (5, 8, 11, 13, 16, 17):
        pa = search_tau(n, "all", backend="python")
        nb = search_tau(n, "all", backend="numba")
        assert [c.tau.img for c in pa.certificates] == [
            c.tau.img for c in nb.certificates
        ]
        assert pa.nodes == nb.nodes


def test_backend_resolution(monkeypatch):
    assert _tauengine.resolve_backend("python") == "python"
    monkeypatch.setenv("GGRAPH_BACKEND", "python")
    assert _tauengine.resolve_backend() == "python"
    monkeypatch.setenv("GGRAPH_BACKEND", "bogus")
    with pytest.raises(PreconditionFailed):
        _tauengine.resolve_backend()
    monkeypatch.delenv("GGRAPH_BACKEND")
    assert _tauengine.resolve_backend() in ("numba", "python")


def test_budget_is_inconclusive(monkeypatch):
    with pytest.raises(BudgetExceeded) as info:
        search_tau(13, "all", budget=5, backend="python")
    assert info.value.nodes > 0
    assert isinstance(info.value.partial, tuple)
    monkeypatch.setenv("GGRAPH_BUDGET", "1")
    with pytest.raises(BudgetExceeded):
        search_tau(13, backend="python")
    # an explicit budget wins over the environment
    assert search_tau(13, budget=10**6, backend="python").certificates
    monkeypatch.setenv("GGRAPH_BUDGET", "plenty")
    with pytest.raises(ParseError):
        search_tau(13, backend="python")


def test_conjugation_action():
    n = 13
    tau = known_tau(n)
    units = [a for a in range(1, n) if math.gcd(a, n - 1) == 1]
    for a in units:
        image = conjugate_tau(n, tau, a)
        assert verify_tau(n, image).ok
        for b in units:
            lhs = conjugate_tau(n, conjugate_tau(n, tau, a), b)
            rhs = conjugate_tau(n, tau, (a * b) % (n - 1))
            assert lhs == rhs
    assert conjugate_tau(n, tau, 1) == tau
    with pytest.raises(PreconditionFailed):
        conjugate_tau(n, tau, 2)  # gcd(2, 12) != 1
    canon = canonical_tau(n, tau)
    assert verify_tau(n, canon).ok
    assert canonical_tau(n, canon) == canon
    assert min(conjugate_tau(n, tau, a).img for a in units) == canon.img


def test_pi_map_values():
    rep = pi_map(5, known_tau(5))
    assert rep.values == (0, 3, 1)
    assert rep.missing == (2,) and rep.expected_missing == 2
    assert rep.injective and rep.conforms
    rep4 = pi_map(4, known_tau(4))
    assert rep4.values == (2, 1)
    assert rep4.missing == (0,) and rep4.expected_missing == 0 and rep4.conforms
    rep2 = pi_map(2, known_tau(2))
    assert rep2.values == () and rep2.missing == (0,) and rep2.conforms
    bad = pi_map(5, Perm.parse("(1,3)(2)(4,5)", 5))
    assert not bad.injective and not bad.conforms


def test_orbit_structure_hand_checks():
    rep = orbit_structure(5, known_tau(5))
    assert rep.orbits == ((1, 2, 3), (4, 5))
    assert rep.group_order == 6 and not rep.degenerate and rep.conforms
    rep7 = orbit_structure(7, known_tau(7))
    assert rep7.orbits == ((1, 5), (2, 3, 4), (6, 7))
    assert rep7.conforms
    rep4 = orbit_structure(4, known_tau(4))
    assert rep4.orbits == ((1, 2), (3, 4))
    assert rep4.group_order == 2 and rep4.degenerate and rep4.conforms
    rep13 = orbit_structure(13, known_tau(13))
    assert rep13.conforms
    assert any(len(o) == 6 for o in rep13.orbits)
    bad = orbit_structure(7, Perm.parse("(1,2)(3,4)(5)(6,7)", 7))
    assert not bad.conforms


def test_build_and_verify_small():
    rep = build_and_verify(3, known_tau(3))
    assert rep.ok and rep.group.order == 6
    assert isomorphic(rep.graph.graph, cycle_graph(6)) is not None
    rep2 = build_and_verify(2, known_tau(2))
    assert rep2.ok and rep2.group.order == 2
    rep5 = build_and_verify(5, known_tau(5))
    assert rep5.ok and rep5.group.order == 20
    rep8 = build_and_verify(8, known_tau(8))
    assert rep8.ok and rep8.group.order == 56
    levels = [len([v for v in range(rep8.graph.graph.n_vertices)
                   if rep8.graph.vertex_level(v) == i]) for i in (0, 1)]
    assert levels == [8, 28]
    bad = build_and_verify(5, Perm.parse("(1,3)(2)(4,5)", 5))
    assert not bad.ok


def test_certificate_json_round_trip():
    cert = search_tau(9, backend="python").certificates[0]
    data = cert.to_json()
    assert data["n"] == 9 and data["cycles"] == cert.tau.cycle_string()
    again = TauCertificate.from_json(data)
    assert again == cert
    data["cycles"] = "(1,2)"
    with pytest.raises(ParseError):
        TauCertificate.from_json(data)
    with pytest.raises(ParseError):
        TauCertificate.from_json({"n": 4, "tau": [1, 2, 3]})
    obs = Obstruction(12, "Mod6")
    assert Obstruction.from_json(obs.to_json()) == obs
    with pytest.raises(ParseError):
        Obstruction.from_json({"n": 12, "kind": "Nope"})
