"""Recognition of G-graphs from automorphism data.

Given a multigraph, a subgroup H of its automorphisms, and a candidate
clique C, these routines check the characterisation conditions (in the
with-loops and loop-free variants) and, when they hold, rebuild a group
from H, extract the generator multiset S, and produce an independently
verified isomorphism between the input and Phi/Psi(H, S).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .algebra import FiniteGroup, element_order, group_from_table
from .errors import (
    CapExceeded,
    InternalAssertion,
    ParseError,
    PreconditionFailed,
    WitnessInvalid,
)
from .ggraph import GGraph, build_phi, build_psi, colour_clique, shifts
from .multigraph import IsoWitness, Multigraph, verify_iso_witness


@dataclass(frozen=True, order=True)
class GraphAut:
    """A multigraph automorphism as a (vertex map, edge map) pair.

    For multigraphs the vertex map alone does not determine the edge map,
    so both are carried explicitly.  Composition is right-to-left:
    (a.compose(b))(x) = a(b(x)).
    """

    vertex_map: tuple[int, ...]
    edge_map: tuple[int, ...]

    def is_identity(self) -> bool:
        return all(i == x for i, x in enumerate(self.vertex_map)) and all(
            i == x for i, x in enumerate(self.edge_map)
        )

    def compose(self, other: "GraphAut") -> "GraphAut":
        return GraphAut(
            tuple(self.vertex_map[x] for x in other.vertex_map),
            tuple(self.edge_map[x] for x in other.edge_map),
        )

    def inverse(self) -> "GraphAut":
        vm = [0] * len(self.vertex_map)
        em = [0] * len(self.edge_map)
        for i, x in enumerate(self.vertex_map):
            vm[x] = i
        for i, x in enumerate(self.edge_map):
            em[x] = i
        return GraphAut(tuple(vm), tuple(em))


def identity_aut(g: Multigraph) -> GraphAut:
    return GraphAut(tuple(range(g.n_vertices)), tuple(range(g.n_edges)))


def aut_defect(g: Multigraph, a: GraphAut) -> str | None:
    """None when a is an automorphism of g, else a short reason."""
    nv, ne = g.n_vertices, g.n_edges
    if len(a.vertex_map) != nv or sorted(a.vertex_map) != list(range(nv)):
        return "vertex map is not a permutation of the vertices"
    if len(a.edge_map) != ne or sorted(a.edge_map) != list(range(ne)):
        return "edge map is not a permutation of the edges"
    for e in g.edges:
        f = g.edges[a.edge_map[e.id]]
        if {a.vertex_map[e.u], a.vertex_map[e.v]} != {f.u, f.v}:
            return "edge %d maps to edge %d with mismatched endpoints" % (e.id, f.id)
    return None


def close_under_composition(
    g: Multigraph, gens, cap: int = 20000
) -> list[GraphAut]:
    """The subgroup generated by gens, sorted with the identity first.

    Sorting is by (vertex_map, edge_map); the identity is lexicographically
    minimal so it always lands at index 0.
    """
    ident = identity_aut(g)
    seen = {ident}
    frontier = [ident]
    gens = list(gens)
    while frontier:
        nxt = []
        for a in frontier:
            for b in gens:
                c = b.compose(a)
                if c not in seen:
                    if len(seen) >= cap:
                        raise CapExceeded(
                            "automorphism closure exceeds cap %d" % cap
                        )
                    seen.add(c)
                    nxt.append(c)
        frontier = nxt
    return sorted(seen)


@dataclass
class RecognitionWitness:
    """H: automorphism list closed under composition; C: candidate clique."""

    H: list[GraphAut]
    C: list[int]


def witness_from_generators(
    g: Multigraph, gens, C, cap: int = 20000
) -> RecognitionWitness:
    return RecognitionWitness(close_under_composition(g, gens, cap), list(C))


def shifts_of(gg: GGraph) -> RecognitionWitness:
    """H = the distinct shifts, C = the colour clique of the identity."""
    auts = set()
    for sh in shifts(gg):
        auts.add(GraphAut(sh.vertex_map, sh.edge_map))
    return RecognitionWitness(sorted(auts), colour_clique(gg, gg.group.identity))


# ---------------------------------------------------------------------------
# characterisation checks


def vertex_orbits(g: Multigraph, H) -> list[list[int]]:
    """Orbits of H on vertices, each ascending, ordered by minimum."""
    nv = g.n_vertices
    seen = [False] * nv
    orbits = []
    for v in range(nv):
        if seen[v]:
            continue
        orb = []
        stack = [v]
        seen[v] = True
        while stack:
            w = stack.pop()
            orb.append(w)
            for a in H:
                x = a.vertex_map[w]
                if not seen[x]:
                    seen[x] = True
                    stack.append(x)
        orbits.append(sorted(orb))
    return orbits


def stabilizer(H, u: int) -> list[GraphAut]:
    return [a for a in H if a.vertex_map[u] == u]


def _aut_order(a: GraphAut) -> int:
    k = 1
    b = a
    while not b.is_identity():
        b = b.compose(a)
        k += 1
    return k


def is_cyclic_subgroup(elems) -> bool:
    n = len(elems)
    return any(_aut_order(a) == n for a in elems)


def edges_toward(g: Multigraph, u: int, orbit) -> list[int]:
    """Edges adjacent to u whose other end-point lies in the orbit.

    A loop at u counts (once) exactly when u itself is in the orbit.
    """
    members = set(orbit)
    return sorted(eid for eid, w in g.adj()[u] if w in members)


def acts_regularly_on_edges(stab, edge_ids) -> tuple[bool, str]:
    """Regular = transitive + free; checked by direct orbit enumeration."""
    edge_ids = list(edge_ids)
    if not edge_ids:
        return False, "empty edge set"
    if len(edge_ids) != len(stab):
        return False, "|edges| = %d but |Stab| = %d" % (len(edge_ids), len(stab))
    target = set(edge_ids)
    reached = {edge_ids[0]}
    stack = [edge_ids[0]]
    while stack:
        x = stack.pop()
        for a in stab:
            y = a.edge_map[x]
            if y not in target:
                return False, "edge %d leaves the set under the action" % x
            if y not in reached:
                reached.add(y)
                stack.append(y)
    if len(reached) != len(target):
        return False, "action is not transitive (%d of %d edges reached)" % (
            len(reached),
            len(target),
        )
    # transitive with |set| == |group| forces freeness (orbit-stabilizer)
    return True, ""


@dataclass
class RecognitionReport:
    with_loops: bool
    witness_ok: bool
    conditions: dict
    details: list[str]

    @property
    def ok(self) -> bool:
        return self.witness_ok and all(self.conditions.values())

    def lines(self) -> list[str]:
        out = ["witness: %s" % ("ok" if self.witness_ok else "FAIL")]
        for name, passed in self.conditions.items():
            out.append("%s: %s" % (name, "pass" if passed else "FAIL"))
        out.extend("  " + d for d in self.details)
        return out


def _validate_maps(g: Multigraph, w: RecognitionWitness) -> None:
    """Hard structural validation; errors here make the checks meaningless."""
    nv, ne = g.n_vertices, g.n_edges
    for a in w.H:
        if len(a.vertex_map) != nv or sorted(a.vertex_map) != list(range(nv)):
            raise WitnessInvalid("an H element's vertex map is not a permutation")
        if len(a.edge_map) != ne or sorted(a.edge_map) != list(range(ne)):
            raise WitnessInvalid("an H element's edge map is not a permutation")
    for u in w.C:
        if not 0 <= u < nv:
            raise WitnessInvalid("C contains an unknown vertex id %r" % (u,))
    if len(set(w.C)) != len(w.C):
        raise WitnessInvalid("C contains repeated vertices")
    if not w.H:
        raise WitnessInvalid("H is empty")


def _witness_defects(g: Multigraph, w: RecognitionWitness, need_loops: bool):
    defects = []
    for a in w.H:
        reason = aut_defect(g, a)
        if reason is not None:
            defects.append("H element is not an automorphism: " + reason)
            break
    if not any(a.is_identity() for a in w.H):
        defects.append("H does not contain the identity")
    members = set(w.H)
    closed = all(a.compose(b) in members for a in w.H for b in w.H)
    if not closed:
        defects.append("H is not closed under composition")
    for i, u in enumerate(w.C):
        for v in w.C[i + 1 :]:
            if g.multiplicity(u, v) == 0:
                defects.append("C is not a clique: %d and %d not adjacent" % (u, v))
    if need_loops:
        for u in w.C:
            if not g.loops_at(u):
                defects.append("C vertex %d carries no loop" % u)
    return defects


def _run_checks(g: Multigraph, w: RecognitionWitness, with_loops: bool):
    _validate_maps(g, w)
    details = _witness_defects(g, w, need_loops=with_loops)
    witness_ok = not details
    orbits = vertex_orbits(g, w.H)
    orbit_of = {}
    for i, orb in enumerate(orbits):
        for v in orb:
            orbit_of[v] = i
    conditions = {}

    if not with_loops:
        ok = True
        for e in g.edges:
            if orbit_of[e.u] == orbit_of[e.v]:
                details.append(
                    "orbit of vertex %d is not stable (edge %d)" % (e.u, e.id)
                )
                ok = False
                break
        conditions["orbits_stable"] = ok

    met = [False] * len(orbits)
    for u in w.C:
        met[orbit_of[u]] = True
    ok = all(met)
    if not ok:
        missed = met.index(False)
        details.append("orbit of vertex %d misses C" % orbits[missed][0])
    conditions["clique_meets_orbits"] = ok

    stabs = {u: stabilizer(w.H, u) for u in w.C}
    ok = True
    for u in w.C:
        if not is_cyclic_subgroup(stabs[u]):
            details.append("Stab_H %d is not cyclic" % u)
            ok = False
    conditions["stabilizers_cyclic"] = ok

    ok = True
    for u in w.C:
        for i, orb in enumerate(orbits):
            if not with_loops and orbit_of[u] == i:
                continue
            regular, reason = acts_regularly_on_edges(
                stabs[u], edges_toward(g, u, orb)
            )
            if not regular:
                details.append(
                    "Stab_H %d is not regular on edges toward orbit of %d: %s"
                    % (u, orb[0], reason)
                )
                ok = False
    conditions["regular_action"] = ok

    return RecognitionReport(with_loops, witness_ok, conditions, details)


def check_with_loops(g: Multigraph, w: RecognitionWitness) -> RecognitionReport:
    """The three conditions of the with-loops characterisation."""
    return _run_checks(g, w, with_loops=True)


def check_simple(g: Multigraph, w: RecognitionWitness) -> RecognitionReport:
    """The four conditions of the loop-free characterisation."""
    if g.has_loops():
        raise PreconditionFailed("graph has loops; use check_with_loops")
    return _run_checks(g, w, with_loops=False)


def check(g: Multigraph, w: RecognitionWitness) -> RecognitionReport:
    if g.has_loops():
        return check_with_loops(g, w)
    return check_simple(g, w)


# ---------------------------------------------------------------------------
# reconstruction


@dataclass
class ReconstructionResult:
    group: FiniteGroup
    gens: tuple[int, ...]
    rebuilt: GGraph
    iso: IsoWitness  # rebuilt -> input graph
    report: RecognitionReport


def _group_of(H: list[GraphAut]) -> FiniteGroup:
    index = {a: i for i, a in enumerate(H)}
    n = len(H)
    mul = np.zeros((n, n), dtype=np.int32)
    for i, a in enumerate(H):
        for j, b in enumerate(H):
            mul[i, j] = index[a.compose(b)]
    return group_from_table(mul, name="H")


def reconstruct(g: Multigraph, w: RecognitionWitness) -> ReconstructionResult:
    """Rebuild (H, S) and a verified isomorphism g = Phi/Psi(H, S).

    Follows the constructive direction of the characterisation: the vertex
    <sigma_u> h maps to h^{-1}(u), and the edge labeled h'' in the
    multi-edge between the u and v levels maps to the h''-inverse image of
    a fixed chosen edge between u and v (the minimal edge id).
    """
    with_loops = g.has_loops()
    report = check(g, w)
    if not report.ok:
        raise WitnessInvalid(
            "characterisation conditions fail: " + "; ".join(report.details)
        )
    H = sorted(w.H)
    grp = _group_of(H)
    C = list(w.C)

    gens = []
    for u in C:
        stab = [i for i in range(len(H)) if H[i].vertex_map[u] == u]
        k = len(stab)
        cands = [i for i in stab if element_order(grp, i) == k]
        if not cands:
            raise InternalAssertion("cyclic stabilizer has no generator")
        gens.append(min(cands, key=lambda i: H[i]))
    builder = build_psi if with_loops else build_phi
    rebuilt = builder(grp, gens)

    if rebuilt.graph.n_vertices != g.n_vertices:
        raise InternalAssertion("vertex counts differ after reconstruction")

    # chosen edges x0: one per level pair, plus one loop per level
    L = len(C)
    x0 = {}
    for i in range(L):
        for j in range(i + 1, L):
            x0[(i, j)] = g.edges_between(C[i], C[j])[0]
        if with_loops:
            x0[(i, i)] = g.loops_at(C[i])[0]

    inv_of = [H[int(grp.inv[x])] for x in range(len(H))]
    vimg = []
    for v in range(rebuilt.graph.n_vertices):
        lvl = rebuilt.vertex_level(v)
        rep = rebuilt.vertex_coset(v).rep
        vimg.append(inv_of[rep].vertex_map[C[lvl]])
    eimg = []
    for e in rebuilt.graph.edges:
        x = int(rebuilt.edge_glabel[e.id])
        if e.u == e.v:
            pair = (rebuilt.vertex_level(e.u),) * 2
        else:
            i, j = rebuilt.vertex_level(e.u), rebuilt.vertex_level(e.v)
            pair = (min(i, j), max(i, j))
        eimg.append(inv_of[x].edge_map[x0[pair]])

    iso = IsoWitness(tuple(vimg), tuple(eimg))
    if not verify_iso_witness(
        rebuilt.graph, g, iso, strict_labels=False, respect_parts=False
    ):
        raise InternalAssertion("reconstruction isomorphism failed verification")
    return ReconstructionResult(grp, tuple(gens), rebuilt, iso, report)


# ---------------------------------------------------------------------------
# witness JSON


def _ambiguous_edges(g: Multigraph) -> bool:
    seen = set()
    for e in g.edges:
        key = (e.u, e.v) if e.u <= e.v else (e.v, e.u)
        if key in seen:
            return True
        seen.add(key)
    return False


def infer_edge_map(g: Multigraph, vmap) -> tuple[int, ...]:
    """The unique edge map compatible with vmap, when one exists."""
    em = []
    for e in g.edges:
        cands = g.edges_between(vmap[e.u], vmap[e.v])
        if len(cands) != 1:
            raise WitnessInvalid(
                "edge map for edge %d is not inferable (%d candidates);"
                " supply H_generator_edge_maps" % (e.id, len(cands))
            )
        em.append(cands[0])
    return tuple(em)


def witness_to_json(g: Multigraph, w: RecognitionWitness) -> dict:
    data = {
        "H_generators": [list(a.vertex_map) for a in w.H],
        "C": list(w.C),
    }
    if _ambiguous_edges(g):
        data["H_generator_edge_maps"] = [list(a.edge_map) for a in w.H]
    return data


def witness_from_json(g: Multigraph, data, cap: int = 20000) -> RecognitionWitness:
    """Parse the witness format and close the generators into H.

    Edge maps are inferred per generator when every multi-edge has
    multiplicity one, and must be supplied under "H_generator_edge_maps"
    otherwise (entries may be null where inference suffices).
    """
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ParseError("witness is not valid JSON: %s" % exc) from exc
    if not isinstance(data, dict):
        raise ParseError("witness JSON must be an object")
    try:
        vmaps = [tuple(int(x) for x in row) for row in data["H_generators"]]
        C = [int(x) for x in data["C"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError("witness JSON needs H_generators and C arrays") from exc
    emaps = data.get("H_generator_edge_maps")
    if emaps is not None and len(emaps) != len(vmaps):
        raise ParseError("H_generator_edge_maps length mismatch")
    gens = []
    for i, vmap in enumerate(vmaps):
        if sorted(vmap) != list(range(g.n_vertices)):
            raise WitnessInvalid("generator %d is not a vertex permutation" % i)
        row = emaps[i] if emaps is not None else None
        if row is None:
            em = infer_edge_map(g, vmap)
        else:
            em = tuple(int(x) for x in row)
        gens.append(GraphAut(tuple(vmap), em))
    return witness_from_generators(g, gens, C, cap=cap)
