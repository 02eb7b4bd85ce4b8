"""Maslov potentials and generator degrees.

The potential is a value in the grading group for every half-edge, subject to
one difference constraint per edge: P(h_tail) - P(h_head) = n_e.  Solving is
union-find with offsets, which is the exact integer elimination for a pure
difference system over Z or Z/m.  Optional block constraints (equal values at
designated vertices, used by smoothing and basepoints) can make the system
genuinely cyclic; inconsistencies are then reported with a witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

from .diagram import DiagramError, GradingGroup, HalfEdgeRef
from .planar import INF, PlanarMap


@dataclass
class Potential:
    group: GradingGroup
    values: Dict[HalfEdgeRef, int]

    def value(self, href: HalfEdgeRef) -> int:
        return self.values[href]

    def translated(self, r: int) -> "Potential":
        return Potential(self.group, {h: self.group.reduce(v + r) for h, v in self.values.items()})


@dataclass
class PotentialSpace:
    """Solution set of the potential constraints.

    components lists the half-edge classes that move together; the solution
    set is an affine space with one free parameter per component (one of
    which corresponds to overall translation).
    """

    group: GradingGroup
    particular: Optional[Potential]
    components: List[List[HalfEdgeRef]]
    witness: Optional[str] = None

    @property
    def consistent(self) -> bool:
        return self.particular is not None

    @property
    def dimension_before_translation(self) -> int:
        return len(self.components)


class _UF:
    def __init__(self):
        self.parent: Dict[object, object] = {}
        self.offset: Dict[object, int] = {}  # value(x) - value(root(x))

    def add(self, x):
        if x not in self.parent:
            self.parent[x] = x
            self.offset[x] = 0

    def find(self, x):
        if self.parent[x] == x:
            return x, 0
        root, off = self.find(self.parent[x])
        self.parent[x] = root
        self.offset[x] += off
        return root, self.offset[x]

    def union(self, x, y, diff: int, group: GradingGroup) -> Optional[int]:
        """Impose value(x) - value(y) = diff; returns the obstruction if any."""
        rx, ox = self.find(x)
        ry, oy = self.find(y)
        if rx == ry:
            got = ox - oy
            if not group.eq(got, diff):
                return group.reduce(got - diff)
            return None
        self.parent[rx] = ry
        self.offset[rx] = diff + oy - ox
        return None


def all_halfedges(pm: PlanarMap) -> List[HalfEdgeRef]:
    out = []
    for e in pm.diagram.edges.values():
        out.append((e.id, "tail"))
        out.append((e.id, "head"))
    return out


def solve_potentials(pm: PlanarMap, group: Optional[GradingGroup] = None,
                     equalize: Iterable[str] = (),
                     fixed: Optional[Dict[HalfEdgeRef, int]] = None) -> PotentialSpace:
    """Solve the Maslov constraints, optionally equalizing all half-edges at
    the given vertices and pinning explicit values.

    Without equalize/fixed the system is always consistent with one free
    parameter per edge (the translation among them).
    """
    if group is None:
        group = pm.diagram.grading
    uf = _UF()
    hrefs = all_halfedges(pm)
    for h in hrefs:
        uf.add(h)
    witness = None
    for e in pm.diagram.edges.values():
        n = pm.edge_winding[e.id]
        obs = uf.union((e.id, "tail"), (e.id, "head"), n, group)
        if obs is not None and witness is None:
            witness = f"edge {e.id}: obstruction {obs} in {group.describe()}"
    for vid in equalize:
        node = pm.nodes[vid]
        rays = [pm.halfedge_of_ray(vid, i) for i in range(node.valency)]
        for h in rays[1:]:
            obs = uf.union(rays[0], h, 0, group)
            if obs is not None and witness is None:
                witness = (f"equalizing {vid}: cycle obstruction {obs} "
                           f"nonzero in {group.describe()}")
    anchor = "@anchor"
    uf.add(anchor)
    if fixed:
        for h, val in fixed.items():
            obs = uf.union(h, anchor, val, group)
            if obs is not None and witness is None:
                witness = f"fixed value at {h} inconsistent (obstruction {obs})"

    comp: Dict[object, List[HalfEdgeRef]] = {}
    offs: Dict[HalfEdgeRef, Tuple[object, int]] = {}
    for h in hrefs:
        r, off = uf.find(h)
        comp.setdefault(r, []).append(h)
        offs[h] = (r, off)
    ra, _ = uf.find(anchor)
    components = [sorted(v) for k, v in sorted(comp.items(), key=lambda kv: str(kv[0]))
                  if k != ra or not fixed]
    if witness is not None:
        return PotentialSpace(group, None, components, witness)
    values = {}
    for h in hrefs:
        r, off = offs[h]
        base = 0
        if fixed and r == ra:
            _, aoff = uf.find(anchor)
            base = -aoff
        values[h] = group.reduce(off + base)
    return PotentialSpace(group, Potential(group, values), components)


def verify_potential(pm: PlanarMap, pot: Potential) -> List[str]:
    """Check the vanishing condition on every edge; returns failures."""
    bad = []
    for e in pm.diagram.edges.values():
        n = pm.edge_winding[e.id]
        lhs = pot.value((e.id, "tail")) - pot.value((e.id, "head")) - n
        if not pot.group.eq(lhs, 0):
            bad.append(f"edge {e.id}: P(tail)-P(head)-n = {pot.group.reduce(lhs)} != 0")
    return bad


def potential_from_diagram(pm: PlanarMap) -> Potential:
    """The diagram's own potential: verified if declared, else solved."""
    dg = pm.diagram
    if dg.potential is not None:
        missing = [h for h in all_halfedges(pm) if h not in dg.potential]
        if missing:
            space = solve_potentials(pm, fixed=dg.potential)
            if not space.consistent:
                raise DiagramError(space.witness)
            return space.particular
        pot = Potential(dg.grading, {h: dg.grading.reduce(v) for h, v in dg.potential.items()})
        bad = verify_potential(pm, pot)
        if bad:
            raise DiagramError("declared potential invalid: " + "; ".join(bad))
        return pot
    space = solve_potentials(pm)
    assert space.consistent
    return space.particular


class DegreeTable:
    """Degrees of crossings and vertex generators for one potential."""

    def __init__(self, pm: PlanarMap, pot: Potential):
        self.pm = pm
        self.pot = pot
        self.group = pot.group
        self._v1: Dict[Tuple[str, int], int] = {}
        self._memo: Dict[Tuple[str, int, int], int] = {}

    # Gr1 -------------------------------------------------------------
    def crossing_degree(self, cid: str) -> int:
        pm = self.pm
        upper = pm.crossing_upper_strand(cid)
        lower = pm.crossing_lower_strand(cid)
        h_up = pm.gamma_head_halfedge(upper)
        h_lo = pm.gamma_head_halfedge(lower)
        n = pm.crossing_hat_winding(cid)
        return self.group.reduce(self.pot.value(h_up) - self.pot.value(h_lo) + n)

    # Gr2 -------------------------------------------------------------
    def _vertex_base(self, vid: str) -> Dict[int, int]:
        node = self.pm.nodes[vid]
        k = node.valency
        if vid == INF:
            dirs = node.ray_dirs
            for d in dirs:
                if d[0] == 0:
                    raise DiagramError("vertical end direction at infinity")
            left = [d[0] < 0 for d in dirs]
        else:
            _, left = self.pm.vertex_frame(vid)
        P = [self.pot.value(self.pm.halfedge_of_ray(vid, i)) for i in range(k)]
        a = sum(left)
        out = {}
        if 0 < a < k:
            rot = next(i for i in range(k) if left[i] and not left[(i - 1) % k])
            Pn = [P[(rot + j) % k] for j in range(k)]
            for j in range(1, k + 1):  # normal-form index
                if j == a:
                    val = Pn[j - 1] - Pn[j % k]
                elif j == k:
                    val = Pn[k - 1] - Pn[0]
                else:
                    val = Pn[j - 1] - Pn[j] - 1
                orig = (rot + j - 1) % k + 1
                out[orig] = self.group.reduce(val)
        else:
            # one-sided vertex: the declared labeling is used as-is and the
            # special index is the last one
            for j in range(1, k + 1):
                if j == k:
                    val = P[k - 1] - P[0] + 1
                else:
                    val = P[j - 1] - P[j] - 1
                out[j] = self.group.reduce(val)
        return out

    def vertex_gen_degree(self, vid: str, i: int, ell: int) -> int:
        if ell < 1:
            raise ValueError("sector count must be >= 1")
        k = self.pm.valency(vid)
        i = (i - 1) % k + 1
        key = (vid, i, ell)
        if key in self._memo:
            return self._memo[key]
        if ell == 1:
            if vid not in self._v1:
                base = self._vertex_base(vid)
                for j, val in base.items():
                    self._memo[(vid, j, 1)] = val
                self._v1[vid] = 0  # computed marker
            return self._memo[key]
        val = self.group.reduce(
            self.vertex_gen_degree(vid, i, 1)
            + self.vertex_gen_degree(vid, i + 1, ell - 1) + 1)
        self._memo[key] = val
        return val
