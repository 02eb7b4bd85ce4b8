"""Compile a diagram into an exact planar (or sphere) map.

Nodes are graph vertices, crossings, and for tangles the vertex at infinity.
Arcs are the pieces of edges between special points.  Rays at a node are the
incident arc-ends in *clockwise* cyclic order by angle, which the worked
examples pin as the paper's convention; sector i spans clockwise from ray i
to ray i+1.  Faces are traced with the face on the left of each dart.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .diagram import Diagram, DiagramError, HalfEdgeRef
from .geom import (IVec, Point, TurnCounter, cross, dot, neg, polyline_directions,
                   polyline_half_turns, reduce_vec, seg_intersection, sigma, sort_ccw)

INF = "@inf"  # node id of the vertex at infinity


class GeneralPositionError(DiagramError):
    pass


@dataclass
class Arc:
    idx: int
    edge: str
    pos: int                    # position along the edge, 0-based
    points: List[Point]         # rational polyline, tail -> head
    tail_node: str = ""
    head_node: str = ""

    def dir_from(self, end: str) -> IVec:
        """Outgoing direction leaving the given end ('tail'|'head')."""
        if end == "tail":
            p, q = self.points[0], self.points[1]
        else:
            p, q = self.points[-1], self.points[-2]
        return reduce_vec((q[0] - p[0], q[1] - p[1]))

    def node_at(self, end: str) -> str:
        return self.tail_node if end == "tail" else self.head_node


@dataclass
class Strand:
    edge: str
    seg: int
    param: Fraction
    direction: IVec
    in_arc: int = -1
    out_arc: int = -1


@dataclass
class Node:
    id: str
    kind: str                    # 'vertex' | 'crossing' | 'infinity'
    point: Optional[Point]
    rays: List[Tuple[int, str]] = field(default_factory=list)  # (arc idx, end), CW order
    ray_dirs: List[IVec] = field(default_factory=list)
    ray_index: Dict[Tuple[int, str], int] = field(default_factory=dict)
    # crossing-only:
    strands: Optional[Tuple[Strand, Strand]] = None
    upper: int = 0               # index into strands
    ray_strand: List[int] = field(default_factory=list)

    @property
    def valency(self) -> int:
        return len(self.rays)

    def finish(self):
        self.ray_index = {r: i for i, r in enumerate(self.rays)}


@dataclass
class Face:
    idx: int
    darts: List[int]
    corners: List[Tuple[str, int]]   # corner after darts[i]: (node id, sector index)
    is_outer: bool = False


class PlanarMap:
    """Exact combinatorial map of a diagram (sphere map for tangles)."""

    def __init__(self, diagram: Diagram):
        self.diagram = diagram
        self.arcs: List[Arc] = []
        self.nodes: Dict[str, Node] = {}
        self.crossing_ids: List[str] = []
        self.faces: List[Face] = []
        self.face_of_dart: Dict[int, Tuple[int, int]] = {}
        self.outer_face: Optional[int] = None
        self.edge_arcs: Dict[str, List[int]] = {}
        self.edge_winding: Dict[str, int] = {}
        self._halfedge_ray: Dict[HalfEdgeRef, Tuple[str, int]] = {}
        self._build()

    # -- darts ------------------------------------------------------------
    def dart(self, arc_idx: int, forward: bool) -> int:
        return 2 * arc_idx + (0 if forward else 1)

    def dart_arc(self, d: int) -> Arc:
        return self.arcs[d // 2]

    def dart_forward(self, d: int) -> bool:
        return d % 2 == 0

    def twin(self, d: int) -> int:
        return d ^ 1

    def dart_head_node(self, d: int) -> str:
        a = self.dart_arc(d)
        return a.head_node if self.dart_forward(d) else a.tail_node

    def dart_tail_node(self, d: int) -> str:
        a = self.dart_arc(d)
        return a.tail_node if self.dart_forward(d) else a.head_node

    def dart_entry_ray(self, d: int) -> Tuple[str, int]:
        """(node, ray index) of the reversed-entry ray at the dart's head."""
        a = self.dart_arc(d)
        end = "head" if self.dart_forward(d) else "tail"
        n = self.dart_head_node(d)
        return n, self.nodes[n].ray_index[(a.idx, end)]

    def ray_out_dart(self, node: str, ray_idx: int) -> int:
        arc_idx, end = self.nodes[node].rays[ray_idx]
        return self.dart(arc_idx, end == "tail")

    def next_dart(self, d: int) -> int:
        """Next dart of the face on the left: leave along the ray clockwise
        after the reversed-entry ray."""
        n, i = self.dart_entry_ray(d)
        node = self.nodes[n]
        return self.ray_out_dart(n, (i + 1) % node.valency)

    def dart_points(self, d: int) -> List[Point]:
        a = self.dart_arc(d)
        return a.points if self.dart_forward(d) else list(reversed(a.points))

    # -- construction ------------------------------------------------------
    def _build(self) -> None:
        dg = self.diagram
        vert_pos = {v.id: (Fraction(v.pos[0]), Fraction(v.pos[1])) for v in dg.vertices.values()}
        vert_points = set(vert_pos.values())

        segs = []  # (edge id, seg idx, P, Q)
        for e in dg.edges.values():
            pts = [(Fraction(x), Fraction(y)) for x, y in e.points]
            for i, (p, q) in enumerate(zip(pts, pts[1:])):
                segs.append((e.id, i, p, q))
            for p in pts[1:-1]:
                if p in vert_points:
                    raise GeneralPositionError(f"edge {e.id} polyline passes through a vertex point")
            dirs = polyline_directions(pts)
            for d1, d2 in zip(dirs, dirs[1:]):
                if cross(d1, d2) == 0 and dot(d1, d2) < 0:
                    raise GeneralPositionError(f"edge {e.id} reverses direction at a polyline corner")

        # vertices must not lie inside any segment
        for vid, vp in vert_pos.items():
            for (eid, i, p, q) in segs:
                d = (q[0] - p[0], q[1] - p[1])
                w = (vp[0] - p[0], vp[1] - p[1])
                if d[0] * w[1] - d[1] * w[0] == 0:
                    num = w[0] * d[0] + w[1] * d[1]
                    lt = Fraction(num, d[0] * d[0] + d[1] * d[1])
                    if 0 < lt < 1:
                        raise GeneralPositionError(
                            f"vertex {vid} lies in the interior of edge {eid} segment {i}")

        # pairwise intersections
        hits: Dict[Point, List[Tuple[str, int, Fraction]]] = {}
        for i in range(len(segs)):
            for j in range(i + 1, len(segs)):
                e1, s1, p1, q1 = segs[i]
                e2, s2, p2, q2 = segs[j]
                if e1 == e2 and abs(s1 - s2) <= 1:
                    continue  # same or adjacent segments of one edge
                try:
                    res = seg_intersection(p1, q1, p2, q2)
                except ValueError as ex:
                    joint = {p1, q1} & {p2, q2}
                    if joint and joint <= vert_points:
                        res = None  # edges meeting at their common vertex
                    else:
                        raise GeneralPositionError(
                            f"general position violated between segments "
                            f"({e1},{s1}) and ({e2},{s2}): {ex}") from None
                if res is None:
                    continue
                t, u, pt = res
                hits.setdefault(pt, []).append((e1, s1, t))
                hits[pt].append((e2, s2, u))

        for pt, lst in hits.items():
            if len(lst) != 2:
                raise GeneralPositionError(f"more than two strands meet at {pt}")

        # deterministic crossing ids
        ordered = sorted(hits.items(), key=lambda kv: min(kv[1]))
        crossing_key: Dict[Point, str] = {}
        crossing_strands: Dict[str, List[Strand]] = {}
        for n, (pt, lst) in enumerate(ordered):
            cid = f"x{n}"
            crossing_key[pt] = cid
            sts = []
            for (eid, seg, t) in sorted(lst):
                e = dg.edges[eid]
                p = (Fraction(e.points[seg][0]), Fraction(e.points[seg][1]))
                q = (Fraction(e.points[seg + 1][0]), Fraction(e.points[seg + 1][1]))
                sts.append(Strand(eid, seg, t, reduce_vec((q[0] - p[0], q[1] - p[1]))))
            crossing_strands[cid] = sts
            self.crossing_ids.append(cid)
            self.nodes[cid] = Node(cid, "crossing", pt)

        # match over-assignments
        pair_of = {cid: frozenset((s.edge, s.seg) for s in crossing_strands[cid])
                   for cid in self.crossing_ids}
        seen: Dict[str, object] = {}
        for o in dg.over:
            key = frozenset((o.a, o.b))
            match = [cid for cid, pk in pair_of.items() if pk == key]
            if not match:
                raise DiagramError(
                    f"over-assignment for ({o.a},{o.b}) matches no geometric crossing")
            cid = match[0]
            if cid in seen:
                raise DiagramError(f"crossing {cid} has more than one over-assignment")
            seen[cid] = o
        for cid in self.crossing_ids:
            if cid not in seen:
                s = crossing_strands[cid]
                raise DiagramError(
                    f"crossing of ({s[0].edge},{s[0].seg}) and ({s[1].edge},{s[1].seg}) "
                    f"at {self.nodes[cid].point} lacks an over-assignment")
            o = seen[cid]
            sts = crossing_strands[cid]
            upper_pair = o.a if o.upper == "a" else o.b
            self.nodes[cid].strands = (sts[0], sts[1])
            self.nodes[cid].upper = 0 if (sts[0].edge, sts[0].seg) == upper_pair else 1

        # vertices (and the vertex at infinity)
        for v in dg.vertices.values():
            self.nodes[v.id] = Node(v.id, "vertex", vert_pos[v.id])
        if dg.is_tangle:
            self.nodes[INF] = Node(INF, "infinity", None)

        # split edges into arcs
        for e in dg.edges.values():
            pts = [(Fraction(x), Fraction(y)) for x, y in e.points]
            cuts = []  # (seg, t, point)
            for pt, lst in hits.items():
                for (eid, seg, t) in lst:
                    if eid == e.id:
                        cuts.append((seg, t, pt))
            cuts.sort(key=lambda c: (c[0], c[1]))
            arc_ids: List[int] = []
            cur = [pts[0]]
            ci = 0
            for seg in range(len(pts) - 1):
                while ci < len(cuts) and cuts[ci][0] == seg:
                    _, t, pt = cuts[ci]
                    cur.append(pt)
                    a = Arc(len(self.arcs), e.id, len(arc_ids), cur)
                    self.arcs.append(a)
                    arc_ids.append(a.idx)
                    cur = [pt]
                    ci += 1
                cur.append(pts[seg + 1])
            a = Arc(len(self.arcs), e.id, len(arc_ids), cur)
            self.arcs.append(a)
            arc_ids.append(a.idx)
            self.edge_arcs[e.id] = arc_ids

            self.arcs[arc_ids[0]].tail_node = e.tail if e.tail is not None else INF
            self.arcs[arc_ids[-1]].head_node = e.head if e.head is not None else INF
            for k, (seg, t, pt) in enumerate(cuts):
                cid = crossing_key[pt]
                self.arcs[arc_ids[k]].head_node = cid
                self.arcs[arc_ids[k + 1]].tail_node = cid
                for s in self.nodes[cid].strands:
                    if s.edge == e.id and s.seg == seg and s.param == t:
                        s.in_arc = arc_ids[k]
                        s.out_arc = arc_ids[k + 1]

        # rotation systems
        for node in self.nodes.values():
            incidences = []
            for a in self.arcs:
                if a.tail_node == node.id:
                    incidences.append(((a.idx, "tail"), a.dir_from("tail")))
                if a.head_node == node.id:
                    incidences.append(((a.idx, "head"), a.dir_from("head")))
            if node.kind == "infinity":
                order = []
                for href in dg.ends:
                    eid, end = href
                    arc_idx = self.edge_arcs[eid][0 if end == "tail" else -1]
                    order.append((arc_idx, end))
                byray = dict(incidences)
                node.rays = order
                node.ray_dirs = [neg(byray[r]) for r in order]
                node.finish()
                continue
            ccw = sort_ccw(incidences, key=lambda it: it[1])
            for (r1, d1), (r2, d2) in zip(ccw, ccw[1:]):
                if d1 == d2:
                    raise GeneralPositionError(
                        f"two half-edges at {node.id} leave in exactly the same direction")
            cw = list(reversed(ccw))
            node.rays = [r for r, _ in cw]
            node.ray_dirs = [d for _, d in cw]
            if node.kind == "vertex":
                for d in node.ray_dirs:
                    if d[0] == 0:
                        raise GeneralPositionError(f"vertical half-edge at vertex {node.id}")
                v = dg.vertices[node.id]
                eid, end = v.index_one
                arc_idx = self.edge_arcs[eid][0 if end == "tail" else -1]
                anchor = node.rays.index((arc_idx, end))
                node.rays = node.rays[anchor:] + node.rays[:anchor]
                node.ray_dirs = node.ray_dirs[anchor:] + node.ray_dirs[:anchor]
            elif node.kind == "crossing":
                node.ray_strand = []
                s0 = node.strands[0]
                for (arc_idx, end) in node.rays:
                    on0 = arc_idx in (s0.in_arc, s0.out_arc)
                    node.ray_strand.append(0 if on0 else 1)
                for i in range(4):
                    if node.ray_strand[i] == node.ray_strand[(i + 1) % 4]:
                        raise GeneralPositionError(f"degenerate crossing {node.id}")
            node.finish()
        self.nodes and [n.finish() for n in self.nodes.values()]

        # half-edge lookup
        for e in dg.edges.values():
            for end, vid in (("tail", e.tail), ("head", e.head)):
                nid = vid if vid is not None else INF
                arc_idx = self.edge_arcs[e.id][0 if end == "tail" else -1]
                ray_idx = self.nodes[nid].ray_index[(arc_idx, end)]
                self._halfedge_ray[(e.id, end)] = (nid, ray_idx)

        # faces
        seen_darts = set()
        for d0 in range(2 * len(self.arcs)):
            if d0 in seen_darts:
                continue
            darts, corners = [], []
            d = d0
            while True:
                darts.append(d)
                seen_darts.add(d)
                n, i = self.dart_entry_ray(d)
                corners.append((n, i))
                d = self.next_dart(d)
                if d == d0:
                    break
            self.faces.append(Face(len(self.faces), darts, corners))
        for f in self.faces:
            for pos, d in enumerate(f.darts):
                self.face_of_dart[d] = (f.idx, pos)

        # connectivity: every complementary region must be a disk
        if self.arcs:
            adj: Dict[str, set] = {}
            for a in self.arcs:
                adj.setdefault(a.tail_node, set()).add(a.head_node)
                adj.setdefault(a.head_node, set()).add(a.tail_node)
            start = self.arcs[0].tail_node
            reach, frontier = {start}, [start]
            while frontier:
                n = frontier.pop()
                for m in adj.get(n, ()):
                    if m not in reach:
                        reach.add(m)
                        frontier.append(m)
            if len(reach) != len(self.nodes):
                raise DiagramError("diagram must be connected (split diagrams are not supported)")

        v_count, e_count, f_count = len(self.nodes), len(self.arcs), len(self.faces)
        if v_count - e_count + f_count != 2:
            raise DiagramError(
                f"map is not spherical: V-E+F = {v_count}-{e_count}+{f_count} != 2"
                + (" (check the ends ordering)" if dg.is_tangle else ""))

        if not dg.is_tangle:
            outer = [f for f in self.faces if self.face_turning(f) == -2]
            bounded = [f for f in self.faces if self.face_turning(f) == 2]
            if len(outer) != 1 or len(bounded) != len(self.faces) - 1:
                raise DiagramError("could not identify a unique outer face")
            outer[0].is_outer = True
            self.outer_face = outer[0].idx

        for e in dg.edges.values():
            pts = [(Fraction(x), Fraction(y)) for x, y in e.points]
            self.edge_winding[e.id] = polyline_half_turns(pts)

    def face_turning(self, f: Face) -> int:
        """Total tangent turning (half-turns) of the smoothed face boundary.

        Bounded faces give +2, the outer face gives -2.
        """
        tc = TurnCounter()
        first_dirs = polyline_directions(self.dart_points(f.darts[0]))
        tc.start(first_dirs[0])
        start_dir = tc.current
        for k, d in enumerate(f.darts):
            dirs = polyline_directions(self.dart_points(d))
            for dd in dirs if k > 0 else dirs[1:]:
                tc.turn_short(dd)
            n, j = f.corners[k]
            node = self.nodes[n]
            r_out = node.ray_dirs[(j + 1) % node.valency]
            if node.valency == 1:
                tc.turn_cw(r_out)
            else:
                tc.turn_short(r_out)
        assert tc.current == start_dir
        return tc.count

    # -- vertex frames -----------------------------------------------------
    def vertex_frame(self, vid: str):
        """(rays in CW order from the declared first half-edge, left mask).

        Left means negative x-direction; the left rays always form one
        consecutive cyclic block.
        """
        node = self.nodes[vid]
        if node.kind != "vertex":
            raise DiagramError(f"{vid} is not a vertex")
        left = [d[0] < 0 for d in node.ray_dirs]
        k = len(left)
        if 0 < sum(left) < k:
            blocks = sum(1 for i in range(k) if left[i] and not left[(i - 1) % k])
            if blocks != 1:
                raise DiagramError(f"left half-edges at {vid} are not consecutive")
        return node.rays, left

    def halfedge_ray(self, href: HalfEdgeRef) -> Tuple[str, int]:
        return self._halfedge_ray[href]

    def halfedge_of_ray(self, nid: str, ray_idx: int) -> HalfEdgeRef:
        arc_idx, end = self.nodes[nid].rays[ray_idx]
        a = self.arcs[arc_idx]
        return (a.edge, end)

    def valency(self, nid: str) -> int:
        return self.nodes[nid].valency

    # -- turning -----------------------------------------------------------
    def path_half_turns(self, darts: List[int], normalize_ends: bool = True) -> int:
        """Signed half-turns of the tangent along a connected dart walk."""
        if not darts:
            raise DiagramError("empty walk")
        for d1, d2 in zip(darts, darts[1:]):
            if self.dart_head_node(d1) != self.dart_tail_node(d2):
                raise DiagramError("walk is not connected")
        tc = TurnCounter()
        first = True
        for d in darts:
            for dline in polyline_directions(self.dart_points(d)):
                if first:
                    tc.start(dline)
                    first = False
                else:
                    tc.turn_short(dline)
        if normalize_ends:
            tc.normalize_end_horizontal()
        return tc.count

    # -- crossing helpers ----------------------------------------------------
    def crossing_upper_strand(self, cid: str) -> Strand:
        n = self.nodes[cid]
        return n.strands[n.upper]

    def crossing_lower_strand(self, cid: str) -> Strand:
        n = self.nodes[cid]
        return n.strands[1 - n.upper]

    def crossing_sector_reeb_positive(self, cid: str, sector: int) -> bool:
        """A sector is Reeb-positive iff its clockwise-end bounding ray lies
        on the upper strand: the positive pair is swept counterclockwise from
        the upper tangent line to the lower one."""
        n = self.nodes[cid]
        return n.ray_strand[(sector + 1) % 4] == n.upper

    def crossing_sector_sign_nontrivial(self, cid: str, sector: int, convention: str = "a") -> bool:
        """True when the quadrant carries orientation sign (-1)^(|c|-1).

        Convention 'a': the quadrants to the left of the oriented lower
        strand; 'b' is the automorphism-swapped alternative.
        """
        n = self.nodes[cid]
        lower = self.crossing_lower_strand(cid)
        u_ray = None
        for j in (sector, (sector + 1) % 4):
            if n.ray_strand[j] == n.upper:
                u_ray = n.ray_dirs[j]
        assert u_ray is not None
        left = cross(lower.direction, u_ray) > 0
        return left if convention == "a" else not left

    def gamma_line_dirs(self, cid: str, strand: Strand) -> List[IVec]:
        """Tangent directions from the crossing forward to the edge end,
        ending with the normalized horizontal."""
        e = self.diagram.edges[strand.edge]
        pts = [(Fraction(x), Fraction(y)) for x, y in e.points]
        dirs = polyline_directions(pts)[strand.seg:]
        out = [reduce_vec(d) for d in dirs]
        out.append((sigma(out[-1]), 0))
        return out

    def gamma_head_halfedge(self, strand: Strand) -> HalfEdgeRef:
        return (strand.edge, "head")

    def crossing_hat_winding(self, cid: str) -> int:
        """Half-turn class of the grading loop of a crossing: the upper
        reference path, the reversed lower one, and the reversed capping arc."""
        upper = self.crossing_upper_strand(cid)
        lower = self.crossing_lower_strand(cid)
        up_dirs = self.gamma_line_dirs(cid, upper)
        lo_dirs = self.gamma_line_dirs(cid, lower)
        tc = TurnCounter()
        tc.start(up_dirs[0])
        for d in up_dirs[1:]:
            tc.turn_short(d)
        for d in reversed(lo_dirs):
            if dot(tc.current, d) < 0:
                d = neg(d)
            if d != tc.current:
                tc.turn_short(d)
        target = upper.direction
        if cross(tc.current, target) > 0:
            target = neg(target)
        tc.turn_short(target)
        return tc.count

    def describe(self) -> str:
        lines = [
            f"nodes: {len(self.nodes)} ({len(self.crossing_ids)} crossings), "
            f"arcs: {len(self.arcs)}, faces: {len(self.faces)}"
        ]
        for cid in self.crossing_ids:
            n = self.nodes[cid]
            p = n.point
            up = self.crossing_upper_strand(cid)
            lines.append(f"  {cid} at ({p[0]},{p[1]}): upper=({up.edge},{up.seg})")
        return "\n".join(lines)


def build_planar_map(diagram: Diagram) -> PlanarMap:
    return PlanarMap(diagram)
