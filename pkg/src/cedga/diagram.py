"""Diagram files: parsing, validation, and the grading group.

A diagram is UTF-8 JSON with fields:

  grading:    {"type": "Z"} or {"type": "Zmod", "m": <int >= 1>}
  vertices:   [{"id": str, "pos": [x, y], "index_one": "edgeId:tail|head"}]
  edges:      [{"id": str, "from": vertexId, "to": vertexId,
                "points": [[x, y], ...]}]   # integer coords, tail..head
  over:       [{"a": {"edge": id, "seg": int}, "b": {...}, "upper": "a"|"b"}]
  potential:  optional {"<edgeId>:tail|head": int, ...}
  basepoints: optional [vertexId, ...]            (bivalent vertices)
  smoothing:  optional {vertexId: [firstHalfEdgeOfBlock1, sizeOfBlock1], ...}
  ends:       optional [halfEdgeRef, ...]          (tangles only)

Half-edge references are "edgeId:tail" or "edgeId:head".
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple


class DiagramError(ValueError):
    """Invalid diagram input (syntax or validation)."""


@dataclass(frozen=True)
class GradingGroup:
    """Z, or Z/m with its chosen generator 1."""

    modulus: int = 0  # 0 means Z; m >= 1 means Z/m

    def __post_init__(self):
        if self.modulus < 0:
            raise DiagramError("grading modulus must be >= 0")

    @property
    def is_z(self) -> bool:
        return self.modulus == 0

    def reduce(self, n: int) -> int:
        return n if self.modulus == 0 else n % self.modulus

    def eq(self, a: int, b: int) -> bool:
        return self.reduce(a - b) == 0

    def parity(self, n: int) -> int:
        """Parity of the canonical representative, used for Koszul signs.

        Well defined for Z and even moduli; for odd moduli the parity of the
        representative in {0..m-1} is used (documented limitation).
        """
        return self.reduce(n) % 2

    def quotient(self, relators) -> "GradingGroup":
        from math import gcd

        g = self.modulus
        for r in relators:
            g = gcd(g, abs(self.reduce(r)))
        return GradingGroup(g)

    def describe(self) -> str:
        if self.modulus == 0:
            return "Z"
        return f"Z/{self.modulus}"

    @staticmethod
    def from_json(obj) -> "GradingGroup":
        if not isinstance(obj, dict) or "type" not in obj:
            raise DiagramError("grading must be {'type': 'Z'} or {'type': 'Zmod', 'm': m}")
        if obj["type"] == "Z":
            if set(obj) != {"type"}:
                raise DiagramError("unknown fields in grading")
            return GradingGroup(0)
        if obj["type"] == "Zmod":
            if set(obj) != {"type", "m"}:
                raise DiagramError("unknown fields in grading")
            m = obj["m"]
            if not isinstance(m, int) or m < 1:
                raise DiagramError("Zmod modulus must be an integer >= 1")
            return GradingGroup(m)
        raise DiagramError(f"unknown grading type {obj['type']!r}")


HalfEdgeRef = Tuple[str, str]  # (edge id, 'tail'|'head')


def parse_half_edge_ref(s: str) -> HalfEdgeRef:
    if not isinstance(s, str) or ":" not in s:
        raise DiagramError(f"bad half-edge reference {s!r}")
    eid, _, end = s.rpartition(":")
    if end not in ("tail", "head"):
        raise DiagramError(f"bad half-edge end {end!r} (want tail|head)")
    return (eid, end)


def half_edge_ref_str(h: HalfEdgeRef) -> str:
    return f"{h[0]}:{h[1]}"


@dataclass
class Vertex:
    id: str
    pos: Tuple[int, int]
    index_one: HalfEdgeRef


@dataclass
class Edge:
    id: str
    tail: str
    head: str
    points: List[Tuple[int, int]]


@dataclass
class OverAssignment:
    a: Tuple[str, int]  # (edge id, segment index)
    b: Tuple[str, int]
    upper: str  # 'a' | 'b'


@dataclass
class Diagram:
    grading: GradingGroup
    vertices: Dict[str, Vertex]
    edges: Dict[str, Edge]
    over: List[OverAssignment]
    potential: Optional[Dict[HalfEdgeRef, int]] = None
    basepoints: List[str] = field(default_factory=list)
    smoothing: Optional[Dict[str, Tuple[HalfEdgeRef, int]]] = None
    ends: Optional[List[HalfEdgeRef]] = None

    @property
    def is_tangle(self) -> bool:
        return self.ends is not None


_TOP_FIELDS = {"grading", "vertices", "edges", "over", "potential", "basepoints", "smoothing", "ends"}


def _check_int_pair(p, what: str) -> Tuple[int, int]:
    if (not isinstance(p, (list, tuple)) or len(p) != 2
            or not all(isinstance(c, int) and not isinstance(c, bool) for c in p)):
        raise DiagramError(f"{what} must be a pair of integers, got {p!r}")
    return (p[0], p[1])


def parse_diagram(text: str) -> Diagram:
    """Parse and validate a diagram file.

    Raises DiagramError with a descriptive message (including the JSON
    position for syntax errors).
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise DiagramError(f"syntax error at line {e.lineno} column {e.colno}: {e.msg}") from None
    if not isinstance(obj, dict):
        raise DiagramError("top level must be a JSON object")
    unknown = set(obj) - _TOP_FIELDS
    if unknown:
        raise DiagramError(f"unknown fields: {sorted(unknown)}")
    for req in ("grading", "vertices", "edges"):
        if req not in obj:
            raise DiagramError(f"missing field {req!r}")

    grading = GradingGroup.from_json(obj["grading"])

    vertices: Dict[str, Vertex] = {}
    for v in obj["vertices"]:
        if set(v) - {"id", "pos", "index_one"}:
            raise DiagramError(f"unknown vertex fields in {v}")
        vid = v.get("id")
        if not isinstance(vid, str):
            raise DiagramError("vertex id must be a string")
        if vid in vertices:
            raise DiagramError(f"duplicate vertex id {vid!r}")
        pos = _check_int_pair(v.get("pos"), f"vertex {vid} pos")
        ref = parse_half_edge_ref(v.get("index_one"))
        vertices[vid] = Vertex(vid, pos, ref)
    if len({v.pos for v in vertices.values()}) != len(vertices):
        raise DiagramError("two vertices share a point")

    edges: Dict[str, Edge] = {}
    for e in obj["edges"]:
        if set(e) - {"id", "from", "to", "points"}:
            raise DiagramError(f"unknown edge fields in {e}")
        eid = e.get("id")
        if not isinstance(eid, str):
            raise DiagramError("edge id must be a string")
        if eid in edges:
            raise DiagramError(f"duplicate edge id {eid!r}")
        tail, head = e.get("from"), e.get("to")
        ends_block = obj.get("ends")
        pts = [_check_int_pair(p, f"edge {eid} point") for p in e.get("points", [])]
        if len(pts) < 2:
            raise DiagramError(f"edge {eid} needs at least two points")
        for p, q in zip(pts, pts[1:]):
            if p == q:
                raise DiagramError(f"edge {eid} has consecutive equal points")
        for vid, which, pt in ((tail, "from", pts[0]), (head, "to", pts[-1])):
            if vid is None:
                if ends_block is None:
                    raise DiagramError(f"edge {eid} has a dangling {which} endpoint")
                continue  # tangle end, checked against the ends block below
            if vid not in vertices:
                raise DiagramError(f"edge {eid} {which} references unknown vertex {vid!r}")
            if vertices[vid].pos != pt:
                raise DiagramError(f"edge {eid} polyline does not {which}-start at vertex {vid}")
        edges[eid] = Edge(eid, tail, head, pts)

    over: List[OverAssignment] = []
    for o in obj.get("over", []):
        if set(o) - {"a", "b", "upper"}:
            raise DiagramError(f"unknown over fields in {o}")
        def strand(s):
            if set(s) != {"edge", "seg"}:
                raise DiagramError(f"bad over strand {s}")
            if s["edge"] not in edges:
                raise DiagramError(f"over references unknown edge {s['edge']!r}")
            nseg = len(edges[s["edge"]].points) - 1
            if not isinstance(s["seg"], int) or not (0 <= s["seg"] < nseg):
                raise DiagramError(f"over references bad segment {s['seg']!r} of edge {s['edge']}")
            return (s["edge"], s["seg"])
        if o.get("upper") not in ("a", "b"):
            raise DiagramError("over.upper must be 'a' or 'b'")
        over.append(OverAssignment(strand(o["a"]), strand(o["b"]), o["upper"]))

    potential = None
    if "potential" in obj:
        potential = {}
        for k, val in obj["potential"].items():
            ref = parse_half_edge_ref(k)
            if ref[0] not in edges:
                raise DiagramError(f"potential references unknown edge {ref[0]!r}")
            if not isinstance(val, int):
                raise DiagramError("potential values must be integers")
            potential[ref] = val

    basepoints = list(obj.get("basepoints", []))
    for b in basepoints:
        if b not in vertices:
            raise DiagramError(f"basepoint {b!r} is not a vertex")

    smoothing = None
    if "smoothing" in obj:
        smoothing = {}
        for vid, blk in obj["smoothing"].items():
            if vid not in vertices:
                raise DiagramError(f"smoothing at unknown vertex {vid!r}")
            if not (isinstance(blk, (list, tuple)) and len(blk) == 2):
                raise DiagramError(f"smoothing block for {vid} must be [halfEdgeRef, size]")
            smoothing[vid] = (parse_half_edge_ref(blk[0]), int(blk[1]))

    ends = None
    if "ends" in obj:
        ends = [parse_half_edge_ref(s) for s in obj["ends"]]
        dangling = []
        for eid, e in edges.items():
            if e.tail is None:
                dangling.append((eid, "tail"))
            if e.head is None:
                dangling.append((eid, "head"))
        if sorted(dangling) != sorted(ends):
            raise DiagramError("ends block must list exactly the dangling edge endpoints")

    # valency / isolation checks
    valency = {vid: 0 for vid in vertices}
    for e in edges.values():
        for vid in (e.tail, e.head):
            if vid is not None:
                valency[vid] += 1
    for vid, val in valency.items():
        if val == 0:
            raise DiagramError(f"isolated vertex {vid!r}")

    # declared index_one half-edges must be incident to their vertex
    for vid, v in vertices.items():
        eid, end = v.index_one
        if eid not in edges:
            raise DiagramError(f"vertex {vid} index_one references unknown edge {eid!r}")
        e = edges[eid]
        attached = (e.tail == vid and end == "tail") or (e.head == vid and end == "head")
        if not attached:
            raise DiagramError(f"vertex {vid} index_one half-edge {eid}:{end} is not incident to it")

    return Diagram(grading, vertices, edges, over, potential, basepoints, smoothing, ends)


def load_diagram(path: str) -> Diagram:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_diagram(fh.read())


def diagram_to_json(d: Diagram) -> dict:
    obj: dict = {
        "grading": {"type": "Z"} if d.grading.is_z else {"type": "Zmod", "m": d.grading.modulus},
        "vertices": [
            {"id": v.id, "pos": list(v.pos), "index_one": half_edge_ref_str(v.index_one)}
            for v in d.vertices.values()
        ],
        "edges": [
            {"id": e.id, "from": e.tail, "to": e.head, "points": [list(p) for p in e.points]}
            for e in d.edges.values()
        ],
        "over": [
            {"a": {"edge": o.a[0], "seg": o.a[1]}, "b": {"edge": o.b[0], "seg": o.b[1]}, "upper": o.upper}
            for o in d.over
        ],
    }
    if d.potential is not None:
        obj["potential"] = {half_edge_ref_str(k): v for k, v in d.potential.items()}
    if d.basepoints:
        obj["basepoints"] = list(d.basepoints)
    if d.smoothing is not None:
        obj["smoothing"] = {vid: [half_edge_ref_str(h), n] for vid, (h, n) in d.smoothing.items()}
    if d.ends is not None:
        obj["ends"] = [half_edge_ref_str(h) for h in d.ends]
    return obj
