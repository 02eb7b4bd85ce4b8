"""Admissible-disk enumeration by glued-face surface growth.

A degree-1 regular disk is modeled as a surface built from copies of the
closed faces of the planar map, glued along matching arc copies.  Immersion
is guaranteed by the local gluing rules, so no separate extension criterion
is needed.  Disks are identified by their labeled boundary walks (the
equivalence used for counting), deduplicated and deterministically ordered.

At a node, a boundary visit is a maximal chain of face-corner copies joined
through glued arc slots; its sector run is consecutive and may wrap.  Visits
at crossings must cover one quadrant (a corner) or two (a silent pass); at
graph vertices any count (a neutral corner v[i,l]); a visit closing up
cyclically covers every sector exactly once and becomes an interior point.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Set, Tuple

from .planar import INF, PlanarMap

Slot = Tuple[int, int]  # (cell index, position within the face cycle)


@dataclass
class DiskCorner:
    node: str
    kind: str          # 'crossing' | 'vertex' | 'infinity'
    start_sector: int  # 0-based index of the first covered sector
    length: int        # number of covered sectors (may exceed the valency)
    sign_nontrivial: bool = False  # crossing corners carrying (-1)^(|c|-1)


@dataclass
class Disk:
    """A degree-1 regular admissible disk (or a degree-0 disk at infinity)."""

    generator_corner: DiskCorner
    corners: List[DiskCorner]            # negative/neutral corners in walk order
    walk: Tuple                          # canonical labeled boundary walk
    face_multiplicity: Dict[int, int]    # face index -> copies used

    def describe(self) -> str:
        def fmt(c: DiskCorner) -> str:
            if c.kind == "crossing" and c is not self.generator_corner:
                return c.node
            if c.kind == "crossing":
                return c.node
            name = "inf" if c.node == INF else c.node
            return f"{name}[{c.start_sector + 1},{c.length}]"

        inner = " ".join(fmt(c) for c in self.corners) if self.corners else "1"
        return f"disk(+{fmt(self.generator_corner)}: {inner})"


@dataclass
class DiskSearchResult:
    disks: List[Disk]
    pruned: bool = False


class _State:
    __slots__ = ("cells", "glue", "status", "order", "facecount")

    def __init__(self):
        self.cells: List[int] = []
        self.glue: Dict[Slot, Slot] = {}
        self.status: Dict[Slot, str] = {}   # 'open' | 'boundary' | 'glued'
        self.order: List[Slot] = []
        self.facecount: Dict[int, int] = {}

    def copy(self) -> "_State":
        s = _State.__new__(_State)
        s.cells = list(self.cells)
        s.glue = dict(self.glue)
        s.status = dict(self.status)
        s.order = list(self.order)
        s.facecount = dict(self.facecount)
        return s


class DiskSearch:
    def __init__(self, pm: PlanarMap, face_cap: int = 4, corner_cap: int = 32,
                 sign_convention: str = "a"):
        self.pm = pm
        self.face_cap = face_cap
        self.corner_cap = corner_cap
        self.sign_convention = sign_convention
        self.pruned = False
        self._results: Dict[Tuple, Disk] = {}
        self.face_len = [len(f.darts) for f in pm.faces]
        self.face_darts = [f.darts for f in pm.faces]
        self.face_corners = [f.corners for f in pm.faces]
        self.sector_loc: Dict[Tuple[str, int], Tuple[int, int]] = {}
        for f in pm.faces:
            for pos, c in enumerate(f.corners):
                self.sector_loc[c] = (f.idx, pos)

    # -- accessors --------------------------------------------------------
    def slot_dart(self, st: _State, slot: Slot) -> int:
        cell, pos = slot
        return self.face_darts[st.cells[cell]][pos]

    def corner_info(self, st: _State, corner: Slot) -> Tuple[str, int]:
        cell, pos = corner
        return self.face_corners[st.cells[cell]][pos]

    def _flen(self, st: _State, cell: int) -> int:
        return self.face_len[st.cells[cell]]

    def _add_cell(self, st: _State, face: int) -> int:
        idx = len(st.cells)
        st.cells.append(face)
        st.facecount[face] = st.facecount.get(face, 0) + 1
        for p in range(self.face_len[face]):
            slot = (idx, p)
            st.status[slot] = "open"
            st.order.append(slot)
        return idx

    # -- visit chains -------------------------------------------------------
    def chain_of(self, st: _State, corner: Slot):
        """(corners, cyclic) of the maximal visit chain through this corner.

        Corner (c,p) links backward across its entry slot (c,p) and forward
        across its exit slot (c,p+1); the run's sector indices step by +1
        clockwise in the forward direction.
        """
        first = corner
        seen = {corner}
        while True:
            g = st.glue.get(first)  # entry slot shares the key with the corner
            if g is None:
                break
            c2, p2 = g
            prev = (c2, (p2 - 1) % self._flen(st, c2))
            if prev in seen:
                return self._cycle_from(st, first), True
            seen.add(prev)
            first = prev
        chain = [first]
        cur = first
        while True:
            cell, pos = cur
            g = st.glue.get((cell, (pos + 1) % self._flen(st, cell)))
            if g is None:
                break
            chain.append(g)
            cur = g
        return chain, False

    def _cycle_from(self, st: _State, corner: Slot):
        chain = [corner]
        cur = corner
        while True:
            cell, pos = cur
            nxt = st.glue[(cell, (pos + 1) % self._flen(st, cell))]
            if nxt == corner:
                return chain
            chain.append(nxt)
            cur = nxt

    def _chain_ok(self, st: _State, chain: List[Slot], cyclic: bool,
                  frozen: Set[Slot], final: bool) -> bool:
        node, _ = self.corner_info(st, chain[0])
        nd = self.pm.nodes[node]
        if cyclic:
            return len(chain) == nd.valency and nd.kind != "infinity"
        if any(c in frozen for c in chain):
            return all(c in frozen for c in chain)
        if nd.kind == "infinity":
            return False
        if nd.kind == "crossing":
            if len(chain) > 4:
                return False
            if not final:
                return True
            if len(chain) == 1:
                _, sector = self.corner_info(st, chain[0])
                return not self.pm.crossing_sector_reeb_positive(node, sector)
            return len(chain) == 2
        return True

    def _chain_ends_open(self, st: _State, chain: List[Slot], cyclic: bool) -> bool:
        if cyclic:
            return False
        entry = chain[0]
        lcell, lpos = chain[-1]
        exit_slot = (lcell, (lpos + 1) % self._flen(st, lcell))
        return st.status.get(entry) == "open" or st.status.get(exit_slot) == "open"

    def _check_chain_at(self, st: _State, corner: Slot, frozen: Set[Slot]) -> bool:
        chain, cyclic = self.chain_of(st, corner)
        final = not self._chain_ends_open(st, chain, cyclic)
        return self._chain_ok(st, chain, cyclic, frozen, final)

    def _corners_touching(self, st: _State, slot: Slot) -> List[Slot]:
        cell, pos = slot
        n = self._flen(st, cell)
        return [(cell, pos), (cell, (pos - 1) % n)]

    # -- topology -----------------------------------------------------------
    def next_boundary(self, st: _State, slot: Slot):
        """Next unglued slot along the boundary and the visit chain between."""
        cell, pos = slot
        corners = []
        cur = (cell, (pos + 1) % self._flen(st, cell))
        while True:
            c, p = cur
            corners.append((c, (p - 1) % self._flen(st, c)))
            if st.glue.get(cur) is None:
                return cur, corners
            c2, p2 = st.glue[cur]
            cur = (c2, (p2 + 1) % self._flen(st, c2))

    def boundary_cycles(self, st: _State) -> int:
        seen: Set[Slot] = set()
        cycles = 0
        for s, stat in st.status.items():
            if stat == "glued" or s in seen:
                continue
            cycles += 1
            cur = s
            while cur not in seen:
                seen.add(cur)
                cur, _ = self.next_boundary(st, cur)
        return cycles

    def _chi(self, st: _State) -> int:
        F = len(st.cells)
        total_slots = sum(self._flen(st, c) for c in range(F))
        glues = len(st.glue) // 2
        E = total_slots - glues
        V = 0
        seen: Set[Slot] = set()
        for ci in range(F):
            for p in range(self._flen(st, ci)):
                c = (ci, p)
                if c in seen:
                    continue
                chain, _ = self.chain_of(st, c)
                seen.update(chain)
                V += 1
        return V - E + F

    def _genus_positive(self, st: _State) -> bool:
        return 2 - self._chi(st) - self.boundary_cycles(st) != 0

    def _glue(self, st: _State, s1: Slot, s2: Slot) -> None:
        st.glue[s1] = s2
        st.glue[s2] = s1
        st.status[s1] = "glued"
        st.status[s2] = "glued"

    # -- searches -----------------------------------------------------------
    def search_crossing(self, cid: str) -> DiskSearchResult:
        """All degree-1 regular disks with positive corner at the crossing."""
        self._results = {}
        self.pruned = False
        for sector in range(4):
            if not self.pm.crossing_sector_reeb_positive(cid, sector):
                continue
            face, pos = self.sector_loc[(cid, sector)]
            if self.pm.outer_face is not None and face == self.pm.outer_face:
                continue
            st = _State()
            self._add_cell(st, face)
            frozen = {(0, pos)}
            n = self.face_len[face]
            for wall in {(0, pos), (0, (pos + 1) % n)}:
                st.status[wall] = "boundary"
            self._dfs(st, frozen)
        return DiskSearchResult([self._results[k] for k in sorted(self._results)], self.pruned)

    def search_infinity(self, i: int, ell: int) -> DiskSearchResult:
        """Degree-0 disks whose positive neutral corner covers sectors
        i..i+ell-1 (1-based) at the vertex at infinity."""
        self._results = {}
        self.pruned = False
        k = self.pm.nodes[INF].valency
        st = _State()
        frozen: Set[Slot] = set()
        prev: Optional[Slot] = None
        for j in range(ell):
            sector = (i - 1 + j) % k
            face, pos = self.sector_loc[(INF, sector)]
            cell = self._add_cell(st, face)
            frozen.add((cell, pos))
            if prev is not None:
                pcell, ppos = prev
                exit_slot = (pcell, (ppos + 1) % self._flen(st, pcell))
                entry_slot = (cell, pos)
                assert self.slot_dart(st, entry_slot) == self.pm.twin(self.slot_dart(st, exit_slot))
                self._glue(st, exit_slot, entry_slot)
            prev = (cell, pos)
        fcell, fpos = min(frozen)
        lcell, lpos = max(frozen)
        for wall in {(fcell, fpos), (lcell, (lpos + 1) % self._flen(st, lcell))}:
            st.status[wall] = "boundary"
        if st.facecount and max(st.facecount.values()) > self.face_cap:
            self.pruned = True
        else:
            self._dfs(st, frozen)
        return DiskSearchResult([self._results[k2] for k2 in sorted(self._results)], self.pruned)

    def _dfs(self, st: _State, frozen: Set[Slot]) -> None:
        slot = None
        for s in st.order:
            if st.status[s] == "open":
                slot = s
                break
        if slot is None:
            self._finalize(st, frozen)
            return

        d = self.slot_dart(st, slot)
        twin = self.pm.twin(d)

        # resolve as a boundary arc
        st1 = st.copy()
        st1.status[slot] = "boundary"
        if all(self._check_chain_at(st1, c, frozen) for c in self._corners_touching(st1, slot)):
            self._dfs(st1, frozen)

        # glue a fresh copy of the face across the twin dart
        face2, pos2 = self.pm.face_of_dart[twin]
        if self.pm.outer_face is None or face2 != self.pm.outer_face:
            if st.facecount.get(face2, 0) + 1 > self.face_cap or len(st.cells) + 1 > self.corner_cap:
                self.pruned = True
            else:
                st2 = st.copy()
                cell2 = self._add_cell(st2, face2)
                self._glue(st2, slot, (cell2, pos2))
                if self._post_glue_ok(st2, slot, (cell2, pos2), frozen):
                    self._dfs(st2, frozen)

        # glue to an existing open twin slot
        for s2 in st.order:
            if s2 == slot or st.status.get(s2) != "open":
                continue
            if self.slot_dart(st, s2) != twin:
                continue
            st3 = st.copy()
            self._glue(st3, slot, s2)
            if self._post_glue_ok(st3, slot, s2, frozen):
                self._dfs(st3, frozen)

    def _post_glue_ok(self, st: _State, s1: Slot, s2: Slot, frozen: Set[Slot]) -> bool:
        for corner in self._corners_touching(st, s1) + self._corners_touching(st, s2):
            if not self._check_chain_at(st, corner, frozen):
                return False
        return not self._genus_positive(st)

    def _finalize(self, st: _State, frozen: Set[Slot]) -> None:
        if self.boundary_cycles(st) != 1 or self._chi(st) != 1:
            return
        lcell, lpos = max(frozen)
        start_slot = (lcell, (lpos + 1) % self._flen(st, lcell))
        if st.glue.get(start_slot) is not None:
            return
        corners: List[DiskCorner] = []
        walk: List[Tuple] = []
        cur = start_slot
        seen_frozen = False
        while True:
            walk.append(("d", self.slot_dart(st, cur)))
            nxt, chain_corners = self.next_boundary(st, cur)
            chain, cyclic = self.chain_of(st, chain_corners[0])
            if cyclic or not self._chain_ok(st, chain, cyclic, frozen, final=True):
                return
            if set(chain) & frozen:
                seen_frozen = True
                walk.append(("*",))
            else:
                corner = self._make_corner(st, chain)
                if corner is None:
                    walk.append(("pass", chain[0][0] if False else ""))
                else:
                    corners.append(corner)
                    walk.append(("c", corner.node, corner.start_sector, corner.length))
            cur = nxt
            if cur == start_slot:
                break
        if not seen_frozen or len(corners) > self.corner_cap:
            return
        node, sector = self.corner_info(st, min(frozen))
        gcorner = DiskCorner(node, self.pm.nodes[node].kind, sector, len(frozen))
        if gcorner.kind == "crossing":
            gcorner.sign_nontrivial = self.pm.crossing_sector_sign_nontrivial(
                node, sector, self.sign_convention)
        disk = Disk(gcorner, corners, tuple(walk), dict(st.facecount))
        self._results.setdefault(disk.walk, disk)

    def _make_corner(self, st: _State, chain: List[Slot]) -> Optional[DiskCorner]:
        node, sector0 = self.corner_info(st, chain[0])
        kind = self.pm.nodes[node].kind
        if kind == "crossing":
            if len(chain) == 2:
                return None  # silent pass through the crossing
            c = DiskCorner(node, kind, sector0, 1)
            c.sign_nontrivial = self.pm.crossing_sector_sign_nontrivial(
                node, sector0, self.sign_convention)
            return c
        return DiskCorner(node, kind, sector0, len(chain))


def infinitesimal_contributions(valency: int, i: int, ell: int):
    """Closed-form boundary data of a vertex generator: the Kronecker-delta
    monogon plus one triangle splitting per 1 <= l1 < ell.

    Returns (has_monogon, [(i1, l1, i2, l2), ...]) with 1-based indices.
    """
    splittings = []
    for l1 in range(1, ell):
        l2 = ell - l1
        i2 = (i - 1 + l1) % valency + 1
        splittings.append((i, l1, i2, l2))
    return (ell == valency), splittings
