"""Marked surfaces with boundary as ciliated gluing patterns of handles.

A pattern is a set of vertices (disks with one marked boundary point each)
joined by handles.  Each handle end sits in a slot of a vertex; the slots
at a vertex are linearly ordered, reading left to right from the cilium.
The Euler characteristic is #vertices - #handles.

Fusion merges two vertices into one, concatenating their slot orders
(first vertex first by default, which realizes the "left skein starts to
the left" convention on the merged disk).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

from .errors import FusionError


@dataclass(frozen=True)
class HandleEnd:
    vertex: int
    slot: int
    sign: int  # +1 carries the handle label, -1 carries its dual

    def to_json(self):
        return {"v": self.vertex, "slot": self.slot, "orient": "+" if self.sign > 0 else "-"}

    @staticmethod
    def from_json(data):
        sign = 1 if data.get("orient", "+") == "+" else -1
        return HandleEnd(data["v"], data["slot"], sign)


@dataclass(frozen=True)
class Handle:
    ends: tuple  # (HandleEnd, HandleEnd), signs +1 and -1

    def to_json(self):
        return {"ends": [e.to_json() for e in self.ends]}

    @staticmethod
    def from_json(data):
        ends = tuple(HandleEnd.from_json(e) for e in data["ends"])
        if len(ends) == 2 and ends[0].sign == ends[1].sign:
            ends = (HandleEnd(ends[0].vertex, ends[0].slot, 1), HandleEnd(ends[1].vertex, ends[1].slot, -1))
        return Handle(ends)


@dataclass(frozen=True)
class SurfacePattern:
    n_vertices: int
    handles: tuple  # tuple of Handle
    fusion_history: tuple = ()

    def __post_init__(self):
        slots = {}
        for h in self.handles:
            if len(h.ends) != 2:
                raise FusionError("handles have exactly two ends")
            if {h.ends[0].sign, h.ends[1].sign} != {1, -1}:
                raise FusionError("handle ends must carry opposite orientation flags")
            for e in h.ends:
                if not 0 <= e.vertex < self.n_vertices:
                    raise FusionError(f"handle end at missing vertex {e.vertex}")
                key = (e.vertex, e.slot)
                if key in slots:
                    raise FusionError(f"two handle ends in slot {key}")
                slots[key] = True
        for v in range(self.n_vertices):
            used = sorted(s for (w, s) in slots if w == v)
            if used != list(range(len(used))):
                raise FusionError(f"slots at vertex {v} must be 0..k-1 with no gaps")

    # -- derived data ------------------------------------------------------

    @property
    def n_handles(self):
        return len(self.handles)

    def euler_characteristic(self):
        return self.n_vertices - self.n_handles

    def slots_at(self, v: int):
        """Handle ends at vertex v in cilium order: list of (handle index, end)."""
        found = []
        for hi, h in enumerate(self.handles):
            for e in h.ends:
                if e.vertex == v:
                    found.append((e.slot, hi, e))
        found.sort()
        return [(hi, e) for (_, hi, e) in found]

    def all_slots(self):
        """All handle ends, vertex by vertex in cilium order."""
        out = []
        for v in range(self.n_vertices):
            out.extend(self.slots_at(v))
        return out

    def to_json(self):
        return {
            "vertices": self.n_vertices,
            "marked": list(range(self.n_vertices)),
            "handles": [h.to_json() for h in self.handles],
        }

    @staticmethod
    def from_json(data):
        return SurfacePattern(data["vertices"], tuple(Handle.from_json(h) for h in data["handles"]))


def disk_with_two_points() -> SurfacePattern:
    """Disk with two marked boundary points; one holonomy copy of G."""
    h = Handle((HandleEnd(0, 0, 1), HandleEnd(1, 0, -1)))
    return SurfacePattern(2, (h,), fusion_history=("disk2",))


def disjoint_union(p: SurfacePattern, q: SurfacePattern) -> SurfacePattern:
    shift = p.n_vertices
    handles = list(p.handles)
    for h in q.handles:
        handles.append(Handle(tuple(HandleEnd(e.vertex + shift, e.slot, e.sign) for e in h.ends)))
    return SurfacePattern(
        p.n_vertices + q.n_vertices,
        tuple(handles),
        fusion_history=("union", p.fusion_history, q.fusion_history),
    )


def fuse(p: SurfacePattern, v1: int, v2: int, order: str = "v1v2") -> SurfacePattern:
    """Merge marked points v1 and v2 into one vertex.

    The merged slot order is v1's slots followed by v2's (or the reverse
    with order="v2v1"); the handle count is unchanged and the Euler
    characteristic drops by one.
    """
    if v1 == v2:
        raise FusionError("cannot fuse a marked point with itself")
    if not (0 <= v1 < p.n_vertices and 0 <= v2 < p.n_vertices):
        raise FusionError("fusion vertices out of range")
    if order not in ("v1v2", "v2v1"):
        raise FusionError(f"unknown fusion order {order!r}")
    first, second = (v1, v2) if order == "v1v2" else (v2, v1)
    n1 = len(p.slots_at(first))
    survivors = [v for v in range(p.n_vertices) if v != v2]
    position = {v: i for i, v in enumerate(survivors)}
    handles = []
    for h in p.handles:
        ends = []
        for e in h.ends:
            if e.vertex == first:
                ends.append(HandleEnd(position[v1], e.slot, e.sign))
            elif e.vertex == second:
                ends.append(HandleEnd(position[v1], n1 + e.slot, e.sign))
            else:
                ends.append(HandleEnd(position[e.vertex], e.slot, e.sign))
        handles.append(Handle(tuple(ends)))
    return SurfacePattern(
        p.n_vertices - 1,
        tuple(handles),
        fusion_history=("fuse", p.fusion_history, v1, v2, order),
    )


def annulus() -> SurfacePattern:
    """Annulus with one marked point: fuse the two points of the disk."""
    return fuse(disk_with_two_points(), 0, 1)


def two_strand_chaps() -> SurfacePattern:
    """Two vertices joined by two parallel handles (chaps with two strands).

    Fusing its two vertices yields the once-punctured torus.
    """
    p = disjoint_union(disk_with_two_points(), disk_with_two_points())
    p = fuse(p, 0, 2)  # merge the two +-ends
    p = fuse(p, 1, 2)  # merge the two --ends
    return p


def once_punctured_torus() -> SurfacePattern:
    """One vertex, two handles with interleaved end slots [a b a* b*]."""
    return fuse(two_strand_chaps(), 0, 1)


def genus_two_one_boundary() -> SurfacePattern:
    """Genus-2 surface with one boundary circle: two interleaved handle pairs."""
    p = disjoint_union(once_punctured_torus(), once_punctured_torus())
    return fuse(p, 0, 1)


def pattern_canonical_form(p: SurfacePattern):
    """Canonical encoding under vertex relabeling (small patterns only)."""
    best = None
    for perm in permutations(range(p.n_vertices)):
        handles = []
        for h in p.handles:
            ends = tuple(sorted(((perm[e.vertex], e.slot, e.sign) for e in h.ends)))
            handles.append(ends)
        code = tuple(sorted(handles))
        if best is None or code < best:
            best = code
    return (p.n_vertices, best)


def pattern_isomorphic(p: SurfacePattern, q: SurfacePattern) -> bool:
    if p.n_vertices != q.n_vertices or p.n_handles != q.n_handles:
        return False
    return pattern_canonical_form(p) == pattern_canonical_form(q)
