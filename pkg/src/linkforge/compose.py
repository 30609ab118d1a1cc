"""Composition calculus: string-link tangles and link surgeries.

A :class:`TangleDiagram` is a PD code with open ends: ``m`` strands enter
at bottom positions ``0..m-1`` and leave at top positions ``0..m-1``,
strand ``k`` running from bottom ``k`` to top ``k`` (oriented upward).
Crossing-free circles ride along in ``free_loops``; closed components
with crossings are rejected.

A :class:`ClosurePattern` pairs up the ``2m`` boundary points with arcs
drawn outside the tangle box.  The outside of the box is a disk, so a
pattern is realizable without extra crossings exactly when the pairing is
non-crossing in the boundary's cyclic order (bottom left-to-right, then
top right-to-left).  Permutation-style closures (each top to a bottom)
and plat-style closures (top-top and bottom-bottom caps) are both
expressible; note that a pairing that merges strands into fewer
components generally *must* use caps: no two-component top-to-bottom
closure of three strands is non-crossing.

Everything here is pure: inputs are never mutated.
"""

from __future__ import annotations

import json
from typing import Iterable, Mapping, Optional, Sequence

from .errors import ValidationError
from .pdcode import Diagram, _derive_orientation, _UnionFind, _IN, _OUT

__all__ = [
    "TangleDiagram",
    "ClosurePattern",
    "identity_tangle",
    "stack",
    "reflect",
    "close",
    "double",
    "hashizume_sum",
    "insert_local_knots",
]


class TangleDiagram:
    """A validated string-link tangle."""

    __slots__ = ("crossings", "free_loops", "bottom", "top", "name",
                 "_role", "_signs")

    def __init__(self, crossings: Sequence[Sequence[int]],
                 bottom: Sequence[int], top: Sequence[int],
                 free_loops: int = 0, name: str | None = None):
        xs = []
        for c in crossings:
            c = tuple(c)
            if len(c) != 4 or not all(isinstance(a, int) and a > 0 for a in c):
                raise ValidationError(
                    f"crossing must be 4 positive arc identifiers, got {c!r}"
                )
            xs.append(c)
        bottom = tuple(bottom)
        top = tuple(top)
        if len(bottom) != len(top) or not bottom:
            raise ValidationError(
                "a tangle needs equal, nonempty bottom and top endpoint lists"
            )
        if not isinstance(free_loops, int) or free_loops < 0:
            raise ValidationError("free_loops must be a nonnegative integer")
        object.__setattr__(self, "crossings", tuple(xs))
        object.__setattr__(self, "bottom", bottom)
        object.__setattr__(self, "top", top)
        object.__setattr__(self, "free_loops", free_loops)
        object.__setattr__(self, "name", name)
        self._validate()

    def __setattr__(self, name, value):
        raise AttributeError("TangleDiagram is immutable")

    @property
    def m(self) -> int:
        """Number of strands."""
        return len(self.bottom)

    @property
    def signs(self) -> tuple[int, ...]:
        return self._signs

    @property
    def strand_of(self) -> dict:
        """Endpoint -> strand index; trivial by the string-link condition."""
        out = {("bottom", k): k for k in range(self.m)}
        out.update({("top", k): k for k in range(self.m)})
        return out

    def arcs(self) -> tuple[int, ...]:
        seen = {a for c in self.crossings for a in c}
        seen.update(self.bottom)
        seen.update(self.top)
        return tuple(sorted(seen))

    def _validate(self):
        ends_of_arc: dict[int, list] = {}
        for ci, c in enumerate(self.crossings):
            for slot, arc in enumerate(c):
                ends_of_arc.setdefault(arc, []).append(("x", ci, slot))
        for k, arc in enumerate(self.bottom):
            ends_of_arc.setdefault(arc, []).append(("b", ("bottom", k)))
        for k, arc in enumerate(self.top):
            ends_of_arc.setdefault(arc, []).append(("b", ("top", k)))
        for arc, ends in ends_of_arc.items():
            if len(ends) != 2:
                raise ValidationError(
                    f"arc multiplicity: arc {arc} has {len(ends)} ends "
                    "(crossing slots plus boundary endpoints must total 2)"
                )

        seeds = {}
        for ci in range(len(self.crossings)):
            seeds[("x", ci, 0)] = _IN
            seeds[("x", ci, 2)] = _OUT
        for k in range(self.m):
            seeds[("b", ("bottom", k))] = _OUT  # strands leave the bottom
            seeds[("b", ("top", k))] = _IN
        role = _derive_orientation(ends_of_arc, self.crossings, seeds)

        # strand condition: following upward from bottom k must exit at top k
        head_of = {}
        for arc, ends in ends_of_arc.items():
            for e in ends:
                if role[e] == _IN:
                    head_of[arc] = e
        on_strand = set()
        for k in range(self.m):
            arc = self.bottom[k]
            while True:
                on_strand.add(arc)
                end = head_of[arc]
                if end[0] == "b":
                    kind, idx = end[1]
                    if kind != "top" or idx != k:
                        raise ValidationError(
                            f"strand {k} exits at {end[1]} instead of "
                            f"top {k} (not a string link)"
                        )
                    break
                _, ci, slot = end
                arc = self.crossings[ci][(slot + 2) % 4]

        if len(on_strand) != len(ends_of_arc):
            raise ValidationError(
                "tangle contains a closed component with crossings; "
                "only strands and free_loops are supported"
            )

        signs = []
        for ci in range(len(self.crossings)):
            signs.append(1 if role[("x", ci, 3)] == _IN else -1)
        object.__setattr__(self, "_role", role)
        object.__setattr__(self, "_signs", tuple(signs))

    def __eq__(self, other):
        if not isinstance(other, TangleDiagram):
            return NotImplemented
        return (self.crossings == other.crossings
                and self.free_loops == other.free_loops
                and self.bottom == other.bottom
                and self.top == other.top)

    def __hash__(self):
        return hash((self.crossings, self.free_loops, self.bottom, self.top))

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return (f"<TangleDiagram{label}: {self.m} strands, "
                f"{len(self.crossings)} crossings>")

    def to_json_dict(self) -> dict:
        out = {
            "crossings": [list(c) for c in self.crossings],
            "free_loops": self.free_loops,
            "endpoints": {"bottom": list(self.bottom), "top": list(self.top)},
        }
        if self.name:
            out["name"] = self.name
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "TangleDiagram":
        unknown = set(data) - {"crossings", "free_loops", "name", "endpoints"}
        if unknown:
            raise ValidationError(f"unknown tangle fields: {sorted(unknown)}")
        eps = data.get("endpoints")
        if not isinstance(eps, Mapping) or set(eps) != {"bottom", "top"}:
            raise ValidationError(
                'tangle input needs "endpoints": {"bottom": [...], "top": [...]}'
            )
        return cls(data.get("crossings", []), eps["bottom"], eps["top"],
                   data.get("free_loops", 0), data.get("name"))

    def relabeled(self, offset: int) -> "TangleDiagram":
        return TangleDiagram(
            [tuple(a + offset for a in c) for c in self.crossings],
            [a + offset for a in self.bottom],
            [a + offset for a in self.top],
            self.free_loops,
            self.name,
        )


def identity_tangle(m: int) -> TangleDiagram:
    """The trivial string link: m parallel strands, no crossings."""
    if m < 1:
        raise ValidationError("identity tangle needs at least one strand")
    arcs = list(range(1, m + 1))
    return TangleDiagram([], arcs, arcs)


class ClosurePattern:
    """A non-crossing perfect pairing of a tangle's 2m boundary points.

    Boundary points are ``("bottom", k)`` and ``("top", k)`` for strand
    positions ``k = 0..m-1``.  Realizability (the pairing arcs can be
    drawn disjointly outside the tangle box) is checked at construction.
    ``side`` records on which side of the box the through-going arcs are
    nested; it does not affect any computed invariant.
    """

    __slots__ = ("m", "pairs", "side")

    def __init__(self, m: int, pairs: Iterable[tuple], side: str = "right"):
        if side not in ("left", "right"):
            raise ValidationError('side must be "left" or "right"')
        norm = []
        seen = set()
        for pair in pairs:
            e1, e2 = pair
            for e in (e1, e2):
                if (not isinstance(e, tuple) or len(e) != 2
                        or e[0] not in ("bottom", "top")
                        or not 0 <= e[1] < m):
                    raise ValidationError(f"bad boundary point {e!r}")
                if e in seen:
                    raise ValidationError(f"boundary point {e!r} paired twice")
                seen.add(e)
            norm.append(frozenset((e1, e2)))
        if len(seen) != 2 * m:
            raise ValidationError("pattern must pair every boundary point")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "pairs", frozenset(norm))
        object.__setattr__(self, "side", side)
        if not self._non_crossing():
            raise ValidationError(
                "unrealizable pattern: pairing arcs would cross outside "
                "the tangle box"
            )

    def __setattr__(self, name, value):
        raise AttributeError("ClosurePattern is immutable")

    def _position(self, e) -> int:
        kind, k = e
        return k if kind == "bottom" else 2 * self.m - 1 - k

    def _non_crossing(self) -> bool:
        partner = {}
        for pair in self.pairs:
            e1, e2 = tuple(pair)
            p1, p2 = self._position(e1), self._position(e2)
            partner[p1] = p2
            partner[p2] = p1
        stack = []
        for p in range(2 * self.m):
            if partner[p] > p:
                stack.append(p)
            else:
                if not stack or stack[-1] != partner[p]:
                    return False
                stack.pop()
        return not stack

    @classmethod
    def identity(cls, m: int, side: str = "right") -> "ClosurePattern":
        """Standard closure: top k to bottom k, arcs nested around one side."""
        return cls(m, [(("top", k), ("bottom", k)) for k in range(m)], side)

    @classmethod
    def from_cycles(cls, m: int, cycles: Sequence[Sequence[int]],
                    side: str = "right") -> "ClosurePattern":
        """Closure whose components realize the given strand cycles.

        Strands absent from ``cycles`` close individually.  Each cycle
        must occupy a contiguous index block; it is realized by a zigzag
        of top caps and bottom cups (so within a cycle alternate strands
        are traversed downward).
        """
        used = set()
        pairs = []
        for cyc in cycles:
            block = sorted(set(cyc))
            if len(block) != len(cyc):
                raise ValidationError(f"cycle {cyc!r} repeats a strand")
            if used & set(block):
                raise ValidationError("cycles overlap")
            if any(not 0 <= k < m for k in block):
                raise ValidationError(f"cycle {cyc!r} out of range")
            used.update(block)
            if len(block) == 1:
                pairs.append((("top", block[0]), ("bottom", block[0])))
                continue
            if block[-1] - block[0] != len(block) - 1:
                raise ValidationError(
                    f"cycle {cyc!r} is not a contiguous block; its closure "
                    "arcs cannot be drawn without crossings"
                )
            lo, k = block[0], len(block)
            for j in range(0, k - 1, 2):
                pairs.append((("top", lo + j), ("top", lo + j + 1)))
            for j in range(1, k - 1, 2):
                pairs.append((("bottom", lo + j), ("bottom", lo + j + 1)))
            if k % 2 == 0:
                pairs.append((("bottom", lo), ("bottom", lo + k - 1)))
            else:
                pairs.append((("top", lo + k - 1), ("bottom", lo)))
        for k in range(m):
            if k not in used:
                pairs.append((("top", k), ("bottom", k)))
        return cls(m, pairs, side)

    def flip(self) -> "ClosurePattern":
        """Exchange top and bottom (the pattern seen by a reflected tangle)."""
        swap = {"top": "bottom", "bottom": "top"}
        pairs = [tuple((swap[kind], k) for kind, k in pair)
                 for pair in self.pairs]
        return ClosurePattern(self.m, pairs, self.side)

    def __eq__(self, other):
        if not isinstance(other, ClosurePattern):
            return NotImplemented
        return self.m == other.m and self.pairs == other.pairs

    def __hash__(self):
        return hash((self.m, self.pairs))

    def __repr__(self):
        return f"<ClosurePattern m={self.m} pairs={sorted(map(sorted, self.pairs))}>"


# ---------------------------------------------------------------------------
# tangle operations
# ---------------------------------------------------------------------------


def stack(a: TangleDiagram, b: TangleDiagram) -> TangleDiagram:
    """Componentwise connected sum of string links: ``b`` on top of ``a``,
    top endpoint k of ``a`` fused to bottom endpoint k of ``b``."""
    if a.m != b.m:
        raise ValidationError(
            f"strand-count mismatch: {a.m} vs {b.m}"
        )
    offset = max(a.arcs(), default=0)
    b = b.relabeled(offset)
    uf = _UnionFind(set(a.arcs()) | set(b.arcs()))
    for k in range(a.m):
        uf.union(a.top[k], b.bottom[k])
    crossings = [tuple(uf.find(x) for x in c)
                 for c in a.crossings + b.crossings]
    bottom = [uf.find(x) for x in a.bottom]
    top = [uf.find(x) for x in b.top]
    return TangleDiagram(crossings, bottom, top,
                         a.free_loops + b.free_loops)


def reflect(l: TangleDiagram) -> TangleDiagram:
    """The reflection of a string link: flip top-to-bottom and reverse
    every strand.

    The flip is through a plane perpendicular to the projection plane, so
    which strand is over is preserved in space while every crossing sign
    is negated.  On the PD code: endpoints swap roles and each crossing
    ``(a, b, c, d)`` is re-rooted as ``(c, b, a, d)`` (cyclic order
    reversed by the planar flip, then rooted at the new incoming
    under-arc).
    """
    crossings = [(c, b, a, d) for (a, b, c, d) in l.crossings]
    return TangleDiagram(crossings, l.top, l.bottom, l.free_loops, l.name)


def close(l: TangleDiagram, p: ClosurePattern) -> Diagram:
    """Close a tangle with a pattern, producing a link diagram.

    The pattern's arcs add no crossings; they fuse boundary arcs.  Strands
    traversed against their upward orientation in the resulting closed
    curves are reversed (crossing tuples re-rooted), with each closed
    component taking its direction from its smallest arc.
    """
    if p.m != l.m:
        raise ValidationError(
            f"pattern is for {p.m} strands but tangle has {l.m}"
        )
    arc_at = {("bottom", k): l.bottom[k] for k in range(l.m)}
    arc_at.update({("top", k): l.top[k] for k in range(l.m)})
    partner = {}
    for pair in p.pairs:
        e1, e2 = tuple(pair)
        partner[e1] = e2
        partner[e2] = e1

    ends_of_arc: dict[int, list] = {a: [] for a in l.arcs()}
    for ci, c in enumerate(l.crossings):
        for slot, arc in enumerate(c):
            ends_of_arc[arc].append(("x", ci, slot))
    boundary_end_of = {}
    for k in range(l.m):
        ends_of_arc[l.bottom[k]].append(("b", ("bottom", k)))
        ends_of_arc[l.top[k]].append(("b", ("top", k)))

    role = l._role

    def other_end(arc, end):
        e1, e2 = ends_of_arc[arc]
        return e2 if end == e1 else e1

    # Trace the closed curves: walk each component once, recording the
    # final direction of every arc ("forward" = the tangle's upward
    # orientation).  Entering an arc at its tail means forward.
    direction: dict[int, bool] = {}
    uf = _UnionFind(l.arcs())  # fused-arc classes
    n_free = l.free_loops
    for start in sorted(ends_of_arc):
        if start in direction:
            continue
        arc, forward = start, True
        touches_crossing = False
        while arc not in direction:
            direction[arc] = forward
            # move to the far end of this arc in its traversal direction
            e1, e2 = ends_of_arc[arc]
            if forward:
                far = e1 if role[e1] == _IN else e2
            else:
                far = e1 if role[e1] == _OUT else e2
            if far[0] == "x":
                touches_crossing = True
                _, ci, slot = far
                nxt = l.crossings[ci][(slot + 2) % 4]
                step_end = ("x", ci, (slot + 2) % 4)
                # forward iff we enter the next arc at its tail
                forward = role[step_end] == _OUT
                arc = nxt
            else:
                jump = partner[far[1]]
                nxt = arc_at[jump]
                uf.union(arc, nxt)
                jump_end = ("b", jump)
                # entering at the strand's own tail (bottom) keeps the
                # tangle orientation; entering at a head reverses it
                forward = role[jump_end] == _OUT
                arc = nxt
        if not touches_crossing:
            n_free += 1

    crossings = []
    for ci, c in enumerate(l.crossings):
        renamed = tuple(uf.find(x) for x in c)
        if direction[c[0]]:
            crossings.append(renamed)
        else:
            a, b, cc, d = renamed
            crossings.append((cc, d, a, b))
    return Diagram(crossings, n_free)


def double(l: TangleDiagram) -> Diagram:
    """The double of a string link: the standard closure of the string
    link stacked with its own reflection."""
    return close(stack(l, reflect(l)), ClosurePattern.identity(l.m))


# ---------------------------------------------------------------------------
# connected sums of links
# ---------------------------------------------------------------------------


def _resolve_arc(d: Diagram, comp: int, arc: Optional[int], which: str) -> Optional[int]:
    arcs = d.component_arcs(comp)
    if arc is None:
        return min(arcs) if arcs else None
    if not arcs:
        raise ValidationError(
            f"{which}: component {comp} is a crossing-free loop; "
            "omit the arc argument"
        )
    if arc not in arcs:
        raise ValidationError(
            f"{which}: arc {arc} is not on component {comp}"
        )
    return arc


def _arc_ends(d: Diagram, arc: int):
    ends = []
    for ci, c in enumerate(d.crossings):
        for slot, a in enumerate(c):
            if a == arc:
                ends.append((ci, slot))
    head = next(e for e in ends if d.arc_is_incoming(*e))
    tail = next(e for e in ends if not d.arc_is_incoming(*e))
    return head, tail


def hashizume_sum(l: Diagram, i: int, k: Diagram, j: int,
                  arc_l: Optional[int] = None,
                  arc_k: Optional[int] = None) -> Diagram:
    """Connected sum of ``l`` and ``k`` along components ``i`` and ``j``.

    The diagrams are placed side by side, the chosen arcs are cut, and
    the four loose ends are rejoined respecting orientation.  The result
    has ``m + n - 1`` components; ``l``'s components keep their positions
    (component ``i`` absorbs component ``j``) and ``k``'s remaining
    components follow.  When the chosen component is a crossing-free
    loop, that circle is simply replaced by the other summand's component
    (pass ``None`` for its arc).

    The resulting Jones polynomial does not depend on which arcs are
    chosen; by default the smallest arc on each component is used.
    """
    l._check_component(i)
    k._check_component(j)
    arc_l = _resolve_arc(l, i, arc_l, "hashizume_sum")
    offset = max(l.arcs(), default=0)
    k_shift = k.relabeled(offset)
    # component indices survive relabeling (order is by smallest arc)
    arc_k0 = _resolve_arc(k, j, arc_k, "hashizume_sum")

    if arc_l is None or arc_k0 is None:
        # summing at a crossing-free circle: the circle is absorbed by the
        # other summand's component (the unknot is the unit of the sum)
        return Diagram(l.crossings + k_shift.crossings,
                       l.free_loops + k.free_loops - 1)

    arc_k = arc_k0 + offset
    head_l, _ = _arc_ends(l, arc_l)
    head_k, _ = _arc_ends(k_shift, arc_k)

    new_l = []
    for ci, c in enumerate(l.crossings):
        c = list(c)
        if ci == head_l[0]:
            c[head_l[1]] = arc_k
        new_l.append(tuple(c))
    new_k = []
    for ci, c in enumerate(k_shift.crossings):
        c = list(c)
        if ci == head_k[0]:
            c[head_k[1]] = arc_l
        new_k.append(tuple(c))
    return Diagram(new_l + new_k, l.free_loops + k.free_loops)


def insert_local_knots(l: Diagram,
                       knots: Sequence[Optional[Diagram]]) -> Diagram:
    """Tie ``knots[i]`` into component ``i`` of ``l`` (componentwise sum
    with a totally split link, realized by repeated connected sums).

    Entries may be ``None`` to leave a component alone.  Every present
    entry must be a knot (one component).  The result is independent of
    insertion order up to isotopy.
    """
    if len(knots) != l.n_components:
        raise ValidationError(
            f"need one entry per component: got {len(knots)} for "
            f"{l.n_components} components"
        )
    out = l
    for i, kn in enumerate(knots):
        if kn is None:
            continue
        if kn.n_components != 1:
            raise ValidationError(
                f"entry {i} has {kn.n_components} components; local knots "
                "must be knots"
            )
        out = hashizume_sum(out, i, kn, 0)
    return out
