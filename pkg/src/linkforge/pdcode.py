"""Oriented link diagrams as PD codes.

A crossing is a 4-tuple of arc identifiers listed **counterclockwise
starting from the incoming under-strand**::

        c (out, under)
        ^
   d ---+--> b        slots: 0 = a (under in), 1 = b, 2 = c (under out),
        |                    3 = d;  the over-strand occupies slots 1, 3.
        a (in, under)

The under-strand always flows slot 0 -> slot 2.  The over-strand's
direction is derived globally by propagating incoming/outgoing roles along
arcs; a crossing is **positive** when the over-strand flows slot 3 ->
slot 1 (rotating the over direction counterclockwise by 90 degrees gives
the under direction), negative when it flows slot 1 -> slot 3.

Arcs are positive integers; each occurs exactly twice among all slots.
Crossing-free circle components cannot be expressed in a bare PD code, so
the diagram carries an explicit ``free_loops`` count.  Components are
indexed by smallest arc identifier, free loops last.

Components that never pass under anything have no orientation data in the
PD code; such strands get a deterministic default direction (the smallest
arc on the strand flows out of its lexicographically smallest end).
Supply diagrams where every component passes under at least once if the
orientation matters.

Diagrams validate on construction and are immutable afterwards; all
operations return new values.
"""

from __future__ import annotations

import json
import re
from typing import Iterable, Mapping, Sequence

from .errors import ValidationError

__all__ = [
    "Diagram",
    "validate",
    "writhe",
    "linking_matrix",
    "mirror",
    "disjoint_union",
    "is_visibly_split",
    "reverse_component",
    "delete_component",
]

_IN = True  # the arc's head is at this end (flow into the crossing)
_OUT = False


class _UnionFind:
    """Union-find over arbitrary hashable items, path-halving."""

    def __init__(self, items: Iterable = ()):
        self.parent = {x: x for x in items}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            # keep the smaller representative for deterministic output
            if ry < rx:
                rx, ry = ry, rx
            self.parent[ry] = rx

    def classes(self) -> dict:
        out: dict = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return out


def _derive_orientation(ends_of_arc, crossings, seeds):
    """Propagate in/out roles over arc ends.

    ``ends_of_arc`` maps arc -> [end, end] where an end is either
    ("x", ci, slot) or ("b", label).  ``seeds`` presets some ends.
    Constraints: the two ends of an arc get opposite roles, and the two
    over-slots of a crossing get opposite roles.  Returns end -> role.
    """
    role = dict(seeds)
    other_end = {}
    for arc, ends in ends_of_arc.items():
        a, b = ends
        other_end[a] = b
        other_end[b] = a
    over_mate = {}
    for ci in range(len(crossings)):
        e1, e3 = ("x", ci, 1), ("x", ci, 3)
        over_mate[e1] = e3
        over_mate[e3] = e1

    def assign(end, value):
        if end in role:
            if role[end] != value:
                raise ValidationError(
                    "inconsistent orientation: arc roles conflict at "
                    f"{end}"
                )
            return
        role[end] = value
        queue.append(end)

    queue = list(role)
    while queue:
        end = queue.pop()
        v = role[end]
        assign(other_end[end], not v)
        if end in over_mate:
            assign(over_mate[end], not v)

    # strands with no seed anywhere (always-over components): pick a
    # deterministic direction and propagate.
    remaining = sorted(e for e in other_end if e not in role)
    while remaining:
        end = remaining[0]
        arc_ends = sorted([end, other_end[end]])
        role[arc_ends[0]] = _OUT
        queue = [arc_ends[0]]
        while queue:
            e = queue.pop()
            v = role[e]
            assign(other_end[e], not v)
            if e in over_mate:
                assign(over_mate[e], not v)
        remaining = sorted(e for e in other_end if e not in role)
    return role


class Diagram:
    """A validated oriented link diagram (PD code plus free loops)."""

    __slots__ = (
        "crossings",
        "free_loops",
        "name",
        "_component_of",
        "_n_components",
        "_signs",
        "_role",
    )

    def __init__(self, crossings: Sequence[Sequence[int]] = (),
                 free_loops: int = 0, name: str | None = None):
        xs = []
        for c in crossings:
            c = tuple(c)
            if len(c) != 4 or not all(isinstance(a, int) and a > 0 for a in c):
                raise ValidationError(
                    f"crossing must be 4 positive arc identifiers, got {c!r}"
                )
            xs.append(c)
        if not isinstance(free_loops, int) or free_loops < 0:
            raise ValidationError("free_loops must be a nonnegative integer")
        object.__setattr__(self, "crossings", tuple(xs))
        object.__setattr__(self, "free_loops", free_loops)
        object.__setattr__(self, "name", name)
        self._validate()

    def __setattr__(self, name, value):
        raise AttributeError("Diagram is immutable")

    # -- validation ------------------------------------------------------

    def _validate(self):
        ends_of_arc: dict[int, list] = {}
        for ci, c in enumerate(self.crossings):
            for slot, arc in enumerate(c):
                ends_of_arc.setdefault(arc, []).append(("x", ci, slot))
        for arc, ends in ends_of_arc.items():
            if len(ends) != 2:
                raise ValidationError(
                    f"arc multiplicity: arc {arc} used {len(ends)} times "
                    "(every arc must occur exactly twice)"
                )

        seeds = {}
        for ci, c in enumerate(self.crossings):
            seeds[("x", ci, 0)] = _IN
            seeds[("x", ci, 2)] = _OUT
        role = _derive_orientation(ends_of_arc, self.crossings, seeds)

        signs = []
        for ci in range(len(self.crossings)):
            signs.append(1 if role[("x", ci, 3)] == _IN else -1)

        uf = _UnionFind(ends_of_arc)
        for a, b, c, d in self.crossings:
            uf.union(a, c)
            uf.union(b, d)
        classes = uf.classes()
        component_of = {}
        for idx, rep in enumerate(sorted(classes, key=lambda r: min(classes[r]))):
            for arc in classes[rep]:
                component_of[arc] = idx

        object.__setattr__(self, "_role", role)
        object.__setattr__(self, "_signs", tuple(signs))
        object.__setattr__(self, "_component_of", component_of)
        object.__setattr__(self, "_n_components", len(classes) + self.free_loops)

    # -- inspection ------------------------------------------------------

    @property
    def n_crossings(self) -> int:
        return len(self.crossings)

    @property
    def n_components(self) -> int:
        return self._n_components

    @property
    def signs(self) -> tuple[int, ...]:
        """Crossing signs, in crossing order."""
        return self._signs

    @property
    def component_of(self) -> Mapping[int, int]:
        """Arc identifier -> component index (free loops carry no arcs)."""
        return dict(self._component_of)

    def arcs(self) -> tuple[int, ...]:
        return tuple(sorted({a for c in self.crossings for a in c}))

    def component_arcs(self, i: int) -> tuple[int, ...]:
        """Sorted arcs of component ``i`` (empty for a free loop)."""
        self._check_component(i)
        return tuple(sorted(a for a, k in self._component_of.items() if k == i))

    def n_arc_components(self) -> int:
        return self._n_components - self.free_loops

    def arc_is_incoming(self, ci: int, slot: int) -> bool:
        """True when the arc in this slot flows into crossing ``ci``."""
        return self._role[("x", ci, slot)] == _IN

    def _check_component(self, i: int):
        if not (0 <= i < self._n_components):
            raise ValidationError(
                f"component index {i} out of range (diagram has "
                f"{self._n_components} components)"
            )

    def __eq__(self, other):
        if not isinstance(other, Diagram):
            return NotImplemented
        return (self.crossings == other.crossings
                and self.free_loops == other.free_loops)

    def __hash__(self):
        return hash((self.crossings, self.free_loops))

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return (f"<Diagram{label}: {self.n_crossings} crossings, "
                f"{self.n_components} components>")

    # -- serialization ---------------------------------------------------

    def to_json_dict(self) -> dict:
        out = {
            "crossings": [list(c) for c in self.crossings],
            "free_loops": self.free_loops,
        }
        if self.name:
            out["name"] = self.name
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    def to_text(self) -> str:
        parts = ["X({},{},{},{})".format(*c) for c in self.crossings]
        parts.extend(["O"] * self.free_loops)
        return " ".join(parts) if parts else ""

    def relabeled(self, offset: int) -> "Diagram":
        """Shift every arc identifier by ``offset``."""
        return Diagram(
            [tuple(a + offset for a in c) for c in self.crossings],
            self.free_loops,
            self.name,
        )


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

_X_TOKEN = re.compile(r"X\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)")


def _from_text(text: str) -> Diagram:
    text = text.strip()
    if not text:
        raise ValidationError("empty input without explicit free_loops")
    crossings = []
    free_loops = 0
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _X_TOKEN.match(text, pos)
        if m:
            crossings.append(tuple(int(g) for g in m.groups()))
            pos = m.end()
        elif text[pos] == "O":
            free_loops += 1
            pos += 1
        else:
            raise ValidationError(f"bad PD text at: {text[pos:pos + 20]!r}")
    return Diagram(crossings, free_loops)


def _from_json_dict(data: Mapping) -> Diagram:
    unknown = set(data) - {"crossings", "free_loops", "name", "endpoints"}
    if unknown:
        raise ValidationError(f"unknown diagram fields: {sorted(unknown)}")
    if "endpoints" in data:
        raise ValidationError(
            "input has tangle endpoints; use the tangle loader"
        )
    crossings = data.get("crossings", [])
    if "free_loops" not in data and not crossings:
        raise ValidationError("empty input without explicit free_loops")
    return Diagram(crossings, data.get("free_loops", 0), data.get("name"))


def validate(raw) -> Diagram:
    """Build a validated :class:`Diagram` from parsed PD input.

    Accepts a JSON-style mapping ``{"crossings": [[a,b,c,d], ...],
    "free_loops": n, "name": ...}``, the compact text form
    ``"X(a,b,c,d) X(...) O"`` (``O`` per crossing-free loop), a JSON
    string, or an existing Diagram (returned unchanged).
    """
    if isinstance(raw, Diagram):
        return raw
    if isinstance(raw, Mapping):
        return _from_json_dict(raw)
    if isinstance(raw, str):
        stripped = raw.lstrip()
        if stripped.startswith("{"):
            try:
                data = json.loads(raw)
            except json.JSONDecodeError as e:
                raise ValidationError(f"bad JSON: {e}") from e
            return _from_json_dict(data)
        return _from_text(raw)
    raise ValidationError(f"cannot interpret {type(raw).__name__} as a diagram")


# ---------------------------------------------------------------------------
# diagram-level invariants
# ---------------------------------------------------------------------------


def writhe(d: Diagram) -> int:
    """Sum of crossing signs."""
    return sum(d.signs)


def linking_matrix(d: Diagram) -> list[list[int]]:
    """Symmetric matrix of pairwise linking numbers, zero diagonal.

    Entry (i, j) is half the signed count of crossings between components
    i and j; self-crossings are ignored.
    """
    m = d.n_components
    sums = [[0] * m for _ in range(m)]
    comp = d._component_of
    for ci, (a, b, c, dd) in enumerate(d.crossings):
        i, j = comp[a], comp[b]
        if i != j:
            s = d.signs[ci]
            sums[i][j] += s
            sums[j][i] += s
    for i in range(m):
        for j in range(m):
            assert sums[i][j] % 2 == 0, "odd inter-component crossing sum"
            sums[i][j] //= 2
    return sums


def mirror(d: Diagram) -> Diagram:
    """Swap over/under at every crossing (the mirror-image link).

    The shadow (cyclic slot order) is unchanged; each tuple is re-rooted
    at the new incoming under-strand, which is the old over-strand's
    incoming arc.
    """
    new = []
    for ci, (a, b, c, dd) in enumerate(d.crossings):
        if d.signs[ci] == 1:  # over flowed d -> b; it becomes the under-strand
            new.append((dd, a, b, c))
        else:  # over flowed b -> d
            new.append((b, c, dd, a))
    return Diagram(new, d.free_loops, d.name)


def disjoint_union(a: Diagram, b: Diagram) -> Diagram:
    """Place ``b`` beside ``a``: arcs of ``b`` are relabeled above ``a``'s,
    so ``b``'s components come after ``a``'s in the component order."""
    offset = max(a.arcs(), default=0)
    shifted = b.relabeled(offset)
    return Diagram(
        a.crossings + shifted.crossings,
        a.free_loops + b.free_loops,
    )


def is_visibly_split(d: Diagram) -> bool:
    """Diagram-level split test: do the components fall into two nonempty
    groups with no crossings between them?

    This is sufficient, not necessary, for the link to be split: a split
    link can be drawn with its parts entangled.
    """
    m = d.n_components
    if m < 2:
        return False
    uf = _UnionFind(range(m))
    comp = d._component_of
    for a, b, c, dd in d.crossings:
        uf.union(comp[a], comp[b])
    return len(uf.classes()) > 1


def reverse_component(d: Diagram, i: int) -> Diagram:
    """Reverse the orientation of component ``i``.

    At crossings where the component passes under, the tuple is re-rooted
    to the new incoming under-arc (rotate by two slots); over-passages
    need no rewrite because over-directions are derived.  Reversing a
    crossing-free loop is a no-op.
    """
    d._check_component(i)
    new = []
    comp = d._component_of
    for a, b, c, dd in d.crossings:
        if comp[a] == i:
            new.append((c, dd, a, b))
        else:
            new.append((a, b, c, dd))
    return Diagram(new, d.free_loops, d.name)


def delete_component(d: Diagram, i: int) -> Diagram:
    """Remove component ``i``, keeping the rest of the diagram.

    Crossings internal to the component vanish; at crossings between the
    component and a survivor the surviving strand's two arcs are merged
    (the strand just passes through).  Survivors that lose all their
    crossings become free loops.
    """
    d._check_component(i)
    if not d.component_arcs(i):  # a free loop
        return Diagram(d.crossings, d.free_loops - 1, d.name)

    comp = d._component_of
    survivors = [a for a in d.arcs() if comp[a] != i]
    uf = _UnionFind(survivors)
    kept = []
    for a, b, c, dd in d.crossings:
        under_dead = comp[a] == i
        over_dead = comp[b] == i
        if under_dead and over_dead:
            continue
        if under_dead:
            uf.union(b, dd)
        elif over_dead:
            uf.union(a, c)
        else:
            kept.append((a, b, c, dd))

    new_crossings = [tuple(uf.find(x) for x in c) for c in kept]
    used = {a for c in new_crossings for a in c}
    freed_classes = {uf.find(a) for a in survivors} - used
    return Diagram(new_crossings, d.free_loops + len(freed_classes), d.name)
