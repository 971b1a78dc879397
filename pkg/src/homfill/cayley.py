"""Bounded pieces of the homological Cayley complex and the chain operators.

A ball stores the vertices within a radius of the identity, every labeled
edge between stored vertices, and one 2-cell per (base vertex, marked
relator) whose full boundary loop stays inside the ball.  Indexing is
deterministic: vertices in BFS-lexicographic discovery order, edges by
(source, generator), cells by (base, relator).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .backends import GroupBackend, enumerate_ball_vertices
from .errors import DomainError, InvariantError
from .presentation import HomPresentation
from .words import Word, format_word


class OneCycle:
    """Sparse integer edge chain; zero coefficients are dropped on build."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs: dict[int, int] = {}
        if coeffs:
            for e, c in (coeffs.items() if isinstance(coeffs, dict) else coeffs):
                if c:
                    self.coeffs[e] = self.coeffs.get(e, 0) + c
                    if not self.coeffs[e]:
                        del self.coeffs[e]

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        return isinstance(other, OneCycle) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.key())

    def __add__(self, other: "OneCycle") -> "OneCycle":
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return OneCycle(out)

    def __neg__(self) -> "OneCycle":
        return OneCycle({e: -c for e, c in self.coeffs.items()})

    def scale(self, k: int) -> "OneCycle":
        return OneCycle({e: k * c for e, c in self.coeffs.items()})

    def key(self):
        return tuple(sorted(self.coeffs.items()))

    def length(self) -> int:
        return sum(abs(c) for c in self.coeffs.values())

    def __repr__(self):
        return f"OneCycle({self.coeffs!r})"


class TwoChain:
    """Sparse integer cell chain."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs: dict[int, int] = {}
        if coeffs:
            for s, c in (coeffs.items() if isinstance(coeffs, dict) else coeffs):
                if c:
                    self.coeffs[s] = self.coeffs.get(s, 0) + c
                    if not self.coeffs[s]:
                        del self.coeffs[s]

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        return isinstance(other, TwoChain) and self.coeffs == other.coeffs

    def __add__(self, other: "TwoChain") -> "TwoChain":
        out = dict(self.coeffs)
        for s, c in other.coeffs.items():
            out[s] = out.get(s, 0) + c
        return TwoChain(out)

    def __sub__(self, other: "TwoChain") -> "TwoChain":
        return self + TwoChain({s: -c for s, c in other.coeffs.items()})

    def scale(self, k: int) -> "TwoChain":
        return TwoChain({s: k * c for s, c in self.coeffs.items()})

    def key(self):
        return tuple(sorted(self.coeffs.items()))

    def area(self) -> int:
        return sum(abs(c) for c in self.coeffs.values())

    def __repr__(self):
        return f"TwoChain({self.coeffs!r})"


@dataclass(frozen=True)
class Cell:
    base: int
    relator: int
    boundary: tuple[tuple[int, int], ...]  # (edge index, traversal sign)
    vertex_path: tuple[int, ...]  # vertex before each boundary step; [0] = base


@dataclass
class CayleyBall:
    backend: GroupBackend
    hom_pres: HomPresentation
    radius: int
    vertices: list[Word]
    vertex_index: dict[Word, int]
    distance: list[int]
    edges: list[tuple[int, int, int]]  # (source, generator 1-based, target)
    edge_index: dict[tuple[int, int], int]
    cells: list[Cell]
    cell_index: dict[tuple[int, int], int] = field(default_factory=dict)
    coset_labels: list[Word] = field(default_factory=list)

    @property
    def generators(self) -> tuple[str, ...]:
        return self.hom_pres.generators

    def vertex_of(self, w: Word) -> int:
        nf = self.backend.normal_form(w)
        if nf not in self.vertex_index:
            raise DomainError(f"vertex {format_word(nf, self.generators) or 'e'} outside ball")
        return self.vertex_index[nf]

    def edge_label(self, edge: int) -> int:
        return self.edges[edge][1]

    def step(self, vertex: int, letter: int) -> tuple[int, int, int]:
        """Traverse one letter: returns (edge, sign, next vertex) or raises."""
        word = self.vertices[vertex]
        target_word = self.backend.normal_form(word + (letter,))
        if target_word not in self.vertex_index:
            raise DomainError(
                f"path leaves ball at prefix ending {format_word((letter,), self.generators)}"
                f" from {format_word(word, self.generators) or 'e'}"
            )
        nxt = self.vertex_index[target_word]
        if letter > 0:
            key = (vertex, letter)
            sign = 1
        else:
            key = (nxt, -letter)
            sign = -1
        if key not in self.edge_index:
            raise InvariantError("edge between ball vertices missing from index")
        return self.edge_index[key], sign, nxt


def build_ball(
    backend: GroupBackend,
    hom_pres: HomPresentation,
    radius: int,
    vertex_budget: int | None = None,
) -> CayleyBall:
    if radius < 1:
        raise DomainError("radius must be >= 1")
    if hom_pres.rank != backend.rank:
        raise DomainError("presentation and backend disagree on generator count")
    vertices = enumerate_ball_vertices(backend, radius, vertex_budget)
    vertex_index = {w: i for i, w in enumerate(vertices)}

    distance = [0] * len(vertices)
    # discovery order is by BFS level, so recompute levels with a fresh BFS
    seen = {vertices[0]: 0}
    frontier = [vertices[0]]
    level = 0
    while frontier:
        level += 1
        new = []
        for v in sorted(frontier):
            for j in range(backend.rank):
                for letter in (j + 1, -(j + 1)):
                    u = backend.normal_form(v + (letter,))
                    if u in vertex_index and u not in seen:
                        seen[u] = level
                        new.append(u)
        frontier = new
    for w, d in seen.items():
        distance[vertex_index[w]] = d

    edges: list[tuple[int, int, int]] = []
    edge_index: dict[tuple[int, int], int] = {}
    for source, word in enumerate(vertices):
        for g in range(1, backend.rank + 1):
            target_word = backend.normal_form(word + (g,))
            if target_word in vertex_index:
                edge_index[(source, g)] = len(edges)
                edges.append((source, g, vertex_index[target_word]))

    ball = CayleyBall(
        backend=backend,
        hom_pres=hom_pres,
        radius=radius,
        vertices=vertices,
        vertex_index=vertex_index,
        distance=distance,
        edges=edges,
        edge_index=edge_index,
        cells=[],
    )

    marked = hom_pres.marked_relators
    for base in range(len(vertices)):
        for r in marked:
            rel = hom_pres.base.relators[r]
            boundary = []
            path = []
            v = base
            ok = True
            for letter in rel:
                path.append(v)
                try:
                    edge, sign, v = ball.step(v, letter)
                except DomainError:
                    ok = False
                    break
                boundary.append((edge, sign))
            if ok:
                if v != base:
                    raise InvariantError("relator loop did not close in the ball")
                ball.cell_index[(base, r)] = len(ball.cells)
                ball.cells.append(Cell(base, r, tuple(boundary), tuple(path)))

    ball.coset_labels = [backend.coset_label(w) for w in vertices]
    return ball


def cell_boundary(ball: CayleyBall, cell: int) -> OneCycle:
    return OneCycle(list(ball.cells[cell].boundary))


def boundary_2(ball: CayleyBall, chain: TwoChain) -> OneCycle:
    acc: dict[int, int] = {}
    for cell, coeff in chain.coeffs.items():
        for edge, sign in ball.cells[cell].boundary:
            acc[edge] = acc.get(edge, 0) + coeff * sign
    return OneCycle(acc)


def vertex_incidence(ball: CayleyBall, cycle: OneCycle) -> dict[int, int]:
    acc: dict[int, int] = {}
    for edge, coeff in cycle.coeffs.items():
        source, _, target = ball.edges[edge]
        acc[target] = acc.get(target, 0) + coeff
        acc[source] = acc.get(source, 0) - coeff
    return {v: c for v, c in acc.items() if c}


def is_cycle(ball: CayleyBall, cycle: OneCycle) -> bool:
    return not vertex_incidence(ball, cycle)


def cycle_length(cycle: OneCycle) -> int:
    return cycle.length()


def trace_word(ball: CayleyBall, start: int, w: Word) -> tuple[list[tuple[int, int]], int]:
    """Trace ``w`` edge by edge from a vertex; error names the failing prefix."""
    steps = []
    v = start
    for pos, letter in enumerate(w):
        try:
            edge, sign, v = ball.step(v, letter)
        except DomainError as exc:
            prefix = format_word(w[: pos + 1], ball.generators)
            raise DomainError(f"path exits ball after prefix '{prefix}': {exc}") from exc
        steps.append((edge, sign))
    return steps, v


def loop_to_cycle(ball: CayleyBall, base: int, w: Word) -> OneCycle:
    steps, end = trace_word(ball, base, w)
    if end != base:
        raise DomainError(
            f"word '{format_word(w, ball.generators)}' does not close at its base vertex"
        )
    return OneCycle(steps)


def translate_vertex(ball: CayleyBall, g: Word, vertex: int) -> int:
    """Image of a vertex under left multiplication by ``g`` (must stay in ball)."""
    return ball.vertex_of(tuple(g) + ball.vertices[vertex])


def translate_chain(ball: CayleyBall, g: Word, chain: TwoChain) -> TwoChain:
    """Left-translate a 2-chain; the H-action sends the cell based at x with
    relator r to the cell based at g*x with the same relator."""
    out: dict[int, int] = {}
    for cell, coeff in chain.coeffs.items():
        c = ball.cells[cell]
        new_base = translate_vertex(ball, g, c.base)
        key = (new_base, c.relator)
        if key not in ball.cell_index:
            raise DomainError("translated cell leaves the ball")
        out[ball.cell_index[key]] = out.get(ball.cell_index[key], 0) + coeff
    return TwoChain(out)


def translate_cycle(ball: CayleyBall, g: Word, cycle: OneCycle) -> OneCycle:
    out: dict[int, int] = {}
    for edge, coeff in cycle.coeffs.items():
        source, label, _ = ball.edges[edge]
        new_source = translate_vertex(ball, g, source)
        key = (new_source, label)
        if key not in ball.edge_index:
            raise DomainError("translated edge leaves the ball")
        e = ball.edge_index[key]
        out[e] = out.get(e, 0) + coeff
    return OneCycle(out)


def ball_to_json(ball: CayleyBall) -> dict:
    names = ball.generators
    return {
        "radius": ball.radius,
        "generators": list(names),
        "vertices": [format_word(w, names) or "e" for w in ball.vertices],
        "edges": [[s, names[g - 1], t] for s, g, t in ball.edges],
        "cells": [
            [c.base, c.relator, [[e, sign] for e, sign in c.boundary]] for c in ball.cells
        ],
    }


def dump_ball(ball: CayleyBall) -> str:
    return json.dumps(ball_to_json(ball), sort_keys=True, indent=2)
