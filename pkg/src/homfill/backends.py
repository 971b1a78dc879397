"""Normal-form oracles: each supported group kind gets a canonical word per
element, which is what makes exact finite Cayley balls possible.

Kinds: free groups (optionally with redundant generators mapping to words),
free abelian groups (optionally with redundant generators mapping to integer
vectors), small finite groups given by a multiplication table, and split
extensions of a kernel group by a free group acting through word lifts.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .errors import DomainError, ResourceError
from .presentation import AutLift, apply_lift
from .words import Word, check_letters, free_reduce, inverse_word

DEFAULT_VERTEX_BUDGET = 200_000


def vertex_budget_default() -> int:
    env = os.environ.get("HOMFILL_BUDGET_VERTICES")
    return int(env) if env else DEFAULT_VERTEX_BUDGET


class GroupBackend:
    """Base interface: idempotent normal forms compatible with concatenation."""

    kind = "abstract"
    rank = 0

    def normal_form(self, w) -> Word:
        raise NotImplementedError

    def coset_label(self, w) -> Word:
        """Reduced stable-letter word of the element's kernel coset (extensions
        only; every other backend lives in the trivial coset)."""
        return ()

    def is_identity(self, w) -> bool:
        return self.normal_form(w) == ()


class FreeBackend(GroupBackend):
    """Free group of rank ``base_rank``; extra generators carry fixed words."""

    kind = "free"

    def __init__(self, rank: int, gen_words: dict[int, Word] | None = None, base_rank: int | None = None):
        self.rank = rank
        self.base_rank = base_rank if base_rank is not None else rank
        if self.base_rank > rank:
            raise DomainError("base_rank exceeds rank")
        self._images: list[Word] = [(j + 1,) for j in range(rank)]
        for j, w in (gen_words or {}).items():
            if j < self.base_rank:
                raise DomainError("cannot override a base generator image")
            check_letters(w, self.base_rank)
            self._images[j] = free_reduce(w)
        for j in range(self.base_rank, rank):
            check_letters(self._images[j], self.base_rank)

    def normal_form(self, w) -> Word:
        check_letters(tuple(w), self.rank)
        out: list[int] = []
        for x in w:
            img = self._images[abs(x) - 1]
            for y in img if x > 0 else inverse_word(img):
                if out and out[-1] == -y:
                    out.pop()
                else:
                    out.append(y)
        return tuple(out)


class FreeAbelianBackend(GroupBackend):
    """Free abelian group of dimension ``dim``; generator i maps to an integer
    vector, the first ``dim`` generators must map to the standard basis so a
    canonical word can be read back off the exponent vector."""

    kind = "free_abelian"

    def __init__(self, dim: int, vectors: list[tuple[int, ...]] | None = None):
        self.dim = dim
        if vectors is None:
            vectors = [tuple(1 if k == i else 0 for k in range(dim)) for i in range(dim)]
        self.vectors = [tuple(v) for v in vectors]
        self.rank = len(self.vectors)
        if self.rank < dim:
            raise DomainError("need at least dim generators")
        for i in range(dim):
            expected = tuple(1 if k == i else 0 for k in range(dim))
            if self.vectors[i] != expected:
                raise DomainError("first dim generators must be the standard basis")
        for v in self.vectors:
            if len(v) != dim:
                raise DomainError("generator vector has wrong dimension")

    def vector_of(self, w) -> tuple[int, ...]:
        acc = [0] * self.dim
        for x in w:
            v = self.vectors[abs(x) - 1]
            s = 1 if x > 0 else -1
            for k in range(self.dim):
                acc[k] += s * v[k]
        return tuple(acc)

    def normal_form(self, w) -> Word:
        check_letters(tuple(w), self.rank)
        vec = self.vector_of(w)
        out: list[int] = []
        for k, e in enumerate(vec):
            letter = k + 1 if e > 0 else -(k + 1)
            out.extend([letter] * abs(e))
        return tuple(out)


class TableBackend(GroupBackend):
    """Finite group via a multiplication-by-generator table.

    ``table[j][x]`` is x * generator_{j+1}; element 0 is the identity.
    Canonical words are the BFS-first words in generator order."""

    kind = "direct_table"

    def __init__(self, table: list[list[int]]):
        self.rank = len(table)
        if self.rank == 0:
            raise DomainError("table backend needs at least one generator")
        self.size = len(table[0])
        self.table = [list(row) for row in table]
        for row in self.table:
            if sorted(row) != list(range(self.size)):
                raise DomainError("each generator must act by a permutation")
        self._inverse = [[0] * self.size for _ in range(self.rank)]
        for j, row in enumerate(self.table):
            for x, y in enumerate(row):
                self._inverse[j][y] = x
        self._canonical: list[Word | None] = [None] * self.size
        self._canonical[0] = ()
        frontier = [0]
        while frontier:
            new = []
            for x in frontier:
                for letter in self._letter_order():
                    y = self._step(x, letter)
                    if self._canonical[y] is None:
                        self._canonical[y] = self._canonical[x] + (letter,)
                        new.append(y)
            frontier = new
        if any(w is None for w in self._canonical):
            raise DomainError("table generators do not generate the whole table")

    def _letter_order(self):
        for j in range(self.rank):
            yield j + 1
            yield -(j + 1)

    def _step(self, x: int, letter: int) -> int:
        j = abs(letter) - 1
        return self.table[j][x] if letter > 0 else self._inverse[j][x]

    def element_of(self, w) -> int:
        x = 0
        for letter in w:
            x = self._step(x, letter)
        return x

    def normal_form(self, w) -> Word:
        check_letters(tuple(w), self.rank)
        return self._canonical[self.element_of(w)]  # type: ignore[return-value]


@dataclass(frozen=True)
class ExtensionNormalForm:
    """Split-extension pair: kernel part in K-normal form, reduced t-word."""

    k_part: Word
    t_part: Word


class ExtensionBackend(GroupBackend):
    """Split extension of a kernel backend by a free group.

    Elements are written k * w with w a reduced word in the stable letters;
    stable letters are pushed rightward with the rewriting
    t^-1 a t -> forward image, t a t^-1 -> backward image."""

    kind = "extension"

    def __init__(self, k_backend: GroupBackend, lifts: tuple[AutLift, ...] | list[AutLift]):
        self.k_backend = k_backend
        self.lifts = tuple(lifts)
        self.k_rank = k_backend.rank
        self.n_stable = len(self.lifts)
        self.rank = self.k_rank + self.n_stable
        for lift in self.lifts:
            if lift.rank != self.k_rank:
                raise DomainError("lift rank does not match kernel backend")

    def _conjugate_through(self, k_word: Word, t_letter: int) -> Word:
        """Image of the kernel word under conjugation w -> t^-1 w t for the
        signed stable letter ``t_letter`` (t-part letter being crossed)."""
        i = abs(t_letter) - self.k_rank - 1
        direction = "forward" if t_letter > 0 else "backward"
        return apply_lift(self.lifts[i], direction, k_word)

    def split(self, w) -> ExtensionNormalForm:
        check_letters(tuple(w), self.rank)
        k_word: Word = ()
        t_word: list[int] = []
        for x in w:
            if abs(x) <= self.k_rank:
                pushed = (x,)
                for t_letter in reversed(t_word):
                    pushed = self._conjugate_through(pushed, -t_letter)
                k_word = self.k_backend.normal_form(k_word + pushed)
            else:
                if t_word and t_word[-1] == -x:
                    t_word.pop()
                else:
                    t_word.append(x)
        return ExtensionNormalForm(self.k_backend.normal_form(k_word), tuple(t_word))

    def normal_form(self, w) -> Word:
        nf = self.split(w)
        return nf.k_part + nf.t_part

    def coset_label(self, w) -> Word:
        return self.split(w).t_part


def equal_in_group(backend: GroupBackend, u, v) -> bool:
    return backend.normal_form(u) == backend.normal_form(v)


def letter_order(rank: int):
    """Deterministic successor order used by every breadth-first generation."""
    for j in range(rank):
        yield j + 1
        yield -(j + 1)


def enumerate_ball_vertices(
    backend: GroupBackend,
    radius: int,
    vertex_budget: int | None = None,
) -> list[Word]:
    """Normal forms of all elements at word-metric distance <= radius, in
    BFS-lexicographic discovery order (frontiers sorted, generators in
    letter_order)."""
    if radius < 0:
        raise DomainError("radius must be non-negative")
    budget = vertex_budget if vertex_budget is not None else vertex_budget_default()
    identity = backend.normal_form(())
    seen = {identity}
    order = [identity]
    frontier = [identity]
    for _ in range(radius):
        new = []
        for v in sorted(frontier):
            for letter in letter_order(backend.rank):
                u = backend.normal_form(v + (letter,))
                if u not in seen:
                    seen.add(u)
                    order.append(u)
                    new.append(u)
                    if len(seen) > budget:
                        raise ResourceError(
                            f"ball exceeds vertex budget {budget}"
                            " (HOMFILL_BUDGET_VERTICES or --budget-vertices raises it)"
                        )
        frontier = new
    return order
