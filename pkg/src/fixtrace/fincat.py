"""Finite categories given by explicit composition tables."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct
from typing import Iterator, Mapping, Sequence

from .groupring import FiniteGroup


class CategoryError(ValueError):
    pass


class FinCategory:
    """Objects ``0..n-1`` and morphisms ``0..m-1`` with a partial composition.

    ``compose(g, f)`` is ``g o f`` and is defined when ``tgt(f) == src(g)``.
    """

    def __init__(self, objects: Sequence[str], morphisms: Sequence[tuple[str, int, int]],
                 composition: Mapping[tuple[int, int], int], identities: Sequence[int], check: bool = True):
        self.objects = tuple(objects)
        self.names = tuple(m[0] for m in morphisms)
        self.src = tuple(int(m[1]) for m in morphisms)
        self.tgt = tuple(int(m[2]) for m in morphisms)
        self.identities = tuple(int(i) for i in identities)
        self._comp = {(int(g), int(f)): int(h) for (g, f), h in composition.items()}
        self._hom: dict[tuple[int, int], tuple[int, ...]] = {}
        for m in range(len(self.names)):
            self._hom.setdefault((self.src[m], self.tgt[m]), ())
            self._hom[(self.src[m], self.tgt[m])] += (m,)
        self._strings: dict[int, list[tuple[int, ...]]] = {}
        if check:
            self._check()

    def _check(self) -> None:
        n, m = len(self.objects), len(self.names)
        if len(self.identities) != n:
            raise CategoryError("one identity per object required")
        for a, i in enumerate(self.identities):
            if not 0 <= i < m or self.src[i] != a or self.tgt[i] != a:
                raise CategoryError(f"identity of object {self.objects[a]} is not an endomorphism of it")
        for f in range(m):
            if not (0 <= self.src[f] < n and 0 <= self.tgt[f] < n):
                raise CategoryError(f"morphism {self.names[f]} has an out-of-range endpoint")
        for g in range(m):
            for f in range(m):
                if self.tgt[f] != self.src[g]:
                    if (g, f) in self._comp:
                        raise CategoryError(f"composite of non-composable {self.names[g]}, {self.names[f]}")
                    continue
                h = self._comp.get((g, f))
                if h is None:
                    raise CategoryError(f"composite {self.names[g]} o {self.names[f]} missing")
                if self.src[h] != self.src[f] or self.tgt[h] != self.tgt[g]:
                    raise CategoryError(f"composite {self.names[g]} o {self.names[f]} has wrong endpoints")
        for f in range(m):
            if self.compose(self.identities[self.tgt[f]], f) != f or self.compose(f, self.identities[self.src[f]]) != f:
                raise CategoryError(f"unit law fails at {self.names[f]}")
        for h in range(m):
            for g in range(m):
                if self.tgt[g] != self.src[h]:
                    continue
                for f in range(m):
                    if self.tgt[f] == self.src[g] and \
                            self.compose(self.compose(h, g), f) != self.compose(h, self.compose(g, f)):
                        raise CategoryError("composition is not associative")

    # access --------------------------------------------------------------
    @property
    def num_objects(self) -> int:
        return len(self.objects)

    @property
    def num_morphisms(self) -> int:
        return len(self.names)

    def compose(self, g: int, f: int) -> int:
        try:
            return self._comp[(g, f)]
        except KeyError:
            raise CategoryError(f"{self.names[g]} o {self.names[f]} is not defined") from None

    def hom(self, a: int, b: int) -> tuple[int, ...]:
        """Morphisms ``a -> b`` in index order."""
        return self._hom.get((a, b), ())

    def identity(self, a: int) -> int:
        return self.identities[a]

    def is_identity(self, f: int) -> bool:
        return self.identities[self.src[f]] == f

    def object_index(self, name: str) -> int:
        return self.objects.index(name)

    def morphism_index(self, name: str) -> int:
        return self.names.index(name)

    def endomorphisms(self) -> list[int]:
        return [f for f in range(self.num_morphisms) if self.src[f] == self.tgt[f]]

    def composition_table(self) -> dict[tuple[int, int], int]:
        return dict(self._comp)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FinCategory):
            return NotImplemented
        return (self.objects == other.objects and self.names == other.names and self.src == other.src
                and self.tgt == other.tgt and self.identities == other.identities and self._comp == other._comp)

    def __hash__(self) -> int:
        return hash((self.objects, self.names, self.src, self.tgt))

    def __repr__(self) -> str:
        return f"FinCategory(objects={list(self.objects)}, morphisms={self.num_morphisms})"

    # constructions -------------------------------------------------------
    @classmethod
    def discrete(cls, names: Sequence[str]) -> "FinCategory":
        names = list(names)
        return cls(names, [(f"id_{a}", i, i) for i, a in enumerate(names)],
                   {(i, i): i for i in range(len(names))}, range(len(names)))

    @classmethod
    def empty(cls) -> "FinCategory":
        return cls.discrete([])

    @classmethod
    def terminal(cls, name: str = "*") -> "FinCategory":
        return cls.discrete([name])

    @classmethod
    def arrow(cls, a: str = "a", b: str = "b", name: str = "alpha") -> "FinCategory":
        return cls.poset([a, b], [(0, 1)], {(0, 1): name})

    @classmethod
    def poset(cls, names: Sequence[str], relations: Sequence[tuple[int, int]],
              labels: Mapping[tuple[int, int], str] | None = None) -> "FinCategory":
        """Category of the preorder generated by ``relations`` (at most one morphism per pair)."""
        n = len(names)
        le = [[i == j for j in range(n)] for i in range(n)]
        for i, j in relations:
            le[i][j] = True
        for k in range(n):
            for i in range(n):
                if le[i][k]:
                    for j in range(n):
                        if le[k][j]:
                            le[i][j] = True
        labels = dict(labels or {})
        morphisms, index = [], {}
        for i in range(n):
            index[(i, i)] = len(morphisms)
            morphisms.append((f"id_{names[i]}", i, i))
        for i in range(n):
            for j in range(n):
                if i != j and le[i][j]:
                    index[(i, j)] = len(morphisms)
                    morphisms.append((labels.get((i, j), f"{names[i]}->{names[j]}"), i, j))
        comp = {}
        for (i, j), f in index.items():
            for (j2, k), g in index.items():
                if j2 == j:
                    comp[(g, f)] = index[(i, k)]
        return cls(names, morphisms, comp, [index[(i, i)] for i in range(n)])

    @classmethod
    def from_group(cls, g: FiniteGroup, obj: str = "*") -> "FinCategory":
        """One-object category whose morphisms are the group elements."""
        elems = list(g.elements())
        comp = {(x, y): g.mul(x, y) for x in elems for y in elems}
        return cls([obj], [(g.name(x), 0, 0) for x in elems], comp, [elems.index(g.identity)])

    def op(self) -> "FinCategory":
        comp = {(f, g): h for (g, f), h in self._comp.items()}
        return FinCategory(self.objects, [(self.names[f], self.tgt[f], self.src[f]) for f in range(self.num_morphisms)],
                           comp, self.identities, check=False)

    def product(self, other: "FinCategory") -> "FinCategory":
        """Objects and morphisms are pairs, flattened as ``i * len(other) + j``."""
        n2, m2 = other.num_objects, other.num_morphisms
        objects = [f"({a},{b})" for a in self.objects for b in other.objects]
        morphisms = [(f"({self.names[f]},{other.names[g]})", self.src[f] * n2 + other.src[g],
                      self.tgt[f] * n2 + other.tgt[g]) for f in range(self.num_morphisms) for g in range(m2)]
        comp = {}
        for (f2, f1), f in self._comp.items():
            for (g2, g1), g in other._comp.items():
                comp[(f2 * m2 + g2, f1 * m2 + g1)] = f * m2 + g
        ids = [self.identities[a] * m2 + other.identities[b] for a in range(self.num_objects) for b in range(n2)]
        return FinCategory(objects, morphisms, comp, ids, check=False)

    # structure -----------------------------------------------------------
    def is_loop_free(self) -> bool:
        """No directed cycle of non-identity morphisms (in particular no non-identity endomorphisms)."""
        succ: dict[int, set[int]] = {a: set() for a in range(self.num_objects)}
        for f in range(self.num_morphisms):
            if not self.is_identity(f):
                if self.src[f] == self.tgt[f]:
                    return False
                succ[self.src[f]].add(self.tgt[f])
        state = [0] * self.num_objects
        for start in range(self.num_objects):
            if state[start]:
                continue
            stack = [(start, iter(sorted(succ[start])))]
            state[start] = 1
            while stack:
                v, it = stack[-1]
                for w in it:
                    if state[w] == 1:
                        return False
                    if state[w] == 0:
                        state[w] = 1
                        stack.append((w, iter(sorted(succ[w]))))
                        break
                else:
                    state[v] = 2
                    stack.pop()
        return True

    def strings(self, k: int) -> list[tuple[int, ...]]:
        """Composable strings ``(b_1, ..., b_k)`` of non-identity morphisms, ``b_i o b_{i+1}`` defined.

        Read as ``d_0 <- d_1 <- ... <- d_k`` with ``d_0 = tgt(b_1)`` and
        ``d_k = src(b_k)``.  For ``k == 0`` the strings are the one-tuples of
        objects; use :meth:`string_ends` to read endpoints uniformly.
        """
        if k in self._strings:
            return self._strings[k]
        if k == 0:
            out = [(a,) for a in range(self.num_objects)]
        elif k == 1:
            out = [(f,) for f in range(self.num_morphisms) if not self.is_identity(f)]
        else:
            out = [s + (f,) for s in self.strings(k - 1) for f in range(self.num_morphisms)
                   if not self.is_identity(f) and self.tgt[f] == self.src[s[-1]]]
        self._strings[k] = out
        return out

    def all_strings(self) -> Iterator[tuple[int, tuple[int, ...]]]:
        if not self.is_loop_free():
            raise CategoryError("category is not loop-free; the normalized bar complex would be infinite")
        k = 0
        while True:
            level = self.strings(k)
            if not level:
                return
            for s in level:
                yield k, s
            k += 1

    def string_ends(self, k: int, s: tuple[int, ...]) -> tuple[int, int]:
        if k == 0:
            return s[0], s[0]
        return self.tgt[s[0]], self.src[s[-1]]


@dataclass(frozen=True)
class ConjClassSet:
    """Endomorphisms modulo ``ab ~ ba``; classes are listed by least member."""

    category: FinCategory
    classes: tuple[tuple[int, ...], ...]
    class_of: Mapping[int, int]

    @property
    def count(self) -> int:
        return len(self.classes)

    def label(self, k: int) -> str:
        return f"[{self.category.names[self.classes[k][0]]}]"

    def labels(self) -> list[str]:
        return [self.label(k) for k in range(self.count)]

    def representative(self, k: int) -> int:
        return self.classes[k][0]


def conjugacy_classes(c: FinCategory) -> ConjClassSet:
    endos = c.endomorphisms()
    parent = {f: f for f in endos}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in iproduct(range(c.num_objects), repeat=2):
        for f in c.hom(a, b):
            for g in c.hom(b, a):
                x, y = find(c.compose(f, g)), find(c.compose(g, f))
                if x != y:
                    parent[max(x, y)] = min(x, y)
    groups: dict[int, list[int]] = {}
    for f in endos:
        groups.setdefault(find(f), []).append(f)
    classes = tuple(sorted(tuple(sorted(v)) for v in groups.values()))
    class_of = {f: k for k, cls in enumerate(classes) for f in cls}
    return ConjClassSet(c, classes, class_of)


def is_loop_free(c: FinCategory) -> bool:
    return c.is_loop_free()
