"""Lattice families: vertex encodings, cover generation and boxes.

Every family exposes ``root``, ``up(v)`` and ``down(v)`` (lists of
``(neighbour, box)``), ``level(v)``, ``boxes(v)``, ``code(v)``/``parse(s)``
and ``sort_key(v)``. Vertices are hashable tuples (strings for trees).
"""

from __future__ import annotations

from collections import Counter


class Family:
    name = "abstract"
    ideal = True
    depth_cap: int | None = None

    def __init__(self, **params):
        self.params = params

    def root(self):
        raise NotImplementedError

    def up(self, v):
        raise NotImplementedError

    def down(self, v):
        raise NotImplementedError

    def level(self, v) -> int:
        raise NotImplementedError

    def boxes(self, v) -> frozenset:
        raise NotImplementedError

    def code(self, v) -> str:
        return ",".join(map(str, v))

    def parse(self, s: str):
        s = s.strip()
        return tuple(int(x) for x in s.split(",")) if s else ()

    def sort_key(self, v):
        return v

    def max_level(self) -> int | None:
        return None


# --- partitions ---------------------------------------------------------------

def conjugate(lam: tuple) -> tuple:
    if not lam:
        return ()
    return tuple(sum(1 for p in lam if p > j) for j in range(lam[0]))


def partition_up(lam: tuple):
    out = []
    for i in range(len(lam) + 1):
        cur = lam[i] if i < len(lam) else 0
        if i == 0 or lam[i - 1] > cur:
            new = list(lam)
            if i < len(lam):
                new[i] += 1
            else:
                new.append(1)
            out.append((tuple(new), (i + 1, cur + 1)))
    return out


def partition_down(lam: tuple):
    out = []
    for i, p in enumerate(lam):
        nxt = lam[i + 1] if i + 1 < len(lam) else 0
        if p > nxt:
            new = list(lam)
            new[i] -= 1
            if new[i] == 0:
                new.pop()
            out.append((tuple(new), (i + 1, p)))
    return out


def partition_boxes(lam: tuple) -> frozenset:
    return frozenset((i + 1, j + 1) for i, p in enumerate(lam) for j in range(p))


def partitions_of(n: int, max_part: int | None = None):
    """Partitions of n in decreasing lexicographic order (independent of the graph code)."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    for k in range(min(n, max_part), 0, -1):
        for rest in partitions_of(n - k, k):
            yield (k,) + rest


class YoungFamily(Family):
    name = "young"

    def root(self):
        return ()

    def up(self, v):
        return partition_up(v)

    def down(self, v):
        return partition_down(v)

    def level(self, v):
        return sum(v)

    def boxes(self, v):
        return partition_boxes(v)


class KingmanFamily(YoungFamily):
    name = "kingman"


class SchurFamily(Family):
    """Strict partitions; box (i, j) with j >= i in the shifted diagram."""

    name = "schur"

    def root(self):
        return ()

    def up(self, v):
        out = []
        for i in range(len(v) + 1):
            cur = v[i] if i < len(v) else 0
            if i == 0 or v[i - 1] > cur + 1:
                new = list(v)
                if i < len(v):
                    new[i] += 1
                else:
                    new.append(1)
                out.append((tuple(new), (i + 1, i + 1 + cur)))
        return out

    def down(self, v):
        out = []
        for i, p in enumerate(v):
            nxt = v[i + 1] if i + 1 < len(v) else 0
            if p - 1 > nxt or (p == 1 and nxt == 0):
                new = list(v)
                new[i] -= 1
                if new[i] == 0:
                    new.pop()
                out.append((tuple(new), (i + 1, i + p)))
        return out

    def level(self, v):
        return sum(v)

    def boxes(self, v):
        return frozenset((i + 1, i + 1 + j) for i, p in enumerate(v) for j in range(p))


# --- chains and Pascal --------------------------------------------------------

class PascalFamily(Family):
    """Disjoint union of d chains; box (component, position)."""

    name = "pascal_d"

    def __init__(self, d: int = 2, size: int | None = None, **params):
        if d < 1:
            raise ValueError("pascal_d needs d >= 1")
        super().__init__(d=d, **params)
        self.d = d
        self.size = size  # finite chain length when d == 1

    def root(self):
        return (0,) * self.d

    def up(self, v):
        out = []
        for c in range(self.d):
            if self.size is not None and v[c] >= self.size:
                continue
            new = list(v)
            new[c] += 1
            out.append((tuple(new), (c + 1, v[c] + 1)))
        return out

    def down(self, v):
        out = []
        for c in range(self.d):
            if v[c] > 0:
                new = list(v)
                new[c] -= 1
                out.append((tuple(new), (c + 1, v[c])))
        return out

    def level(self, v):
        return sum(v)

    def boxes(self, v):
        return frozenset((c + 1, n + 1) for c in range(self.d) for n in range(v[c]))

    def max_level(self):
        return self.size


class ChainFamily(PascalFamily):
    name = "chain"

    def __init__(self, size: int | None = None, **params):
        super().__init__(d=1, size=size, **params)
        if size is not None:
            self.name = "finite_chain"


# --- rim-hook lattice as a product of Young graphs -----------------------------

class RimHookFamily(Family):
    """r-tuples of partitions; box (component, (row, col))."""

    name = "rimhook_r"

    def __init__(self, r: int = 2, **params):
        if r < 1:
            raise ValueError("rimhook_r needs r >= 1")
        super().__init__(r=r, **params)
        self.r = r

    def root(self):
        return ((),) * self.r

    def up(self, v):
        out = []
        for c in range(self.r):
            for lam, box in partition_up(v[c]):
                out.append((v[:c] + (lam,) + v[c + 1:], (c + 1, box)))
        return out

    def down(self, v):
        out = []
        for c in range(self.r):
            for lam, box in partition_down(v[c]):
                out.append((v[:c] + (lam,) + v[c + 1:], (c + 1, box)))
        return out

    def level(self, v):
        return sum(sum(p) for p in v)

    def boxes(self, v):
        return frozenset((c + 1, b) for c in range(self.r) for b in partition_boxes(v[c]))

    def code(self, v):
        return "|".join(",".join(map(str, p)) for p in v)

    def parse(self, s):
        parts = s.split("|")
        return tuple(tuple(int(x) for x in p.split(",")) if p else () for p in parts)


def r_quotient(lam: tuple, r: int) -> tuple[tuple, tuple]:
    """(r-core, r-quotient) via beta-numbers; quotient component i sits on runner r - i."""
    k = r * (len(lam) // r + 1)
    beta = [(lam[i] if i < len(lam) else 0) + k - 1 - i for i in range(k)]
    runners = [sorted((b // r for b in beta if b % r == s), reverse=True) for s in range(r)]
    quotient = []
    for s in range(r):
        row = [b - (len(runners[s]) - 1 - j) for j, b in enumerate(runners[s])]
        quotient.append(tuple(x for x in row if x > 0))
    # core: push all beads down on each runner
    core_beta = sorted((s + r * j for s in range(r) for j in range(len(runners[s]))), reverse=True)
    core = tuple(x for x in (b - (k - 1 - i) for i, b in enumerate(core_beta)) if x > 0)
    return core, tuple(quotient[r - 1 - i] for i in range(r))


def from_r_quotient(quot: tuple, r: int) -> tuple:
    """Inverse of r_quotient for an empty r-core."""
    length = max([len(p) for p in quot] + [0]) + 1
    beta = []
    for i, p in enumerate(quot):
        s = r - 1 - i
        for j in range(length):
            part = p[j] if j < len(p) else 0
            beta.append(r * (part + length - 1 - j) + s)
    beta.sort(reverse=True)
    k = len(beta)
    lam = [b - (k - 1 - i) for i, b in enumerate(beta)]
    return tuple(x for x in lam if x > 0)


def rim_hook_up(lam: tuple, r: int):
    """All ways to add an r-rim-hook (connected border strip of size r) to lam."""
    out = []
    k = len(lam) + r
    beta = [(lam[i] if i < len(lam) else 0) + k - 1 - i for i in range(k)]
    bset = set(beta)
    for b in beta:
        if b + r not in bset:
            nb = sorted((b + r if x == b else x for x in beta), reverse=True)
            new = tuple(x for x in (nb[i] - (k - 1 - i) for i in range(k)) if x > 0)
            out.append(new)
    return out


def skew_boxes(big: tuple, small: tuple) -> list:
    return sorted(partition_boxes(big) - partition_boxes(small))


# --- rooted trees ---------------------------------------------------------------

def tree_code(t: tuple) -> str:
    return "(" + "".join(tree_code(c) for c in t) + ")"


def tree_parse(s: str) -> tuple:
    stack: list[list] = [[]]
    for ch in s:
        if ch == "(":
            stack.append([])
        elif ch == ")":
            node = tuple(sorted(stack.pop(), key=tree_code))
            stack[-1].append(node)
    (root,) = stack[0]
    return root


def canon(children) -> tuple:
    return tuple(sorted(children, key=tree_code))


def tree_attach(t: tuple) -> list:
    """Trees obtained by attaching a leaf at each vertex (one entry per vertex)."""
    out = [canon(t + ((),))]
    for i, c in enumerate(t):
        for c2 in tree_attach(c):
            out.append(canon(t[:i] + (c2,) + t[i + 1:]))
    return out


def tree_remove(t: tuple) -> list:
    """Trees obtained by deleting each leaf edge (one entry per leaf)."""
    out = []
    for i, c in enumerate(t):
        if c == ():
            out.append(canon(t[:i] + t[i + 1:]))
        else:
            for c2 in tree_remove(c):
                out.append(canon(t[:i] + (c2,) + t[i + 1:]))
    return out


def tree_edges(t: tuple) -> int:
    return sum(1 + tree_edges(c) for c in t)


class TreeFamily(Family):
    """Unlabeled rooted trees; level = number of edges; box slot is a (n, m) count pair."""

    name = "trees"
    ideal = False

    def root(self):
        return ()

    def up(self, v):
        counts = Counter(tree_attach(v))
        out = []
        for w in sorted(counts, key=tree_code):
            m = Counter(tree_remove(w))[v]
            out.append((w, (counts[w], m)))
        return out

    def down(self, v):
        counts = Counter(tree_remove(v))
        out = []
        for u in sorted(counts, key=tree_code):
            n = Counter(tree_attach(u))[v]
            out.append((u, (n, counts[u])))
        return out

    def level(self, v):
        return tree_edges(v)

    def boxes(self, v):
        return frozenset()

    def code(self, v):
        return tree_code(v)

    def parse(self, s):
        return tree_parse(s)

    def sort_key(self, v):
        return tree_code(v)


# --- plane partitions -------------------------------------------------------------

class PlanePartitionFamily(Family):
    """Finite ideals of Z_{>0}^3 stored as rows of a plane partition."""

    name = "plane_partitions"

    def root(self):
        return ()

    @staticmethod
    def _get(v, i, j):
        return v[i][j] if i < len(v) and j < len(v[i]) else 0

    @staticmethod
    def _norm(rows):
        rows = [tuple(x for x in r if x > 0) for r in rows]
        while rows and not rows[-1]:
            rows.pop()
        return tuple(rows)

    def up(self, v):
        out = []
        for i in range(len(v) + 1):
            width = len(v[i]) if i < len(v) else 0
            for j in range(width + 1):
                h = self._get(v, i, j)
                if (i == 0 or self._get(v, i - 1, j) > h) and (j == 0 or self._get(v, i, j - 1) > h):
                    rows = [list(r) for r in v] + [[]]
                    if j < len(rows[i]):
                        rows[i][j] += 1
                    else:
                        rows[i].append(1)
                    out.append((self._norm(rows), (i + 1, j + 1, h + 1)))
        return out

    def down(self, v):
        out = []
        for i in range(len(v)):
            for j in range(len(v[i])):
                h = v[i][j]
                if self._get(v, i + 1, j) < h and self._get(v, i, j + 1) < h:
                    rows = [list(r) for r in v]
                    rows[i][j] -= 1
                    out.append((self._norm(rows), (i + 1, j + 1, h)))
        return out

    def level(self, v):
        return sum(sum(r) for r in v)

    def boxes(self, v):
        return frozenset((i + 1, j + 1, k + 1) for i, r in enumerate(v) for j, h in enumerate(r) for k in range(h))

    def code(self, v):
        return "/".join(",".join(map(str, r)) for r in v)

    def parse(self, s):
        return tuple(tuple(int(x) for x in r.split(",")) for r in s.split("/")) if s else ()

    depth_cap = 6


def make_family(name: str, **params) -> Family:
    if name == "young":
        return YoungFamily()
    if name == "kingman":
        return KingmanFamily()
    if name == "schur":
        return SchurFamily()
    if name == "chain":
        return ChainFamily()
    if name == "finite_chain":
        return ChainFamily(size=int(params["size"]))
    if name in ("pascal", "pascal_d"):
        return PascalFamily(d=int(params.get("d", 2)))
    if name in ("rimhook", "rimhook_r"):
        return RimHookFamily(r=int(params.get("r", 2)))
    if name == "trees":
        return TreeFamily()
    if name == "plane_partitions":
        return PlanePartitionFamily()
    raise ValueError(f"unknown family {name!r}")
