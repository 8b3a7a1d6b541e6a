"""Finite pre-independence spaces (pi-spaces).

A pi-space is a ground set together with a family of "independent"
subsets that is downward closed (I1) and satisfies the finite exchange
property (I2).  Instances here are finite: a tuple of distinct string
labels with canonical indices 0..n-1 plus a pure independence oracle
over bitmask-encoded subsets.  Instances are immutable after
construction; oracle answers are memoised, so repeated queries are cheap
and deterministic.

Construction goes through :func:`build_family` (or the typed builders
``uniform``, ``boolean``, ``graphic``, ``linear_gfp``, ``explicit``),
which validate their parameters.  Direct ``PiSpace(...)`` construction
performs no axiom validation; :func:`check_axioms` does that explicitly
and reports witnesses for violations.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Sequence

from . import bitsets
from .gfp import columns_independent, is_prime

DEFAULT_MAX_GROUND = 20


class PiSpaceError(Exception):
    """Base class for errors raised by this package."""


class InvalidSpec(PiSpaceError):
    pass


class NotDownwardClosed(PiSpaceError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class OutOfRange(PiSpaceError):
    pass


class CapExceeded(PiSpaceError):
    pass


class EmptyRestriction(PiSpaceError):
    pass


class DependentSeed(PiSpaceError):
    pass


def _check_cap(size: int, cap: int, what: str = "ground") -> None:
    if size > cap:
        raise CapExceeded(f"{what} size {size} exceeds enumeration cap {cap}")


class PiSpace:
    """A finite pi-space: labelled ground set plus an independence oracle.

    The oracle is a pure predicate on bitmasks over canonical indices.
    The rank (size of a largest independent set) is computed once at
    build time by greedy extension in ascending index order, which is
    valid whenever the exchange property holds; builders for explicit
    families override it with the exact maximum of the family.
    """

    __slots__ = ("ground", "provenance", "_oracle", "_cache", "_rank",
                 "_label_index", "_circuits")

    def __init__(self, ground: Sequence[str], oracle: Callable[[int], bool],
                 provenance: str = "adhoc", rank: int | None = None):
        ground = tuple(str(g) for g in ground)
        if len(set(ground)) != len(ground):
            raise InvalidSpec("ground labels must be distinct")
        self.ground = ground
        self.provenance = provenance
        self._oracle = oracle
        self._cache: dict[int, bool] = {}
        self._label_index = {lab: i for i, lab in enumerate(ground)}
        self._circuits: list[int] | None = None
        if not self.independent_mask(0):
            raise InvalidSpec("the empty set must be independent")
        self._rank = rank if rank is not None else self._greedy_rank()

    # -- basic accessors -------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.ground)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.ground)) - 1

    @property
    def rank(self) -> int:
        return self._rank

    def index_of(self, label: str) -> int:
        try:
            return self._label_index[label]
        except KeyError:
            raise OutOfRange(f"unknown ground label {label!r}") from None

    def labels_of(self, mask: int) -> tuple[str, ...]:
        return tuple(self.ground[i] for i in bitsets.iter_bits(mask))

    def mask_of_labels(self, labels: Iterable[str]) -> int:
        return bitsets.mask_of(self.index_of(l) for l in labels)

    def __repr__(self) -> str:
        return f"PiSpace({self.provenance}, n={self.size}, rank={self.rank})"

    # -- the oracle ------------------------------------------------------

    def independent_mask(self, mask: int) -> bool:
        cached = self._cache.get(mask)
        if cached is None:
            cached = bool(self._oracle(mask))
            self._cache[mask] = cached
        return cached

    def independent(self, subset: Iterable[int]) -> bool:
        mask = 0
        for i in subset:
            if not 0 <= i < self.size:
                raise OutOfRange(f"index {i} outside ground of size {self.size}")
            mask |= 1 << i
        return self.independent_mask(mask)

    def greedy_basis_mask(self, within: int) -> int:
        """Lexicographically first maximal independent subset of `within`."""
        acc = 0
        for i in bitsets.iter_bits(within):
            cand = acc | (1 << i)
            if self.independent_mask(cand):
                acc = cand
        return acc

    def _greedy_rank(self) -> int:
        return self.greedy_basis_mask(self.full_mask).bit_count()

    # -- family enumeration ----------------------------------------------

    def independent_family(self, max_ground: int = DEFAULT_MAX_GROUND) -> list[int]:
        """All independent sets as masks, lexicographic on index tuples.

        Enumerated by depth-first extension, which is exhaustive for any
        downward-closed family.
        """
        _check_cap(self.size, max_ground)
        n = self.size
        out: list[int] = []

        def extend(mask: int, start: int) -> None:
            out.append(mask)
            for x in range(start, n):
                cand = mask | (1 << x)
                if self.independent_mask(cand):
                    extend(cand, x + 1)

        extend(0, 0)
        return bitsets.lex_sorted(out)

    def maximal_independent_masks(self, max_ground: int = DEFAULT_MAX_GROUND) -> list[int]:
        fam = self.independent_family(max_ground)
        full = self.full_mask
        out = []
        for mask in fam:
            rest = full & ~mask
            if not any(self.independent_mask(mask | (1 << x))
                       for x in bitsets.iter_bits(rest)):
                out.append(mask)
        return out

    def bases(self, max_ground: int = DEFAULT_MAX_GROUND) -> list[tuple[int, ...]]:
        """All maximal independent sets, lexicographically sorted."""
        return [bitsets.indices_of(m) for m in self.maximal_independent_masks(max_ground)]

    # -- derived instances -------------------------------------------------

    def restrict(self, keep: Iterable[int]) -> "PiSpace":
        keep_mask = bitsets.mask_of(keep)
        if keep_mask == 0:
            raise EmptyRestriction("restriction to the empty set is not allowed")
        if keep_mask & ~self.full_mask:
            raise OutOfRange("restriction set is not a subset of the ground set")
        kept = bitsets.indices_of(keep_mask)
        parent = self

        def oracle(mask: int) -> bool:
            lifted = bitsets.mask_of(kept[i] for i in bitsets.iter_bits(mask))
            return parent.independent_mask(lifted)

        return PiSpace([self.ground[i] for i in kept], oracle,
                       provenance=f"restrict({self.provenance})")

    def skeleton(self, k: int) -> "PiSpace":
        """Independent sets of size at most k+1."""
        if k < 0:
            raise InvalidSpec("skeleton dimension must be >= 0")
        parent = self
        bound = k + 1

        def oracle(mask: int) -> bool:
            return mask.bit_count() <= bound and parent.independent_mask(mask)

        return PiSpace(self.ground, oracle,
                       provenance=f"skeleton({self.provenance}, {k})",
                       rank=min(self.rank, bound))

    def link(self, seed: Iterable[int]) -> "PiSpace":
        """Pi-space on ground minus `seed` with sets completing `seed`."""
        seed_mask = bitsets.mask_of(seed)
        if seed_mask & ~self.full_mask:
            raise OutOfRange("link seed is not a subset of the ground set")
        if not self.independent_mask(seed_mask):
            raise DependentSeed("link seed must be independent")
        kept = bitsets.indices_of(self.full_mask & ~seed_mask)
        parent = self

        def oracle(mask: int) -> bool:
            lifted = bitsets.mask_of(kept[i] for i in bitsets.iter_bits(mask))
            return parent.independent_mask(lifted | seed_mask)

        return PiSpace([self.ground[i] for i in kept], oracle,
                       provenance=f"link({self.provenance})")


# -- axiom checking -------------------------------------------------------


@dataclass(frozen=True)
class AxiomWitness:
    axiom: str
    sigma: tuple[int, ...]
    tau: tuple[int, ...]


@dataclass(frozen=True)
class AxiomReport:
    i1_holds: bool
    i2_holds: bool
    i2prime_holds: bool
    witnesses: tuple[AxiomWitness, ...]

    @property
    def all_hold(self) -> bool:
        return self.i1_holds and self.i2_holds and self.i2prime_holds


def check_axioms(M: PiSpace, max_ground: int = DEFAULT_MAX_GROUND) -> AxiomReport:
    """Exhaustive test of downward closure (I1), the exchange property (I2)
    over all pairs of independent sets, and the maximal-set variant (I2')
    over (maximal set, smaller independent set) pairs.

    The family is enumerated by a full powerset scan so that violations of
    downward closure are also caught.
    """
    _check_cap(M.size, max_ground)
    family = [m for m in range(1 << M.size) if M.independent_mask(m)]
    fam_set = set(family)
    witnesses: list[AxiomWitness] = []

    i1 = True
    for mask in family:
        for x in bitsets.iter_bits(mask):
            sub = mask & ~(1 << x)
            if sub not in fam_set:
                i1 = False
                witnesses.append(AxiomWitness("I1", bitsets.indices_of(mask),
                                              bitsets.indices_of(sub)))

    by_size: dict[int, list[int]] = {}
    for mask in family:
        by_size.setdefault(mask.bit_count(), []).append(mask)

    def exchange_ok(sigma: int, tau: int) -> bool:
        return any(tau | (1 << x) in fam_set
                   for x in bitsets.iter_bits(sigma & ~tau))

    i2 = True
    sizes = sorted(by_size)
    for s_tau in sizes:
        for s_sig in sizes:
            if s_sig <= s_tau:
                continue
            for tau in by_size[s_tau]:
                for sigma in by_size[s_sig]:
                    if not exchange_ok(sigma, tau):
                        i2 = False
                        witnesses.append(AxiomWitness(
                            "I2", bitsets.indices_of(sigma), bitsets.indices_of(tau)))

    maximal = [m for m in family
               if not any((m | (1 << x)) in fam_set
                          for x in bitsets.iter_bits(M.full_mask & ~m))]
    i2prime = True
    for sigma in maximal:
        s_sig = sigma.bit_count()
        for tau in family:
            if tau.bit_count() >= s_sig:
                continue
            if not exchange_ok(sigma, tau):
                i2prime = False
                witnesses.append(AxiomWitness(
                    "I2'", bitsets.indices_of(sigma), bitsets.indices_of(tau)))

    witnesses.sort(key=lambda w: (w.axiom, w.sigma, w.tau))
    return AxiomReport(i1, i2, i2prime, tuple(witnesses))


def w_equals_fin_check(M: PiSpace, max_ground: int = DEFAULT_MAX_GROUND) -> bool:
    """True iff the sets all of whose subsets are independent are exactly
    the independent sets.  On a finite ground this is equivalent to
    downward closure, so it always holds for valid instances."""
    return _w_fin_mismatch(M, max_ground) is None


def _w_fin_mismatch(M: PiSpace, max_ground: int = DEFAULT_MAX_GROUND) -> tuple[int, ...] | None:
    """A witness set in the symmetric difference of the two families, or None."""
    _check_cap(M.size, max_ground)
    n = M.size
    in_w = [False] * (1 << n)
    in_w[0] = M.independent_mask(0)
    for mask in range(1, 1 << n):
        if not M.independent_mask(mask):
            continue
        if all(in_w[mask & ~(1 << x)] for x in bitsets.iter_bits(mask)):
            in_w[mask] = True
    for mask in range(1 << n):
        if in_w[mask] != M.independent_mask(mask):
            return bitsets.indices_of(mask)
    return None


# -- family builders -------------------------------------------------------


def uniform(n: int, r: int) -> PiSpace:
    """Uniform family U(n, r): subsets of size at most r are independent."""
    if n < 1 or not 0 <= r <= n:
        raise InvalidSpec(f"uniform requires 1 <= n and 0 <= r <= n, got ({n}, {r})")
    return PiSpace([str(i) for i in range(n)],
                   lambda mask: mask.bit_count() <= r,
                   provenance=f"uniform({n},{r})", rank=r)


def boolean(n: int) -> PiSpace:
    """Free family on n elements: every subset is independent."""
    if n < 1:
        raise InvalidSpec("boolean requires n >= 1")
    return PiSpace([str(i) for i in range(n)], lambda mask: True,
                   provenance=f"boolean({n})", rank=n)


def _edge_labels(edges: Sequence[tuple[int, int]]) -> list[str]:
    seen: dict[str, int] = {}
    labels = []
    for u, v in edges:
        base = f"{min(u, v)}-{max(u, v)}"
        k = seen.get(base, 0)
        seen[base] = k + 1
        labels.append(base if k == 0 else f"{base}#{k}")
    return labels


def graphic(vertices: int, edges: Sequence[Sequence[int]]) -> PiSpace:
    """Cycle family of a multigraph: an edge set is independent iff it is
    a forest.  Self-loops are dependent singletons (loops of the family).
    """
    if vertices < 1:
        raise InvalidSpec("graphic requires at least one vertex")
    edge_list = []
    for e in edges:
        if len(e) != 2:
            raise InvalidSpec(f"edge {e!r} is not a pair")
        u, v = int(e[0]), int(e[1])
        if not (0 <= u < vertices and 0 <= v < vertices):
            raise InvalidSpec(f"edge {e!r} mentions an unknown vertex")
        edge_list.append((u, v))
    if not edge_list:
        raise InvalidSpec("graphic requires at least one edge")

    def oracle(mask: int) -> bool:
        parent: dict[int, int] = {}

        def find(x: int) -> int:
            while parent.setdefault(x, x) != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i in bitsets.iter_bits(mask):
            u, v = edge_list[i]
            ru, rv = find(u), find(v)
            if ru == rv:
                return False
            parent[ru] = rv
        return True

    return PiSpace(_edge_labels(edge_list), oracle,
                   provenance=f"graphic(v={vertices},e={len(edge_list)})")


def linear_gfp(p: int, columns: Sequence[Sequence[int]]) -> PiSpace:
    """Linear family over GF(p): column subsets independent iff linearly
    independent.  Restricted to prime fields, p < 2**31, with exact
    modular elimination."""
    if not is_prime(p) or p >= 2 ** 31:
        raise InvalidSpec(f"p must be a prime below 2**31, got {p}")
    cols = [tuple(int(x) % p for x in c) for c in columns]
    if not cols:
        raise InvalidSpec("linear_gfp requires at least one column")
    dims = {len(c) for c in cols}
    if len(dims) != 1:
        raise InvalidSpec("columns must all have the same length")

    def oracle(mask: int) -> bool:
        return columns_independent([cols[i] for i in bitsets.iter_bits(mask)], p)

    return PiSpace([f"c{i}" for i in range(len(cols))], oracle,
                   provenance=f"linear_gfp(p={p},cols={len(cols)})")


def explicit(ground: Sequence[str],
             independent: Sequence[Sequence[str]] | None = None,
             bases: Sequence[Sequence[str]] | None = None,
             circuits: Sequence[Sequence[str]] | None = None,
             complete_downward: bool = False) -> PiSpace:
    """Family given explicitly, as independent sets, as bases, or as
    circuits.  Bases and circuits are expanded to an independence family
    (independent = subset of a basis / contains no circuit).  A family
    given as independent sets must already be downward closed unless
    ``complete_downward`` is set.
    """
    ground = tuple(str(g) for g in ground)
    if not ground:
        raise InvalidSpec("explicit ground set must be non-empty")
    if len(set(ground)) != len(ground):
        raise InvalidSpec("ground labels must be distinct")
    given = [name for name, v in
             (("independent", independent), ("bases", bases), ("circuits", circuits))
             if v is not None]
    if len(given) != 1:
        raise InvalidSpec("exactly one of independent/bases/circuits must be given")
    index = {lab: i for i, lab in enumerate(ground)}

    def to_mask(subset: Sequence[str]) -> int:
        mask = 0
        for lab in subset:
            lab = str(lab)
            if lab not in index:
                raise InvalidSpec(f"unknown ground label {lab!r}")
            mask |= 1 << index[lab]
        return mask

    if circuits is not None:
        circuit_masks = [to_mask(c) for c in circuits]
        if 0 in circuit_masks:
            raise InvalidSpec("the empty set cannot be a circuit")
        family = {m for m in range(1 << len(ground))
                  if not any(c & ~m == 0 for c in circuit_masks)}
    elif bases is not None:
        base_masks = [to_mask(b) for b in bases]
        if not base_masks:
            raise InvalidSpec("at least one basis is required")
        family = set()
        for b in base_masks:
            family.update(bitsets.submasks(b))
    else:
        assert independent is not None
        family = {to_mask(s) for s in independent}
        if not family:
            raise InvalidSpec("the independence family must be non-empty")
        if complete_downward:
            stack = list(family)
            while stack:
                mask = stack.pop()
                for x in bitsets.iter_bits(mask):
                    sub = mask & ~(1 << x)
                    if sub not in family:
                        family.add(sub)
                        stack.append(sub)
        else:
            for mask in sorted(family):
                for x in bitsets.iter_bits(mask):
                    sub = mask & ~(1 << x)
                    if sub not in family:
                        raise NotDownwardClosed(
                            "explicit family is not downward closed "
                            f"({bitsets.indices_of(mask)} present, "
                            f"{bitsets.indices_of(sub)} missing)",
                            witness=(bitsets.indices_of(mask), bitsets.indices_of(sub)))

    frozen = frozenset(family)
    rank = max(m.bit_count() for m in frozen)
    return PiSpace(ground, lambda mask: mask in frozen,
                   provenance=f"explicit(n={len(ground)})", rank=rank)


_SUGAR = re.compile(r"^(uniform|boolean|complete|path|cycle)\((\d+)(?:,(\d+))?\)$")


def build_family(spec) -> PiSpace:
    """Build an instance from a family spec.

    Accepts a dict (the JSON spec schema), a JSON string, or one of the
    compact forms ``uniform(n,r)``, ``boolean(n)``, ``complete(n)``,
    ``path(n)``, ``cycle(n)`` where complete/path/cycle are graphic
    families on n vertices.
    """
    if isinstance(spec, str):
        text = spec.strip()
        m = _SUGAR.match(text)
        if m:
            kind, a, b = m.group(1), int(m.group(2)), m.group(3)
            if kind == "uniform":
                if b is None:
                    raise InvalidSpec("uniform(n,r) needs two parameters")
                return uniform(a, int(b))
            if kind == "boolean":
                return boolean(a)
            if kind == "complete":
                return graphic(a, [(i, j) for i in range(a) for j in range(i + 1, a)])
            if kind == "path":
                return graphic(a, [(i, i + 1) for i in range(a - 1)])
            if kind == "cycle":
                return graphic(a, [(i, (i + 1) % a) for i in range(a)])
        try:
            spec = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidSpec(f"unrecognised family spec: {exc}") from None
    if not isinstance(spec, dict):
        raise InvalidSpec("family spec must be a JSON object")
    kind = spec.get("kind")
    try:
        if kind == "uniform":
            return uniform(int(spec["n"]), int(spec["r"]))
        if kind == "boolean":
            return boolean(int(spec["n"]))
        if kind == "graphic":
            return graphic(int(spec["vertices"]), spec["edges"])
        if kind == "linear_gfp":
            return linear_gfp(int(spec["p"]), spec["columns"])
        if kind == "explicit":
            return explicit(spec["ground"],
                            independent=spec.get("independent"),
                            bases=spec.get("bases"),
                            circuits=spec.get("circuits"),
                            complete_downward=bool(spec.get("complete_downward", False)))
    except KeyError as exc:
        raise InvalidSpec(f"family spec is missing field {exc}") from None
    raise InvalidSpec(f"unknown family kind {kind!r}")
