"""Circuits, closure, flats, contraction, and closed sets.

The closure of X adds every element that some circuit completes inside
X.  Two interchangeable strategies are implemented:

* ``rank``   -- x joins Cl(X) iff adding x does not raise the rank of X.
  Polynomially many oracle calls; the default.
* ``circuit`` -- the definition, via an explicit scan of all circuits.
  Exponential in general; kept as the reference oracle.

On finite instances the two agree, and flats coincide with closed sets
(fixed points of Cl).  Flats are enumerated as closures of independent
sets rather than by powerset filtering; the powerset scan survives in
:func:`closed_sets` as a cross-check.

All enumeration is lexicographic on canonical index tuples, so outputs
are deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import bitsets
from .core import (
    DEFAULT_MAX_GROUND,
    CapExceeded,
    DependentSeed,
    PiSpace,
    _check_cap,
)

DEFAULT_MAX_POWERSET = 16


def rank_of(M: PiSpace, subset) -> int:
    """Size of a maximal independent subset, grown greedily in ascending
    index order (valid under the exchange property)."""
    return M.greedy_basis_mask(_as_mask(M, subset)).bit_count()


def _as_mask(M: PiSpace, subset) -> int:
    if isinstance(subset, int):
        mask = subset
    else:
        mask = bitsets.mask_of(subset)
    if mask & ~M.full_mask:
        raise ValueError("subset is not contained in the ground set")
    return mask


def loops_mask(M: PiSpace) -> int:
    mask = 0
    for x in range(M.size):
        if not M.independent_mask(1 << x):
            mask |= 1 << x
    return mask


def loops(M: PiSpace) -> tuple[int, ...]:
    """Elements whose singleton is dependent."""
    return bitsets.indices_of(loops_mask(M))


def circuit_masks(M: PiSpace, max_ground: int = DEFAULT_MAX_GROUND) -> list[int]:
    """All minimal dependent sets, cached on the instance."""
    if M._circuits is None:
        _check_cap(M.size, max_ground)
        found = []
        for mask in range(1, 1 << M.size):
            if M.independent_mask(mask):
                continue
            if all(M.independent_mask(mask & ~(1 << x))
                   for x in bitsets.iter_bits(mask)):
                found.append(mask)
        M._circuits = bitsets.lex_sorted(found)
    return M._circuits


def circuits(M: PiSpace, max_ground: int = DEFAULT_MAX_GROUND) -> list[tuple[int, ...]]:
    return [bitsets.indices_of(m) for m in circuit_masks(M, max_ground)]


def closure_mask(M: PiSpace, mask: int, strategy: str = "rank",
                 max_ground: int = DEFAULT_MAX_GROUND) -> int:
    if strategy == "rank":
        base = M.greedy_basis_mask(mask)
        r = base.bit_count()
        out = mask
        for x in bitsets.iter_bits(M.full_mask & ~mask):
            if M.greedy_basis_mask(base | (1 << x)).bit_count() == r:
                out |= 1 << x
        return out
    if strategy == "circuit":
        out = mask
        for c in circuit_masks(M, max_ground):
            rest = c & ~mask
            if rest != 0 and rest & (rest - 1) == 0:  # exactly one element missing
                out |= rest
        return out
    raise ValueError(f"unknown closure strategy {strategy!r}")


def closure(M: PiSpace, subset, strategy: str = "rank",
            max_ground: int = DEFAULT_MAX_GROUND) -> tuple[int, ...]:
    """Cl(X): X plus every element completed into a circuit inside X."""
    return bitsets.indices_of(closure_mask(M, _as_mask(M, subset), strategy, max_ground))


def is_flat(M: PiSpace, subset, max_ground: int = DEFAULT_MAX_GROUND) -> bool:
    """Definitional flat test, cross-checked against the Cl(F) = F fast path.

    The definitional check ranges over the bases of F for every external
    element, and over every independent subset of F when the ground is
    small (<= 12).  A disagreement with the fast path would mean the
    instance is not a valid finite pi-space, and raises.
    """
    fmask = _as_mask(M, subset)
    outside = bitsets.indices_of(M.full_mask & ~fmask)
    restricted = M.restrict(bitsets.indices_of(fmask)) if fmask else None

    definitional = True
    if restricted is None:
        sigmas_local = [0]
        lift = lambda m: 0
    else:
        kept = bitsets.indices_of(fmask)
        lift = lambda m: bitsets.mask_of(kept[i] for i in bitsets.iter_bits(m))
        if M.size <= 12:
            sigmas_local = restricted.independent_family(max_ground)
        else:
            sigmas_local = restricted.maximal_independent_masks(max_ground)
    for local in sigmas_local:
        sigma = lift(local)
        for x in outside:
            if not M.independent_mask(sigma | (1 << x)):
                definitional = False
                break
        if not definitional:
            break

    fast = closure_mask(M, fmask) == fmask
    if fast != definitional:
        raise RuntimeError(
            "flat test mismatch between the definitional check and Cl(F)=F; "
            "the instance does not behave like a finite pi-space")
    return definitional


# -- the lattice of flats ---------------------------------------------------


@dataclass(frozen=True)
class Flat:
    members: tuple[int, ...]
    rank: int

    @property
    def mask(self) -> int:
        return bitsets.mask_of(self.members)


class FlatsLattice:
    """Flats of an instance under inclusion, with Hasse cover edges.

    Elements are sorted by (rank, index tuple); covers are the transitive
    reduction of inclusion, sorted lexicographically.  The bottom is the
    loop set, the top the full ground set.  If every element is a loop the
    lattice collapses to the single flat M (bottom = top) and the proper
    part is empty.
    """

    def __init__(self, instance: PiSpace, flats: list[Flat]):
        self.instance = instance
        self.flats = sorted(flats, key=lambda f: (f.rank, f.members))
        self._masks = [f.mask for f in self.flats]
        self._index = {m: i for i, m in enumerate(self._masks)}
        self.covers = self._transitive_reduction()

    @classmethod
    def from_member_sets(cls, instance: PiSpace, member_masks) -> "FlatsLattice":
        fl = [Flat(bitsets.indices_of(m), rank_of(instance, m)) for m in member_masks]
        return cls(instance, fl)

    def _transitive_reduction(self) -> list[tuple[int, int]]:
        masks = self._masks
        n = len(masks)
        covers = []
        for i in range(n):
            for j in range(n):
                if i == j or masks[i] & ~masks[j]:
                    continue
                if masks[i] == masks[j]:
                    continue
                if any(k != i and k != j
                       and masks[i] & ~masks[k] == 0 and masks[k] & ~masks[j] == 0
                       and masks[k] != masks[i] and masks[k] != masks[j]
                       for k in range(n)):
                    continue
                covers.append((i, j))
        covers.sort()
        return covers

    def __len__(self) -> int:
        return len(self.flats)

    def index_of_mask(self, mask: int) -> int | None:
        return self._index.get(mask)

    @property
    def bottom(self) -> int:
        below = {j for _, j in self.covers}
        minimal = [i for i in range(len(self.flats)) if i not in below]
        if len(minimal) != 1:
            raise ValueError("lattice has no unique bottom element")
        return minimal[0]

    @property
    def top(self) -> int:
        above = {i for i, _ in self.covers}
        maximal = [j for j in range(len(self.flats)) if j not in above]
        if len(maximal) != 1:
            raise ValueError("lattice has no unique top element")
        return maximal[0]

    def leq(self, i: int, j: int) -> bool:
        return self._masks[i] & ~self._masks[j] == 0

    def atoms(self) -> list[int]:
        bot = self.bottom
        return sorted(j for i, j in self.covers if i == bot)

    def join_by_bounds(self, i: int, j: int) -> int | None:
        """Index of the least upper bound (intersection of all upper
        bounds), or None if that intersection is not an element."""
        union = self._masks[i] | self._masks[j]
        meet = None
        for m in self._masks:
            if union & ~m == 0:
                meet = m if meet is None else meet & m
        if meet is None:
            return None
        return self._index.get(meet)

    def meet_by_intersection(self, i: int, j: int) -> int | None:
        return self._index.get(self._masks[i] & self._masks[j])

    def proper_indices(self) -> list[int]:
        bot, top = self.bottom, self.top
        return [i for i in range(len(self.flats)) if i not in (bot, top)]

    def labels(self, i: int) -> tuple[str, ...]:
        return tuple(self.instance.ground[x] for x in self.flats[i].members)

    def to_json_dict(self) -> dict:
        return {
            "elements": [{"set": list(self.labels(i)), "rank": f.rank}
                         for i, f in enumerate(self.flats)],
            "covers": [list(c) for c in self.covers],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    def to_dot(self) -> str:
        lines = ["digraph flats {", "  rankdir=BT;"]
        for i in range(len(self.flats)):
            label = "{" + ",".join(self.labels(i)) + "}"
            lines.append(f'  n{i} [label="{label}"];')
        for i, j in self.covers:
            lines.append(f"  n{i} -> n{j};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def flats(M: PiSpace, max_ground: int = DEFAULT_MAX_GROUND) -> FlatsLattice:
    """The lattice of flats, enumerated as closures of independent sets.

    The rank label of Cl(sigma) is |sigma|; if two generating sets of
    different sizes produced the same closure the instance would violate
    the rank law, which is asserted.
    """
    seen: dict[int, int] = {}
    for sigma in M.independent_family(max_ground):
        c = closure_mask(M, sigma)
        r = sigma.bit_count()
        prev = seen.setdefault(c, r)
        if prev != r:
            raise RuntimeError("closure rank law violated; instance is not a "
                               "valid finite pi-space")
    flat_list = [Flat(bitsets.indices_of(m), r) for m, r in seen.items()]
    return FlatsLattice(M, flat_list)


def join(M: PiSpace, F, G) -> tuple[int, ...]:
    """Least upper bound of two flats, computed two ways that must agree:
    the closure of the union of bases, and the intersection of all upper
    bounds in the lattice."""
    lat = flats(M)
    fi, gi = lat.index_of_mask(_as_mask(M, F)), lat.index_of_mask(_as_mask(M, G))
    if fi is None or gi is None:
        raise ValueError("join arguments must be flats of the instance")
    via_closure = closure_mask(
        M, M.greedy_basis_mask(lat._masks[fi]) | M.greedy_basis_mask(lat._masks[gi]))
    ub = lat.join_by_bounds(fi, gi)
    if ub is None or lat._masks[ub] != via_closure:
        raise RuntimeError("join computed via closure and via upper bounds disagree")
    return bitsets.indices_of(via_closure)


def meet(M: PiSpace, F, G) -> tuple[int, ...]:
    """Greatest lower bound: the intersection, which must itself be a flat."""
    inter = _as_mask(M, F) & _as_mask(M, G)
    if closure_mask(M, inter) != inter:
        raise RuntimeError("intersection of flats is not a flat")
    return bitsets.indices_of(inter)


# -- geometric lattice verification ----------------------------------------


@dataclass(frozen=True)
class GeometricReport:
    ranked: bool
    atomistic: bool
    semimodular: bool
    consistent: bool
    witnesses: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return self.ranked and self.atomistic and self.semimodular and self.consistent


def verify_geometric(M: PiSpace, lattice: FlatsLattice | None = None,
                     max_ground: int = DEFAULT_MAX_GROUND) -> GeometricReport:
    """Check that the lattice of flats is ranked, atomistic and semimodular.

    When a lattice is supplied it is first validated against the instance
    (bottom = loops, top = ground, closed under intersection, and its
    element set equals the closures of independent sets); discrepancies
    make the report inconsistent.  The three lattice axioms alone cannot
    see every corruption, e.g. deleting an atom of a rank-2 instance
    leaves a smaller but perfectly geometric lattice.
    """
    witnesses: list[str] = []
    consistent = True

    reference = flats(M, max_ground)
    if lattice is None:
        lattice = reference
    else:
        have = set(lattice._masks)
        want = set(reference._masks)
        for m in bitsets.lex_sorted(want - have):
            consistent = False
            witnesses.append(f"missing flat {list(bitsets.indices_of(m))}")
        for m in bitsets.lex_sorted(have - want):
            consistent = False
            witnesses.append(f"spurious element {list(bitsets.indices_of(m))}")

    masks = lattice._masks
    n = len(masks)
    try:
        bot, top = lattice.bottom, lattice.top
    except ValueError as exc:
        return GeometricReport(False, False, False, False,
                               tuple(witnesses + [str(exc)]))
    if masks[bot] != loops_mask(M):
        consistent = False
        witnesses.append("bottom element is not the loop set")
    if masks[top] != M.full_mask:
        consistent = False
        witnesses.append("top element is not the full ground set")
    for i in range(n):
        for j in range(i + 1, n):
            if (masks[i] & masks[j]) not in lattice._index:
                consistent = False
                witnesses.append(f"intersection of elements {i} and {j} missing")

    ranks = [f.rank for f in lattice.flats]
    ranked = all(ranks[j] == ranks[i] + 1 for i, j in lattice.covers)
    if ranks and ranks[bot] != 0:
        ranked = False
    if not ranked:
        witnesses.append("cover relation does not raise rank by exactly 1")

    atomistic = True
    atom_masks = [masks[a] for a in lattice.atoms()]
    for idx in range(n):
        if idx == bot:
            continue
        below = 0
        for am in atom_masks:
            if am & ~masks[idx] == 0:
                below |= am
        jb = None
        for m in masks:
            if below & ~m == 0:
                jb = m if jb is None else jb & m
        if jb != masks[idx]:
            atomistic = False
            witnesses.append(f"element {idx} is not the join of its atoms")

    semimodular = True
    for i in range(n):
        for j in range(i + 1, n):
            ji = lattice.join_by_bounds(i, j)
            mi = lattice.meet_by_intersection(i, j)
            if ji is None or mi is None:
                semimodular = False
                witnesses.append(f"pair ({i},{j}) has no join or meet in the lattice")
                continue
            if ranks[i] + ranks[j] < ranks[ji] + ranks[mi]:
                semimodular = False
                witnesses.append(f"semimodularity fails for pair ({i},{j})")

    return GeometricReport(ranked, atomistic, semimodular, consistent,
                           tuple(witnesses))


# -- contraction and upper intervals ----------------------------------------


def contract(M: PiSpace, keep) -> PiSpace:
    """Contraction keeping `keep`: independence relative to a fixed maximal
    independent subset of the complement (the lexicographically first one;
    for matroids the resulting family does not depend on the choice)."""
    keep_mask = _as_mask(M, keep)
    tau = M.greedy_basis_mask(M.full_mask & ~keep_mask)
    kept = bitsets.indices_of(keep_mask)

    def oracle(mask: int) -> bool:
        lifted = bitsets.mask_of(kept[i] for i in bitsets.iter_bits(mask))
        return M.independent_mask(lifted | tau)

    return PiSpace([M.ground[i] for i in kept], oracle,
                   provenance=f"contract({M.provenance})")


def upper_interval_check(M: PiSpace, flat_members,
                         max_ground: int = DEFAULT_MAX_GROUND) -> bool:
    """Verify that G -> G \\ F maps the flats above F bijectively and
    order-isomorphically onto the flats of the contraction to M \\ F."""
    fmask = _as_mask(M, flat_members)
    if closure_mask(M, fmask) != fmask:
        raise ValueError("upper_interval_check requires a flat")
    lat = flats(M, max_ground)
    upper = [m for m in lat._masks if fmask & ~m == 0]
    image = [frozenset(M.labels_of(m & ~fmask)) for m in upper]

    C = contract(M, bitsets.indices_of(M.full_mask & ~fmask))
    cf = flats(C, max_ground)
    target = [frozenset(C.labels_of(m)) for m in cf._masks]

    if sorted(image, key=sorted) != sorted(target, key=sorted):
        return False
    # order preservation both ways (inclusion on both sides)
    for a in range(len(upper)):
        for b in range(len(upper)):
            if (upper[a] & ~upper[b] == 0) != (image[a] <= image[b]):
                return False
    return True


def phi(M: PiSpace, sigma) -> Flat:
    """The smallest flat containing an independent set: its closure."""
    mask = _as_mask(M, sigma)
    if not M.independent_mask(mask):
        raise DependentSeed("phi requires an independent set")
    c = closure_mask(M, mask)
    return Flat(bitsets.indices_of(c), mask.bit_count())


# -- closed sets -------------------------------------------------------------


class ClosedSetPoset:
    """Fixed points of Cl under inclusion, with Hasse cover edges."""

    def __init__(self, instance: PiSpace, member_masks: list[int]):
        self.instance = instance
        self.members = bitsets.lex_sorted(member_masks)
        self._index = {m: i for i, m in enumerate(self.members)}
        self.covers = self._transitive_reduction()

    def _transitive_reduction(self) -> list[tuple[int, int]]:
        ms = self.members
        n = len(ms)
        covers = []
        for i in range(n):
            for j in range(n):
                if i == j or ms[i] & ~ms[j] or ms[i] == ms[j]:
                    continue
                if any(k != i and k != j
                       and ms[i] & ~ms[k] == 0 and ms[k] & ~ms[j] == 0
                       and ms[k] not in (ms[i], ms[j])
                       for k in range(n)):
                    continue
                covers.append((i, j))
        covers.sort()
        return covers

    def __len__(self) -> int:
        return len(self.members)

    def labels(self, i: int) -> tuple[str, ...]:
        return self.instance.labels_of(self.members[i])

    def to_json_dict(self) -> dict:
        return {
            "elements": [{"set": list(self.labels(i))} for i in range(len(self.members))],
            "covers": [list(c) for c in self.covers],
        }


def closed_sets(M: PiSpace, max_ground: int = DEFAULT_MAX_POWERSET) -> ClosedSetPoset:
    """All Y with Cl(Y) = Y, by powerset scan.  For finite instances this
    must coincide with the flats lattice elements; the comparison is the
    cross-validation this scan exists for."""
    _check_cap(M.size, max_ground, "powerset scan ground")
    members = [mask for mask in range(1 << M.size)
               if closure_mask(M, mask) == mask]
    return ClosedSetPoset(M, members)
