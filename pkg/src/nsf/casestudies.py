"""Finite-depth executable semantics for the tree and search-operator studies.

Everything here runs at "desk scale": an infinite binary tree is rendered
as a depth-D tree that is *deep* (has a node at every level up to D), and a
type-one function is a finite list of values with an eventually-constant
tail.  At this scale the classically non-constructive statements become
exhaustively checkable, and the two bridging constructions can be run and
cross-checked against brute force:

* from a path-selection functional with an agreement modulus, a bound for
  the least-zero search (the discontinuity argument on a pair of trees that
  agree up to the first zero of the input function);
* from a least-zero search operator, the leftmost deep branch of a tree,
  found level by level through encoded emptiness queries.

The tree-pair construction below cuts the opposite-colour branch at the
first zero of the input (the displayed definition cuts at nonzeros; the two
are exchanged by flipping the function's values, which every report notes).
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable

POLARITY_NOTE = "branch cut at first zero of f (flip f pointwise for the nonzero-cut reading)"


class CaseStudyError(Exception):
    pass


class ContractViolation(CaseStudyError):
    """A supplied functional broke its declared contract; reported, not masked."""


class NotDeep(CaseStudyError):
    """The tree has no node at some level, so path selection does not apply."""


class BarViolated(CaseStudyError):
    """Some branch survives inside the tree past its declared exit point."""


# ---------------------------------------------------------------------------
# Data


@dataclass(frozen=True)
class BoundedSeq:
    """A type-one object with decidable behaviour: listed values, then a
    constant tail (1 by default, so the search for a zero is decidable)."""

    values: tuple[int, ...]
    tail: int = 1

    def __post_init__(self) -> None:
        if len(self.values) < 1:
            raise ValueError("a bounded sequence lists at least one value")

    def __call__(self, n: int) -> int:
        return self.values[n] if n < len(self.values) else self.tail


@dataclass(frozen=True)
class PathPrefix:
    bits: str

    def __post_init__(self) -> None:
        if any(b not in "01" for b in self.bits):
            raise ValueError("a path prefix is a binary string")

    def __getitem__(self, i: int) -> int:
        return int(self.bits[i])

    def __len__(self) -> int:
        return len(self.bits)

    def prefix(self, k: int) -> str:
        return self.bits[:k]


@dataclass(frozen=True)
class FinTree:
    """A prefix-closed set of binary strings of length at most ``depth``.

    A nonempty tree contains the root.  The empty node set is allowed (it
    is never deep); it closes the enumeration of prefix-closed sets.
    """

    depth: int
    nodes: frozenset[str]

    def __post_init__(self) -> None:
        for s in self.nodes:
            if len(s) > self.depth or any(b not in "01" for b in s):
                raise ValueError(f"bad node {s!r} for depth {self.depth}")
            if s and s[:-1] not in self.nodes:
                raise ValueError(f"node {s!r} lacks its parent: not prefix-closed")
        if self.nodes and "" not in self.nodes:
            raise ValueError("a nonempty tree contains the root")

    def __contains__(self, s: str) -> bool:
        return s in self.nodes

    def is_deep(self) -> bool:
        # Prefix closure makes a node at full depth equivalent to one per level.
        return any(len(s) == self.depth for s in self.nodes)

    def level(self, k: int) -> frozenset[str]:
        return frozenset(s for s in self.nodes if len(s) == k)

    def deep_leaves(self) -> list[str]:
        return sorted(s for s in self.nodes if len(s) == self.depth)


def full_tree(depth: int) -> FinTree:
    nodes = [format(n, f"0{k}b") if k else "" for k in range(depth + 1) for n in range(2 ** k)]
    return FinTree(depth, frozenset(nodes))


def trees_agree_below(t: FinTree, s: FinTree, cutoff: int) -> bool:
    """Membership agreement on every string strictly shorter than ``cutoff``."""
    top = min(cutoff - 1, max(t.depth, s.depth))
    for k in range(0, top + 1):
        if t.level(k) != s.level(k):
            return False
    return True


# ---------------------------------------------------------------------------
# Search operator and the tree pair


def mu_bruteforce(f: BoundedSeq, bound: int) -> int:
    """Least n <= bound with f(n) = 0, and 0 when there is none."""
    for n in range(bound + 1):
        if f(n) == 0:
            return n
    return 0


def first_zero(f: BoundedSeq, limit: int) -> int | None:
    for n in range(limit + 1):
        if f(n) == 0:
            return n
    return None


def build_pair_trees(f: BoundedSeq, depth: int) -> tuple[FinTree, FinTree]:
    """The near-identical tree pair driven by the zeros of ``f``.

    Tree i keeps the all-i branch in full; the all-(1-i) branch survives
    exactly up to the first zero of f, so the two trees agree on every
    string no longer than that and differ strictly beyond it.
    """
    z = first_zero(f, depth)
    cut = depth if z is None else z

    def tree(i: int) -> FinTree:
        own = str(i) * 1
        other = str(1 - i)
        nodes = {own * k for k in range(depth + 1)}
        nodes |= {other * k for k in range(min(cut, depth) + 1)}
        nodes.add("")
        return FinTree(depth, frozenset(nodes))

    return tree(0), tree(1)


@dataclass(frozen=True)
class UwklFunctional:
    """A path selector with an agreement modulus.

    ``phi`` returns a full-depth path through every deep tree; ``xi``
    returns a length N such that trees agreeing on all strings shorter
    than N get paths agreeing on their first k bits.
    """

    phi: Callable[[FinTree], PathPrefix]
    xi: Callable[[FinTree, FinTree, int], int]
    depth: int


def _validate_path(u: UwklFunctional, tree: FinTree) -> PathPrefix:
    path = u.phi(tree)
    if len(path) != tree.depth or any(
        path.prefix(k) not in tree.nodes for k in range(tree.depth + 1)
    ):
        raise ContractViolation(
            f"phi returned {path.bits!r}, not a depth-{tree.depth} path through the tree"
        )
    return path


def grilliot_extract(u: UwklFunctional, f: BoundedSeq, depth: int) -> int:
    """A bound N with: if f has a zero up to ``depth``, it has one up to N.

    The paths through the paired trees differ at their very first bit
    whenever f has a zero, so the agreement modulus at k = 1 bounds the
    level where the trees differ, which lies past the first zero.
    """
    t0, t1 = build_pair_trees(f, depth)
    _validate_path(u, t0)
    _validate_path(u, t1)
    return u.xi(t0, t1, 1)


def mu_from_uwkl(u: UwklFunctional, f: BoundedSeq, depth: int) -> int:
    """Least-zero search realized through the path selector's modulus."""
    return mu_bruteforce(f, grilliot_extract(u, f, depth))


# ---------------------------------------------------------------------------
# Path realizer driven by a search operator


def leftmost_path(mu: Callable[[BoundedSeq], int], tree: FinTree) -> PathPrefix:
    """Leftmost deep branch, decided level by level through ``mu`` queries.

    At each node the query encodes "the left subtree reaches full depth"
    as a 0/1 sequence over the lexicographically ordered full-length
    strings; ``mu`` answers with a least zero, which is rechecked.
    """
    if not tree.is_deep():
        raise NotDeep("no node at full depth")
    depth = tree.depth
    if depth == 0:
        return PathPrefix("")
    leaves = tree.level(depth)
    branches = [format(n, f"0{depth}b") for n in range(2 ** depth)]

    def subtree_deep(prefix: str) -> bool:
        query = BoundedSeq(
            tuple(0 if (b in leaves and b.startswith(prefix)) else 1 for b in branches)
        )
        answer = mu(query)
        return query(answer) == 0

    node = ""
    for _ in range(depth):
        if node + "0" in tree.nodes and subtree_deep(node + "0"):
            node += "0"
        elif node + "1" in tree.nodes and subtree_deep(node + "1"):
            node += "1"
        else:
            raise NotDeep(f"no deep continuation below {node!r}")
    return PathPrefix(node)


def make_xi_leftmost(depth: int) -> Callable[[FinTree, FinTree, int], int]:
    """The constant modulus depth+1: agreement on every string of the
    universe forces equal trees, hence equal leftmost paths."""

    def xi(t: FinTree, s: FinTree, k: int) -> int:
        return depth + 1

    return xi


def leftmost_functional(depth: int) -> UwklFunctional:
    """Leftmost-path selector with the constant modulus."""

    def phi(tree: FinTree) -> PathPrefix:
        leaves = tree.deep_leaves()
        if not leaves:
            raise NotDeep("no node at full depth")
        return PathPrefix(leaves[0])

    return UwklFunctional(phi=phi, xi=make_xi_leftmost(depth), depth=depth)


def mu_backed_functional(depth: int) -> UwklFunctional:
    """The same selector, but routed through least-zero queries."""

    def phi(tree: FinTree) -> PathPrefix:
        return leftmost_path(lambda f: mu_bruteforce(f, 2 ** depth), tree)

    return UwklFunctional(phi=phi, xi=make_xi_leftmost(depth), depth=depth)


# ---------------------------------------------------------------------------
# Extensionality checking


@dataclass
class ExtReport:
    samples: int = 0
    checked: int = 0
    skipped: int = 0
    violations: list[dict] = field(default_factory=list)

    def ok(self) -> bool:
        return not self.violations


def check_ext_functional(
    u: UwklFunctional, samples: list[tuple[FinTree, FinTree, int]]
) -> ExtReport:
    """Test the agreement-modulus contract on a list of tree pairs.

    For each (T, S, k): when T and S agree on all strings shorter than
    xi(T, S, k), the first k bits of the selected paths must agree.  Pairs
    where the agreement hypothesis fails are vacuous; pairs involving a
    non-deep tree are skipped (the selector is unconstrained there).
    """
    report = ExtReport(samples=len(samples))
    cache: dict[frozenset[str], PathPrefix | None] = {}

    def path(t: FinTree) -> PathPrefix | None:
        if t.nodes not in cache:
            try:
                cache[t.nodes] = u.phi(t)
            except NotDeep:
                cache[t.nodes] = None
        return cache[t.nodes]

    for t, s, k in samples:
        modulus = u.xi(t, s, k)
        if not trees_agree_below(t, s, modulus):
            continue
        pt, ps = path(t), path(s)
        if pt is None or ps is None:
            report.skipped += 1
            continue
        report.checked += 1
        if pt.prefix(k) != ps.prefix(k):
            report.violations.append(
                {
                    "k": k,
                    "modulus": modulus,
                    "left_path": pt.bits,
                    "right_path": ps.bits,
                    "left_nodes": sorted(t.nodes),
                    "right_nodes": sorted(s.nodes),
                }
            )
    return report


# ---------------------------------------------------------------------------
# Fan bound


def fan_bound_bruteforce(tree: FinTree, g: Callable[[PathPrefix], int]) -> int:
    """Least level by which every branch has left the tree.

    Precondition (checked): every full-length branch b satisfies
    b-restricted-to-g(b) not in the tree, with g(b) at most the depth.
    """
    depth = tree.depth
    worst = 0
    for n in range(2 ** depth):
        bits = format(n, f"0{depth}b") if depth else ""
        beta = PathPrefix(bits)
        gb = g(beta)
        if gb > depth:
            raise BarViolated(f"g({bits!r}) = {gb} exceeds the depth {depth}")
        if beta.prefix(gb) in tree.nodes:
            raise BarViolated(f"branch {bits!r} stays in the tree up to g = {gb}")
        exit_level = next(i for i in range(depth + 1) if beta.prefix(i) not in tree.nodes)
        worst = max(worst, exit_level)
    return worst


# ---------------------------------------------------------------------------
# Enumeration and sampling


def enumerate_prefix_closed(depth: int) -> list[frozenset[str]]:
    """All prefix-closed node sets of the given depth, empty set included."""
    if depth == 0:
        return [frozenset(), frozenset({""})]
    subs = enumerate_prefix_closed(depth - 1)
    out = [frozenset()]
    for left in subs:
        for right in subs:
            nodes = {""} | {"0" + s for s in left} | {"1" + s for s in right}
            out.append(frozenset(nodes))
    return out


def random_tree(depth: int, rng: random.Random, keep: float = 0.8) -> FinTree:
    nodes = {""}
    frontier = [""]
    for _ in range(depth):
        nxt = []
        for node in frontier:
            for b in "01":
                if rng.random() < keep:
                    nodes.add(node + b)
                    nxt.append(node + b)
        frontier = nxt
    return FinTree(depth, frozenset(nodes))


# ---------------------------------------------------------------------------
# Demo suites


def _report(case: str, depth: int, instances: int, violations: int, started: float,
            note: str = "") -> dict:
    return {
        "case": case,
        "depth": depth,
        "instances": instances,
        "violations": violations,
        "runtime_ms": int((time.monotonic() - started) * 1000),
        "passed": violations == 0,
        "note": note,
    }


def run_mu_from_uwkl_demo(depth: int = 12, length: int = 11) -> dict:
    """Exhaustive agreement of the extracted search with brute force."""
    started = time.monotonic()
    u = leftmost_functional(depth)
    bad = 0
    for mask in range(2 ** length):
        bits = tuple((mask >> i) & 1 for i in range(length))
        f = BoundedSeq(bits)
        if mu_from_uwkl(u, f, depth) != mu_bruteforce(f, depth):
            bad += 1
    return _report("mu-from-uwkl", depth, 2 ** length, bad, started, note=POLARITY_NOTE)


def run_uwkl_from_mu_demo(depth: int = 3) -> dict:
    """Exhaustive check of the search-driven path realizer."""
    started = time.monotonic()
    mu = lambda f: mu_bruteforce(f, 2 ** depth)  # noqa: E731
    bad = 0
    sets = enumerate_prefix_closed(depth)
    for nodes in sets:
        tree = FinTree(depth, nodes)
        leaves = tree.deep_leaves()
        if not leaves:
            try:
                leftmost_path(mu, tree)
            except NotDeep:
                continue
            bad += 1
            continue
        try:
            path = leftmost_path(mu, tree)
        except NotDeep:
            bad += 1
            continue
        if path.bits != leaves[0]:
            bad += 1
            continue
        if any(path.prefix(k) not in tree.nodes for k in range(depth + 1)):
            bad += 1
    return _report("uwkl-from-mu", depth, len(sets), bad, started)


def run_fan_demo(depth: int = 3) -> dict:
    """Fan bounds against the deepest-node oracle over all trees."""
    started = time.monotonic()
    bad = 0
    sets = enumerate_prefix_closed(depth)
    g = lambda beta: depth  # noqa: E731
    for nodes in sets:
        tree = FinTree(depth, nodes)
        if tree.is_deep():
            try:
                fan_bound_bruteforce(tree, g)
                bad += 1  # a deep tree admits no bar
            except BarViolated:
                pass
            continue
        bound = fan_bound_bruteforce(tree, g)
        oracle = 1 + max((len(s) for s in nodes), default=-1)
        if bound != oracle:
            bad += 1
    return _report("fan", depth, len(sets), bad, started)


DEMOS = {
    "mu-from-uwkl": run_mu_from_uwkl_demo,
    "uwkl-from-mu": run_uwkl_from_mu_demo,
    "fan": run_fan_demo,
}
