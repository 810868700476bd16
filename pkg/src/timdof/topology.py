"""Locally connected network topologies and structural graph queries.

A Topology records which receivers hear which transmitters in a K-user
interference network.  Two generated families are supported: a truncated
chain where transmitter j reaches receivers j..j+L clipped at K, and a
cyclic variant where the same window wraps around modulo K.  Hand-built
bipartite topologies are accepted for structural experiments.

All public indices are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .errors import InvalidParameterError, ResourceLimitError

TRUNCATED = "truncated"
CYCLIC = "cyclic"
EXPLICIT = "explicit"

GENERATED_MODES = (TRUNCATED, CYCLIC)

# Chordality enumerates induced cycles; keep instances at desk scale.
CHORDALITY_K_LIMIT = 16


def _check_count(K) -> None:
    if not isinstance(K, int) or isinstance(K, bool) or K < 1:
        raise InvalidParameterError(f"user count K must be a positive integer, got {K!r}")


def iter_bits(mask: int):
    """Yield the set bit positions of a mask, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Topology:
    """Immutable connectivity structure over (receiver, transmitter) pairs."""

    K: int
    L: int | None
    mode: str
    edges: frozenset[tuple[int, int]]  # (receiver, transmitter) pairs

    def connected(self, receiver: int, transmitter: int) -> bool:
        """True iff `receiver` hears `transmitter`."""
        self.check_index(receiver)
        self.check_index(transmitter)
        return (receiver, transmitter) in self.edges

    def check_index(self, idx: int) -> None:
        if not isinstance(idx, int) or isinstance(idx, bool) or not 1 <= idx <= self.K:
            raise InvalidParameterError(f"index {idx!r} outside 1..{self.K}")

    @cached_property
    def rx_masks(self) -> tuple[int, ...]:
        """rx_masks[i-1] has bit j-1 set iff receiver i hears transmitter j."""
        masks = [0] * self.K
        for i, j in self.edges:
            masks[i - 1] |= 1 << (j - 1)
        return tuple(masks)

    @cached_property
    def tx_masks(self) -> tuple[int, ...]:
        """tx_masks[j-1] has bit i-1 set iff transmitter j reaches receiver i."""
        masks = [0] * self.K
        for i, j in self.edges:
            masks[j - 1] |= 1 << (i - 1)
        return tuple(masks)


def make_locally_connected(K: int, L: int, mode: str) -> Topology:
    """Build the K-user topology where transmitter j reaches receivers j..j+L.

    In truncated mode receiver indices past K are dropped, so each of the
    last L transmitters reaches only its own and the remaining following
    receivers.  In cyclic mode the window wraps modulo K.  Requires
    0 <= L < K.
    """
    _check_count(K)
    if not isinstance(L, int) or isinstance(L, bool) or L < 0:
        raise InvalidParameterError(f"connectivity parameter L must be a non-negative integer, got {L!r}")
    if L >= K:
        raise InvalidParameterError(f"need L < K, got L={L}, K={K}")
    if mode not in GENERATED_MODES:
        raise InvalidParameterError(f"mode must be one of {GENERATED_MODES}, got {mode!r}")
    edges = set()
    for j in range(1, K + 1):
        for off in range(L + 1):
            if mode == TRUNCATED:
                i = j + off
                if i <= K:
                    edges.add((i, j))
            else:
                edges.add(((j - 1 + off) % K + 1, j))
    return Topology(K=K, L=L, mode=mode, edges=frozenset(edges))


def explicit_topology(K: int, edges) -> Topology:
    """Build a hand-specified bipartite topology from (receiver, transmitter) pairs.

    Every receiver must keep its direct link (i, i); indices are 1-based.
    """
    _check_count(K)
    edge_set = set()
    for e in edges:
        pair = tuple(e)
        if len(pair) != 2:
            raise InvalidParameterError(f"edge {e!r} is not a (receiver, transmitter) pair")
        i, j = pair
        if not (isinstance(i, int) and isinstance(j, int)) or not (1 <= i <= K and 1 <= j <= K):
            raise InvalidParameterError(f"edge {e!r} outside 1..{K}")
        edge_set.add((i, j))
    for i in range(1, K + 1):
        if (i, i) not in edge_set:
            raise InvalidParameterError(f"receiver {i} is missing its direct link ({i},{i})")
    return Topology(K=K, L=None, mode=EXPLICIT, edges=frozenset(edge_set))


def receivers_heard_by(t: Topology, j: int) -> tuple[int, ...]:
    """Receivers that hear transmitter j, ascending."""
    t.check_index(j)
    return tuple(i for i in range(1, t.K + 1) if (i, j) in t.edges)


def transmitters_heard_by(t: Topology, i: int) -> tuple[int, ...]:
    """Transmitters heard by receiver i, ascending."""
    t.check_index(i)
    return tuple(j for j in range(1, t.K + 1) if (i, j) in t.edges)


def is_chordal_bipartite(t: Topology, cycle_length_cap: int | None = None,
                         k_limit: int = CHORDALITY_K_LIMIT) -> bool | None:
    """Test whether the undirected bipartite topology graph is chordal bipartite.

    Chordal bipartite means every cycle of length >= 6 has a chord.  The
    check enumerates chordless cycles by depth-first extension of induced
    paths anchored at their least node.  `cycle_length_cap`, when given,
    bounds the cycle lengths examined; if the cap cut off the search
    before a verdict the result is None (inconclusive) rather than a
    claim.  Returns False as soon as a chordless cycle of length >= 6 is
    found, True only after an exhaustive search.
    """
    if t.K > k_limit:
        raise ResourceLimitError(
            f"chordality check limited to K <= {k_limit}, got K={t.K}", limit=k_limit)
    if cycle_length_cap is not None and cycle_length_cap < 4:
        raise InvalidParameterError("cycle_length_cap below the shortest bipartite cycle")

    # Nodes 0..K-1 are receivers, K..2K-1 are transmitters.
    n = 2 * t.K
    adj = [0] * n
    for i, j in t.edges:
        adj[i - 1] |= 1 << (t.K + j - 1)
        adj[t.K + j - 1] |= 1 << (i - 1)

    pruned = False
    start_bit = 0

    def extend(path: list[int], path_mask: int, interior_adj: int) -> bool:
        # path is an induced path; interior nodes are not adjacent to path[0]
        nonlocal pruned
        last = path[-1]
        cand = adj[last] & ~path_mask
        while cand:
            low = cand & -cand
            cand ^= low
            u = low.bit_length() - 1
            if u <= path[0]:
                continue  # canonical: cycles are discovered from their least node
            if adj[u] & interior_adj:
                continue  # chord against an interior node, extension not induced
            if len(path) >= 2 and adj[u] & start_bit:
                # closing edge back to path[0]; chordless cycle of len(path)+1 nodes
                if len(path) + 1 >= 6:
                    return True
                continue  # a 4-cycle is allowed; extending past u would leave a chord
            if cycle_length_cap is not None and len(path) + 1 >= cycle_length_cap:
                pruned = True
                continue
            path.append(u)
            new_interior = interior_adj | ((1 << last) if len(path) > 2 else 0)
            if extend(path, path_mask | low, new_interior):
                return True
            path.pop()
        return False

    # The least node of any cycle is a receiver: receiver ids precede
    # transmitter ids and every cycle alternates between the two sides.
    for v0 in range(t.K):
        start_bit = 1 << v0
        if extend([v0], start_bit, 0):
            return False
    return None if pruned else True
