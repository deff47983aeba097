"""Path-compressed binary trie keyed by prefix, with O(1) snapshots.

Every node carries an owner token. Nodes created since the last snapshot
belong to the current writer and are mutated in place; taking a snapshot
rotates the token, after which the writer copies any node it touches before
changing it. Snapshot-reachable nodes are therefore never mutated, while a
busy writer quickly converges to allocation-free in-place updates between
snapshots.

``None`` is the absent-value marker, so stored values must not be None.
"""

from __future__ import annotations

from typing import Any, Iterator

from .core import Prefix, family_bits


class Node:
    __slots__ = ("network", "masklen", "value", "left", "right", "owner")

    def __init__(self, network, masklen, value, left, right, owner):
        self.network = network
        self.masklen = masklen
        self.value = value
        self.left = left
        self.right = right
        self.owner = owner


def _is_prefix(pnet: int, plen: int, net: int, width: int) -> bool:
    return ((pnet ^ net) >> (width - plen)) == 0


def _common_len(n1: int, l1: int, n2: int, l2: int, width: int) -> int:
    m = l1 if l1 < l2 else l2
    diff = (n1 ^ n2) >> (width - m)
    return m if diff == 0 else m - diff.bit_length()


def _reindex(index, node, width):
    # A copied node supersedes the original in the current tree; point the
    # exact-match index at the copy.
    if index is not None and node.value is not None:
        family = 4 if width == 32 else 6
        index[Prefix(family, node.network, node.masklen)] = node


def _upsert(root, net, plen, value, width, epoch, index):
    """Insert or replace; returns (new_root, old_value, value_node)."""
    if root is None:
        leaf = Node(net, plen, value, None, None, epoch)
        return leaf, None, leaf
    if root.owner is not epoch:
        root = Node(root.network, root.masklen, root.value, root.left, root.right, epoch)
        _reindex(index, root, width)
    node = root
    parent = None
    went_right = False
    while True:
        nlen = node.masklen
        m = nlen if nlen < plen else plen
        diff = (node.network ^ net) >> (width - m)
        c = m if diff == 0 else m - diff.bit_length()
        if c == nlen:
            if c == plen:
                old = node.value
                node.value = value
                return root, old, node
            bit = (net >> (width - 1 - nlen)) & 1
            child = node.right if bit else node.left
            if child is None:
                leaf = Node(net, plen, value, None, None, epoch)
                if bit:
                    node.right = leaf
                else:
                    node.left = leaf
                return root, None, leaf
            if child.owner is not epoch:
                child = Node(
                    child.network, child.masklen, child.value,
                    child.left, child.right, epoch,
                )
                _reindex(index, child, width)
                if bit:
                    node.right = child
                else:
                    node.left = child
            parent, went_right, node = node, bit, child
            continue
        # The current node diverges: graft an ancestor or a fork above it.
        if c == plen:
            if (node.network >> (width - 1 - plen)) & 1:
                fresh = Node(net, plen, value, None, node, epoch)
            else:
                fresh = Node(net, plen, value, node, None, epoch)
            target = fresh
        else:
            keep = width - c
            leaf = Node(net, plen, value, None, None, epoch)
            if (net >> (width - 1 - c)) & 1:
                fresh = Node((net >> keep) << keep, c, None, node, leaf, epoch)
            else:
                fresh = Node((net >> keep) << keep, c, None, leaf, node, epoch)
            target = leaf
        if parent is None:
            return fresh, None, target
        if went_right:
            parent.right = fresh
        else:
            parent.left = fresh
        return root, None, target


def _remove(root, net, plen, width, epoch, index=None):
    """Delete; returns (new_root, old_value). Absent prefixes are a no-op."""
    if _get(root, net, plen, width) is None:
        return root, None
    if root.owner is not epoch:
        root = Node(root.network, root.masklen, root.value, root.left, root.right, epoch)
        _reindex(index, root, width)
    spine: list[tuple[Node, int]] = []
    node = root
    while node.masklen != plen:
        bit = (net >> (width - 1 - node.masklen)) & 1
        child = node.right if bit else node.left
        if child.owner is not epoch:
            child = Node(
                child.network, child.masklen, child.value,
                child.left, child.right, epoch,
            )
            _reindex(index, child, width)
            if bit:
                node.right = child
            else:
                node.left = child
        spine.append((node, bit))
        node = child
    old = node.value
    node.value = None
    if node.left is not None and node.right is not None:
        return root, old  # stays as a fork
    repl = node.left if node.left is not None else node.right
    if not spine:
        return repl, old
    parent, bit = spine.pop()
    if bit:
        parent.right = repl
    else:
        parent.left = repl
    if repl is None and parent.value is None:
        # the fork lost a branch; splice its remaining child upward
        child = parent.left if parent.left is not None else parent.right
        if not spine:
            return child, old
        gparent, gbit = spine.pop()
        if gbit:
            gparent.right = child
        else:
            gparent.left = child
    return root, old


def _get(node, net, plen, width):
    while node is not None:
        nlen = node.masklen
        if nlen > plen or (node.network ^ net) >> (width - nlen):
            return None
        if nlen == plen:
            return node.value
        node = node.right if (net >> (width - 1 - nlen)) & 1 else node.left
    return None


def _lpm(node, address, width):
    best = None
    while node is not None:
        nlen = node.masklen
        if (node.network ^ address) >> (width - nlen):
            break
        if node.value is not None:
            best = node.value
        if nlen == width:
            break
        node = node.right if (address >> (width - 1 - nlen)) & 1 else node.left
    return best


def _covering(node, net, plen, width):
    out = []
    while node is not None and node.masklen < plen:
        nlen = node.masklen
        if (node.network ^ net) >> (width - nlen):
            break
        if node.value is not None:
            out.append(node.value)
        node = node.right if (net >> (width - 1 - nlen)) & 1 else node.left
    return out


def _covering_last(node, net, plen, width):
    best = None
    while node is not None and node.masklen < plen:
        nlen = node.masklen
        if (node.network ^ net) >> (width - nlen):
            break
        if node.value is not None:
            best = node.value
        node = node.right if (net >> (width - 1 - nlen)) & 1 else node.left
    return best


def _has_cover(node, net, plen, width):
    """Any installed prefix containing (or equal to) the query, one walk."""
    while node is not None:
        nlen = node.masklen
        if nlen > plen or (node.network ^ net) >> (width - nlen):
            return False
        if node.value is not None:
            return True
        node = node.right if (net >> (width - 1 - nlen)) & 1 else node.left
    return False


def _intersects(node, net, plen, width):
    """First value related to the query by containment either way, one walk."""
    while node is not None and node.masklen < plen:
        nlen = node.masklen
        if (node.network ^ net) >> (width - nlen):
            return None
        if node.value is not None:
            return node.value  # strict cover
        node = node.right if (net >> (width - 1 - nlen)) & 1 else node.left
    if node is None or not _is_prefix(net, plen, node.network, width):
        return None
    # node sits at or below the query: any value in this subtree qualifies
    stack = [node]
    while stack:
        n = stack.pop()
        if n.value is not None:
            return n.value
        if n.right is not None:
            stack.append(n.right)
        if n.left is not None:
            stack.append(n.left)
    return None


def _covered(node, net, plen, width):
    # Descend to the topmost node at or below the query prefix.
    while node is not None and node.masklen < plen:
        if (node.network ^ net) >> (width - node.masklen):
            return []
        node = node.right if (net >> (width - 1 - node.masklen)) & 1 else node.left
    if node is None or not _is_prefix(net, plen, node.network, width):
        return []
    out = []
    stack = [node]
    while stack:
        n = stack.pop()
        if n.value is not None and n.masklen > plen:
            out.append((n.masklen, n.network, n.value))
        if n.right is not None:
            stack.append(n.right)
        if n.left is not None:
            stack.append(n.left)
    out.sort(key=lambda item: (item[0], item[1]))
    return [value for _, _, value in out]


def _iter_values(node) -> Iterator[Any]:
    stack = [node] if node is not None else []
    while stack:
        n = stack.pop()
        if n.value is not None:
            yield n.value
        if n.right is not None:
            stack.append(n.right)
        if n.left is not None:
            stack.append(n.left)


def _node_count(node) -> int:
    count = 0
    stack = [node] if node is not None else []
    while stack:
        n = stack.pop()
        count += 1
        if n.left is not None:
            stack.append(n.left)
        if n.right is not None:
            stack.append(n.right)
    return count


class PrefixMap:
    """Prefix-keyed map with LPM and containment queries, one trie per family.

    Single writer; ``snapshot()`` hands out an independent point-in-time view
    and costs O(1) regardless of size. The writer keeps a prefix -> node
    index so exact lookups and in-place value replacement skip the walk;
    snapshots drop the index and answer exact lookups by walking, keeping
    snapshot creation free of copying.
    """

    __slots__ = ("_root4", "_root6", "_count", "_epoch", "_index")

    def __init__(self):
        self._root4: Node | None = None
        self._root6: Node | None = None
        self._count = 0
        self._epoch = object()
        self._index: dict[Prefix, Node] | None = {}

    def __len__(self) -> int:
        return self._count

    def __contains__(self, prefix: Prefix) -> bool:
        return self.get(prefix) is not None

    def _root(self, family: int) -> Node | None:
        return self._root4 if family == 4 else self._root6

    def get(self, prefix: Prefix):
        index = self._index
        if index is not None:
            node = index.get(prefix)
            return node.value if node is not None else None
        if prefix.family == 4:
            return _get(self._root4, prefix.network, prefix.masklen, 32)
        return _get(self._root6, prefix.network, prefix.masklen, 128)

    def set(self, prefix: Prefix, value) -> Any:
        """Insert or replace; returns the previous value (None if new)."""
        if value is None:
            raise ValueError("None is reserved as the absent marker")
        index = self._index
        if index is not None:
            node = index.get(prefix)
            if node is not None and node.owner is self._epoch:
                old = node.value
                node.value = value
                return old
        if prefix.family == 4:
            self._root4, old, node = _upsert(
                self._root4, prefix.network, prefix.masklen, value, 32,
                self._epoch, index,
            )
        else:
            self._root6, old, node = _upsert(
                self._root6, prefix.network, prefix.masklen, value, 128,
                self._epoch, index,
            )
        if index is not None:
            index[prefix] = node
        if old is None:
            self._count += 1
        return old

    def delete(self, prefix: Prefix) -> Any:
        """Remove; returns the removed value (None if absent)."""
        index = self._index
        if index is not None and prefix not in index:
            return None
        if prefix.family == 4:
            self._root4, old = _remove(
                self._root4, prefix.network, prefix.masklen, 32, self._epoch, index
            )
        else:
            self._root6, old = _remove(
                self._root6, prefix.network, prefix.masklen, 128, self._epoch, index
            )
        if old is not None:
            if index is not None:
                del index[prefix]
            self._count -= 1
        return old

    def lpm(self, family: int, address: int):
        """Value of the longest installed prefix containing the address."""
        return _lpm(self._root(family), address, family_bits(family))

    def covering(self, prefix: Prefix) -> list:
        """Values of strict ancestors of the prefix, shortest mask first."""
        return _covering(
            self._root(prefix.family), prefix.network, prefix.masklen, prefix.width
        )

    def covering_last(self, prefix: Prefix):
        """Value of the nearest (longest-mask) strict ancestor, or None."""
        if prefix.family == 4:
            return _covering_last(self._root4, prefix.network, prefix.masklen, 32)
        return _covering_last(self._root6, prefix.network, prefix.masklen, 128)

    def covered(self, prefix: Prefix) -> list:
        """Values strictly inside the prefix, by (mask length, network)."""
        return _covered(
            self._root(prefix.family), prefix.network, prefix.masklen, prefix.width
        )

    def has_cover(self, prefix: Prefix) -> bool:
        """True when some installed prefix contains or equals this one."""
        return _has_cover(
            self._root(prefix.family), prefix.network, prefix.masklen, prefix.width
        )

    def intersecting(self, prefix: Prefix):
        """A value whose prefix contains, equals, or sits inside the query."""
        return _intersects(
            self._root(prefix.family), prefix.network, prefix.masklen, prefix.width
        )

    def values(self) -> Iterator[Any]:
        """All values, IPv4 before IPv6, in (network, masklen) order."""
        yield from _iter_values(self._root4)
        yield from _iter_values(self._root6)

    def node_count(self) -> int:
        return _node_count(self._root4) + _node_count(self._root6)

    def snapshot(self) -> "PrefixMap":
        view = PrefixMap.__new__(PrefixMap)
        view._root4 = self._root4
        view._root6 = self._root6
        view._count = self._count
        view._epoch = object()
        view._index = None  # snapshots answer exact lookups by walking
        # Rotate our token: everything currently reachable is now shared.
        self._epoch = object()
        return view
