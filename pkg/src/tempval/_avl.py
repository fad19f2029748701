from __future__ import annotations

from typing import Any, Callable, Generic, Iterator, Optional, Protocol, TypeVar

__all__ = ("AVLTree",)


class _Comparable(Protocol):
    def __lt__(self, other: Any, /) -> bool: ...


K = TypeVar("K", bound=_Comparable)
V = TypeVar("V")


class _Node(Generic[K, V]):
    __slots__ = ("key", "val", "left", "right", "height")

    def __init__(self, key: K, val: V) -> None:
        self.key = key
        self.val = val
        self.left: Optional[_Node[K, V]] = None
        self.right: Optional[_Node[K, V]] = None
        self.height = 1


def _height(node: Optional[_Node[K, V]]) -> int:
    return node.height if node is not None else 0


def _update(node: _Node[K, V]) -> None:
    node.height = 1 + max(_height(node.left), _height(node.right))


def _rotate_right(node: _Node[K, V]) -> _Node[K, V]:
    pivot = node.left
    assert pivot is not None
    node.left = pivot.right
    pivot.right = node
    _update(node)
    _update(pivot)
    return pivot


def _rotate_left(node: _Node[K, V]) -> _Node[K, V]:
    pivot = node.right
    assert pivot is not None
    node.right = pivot.left
    pivot.left = node
    _update(node)
    _update(pivot)
    return pivot


def _rebalance(node: _Node[K, V]) -> _Node[K, V]:
    _update(node)
    balance = _height(node.left) - _height(node.right)
    if balance > 1:
        assert node.left is not None
        if _height(node.left.left) < _height(node.left.right):
            node.left = _rotate_left(node.left)
        return _rotate_right(node)
    if balance < -1:
        assert node.right is not None
        if _height(node.right.right) < _height(node.right.left):
            node.right = _rotate_right(node.right)
        return _rotate_left(node)
    return node


class AVLTree(Generic[K, V]):
    """A height-balanced binary search tree mapping ordered keys to values.

    Only insertion and lookup are supported; iteration yields items in ascending key order. Keys larger than every
    stored key are appended along the right spine without comparisons, so ascending insertion stays cheap.
    """

    def __init__(self) -> None:
        self._root: Optional[_Node[K, V]] = None
        self._max: Optional[_Node[K, V]] = None
        self._len = 0

    def __len__(self) -> int:
        return self._len

    def _find(self, key: K) -> Optional[_Node[K, V]]:
        # one comparison per level; equality is settled once at the bottom
        node, candidate = self._root, None
        while node is not None:
            if key < node.key:
                node = node.left
            else:
                candidate = node
                node = node.right
        if candidate is not None and not candidate.key < key:
            return candidate
        return None

    def get(self, key: K) -> Optional[V]:
        node = self._find(key)
        return node.val if node is not None else None

    def setdefault(self, key: K, default: Callable[[], V]) -> V:
        """Returns the value stored under `key`, first inserting `default()` if the key is absent."""
        appending = self._max is None or self._max.key < key
        path: list[tuple[_Node[K, V], bool]] = []
        node = self._root
        if appending:
            while node is not None:
                path.append((node, False))
                node = node.right
        else:
            candidate = None
            while node is not None:
                went_left = key < node.key
                path.append((node, went_left))
                if went_left:
                    node = node.left
                else:
                    candidate = node
                    node = node.right
            if candidate is not None and not candidate.key < key:
                return candidate.val

        new = _Node(key, default())
        self._len += 1
        if appending:
            self._max = new
        child = new
        for parent, went_left in reversed(path):
            if went_left:
                parent.left = child
            else:
                parent.right = child
            height = parent.height
            child = _rebalance(parent)
            if child is parent and child.height == height:
                # subtree height unchanged: nothing above needs rebalancing
                return new.val
        self._root = child
        return new.val

    def items(self) -> Iterator[tuple[K, V]]:
        stack: list[_Node[K, V]] = []
        node = self._root
        while stack or node is not None:
            while node is not None:
                stack.append(node)
                node = node.left
            node = stack.pop()
            yield node.key, node.val
            node = node.right

    def height(self) -> int:
        return _height(self._root)
