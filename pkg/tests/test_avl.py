import random
from fractions import Fraction

from tempval._avl import AVLTree


def test_empty_tree():
    tree: AVLTree[int, str] = AVLTree()
    assert len(tree) == 0
    assert tree.height() == 0
    assert list(tree.items()) == []
    assert tree.get(1) is None


def test_setdefault_keeps_first_value():
    tree: AVLTree[int, list[str]] = AVLTree()
    tree.setdefault(1, list).append("a")
    tree.setdefault(1, list).append("b")
    assert tree.get(1) == ["a", "b"]
    assert len(tree) == 1


def test_ascending_inserts_stay_balanced():
    tree: AVLTree[int, int] = AVLTree()
    for i in range(1023):
        tree.setdefault(i, lambda: 0)
    assert tree.height() == 10
    assert [k for k, _ in tree.items()] == list(range(1023))


def test_random_fraction_keys():
    rng = random.Random(7)
    keys = {Fraction(rng.randint(0, 10_000), rng.randint(1, 16)) for _ in range(2000)}
    tree: AVLTree[Fraction, Fraction] = AVLTree()
    for key in keys:
        tree.setdefault(key, lambda key=key: key * 2)
    assert len(tree) == len(keys)
    assert [k for k, _ in tree.items()] == sorted(keys)
    assert all(v == 2 * k for k, v in tree.items())
    # AVL height bound: below 1.45 log2(n + 2)
    assert tree.height() <= 1.45 * (len(keys) + 2).bit_length()


def test_get_finds_only_stored_keys():
    tree: AVLTree[int, str] = AVLTree()
    for key in (5, 1, 9, 3):
        tree.setdefault(key, lambda key=key: str(key))
    assert tree.get(3) == "3"
    assert tree.get(9) == "9"
    assert tree.get(4) is None
    assert tree.get(10) is None
    assert tree.get(0) is None


def test_ascending_runs_mixed_with_random_keys():
    rng = random.Random(3)
    tree: AVLTree[tuple[int, Fraction], int] = AVLTree()
    keys = set()
    for i in range(3000):
        key = (i, Fraction(i, 3)) if rng.random() < 0.7 else (rng.randint(0, 3000), Fraction(rng.randint(0, 9000), 3))
        keys.add(key)
        tree.setdefault(key, lambda: 0)
    assert len(tree) == len(keys)
    assert [k for k, _ in tree.items()] == sorted(keys)
    assert all(tree.get(k) == 0 for k in keys)
    assert tree.height() <= 1.45 * (len(keys) + 2).bit_length()


def test_ascending_inserts_update_largest_key():
    tree: AVLTree[int, list[int]] = AVLTree()
    tree.setdefault(10, list).append(1)
    tree.setdefault(5, list)
    tree.setdefault(10, list).append(2)
    tree.setdefault(11, list)
    assert [k for k, _ in tree.items()] == [5, 10, 11]
    assert tree.get(10) == [1, 2]
