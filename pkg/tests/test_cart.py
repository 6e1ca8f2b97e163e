import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from compdesign import cart
from compdesign.cart import Dataset, Internal, Leaf, RegressionTree, TreeConfig
from compdesign.cli import data_path
from compdesign.errors import ArityMismatch, DatasetTooSmall, InvariantViolation, ParseError
from oracles import exhaustive_best_split


@pytest.fixture(scope="module")
def cof_data():
    return cart.read_dataset(data_path("cof_micro.csv"))


@pytest.fixture(scope="module")
def cof_tree(cof_data):
    return cart.build_tree(cof_data)


def ds(X, y, names=None):
    X = np.asarray(X, dtype=float)
    names = names or tuple(f"x{i}" for i in range(X.shape[1]))
    return Dataset(tuple(names), X, np.asarray(y, dtype=float))


# --- best_split ----------------------------------------------------------------

def test_constant_targets_give_no_split():
    assert cart.best_split([[1], [2], [3]], [5.0, 5.0, 5.0]) is None


def test_step_function_split():
    X, y = [[1], [2], [3], [4]], [0, 0, 10, 10]
    f, t, score = cart.best_split(X, y)
    assert (f, t) == (0, 2.5)
    # all of the parent SSE (4 * 25) is removed
    assert score == pytest.approx(100.0)
    assert (f, t, score) == pytest.approx(exhaustive_best_split(X, y))


def test_only_informative_feature_chosen():
    X = [[0, 1], [0, 2], [0, 3], [0, 4]]
    assert cart.best_split(X, [1, 1, 9, 9])[0] == 1


def test_min_samples_leaf_respected():
    X, y = [[1], [2], [3], [4], [5]], [0, 0, 0, 0, 100]
    f, t, _ = cart.best_split(X, y, TreeConfig(min_samples_leaf=2))
    assert t == 3.5


def test_tie_goes_to_lowest_feature_then_threshold():
    # both features give the same partition
    X = [[1, 1], [2, 2], [3, 3], [4, 4]]
    assert cart.best_split(X, [0, 0, 1, 1])[:2] == (0, 2.5)
    # symmetric targets: thresholds 1.5 and 3.5 tie, 1.5 wins
    assert cart.best_split([[1], [2], [3], [4]], [5, 0, 0, 5])[1] == 1.5


def test_best_split_matches_exhaustive_oracle():
    r = np.random.Generator(np.random.PCG64(99))
    for _ in range(200):
        n, m = int(r.integers(2, 31)), int(r.integers(1, 4))
        X = r.integers(0, 6, (n, m)).astype(float) if r.random() < 0.5 else r.random((n, m))
        y = r.integers(0, 4, n).astype(float) if r.random() < 0.3 else r.normal(size=n)
        leaf = int(r.integers(1, 4))
        got = cart.best_split(X, y, TreeConfig(min_samples_leaf=leaf))
        want = exhaustive_best_split(X, y, leaf)
        if want is None:
            assert got is None
        else:
            assert got[:2] == want[:2]
            assert got[2] == pytest.approx(want[2], rel=1e-9, abs=1e-12)


# --- build / predict ----------------------------------------------------------------

def test_cof_tree_paths(cof_tree):
    assert f"{cart.predict(cof_tree, (4.0, 2.0)):.5f}" == "0.51733"
    assert f"{cart.predict(cof_tree, (8.0, 8.0)):.5f}" == "0.44189"
    root = cof_tree.root
    assert isinstance(root, Internal) and cof_tree.feature_names[root.feature] == "b4c"
    assert root.threshold == 3.0 and isinstance(root.left, Leaf) and root.left.value == pytest.approx(0.51733)


def test_cof_tree_load_rule(cof_tree):
    # every point with load >= 6 and b4c > 5 lands in the 0.44189 leaf
    for load in (6.0, 7.5, 10.0):
        for b4c in (5.01, 6.0, 8.0):
            assert cart.predict(cof_tree, (load, b4c)) == pytest.approx(0.44189, abs=1e-12)


def test_depth_zero_is_global_mean(cof_data):
    tree = cart.build_tree(cof_data, TreeConfig(max_depth=0))
    assert isinstance(tree.root, Leaf)
    assert tree.root.value == pytest.approx(cof_data.y.mean(), abs=1e-12)
    assert cart.predict(tree, (1.0, 1.0)) == tree.root.value


def test_too_small():
    with pytest.raises(DatasetTooSmall):
        cart.build_tree(ds(np.empty((0, 2)), []))
    with pytest.raises(DatasetTooSmall):
        cart.build_tree(ds([[1.0], [2.0], [3.0]], [1, 2, 3]), TreeConfig(min_samples_leaf=2))


def test_arity_mismatch(cof_tree):
    with pytest.raises(ArityMismatch):
        cart.predict(cof_tree, (1.0,))


def leaf_invariants(tree, X, y):
    """Every leaf's value is the mean of the training targets routed to it."""
    routed: dict[int, list[float]] = {}
    for x, t in zip(X, y):
        node = tree.root
        while isinstance(node, Internal):
            node = node.left if x[node.feature] < node.threshold else node.right
        routed.setdefault(id(node), []).append(t)
    for leaf in tree.leaves():
        targets = routed[id(leaf)]
        assert leaf.n == len(targets) >= tree.config.min_samples_leaf
        assert abs(leaf.value - np.mean(targets)) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 25), st.integers(1, 3), st.integers(0, 6), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_tree_invariants(n, m, depth, leaf, seed):
    r = np.random.Generator(np.random.PCG64(seed))
    X, y = r.integers(0, 5, (n, m)).astype(float), r.normal(size=n)
    if n < 2 * leaf:
        return
    tree = cart.build_tree(ds(X, y), TreeConfig(max_depth=depth, min_samples_leaf=leaf))
    assert tree.depth() <= depth
    leaf_invariants(tree, X, y)


def test_deep_tree_interpolates_unique_rows():
    r = np.random.Generator(np.random.PCG64(8))
    X = r.random((30, 3))
    y = r.normal(size=30)
    tree = cart.build_tree(ds(X, y), TreeConfig(max_depth=30))
    assert [cart.predict(tree, x) for x in X] == y.tolist()


def test_training_error_non_increasing_in_depth():
    r = np.random.Generator(np.random.PCG64(9))
    X, y = r.random((40, 2)), r.normal(size=40)
    errors = [np.mean((cart.predict_many(cart.build_tree(ds(X, y), TreeConfig(max_depth=d)), X) - y) ** 2)
              for d in range(8)]
    assert all(b <= a + 1e-12 for a, b in zip(errors, errors[1:]))


def test_permutation_invariance():
    r = np.random.Generator(np.random.PCG64(10))
    X, y = r.random((25, 2)), r.normal(size=25)
    perm = r.permutation(25)
    a = cart.build_tree(ds(X, y))
    b = cart.build_tree(ds(X[perm], y[perm]))
    grid = r.random((200, 2))
    assert cart.predict_many(a, grid) == pytest.approx(cart.predict_many(b, grid), abs=1e-12)


# --- rendering and files ----------------------------------------------------------

def test_render_single_leaf_and_depth_one():
    single = RegressionTree(Leaf(0.5, 3), ("x",))
    assert cart.render_tree_text(single) == "predict = 0.50000 (n=3)\n"
    stump = RegressionTree(Internal(0, 1.5, Leaf(0.0, 1), Leaf(1.0, 1)), ("x",))
    assert cart.render_tree_text(stump).splitlines() == [
        "x < 1.500", "  predict = 0.00000 (n=1)", "  predict = 1.00000 (n=1)"]


def test_render_bundled_cof(cof_tree):
    text = cart.render_tree_text(cof_tree)
    assert "b4c < 3.000" in text.splitlines()
    assert text == cart.render_tree_text(cof_tree)


def test_round_trip(cof_tree, cof_data, tmp_path):
    path = tmp_path / "tree.json"
    cart.save_tree(cof_tree, path)
    loaded = cart.load_tree(path)
    assert loaded == cof_tree
    for x in cof_data.X:
        assert cart.predict(loaded, x) == cart.predict(cof_tree, x)


def test_round_trip_exact_floats(tmp_path):
    tree = RegressionTree(Internal(0, 0.1 + 0.2, Leaf(1 / 3, 2), Leaf(np.pi, 1)), ("x",))
    cart.save_tree(tree, tmp_path / "t.json")
    assert cart.load_tree(tmp_path / "t.json") == tree


def test_corrupted_tree_files(cof_tree, tmp_path):
    doc = cart.tree_to_dict(cof_tree)
    del doc["root"]["right"]
    (tmp_path / "a.json").write_text(json.dumps(doc))
    with pytest.raises(ParseError):
        cart.load_tree(tmp_path / "a.json")

    doc = cart.tree_to_dict(cof_tree)
    doc["root"]["left"]["n"] = 0
    (tmp_path / "b.json").write_text(json.dumps(doc))
    with pytest.raises(InvariantViolation):
        cart.load_tree(tmp_path / "b.json")

    (tmp_path / "c.json").write_text("{")
    with pytest.raises(ParseError):
        cart.load_tree(tmp_path / "c.json")


def test_read_dataset_validation(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("load,b4c,target\n1,2,0.5\n3,x,0.4\n")
    with pytest.raises(ParseError):
        cart.read_dataset(p)
    p.write_text("load,b4c,y\n1,2,0.5\n")
    with pytest.raises(ParseError):
        cart.read_dataset(p)
    p.write_text("load,b4c,target\n1,2,0.5\n4,5,0.25\n")
    d = cart.read_dataset(p)
    assert d.feature_names == ("load", "b4c") and d.y.tolist() == [0.5, 0.25]
