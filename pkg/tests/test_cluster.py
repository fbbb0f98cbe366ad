import math

import numpy as np
import pandas as pd
import pytest
from ete3 import Tree
from scipy.cluster.hierarchy import linkage

from src.cluster import (
    Dendrogram, Merge, _check_monotone, cluster_report, cut_tree, to_dot, to_newick, ward_cluster,
    write_assignments, write_cluster_report,
)
from src.errors import ClusteringError, InsufficientDataError
from src.profiles import PatternProfile, PatternVocabulary


def profiles_from(points, prefix="u"):
    return [
        PatternProfile(f"{prefix}{i:02d}", np.atleast_1d(np.asarray(point, dtype=float)))
        for i, point in enumerate(points)
    ]


def brute_force_ward(profiles):
    """Merge the pair of clusters whose Ward cost is smallest, from centroids each step"""
    clusters = {frozenset([p.user_id]): p.weights for p in profiles}
    merges = []
    while len(clusters) > 1:
        best = None
        keys = sorted(clusters, key=sorted)
        for a_pos, a in enumerate(keys):
            for b in keys[a_pos + 1:]:
                n_a, n_b = len(a), len(b)
                gap = np.linalg.norm(clusters[a] - clusters[b])
                height = math.sqrt(2 * n_a * n_b / (n_a + n_b)) * gap
                if best is None or height < best[0]:
                    best = (height, a, b)
        height, a, b = best
        n_a, n_b = len(a), len(b)
        centroid = (n_a * clusters.pop(a) + n_b * clusters.pop(b)) / (n_a + n_b)
        clusters[a | b] = centroid
        merges.append((a | b, height))
    return merges


def test_three_points_on_a_line():
    tree = ward_cluster(profiles_from([0, 1, 10]))
    assert [m.size for m in tree.merges] == [2, 3]
    assert tree.merges[0].height == pytest.approx(1.0, abs=1e-12)
    assert tree.merges[1].height == pytest.approx(math.sqrt(361 / 3), abs=1e-9)
    assert tree.members(tree.root) == ["u00", "u01", "u02"]


def test_leaves_are_sorted_by_user_id():
    profiles = [PatternProfile("b", np.array([1.0])), PatternProfile("a", np.array([0.0]))]
    assert ward_cluster(profiles).leaves == ("a", "b")


def test_ties_merge_smallest_ids_first():
    tree = ward_cluster(profiles_from([0, 1, 2]))
    assert tree.merges[0] == Merge(0, 1, 1.0, 2)


def test_matches_brute_force_oracle():
    rng = np.random.default_rng(5)
    for _ in range(60):
        n = int(rng.integers(2, 9))
        profiles = profiles_from(rng.random((n, 4)))
        tree = ward_cluster(profiles)
        expected = brute_force_ward(profiles)
        actual = [
            (frozenset(tree.members(tree.n_leaves + step)), merge.height)
            for step, merge in enumerate(tree.merges)
        ]
        assert [members for members, _ in actual] == [members for members, _ in expected]
        assert [h for _, h in actual] == pytest.approx([h for _, h in expected], abs=1e-9)


def test_heights_match_scipy():
    rng = np.random.default_rng(8)
    for _ in range(20):
        points = rng.random((int(rng.integers(2, 25)), 5))
        tree = ward_cluster(profiles_from(points))
        reference = linkage(points, method="ward")
        assert [m.height for m in tree.merges] == pytest.approx(sorted(reference[:, 2]), abs=1e-9)


def test_heights_are_monotone():
    rng = np.random.default_rng(13)
    for _ in range(100):
        tree = ward_cluster(profiles_from(rng.dirichlet(np.ones(6), size=int(rng.integers(2, 31)))))
        heights = [m.height for m in tree.merges]
        assert all(later >= earlier - 1e-12 for earlier, later in zip(heights, heights[1:]))
        assert tree.merges[-1].size == tree.n_leaves


def test_cut_separates_planted_groups():
    for seed in range(50):
        rng = np.random.default_rng(seed)
        n_a, n_b = int(rng.integers(2, 10)), int(rng.integers(2, 10))
        group_a = profiles_from(rng.normal(0.0, 0.05, (n_a, 3)), prefix="a")
        group_b = profiles_from(rng.normal(5.0, 0.05, (n_b, 3)), prefix="b")
        assignment = cut_tree(ward_cluster(group_a + group_b), k=2)
        assert len({assignment[p.user_id] for p in group_a}) == 1
        assert len({assignment[p.user_id] for p in group_b}) == 1
        assert assignment[group_a[0].user_id] != assignment[group_b[0].user_id]


def test_input_order_does_not_change_assignments():
    rng = np.random.default_rng(21)
    for _ in range(20):
        n = int(rng.integers(3, 12))
        # integer grid points so that equal distances actually occur
        profiles = profiles_from(rng.integers(0, 3, (n, 2)))
        tree = ward_cluster(profiles)
        expected = [cut_tree(tree, k) for k in range(1, n + 1)]
        for _ in range(5):
            shuffled = [profiles[i] for i in rng.permutation(n)]
            shuffled_tree = ward_cluster(shuffled)
            assert shuffled_tree == tree
            assert [cut_tree(shuffled_tree, k) for k in range(1, n + 1)] == expected


def test_cut_numbers_largest_cluster_first():
    tree = ward_cluster(profiles_from([0, 0.1, 0.2, 10]))
    assert cut_tree(tree, 2) == {"u00": 1, "u01": 1, "u02": 1, "u03": 2}


def test_cut_extremes():
    tree = ward_cluster(profiles_from([0, 1, 10]))
    assert set(cut_tree(tree, 1).values()) == {1}
    assert sorted(cut_tree(tree, 3).values()) == [1, 2, 3]
    with pytest.raises(ClusteringError):
        cut_tree(tree, 0)
    with pytest.raises(ClusteringError):
        cut_tree(tree, 4)


def test_needs_two_profiles():
    with pytest.raises(InsufficientDataError):
        ward_cluster(profiles_from([0]))


def test_profiles_must_share_length():
    with pytest.raises(ClusteringError):
        ward_cluster([PatternProfile("a", np.array([1.0])), PatternProfile("b", np.array([0.5, 0.5]))])


def test_non_monotone_tree_is_rejected():
    with pytest.raises(ClusteringError):
        _check_monotone(Dendrogram(("a", "b", "c"), (Merge(0, 1, 2.0, 2), Merge(3, 2, 1.0, 3))))


def test_newick():
    tree = ward_cluster(profiles_from([0, 1, 10], prefix="s"))
    height = math.sqrt(361 / 3)
    assert to_newick(tree) == f"((s00:1.000000,s01:1.000000):{height - 1:.6f},s02:{height:.6f});\n"


def test_newick_quotes_awkward_names():
    profiles = [PatternProfile("user one", np.array([0.0])), PatternProfile("u2,b", np.array([1.0]))]
    text = to_newick(ward_cluster(profiles))
    assert text.endswith(";\n")
    parsed = Tree(text.strip(), format=5, quoted_node_names=True)
    assert sorted(name.strip("\"'") for name in parsed.get_leaf_names()) == ["u2,b", "user one"]
    assert [leaf.dist for leaf in parsed.get_leaves()] == [1.0, 1.0]


def test_dot():
    dot = to_dot(ward_cluster(profiles_from([0, 1, 10])))
    assert dot.startswith("digraph dendrogram {\n")
    assert dot.endswith("}\n")
    for edge in ("n3 -> n0;", "n3 -> n1;", "n4 -> n3;", "n4 -> n2;"):
        assert edge in dot
    assert 'n0 [label="u00"];' in dot


def test_cluster_report_means(tmp_path):
    vocab = PatternVocabulary((("p", "P"), ("f", "f")))
    profiles = [
        PatternProfile("a", np.array([0.9, 0.1])),
        PatternProfile("b", np.array([0.7, 0.3])),
        PatternProfile("c", np.array([0.1, 0.9])),
    ]
    assignment = cut_tree(ward_cluster(profiles), 2)
    report = cluster_report(assignment, profiles, vocab)

    assert [c.members for c in report.clusters] == [("a", "b"), ("c",)]
    assert report.clusters[0].mean_frequency == pytest.approx([0.8, 0.2])

    write_assignments(assignment, tmp_path / "assignments.csv")
    write_cluster_report(report, tmp_path / "cluster_report.csv")
    assert (tmp_path / "assignments.csv").read_text(encoding="utf-8") == "user_id,cluster\na,1\nb,1\nc,2\n"
    frame = pd.read_csv(tmp_path / "cluster_report.csv")
    assert list(frame.columns) == ["cluster", "pattern", "mean_frequency"]
    assert len(frame) == 4


def test_cluster_report_needs_every_assignment():
    profiles = profiles_from([0, 1])
    with pytest.raises(ClusteringError):
        cluster_report({"u00": 1}, profiles, PatternVocabulary((("p",),)))
