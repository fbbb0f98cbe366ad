"""
Ward clustering of user profiles for behaviorprint
Builds the merge tree, cuts it into k clusters and summarizes pattern
frequencies per cluster
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from ete3 import Tree
from scipy.spatial.distance import pdist, squareform

from .errors import ClusteringError, InsufficientDataError
from .profiles import PatternProfile, PatternVocabulary

logger = logging.getLogger(__name__)

HEIGHT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Merge:
    """Internal node; children are node ids (leaves 0..n-1, merge k is node n+k)"""
    left: int
    right: int
    height: float
    size: int


@dataclass(frozen=True)
class Dendrogram:
    leaves: Tuple[str, ...]
    merges: Tuple[Merge, ...]

    @property
    def n_leaves(self) -> int:
        return len(self.leaves)

    def node_height(self, node: int) -> float:
        return 0.0 if node < self.n_leaves else self.merges[node - self.n_leaves].height

    def members(self, node: int) -> List[str]:
        """Leaf names under a node, left to right"""
        if node < self.n_leaves:
            return [self.leaves[node]]
        merge = self.merges[node - self.n_leaves]
        return self.members(merge.left) + self.members(merge.right)

    @property
    def root(self) -> int:
        return self.n_leaves + len(self.merges) - 1 if self.merges else 0


def ward_cluster(profiles: Sequence[PatternProfile]) -> Dendrogram:
    """
    Agglomerative clustering with Ward linkage on Euclidean profile distances.

    Squared distances are updated with the Lance-Williams recurrence
    d2(k, i+j) = [(n_i+n_k) d2(i,k) + (n_j+n_k) d2(j,k) - n_k d2(i,j)] / (n_i+n_j+n_k)
    and merge heights are reported unsquared. Among equal distances the pair
    with the lexicographically smallest member ids merges first.
    """
    if len(profiles) < 2:
        raise InsufficientDataError(f"clustering needs at least 2 profiles, got {len(profiles)}")
    ordered = sorted(profiles, key=lambda p: p.user_id)
    if len({len(p.weights) for p in ordered}) != 1:
        raise ClusteringError("profiles have different lengths")

    n = len(ordered)
    d2 = squareform(pdist(np.vstack([p.weights for p in ordered]), metric="sqeuclidean"))

    # slot -> (node id, size, smallest member id); leaves are sorted so slot order is id order
    node = list(range(n))
    size = [1] * n
    first = [p.user_id for p in ordered]
    active = list(range(n))
    merges = []

    for step in range(n - 1):
        best = None
        for a_pos, a in enumerate(active):
            for b in active[a_pos + 1:]:
                key = (d2[a, b],) + tuple(sorted((first[a], first[b])))
                if best is None or key < best[0]:
                    best = (key, a, b)
        (dist2, _, _), i, j = best

        n_i, n_j = size[i], size[j]
        for k in active:
            if k in (i, j):
                continue
            n_k = size[k]
            value = ((n_i + n_k) * d2[i, k] + (n_j + n_k) * d2[j, k] - n_k * d2[i, j]) / (n_i + n_j + n_k)
            d2[i, k] = d2[k, i] = value

        left, right = sorted((i, j), key=lambda s: first[s])
        merges.append(Merge(node[left], node[right], float(np.sqrt(max(dist2, 0.0))), n_i + n_j))

        # the merged cluster reuses slot i
        node[i] = n + step
        size[i] = n_i + n_j
        first[i] = min(first[i], first[j])
        active.remove(j)

    tree = Dendrogram(tuple(p.user_id for p in ordered), tuple(merges))
    _check_monotone(tree)
    logger.info("ward clustering merged %d profiles, root height %.6f", n, merges[-1].height)
    return tree


def _check_monotone(tree: Dendrogram) -> None:
    heights = [m.height for m in tree.merges]
    for earlier, later in zip(heights, heights[1:]):
        if later < earlier - HEIGHT_TOLERANCE:
            raise ClusteringError(f"merge heights decrease: {earlier} then {later}")


def cut_tree(tree: Dendrogram, k: int) -> Dict[str, int]:
    """
    Undo the k-1 highest merges.

    Cluster 1 is the largest; equal sizes are ordered by their smallest member id.
    """
    n = tree.n_leaves
    if not 1 <= k <= n:
        raise ClusteringError(f"k must be in [1, {n}], got {k}")

    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    # merges are in non-decreasing height order, so the first n-k are the lowest
    for merge in tree.merges[:n - k]:
        parent[find(_leaf_index(tree, merge.right))] = find(_leaf_index(tree, merge.left))

    groups: Dict[int, List[str]] = {}
    for leaf in range(n):
        groups.setdefault(find(leaf), []).append(tree.leaves[leaf])

    ordered = sorted(groups.values(), key=lambda members: (-len(members), min(members)))
    return {user: index for index, members in enumerate(ordered, start=1) for user in members}


def _leaf_index(tree: Dendrogram, node: int) -> int:
    """Any leaf below a node"""
    while node >= tree.n_leaves:
        node = tree.merges[node - tree.n_leaves].left
    return node


@dataclass(frozen=True)
class ClusterSummary:
    index: int
    members: Tuple[str, ...]
    mean_frequency: np.ndarray


@dataclass(frozen=True)
class ClusterReport:
    patterns: Tuple[str, ...]
    clusters: Tuple[ClusterSummary, ...]


def cluster_report(
    assignment: Dict[str, int],
    profiles: Iterable[PatternProfile],
    vocab: PatternVocabulary,
) -> ClusterReport:
    """Mean profile vector of every cluster"""
    by_cluster: Dict[int, List[PatternProfile]] = {}
    for profile in profiles:
        if profile.user_id not in assignment:
            raise ClusteringError(f"user {profile.user_id} has no cluster assignment")
        by_cluster.setdefault(assignment[profile.user_id], []).append(profile)

    clusters = tuple(
        ClusterSummary(
            index=index,
            members=tuple(sorted(p.user_id for p in members)),
            mean_frequency=np.mean(np.vstack([p.weights for p in members]), axis=0),
        )
        for index, members in sorted(by_cluster.items())
    )
    return ClusterReport(tuple(vocab.names()), clusters)


NEWICK_SPECIAL = set(" ,;:()[]'\"\t")


def to_newick(tree: Dendrogram) -> str:
    """Newick text; branch lengths are height differences"""
    root = Tree()

    def attach(node: int, parent_height: float, parent: Tree) -> None:
        length = parent_height - tree.node_height(node)
        if node < tree.n_leaves:
            parent.add_child(name=tree.leaves[node], dist=length)
            return
        merge = tree.merges[node - tree.n_leaves]
        child = parent.add_child(dist=length)
        attach(merge.left, merge.height, child)
        attach(merge.right, merge.height, child)

    merge = tree.merges[tree.root - tree.n_leaves]
    attach(merge.left, merge.height, root)
    attach(merge.right, merge.height, root)

    quoted = any(NEWICK_SPECIAL & set(name) for name in tree.leaves)
    # format 5: leaf names plus every branch length, no internal labels
    return root.write(format=5, dist_formatter="%0.6f", quoted_node_names=quoted) + "\n"


def to_dot(tree: Dendrogram) -> str:
    """Graphviz digraph with one edge per parent-child link"""
    lines = ["digraph dendrogram {", "  node [shape=box];"]
    for leaf, name in enumerate(tree.leaves):
        escaped = name.replace('"', '\\"')
        lines.append(f'  n{leaf} [label="{escaped}"];')
    for step, merge in enumerate(tree.merges):
        node = tree.n_leaves + step
        lines.append(f'  n{node} [shape=point, xlabel="{merge.height:.6f}"];')
        lines.append(f"  n{node} -> n{merge.left};")
        lines.append(f"  n{node} -> n{merge.right};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_assignments(assignment: Dict[str, int], path: Union[str, Path]) -> None:
    frame = pd.DataFrame(sorted(assignment.items()), columns=["user_id", "cluster"])
    frame.to_csv(path, index=False, lineterminator="\n")


def write_cluster_report(report: ClusterReport, path: Union[str, Path]) -> None:
    """Long format cluster,pattern,mean_frequency"""
    rows = [
        (summary.index, pattern, value)
        for summary in report.clusters
        for pattern, value in zip(report.patterns, summary.mean_frequency)
    ]
    frame = pd.DataFrame(rows, columns=["cluster", "pattern", "mean_frequency"])
    frame.to_csv(path, index=False, float_format="%.10f", lineterminator="\n")
