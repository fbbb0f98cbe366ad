"""
Cluster command handler for behaviorprint
"""

from .common import formatter_from_args, pipeline_from_args


def handle_cluster(args):
    """Handle the cluster command: Ward dendrogram, cut and per-cluster frequencies"""
    pipeline = pipeline_from_args(args)
    pipeline.write_cluster()
    formatter_from_args(args).display_clusters(pipeline.cluster_report)
