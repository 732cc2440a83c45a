from typing import Optional, Tuple

from .decorated_graph import DecoratedGraph, Signature


def laman_slack(g: DecoratedGraph, sig: Signature, edge_subset=None) -> int:
    """(d+d')|V'| - (d+d'-1)|E'| - (d+d'+1) for the subgraph generated by edge_subset."""
    if edge_subset is None:
        vertices, edges = g.vertex_count, g.edge_count
    else:
        vertices, edges = len(g.vertices_of(edge_subset)), len(edge_subset)
    n = sig.total
    return n * vertices - (n - 1) * edges - (n + 1)


def laman_violation(g: DecoratedGraph, sig: Signature) -> Optional[Tuple[int, ...]]:
    """First edge subset (in size-then-lexicographic order) breaking the subgraph inequality."""
    for subset in g.edge_subsets():
        if len(g.vertices_of(subset)) < 2:
            continue
        if laman_slack(g, sig, subset) < 0:
            return subset
    return None


def is_laman(g: DecoratedGraph, sig: Signature) -> bool:
    g.require_no_self_loops()
    if laman_slack(g, sig) != 0:
        return False
    return laman_violation(g, sig) is None


def rank_vanishing_witness(g: DecoratedGraph, sig: Signature) -> Optional[Tuple[int, ...]]:
    """A connected subgraph whose Schwinger form degree exceeds its position degree.

    The integrand vanishes identically when such a subgraph exists.
    """
    for subset in g.edge_subsets():
        if not g.is_connected_subset(subset):
            continue
        if laman_slack(g, sig, subset) < 0:
            return subset
    return None
