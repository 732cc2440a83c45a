#!/usr/bin/env python3
"""
FeynLab Demo Script
Walks through graphs, kernels, one graph integral and one anomaly functional
"""

import sys
from pathlib import Path

sys.path.append(str(Path(__file__).resolve().parent / 'src'))


def check_dependencies():
    """Check that the numeric stack imports"""
    print("🔧 Checking FeynLab dependencies...")
    try:
        import networkx  # noqa: F401
        import numpy  # noqa: F401
        import pandas  # noqa: F401
        import scipy  # noqa: F401
        import sympy  # noqa: F401
        print("✅ All dependencies are installed")
        return True
    except ImportError as e:
        print(f"❌ Missing dependency: {e}")
        print("💡 Run 'python setup.py' first")
        return False


def demo_graphs():
    """Betti numbers, spanning trees and Laman verdicts"""
    print("🕸️ GRAPH DEMO")
    print("=" * 50)
    try:
        from data.graph_library import graph_names, get_graph
        from graphs.combinatorics import spanning_trees
        from graphs.decorated_graph import Signature, betti_1
        from graphs.laman import is_laman

        for name in graph_names():
            g = get_graph(name)
            laman = [str(sig) for sig in (Signature(1, 0), Signature(1, 1), Signature(0, 2), Signature(1, 2))
                     if is_laman(g, sig)]
            print(f"📊 {name}: |V|={g.vertex_count} |E|={g.edge_count} h1={betti_1(g)} "
                  f"trees={len(spanning_trees(g))} Laman at {', '.join(laman) or 'none'}")
    except Exception as e:
        print(f"❌ Error in graph demo: {e}")
    print()


def demo_kernels():
    """The regularized propagator approaching the Bochner-Martinelli kernel"""
    print("🔥 KERNEL DEMO")
    print("=" * 50)
    try:
        import numpy as np
        from graphs.decorated_graph import Signature
        from kernels.bochner_martinelli import bochner_martinelli_components, regularized_propagator_components
        from kernels.heat import SpacetimePoint

        sig = Signature(1, 1)
        p = SpacetimePoint((0.2 + 0.1j,), (0.15,))
        limit = bochner_martinelli_components(sig, p)
        for L in (1.0, 1e2, 1e4):
            regularized = regularized_propagator_components(sig, 1e-8, L, p, method="gamma")
            gap = np.max(np.abs(regularized - limit)) / np.max(np.abs(limit))
            print(f"📈 L={L:>8g}: relative distance to the BM kernel {gap:.2e}")
    except Exception as e:
        print(f"❌ Error in kernel demo: {e}")
    print()


def demo_integral():
    """W_0^L of the single edge at (1,1)"""
    print("∫ GRAPH INTEGRAL DEMO")
    print("=" * 50)
    try:
        from data.graph_library import single_edge
        from engine.integrals import w_0_L
        from engine.problem import GraphIntegralProblem, TestSource
        from graphs.decorated_graph import Signature
        from utils.config import QuadratureSpec

        sig = Signature(1, 1)
        g = single_edge()
        problem = GraphIntegralProblem(g, sig, TestSource.balanced(sig, g))
        result = w_0_L(problem, QuadratureSpec(nodes_per_axis=16))
        print(f"📊 W_0^L(single edge, {sig}) = {result.value:.8g} ± {result.error_estimate:.1e}")
    except Exception as e:
        print(f"❌ Error in integral demo: {e}")
    print()


def demo_anomaly():
    """O of the triangle at (1,1) vanishes (odd first Betti number)"""
    print("⚓ ANOMALY DEMO")
    print("=" * 50)
    try:
        from data.graph_library import triangle
        from engine.anomaly import anomaly_functional, anomaly_source
        from engine.problem import GraphIntegralProblem
        from graphs.decorated_graph import Signature

        sig = Signature(1, 1)
        g = triangle()
        result = anomaly_functional(GraphIntegralProblem(g, sig, anomaly_source(sig, g)))
        verdict = "zero" if result.details["is_zero"] else "nonzero"
        print(f"📊 O(triangle, {sig}) = {result.value:.3e} ± {result.error_estimate:.1e} ({verdict})")
    except Exception as e:
        print(f"❌ Error in anomaly demo: {e}")
    print()


def main():
    """Run all demos"""
    print("🚀 FEYNLAB FUNCTIONALITY DEMO")
    print("=" * 70)
    if not check_dependencies():
        return False
    print()
    demo_graphs()
    demo_kernels()
    demo_integral()
    demo_anomaly()
    print("🎉 DEMO COMPLETED!")
    print("📖 Next: python main.py verify --suite all")
    return True


if __name__ == "__main__":
    main()
