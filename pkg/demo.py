#!/usr/bin/env python3
"""
Sample script to demonstrate the graph cospectrality toolkit.
This script can be used for quick testing or demonstration purposes.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

try:
    from src.cospectrality import cospectrality, cs_closed_form
    from src.distance import sigma
    from src.family import build_graph, describe
    from src.spectrum import eigenvalues
    print("✓ Successfully imported the toolkit modules")
except ImportError as e:
    print(f"✗ Failed to import the toolkit modules: {e}")
    print("Make sure you have installed the required dependencies:")
    print("pip install -r requirements.txt")
    sys.exit(1)


def main():
    """Main demonstration function."""
    print("Graph Cospectrality Toolkit - Demo Script")
    print("=" * 50)

    try:
        star, square = build_graph("K1,3"), build_graph("K2,2")
        print(f"✓ Spectrum of K1,3: {[round(x, 6) for x in eigenvalues(star)]}")
        print(f"✓ Spectrum of K2,2: {[round(x, 6) for x in eigenvalues(square)]}")
        print(f"✓ sigma(K2,2, K1,3) = {sigma(square, star):.12f}")

        result = cospectrality(build_graph("E4"))
        labels = [describe(form.graph()) or str(form) for form in result.minimizers]
        print(f"✓ cs(E4) = {result.value:.12f}, minimizers: {', '.join(labels)}")

        closed = cs_closed_form("complete", 5)
        print(f"✓ Closed form cs(K5) = {closed.expression} ({len(closed.minimizers)} minimizers)")

        print("\nTo run a command, execute:")
        print("  python main.py cs K2+2*K1")

        print("\nTo run tests, execute:")
        print("  pytest")

    except Exception as e:
        print(f"✗ Error during demonstration: {e}")
        return 1

    return 0


if __name__ == "__main__":
    exit_code = main()
    sys.exit(exit_code)
