"""
Command-line interface for the cospectrality toolkit.

Exit codes: 0 success, 1 usage error, 2 runtime error (I/O, parsing or an
unsupported request), 3 verification counterexample. Data goes to stdout,
diagnostics and logs to stderr.
"""

import argparse
import logging
import sys
from typing import List, Optional, Sequence

from .cospectrality import DEFAULT_CHUNK_SIZE, comparison_table, cospectrality, rows_to_csv, rows_to_json
from .distance import Norm, distance
from .enumeration import enumerate_graphs, read_graph6_stream, write_graph6_stream
from .family import build_graph, describe
from .graph_core import Graph, graph6_decode, graph6_encode
from .spectrum import ConvergenceError, char_poly, eigenvalues
from .verification import VERIFIERS, verify

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2
EXIT_COUNTEREXAMPLE = 3

GRAPH6_PREFIX = "g6:"


class UsageError(Exception):
    """Raised by the argument parser instead of exiting."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def parse_graph(text: str) -> Graph:
    """A family expression, or a graph6 string prefixed with ``g6:``."""
    if text.startswith(GRAPH6_PREFIX):
        return graph6_decode(text[len(GRAPH6_PREFIX):])
    return build_graph(text)


def _edge_range(text: str):
    lo, sep, hi = text.partition(":")
    if not sep:
        return int(text)
    try:
        return (int(lo) if lo else None, int(hi) if hi else None)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected MIN:MAX, got {text!r}") from e


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="graph-cospectrality", description="Graph spectra, spectral distances and cospectrality.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    parser.add_argument("--jobs", type=_positive, default=1, help="worker threads")
    parser.add_argument("--chunk-size", type=_positive, default=DEFAULT_CHUNK_SIZE, help="graphs per solver batch")
    commands = parser.add_subparsers(dest="command", parser_class=_Parser)
    commands.required = True

    spectrum = commands.add_parser("spectrum", help="eigenvalues, descending")
    spectrum.add_argument("graph", help="family expression or g6:STRING")
    spectrum.add_argument("--exact-charpoly", action="store_true", help="also print the characteristic polynomial")

    dist = commands.add_parser("distance", help="spectral distance between two graphs")
    dist.add_argument("--norm", choices=[n.value for n in Norm], default="l1")
    dist.add_argument("a")
    dist.add_argument("b")

    cs = commands.add_parser("cs", help="brute-force cospectrality")
    cs.add_argument("graph")
    cs.add_argument("--norm", choices=[n.value for n in Norm], default="l1")
    cs.add_argument("--stream", metavar="FILE", help="graph6 file of candidates")
    cs.add_argument("--long-run", action="store_true", help="allow order 10")

    enum = commands.add_parser("enumerate", help="one graph per isomorphism class, graph6")
    enum.add_argument("--n", type=int, required=True)
    enum.add_argument("--edges", type=_edge_range, metavar="MIN:MAX")
    enum.add_argument("--out", metavar="FILE")
    enum.add_argument("--long-run", action="store_true", help="allow order 10")

    ver = commands.add_parser("verify", help="check a theorem over all graphs up to an order")
    ver.add_argument("--theorem", required=True, help=f"one of {', '.join(sorted(VERIFIERS))} or its descriptive name")
    ver.add_argument("--max-n", type=int, required=True)
    ver.add_argument("--long-run", action="store_true", help="raise the order ceiling by one")

    table = commands.add_parser("table", help="brute-force vs closed-form cs table")
    table.add_argument("--max-n", type=int, required=True)
    table.add_argument("--format", choices=["csv", "json"], default="csv")
    return parser


def _spectrum(args, out) -> int:
    g = parse_graph(args.graph)
    for value in eigenvalues(g):
        print(format(value, ".12g"), file=out)
    if args.exact_charpoly:
        p = char_poly(g)
        print("charpoly: " + " ".join(str(c) for c in reversed(p.coeffs)), file=out)
    return EXIT_OK


def _distance(args, out) -> int:
    print(format(distance(parse_graph(args.a), parse_graph(args.b), args.norm), ".12g"), file=out)
    return EXIT_OK


def _cs(args, out) -> int:
    g = parse_graph(args.graph)
    stream = read_graph6_stream(args.stream) if args.stream else None
    result = cospectrality(g, args.norm, stream=stream, jobs=args.jobs, chunk_size=args.chunk_size,
                           long_run=args.long_run)
    labels = []
    for form in result.minimizers:
        labels.append((str(form), describe(form.graph())))
    print(f"cs = {result.value:.12f}, minimizers: {', '.join(label or g6 for g6, label in labels)}", file=out)
    print(f"exact_zero = {str(result.exact_zero).lower()}", file=out)
    for g6, label in labels:
        print(f"{g6}\t{label or ''}".rstrip("\t"), file=out)
    return EXIT_OK


def _enumerate(args, out) -> int:
    stream = enumerate_graphs(args.n, args.edges, long_run=args.long_run)
    if args.out:
        count = write_graph6_stream(stream, args.out)
    else:
        count = 0
        for g in stream:
            print(graph6_encode(g).decode("ascii"), file=out)
            count += 1
    print(f"{count} graphs of order {args.n}", file=sys.stderr)
    return EXIT_OK


def _verify(args, out) -> int:
    report = verify(args.theorem, args.max_n, jobs=args.jobs, long_run=args.long_run)
    print(f"theorem: {report.theorem}", file=out)
    print(f"orders: {report.orders[0]}..{report.orders[-1]}", file=out)
    print(f"status: {report.status}", file=out)
    print(f"graphs_checked: {report.graphs_checked}", file=out)
    if report.witness:
        print(f"witness: {report.witness}", file=out)
    if report.details:
        print(f"details: {report.details}", file=out)
    return EXIT_OK if report.confirmed else EXIT_COUNTEREXAMPLE


def _table(args, out) -> int:
    rows = comparison_table(args.max_n, jobs=args.jobs, describe=describe)
    out.write(rows_to_csv(rows) if args.format == "csv" else rows_to_json(rows) + "\n")
    return EXIT_OK


COMMANDS = {
    "spectrum": _spectrum,
    "distance": _distance,
    "cs": _cs,
    "enumerate": _enumerate,
    "verify": _verify,
    "table": _table,
}


def run(argv: Optional[Sequence[str]] = None, out=None) -> int:
    """
    Run one command.

    Args:
        argv (Optional[Sequence[str]]): Arguments without the program name; ``sys.argv[1:]`` when None
        out: Text stream for data; stdout when None

    Returns:
        int: Exit code
    """
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(list(sys.argv[1:] if argv is None else argv))
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args, out)
    except (ValueError, OSError, ConvergenceError) as e:
        logger.debug(f"{args.command} failed", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


def main(argv: Optional[List[str]] = None) -> None:
    """Console entry point."""
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
