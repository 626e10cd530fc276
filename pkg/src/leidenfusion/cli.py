"""Command-line front end.

Exit codes: 0 ok, 1 unreadable input, 2 bad flags, 3 disconnected input or
too few components to fuse, 4 Leiden found fewer than k communities,
5 partition file does not match the graph.
"""

from __future__ import annotations

import argparse
import logging
import sys
from contextlib import contextmanager

from . import __version__
from .baselines import LpaConfig, lpa_partition, random_partition
from .export import MODES, export, write_bundle
from .fusion import (DisconnectedBlockError, FusionConfig, InsufficientCommunitiesError, fuse,
                     lf_partition, split_into_components)
from .graph import DisconnectedGraphError, Graph, GraphFormatError, is_connected, load_edge_list
from .metrics import metrics_report
from .partition import Partition, PartitionFileError, format_partition, read_partition_file

log = logging.getLogger("leidenfusion")

EXIT_INPUT = 1
EXIT_USAGE = 2
EXIT_DISCONNECTED = 3
EXIT_TOO_FEW = 4
EXIT_PARTITION_FILE = 5


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _non_negative_float(text: str) -> float:
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _unit_float(text: str) -> float:
    value = float(text)
    if not 0 < value <= 1:
        raise argparse.ArgumentTypeError("must be in (0, 1]")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leidenfusion",
        description="Connected k-way graph partitioning (size-capped Leiden + greedy fusion), "
                    "baselines, quality metrics and subgraph export.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("partition", help="partition a graph into k blocks")
    p.add_argument("--input", required=True, help="edge list ('u v' or 'u v w' per line)")
    p.add_argument("--k", required=True, type=_positive_int, help="number of blocks")
    p.add_argument("--method", required=True, choices=("lf", "lpa", "random"))
    p.add_argument("--alpha", type=_non_negative_float, default=0.05,
                   help="block size slack (default 0.05)")
    p.add_argument("--beta", type=_unit_float, default=0.5,
                   help="Leiden community cap as a fraction of the block cap (default 0.5)")
    p.add_argument("--gamma", type=_positive_float, default=1.0,
                   help="modularity resolution (default 1.0)")
    p.add_argument("--seed", type=int, default=42, help="RNG seed (default 42)")
    p.add_argument("--max-iters", type=_positive_int, default=100,
                   help="label propagation sweep budget (default 100)")
    p.add_argument("--output", required=True, help="partition file to write")
    p.add_argument("--metrics", help="write the metrics report here instead of stdout")

    f = sub.add_parser("fuse", help="fuse an existing partition into k connected blocks")
    f.add_argument("--input", required=True, help="edge list")
    f.add_argument("--partitions", required=True, help="partition file ('node_id block_id')")
    f.add_argument("--k", required=True, type=_positive_int)
    f.add_argument("--alpha", type=_non_negative_float, default=0.05)
    f.add_argument("--output", required=True, help="partition file to write")

    m = sub.add_parser("metrics", help="quality metrics of a partition")
    m.add_argument("--input", required=True)
    m.add_argument("--partitions", required=True)
    m.add_argument("--mode", choices=MODES,
                   help="also report the replication factor of this export mode")
    m.add_argument("--output", help="report file (default: stdout)")

    e = sub.add_parser("export", help="write per-partition subgraphs")
    e.add_argument("--input", required=True)
    e.add_argument("--partitions", required=True)
    e.add_argument("--mode", choices=MODES, default="inner")
    e.add_argument("--output", required=True, help="directory for the bundle")
    return parser


@contextmanager
def _errors():
    try:
        yield
    except OSError as exc:
        raise CliError(str(exc), EXIT_INPUT) from exc
    except GraphFormatError as exc:
        raise CliError(f"bad edge list: {exc}", EXIT_INPUT) from exc
    except PartitionFileError as exc:
        raise CliError(f"bad partition file: {exc}", EXIT_PARTITION_FILE) from exc
    except (DisconnectedGraphError, DisconnectedBlockError) as exc:
        raise CliError(str(exc), EXIT_DISCONNECTED) from exc


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load(args) -> Graph:
    g = load_edge_list(args.input)
    log.info("loaded %s from %s", g, args.input)
    return g


def cmd_partition(args) -> int:
    with _errors():
        g = _load(args)
        if args.method == "lf":
            try:
                p = lf_partition(g, FusionConfig(args.k, alpha=args.alpha, beta=args.beta,
                                                 seed=args.seed, resolution=args.gamma))
            except InsufficientCommunitiesError as exc:
                raise CliError(str(exc), EXIT_TOO_FEW) from exc
        elif args.method == "lpa":
            p = lpa_partition(g, LpaConfig(args.k, max_iters=args.max_iters, seed=args.seed))
        else:
            p = random_partition(g, args.k, seed=args.seed)
        empty = int((p.sizes == 0).sum())
        if empty:
            log.warning("%s left %d of %d blocks empty", args.method, empty, args.k)
        p = p.canonical()
        _write(args.output, format_partition(g, p))
        _write(args.metrics, metrics_report(g, p).to_text())
    return 0


def cmd_fuse(args) -> int:
    with _errors():
        g = _load(args)
        if not is_connected(g):
            raise CliError("input graph is disconnected", EXIT_DISCONNECTED)
        initial = read_partition_file(g, args.partitions)
        pieces = split_into_components(g, initial)
        log.info("%d input blocks split into %d connected pieces",
                 initial.block_count, pieces.block_count)
        if pieces.block_count < args.k:
            raise CliError(f"only {pieces.block_count} connected pieces, fewer than k={args.k}",
                           EXIT_DISCONNECTED)
        p = fuse(g, pieces, FusionConfig(args.k, alpha=args.alpha)).canonical()
        _write(args.output, format_partition(g, p))
    return 0


def _load_pair(args) -> tuple[Graph, Partition]:
    g = _load(args)
    return g, read_partition_file(g, args.partitions)


def cmd_metrics(args) -> int:
    with _errors():
        g, p = _load_pair(args)
        bundle = export(g, p, args.mode) if args.mode else None
        _write(args.output, metrics_report(g, p, bundle).to_text())
    return 0


def cmd_export(args) -> int:
    with _errors():
        g, p = _load_pair(args)
        dirs = write_bundle(export(g, p, args.mode), args.output)
        log.info("wrote %d %s subgraphs to %s", len(dirs), args.mode, args.output)
    return 0


COMMANDS = {
    "partition": cmd_partition,
    "fuse": cmd_fuse,
    "metrics": cmd_metrics,
    "export": cmd_export,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"leidenfusion {args.command}: {exc}", file=sys.stderr)
        return exc.code
    except ValueError as exc:
        print(f"leidenfusion {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
