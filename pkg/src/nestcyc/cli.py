"""Command-line front end.

Exit codes: 0 success or PASS, 1 clean negative, 2 input error, 3 internal error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

from .assembler import PipelineConfig, run_pipeline
from .expander import ExpanderParams, ExtractionError, extract_expander_subgraph
from .generators import generate_graph
from .graph import GraphError, average_degree, format_edge_list, read_edge_list
from .io import atomic_write_text, dumps, graph_hash
from .kraken import KrakenError, build_kraken, default_kraken_params
from .records import SCHEMA_VERSION, CertificateRecord, RecordError, check_certificate
from .verify import SearchCaps, extremal_scan, oracle_find_nested_pair

OK, NEGATIVE, INPUT_ERROR, INTERNAL_ERROR = 0, 1, 2, 3

log = logging.getLogger("nestcyc")


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(f"{self.prog}: {message}")


def _u64(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _pos_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _graph_source(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--gen", metavar="SPEC", help="generator, e.g. complete:20, gnp:200:0.05, regular:100:8")
    src.add_argument("--in", dest="infile", metavar="PATH", help="edge-list file")
    p.add_argument("--seed", type=_u64, default=0)


def _expander_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--eps1", type=float, default=0.1)
    p.add_argument("--k", type=float, default=None, help="defaults to eps1 * d(G)")
    p.add_argument("--budget", type=_pos_int, default=200_000, help="violator search budget")


def _kraken_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--hub-threshold", type=float, default=None)
    p.add_argument("--blob-size", type=_pos_int, default=None)
    p.add_argument("--max-arm-len", type=_pos_int, default=None)
    p.add_argument("--separation", type=_pos_int, default=None)


def _caps_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--caps", metavar="K=V[,K=V]", default=None,
                   help="max_cycles, max_cycle_length, time_budget")
    p.add_argument("--max-cycles", type=_pos_int, default=None)
    p.add_argument("--max-cycle-length", type=int, default=None)
    p.add_argument("--time-budget", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nestcyc", description="Nested cycles without crossings: construction and checking.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="write a generated graph as an edge list")
    _graph_source(p)
    p.add_argument("--out")

    p = sub.add_parser("extract", help="extract an expanding subgraph")
    _graph_source(p)
    _expander_flags(p)
    p.add_argument("--out")
    p.add_argument("--subgraph-out", metavar="PATH", help="also write H as an edge list")

    p = sub.add_parser("kraken", help="build a kraken directly in the input graph")
    _graph_source(p)
    _expander_flags(p)
    _kraken_flags(p)
    p.add_argument("--out")

    p = sub.add_parser("pipeline", help="full construction with certificate")
    _graph_source(p)
    _expander_flags(p)
    _kraken_flags(p)
    p.add_argument("--no-ladder", action="store_true", help="only try the configured kraken parameters")
    p.add_argument("--timings", action="store_true", help="record wall-clock seconds (not reproducible)")
    p.add_argument("--out")

    p = sub.add_parser("verify", help="check a certificate against a graph")
    p.add_argument("graph")
    p.add_argument("cert")
    p.add_argument("--out")

    p = sub.add_parser("oracle", help="brute-force search for a nested pair")
    _graph_source(p)
    _caps_flags(p)
    p.add_argument("--out")

    p = sub.add_parser("scan", help="small-n extremal scan over G(n, m)")
    p.add_argument("--n", type=_pos_int, required=True)
    p.add_argument("--m", dest="m_range", required=True, metavar="A:B|A,B,...", help="edge counts (A:B inclusive)")
    p.add_argument("--samples", type=_pos_int, default=10)
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--jobs", type=_pos_int, default=1)
    _caps_flags(p)
    p.add_argument("--csv")
    p.add_argument("--out")
    return parser


def _load_graph(args):
    if args.gen is not None:
        return generate_graph(args.gen, args.seed)
    return read_edge_list(args.infile)


def _caps(args) -> SearchCaps:
    vals: dict = {}
    if args.caps:
        for item in args.caps.split(","):
            key, sep, val = item.partition("=")
            key = key.strip().replace("-", "_")
            if not sep or key not in ("max_cycles", "max_cycle_length", "time_budget"):
                raise InputError(f"bad --caps entry {item!r}")
            try:
                vals[key] = float(val) if key == "time_budget" else int(val)
            except ValueError:
                raise InputError(f"bad --caps value {item!r}") from None
    for key in ("max_cycles", "max_cycle_length", "time_budget"):
        v = getattr(args, key)
        if v is not None:
            vals[key] = v
    try:
        return SearchCaps(**vals)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _m_values(text: str) -> list[int]:
    try:
        if ":" in text:
            a, b = text.split(":")
            return list(range(int(a), int(b) + 1))
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise InputError(f"bad edge-count range {text!r}") from None


def _emit(args, payload: dict) -> None:
    text = dumps(payload)
    if getattr(args, "out", None):
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)


def _source_json(args) -> dict:
    if getattr(args, "gen", None) is not None:
        return {"gen": args.gen, "seed": args.seed}
    return {"in": args.infile}


def _params(args, G) -> ExpanderParams:
    d = float(average_degree(G)) if G.n else 0.0
    k = args.k if args.k is not None else (args.eps1 * d if d > 0 else 1.0)
    try:
        return ExpanderParams(args.eps1, k)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_gen(args) -> int:
    G = _load_graph(args)
    text = format_edge_list(G)
    if args.out:
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return OK


def cmd_extract(args) -> int:
    G = _load_graph(args)
    p = _params(args, G)
    payload = {"schema_version": SCHEMA_VERSION, "command": "extract", "source": _source_json(args),
               "graph": {"hash": graph_hash(G), "n": G.n, "m": G.m},
               "params": {"eps1": p.eps1, "k": p.k, "budget": args.budget}}
    try:
        H, rep = extract_expander_subgraph(G, p, args.budget)
    except ExtractionError as exc:
        payload["failure"] = {"message": str(exc), "trace": exc.trace}
        _emit(args, payload)
        return NEGATIVE
    payload["report"] = rep.to_json()
    payload["labels"] = list(rep.labels)
    if args.subgraph_out:
        atomic_write_text(args.subgraph_out, format_edge_list(H))
    _emit(args, payload)
    return OK


def cmd_kraken(args) -> int:
    G = _load_graph(args)
    p = _params(args, G)
    try:
        P = default_kraken_params(G, p, hub_threshold=args.hub_threshold, blob_size=args.blob_size,
                                  max_arm_len=args.max_arm_len, separation=args.separation)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    payload = {"schema_version": SCHEMA_VERSION, "command": "kraken", "source": _source_json(args),
               "graph": {"hash": graph_hash(G), "n": G.n, "m": G.m},
               "params": {"eps1": p.eps1, "k": p.k, "kraken": P.to_json()}}
    try:
        K, rep = build_kraken(G, p, P)
    except KrakenError as exc:
        payload["failure"] = {"kind": exc.kind, "message": str(exc)}
        _emit(args, payload)
        return NEGATIVE
    payload["kraken"] = K.to_json()
    payload["report"] = {k: rep[k] for k in ("case", "side_condition", "hubs", "cycle")}
    _emit(args, payload)
    return OK


def cmd_pipeline(args) -> int:
    G = _load_graph(args)
    if not 0 < args.eps1 <= 1:
        raise InputError("--eps1 must lie in (0, 1]")
    if args.k is not None and args.k <= 0:
        raise InputError("--k must be positive")
    cfg = PipelineConfig(eps1=args.eps1, k=args.k, budget=args.budget, hub_threshold=args.hub_threshold,
                         blob_size=args.blob_size, max_arm_len=args.max_arm_len, separation=args.separation,
                         ladder=not args.no_ladder, timings=args.timings)
    config = dict(cfg.to_json(), source=_source_json(args))
    result = run_pipeline(G, cfg)
    record = CertificateRecord.from_pipeline(G, config, result)
    _emit(args, record.to_json())
    return OK if result.ok else NEGATIVE


def cmd_verify(args) -> int:
    G = read_edge_list(args.graph)
    try:
        with open(args.cert, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {args.cert}: {exc.strerror}") from None
    out = check_certificate(G, text)
    _emit(args, out)
    return OK if out["verdict"]["passed"] else NEGATIVE


def cmd_oracle(args) -> int:
    G = _load_graph(args)
    caps = _caps(args)
    res = oracle_find_nested_pair(G, caps)
    payload = {"schema_version": SCHEMA_VERSION, "command": "oracle", "source": _source_json(args),
               "graph": {"hash": graph_hash(G), "n": G.n, "m": G.m},
               "caps": {"max_cycles": caps.max_cycles, "max_cycle_length": caps.max_cycle_length,
                        "time_budget": caps.time_budget}}
    payload.update(res.to_json())
    _emit(args, payload)
    return OK if res.pair is not None else NEGATIVE


def cmd_scan(args) -> int:
    caps = _caps(args)
    try:
        table = extremal_scan(args.n, _m_values(args.m_range), args.samples, caps, seed=args.seed, jobs=args.jobs)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if args.csv:
        atomic_write_text(args.csv, table.to_csv())
    payload = {"schema_version": SCHEMA_VERSION, "command": "scan", "n": args.n, "samples": args.samples,
               "seed": args.seed}
    payload.update(table.to_json())
    if args.out or not args.csv:
        _emit(args, payload)
    return OK


COMMANDS = {
    "gen": cmd_gen,
    "extract": cmd_extract,
    "kraken": cmd_kraken,
    "pipeline": cmd_pipeline,
    "verify": cmd_verify,
    "oracle": cmd_oracle,
    "scan": cmd_scan,
}


def cli_run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except InputError as exc:
        print(exc, file=sys.stderr)
        return INPUT_ERROR
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return COMMANDS[args.command](args)
    except (InputError, GraphError, RecordError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except Exception as exc:  # invariant violations and bugs
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return INTERNAL_ERROR


def main() -> None:
    sys.exit(cli_run())


if __name__ == "__main__":
    main()
