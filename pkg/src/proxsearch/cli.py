"""Command-line interface: build, search, bench, stats, oracle-check."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
import time
from pathlib import Path

from . import kernels
from .bench import CorpusSpec, generate_corpus, generate_queries, run_benchmark, BenchMismatch
from .index.build import FAMILIES, FAMILY_FILES, IndexConfig, build_index
from .index.format import IndexFormatError
from .index.reader import Index
from .lexicon import Dictionary, LexiconConfig
from .query.engine import ENGINES, QueryConfig, evaluate_pair_path, evaluate_query, evaluate_subquery
from .query.keys import QueryError, Subquery, lemma_ids
from .query.oracle import OracleCorpus, brute_force_search

EXIT_OK, EXIT_EMPTY, EXIT_USAGE, EXIT_DATA, EXIT_DIVERGENCE = 0, 1, 2, 3, 4

log = logging.getLogger("proxsearch")


class UsageError(Exception):
    pass


def _families(value: str) -> tuple[str, ...]:
    names = tuple(dict.fromkeys(v.strip() for v in value.split(",") if v.strip()))
    bad = [n for n in names if n not in FAMILIES]
    if bad or not names:
        raise argparse.ArgumentTypeError(f"families must be drawn from {','.join(FAMILIES)}")
    return names


def _positive(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _non_negative(value: str) -> int:
    n = int(value)
    if n < 0:
        raise argparse.ArgumentTypeError("must be a non-negative integer")
    return n


def _effective(command: str, **settings) -> None:
    settings["backend"] = kernels.BACKEND
    print(f"effective config: {command} {json.dumps(settings, sort_keys=True, default=str)}", file=sys.stderr)


def _index_path(args) -> Path:
    path = args.index or os.environ.get("FTS_INDEX")
    if not path:
        raise UsageError("no index given (use --index or set FTS_INDEX)")
    return Path(path)


def read_corpus(directory: str | Path) -> tuple[list[Path], list[str]]:
    """One document per regular file, in lexicographic file-name order."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"input directory {directory} does not exist")
    files = sorted(p for p in directory.iterdir() if p.is_file())
    return files, [p.read_text(encoding="utf-8") for p in files]


def _add_index_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-distance", type=_positive, default=5)
    p.add_argument("--sw-count", type=_non_negative, default=700)
    p.add_argument("--fu-count", type=_non_negative, default=2100)
    p.add_argument("--families", type=_families, default=FAMILIES,
                   help="comma-separated subset of ordinary,pair,triple")
    p.add_argument("--min-count", type=_positive, default=1)
    p.add_argument("--batch-size", type=_positive, default=128)
    p.add_argument("--threads", type=_positive, default=os.cpu_count() or 1)


def _index_config(args) -> IndexConfig:
    return IndexConfig(max_distance=args.max_distance, sw_count=args.sw_count, fu_count=args.fu_count,
                       families=args.families, min_count=args.min_count, batch_size=args.batch_size,
                       threads=args.threads)


def _prepare_out(out: Path, force: bool) -> None:
    if out.exists() and not out.is_dir():
        raise UsageError(f"{out} exists and is not a directory")
    if out.is_dir() and any(out.iterdir()):
        if not force:
            raise UsageError(f"{out} is not empty (use --force to overwrite)")
        for name in list(FAMILY_FILES.values()) + ["manifest", "lexicon", "docs.repo", "dictionary.tsv"]:
            (out / name).unlink(missing_ok=True)


def cmd_build(args) -> int:
    cfg = _index_config(args)
    out = Path(args.out)
    _effective("build", input=args.input, out=str(out), dictionary=args.dictionary, **vars(cfg))
    _prepare_out(out, args.force)
    _, texts = read_corpus(args.input)
    dictionary = Dictionary.load(args.dictionary) if args.dictionary else None
    t0 = time.perf_counter()
    manifest = build_index(texts, out, cfg, dictionary)
    log.info("built %s in %.1f s", out, time.perf_counter() - t0)
    print(f"documents\t{manifest['doc_count']}")
    print(f"lemmas\t{manifest['lemma_count']}")
    for name, info in sorted(manifest["files"].items()):
        print(f"{name}\t{info['bytes']} bytes" + (f"\t{info['postings']} postings" if "postings" in info else ""))
    return EXIT_OK


def cmd_search(args) -> int:
    path = _index_path(args)
    cfg = QueryConfig(engine=args.engine, emit_final_fragment=not args.no_final_fragment)
    _effective("search", index=str(path), query=args.query, engine=args.engine, limit=args.limit,
               format=args.format, emit_final_fragment=cfg.emit_final_fragment)
    with Index.open(path) as index:
        res = evaluate_query(args.query, index, cfg)
        for notice in res.notices:
            print(f"notice: {notice}", file=sys.stderr)
        frags = res.results.fragments
        if args.limit is not None:
            frags = frags[:args.limit]
        rows = [{"did": f.did, "s": f.s, "e": f.e, "snippet": index.repo.snippet(f.did, f.s, f.e)}
                for f in frags]
    if args.format == "json":
        print(json.dumps(rows, ensure_ascii=False))
    else:
        for r in rows:
            print(f"{r['did']}\t{r['s']}\t{r['e']}\t{r['snippet']}")
    if args.metrics:
        m = res.metrics
        print(json.dumps({"postings_read": m.postings_read, "bytes_read": m.bytes_read,
                          "wall_time_ms": round(m.wall_time * 1000, 3), "heap_ops": m.heap_ops}),
              file=sys.stderr)
    return EXIT_OK if rows else EXIT_EMPTY


def _reusable(out: Path, cfg: IndexConfig, spec: CorpusSpec) -> bool:
    """An existing benchmark index may be reused if it was built with the same settings."""
    try:
        m = json.loads((out / "manifest").read_text(encoding="utf-8"))
    except (OSError, ValueError):
        return False
    return (m.get("max_distance"), m.get("sw_count"), m.get("fu_count"), m.get("doc_count"),
            m.get("families"), m.get("metadata", {}).get("corpus")) == (cfg.max_distance, cfg.sw_count, cfg.fu_count,
                                                   spec.doc_count, list(cfg.families), _spec_dict(spec))


def _spec_dict(spec: CorpusSpec) -> dict:
    return {**vars(spec), "words_per_doc": list(spec.words_per_doc)}


def cmd_bench(args) -> int:
    conf = json.loads(Path(args.config).read_text(encoding="utf-8")) if args.config else {}
    spec = CorpusSpec.from_dict(conf.get("corpus", {}))
    qconf = {"count": 200, "length_range": [3, 5], "seed": 0, **conf.get("queries", {})}
    if args.queries is not None:
        qconf["count"] = args.queries
    if args.seed is not None:
        qconf["seed"] = args.seed
    cfg = _index_config(args)
    engines = tuple(e for e in args.engines.split(",") if e)
    if any(e not in FAMILIES for e in engines):
        raise UsageError(f"engines must be drawn from {','.join(FAMILIES)}")
    config = {"corpus": _spec_dict(spec), "queries": qconf,
              "index": {"max_distance": cfg.max_distance, "sw_count": cfg.sw_count, "fu_count": cfg.fu_count},
              "engines": list(engines), "backend": kernels.BACKEND}
    _effective("bench", **config)
    with tempfile.TemporaryDirectory() as tmp:
        out = Path(args.index_dir) if args.index_dir else Path(tmp) / "index"
        if args.index_dir and not args.force and _reusable(out, cfg, spec):
            log.info("reusing index at %s", out)
        else:
            _prepare_out(out, True)
            t0 = time.perf_counter()
            build_index(generate_corpus(spec), out, cfg, metadata={"corpus": _spec_dict(spec)})
            log.info("built benchmark index in %.1f s", time.perf_counter() - t0)
        with Index.open(out) as index:
            queries = generate_queries(index.fl, LexiconConfig(index.sw_count, index.fu_count),
                                       qconf["count"], tuple(qconf["length_range"]), qconf["seed"])
            report = run_benchmark(index, queries, engines, config, workers=args.workers)
    if args.report:
        Path(args.report).write_text(report.to_json(include_queries=True) + "\n", encoding="utf-8")
    print(report.to_json() if args.format == "json" else report.table())
    return EXIT_OK


def cmd_stats(args) -> int:
    path = _index_path(args)
    _effective("stats", index=str(path), format=args.format, verify=args.verify)
    with Index.open(path) as index:
        fams = {}
        for fam, reader in index.families.items():
            fams[fam] = {"keys": len(reader), "postings": reader.posting_count,
                         "bytes": reader.path.stat().st_size}
        if args.verify:
            from .index.build import _sha256
            for name, info in index.manifest["files"].items():
                if _sha256(path / name) != info["sha256"]:
                    raise IndexFormatError(f"checksum mismatch for {name}", None, path / name)
        manifest = index.manifest
    stats = {k: manifest[k] for k in ("format_version", "max_distance", "sw_count", "fu_count",
                                      "min_count", "doc_count", "lemma_count")}
    stats["families"] = fams
    if args.format == "json":
        print(json.dumps(stats, indent=2, sort_keys=True))
    else:
        for k, v in stats.items():
            if k != "families":
                print(f"{k}\t{v}")
        for fam, info in fams.items():
            print(f"{fam}\tkeys={info['keys']}\tpostings={info['postings']}\tbytes={info['bytes']}")
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    path = _index_path(args)
    _effective("oracle-check", index=str(path), corpus=args.corpus, trials=args.trials, seed=args.seed,
               max_distance=args.max_distance)
    with Index.open(path) as index:
        md = index.max_distance
        if args.max_distance is not None and args.max_distance != md:
            print(f"FAIL config mismatch: index max_distance={md}, oracle max_distance={args.max_distance}")
            return EXIT_DIVERGENCE
        _, texts = read_corpus(args.corpus)
        if len(texts) != index.doc_count:
            raise IndexFormatError(f"corpus has {len(texts)} documents, index has {index.doc_count}")
        corpus = OracleCorpus(texts, index.fl, index.dictionary)
        lex = LexiconConfig(index.sw_count, index.fu_count)
        queries = generate_queries(index.fl, lex, args.trials, (3, 5), args.seed)
        for trial, texts_q in enumerate(queries):
            sub = Subquery(lemma_ids(texts_q, index.fl), tuple(texts_q))
            expected = brute_force_search(sub, corpus, index.fl, md)
            for name, fn in (("triple", evaluate_subquery), ("pair", evaluate_pair_path)):
                if name not in index.families:
                    continue
                got = fn(sub, index)
                if got != expected:
                    print(f"FAIL trial {trial} seed {args.seed} engine {name} query {' '.join(texts_q)!r}: "
                          f"{len(got)} fragments vs oracle {len(expected)}")
                    return EXIT_DIVERGENCE
    print(f"PASS {args.trials} trials (seed {args.seed})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="proxsearch", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="index a directory of text files")
    p.add_argument("input")
    p.add_argument("out")
    _add_index_flags(p)
    p.add_argument("--dictionary", help="TSV file: word<TAB>lemma1,lemma2")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("search", help="run a proximity query")
    p.add_argument("query")
    p.add_argument("--index")
    p.add_argument("--engine", choices=ENGINES, default="auto")
    p.add_argument("--limit", type=_non_negative)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--metrics", action="store_true", help="print query counters as JSON on stderr")
    p.add_argument("--no-final-fragment", action="store_true")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("bench", help="compare engines on a synthetic Zipf corpus")
    p.add_argument("--config", help="JSON file with 'corpus' and 'queries' sections")
    p.add_argument("--queries", type=_positive)
    p.add_argument("--seed", type=int)
    p.add_argument("--engines", default="ordinary,pair,triple")
    p.add_argument("--index-dir", help="keep (or reuse) the benchmark index here")
    p.add_argument("--force", action="store_true", help="rebuild even if --index-dir holds an index")
    p.add_argument("--report", help="write the full JSON report here")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--workers", type=_positive, default=1)
    _add_index_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("stats", help="show index counts and sizes")
    p.add_argument("--index")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--verify", action="store_true", help="check file checksums")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("oracle-check", help="compare engines with the brute-force oracle")
    p.add_argument("corpus", help="the directory the index was built from")
    p.add_argument("--index")
    p.add_argument("--trials", type=_positive, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-distance", type=_positive)
    p.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (UsageError, QueryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BenchMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except (IndexFormatError, OSError, UnicodeDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
