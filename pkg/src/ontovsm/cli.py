"""Batch command line interface.

Subcommands cover the full experiment loop: ``build-index`` persists an index
from a taxonomy, knowledge base, and annotated corpus; ``annotate`` adds
gazetteer annotations to raw text; ``search`` writes one TREC-format run file
per model; ``eval`` scores run files against qrels; ``compare`` chains all of
it for every model; ``dump-index`` prints the term spaces. All failures exit
nonzero with a single ``error:`` line on stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import evaluation
from .corpus import (
    GazetteerAnnotator,
    annotation_to_record,
    load_corpus,
    load_queries,
    load_stopword_file,
)
from .errors import CorpusError, EmptyQueryError, OntoVsmError
from .evaluation import InterpMode, load_qrels, load_run_file
from .index import (
    InvertedIndex,
    build_index,
    dump_index,
    load_index,
    save_index,
)
from .ontology import read_jsonl, read_kb_file, read_taxonomy_file
from .retrieval import ALL_MODELS, ModelConfig, ModelKind, search, write_run_file
from .termspace import TERM_SPACES


def _parse_models(value: str) -> list[ModelKind]:
    models = []
    for name in value.split(","):
        name = name.strip()
        try:
            models.append(ModelKind(name))
        except ValueError:
            known = ", ".join(m.value for m in ALL_MODELS)
            raise argparse.ArgumentTypeError(
                f"unknown model {name!r} (expected one of: {known})"
            ) from None
    return models


def _parse_weights(value: str) -> tuple[float, ...]:
    parts = value.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(
            f"expected four comma-separated weights wN,wC,wNC,wI, got {value!r}"
        )
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"non-numeric weight in {value!r}") from None


def _nonnegative_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {value!r}") from None
    if number < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {number}")
    return number


def _model_config(args: argparse.Namespace) -> ModelConfig:
    w_n, w_c, w_nc, w_i = args.weights
    return ModelConfig(w_n=w_n, w_c=w_c, w_nc=w_nc, w_i=w_i, alpha=args.alpha)


def _add_model_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--models",
        type=_parse_models,
        default=list(ALL_MODELS),
        help="comma-separated model names (default: all eight)",
    )
    parser.add_argument(
        "--weights",
        type=_parse_weights,
        default=(0.25, 0.25, 0.25, 0.25),
        metavar="wN,wC,wNC,wI",
        help="entity space weights, must sum to 1 (default 0.25 each)",
    )
    parser.add_argument(
        "--alpha", type=float, default=0.5, help="entity/keyword blend in [0,1] (default 0.5)"
    )
    parser.add_argument(
        "--top-k", type=_nonnegative_int, default=1000, help="results per query (default 1000)"
    )


def _load_stopwords(args: argparse.Namespace) -> frozenset[str]:
    if getattr(args, "stopwords", None):
        return load_stopword_file(args.stopwords)
    return frozenset()


def _build_index_from_args(args: argparse.Namespace) -> InvertedIndex:
    taxonomy = read_taxonomy_file(args.taxonomy)
    kb = read_kb_file(args.kb, taxonomy)
    stopwords = _load_stopwords(args)
    docs = load_corpus(args.corpus, kb, taxonomy, stopwords)
    return build_index(docs, kb, taxonomy, stopwords)


def _summary_line(index: InvertedIndex) -> str:
    counts = ", ".join(f"{space}={index.term_count(space)}" for space in TERM_SPACES)
    return f"indexed {index.n_docs} docs; terms: {counts}"


def _search_all(
    index: InvertedIndex,
    queries,
    models: list[ModelKind],
    config: ModelConfig,
    top_k: int,
    run_dir: Path,
) -> list[Path]:
    run_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for model in models:
        runs = {}
        for query in queries:
            try:
                runs[query.query_id] = search(index, query, model, config, top_k)
            except EmptyQueryError as exc:
                # The model cannot express this query; its run stays empty for it.
                print(f"warning: {model.value}: {exc}", file=sys.stderr)
        path = run_dir / f"{model.value}.run"
        write_run_file(runs, model.value, path)
        paths.append(path)
    return paths


def cmd_build_index(args: argparse.Namespace) -> int:
    index = _build_index_from_args(args)
    save_index(index, args.index)
    print(_summary_line(index))
    return 0


def cmd_annotate(args: argparse.Namespace) -> int:
    taxonomy = read_taxonomy_file(args.taxonomy)
    kb = read_kb_file(args.kb, taxonomy)
    annotator = GazetteerAnnotator(kb)
    count = 0
    with open(args.out, "w", encoding="utf-8") as fh:
        for lineno, rec in enumerate(read_jsonl(args.corpus, CorpusError), start=1):
            doc_id = rec.get("doc_id")
            text = rec.get("text", "")
            if not isinstance(doc_id, str) or not doc_id or not isinstance(text, str):
                raise CorpusError(f"{args.corpus}, record {lineno}: need doc_id and text")
            row = {
                "doc_id": doc_id,
                "text": text,
                "annotations": [annotation_to_record(a) for a in annotator.annotate(text)],
            }
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
            count += 1
    print(f"annotated {count} docs -> {args.out}")
    return 0


def cmd_search(args: argparse.Namespace) -> int:
    config = _model_config(args)  # reject bad weights before touching the index
    index = load_index(args.index)
    queries = load_queries(args.queries, index.kb, index.taxonomy, index.stopwords)
    paths = _search_all(index, queries, args.models, config, args.top_k, Path(args.out))
    for path in paths:
        print(f"wrote {path}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    qrels = load_qrels(args.qrels)
    runs_by_model = {}
    for run_path in args.runs:
        label = Path(run_path).stem
        if label in runs_by_model:
            raise evaluation.EvalError(f"two run files share the label {label!r}")
        runs_by_model[label] = load_run_file(run_path)
    rep = evaluation.report(runs_by_model, qrels, args.out, InterpMode(args.interp))
    print(f"evaluated {len(rep.curves)} models over {rep.query_count} queries -> {args.out}")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    config = _model_config(args)
    index = _build_index_from_args(args)
    if args.index:
        save_index(index, args.index)
    print(_summary_line(index))
    queries = load_queries(args.queries, index.kb, index.taxonomy, index.stopwords)
    out_dir = Path(args.out)
    run_paths = _search_all(index, queries, args.models, config, args.top_k, out_dir / "runs")
    qrels = load_qrels(args.qrels)
    runs_by_model = {path.stem: load_run_file(path) for path in run_paths}
    rep = evaluation.report(runs_by_model, qrels, out_dir, InterpMode(args.interp))
    print(f"evaluated {len(rep.curves)} models over {rep.query_count} queries -> {out_dir}")
    return 0


def cmd_dump_index(args: argparse.Namespace) -> int:
    dump_index(load_index(args.index), sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ontovsm",
        description="Entity-aware vector space retrieval over taxonomies, aliases, and keywords.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-index", help="index an annotated corpus")
    p.add_argument("--taxonomy", required=True, help="class taxonomy (JSONL)")
    p.add_argument("--kb", required=True, help="entity knowledge base (JSONL)")
    p.add_argument("--corpus", required=True, help="annotated corpus (JSONL)")
    p.add_argument("--index", required=True, help="output index directory")
    p.add_argument("--stopwords", help="optional stopword file, one word per line")
    p.set_defaults(func=cmd_build_index)

    p = sub.add_parser("annotate", help="annotate raw text with gazetteer matches")
    p.add_argument("--taxonomy", required=True)
    p.add_argument("--kb", required=True)
    p.add_argument("--corpus", required=True, help="raw corpus (JSONL with doc_id and text)")
    p.add_argument("--out", required=True, help="annotated corpus output file")
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("search", help="run queries against a saved index")
    p.add_argument("--index", required=True, help="index directory")
    p.add_argument("--queries", required=True, help="query file (JSONL)")
    p.add_argument("--out", required=True, help="directory for run files")
    _add_model_options(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("eval", help="score run files against relevance judgments")
    p.add_argument("runs", nargs="+", help="run files; the file stem names the model")
    p.add_argument("--qrels", required=True, help="judgments file")
    p.add_argument("--out", required=True, help="directory for report tables and curves")
    p.add_argument("--interp", choices=[m.value for m in InterpMode], default="standard")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("compare", help="build, search every model, and evaluate")
    p.add_argument("--taxonomy", required=True)
    p.add_argument("--kb", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--qrels", required=True)
    p.add_argument("--out", required=True, help="output directory (runs/ plus report files)")
    p.add_argument("--index", help="optionally persist the built index here")
    p.add_argument("--stopwords")
    p.add_argument("--interp", choices=[m.value for m in InterpMode], default="standard")
    _add_model_options(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("dump-index", help="print the indexed term spaces")
    p.add_argument("--index", required=True)
    p.set_defaults(func=cmd_dump_index)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OntoVsmError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
