"""Command-line entry point: serve, ingest, autotag, validate, stats, export.

The corpus lives in a directory of per-mode subdirectories with one TSV
file per document (see serialization). Every subcommand takes --corpus;
the ANN_CORPUS_DIR environment variable overrides it when set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import autotag as autotag_mod
from . import serialization
from .corpus import SubcorpusPath
from .metadata import MetadataStore, build_general_meta, validate_catalog, write_general_meta
from .tagset import load_default_tagset, load_tagset_file, validate_assignment


def _corpus_dir(args) -> Path:
    env = os.environ.get("ANN_CORPUS_DIR")
    if env:
        return Path(env)
    if not args.corpus:
        raise SystemExit("error: --corpus is required (or set ANN_CORPUS_DIR)")
    return Path(args.corpus)


def _load_tagset(args):
    if getattr(args, "tagset", None):
        return load_tagset_file(args.tagset)
    return load_default_tagset()


def _load_store(args):
    tagset = _load_tagset(args)
    return serialization.load_corpus(_corpus_dir(args), tagset), tagset


def _load_lexicon(args, tagset):
    if not getattr(args, "lexicon", None):
        return None
    text = Path(args.lexicon).read_text(encoding="utf-8")
    return autotag_mod.load_lexicon(text, tagset)


def cmd_ingest(args) -> int:
    store, _ = _load_store(args)
    subcorpus = SubcorpusPath.parse(args.subcorpus)
    for filename in args.files:
        path = Path(filename)
        doc_id = args.doc_id if args.doc_id and len(args.files) == 1 else path.stem
        doc = store.ingest_document(path.read_bytes(), doc_id, subcorpus,
                                    splitter=args.splitter)
        print(f"ingested {doc.doc_id}: {len(doc.sentences)} sentences")
    serialization.save_corpus(store, _corpus_dir(args))
    return 0


def cmd_import_csv(args) -> int:
    store, tagset = _load_store(args)
    subcorpus = SubcorpusPath.parse(args.subcorpus)
    text = Path(args.file).read_text(encoding="utf-8")
    doc = serialization.import_legacy_csv(text, args.doc_id, subcorpus, tagset,
                                          store=store)
    serialization.save_corpus(store, _corpus_dir(args))
    print(f"imported {doc.doc_id}: {len(doc.sentences)} sentences")
    return 0


def cmd_autotag(args) -> int:
    store, tagset = _load_store(args)
    lexicon = _load_lexicon(args, tagset)
    if lexicon is None:
        raise SystemExit("error: --lexicon is required for autotagging")
    policy = autotag_mod.AutotagPolicy(mode=args.mode, min_count=args.min_count)
    doc_ids = [args.doc_id] if args.doc_id else sorted(store.documents)
    for doc_id in doc_ids:
        n = autotag_mod.autotag_document(store, doc_id, lexicon, policy)
        print(f"{doc_id}: {n} suggestions")
    serialization.save_corpus(store, _corpus_dir(args))
    return 0


def cmd_validate(args) -> int:
    store, tagset = _load_store(args)
    findings = []
    for doc in store.documents.values():
        for sent in doc.sentences:
            for idx, tok in enumerate(sent.tokens):
                if tok.tag is None:
                    continue
                for f in validate_assignment(tok.tag, tagset, strict=args.strict):
                    findings.append((f, f"{sent.id}[{idx}]"))
    meta = MetadataStore.load(_corpus_dir(args))
    for f in validate_catalog(store, meta):
        findings.append((f, "catalog"))
    for f, where in findings:
        print(f"{f.severity}: {f.code} at {where}: {f.message}")
    errors = sum(1 for f, _ in findings if f.is_error)
    print(f"{len(findings)} finding(s), {errors} error(s)")
    return 1 if errors else 0


def cmd_stats(args) -> int:
    store, _ = _load_store(args)
    print(json.dumps(store.compute_stats().to_dict(), ensure_ascii=False, indent=2))
    return 0


def cmd_export(args) -> int:
    store, _ = _load_store(args)
    meta = MetadataStore.load(_corpus_dir(args))
    if args.format == "xml":
        out = serialization.export_xml(store, meta)
    else:
        docs = sorted(store.documents.values(), key=lambda d: d.doc_id)
        out = "\n".join(serialization.export_tsv(d) for d in docs)
    if args.output:
        Path(args.output).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)
    if not any(f.is_error for f in validate_catalog(store, meta)):
        write_general_meta(build_general_meta(store, meta), _corpus_dir(args))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app, load_annotators

    store, tagset = _load_store(args)
    lexicon = _load_lexicon(args, tagset)
    annotators = load_annotators(args.annotators) if args.annotators else []
    static_dir = args.ui if args.ui and Path(args.ui).is_dir() else None
    app = create_app(store, tagset, lexicon=lexicon, annotators=annotators,
                     claim_timeout=args.claim_timeout * 60, static_dir=static_dir)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ann", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, tagset=True):
        p.add_argument("--corpus", help="corpus directory (or ANN_CORPUS_DIR)")
        if tagset:
            p.add_argument("--tagset", help="tagset definition file (default: bundled Magahi)")

    p = sub.add_parser("ingest", help="ingest plain-text files as documents")
    p.add_argument("files", nargs="+")
    p.add_argument("--subcorpus", required=True,
                   help="e.g. indirect_written/book/prose or spoken/personal")
    p.add_argument("--doc-id", help="document id (single file only; default: file stem)")
    p.add_argument("--splitter", choices=["newline", "danda"], default="newline")
    common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("import-csv", help="import a legacy CSV document")
    p.add_argument("file")
    p.add_argument("--doc-id", required=True)
    p.add_argument("--subcorpus", required=True)
    common(p)
    p.set_defaults(func=cmd_import_csv)

    p = sub.add_parser("autotag", help="pre-fill suggestions from a lexicon")
    p.add_argument("--lexicon", required=True)
    p.add_argument("--doc-id", help="limit to one document")
    p.add_argument("--mode", choices=["unambiguous_only", "most_frequent"],
                   default="unambiguous_only")
    p.add_argument("--min-count", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_autotag)

    p = sub.add_parser("validate", help="check tags and the metadata catalog")
    p.add_argument("--strict", action="store_true",
                   help="flag non-leaf tags as warnings")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("stats", help="word and sentence counts")
    common(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("export", help="export the corpus as XML or TSV")
    p.add_argument("--format", choices=["xml", "tsv"], default="xml")
    p.add_argument("--output", "-o")
    common(p)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("serve", help="run the annotation service")
    p.add_argument("--lexicon")
    p.add_argument("--annotators", help="JSON registry of annotator tokens")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8700)
    p.add_argument("--ui", help="static workbench bundle to serve at /")
    p.add_argument("--claim-timeout", type=float, default=60.0,
                   help="idle minutes before a claim auto-releases")
    common(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
