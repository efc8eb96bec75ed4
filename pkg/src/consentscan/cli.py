"""Command-line interface: crawl, scan, cluster, train, analyze, label, serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .banner import LexiconFormatError, load_default_lexicon, load_lexicon
from .corpus import crawl, load_manifest, load_urls_file
from .darkpattern import DEFAULT_THRESHOLD
from .pipeline import annotate_entry, load_entry_tree, scan_corpus, write_report
from .service import ReviewService, make_server
from .textml import (
    DEFAULT_EPOCHS,
    DEFAULT_K,
    DEFAULT_LAMBDA,
    DEFAULT_SEED,
    ButtonClass,
    LabelRecord,
    append_label,
    build_vocabulary,
    default_seed_phrases,
    kmeans,
    load_label_store,
    load_model,
    save_model,
    seed_labels,
    select_queries,
    train_svm,
    vectorize,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="consentscan",
        description="Detect dark patterns in cookie consent banners",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("crawl", help="fetch pages and stylesheets into a corpus")
    p.add_argument("--urls", required=True, help="file with one URL per line")
    p.add_argument("--out", required=True, help="corpus output directory")
    p.add_argument("--timeout", type=float, default=10.0)
    p.add_argument("--lang", choices=["de", "en"], default=None)

    p = sub.add_parser("scan", help="locate banners and clickables, no classifier")
    p.add_argument("--corpus", required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--lexicon", default=None)

    p = sub.add_parser("cluster", help="cluster banner button labels")
    p.add_argument("--corpus", required=True)
    p.add_argument("--k", type=int, default=DEFAULT_K)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", required=True)
    p.add_argument("--lexicon", default=None)

    p = sub.add_parser("train", help="train the button classifier")
    p.add_argument("--labels", required=True, help="JSON-lines label store")
    p.add_argument("--model", required=True, help="model output file")
    p.add_argument("--lambda", dest="lambda_", type=float, default=DEFAULT_LAMBDA)
    p.add_argument("--epochs", type=int, default=DEFAULT_EPOCHS)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--no-seeds", action="store_true",
                   help="train on the label store only, without the shipped seed table")

    p = sub.add_parser("analyze", help="full pipeline with findings")
    p.add_argument("--corpus", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--annotate", default=None, help="directory for annotated HTML")
    p.add_argument("--lexicon", default=None)

    p = sub.add_parser("label", help="terminal labeling loop")
    p.add_argument("--model", required=True)
    p.add_argument("--pool", required=True, help="file with one unlabeled text per line")
    p.add_argument("--batch", type=int, default=10)
    p.add_argument("--labels", required=True, help="label store to append to")

    p = sub.add_parser("serve", help="HTTP service for the review UI")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--corpus", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--ui-dir", default=None, help="static files for the review UI")
    p.add_argument("--host", default="127.0.0.1")

    return parser


def _lexicon_from(args):
    if getattr(args, "lexicon", None):
        return load_lexicon(args.lexicon)
    return load_default_lexicon()


def _cmd_crawl(args) -> int:
    urls = load_urls_file(args.urls)
    manifest = crawl(urls, args.out, timeout_s=args.timeout, language_filter=args.lang)
    ok = sum(1 for e in manifest.entries if e.http_status == 200)
    print(f"crawled {len(manifest.entries)} urls, {ok} ok, corpus at {args.out}")
    return EXIT_OK


def _cmd_scan(args) -> int:
    lexicon = _lexicon_from(args)
    manifest = load_manifest(args.corpus)
    results = scan_corpus(args.corpus, manifest, lexicon)
    write_report(args.report, results)
    found = sum(1 for r in results if r.banner is not None)
    print(f"scanned {len(results)} entries, {found} banners, report at {args.report}")
    return EXIT_OK


def _cmd_cluster(args) -> int:
    lexicon = _lexicon_from(args)
    manifest = load_manifest(args.corpus)
    results = scan_corpus(args.corpus, manifest, lexicon)
    labels = sorted({row["label"] for r in results for row in r.clickables})
    if not labels:
        print("no clickable labels found in corpus", file=sys.stderr)
        return EXIT_IO
    vocab = build_vocabulary(labels, min_df=1)
    vectors = [vectorize(t, vocab) for t in labels]
    distinct = len({tuple(sorted(v.items())) for v in vectors})
    k = min(args.k, distinct)
    result = kmeans(vectors, k=k, seed=args.seed)
    clusters = []
    for c in range(k):
        members = [labels[i] for i, a in enumerate(result.assignments) if a == c]
        clusters.append({"cluster": c, "size": len(members), "labels": members})
    payload = {"k": k, "seed": args.seed, "inertia": result.inertia, "clusters": clusters}
    Path(args.out).write_text(
        json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )
    print(f"clustered {len(labels)} labels into {k} groups, output at {args.out}")
    return EXIT_OK


def _training_records(labels_path: str, include_seeds: bool) -> list[LabelRecord]:
    records: list[LabelRecord] = []
    if include_seeds:
        phrases = default_seed_phrases()
        records.extend(seed_labels([p for ps in phrases.values() for p in ps]))
    records.extend(load_label_store(labels_path))
    deduped: dict[tuple[str, str], LabelRecord] = {}
    for record in records:
        deduped[(record.text, record.source)] = record
    return list(deduped.values())


def _cmd_train(args) -> int:
    records = _training_records(args.labels, include_seeds=not args.no_seeds)
    vocab = build_vocabulary([r.text for r in records], min_df=1)
    model = train_svm(records, vocab, lam=args.lambda_, epochs=args.epochs, seed=args.seed)
    save_model(args.model, model, vocab)
    print(f"trained on {len(records)} records, model at {args.model}")
    return EXIT_OK


def _cmd_analyze(args) -> int:
    lexicon = _lexicon_from(args)
    manifest = load_manifest(args.corpus)
    model, vocab = load_model(args.model)
    results = scan_corpus(args.corpus, manifest, lexicon, model, vocab, args.threshold)
    write_report(args.report, results)
    flagged = sum(1 for r in results if r.findings)
    if args.annotate:
        out = Path(args.annotate)
        out.mkdir(parents=True, exist_ok=True)
        entries = {e.id: e for e in manifest.entries}
        written = 0
        for scan in results:
            accepts = [row for row in scan.clickables if row["predicted"] == "accept"]
            if scan.banner is None or not accepts:
                continue
            tree = load_entry_tree(args.corpus, entries[scan.entry_id])
            (out / f"{scan.entry_id}.html").write_text(
                annotate_entry(tree, scan), encoding="utf-8"
            )
            written += 1
        print(f"annotated {written} pages under {args.annotate}")
    print(f"analyzed {len(results)} entries, {flagged} flagged, report at {args.report}")
    return EXIT_OK


def _cmd_label(args) -> int:
    model, vocab = load_model(args.model)
    with open(args.pool, encoding="utf-8") as fh:
        pool = [line.strip() for line in fh if line.strip()]
    labeled = set()
    if Path(args.labels).exists():
        labeled = {r.text for r in load_label_store(args.labels)}
    pool = [t for t in pool if t not in labeled]
    keymap = {"1": ButtonClass.ACCEPT, "2": ButtonClass.REJECT,
              "3": ButtonClass.SETTINGS, "4": ButtonClass.OTHER}
    print("labeling: 1=accept 2=reject 3=settings 4=other s=skip q=quit")
    while pool:
        queries = select_queries(model, pool, batch=args.batch, vocab=vocab)
        labeled_this_round = 0
        for q in queries:
            print(f"\n  {q.text!r}  (predicted {q.predicted.label}, margin {q.margin:.3f})")
            try:
                answer = input("  label> ").strip().lower()
            except EOFError:
                answer = "q"
            if answer == "q":
                return EXIT_OK
            if answer in keymap:
                append_label(args.labels, LabelRecord(q.text, keymap[answer], "active"))
                pool.remove(q.text)
                labeled_this_round += 1
            # anything else: skip
        if labeled_this_round == 0:
            break  # everything skipped; avoid an endless loop
    return EXIT_OK


def _cmd_serve(args) -> int:
    service = ReviewService(
        corpus_dir=args.corpus, model_path=args.model, labels_path=args.labels,
        threshold=args.threshold,
    )
    try:
        server = make_server(service, port=args.port, host=args.host, ui_dir=args.ui_dir)
    except OSError as exc:
        print(f"cannot bind port {args.port}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"serving on http://{args.host}:{server.server_address[1]}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


_COMMANDS = {
    "crawl": _cmd_crawl,
    "scan": _cmd_scan,
    "cluster": _cmd_cluster,
    "train": _cmd_train,
    "analyze": _cmd_analyze,
    "label": _cmd_label,
    "serve": _cmd_serve,
}


def run_cli(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except LexiconFormatError as exc:
        print(f"lexicon error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    raise SystemExit(run_cli())


if __name__ == "__main__":
    main()
