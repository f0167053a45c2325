"""Command-line pipeline: one subcommand per stage, files in between.

    doctypeclf harvest --source crossref --out cr.jsonl
    doctypeclf merge --crossref cr.jsonl --openalex oa.jsonl --pubmed pm.jsonl --out merged.jsonl
    doctypeclf featurize --merged merged.jsonl --out features.jsonl
    doctypeclf label --merged merged.jsonl --out labels.jsonl
    doctypeclf split --features features.jsonl --labels labels.jsonl --merged merged.jsonl --out splits.jsonl
    doctypeclf train --model knn --features ... --labels ... --splits ... --out knn.json
    doctypeclf evaluate --model knn.json --features ... --labels ... --splits ... --out eval.json
    doctypeclf classify --model knn.json --features features.jsonl --apply-issue-rule --out pred.jsonl
    doctypeclf report --predictions pred.jsonl --merged merged.jsonl --group-by year --out report.json

Failures print one line ``error: <category>: <message>`` to stderr and exit with
3 (input not found), 4 (validation), 5 (API) or 2 (usage).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import __version__
from .datasets import DEFAULT_RATIOS, filter_small_publishers, stratified_split
from .errors import DoctypeError, InputNotFound, ValidationError
from .evaluate import corpus_report, evaluate, render_table
from .featurize import feature_row, issue_override
from .harvest import HarvestConfig, HarvestFilter, MergeStats, fetch_pages, merge_stores, write_store
from .harvest.client import BASE_URL_ENV, DEFAULT_BASE_URLS
from .harvest.store import read_jsonl, read_store, record_to_dict, write_jsonl
from .label import UNMAPPABLE, explain_label, load_mapping
from .learn import FAMILIES, grid_search, load_grid, load_model, predict_many, save_model, train
from .manifest import write_manifest
from .pipeline import build_examples, load_features, load_labels, load_splits
from .records import Label, Prediction

logger = logging.getLogger("doctypeclf")

EXIT_CODES = {"usage": 2, "input-not-found": 3, "validation": 4, "api": 5}


@dataclass
class PipelineConfig:
    """Defaults that a ``--config`` JSON file may supply; unknown keys are rejected."""

    seed: int = 42
    ratios: tuple = DEFAULT_RATIOS
    min_publisher_works: int = 5000
    grid: Optional[str] = None
    mapping: Optional[str] = None
    mailto: Optional[str] = None
    crossref_base_url: Optional[str] = None
    openalex_base_url: Optional[str] = None
    pubmed_base_url: Optional[str] = None
    requests_per_second: float = 2.0

    @classmethod
    def load(cls, path: Optional[str]) -> "PipelineConfig":
        if not path:
            return cls()
        p = Path(path)
        if not p.exists():
            raise InputNotFound(str(p))
        try:
            data = json.loads(p.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{p}: invalid JSON config ({exc.msg})") from exc
        if not isinstance(data, dict):
            raise ValidationError(f"{p}: config must be an object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValidationError(f"{p}: unknown config keys {unknown}")
        cfg = cls(**data)
        cfg.ratios = _parse_ratios(cfg.ratios)
        if not isinstance(cfg.seed, int) or not isinstance(cfg.min_publisher_works, int) \
                or cfg.min_publisher_works < 0:
            raise ValidationError(f"{p}: seed and min_publisher_works must be integers >= 0")
        if cfg.requests_per_second <= 0:
            raise ValidationError(f"{p}: requests_per_second must be > 0")
        return cfg


def _parse_ratios(value) -> tuple:
    if isinstance(value, str):
        value = value.split(",")
    try:
        ratios = tuple(float(v) for v in value)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad ratios {value!r}") from exc
    if len(ratios) != 3 or any(r < 0 for r in ratios) or abs(sum(ratios) - 1.0) > 1e-9:
        raise ValidationError(f"ratios must be three non-negative numbers summing to 1, got {ratios}")
    return ratios


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _print(msg: str) -> None:
    print(msg, file=sys.stdout)


# --- stages -----------------------------------------------------------------

def cmd_harvest(args, cfg: PipelineConfig) -> None:
    flt = HarvestFilter(source=args.source, year_from=args.year_from, year_to=args.year_to,
                        container_type=args.container_type or None, extra=tuple(args.filter or ()))
    overrides = {"requests_per_second": args.rps or cfg.requests_per_second}
    mailto = args.mailto or cfg.mailto
    if mailto:
        overrides["mailto"] = mailto
    config = HarvestConfig.from_env(**overrides)
    for src in DEFAULT_BASE_URLS:
        from_cfg = getattr(cfg, f"{src}_base_url")
        if from_cfg and not os.environ.get(BASE_URL_ENV[src]):
            config.base_urls[src] = from_cfg
    stats = write_store(args.out, args.source, fetch_pages(flt, args.page_limit, config),
                        append=args.append)
    write_manifest("harvest", [args.out], params={
        "filter": dataclasses.asdict(flt), "page_limit": args.page_limit,
        "base_url": config.base_urls[args.source]}, stats=dataclasses.asdict(stats))
    _print(f"harvested {stats.written} {args.source} records ({stats.fetched} fetched, "
           f"skipped {stats.skipped})")


def cmd_merge(args, cfg) -> None:
    stats = MergeStats()
    rows = (record_to_dict(r) for r in merge_stores(args.crossref, args.openalex, args.pubmed, stats))
    n = write_jsonl(args.out, rows)
    write_manifest("merge", [args.out], [args.crossref, args.openalex, args.pubmed],
                   stats=stats.as_dict())
    _print(f"merged {n} records: {json.dumps(stats.as_dict(), sort_keys=True)}")


def cmd_featurize(args, cfg) -> None:
    n = write_jsonl(args.out, (feature_row(r) for r in read_store(args.merged)))
    write_manifest("featurize", [args.out], [args.merged], stats={"records": n})
    _print(f"featurized {n} records")


def cmd_label(args, cfg) -> None:
    mapping_path = args.mapping or cfg.mapping
    mapping = load_mapping(mapping_path)
    counts = {"research": 0, "non-research": 0, "unmappable": 0, "no_pubmed": 0}
    rows = []
    for rec in read_store(args.merged):
        if rec.pubmed is None:
            counts["no_pubmed"] += 1
            continue
        label, matched = explain_label(rec.pubmed.publication_types, mapping)
        if label is UNMAPPABLE:
            counts["unmappable"] += 1
            continue
        counts[label.value] += 1
        rows.append({"key": rec.key, "label": label.value, "matched_types": matched})
    write_jsonl(args.out, rows)
    write_manifest("label", [args.out], [args.merged, mapping_path], stats=counts,
                   params={"mapping": mapping_path or "bundled default"})
    _print(f"labelled {len(rows)} records: {json.dumps(counts, sort_keys=True)}")


def cmd_split(args, cfg) -> None:
    seed = cfg.seed if args.seed is None else args.seed
    ratios = _parse_ratios(args.ratios) if args.ratios else cfg.ratios
    min_works = cfg.min_publisher_works if args.min_publisher_works is None else args.min_publisher_works
    examples = build_examples(load_features(args.features), load_labels(args.labels), args.merged)
    fstats: dict = {}
    examples = filter_small_publishers(examples, min_works, fstats)
    assignment = stratified_split(examples, ratios, seed)
    write_jsonl(args.out, assignment.rows())
    by_split = {s: 0 for s in ("train", "test", "validation")}
    for s in assignment.assignment.values():
        by_split[s] += 1
    write_manifest("split", [args.out], [args.features, args.labels, args.merged], seed=seed,
                   params={"ratios": list(ratios), "min_publisher_works": min_works},
                   stats={**by_split, **fstats})
    _print(f"split {len(examples)} examples: {by_split} (removed {fstats['removed']} "
           f"from small publishers)")


def _split_examples(args):
    examples = build_examples(load_features(args.features), load_labels(args.labels))
    splits = load_splits(args.splits)
    parts = {"train": [], "test": [], "validation": []}
    for ex in examples:
        if ex.key in splits:
            parts[splits[ex.key]].append(ex)
    return parts


def cmd_train(args, cfg) -> None:
    seed = cfg.seed if args.seed is None else args.seed
    parts = _split_examples(args)
    grid_report = None
    if args.hyper is not None or args.model == "baseline":
        hyper = {}
        for pair in args.hyper or []:
            if "=" not in pair:
                raise ValidationError(f"--hyper expects name=value, got {pair!r}")
            name, value = pair.split("=", 1)
            hyper[name] = _parse_value(value)
    else:
        grid_path = args.grid or cfg.grid
        grid = load_grid(grid_path) if grid_path else None
        hyper, grid_report = grid_search(args.model, grid, parts["train"], parts["test"], seed)
    model = train(args.model, parts["train"], hyper, seed=seed)
    save_model(model, args.out)
    write_manifest("train", [args.out], [args.features, args.labels, args.splits], seed=seed,
                   params={"model": args.model, "hyperparameters": model.hyperparameters},
                   stats={"n_train": len(parts["train"]), "grid_report": grid_report})
    _print(f"trained {args.model} on {len(parts['train'])} examples with {model.hyperparameters}")


def cmd_evaluate(args, cfg) -> None:
    parts = _split_examples(args)
    reports = []
    for model_path in args.model:
        model = load_model(model_path)
        for split in args.split:
            truth = parts[split]
            if not truth:
                raise ValidationError(f"split {split!r} is empty")
            rep = evaluate(predict_many(model, truth), truth, split=split, model=Path(model_path).stem)
            reports.append(rep)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text(json.dumps({"reports": [r.as_dict() for r in reports]}, indent=2,
                                         sort_keys=True) + "\n", encoding="utf-8")
    write_manifest("evaluate", [args.out], [*args.model, args.features, args.labels, args.splits])
    _print(render_table(reports))


def cmd_classify(args, cfg) -> None:
    model = load_model(args.model)
    features = load_features(args.features)
    keys = sorted(features)
    preds = predict_many(model, [(k, features[k][0]) for k in keys])
    rows = []
    for p in preds:
        triggered = features[p.key][1]
        final = Label.NON_RESEARCH if (args.apply_issue_rule and triggered) else p.label
        rows.append({"key": p.key, "label": final.value, "model_label": p.label.value,
                     "score": p.score, "issue_override_triggered": triggered,
                     "issue_rule_applied": bool(args.apply_issue_rule)})
    write_jsonl(args.out, rows)
    n_nr = sum(r["label"] == Label.NON_RESEARCH.value for r in rows)
    write_manifest("classify", [args.out], [args.model, args.features],
                   params={"apply_issue_rule": bool(args.apply_issue_rule)},
                   stats={"records": len(rows), "non_research": n_nr})
    _print(f"classified {len(rows)} records, {n_nr} non-research")


def _group_value(rec, field: str):
    if field == "year":
        return rec.crossref.published_year
    source, _, name = field.rpartition(".")
    sub = {"": rec.crossref, "crossref": rec.crossref, "openalex": rec.openalex,
           "pubmed": rec.pubmed}.get(source)
    if source not in ("", "crossref", "openalex", "pubmed"):
        raise ValidationError(f"unknown group field {field!r}")
    if sub is not None and not hasattr(sub, name):
        raise ValidationError(f"unknown group field {field!r}")
    value = getattr(sub, name, None) if sub is not None else None
    return "unknown" if value in (None, "") else value


def cmd_report(args, cfg) -> None:
    preds, keys = [], set()
    for row in read_jsonl(args.predictions):
        preds.append(Prediction(row["key"], Label(row["model_label"]), float(row["score"])))
        keys.add(row["key"])
    overrides, groups = {}, {}
    for rec in read_store(args.merged):
        if rec.key in keys:
            overrides[rec.key] = issue_override(rec.crossref.issue if not args.no_issue_rule else None)
            if args.group_by:
                groups[rec.key] = _group_value(rec, args.group_by)
    rep = corpus_report(preds, overrides, groups if args.group_by else None, args.group_by)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text(json.dumps(rep.as_dict(), indent=2, sort_keys=True) + "\n",
                              encoding="utf-8")
    write_manifest("report", [args.out], [args.predictions, args.merged],
                   params={"group_by": args.group_by, "issue_rule": not args.no_issue_rule})
    _print(f"{rep.non_research} of {rep.total} works non-research ({rep.non_research_share:.2%}); "
           f"issue rule triggered for {rep.override_triggered}")


# --- argument parsing -------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="doctypeclf",
                                     description="Classify journal works as research or non-research.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="JSON file with pipeline defaults")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("harvest", help="fetch one source into a record store")
    p.add_argument("--source", required=True, choices=["crossref", "openalex", "pubmed"])
    p.add_argument("--year-from", type=int, default=2014)
    p.add_argument("--year-to", type=int, default=2023)
    p.add_argument("--container-type", default="journal")
    p.add_argument("--filter", action="append", metavar="KEY=VALUE")
    p.add_argument("--page-limit", type=int)
    p.add_argument("--rps", type=float, help="requests per second (default 2)")
    p.add_argument("--mailto", help="contact e-mail (default: $CONTACT_MAILTO)")
    p.add_argument("--append", action="store_true", help="merge into an existing store")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_harvest)

    p = sub.add_parser("merge", help="join stores on DOI")
    p.add_argument("--crossref", required=True)
    p.add_argument("--openalex")
    p.add_argument("--pubmed")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("featurize", help="compute the ten features")
    p.add_argument("--merged", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("label", help="map PubMed types to research/non-research")
    p.add_argument("--merged", required=True)
    p.add_argument("--mapping", help="pubmed_type,class CSV (default: bundled table)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("split", help="publisher filter and stratified train/test/validation split")
    p.add_argument("--features", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--merged", required=True, help="merged store (publisher, year)")
    p.add_argument("--ratios", help="e.g. 0.8,0.1,0.1")
    p.add_argument("--seed", type=int)
    p.add_argument("--min-publisher-works", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_split)

    def data_args(p):
        p.add_argument("--features", required=True)
        p.add_argument("--labels", required=True)
        p.add_argument("--splits", required=True)

    p = sub.add_parser("train", help="train one model (grid search unless --hyper is given)")
    p.add_argument("--model", required=True, choices=FAMILIES)
    data_args(p)
    p.add_argument("--hyper", action="append", metavar="NAME=VALUE",
                   help="fixed hyperparameter; skips grid search")
    p.add_argument("--grid", help="JSON grid file (default: built-in grid)")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="score models on held-out splits")
    p.add_argument("--model", required=True, action="append")
    data_args(p)
    p.add_argument("--split", action="append", choices=["train", "test", "validation"])
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("classify", help="predict labels for a feature file")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--apply-issue-rule", action="store_true",
                   help="mark supplement/meeting issues as non-research")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("report", help="corpus-level non-research shares")
    p.add_argument("--predictions", required=True)
    p.add_argument("--merged", required=True)
    p.add_argument("--group-by", help="publisher, year, container_title, openalex.source_type, ...")
    p.add_argument("--no-issue-rule", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "split", None) is None and args.command == "evaluate":
        args.split = ["test"]
    try:
        cfg = PipelineConfig.load(args.config)
        args.func(args, cfg)
    except DoctypeError as exc:
        msg = str(exc).replace("\n", " ")
        print(f"error: {exc.category}: {type(exc).__name__}: {msg}", file=sys.stderr)
        return EXIT_CODES.get(exc.category, 1)
    return 0


if __name__ == "__main__":
    sys.exit(main())
