"""Command-line entry points: train, evaluate, predict, serve."""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .aggregation import fit_calibrator
from .dataset import Schema, load_csv, make_split_plan, standardize
from .datasets import REGISTRY, builtin_schema, load_builtin
from .errors import BundleFormatError, CdssError, ConfigError, DataError
from .evaluation import _out_of_fold_scores, run_experiment
from .induction import InductionConfig, induce_decision_set
from .personalization import train_correctness_models
from .service import (
    BundleHolder,
    ModelBundle,
    create_app,
    dataset_fingerprint,
    deserialize_bundle,
    serialize_bundle,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_RUNTIME = 3


def _load_dataset(args):
    name = args.dataset
    if name in REGISTRY and args.schema is None:
        return load_builtin(name), builtin_schema(name), name
    if args.schema is None:
        raise ConfigError("--schema is required for a custom dataset path")
    schema = Schema.from_json(args.schema)
    return load_csv(name, schema), schema, os.path.basename(name)


def _config_from_args(args) -> InductionConfig:
    cfg = InductionConfig(seed=args.seed)
    if getattr(args, "k_target", None) is not None:
        cfg = InductionConfig(seed=args.seed, k_target=args.k_target)
    return cfg


def _train_bundle(dataset, schema, name, config) -> ModelBundle:
    decision_set = induce_decision_set(dataset, config)
    scaler, _ = standardize(dataset)
    models = train_correctness_models(decision_set, dataset, scaler)
    oof_scores, oof_labels = _out_of_fold_scores(dataset, decision_set,
                                                 config.seed + 1)
    calibrator = fit_calibrator(oof_scores, oof_labels)
    ranges = tuple((float(lo), float(hi))
                   for lo, hi in zip(dataset.X.min(axis=0),
                                     dataset.X.max(axis=0)))
    # wall-clock timestamps would break byte-identical retraining; only an
    # explicit SOURCE_DATE_EPOCH is recorded
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    metadata = {
        "created_at": int(epoch) if epoch else None,
        "seed": config.seed,
        "config_snapshot": {k: getattr(config, k)
                            for k in config.__dataclass_fields__},
        "dataset_fingerprint": dataset_fingerprint(dataset),
        "dataset_name": name,
    }
    return ModelBundle(schema, scaler, decision_set, tuple(models),
                       calibrator, ranges, metadata)


def cmd_train(args) -> int:
    dataset, schema, name = _load_dataset(args)
    bundle = _train_bundle(dataset, schema, name, _config_from_args(args))
    with open(args.out, "wb") as fh:
        fh.write(serialize_bundle(bundle))
    print(f"wrote bundle with {bundle.decision_set.k} rules to {args.out}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    dataset, _, name = _load_dataset(args)
    plan = make_split_plan(dataset, args.repeats, args.folds, args.seed)
    report = run_experiment(dataset, plan, _config_from_args(args), name)
    if args.report_dir:
        os.makedirs(args.report_dir, exist_ok=True)
        base = os.path.join(args.report_dir, name)
        with open(base + "_report.json", "w") as fh:
            json.dump(report.to_json_dict(), fh, sort_keys=True, indent=1)
        with open(base + "_auc.csv", "w") as fh:
            fh.write(report.auc_csv())
        with open(base + "_curve.csv", "w") as fh:
            fh.write(report.curve_csv())
    for line in report.summary_lines():
        print(line)
    return EXIT_OK


def _read_bundle(path) -> ModelBundle:
    try:
        with open(path, "rb") as fh:
            return deserialize_bundle(fh.read())
    except OSError as exc:
        raise DataError(f"cannot read bundle {path}: {exc}") from exc


def cmd_predict(args) -> int:
    bundle = _read_bundle(args.bundle)
    raw = args.input
    if raw.startswith("@"):
        try:
            with open(raw[1:]) as fh:
                raw = fh.read()
        except OSError as exc:
            raise DataError(f"cannot read input file: {exc}") from exc
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise DataError(f"input is not valid JSON: {exc}") from exc
    if isinstance(doc, dict):
        instance = bundle.instance_from_mapping(doc)
    elif isinstance(doc, list):
        instance = np.asarray(doc, dtype=np.float64)
    else:
        raise DataError("input must be a JSON object or array")
    result = bundle.predict(instance, args.scheme)
    print(json.dumps(result.to_api_dict(bundle.rule_texts()), indent=1))
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    bundle_path = args.bundle or os.environ.get("CDSS_BUNDLE")
    if not bundle_path:
        raise ConfigError("--bundle or CDSS_BUNDLE is required")
    port = args.port if args.port is not None else int(
        os.environ.get("CDSS_PORT", "8000"))
    holder = BundleHolder(_read_bundle(bundle_path))
    app = create_app(holder, static_dir=args.static_dir)

    if args.reload_bundle:
        state = {"mtime": os.path.getmtime(bundle_path)}

        @app.middleware("http")
        async def reload_on_change(request, call_next):
            try:
                mtime = os.path.getmtime(bundle_path)
                if mtime != state["mtime"]:
                    holder.swap(_read_bundle(bundle_path))
                    state["mtime"] = mtime
            except (OSError, BundleFormatError):
                pass  # keep serving the current snapshot
            return await call_next(request)

    uvicorn.run(app, host=args.host, port=port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cdss")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--dataset", required=True,
                        help="heart|breast|mammo or a CSV path")
        sp.add_argument("--schema", help="schema JSON for a custom CSV")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--k-target", type=int, default=None)

    t = sub.add_parser("train", help="train a model bundle")
    common(t)
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("evaluate", help="run the CV benchmark")
    common(e)
    e.add_argument("--folds", type=int, default=5)
    e.add_argument("--repeats", type=int, default=5)
    e.add_argument("--report-dir")
    e.set_defaults(func=cmd_evaluate)

    pr = sub.add_parser("predict", help="score one instance from a bundle")
    pr.add_argument("--bundle", required=True)
    pr.add_argument("--input", required=True,
                    help="JSON object/array, or @file")
    pr.add_argument("--scheme", default="personalized",
                    choices=["non_weighted", "weighted", "personalized"])
    pr.set_defaults(func=cmd_predict)

    s = sub.add_parser("serve", help="serve the HTTP API")
    s.add_argument("--bundle")
    s.add_argument("--port", type=int, default=None)
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--static-dir", help="directory with built UI assets")
    s.add_argument("--reload-bundle", action="store_true",
                   help="re-read the bundle file when it changes on disk")
    s.set_defaults(func=cmd_serve)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, BundleFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except CdssError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
