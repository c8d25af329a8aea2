"""Model bundle persistence and the HTTP inference API.

Bundles are canonical JSON (sorted keys, full-precision floats) so identical
training runs produce byte-identical files. The HTTP layer serves one
immutable bundle snapshot; a reload swaps the snapshot atomically.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .aggregation import Calibrator, PredictionResult, predict_patient
from .dataset import Dataset, FeatureSpec, Scaler, Schema
from .errors import BundleFormatError, DataError
from .learners import LinearModel
from .personalization import CorrectnessModel
from .rules import Condition, DecisionSet, Rule

FORMAT_VERSION = 1


@dataclass(frozen=True)
class ModelBundle:
    schema: Schema
    scaler: Scaler
    decision_set: DecisionSet
    correctness_models: tuple[CorrectnessModel, ...]
    calibrator: Calibrator
    feature_ranges: tuple[tuple[float, float], ...]  # observed (min, max) per feature
    metadata: dict

    def __post_init__(self):
        if len(self.correctness_models) != self.decision_set.k:
            raise BundleFormatError("one correctness model per rule required")

    @property
    def feature_names(self) -> list[str]:
        return self.schema.feature_names

    def instance_from_mapping(self, features: dict) -> np.ndarray:
        names = self.feature_names
        missing = [n for n in names if n not in features]
        if missing:
            raise DataError(f"missing features: {missing}")
        extra = [k for k in features if k not in names]
        if extra:
            raise DataError(f"unknown features: {extra}")
        vals = []
        for n in names:
            v = features[n]
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ValueError(f"feature {n!r} must be a number")
            if not np.isfinite(float(v)):
                raise ValueError(f"feature {n!r} must be finite")
            vals.append(float(v))
        return np.asarray(vals, dtype=np.float64)

    def predict(self, instance: np.ndarray, scheme: str = "personalized") -> PredictionResult:
        instance = np.asarray(instance, dtype=np.float64)
        if instance.shape != (len(self.feature_names),):
            raise DataError(
                f"expected {len(self.feature_names)} features, "
                f"got {instance.shape}"
            )
        return predict_patient(self.decision_set, list(self.correctness_models),
                               self.scaler, self.calibrator, instance, scheme)

    def rule_texts(self) -> list[str]:
        return self.decision_set.render(self.feature_names)


def dataset_fingerprint(dataset: Dataset) -> str:
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(dataset.X).tobytes())
    h.update(np.ascontiguousarray(dataset.y).tobytes())
    return h.hexdigest()


def _floats(arr) -> list[float]:
    return [float(v) for v in np.asarray(arr).ravel()]


def bundle_to_dict(bundle: ModelBundle) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "schema": {
            "columns": list(bundle.schema.columns),
            "features": [
                {"name": f.name, "kind": f.kind, "missing": f.missing}
                for f in bundle.schema.features
            ],
            "label": {
                "name": bundle.schema.label_name,
                "positive_when": {
                    "op": bundle.schema.positive_op,
                    "value": bundle.schema.positive_value,
                },
            },
        },
        "scaler": {"mean": _floats(bundle.scaler.mean),
                   "scale": _floats(bundle.scaler.scale)},
        "decision_set": {
            "rules": [
                {
                    "conditions": [
                        {"feature_index": c.feature_index,
                         "comparator": c.comparator,
                         "threshold": c.threshold}
                        for c in r.conditions
                    ],
                    "then_class": r.then_class,
                    "else_class": r.else_class,
                }
                for r in bundle.decision_set.rules
            ],
            "global_accuracies": list(bundle.decision_set.global_accuracies),
            "flags": list(bundle.decision_set.flags),
        },
        "correctness_models": [
            {
                "rule_index": m.rule_index,
                "train_correctness_rate": m.train_correctness_rate,
                "constant_prc": m.constant_prc,
                "model": None if m.model is None else {
                    "weights": _floats(m.model.weights),
                    "intercept": m.model.intercept,
                    "penalty": m.model.penalty,
                    "strength": m.model.strength,
                    "converged": m.model.converged,
                    "n_iterations": m.model.n_iterations,
                },
            }
            for m in bundle.correctness_models
        ],
        "calibrator": {"slope": bundle.calibrator.slope,
                       "offset": bundle.calibrator.offset},
        "feature_ranges": [list(r) for r in bundle.feature_ranges],
        "metadata": bundle.metadata,
    }


def serialize_bundle(bundle: ModelBundle) -> bytes:
    doc = bundle_to_dict(bundle)
    return json.dumps(doc, sort_keys=True, indent=1).encode("utf-8")


def _require(doc: dict, key: str, path: str):
    if key not in doc:
        raise BundleFormatError(f"missing {path}.{key}")
    return doc[key]


def deserialize_bundle(data: bytes) -> ModelBundle:
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise BundleFormatError(f"bundle is not valid JSON: {exc}") from exc
    version = _require(doc, "format_version", "$")
    if version != FORMAT_VERSION:
        raise BundleFormatError(
            f"unsupported bundle format_version {version}; "
            f"this build reads version {FORMAT_VERSION}"
        )
    try:
        s = doc["schema"]
        schema = Schema(
            columns=tuple(s["columns"]),
            features=tuple(FeatureSpec(f["name"], f["kind"], f["missing"])
                           for f in s["features"]),
            label_name=s["label"]["name"],
            positive_op=s["label"]["positive_when"]["op"],
            positive_value=s["label"]["positive_when"]["value"],
        )
        scaler = Scaler(np.asarray(doc["scaler"]["mean"]),
                        np.asarray(doc["scaler"]["scale"]))
        ds = doc["decision_set"]
        rules = tuple(
            Rule(
                tuple(Condition(c["feature_index"], c["comparator"],
                                c["threshold"])
                      for c in r["conditions"]),
                r["then_class"], r["else_class"],
            )
            for r in ds["rules"]
        )
        decision_set = DecisionSet(rules, tuple(ds["global_accuracies"]),
                                   tuple(ds.get("flags", [])))
        models = tuple(
            CorrectnessModel(
                rule_index=m["rule_index"],
                model=None if m["model"] is None else LinearModel(
                    weights=np.asarray(m["model"]["weights"]),
                    intercept=m["model"]["intercept"],
                    penalty=m["model"]["penalty"],
                    strength=m["model"]["strength"],
                    converged=m["model"]["converged"],
                    n_iterations=m["model"]["n_iterations"],
                ),
                constant_prc=m["constant_prc"],
                train_correctness_rate=m["train_correctness_rate"],
            )
            for m in doc["correctness_models"]
        )
        calibrator = Calibrator(doc["calibrator"]["slope"],
                                doc["calibrator"]["offset"])
        ranges = tuple((float(lo), float(hi))
                       for lo, hi in doc["feature_ranges"])
        return ModelBundle(schema, scaler, decision_set, models, calibrator,
                           ranges, doc["metadata"])
    except (KeyError, TypeError, ValueError) as exc:
        raise BundleFormatError(f"malformed bundle: {exc}") from exc


class BundleHolder:
    """Atomic snapshot holder: reads see either the old or the new bundle."""

    def __init__(self, bundle: ModelBundle):
        self._bundle = bundle

    @property
    def bundle(self) -> ModelBundle:
        return self._bundle

    def swap(self, bundle: ModelBundle):
        self._bundle = bundle


def create_app(holder: BundleHolder, static_dir: str | None = None):
    app = FastAPI(title="cdss", docs_url=None, redoc_url=None)

    @app.get("/api/health")
    def health():
        b = holder.bundle
        return {"status": "ok",
                "fingerprint": b.metadata.get("dataset_fingerprint")}

    @app.get("/api/model")
    def model():
        b = holder.bundle
        return {
            "rules": [
                {"text": t, "global_accuracy": a}
                for t, a in zip(b.rule_texts(),
                                b.decision_set.global_accuracies)
            ],
            "flags": list(b.decision_set.flags),
            "metadata": b.metadata,
        }

    @app.get("/api/schema")
    def schema():
        b = holder.bundle
        return {
            "features": [
                {"name": f.name, "kind": f.kind,
                 "min": b.feature_ranges[i][0],
                 "max": b.feature_ranges[i][1]}
                for i, f in enumerate(b.schema.features)
            ],
        }

    @app.post("/api/predict")
    async def predict(request: Request):
        b = holder.bundle
        try:
            body = await request.json()
        except Exception:
            return JSONResponse({"error": "request body must be JSON"},
                                status_code=400)
        if not isinstance(body, dict) or not isinstance(body.get("features"), dict):
            return JSONResponse({"error": "body must contain a features object"},
                                status_code=400)
        scheme = body.get("scheme", "personalized")
        if scheme not in ("non_weighted", "weighted", "personalized"):
            return JSONResponse({"error": f"unknown scheme {scheme!r}"},
                                status_code=400)
        try:
            instance = b.instance_from_mapping(body["features"])
        except DataError as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        except ValueError as exc:
            return JSONResponse({"error": str(exc)}, status_code=422)
        result = b.predict(instance, scheme)
        return result.to_api_dict(b.rule_texts())

    @app.exception_handler(Exception)
    async def on_error(request, exc):
        return JSONResponse({"error": "internal error"}, status_code=500)

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True),
                  name="ui")
    return app
