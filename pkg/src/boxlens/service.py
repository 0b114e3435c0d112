"""HTTP/JSON facade over one immutable session (dataset + model).

Every handler is read-only over state built once at startup, so requests
can run concurrently and a fixed session always returns identical bytes
for identical requests. Routes live under ``/api/v1/``; errors come back
as ``{"error": text}`` with a matching status code; CORS is open so the
companion browser UI can call from another origin.
"""

from __future__ import annotations

import json
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

import numpy as np

from .curves import contingency_at, score_curves
from .dataset import Dataset
from .explain import (
    DECREASE,
    INCREASE,
    impactful_changes,
    local_importance,
    model_weight_scale,
    partial_dependence,
    what_if,
)
from .models import Predictor, predict_batch
from .signatures import EmptySideError, ThresholdPair, build_signatures, signature_to_dict

API_PREFIX = "/api/v1"


class Session:
    """Immutable per-process state: data, model, and precomputed global curves."""

    def __init__(self, dataset: Dataset, model: Predictor, seed: int, objective: str = DECREASE):
        if dataset.has_missing:
            raise ValueError("service requires an imputed dataset")
        self.dataset = dataset
        self.model = model
        self.seed = seed
        self.objective = objective
        self.scores = predict_batch(model, dataset.rows)
        self.pdp = {
            meta.name: partial_dependence(model, dataset, meta.index)
            for meta in dataset.features
        }
        self.meta_doc = self._build_meta()

    def _build_meta(self) -> dict:
        weight = model_weight_scale(self.model, self.dataset)
        features = []
        for meta in self.dataset.features:
            features.append(
                {
                    "name": meta.name,
                    "index": meta.index,
                    "kind": meta.kind,
                    "min": meta.observed_min,
                    "max": meta.observed_max,
                    "grid_size": meta.grid_size,
                    "feasible": meta.feasible.to_schema() if meta.feasible else None,
                    "weight": float(weight[meta.index]) if weight is not None else None,
                }
            )
        return {
            "n_rows": self.dataset.n_rows,
            "model": self.model.descriptor,
            "seed": self.seed,
            "features": features,
        }

    def pdp_doc(self, name: str) -> dict:
        curve = self.pdp[name]
        hist = curve.histogram
        return {
            "feature": name,
            "grid": [float(v) for v in curve.grid],
            "values": [float(v) for v in curve.values],
            "histogram": {
                "bin_edges": [float(e) for e in hist.bin_edges],
                "counts": [int(c) for c in hist.counts],
            },
        }

    def whatif_doc(self, values: dict, row: int, objective: str) -> dict:
        return whatif_payload(self.model, self.dataset, values, row, objective)

    def curves_doc(self) -> dict:
        cs = score_curves(self.dataset.labels, self.scores)
        return {
            "thresholds": [float(t) for t in cs.thresholds],
            "tpr": [float(v) for v in cs.tpr],
            "fpr": [float(v) for v in cs.fpr],
            "precision": [float(v) for v in cs.precision],
            "recall": [float(v) for v in cs.recall],
            "accuracy": [float(v) for v in cs.accuracy],
            "auc": cs.auc,
        }

    def contingency_doc(self, t: float) -> dict:
        cm = contingency_at(self.dataset.labels, self.scores, t)
        return {"tp": cm.tp, "fp": cm.fp, "tn": cm.tn, "fn": cm.fn}

    def signatures_doc(self, body: dict) -> dict:
        try:
            tau_pos = float(body["tau_pos"])
            tau_neg = float(body["tau_neg"])
        except (KeyError, TypeError, ValueError):
            raise ValueError("body must carry numeric tau_pos and tau_neg") from None
        k_pos = _parse_k(body.get("k_pos", "auto"))
        k_neg = _parse_k(body.get("k_neg", "auto"))
        tp = ThresholdPair(tau_pos=tau_pos, tau_neg=tau_neg)
        sm = build_signatures(self.dataset, self.model, tp, k_pos, k_neg, self.seed)
        return signature_to_dict(sm)


def whatif_payload(model: Predictor, d: Dataset, values: dict, row: int, objective: str) -> dict:
    """One slider drag: snapped vector, score, importance, impactful changes."""
    if not 0 <= row < d.n_rows:
        raise ValueError(f"row {row} out of range [0, {d.n_rows})")
    for name, value in values.items():
        if not isinstance(value, (int, float)) or not np.isfinite(value):
            raise ValueError(f"feature {name!r}: value must be a finite number")
    evaluated, score = what_if(model, d.rows[row], values, d.features)
    report = local_importance(model, d, evaluated)
    changes = impactful_changes(model, d, evaluated, objective)
    return {
        "evaluated": [float(v) for v in evaluated],
        "score": score,
        "importance": {meta.name: float(report.importance[meta.index]) for meta in d.features},
        "impactful": [
            {
                "feature": d.features[c.feature].name,
                "current_value": c.current_value,
                "suggested_value": c.suggested_value,
                "delta": c.delta,
                "direction": c.direction,
            }
            for c in changes
        ],
    }


def _parse_k(raw) -> int | str:
    if raw == "auto":
        return "auto"
    try:
        return int(raw)
    except (TypeError, ValueError):
        raise ValueError(f"k must be 'auto' or an integer, got {raw!r}") from None


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    @property
    def session(self) -> Session:
        return self.server.session  # type: ignore[attr-defined]

    def _send(self, status: int, doc: dict) -> None:
        body = json.dumps(doc, separators=(",", ":"), sort_keys=True).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _error(self, status: int, message: str) -> None:
        self._send(status, {"error": message})

    def do_OPTIONS(self) -> None:  # CORS preflight
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_GET(self) -> None:
        parsed = urlparse(self.path)
        route = _strip_prefix(parsed.path)
        if route is None:
            self._error(404, f"unknown path {parsed.path}")
            return
        try:
            if route == "health":
                self._send(200, {"status": "ok"})
            elif route == "meta":
                self._send(200, self.session.meta_doc)
            elif route.startswith("pdp/"):
                name = route[len("pdp/"):]
                if name not in self.session.pdp:
                    self._error(404, f"unknown feature {name!r}")
                    return
                self._send(200, self.session.pdp_doc(name))
            elif route == "curves":
                self._send(200, self.session.curves_doc())
            elif route == "contingency":
                query = parse_qs(parsed.query)
                if "t" not in query:
                    self._error(400, "query parameter t is required")
                    return
                try:
                    t = float(query["t"][0])
                except ValueError:
                    self._error(400, f"threshold {query['t'][0]!r} is not a number")
                    return
                self._send(200, self.session.contingency_doc(t))
            else:
                self._error(404, f"unknown path {parsed.path}")
        except ValueError as exc:
            self._error(400, str(exc))

    def do_POST(self) -> None:
        parsed = urlparse(self.path)
        route = _strip_prefix(parsed.path)
        if route not in ("whatif", "signatures"):
            self._error(404, f"unknown path {parsed.path}")
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            try:
                body = json.loads(self.rfile.read(length) or b"{}")
            except json.JSONDecodeError as exc:
                self._error(400, f"invalid JSON body: {exc}")
                return
            if not isinstance(body, dict):
                self._error(400, "body must be a JSON object")
                return
            if route == "whatif":
                values = body.get("values", {})
                if not isinstance(values, dict):
                    self._error(400, "values must be an object of feature -> number")
                    return
                row = body.get("row", 0)
                if not isinstance(row, int):
                    self._error(400, "row must be an integer")
                    return
                objective = body.get("objective", self.session.objective)
                if objective not in (INCREASE, DECREASE):
                    self._error(400, f"objective must be '{INCREASE}' or '{DECREASE}'")
                    return
                self._send(200, self.session.whatif_doc(values, row, objective))
            else:
                self._send(200, self.session.signatures_doc(body))
        except EmptySideError as exc:
            self._error(409, str(exc))
        except ValueError as exc:
            self._error(400, str(exc))

def _strip_prefix(path: str) -> str | None:
    if path == "/health":  # convenience alias outside the versioned prefix
        return "health"
    if path.startswith(API_PREFIX + "/"):
        return path[len(API_PREFIX) + 1 :]
    return None


class ExplainServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address: tuple[str, int], session: Session):
        super().__init__(address, _Handler)
        self.session = session


def make_server(session: Session, host: str = "127.0.0.1", port: int = 0) -> ExplainServer:
    """Bind a threaded server; ``port=0`` picks a free ephemeral port."""
    return ExplainServer((host, port), session)
