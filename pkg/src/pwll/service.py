"""HTTP/JSON session service for interactive human labeling.

One session per dataset by default; every label event recomputes the
reweighting, the class scores, the acquisition values, and the next
suggestion synchronously, exactly as the batch loop does, so an HTTP label
sequence can be replayed through `run_experiment` bit for bit. Mutations are
serialized per session; reads see the latest complete snapshot.
"""

import json
import threading
import time
from dataclasses import dataclass
from http import HTTPStatus
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

import numpy as np

from .errors import EmptyUnlabeledSet
from .graphs import build_knn_graph
from .loop import (IterationLog, IterationRecord, accuracy, choose_initial_labels,
                   cluster_proportion, _select)
from .reweighting import solve_gamma
from .solver import LabelState, classify, solve_pwll

__all__ = ["Session", "LabelingApp", "make_server", "serve"]

DEFAULT_SESSION = "default"


@dataclass(frozen=True)
class _Snapshot:
    """Consistent view of a session between label events."""

    labels: LabelState
    weights: object
    node_fn: object
    scores: object            # AcquisitionScores or None (random policy)
    suggestion: int           # -1 when nothing is left to suggest
    iteration: int
    tau: float


class Session:
    """Mutable labeling session around one dataset and graph."""

    def __init__(self, session_id, dataset, config, seed):
        self.id = session_id
        self.dataset = dataset
        self.config = config
        self.seed = seed
        self.graph = build_knn_graph(dataset.features, config.k)
        self.rng = np.random.default_rng(seed)
        self.log = IterationLog(dataset=dataset.name,
                                acquisition=config.acquisition, seed=seed)
        self._lock = threading.Lock()

        initial = choose_initial_labels(dataset, config.initial_labeling, self.rng,
                                        config.initial_indices)
        labels = LabelState(labeled=initial,
                            classes=dataset.true_labels[initial],
                            n_classes=dataset.n_classes)
        self._snapshot = self._recompute(labels, iteration=0, prev=None,
                                         query=-1, observed=-1)

    @property
    def snapshot(self):
        return self._snapshot

    def _recompute(self, labels, iteration, prev, query, observed):
        t0 = time.perf_counter()
        tau = self.config.tau_at(iteration)
        weights = solve_gamma(self.graph, labels.labeled,
                              x0=None if prev is None else prev.weights.raw)
        node_fn = solve_pwll(self.graph, weights, labels, tau,
                             warm_start=None if prev is None else prev.node_fn)
        unlabeled = np.setdiff1d(np.arange(self.dataset.n_points), labels.labeled)
        if unlabeled.size:
            suggestion, scores = _select(self.config, node_fn, unlabeled, None, self.rng)
        else:
            suggestion, scores = -1, None
        ms = (time.perf_counter() - t0) * 1e3
        record = IterationRecord(
            iteration=iteration, query_index=query, observed_class=observed,
            accuracy=accuracy(classify(node_fn), self.dataset, labels.labeled),
            cluster_proportion=cluster_proportion(labels.labeled, self.dataset),
            tau=tau, ms=ms)
        self.log.records.append(record)
        return _Snapshot(labels=labels, weights=weights, node_fn=node_fn,
                         scores=scores, suggestion=suggestion,
                         iteration=iteration, tau=tau)

    def label(self, index, cls):
        """Apply one label event; raises KeyError / ValueError for bad input."""
        with self._lock:
            snap = self._snapshot
            if not 0 <= index < self.dataset.n_points:
                raise ValueError(f"index {index} out of range")
            if not 0 <= cls < self.dataset.n_classes:
                raise ValueError(f"class {cls} out of range")
            if snap.labels.is_labeled(index):
                raise KeyError(f"index {index} is already labeled")
            labels = snap.labels.with_label(index, cls)
            self._snapshot = self._recompute(labels, snap.iteration + 1,
                                             prev=snap, query=index, observed=cls)
            return self._snapshot


class LabelingApp:
    """Session registry plus JSON encoding of the API payloads."""

    def __init__(self, dataset, config, seed=0):
        self.dataset = dataset
        self.config = config
        self.seed = seed
        self.sessions = {}
        self._lock = threading.Lock()

    def get_or_create(self, session_id=DEFAULT_SESSION):
        with self._lock:
            if session_id not in self.sessions:
                if session_id != DEFAULT_SESSION:
                    return None
                self.sessions[session_id] = Session(session_id, self.dataset,
                                                    self.config, self.seed)
            return self.sessions[session_id]

    def session_payload(self, session):
        snap = session.snapshot
        return {
            "id": session.id,
            "dataset": self.dataset.name,
            "n_points": self.dataset.n_points,
            "n_classes": self.dataset.n_classes,
            "n_clusters": self.dataset.n_clusters,
            "acquisition": self.config.acquisition,
            "policy": self.config.policy,
            "iteration": snap.iteration,
            "labeled": [int(i) for i in snap.labels.labeled],
        }

    def points_payload(self, session):
        snap = session.snapshot
        n = self.dataset.n_points
        scores = [None] * n
        if snap.scores is not None:
            for i, v in zip(snap.scores.indices, snap.scores.values):
                scores[int(i)] = float(v)
        return {
            "x": self.dataset.features[:, 0].tolist(),
            "y": self.dataset.features[:, 1].tolist(),
            "predicted": classify(snap.node_fn).tolist(),
            "scores": scores,
            "labeled": [int(i) for i in snap.labels.labeled],
            "observed": {str(int(i)): int(c) for i, c
                         in zip(snap.labels.labeled, snap.labels.classes)},
            "suggestion": int(snap.suggestion),
        }

    def metrics_payload(self, session):
        return {
            "records": [{
                "iteration": r.iteration,
                "query_index": r.query_index,
                "class": r.observed_class,
                "accuracy": r.accuracy,
                "cluster_proportion": r.cluster_proportion,
                "tau": r.tau,
                "ms": r.ms,
            } for r in session.log.records],
        }

    def label_payload(self, session, snap):
        last = session.log.records[-1]
        return {
            "ok": True,
            "iteration": snap.iteration,
            "accuracy": last.accuracy,
            "cluster_proportion": last.cluster_proportion,
            "tau": snap.tau,
            "suggestion": int(snap.suggestion),
        }


def make_handler(app, static_dir=None):
    static_root = Path(static_dir).resolve() if static_dir else None

    class Handler(BaseHTTPRequestHandler):
        def log_message(self, fmt, *args):
            pass

        def _json(self, status, payload):
            body = json.dumps(payload).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def _session(self, query):
            session_id = query.get("session", [DEFAULT_SESSION])[0]
            session = app.get_or_create(session_id)
            if session is None:
                self._json(HTTPStatus.NOT_FOUND,
                           {"error": f"unknown session {session_id!r}"})
            return session

        def do_GET(self):
            url = urlparse(self.path)
            query = parse_qs(url.query)
            if url.path == "/api/session":
                session = self._session(query)
                if session:
                    self._json(HTTPStatus.OK, app.session_payload(session))
            elif url.path == "/api/points":
                session = self._session(query)
                if session:
                    self._json(HTTPStatus.OK, app.points_payload(session))
            elif url.path == "/api/suggest":
                session = self._session(query)
                if session:
                    idx = session.snapshot.suggestion
                    self._json(HTTPStatus.OK, {"index": None if idx < 0 else int(idx)})
            elif url.path == "/api/metrics":
                session = self._session(query)
                if session:
                    self._json(HTTPStatus.OK, app.metrics_payload(session))
            elif url.path.startswith("/api/"):
                self._json(HTTPStatus.NOT_FOUND, {"error": "no such endpoint"})
            else:
                self._static(url.path)

        def do_POST(self):
            url = urlparse(self.path)
            query = parse_qs(url.query)
            if url.path != "/api/label":
                self._json(HTTPStatus.NOT_FOUND, {"error": "no such endpoint"})
                return
            session = self._session(query)
            if not session:
                return
            try:
                length = int(self.headers.get("Content-Length", 0))
                payload = json.loads(self.rfile.read(length) or b"{}")
                index = int(payload["index"])
                cls = int(payload["class"])
            except (KeyError, TypeError, ValueError, json.JSONDecodeError):
                self._json(HTTPStatus.BAD_REQUEST,
                           {"error": "body must be {\"index\": int, \"class\": int}"})
                return
            try:
                snap = session.label(index, cls)
            except KeyError as exc:
                self._json(HTTPStatus.CONFLICT, {"error": str(exc)})
                return
            except (ValueError, EmptyUnlabeledSet) as exc:
                self._json(HTTPStatus.BAD_REQUEST, {"error": str(exc)})
                return
            self._json(HTTPStatus.OK, app.label_payload(session, snap))

        def _static(self, path):
            if static_root is None:
                self._json(HTTPStatus.NOT_FOUND,
                           {"error": "no static assets configured"})
                return
            rel = path.lstrip("/") or "index.html"
            target = (static_root / rel).resolve()
            if not target.is_relative_to(static_root) or not target.is_file():
                self._json(HTTPStatus.NOT_FOUND, {"error": "not found"})
                return
            ctype = {"html": "text/html", "js": "text/javascript",
                     "css": "text/css", "json": "application/json",
                     "map": "application/json"}.get(target.suffix.lstrip("."),
                                                    "application/octet-stream")
            body = target.read_bytes()
            self.send_response(HTTPStatus.OK)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

    return Handler


def make_server(dataset, config, port=0, seed=0, static_dir=None):
    """Build (but do not start) the HTTP server; port 0 picks a free port."""
    app = LabelingApp(dataset, config, seed=seed)
    handler = make_handler(app, static_dir=static_dir)
    server = ThreadingHTTPServer(("127.0.0.1", port), handler)
    server.daemon_threads = True
    server.app = app
    return server


def serve(dataset, config, port, seed=0, static_dir=None):
    """Run the labeling service until interrupted."""
    server = make_server(dataset, config, port=port, seed=seed, static_dir=static_dir)
    host, actual_port = server.server_address
    print(f"serving {dataset.name} on http://{host}:{actual_port}/ "
          f"(api under /api/)", flush=True)
    try:
        server.serve_forever()
    finally:
        server.server_close()
