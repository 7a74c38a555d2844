import json
import threading
import urllib.request
from urllib.error import HTTPError

import numpy as np
import pytest

from pwll.datasets import gen_embedding_mixture
from pwll.loop import ExperimentConfig, run_experiment
from pwll.service import make_server


@pytest.fixture(scope="module")
def dataset():
    ds = gen_embedding_mixture(5, n_points=240, n_clusters=6, dim=8)
    # the service needs 2d coordinates for the scatter view
    return type(ds)(features=ds.features[:, :2], true_labels=ds.true_labels,
                    cluster_ids=ds.cluster_ids, name=ds.name)


@pytest.fixture
def server(dataset):
    config = ExperimentConfig(acquisition="norm", tau_mode="schedule", tau0=4.0,
                              K=6, n_queries=50, k=8)
    srv = make_server(dataset, config, port=0, seed=0)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    yield srv
    srv.shutdown()
    srv.server_close()


def call(server, path, body=None):
    port = server.server_address[1]
    url = f"http://127.0.0.1:{port}{path}"
    if body is None:
        req = urllib.request.Request(url)
    else:
        req = urllib.request.Request(url, data=json.dumps(body).encode(),
                                     headers={"Content-Type": "application/json"},
                                     method="POST")
    with urllib.request.urlopen(req) as resp:
        return resp.status, json.loads(resp.read())


def call_error(server, path, body=None):
    try:
        call(server, path, body)
    except HTTPError as err:
        return err.code, json.loads(err.read())
    raise AssertionError("expected an HTTP error")


def test_session_create_and_fetch(server, dataset):
    status, payload = call(server, "/api/session")
    assert status == 200
    assert payload["n_points"] == dataset.n_points
    assert payload["iteration"] == 0
    assert len(payload["labeled"]) == dataset.n_classes
    again = call(server, "/api/session")[1]
    assert again["labeled"] == payload["labeled"]


def test_unknown_session_404(server):
    code, payload = call_error(server, "/api/points?session=nope")
    assert code == 404


def test_points_and_suggest_consistent(server, dataset):
    _, points = call(server, "/api/points")
    assert len(points["x"]) == dataset.n_points
    assert len(points["predicted"]) == dataset.n_points
    _, suggest = call(server, "/api/suggest")
    idx = suggest["index"]
    assert idx not in points["labeled"]
    # suggestion is the argmax of the published scores
    scores = [(-np.inf if s is None else s) for s in points["scores"]]
    assert idx == int(np.argmax(scores))


def test_label_flow_conflict_and_range(server, dataset):
    _, session = call(server, "/api/session")
    labeled0 = session["labeled"][0]
    code, _ = call_error(server, "/api/label", {"index": labeled0, "class": 0})
    assert code == 409
    code, _ = call_error(server, "/api/label",
                         {"index": int((set(range(dataset.n_points))
                                        - set(session["labeled"])).pop()),
                          "class": dataset.n_classes})
    assert code == 400
    code, _ = call_error(server, "/api/label", {"index": 5})
    assert code == 400
    # state unchanged by the failures
    _, metrics = call(server, "/api/metrics")
    assert len(metrics["records"]) == 1

    _, suggest = call(server, "/api/suggest")
    idx = suggest["index"]
    status, result = call(server, "/api/label",
                          {"index": idx, "class": int(dataset.true_labels[idx])})
    assert status == 200
    assert result["iteration"] == 1
    assert result["suggestion"] != idx
    _, metrics = call(server, "/api/metrics")
    assert len(metrics["records"]) == 2
    assert metrics["records"][1]["query_index"] == idx
    # the fresh suggestion is again the argmax over the published scores
    _, points = call(server, "/api/points")
    scores = [(-np.inf if s is None else s) for s in points["scores"]]
    _, suggest = call(server, "/api/suggest")
    assert suggest["index"] == int(np.argmax(scores))


def test_http_sequence_matches_oracle_replay(dataset):
    # drive the service by always labeling the suggestion with ground truth,
    # then replay the recorded label sequence through the batch loop with an
    # explicit-list oracle: trajectories must agree exactly
    config = ExperimentConfig(acquisition="norm", tau_mode="schedule", tau0=4.0,
                              K=6, n_queries=12, k=8)
    srv = make_server(dataset, config, port=0, seed=0)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    try:
        recorded = {}
        _, session = call(srv, "/api/session")
        _, points = call(srv, "/api/points")
        for idx_str, cls in points["observed"].items():
            recorded[int(idx_str)] = int(cls)
        for _ in range(12):
            _, suggest = call(srv, "/api/suggest")
            idx = suggest["index"]
            cls = int(dataset.true_labels[idx])
            recorded[idx] = cls
            status, _ = call(srv, "/api/label", {"index": idx, "class": cls})
            assert status == 200
        _, metrics = call(srv, "/api/metrics")
    finally:
        srv.shutdown()
        srv.server_close()

    replay_log = run_experiment(dataset, config, lambda i: recorded[i], seed=0)
    http_rows = metrics["records"]
    assert len(http_rows) == 13
    for row, rec in zip(http_rows, replay_log.records[:13]):
        assert row["query_index"] == rec.query_index
        assert row["accuracy"] == rec.accuracy
        assert row["cluster_proportion"] == rec.cluster_proportion
        assert row["tau"] == rec.tau
