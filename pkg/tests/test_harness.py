"""Scoring backends, the journaling runner, and the HTTP scoring protocol."""

import json
import math
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest
import requests

from modalbench.clients import (
    BackendError,
    HttpBackend,
    OfflineBackend,
    OracleBackend,
    UniformBackend,
)
from modalbench.runner import EvalSummary, Response, content_hash, read_results, run_evaluation
from modalbench.toylm import start_server


def test_uniform_backend_is_exact(small_items, tmp_path):
    path, items = small_items
    one_per_form = items[::5]  # 24 forms, half entailments
    summary = run_evaluation(one_per_form, UniformBackend(), tmp_path / "u.jsonl")
    assert summary.mean_soft_accuracy == pytest.approx(0.5, abs=1e-12)
    assert summary.mean_prompt_perplexity == pytest.approx(2.0, abs=1e-9)
    assert summary.n_items == 24 and summary.n_scored == 24
    # ties break toward Yes, which is right on exactly the entailment half
    assert summary.greedy_accuracy == pytest.approx(0.5, abs=1e-12)


def test_oracle_backend_recovers_labels(small_items, tmp_path):
    path, items = small_items
    summary = run_evaluation(items[:24], OracleBackend(confidence=0.9), tmp_path / "o.jsonl")
    assert summary.mean_soft_accuracy == pytest.approx(0.9, abs=1e-12)
    assert summary.greedy_accuracy == 1.0
    with pytest.raises(ValueError):
        OracleBackend(confidence=1.0)


def test_offline_backend(small_items, tmp_path):
    path, items = small_items
    subset = items[:3]
    score_file = tmp_path / "scores.jsonl"
    with open(score_file, "w") as fh:
        for item in subset:
            fh.write(
                json.dumps(
                    {
                        "item_id": item.item_id,
                        "logp_yes": -0.2 if item.ground_truth == "Yes" else -3.0,
                        "logp_no": -3.0 if item.ground_truth == "Yes" else -0.2,
                        "prompt_token_logps": [-1.0, -2.0],
                    }
                )
                + "\n"
            )
    backend = OfflineBackend(score_file, model="frozen")
    summary = run_evaluation(subset, backend, tmp_path / "off.jsonl")
    assert summary.model == "frozen"
    assert summary.greedy_accuracy == 1.0
    assert summary.mean_prompt_perplexity == pytest.approx(math.exp(1.5), abs=1e-9)
    with pytest.raises(BackendError, match="no offline score"):
        run_evaluation(items[:4], backend, tmp_path / "off2.jsonl")


def test_offline_backend_rejects_malformed_file(tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"item_id": "a", "logp_yes": -1.0, "logp_no": -1.0}\n{"item_id": "b"}\n')
    with pytest.raises(BackendError, match="bad.jsonl:2"):
        OfflineBackend(bad)


def test_candidate_mapping_is_case_insensitive(small_items, tmp_path):
    path, items = small_items
    summary = run_evaluation(
        items[:2],
        OracleBackend(),
        tmp_path / "c.jsonl",
        candidates=("YES", "no"),
    )
    assert summary.greedy_accuracy == 1.0
    with pytest.raises(ValueError):
        run_evaluation(items[:2], OracleBackend(), tmp_path / "c2.jsonl", candidates=("A", "B"))


def test_content_hash_sensitivity():
    base = content_hash("m", "prompt", (" Yes", " No"), True)
    assert len(base) == 16
    assert base == content_hash("m", "prompt", (" Yes", " No"), True)
    assert base != content_hash("m2", "prompt", (" Yes", " No"), True)
    assert base != content_hash("m", "prompt!", (" Yes", " No"), True)
    assert base != content_hash("m", "prompt", (" Yes", " Nope"), True)
    assert base != content_hash("m", "prompt", (" Yes", " No"), False)


class _CountingBackend:
    """Wraps another backend and counts how many items it actually scores."""

    def __init__(self, inner):
        self.inner = inner
        self.model = inner.model
        self.calls = []

    def score_item(self, item, candidates, echo_prompt):
        self.calls.append(item.item_id)
        return self.inner.score_item(item, candidates, echo_prompt)


def test_resume_skips_already_scored_items(small_items, tmp_path):
    path, items = small_items
    out = tmp_path / "resume.jsonl"
    first = _CountingBackend(UniformBackend())
    run_evaluation(items[:10], first, out)
    assert len(first.calls) == 10

    second = _CountingBackend(UniformBackend())
    summary = run_evaluation(items[:30], second, out)
    assert len(second.calls) == 20
    assert set(second.calls).isdisjoint(first.calls)
    assert summary.n_items == 30 and summary.n_scored == 20

    # a changed model invalidates every journal line
    third = _CountingBackend(OracleBackend())
    run_evaluation(items[:30], third, out)
    assert len(third.calls) == 30


def test_resume_tolerates_torn_lines(small_items, tmp_path):
    path, items = small_items
    out = tmp_path / "torn.jsonl"
    run_evaluation(items[:6], UniformBackend(), out)
    with open(out, "a") as fh:
        fh.write('{"kind": "response", "item_id": "trunca')  # simulated crash mid-write
    counting = _CountingBackend(UniformBackend())
    summary = run_evaluation(items[:6], counting, out)
    assert counting.calls == []  # aggregate line and torn tail ignored, all 6 reused
    assert summary.n_scored == 0


def test_final_file_is_sorted_with_trailing_aggregate(small_items, tmp_path):
    path, items = small_items
    out = tmp_path / "sorted.jsonl"
    shuffled = list(reversed(items[:12]))
    run_evaluation(shuffled, UniformBackend(), out)
    lines = [json.loads(line) for line in out.read_text().splitlines()]
    assert [l["kind"] for l in lines] == ["response"] * 12 + ["aggregate"]
    ids = [l["item_id"] for l in lines[:-1]]
    assert ids == sorted(ids)

    responses, summary = read_results(out)
    assert isinstance(summary, EvalSummary)
    assert [r.item_id for r in responses] == ids
    assert all(isinstance(r, Response) for r in responses)


def test_no_resume_rescores_everything(small_items, tmp_path):
    path, items = small_items
    out = tmp_path / "norerun.jsonl"
    run_evaluation(items[:4], UniformBackend(), out)
    counting = _CountingBackend(UniformBackend())
    run_evaluation(items[:4], counting, out, resume=False)
    assert len(counting.calls) == 4


def test_progress_callback(small_items, tmp_path):
    path, items = small_items
    seen = []
    run_evaluation(
        items[:5],
        UniformBackend(),
        tmp_path / "p.jsonl",
        progress=lambda done, total: seen.append((done, total)),
    )
    assert seen == [(i, 5) for i in range(1, 6)]


# -- the toy language model and its HTTP server -------------------------------


def test_char_model_scores_are_logprobs(toy_lm):
    logps = toy_lm.char_logprobs("Answer:")
    assert len(logps) == len("Answer:")
    assert all(lp < 0.0 for lp in logps)
    body = toy_lm.score("Question?", ["Answer: Yes", "Answer: No"], True)
    assert len(body["candidate_logprobs"]) == 2
    assert len(body["prompt_token_logprobs"]) == len("Question?")


def test_toy_model_prefers_trained_text(toy_lm):
    familiar = sum(toy_lm.char_logprobs("Jane is watching a show."))
    weird = sum(toy_lm.char_logprobs("Xzqv gj kkwrp zzt qqqj."))
    assert familiar > weird


@pytest.fixture(scope="module")
def toy_server(toy_lm):
    server, thread, endpoint = start_server(toy_lm)
    yield endpoint
    server.shutdown()


def test_http_backend_matches_direct_scoring(small_items, toy_lm, toy_server, tmp_path):
    path, items = small_items
    item = items[0]
    backend = HttpBackend(endpoint=toy_server, model="toy")
    result = backend.score_item(item, (" Yes", " No"), True)
    direct = toy_lm.score(item.prompt, [" Yes", " No"], True)
    assert list(result.candidate_logprobs) == pytest.approx(direct["candidate_logprobs"])
    assert list(result.prompt_token_logprobs) == pytest.approx(direct["prompt_token_logprobs"])

    no_echo = backend.score_item(item, (" Yes", " No"), False)
    assert no_echo.prompt_token_logprobs is None


def test_http_run_end_to_end(small_items, toy_server, tmp_path):
    path, items = small_items
    backend = HttpBackend(endpoint=toy_server, model="toy")
    summary = run_evaluation(items[:8], backend, tmp_path / "http.jsonl")
    assert summary.n_scored == 8
    assert summary.mean_prompt_perplexity > 1.0


def test_health_endpoint(toy_server):
    health = toy_server.replace("/score", "/health")
    resp = requests.get(health, timeout=5)
    assert resp.status_code == 200
    assert resp.json() == {"ok": True, "model": "toy-trigram"}


def test_server_rejects_bad_requests(toy_server):
    resp = requests.post(toy_server, json={"prompt": 3, "candidates": [" Yes"]}, timeout=5)
    assert resp.status_code == 400
    resp = requests.post(toy_server, json={"prompt": "x", "candidates": []}, timeout=5)
    assert resp.status_code == 400


class _FlakyHandler(BaseHTTPRequestHandler):
    failures = 2
    hits = 0

    def log_message(self, *args):
        pass

    def do_POST(self):
        cls = type(self)
        cls.hits += 1
        if cls.hits <= cls.failures:
            self.send_response(503)
            self.end_headers()
            return
        body = json.dumps({"candidate_logprobs": [-1.0, -2.0]}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


def _serve(handler_cls):
    server = ThreadingHTTPServer(("127.0.0.1", 0), handler_cls)
    threading.Thread(target=server.serve_forever, daemon=True).start()
    host, port = server.server_address
    return server, f"http://{host}:{port}/score"


def test_http_backend_retries_transient_failures(small_items):
    path, items = small_items
    handler = type("Flaky", (_FlakyHandler,), {"failures": 2, "hits": 0})
    server, endpoint = _serve(handler)
    try:
        backend = HttpBackend(endpoint=endpoint, model="toy", backoff=0.01)
        result = backend.score_item(items[0], (" Yes", " No"), False)
        assert result.candidate_logprobs == (-1.0, -2.0)
        assert handler.hits == 3
    finally:
        server.shutdown()


def test_http_backend_gives_up_after_max_retries(small_items):
    path, items = small_items
    handler = type("Dead", (_FlakyHandler,), {"failures": 10**9, "hits": 0})
    server, endpoint = _serve(handler)
    try:
        backend = HttpBackend(endpoint=endpoint, model="toy", backoff=0.01, max_retries=2)
        with pytest.raises(BackendError, match="after 3 attempts"):
            backend.score_item(items[0], (" Yes", " No"), False)
        assert handler.hits == 3
    finally:
        server.shutdown()


class _NotFoundHandler(_FlakyHandler):
    def do_POST(self):
        type(self).hits += 1
        self.send_response(404)
        self.end_headers()


def test_http_backend_fails_fast_on_client_error(small_items):
    path, items = small_items
    handler = type("NotFound", (_NotFoundHandler,), {"hits": 0})
    server, endpoint = _serve(handler)
    try:
        backend = HttpBackend(endpoint=endpoint, model="toy", backoff=0.01)
        with pytest.raises(BackendError, match="HTTP 404"):
            backend.score_item(items[0], (" Yes", " No"), False)
        assert handler.hits == 1
    finally:
        server.shutdown()


def test_unreachable_endpoint(small_items):
    path, items = small_items
    backend = HttpBackend(
        endpoint="http://127.0.0.1:9/score", model="toy", backoff=0.0, max_retries=1
    )
    with pytest.raises(BackendError):
        backend.score_item(items[0], (" Yes", " No"), False)
