"""The keypress-study service: store semantics, durability, HTTP layer."""

import json

import pytest
import requests

from modalbench.study import (
    INSTRUCTIONS_F_NO,
    INSTRUCTIONS_F_YES,
    StudyError,
    StudyStore,
    start_study_server,
)


@pytest.fixture()
def store(small_items, tmp_path):
    path, items = small_items
    s = StudyStore(items, tmp_path / "journal.jsonl", n_trials=24, seed=42)
    yield s
    s.close()


def answer_correctly(store, session, trial):
    mapping = session["key_mapping"]
    truth = store._items_by_id[trial["item_id"]].ground_truth
    key = next(k for k, answer in mapping.items() if answer == truth)
    return store.record_response(session["session_id"], trial["item_id"], key, 400)


def test_session_creation_payload(store):
    session = store.create_session()
    assert set(session) == {"session_id", "key_mapping", "instructions", "n_trials"}
    assert session["n_trials"] == 24
    assert session["key_mapping"] == {"F": "Yes", "J": "No"}
    assert session["instructions"] == INSTRUCTIONS_F_YES
    assert 'pressing "F" for Yes, and "J" for No.' in session["instructions"]

    second = store.create_session()
    assert second["key_mapping"] == {"F": "No", "J": "Yes"}
    assert second["instructions"] == INSTRUCTIONS_F_NO
    assert second["session_id"] != session["session_id"]


def test_mapping_alternates_within_one(store):
    for _ in range(9):
        store.create_session()
    f_yes, f_no = store.mapping_counts()
    assert f_yes + f_no == 9
    assert abs(f_yes - f_no) <= 1


def test_trial_sequence_covers_distinct_forms(store):
    session = store.create_session()
    sid = session["session_id"]
    seen_forms = []
    for i in range(24):
        trial = store.next_trial(sid)
        assert trial["done"] is False
        assert trial["trial_index"] == i
        assert trial["n_trials"] == 24
        assert len(trial["statements"]) in (1, 2)
        assert trial["question"].startswith("Question: ")
        assert "Answer:" not in trial["question"]
        seen_forms.append(trial["item_id"].rsplit(".", 1)[0])
        # re-requesting before answering returns the same trial
        assert store.next_trial(sid) == trial
        answer_correctly(store, session, trial)
    assert len(set(seen_forms)) == 24
    assert store.next_trial(sid) == {"done": True, "n_trials": 24}


def test_item_selection_is_deterministic_per_seed_and_index(small_items, tmp_path):
    path, items = small_items
    a = StudyStore(items, tmp_path / "a.jsonl", seed=7)
    b = StudyStore(items, tmp_path / "b.jsonl", seed=7)
    c = StudyStore(items, tmp_path / "c.jsonl", seed=8)
    try:
        sa = [a._sessions[a.create_session()["session_id"]].item_ids for _ in range(2)]
        sb = [b._sessions[b.create_session()["session_id"]].item_ids for _ in range(2)]
        sc = [c._sessions[c.create_session()["session_id"]].item_ids for _ in range(2)]
        assert sa == sb
        assert sa != sc
        assert sa[0] != sa[1]  # index enters the stream, so sessions differ
    finally:
        a.close(), b.close(), c.close()


def test_record_response_validation_order(store):
    session = store.create_session()
    sid = session["session_id"]
    trial = store.next_trial(sid)

    with pytest.raises(StudyError) as err:
        store.record_response("nope", trial["item_id"], "F", 400)
    assert err.value.code == "unknown_session"

    with pytest.raises(StudyError) as err:
        store.record_response(sid, trial["item_id"], "G", 400)
    assert err.value.code == "bad_key"

    for bad_rt in (10, 700_000, "fast", None, True):
        with pytest.raises(StudyError) as err:
            store.record_response(sid, trial["item_id"], "F", bad_rt)
        assert err.value.code == "bad_rt"

    with pytest.raises(StudyError) as err:
        store.record_response(sid, "propositional-disj_l-entail.0001", "F", 400)
    assert err.value.code == "conflict"

    # lower-case keys are accepted
    result = store.record_response(sid, trial["item_id"], "f", 400)
    assert result["ok"] is True and result["trial_index"] == 0

    with pytest.raises(StudyError) as err:
        store.record_response(sid, trial["item_id"], "J", 400)
    assert err.value.code == "duplicate"


def test_completed_session_conflicts(store):
    session = store.create_session()
    sid = session["session_id"]
    for _ in range(24):
        answer_correctly(store, session, store.next_trial(sid))
    with pytest.raises(StudyError) as err:
        store.record_response(sid, "propositional-disj_l-entail.0000", "F", 400)
    assert err.value.code in ("conflict", "duplicate")


def test_export_decodes_keys_through_the_mapping(store):
    session = store.create_session()  # F=Yes
    sid = session["session_id"]
    for _ in range(24):
        answer_correctly(store, session, store.next_trial(sid))
    lines = [json.loads(line) for line in store.export_lines()]
    assert len(lines) == 24
    for record in lines:
        assert set(record) == {
            "session_id",
            "trial_index",
            "item_id",
            "form_id",
            "modality",
            "arg_form",
            "ground_truth",
            "key",
            "answer",
            "correct",
            "rt_ms",
        }
        assert record["session_id"] == sid
        assert record["answer"] == session["key_mapping"][record["key"]]
        assert record["correct"] is True
        assert record["rt_ms"] == 400
    assert [r["trial_index"] for r in lines] == list(range(24))


def test_wal_replay_restores_sessions_and_progress(small_items, tmp_path):
    path, items = small_items
    journal = tmp_path / "journal.jsonl"
    first = StudyStore(items, journal, seed=42)
    session = first.create_session()
    sid = session["session_id"]
    for _ in range(5):
        answer_correctly(first, session, first.next_trial(sid))
    first.close()

    # a torn line from a crash mid-append must not break replay
    with open(journal, "a") as fh:
        fh.write('{"kind": "trial", "session_id": "' + sid + '", "trial')

    revived = StudyStore(items, journal, seed=42)
    try:
        trial = revived.next_trial(sid)
        assert trial["trial_index"] == 5
        assert trial["item_id"] == first._sessions[sid].item_ids[5]
        assert revived.mapping_counts() == (1, 0)
        # counterbalancing continues from the replayed count
        assert revived.create_session()["key_mapping"] == {"F": "No", "J": "Yes"}
    finally:
        revived.close()


def test_wal_is_written_before_the_ack(small_items, tmp_path):
    path, items = small_items
    journal = tmp_path / "journal.jsonl"
    store = StudyStore(items, journal, seed=42)
    try:
        session = store.create_session()
        trial = store.next_trial(session["session_id"])
        store.record_response(session["session_id"], trial["item_id"], "F", 123)
        kinds = [json.loads(l)["kind"] for l in journal.read_text().splitlines()]
        assert kinds == ["session", "trial"]
    finally:
        store.close()


def test_store_validates_construction(small_items, tmp_path):
    path, items = small_items
    with pytest.raises(ValueError, match="24 distinct forms"):
        StudyStore(items, tmp_path / "j1.jsonl", n_trials=25)
    with pytest.raises(ValueError):
        StudyStore(items, tmp_path / "j2.jsonl", n_trials=0)
    with pytest.raises(ValueError):
        StudyStore([], tmp_path / "j3.jsonl")


# -- HTTP layer ---------------------------------------------------------------


@pytest.fixture()
def study_server(small_items, tmp_path):
    path, items = small_items
    store = StudyStore(items, tmp_path / "http-journal.jsonl", seed=42)
    server, thread, base = start_study_server(store)
    yield base, store
    server.shutdown()
    store.close()


def test_http_full_participant_flow(study_server):
    base, store = study_server
    session = requests.post(f"{base}/sessions", timeout=5).json()
    sid = session["session_id"]
    assert session["key_mapping"] == {"F": "Yes", "J": "No"}

    answered = 0
    while True:
        trial = requests.get(f"{base}/sessions/{sid}/next", timeout=5).json()
        if trial["done"]:
            break
        key = "F" if store._items_by_id[trial["item_id"]].ground_truth == "Yes" else "J"
        ack = requests.post(
            f"{base}/sessions/{sid}/responses",
            json={"item_id": trial["item_id"], "key": key, "rt_ms": 250 + answered},
            timeout=5,
        )
        assert ack.status_code == 200
        assert ack.json()["ok"] is True
        answered += 1
    assert answered == 24

    export = requests.get(f"{base}/export", timeout=5)
    assert export.status_code == 200
    assert export.headers["Content-Type"] == "application/x-ndjson"
    records = [json.loads(line) for line in export.text.splitlines()]
    assert len(records) == 24
    assert all(r["correct"] for r in records)

    health = requests.get(f"{base}/health", timeout=5).json()
    assert health == {"ok": True, "sessions": 1, "n_trials": 24}


def test_http_error_statuses(study_server):
    base, store = study_server
    assert requests.get(f"{base}/sessions/ghost/next", timeout=5).status_code == 404

    session = requests.post(f"{base}/sessions", timeout=5).json()
    sid = session["session_id"]
    trial = requests.get(f"{base}/sessions/{sid}/next", timeout=5).json()

    bad_key = requests.post(
        f"{base}/sessions/{sid}/responses",
        json={"item_id": trial["item_id"], "key": "Q", "rt_ms": 400},
        timeout=5,
    )
    assert bad_key.status_code == 400
    assert bad_key.json()["error"] == "bad_key"

    bad_rt = requests.post(
        f"{base}/sessions/{sid}/responses",
        json={"item_id": trial["item_id"], "key": "F", "rt_ms": 1},
        timeout=5,
    )
    assert bad_rt.status_code == 400

    wrong_item = requests.post(
        f"{base}/sessions/{sid}/responses",
        json={"item_id": "propositional-disj_l-entail.0002", "key": "F", "rt_ms": 400},
        timeout=5,
    )
    assert wrong_item.status_code in (409, 400)

    ok = requests.post(
        f"{base}/sessions/{sid}/responses",
        json={"item_id": trial["item_id"], "key": "F", "rt_ms": 400},
        timeout=5,
    )
    assert ok.status_code == 200

    dup = requests.post(
        f"{base}/sessions/{sid}/responses",
        json={"item_id": trial["item_id"], "key": "F", "rt_ms": 400},
        timeout=5,
    )
    assert dup.status_code == 409
    body = dup.json()
    assert body["error"] == "duplicate"
    assert body["recorded"] is True  # the client may treat the answer as saved

    assert requests.get(f"{base}/unknown", timeout=5).status_code == 404
    assert requests.post(f"{base}/unknown", timeout=5).status_code == 404


def test_http_serves_static_bundle(small_items, tmp_path):
    path, items = small_items
    static = tmp_path / "static"
    static.mkdir()
    (static / "index.html").write_text("<!doctype html><title>study</title>")
    (static / "app.js").write_text("console.log('hi')")
    store = StudyStore(items, tmp_path / "j.jsonl")
    server, thread, base = start_study_server(store, static_dir=static)
    try:
        root = requests.get(f"{base}/", timeout=5)
        assert root.status_code == 200
        assert "text/html" in root.headers["Content-Type"]
        js = requests.get(f"{base}/app.js", timeout=5)
        assert js.status_code == 200
        missing = requests.get(f"{base}/nope.css", timeout=5)
        assert missing.status_code == 404
        traversal = requests.get(f"{base}/../j.jsonl", timeout=5)
        assert traversal.status_code in (400, 404)
        # API routes still win over static files
        assert requests.get(f"{base}/health", timeout=5).status_code == 200
    finally:
        server.shutdown()
        store.close()
