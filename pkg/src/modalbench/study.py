"""HTTP service for the keypress study.

Participants answer Yes/No questions with the F and J keys.  The service
owns everything the browser must not be trusted with: session creation
with alternating key mappings (F=Yes for even-numbered sessions, F=No for
odd), per-session trial selection and ordering, response validation, and
the export.  State is an append-only JSON-lines journal that is flushed
to disk *before* a response is acknowledged, and replayed on startup, so
a crashed server never loses an acknowledged keypress.

Trial payloads deliberately omit the ground truth and the answer meaning
of each key; the browser only ever sees statements, a question, and two
key labels.
"""

from __future__ import annotations

import json
import mimetypes
import os
import random
import secrets
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .realize import QuestionItem

__all__ = [
    "INSTRUCTIONS_F_NO",
    "INSTRUCTIONS_F_YES",
    "MAX_RT_MS",
    "MIN_RT_MS",
    "StudyError",
    "StudyStore",
    "start_study_server",
]

_INSTRUCTIONS_BASE = (
    "In this study, you will be presented with two statements followed by a "
    "question. Your task is to answer either Yes or No to the question, based "
    "on the information provided in the statements. Please respond quickly "
    "and accurately by pressing "
)
INSTRUCTIONS_F_YES = _INSTRUCTIONS_BASE + '"F" for Yes, and "J" for No.'
INSTRUCTIONS_F_NO = _INSTRUCTIONS_BASE + '"F" for No, and "J" for Yes.'

MIN_RT_MS = 50
MAX_RT_MS = 600_000

_KEY_MAPPINGS = (
    {"F": "Yes", "J": "No"},
    {"F": "No", "J": "Yes"},
)


class StudyError(Exception):
    """A rejected study request; ``code`` selects the HTTP status."""

    def __init__(self, code: str, message: str) -> None:
        super().__init__(message)
        self.code = code
        self.message = message


@dataclass
class _Session:
    session_id: str
    mapping_index: int  # 0: F=Yes, 1: F=No
    item_ids: tuple[str, ...]
    recorded: list[dict] = field(default_factory=list)

    @property
    def key_mapping(self) -> dict[str, str]:
        return dict(_KEY_MAPPINGS[self.mapping_index])

    @property
    def cursor(self) -> int:
        return len(self.recorded)


class StudyStore:
    """Session and response bookkeeping behind the HTTP service.

    Not thread-safe on its own; the HTTP layer serializes access.
    """

    def __init__(
        self,
        items: list[QuestionItem],
        journal_path: str | Path,
        n_trials: int = 24,
        seed: int = 42,
    ) -> None:
        if not items:
            raise ValueError("study needs a non-empty item list")
        self._items_by_id = {item.item_id: item for item in items}
        self._forms: dict[str, list[QuestionItem]] = {}
        for item in items:
            self._forms.setdefault(item.form_id, []).append(item)
        if n_trials < 1:
            raise ValueError("n_trials must be positive")
        if n_trials > len(self._forms):
            raise ValueError(
                f"cannot run {n_trials} trials with only {len(self._forms)} distinct forms"
            )
        self.n_trials = n_trials
        self.seed = seed
        self._sessions: dict[str, _Session] = {}
        self._order: list[str] = []  # session ids in creation order
        self._journal_path = Path(journal_path)
        self._replay()
        self._journal = open(self._journal_path, "a", encoding="utf-8")

    # -- journal --

    def _replay(self) -> None:
        if not self._journal_path.exists():
            return
        with open(self._journal_path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    raw = json.loads(line)
                except json.JSONDecodeError:
                    continue  # torn tail from a crash mid-write
                if raw.get("kind") == "session":
                    sess = _Session(
                        session_id=raw["session_id"],
                        mapping_index=int(raw["mapping_index"]),
                        item_ids=tuple(raw["item_ids"]),
                    )
                    self._sessions[sess.session_id] = sess
                    self._order.append(sess.session_id)
                elif raw.get("kind") == "trial":
                    sess = self._sessions.get(raw.get("session_id", ""))
                    if (
                        sess is not None
                        and raw.get("trial_index") == sess.cursor
                        and sess.cursor < len(sess.item_ids)
                        and raw.get("item_id") == sess.item_ids[sess.cursor]
                    ):
                        sess.recorded.append(raw)

    def _append(self, record: dict) -> None:
        self._journal.write(json.dumps(record, ensure_ascii=False))
        self._journal.write("\n")
        self._journal.flush()
        os.fsync(self._journal.fileno())

    def close(self) -> None:
        self._journal.close()

    # -- sessions --

    def create_session(self) -> dict:
        mapping_index = len(self._order) % 2
        rng = random.Random(f"{self.seed}:{len(self._order)}")
        picks = [rng.choice(self._forms[form]) for form in sorted(self._forms)]
        rng.shuffle(picks)
        item_ids = tuple(item.item_id for item in picks[: self.n_trials])
        session_id = secrets.token_urlsafe(12)
        while session_id in self._sessions:
            session_id = secrets.token_urlsafe(12)
        sess = _Session(session_id=session_id, mapping_index=mapping_index, item_ids=item_ids)
        self._append(
            {
                "kind": "session",
                "session_id": session_id,
                "mapping_index": mapping_index,
                "item_ids": list(item_ids),
            }
        )
        self._sessions[session_id] = sess
        self._order.append(session_id)
        return {
            "session_id": session_id,
            "key_mapping": sess.key_mapping,
            "instructions": INSTRUCTIONS_F_YES if mapping_index == 0 else INSTRUCTIONS_F_NO,
            "n_trials": self.n_trials,
        }

    def _session(self, session_id: str) -> _Session:
        sess = self._sessions.get(session_id)
        if sess is None:
            raise StudyError("unknown_session", f"no session {session_id}")
        return sess

    def next_trial(self, session_id: str) -> dict:
        """The current unanswered trial; stateless, so safe to re-request."""
        sess = self._session(session_id)
        if sess.cursor >= len(sess.item_ids):
            return {"done": True, "n_trials": len(sess.item_ids)}
        item = self._items_by_id[sess.item_ids[sess.cursor]]
        lines = item.prompt.split("\n")
        return {
            "done": False,
            "trial_index": sess.cursor,
            "n_trials": len(sess.item_ids),
            "item_id": item.item_id,
            "statements": lines[1:-2],
            "question": lines[-2],
        }

    def record_response(self, session_id: str, item_id: str, key: str, rt_ms) -> dict:
        sess = self._session(session_id)
        if not isinstance(key, str) or key.upper() not in ("F", "J"):
            raise StudyError("bad_key", f"key must be F or J, got {key!r}")
        key = key.upper()
        if not isinstance(rt_ms, (int, float)) or isinstance(rt_ms, bool):
            raise StudyError("bad_rt", "rt_ms must be a number")
        if not MIN_RT_MS <= rt_ms <= MAX_RT_MS:
            raise StudyError(
                "bad_rt", f"rt_ms {rt_ms} outside [{MIN_RT_MS}, {MAX_RT_MS}]"
            )
        answered = {r["item_id"] for r in sess.recorded}
        if item_id in answered:
            # a client retransmit after a lost acknowledgment; nothing to redo
            raise StudyError("duplicate", f"item {item_id} already answered")
        if sess.cursor >= len(sess.item_ids):
            raise StudyError("conflict", "session is already complete")
        expected = sess.item_ids[sess.cursor]
        if item_id != expected:
            raise StudyError(
                "conflict", f"expected a response for {expected}, got {item_id}"
            )
        record = {
            "kind": "trial",
            "session_id": session_id,
            "trial_index": sess.cursor,
            "item_id": item_id,
            "key": key,
            "answer": sess.key_mapping[key],
            "rt_ms": rt_ms,
        }
        self._append(record)  # durable before the ack
        sess.recorded.append(record)
        return {
            "ok": True,
            "trial_index": record["trial_index"],
            "next_index": sess.cursor,
            "done": sess.cursor >= len(sess.item_ids),
        }

    # -- export --

    def export_lines(self) -> list[str]:
        lines = []
        for session_id in self._order:
            sess = self._sessions[session_id]
            for rec in sess.recorded:
                item = self._items_by_id[rec["item_id"]]
                lines.append(
                    json.dumps(
                        {
                            "session_id": session_id,
                            "trial_index": rec["trial_index"],
                            "item_id": rec["item_id"],
                            "form_id": item.form_id,
                            "modality": item.modality,
                            "arg_form": item.arg_form,
                            "ground_truth": item.ground_truth,
                            "key": rec["key"],
                            "answer": rec["answer"],
                            "correct": rec["answer"] == item.ground_truth,
                            "rt_ms": rec["rt_ms"],
                        },
                        ensure_ascii=False,
                    )
                )
        return lines

    def mapping_counts(self) -> tuple[int, int]:
        """(sessions with F=Yes, sessions with F=No)."""
        f_yes = sum(
            1 for sid in self._order if self._sessions[sid].mapping_index == 0
        )
        return f_yes, len(self._order) - f_yes


_ERROR_STATUS = {
    "unknown_session": 404,
    "bad_key": 400,
    "bad_rt": 400,
    "conflict": 409,
    "duplicate": 409,
}


def _make_handler(store: StudyStore, lock: threading.Lock, static_dir: Path | None):
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, *args) -> None:
            pass

        def _send_json(self, status: int, body: dict) -> None:
            payload = json.dumps(body, ensure_ascii=False).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(payload)))
            self.end_headers()
            self.wfile.write(payload)

        def _send_error(self, exc: StudyError) -> None:
            status = _ERROR_STATUS.get(exc.code, 400)
            body = {"error": exc.code, "detail": exc.message}
            if exc.code == "duplicate":
                body["recorded"] = True
            self._send_json(status, body)

        def _read_body(self) -> dict:
            length = int(self.headers.get("Content-Length", "0"))
            raw = self.rfile.read(length) if length else b"{}"
            try:
                body = json.loads(raw.decode("utf-8") or "{}")
            except (json.JSONDecodeError, UnicodeDecodeError) as exc:
                raise StudyError("bad_key", f"request body is not JSON: {exc}") from exc
            if not isinstance(body, dict):
                raise StudyError("bad_key", "request body must be a JSON object")
            return body

        def do_POST(self) -> None:
            parts = [p for p in self.path.split("?")[0].split("/") if p]
            try:
                if parts == ["sessions"]:
                    with lock:
                        self._send_json(200, store.create_session())
                elif len(parts) == 3 and parts[0] == "sessions" and parts[2] == "responses":
                    body = self._read_body()
                    with lock:
                        result = store.record_response(
                            parts[1],
                            body.get("item_id", ""),
                            body.get("key", ""),
                            body.get("rt_ms"),
                        )
                    self._send_json(200, result)
                else:
                    self._send_json(404, {"error": "not_found", "detail": self.path})
            except StudyError as exc:
                self._send_error(exc)

        def do_GET(self) -> None:
            parts = [p for p in self.path.split("?")[0].split("/") if p]
            try:
                if len(parts) == 3 and parts[0] == "sessions" and parts[2] == "next":
                    with lock:
                        self._send_json(200, store.next_trial(parts[1]))
                elif parts == ["export"]:
                    with lock:
                        payload = "\n".join(store.export_lines())
                    if payload:
                        payload += "\n"
                    data = payload.encode("utf-8")
                    self.send_response(200)
                    self.send_header("Content-Type", "application/x-ndjson")
                    self.send_header("Content-Length", str(len(data)))
                    self.end_headers()
                    self.wfile.write(data)
                elif parts == ["health"]:
                    with lock:
                        f_yes, f_no = store.mapping_counts()
                    self._send_json(
                        200, {"ok": True, "sessions": f_yes + f_no, "n_trials": store.n_trials}
                    )
                elif static_dir is not None:
                    self._send_static(parts)
                else:
                    self._send_json(404, {"error": "not_found", "detail": self.path})
            except StudyError as exc:
                self._send_error(exc)

        def _send_static(self, parts: list[str]) -> None:
            rel = "/".join(parts) if parts else "index.html"
            target = (static_dir / rel).resolve()
            if not str(target).startswith(str(static_dir.resolve())) or not target.is_file():
                self._send_json(404, {"error": "not_found", "detail": self.path})
                return
            data = target.read_bytes()
            ctype = mimetypes.guess_type(target.name)[0] or "application/octet-stream"
            self.send_response(200)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

    return Handler


def start_study_server(
    store: StudyStore,
    host: str = "127.0.0.1",
    port: int = 0,
    static_dir: str | Path | None = None,
) -> tuple[ThreadingHTTPServer, threading.Thread, str]:
    """Serve the study API (and optionally a static UI bundle).

    Returns (server, thread, base URL); ``port=0`` binds an ephemeral port
    and ``server.shutdown()`` stops the daemon thread.
    """
    handler = _make_handler(
        store, threading.Lock(), Path(static_dir) if static_dir is not None else None
    )
    server = ThreadingHTTPServer((host, port), handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    base = f"http://{server.server_address[0]}:{server.server_address[1]}"
    return server, thread, base
