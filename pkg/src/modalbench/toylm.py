"""A tiny character-trigram language model behind the scoring HTTP protocol.

This exists so the full evaluation loop (HTTP client, journaling,
aggregation, reports) can run end to end without any external model
service.  The model is a Laplace-smoothed order-3 character model whose
"tokens" are characters; it is trained deterministically on rendered
questions plus the lexicon word lists, so text built from real lexicon
words is systematically less surprising to it than pseudo-word text.
"""

from __future__ import annotations

import json
import math
import threading
from collections import Counter
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .catalog import builtin_catalog
from .lexicon import natural_lexicon, sample_interpretations
from .realize import realize_question

__all__ = ["CharTrigramLM", "build_default_lm", "start_server", "training_corpus"]

_BOS = "\x02"
_UNK = "\x00"
_CONTEXT = 2  # chars of history per prediction (order 3)


class CharTrigramLM:
    def __init__(self, corpus: str, alpha: float = 0.1) -> None:
        if not corpus:
            raise ValueError("training corpus is empty")
        self.alpha = alpha
        self.vocab = sorted(set(corpus)) + [_UNK]
        self._index = {c: i for i, c in enumerate(self.vocab)}
        self._counts: dict[str, Counter[str]] = {}
        padded = _BOS * _CONTEXT + corpus
        for i in range(_CONTEXT, len(padded)):
            ctx = padded[i - _CONTEXT : i]
            self._counts.setdefault(ctx, Counter())[padded[i]] += 1

    def _norm(self, char: str) -> str:
        return char if char in self._index else _UNK

    def _logprob_char(self, context: str, char: str) -> float:
        counts = self._counts.get(context, None)
        total = sum(counts.values()) if counts else 0
        hits = counts.get(self._norm(char), 0) if counts else 0
        v = len(self.vocab)
        return math.log((hits + self.alpha) / (total + self.alpha * v))

    def char_logprobs(self, text: str, context: str = "") -> list[float]:
        """Per-character log-probabilities of ``text`` continuing ``context``."""
        history = (_BOS * _CONTEXT + "".join(self._norm(c) for c in context))[-_CONTEXT:]
        out = []
        for char in text:
            out.append(self._logprob_char(history, char))
            history = (history + self._norm(char))[-_CONTEXT:]
        return out

    def score(
        self, prompt: str, candidates: list[str], echo_prompt: bool
    ) -> dict[str, list[float]]:
        body: dict[str, list[float]] = {
            "candidate_logprobs": [
                sum(self.char_logprobs(cand, context=prompt)) for cand in candidates
            ]
        }
        if echo_prompt:
            body["prompt_token_logprobs"] = self.char_logprobs(prompt)
        return body


def training_corpus() -> str:
    """Deterministic training text: rendered questions plus raw word lists."""
    lexicon = natural_lexicon()
    interps = sample_interpretations(lexicon, 60, seed=0)
    parts: list[str] = []
    for entry in builtin_catalog():
        for index, interp in enumerate(interps):
            item = realize_question(entry, interp, index)
            parts.append(f"{item.prompt} {item.ground_truth}\n")
    parts.append(" ".join(lexicon.names) + "\n")
    parts.append(" ".join(lexicon.verb_phrases) + "\n")
    return "".join(parts)


def build_default_lm() -> CharTrigramLM:
    return CharTrigramLM(training_corpus())


class _Handler(BaseHTTPRequestHandler):
    lm: CharTrigramLM  # set by start_server on the subclass

    def log_message(self, *args) -> None:  # keep test output quiet
        pass

    def _send(self, status: int, body: dict) -> None:
        payload = json.dumps(body).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def do_GET(self) -> None:
        if self.path in ("/health", "/"):
            self._send(200, {"ok": True, "model": "toy-trigram"})
        else:
            self._send(404, {"error": f"no such path {self.path}"})

    def do_POST(self) -> None:
        try:
            length = int(self.headers.get("Content-Length", "0"))
            raw = json.loads(self.rfile.read(length).decode("utf-8"))
            prompt = raw["prompt"]
            candidates = raw["candidates"]
            echo = bool(raw.get("echo_prompt", False))
            if not isinstance(prompt, str) or not isinstance(candidates, list):
                raise ValueError("prompt must be a string and candidates a list")
            if not candidates or not all(isinstance(c, str) for c in candidates):
                raise ValueError("candidates must be a non-empty list of strings")
        except (ValueError, KeyError, TypeError) as exc:
            self._send(400, {"error": f"bad request: {exc}"})
            return
        self._send(200, self.lm.score(prompt, candidates, echo))


def start_server(
    lm: CharTrigramLM | None = None, host: str = "127.0.0.1", port: int = 0
) -> tuple[ThreadingHTTPServer, threading.Thread, str]:
    """Serve the scoring protocol; returns (server, thread, endpoint URL).

    ``port=0`` binds an ephemeral port.  The thread is a daemon; call
    ``server.shutdown()`` to stop it cleanly.
    """
    handler = type("BoundHandler", (_Handler,), {"lm": lm or build_default_lm()})
    server = ThreadingHTTPServer((host, port), handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    endpoint = f"http://{server.server_address[0]}:{server.server_address[1]}/score"
    return server, thread, endpoint
