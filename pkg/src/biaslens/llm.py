"""LLM-backed caption analyses: in-context classification and summarization.

Datasets are always anonymized as "distribution 1..K" with a seed-randomized
assignment, so no dataset name ever reaches the model.  Every outbound prompt
and inbound response can be persisted to an append-only JSONL log before any
parsing happens.
"""

from __future__ import annotations

import json
import os
import re
import time
from dataclasses import dataclass, field

from .errors import FormatError, InsufficientCaptions, TransportError
from .rng import Rng, fisher_yates

ENDPOINT_ENV = "BIASLENS_LLM_ENDPOINT"
API_KEY_ENV = "BIASLENS_LLM_API_KEY"
MODEL_ENV = "BIASLENS_LLM_MODEL"


class PromptLog:
    """Append-only JSONL log: {timestamp, direction, payload} per line."""

    def __init__(self, path):
        self.path = path

    def append(self, direction: str, payload: str) -> None:
        record = {
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
            "direction": direction,
            "payload": payload,
        }
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


class MockTransport:
    """Scripted transport for tests; records every prompt it receives."""

    def __init__(self, responses=None, reply_fn=None):
        self.responses = list(responses or [])
        self.reply_fn = reply_fn
        self.prompts: list[str] = []

    def send(self, prompt: str) -> str:
        self.prompts.append(prompt)
        if self.reply_fn is not None:
            return self.reply_fn(prompt)
        if not self.responses:
            raise TransportError("mock script exhausted")
        return self.responses.pop(0)


class HttpTransport:
    """Minimal chat-completion client; endpoint and token come from env vars.

    Retries only transport-level failures (connection errors, 5xx); any
    well-formed response is returned or rejected once.
    """

    def __init__(self, endpoint=None, api_key=None, model=None,
                 timeout: float = 60.0, retries: int = 2):
        self.endpoint = endpoint or os.environ.get(ENDPOINT_ENV)
        self.api_key = api_key or os.environ.get(API_KEY_ENV)
        self.model = model or os.environ.get(MODEL_ENV, "default")
        self.timeout = timeout
        self.retries = retries
        if not self.endpoint:
            raise TransportError(
                f"no endpoint configured (set {ENDPOINT_ENV})"
            )

    def send(self, prompt: str) -> str:
        import requests

        body = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0,
        }
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        last_error = None
        for _ in range(self.retries + 1):
            try:
                resp = requests.post(
                    self.endpoint, json=body, headers=headers, timeout=self.timeout
                )
            except requests.RequestException as exc:
                last_error = exc
                continue
            if resp.status_code >= 500:
                last_error = TransportError(f"server error {resp.status_code}")
                continue
            if resp.status_code != 200:
                raise TransportError(
                    f"request rejected with status {resp.status_code}"
                )
            try:
                return resp.json()["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError) as exc:
                raise TransportError(f"unexpected response body: {exc}") from exc
        raise TransportError(f"transport failed after retries: {last_error}")


def _send(transport, prompt: str, log: PromptLog | None) -> str:
    if log is not None:
        log.append("request", prompt)
    response = transport.send(prompt)
    if log is not None:
        log.append("response", response)
    return response


@dataclass(frozen=True)
class IclConfig:
    demos_per_dataset: int = 120
    anonymize: bool = True
    stop_window: int = 100
    stop_epsilon: float = 0.01

    def __post_init__(self):
        if self.demos_per_dataset < 1:
            raise ValueError("demos_per_dataset must be >= 1")
        if not self.anonymize:
            raise ValueError("prompts are always anonymized")


def _sample_captions(pool, count: int, seed: int, stream: str) -> list[str]:
    if len(pool) < count:
        raise InsufficientCaptions(
            f"need {count} captions, pool has {len(pool)}"
        )
    picks = fisher_yates(len(pool), Rng(seed, stream), k=count)
    return [pool[i] for i in picks]


def _assignment(k: int, seed: int, stream: str):
    """order[i] = dataset shown under the header "distribution i+1"."""
    return fisher_yates(k, Rng(seed, stream))


def _demo_block(order, demo_lists) -> str:
    parts = []
    for pos, dataset in enumerate(order):
        parts.append(f"distribution {pos + 1}:")
        parts.extend(f"- {caption}" for caption in demo_lists[dataset])
        parts.append("")
    return "\n".join(parts)


def build_icl_prompt(
    caption_sets,
    holdout: str,
    holdout_dataset: int,
    cfg: IclConfig,
    seed: int,
) -> tuple[str, int]:
    """Demonstrations grouped under anonymized headers plus one query.

    Returns (prompt, answer_key) where answer_key is the 1-based index the
    holdout's dataset was assigned for this prompt.
    """
    k = len(caption_sets)
    demos = [
        _sample_captions(pool, cfg.demos_per_dataset, seed, f"icl-demos:{d}")
        for d, pool in enumerate(caption_sets)
    ]
    order = _assignment(k, seed, "icl-assignment")
    prompt = (
        f"Below are example captions from {k} unlabeled caption distributions.\n\n"
        + _demo_block(order, demos)
        + "Which distribution does the following caption come from?\n"
        + f"caption: {holdout}\n"
        + f"Answer with only the distribution index (1-{k})."
    )
    answer_key = _position(order, holdout_dataset) + 1
    return prompt, answer_key


def _position(order, value) -> int:
    for i, v in enumerate(order):
        if v == value:
            return i
    raise ValueError(f"{value} not in assignment")


_INT_RE = re.compile(r"\d+")


def parse_icl_response(text: str, k: int):
    """First integer token in [1, k]; None when unparseable."""
    for match in _INT_RE.finditer(text):
        value = int(match.group())
        if 1 <= value <= k:
            return value
    return None


@dataclass(frozen=True)
class IclResult:
    curve: tuple[float, ...]  # running accuracy after each holdout
    final_accuracy: float
    n_holdouts: int
    n_unparseable: int
    stopped_early: bool


def run_icl_eval(
    caption_sets,
    transport,
    cfg: IclConfig,
    seed: int = 0,
    log: PromptLog | None = None,
) -> IclResult:
    """Iterate holdouts until the running accuracy settles.

    Holdouts rotate across datasets in a seeded shuffled order; each step
    redraws demonstrations from the remaining captions.  Evaluation stops once
    the range of the running accuracy over the last stop_window holdouts falls
    below stop_epsilon, or when the holdout pool is exhausted.
    """
    k = len(caption_sets)
    holdout_orders = [
        fisher_yates(len(pool), Rng(seed, f"icl-holdouts:{d}"))
        for d, pool in enumerate(caption_sets)
    ]
    curve: list[float] = []
    correct = 0
    unparseable = 0
    stopped = False
    step = 0
    max_steps = sum(max(len(pool) - cfg.demos_per_dataset, 0) for pool in caption_sets)
    while step < max_steps:
        d = step % k
        pool = caption_sets[d]
        used = step // k
        if used >= len(pool) - cfg.demos_per_dataset:
            step += 1
            continue
        holdout_idx = int(holdout_orders[d][used])
        holdout = pool[holdout_idx]
        remaining = list(caption_sets)
        remaining[d] = [c for i, c in enumerate(pool) if i != holdout_idx]
        prompt, answer_key = build_icl_prompt(
            remaining, holdout, d, cfg, seed + step + 1
        )
        response = _send(transport, prompt, log)
        parsed = parse_icl_response(response, k)
        if parsed is None:
            unparseable += 1
        elif parsed == answer_key:
            correct += 1
        curve.append(correct / (len(curve) + 1))
        if len(curve) >= cfg.stop_window:
            window = curve[-cfg.stop_window:]
            if max(window) - min(window) < cfg.stop_epsilon:
                stopped = True
                break
        step += 1
    return IclResult(
        curve=tuple(curve),
        final_accuracy=curve[-1] if curve else 0.0,
        n_holdouts=len(curve),
        n_unparseable=unparseable,
        stopped_early=stopped,
    )


@dataclass(frozen=True)
class SummaryResult:
    patterns: tuple[tuple[str, ...], ...]  # per dataset, iterations x per-iter
    bullets: tuple[tuple[str, ...], ...]  # per dataset, final condensed list
    raw_step1: tuple[str, ...] = field(repr=False)
    raw_step2: str = field(repr=False)


_DIST_LINE_RE = re.compile(r"^distribution\s+(\d+)\s*[:\-]\s*(.+)$", re.IGNORECASE)
_HEADER_RE = re.compile(r"^distribution\s+(\d+)\s*:?\s*$", re.IGNORECASE)


def _parse_pattern_lines(text: str, k: int) -> dict[int, list[str]]:
    found: dict[int, list[str]] = {i: [] for i in range(1, k + 1)}
    for line in text.splitlines():
        line = line.strip().lstrip("-* ").strip()
        m = _DIST_LINE_RE.match(line)
        if m and 1 <= int(m.group(1)) <= k:
            found[int(m.group(1))].append(m.group(2).strip())
    return found


def _parse_bullet_sections(text: str, k: int) -> dict[int, list[str]]:
    sections: dict[int, list[str]] = {}
    current = None
    for line in text.splitlines():
        stripped = line.strip()
        m = _HEADER_RE.match(stripped)
        if m and 1 <= int(m.group(1)) <= k:
            current = int(m.group(1))
            sections[current] = []
            continue
        if current is not None and stripped.startswith(("-", "*")):
            sections[current].append(stripped.lstrip("-* ").strip())
    return sections


def summarize_datasets(
    caption_sets,
    transport,
    iterations: int = 10,
    captions_per_iteration: int = 120,
    patterns_per_dataset: int = 2,
    bullets_per_dataset: int = 5,
    seed: int = 0,
    log: PromptLog | None = None,
) -> SummaryResult:
    """Two-step summarization: mine patterns repeatedly, then condense.

    Step 1 runs `iterations` times over fresh caption samples and asks for
    `patterns_per_dataset` distinctive patterns per distribution.  Step 2
    receives all accumulated patterns (iterations x patterns_per_dataset per
    dataset) and asks for exactly `bullets_per_dataset` bullets each.  Raw
    responses are preserved verbatim in the result.
    """
    k = len(caption_sets)
    patterns: list[list[str]] = [[] for _ in range(k)]
    raw_step1 = []
    for it in range(iterations):
        it_seed = seed + 1000 * (it + 1)
        samples = [
            _sample_captions(pool, captions_per_iteration, it_seed, f"summary:{d}")
            for d, pool in enumerate(caption_sets)
        ]
        order = _assignment(k, it_seed, "summary-assignment")
        prompt = (
            f"Below are captions sampled from {k} unlabeled caption distributions.\n\n"
            + _demo_block(order, samples)
            + f"Identify exactly {patterns_per_dataset} distinctive patterns for each "
            + "distribution. Answer one pattern per line in the form "
            + "'distribution <index>: <pattern>'."
        )
        response = _send(transport, prompt, log)
        raw_step1.append(response)
        parsed = _parse_pattern_lines(response, k)
        for pos in range(1, k + 1):
            if len(parsed[pos]) != patterns_per_dataset:
                raise FormatError(
                    f"iteration {it}: expected {patterns_per_dataset} patterns "
                    f"for distribution {pos}, found {len(parsed[pos])}"
                )
            dataset = int(order[pos - 1])
            patterns[dataset].extend(parsed[pos])

    final_order = _assignment(k, seed, "summary-final-assignment")
    parts = [
        f"Below are observed patterns for {k} caption distributions.",
        "",
    ]
    for pos, dataset in enumerate(final_order):
        parts.append(f"distribution {pos + 1}:")
        parts.extend(f"- {p}" for p in patterns[dataset])
        parts.append("")
    parts.append(
        f"Condense the patterns of each distribution into exactly "
        f"{bullets_per_dataset} bullet points. Answer with a "
        f"'distribution <index>:' header followed by '- ' bullets."
    )
    step2_prompt = "\n".join(parts)
    response = _send(transport, step2_prompt, log)
    sections = _parse_bullet_sections(response, k)
    bullets: list[tuple[str, ...]] = [()] * k
    for pos in range(1, k + 1):
        if pos not in sections or not sections[pos]:
            raise FormatError(f"no bullets found for distribution {pos}")
        bullets[int(final_order[pos - 1])] = tuple(sections[pos])
    return SummaryResult(
        patterns=tuple(tuple(p) for p in patterns),
        bullets=tuple(bullets),
        raw_step1=tuple(raw_step1),
        raw_step2=response,
    )
