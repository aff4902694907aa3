"""Labeled-user data model, JSONL ingestion, split statistics, synthetic corpora.

A corpus file is UTF-8 JSONL, one user object per line:

    {"id": "u1", "label": "depression", "posts": [{"text": "..."}, ...]}

Line order is irrelevant; post order within a user is significant and is
preserved everywhere.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np


class CorpusFormatError(ValueError):
    """Raised when a corpus file violates the JSONL schema."""


class Label(Enum):
    CONTROL = 0
    DEPRESSION = 1

    @classmethod
    def from_string(cls, s: str) -> "Label":
        key = s.strip().lower()
        if key == "depression":
            return cls.DEPRESSION
        if key == "control":
            return cls.CONTROL
        raise CorpusFormatError(f"unknown label: {s!r}")

    def to_string(self) -> str:
        return self.name.lower()


POSITIVE_LABEL = Label.DEPRESSION


@dataclass(frozen=True)
class Post:
    text: str
    created_order: int


@dataclass
class UserRecord:
    user_id: str
    label: Label
    posts: list[Post]


@dataclass
class SplitStats:
    """Per-label summary of one split, in the shape of a dataset table row."""

    split: str
    users_per_label: dict[Label, int]
    posts_per_label: dict[Label, int]
    mean_tokens: dict[Label, float]
    p95_tokens: dict[Label, int]

    def format_table(self) -> str:
        lines = [f"{'Label':<12}{'Users':>8}{'Posts':>10}{'AvgTok':>8}{'P95Tok':>8}"]
        for label in (Label.DEPRESSION, Label.CONTROL):
            lines.append(
                f"{label.to_string():<12}"
                f"{self.users_per_label[label]:>8}"
                f"{self.posts_per_label[label]:>10}"
                f"{round(self.mean_tokens[label]):>8}"
                f"{self.p95_tokens[label]:>8}"
            )
        return "\n".join(lines)


def nearest_rank_percentile(values: Sequence[float], p: float) -> float:
    """ceil(p/100 * n)-th order statistic of the sorted sample."""
    if not 0 < p <= 100:
        raise ValueError(f"percentile must be in (0, 100], got {p}")
    data = sorted(values)
    if not data:
        raise ValueError("empty sample")
    k = math.ceil(p / 100.0 * len(data))
    return data[k - 1]


def load_jsonl(path: str | Path, split: str = "") -> list[UserRecord]:
    """Load all user records from a JSONL corpus file, in file order."""
    records: list[UserRecord] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(
                    f"{path}: malformed JSON on line {lineno}: {exc.msg}"
                ) from exc
            try:
                user_id = obj["id"]
                label = Label.from_string(obj["label"])
                raw_posts = obj["posts"]
            except KeyError as exc:
                raise CorpusFormatError(
                    f"{path}: line {lineno}: missing field {exc}"
                ) from exc
            if user_id in seen:
                raise CorpusFormatError(
                    f"{path}: line {lineno}: duplicate user id {user_id!r}"
                )
            seen.add(user_id)
            posts = [Post(text=p["text"], created_order=i) for i, p in enumerate(raw_posts)]
            records.append(UserRecord(user_id=user_id, label=label, posts=posts))
    return records


def save_jsonl(records: Iterable[UserRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            obj = {
                "id": rec.user_id,
                "label": rec.label.to_string(),
                "posts": [{"text": p.text} for p in rec.posts],
            }
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def split_stats(
    records: Sequence[UserRecord],
    tokenizer: Callable[[str], Sequence[str]],
    split: str = "",
) -> SplitStats:
    """Per-label user/post counts plus mean and 95th-percentile tokens per post."""
    if not records:
        raise ValueError("split_stats requires a non-empty record list")
    users = {lab: 0 for lab in Label}
    posts = {lab: 0 for lab in Label}
    token_counts: dict[Label, list[int]] = {lab: [] for lab in Label}
    for rec in records:
        users[rec.label] += 1
        posts[rec.label] += len(rec.posts)
        for post in rec.posts:
            token_counts[rec.label].append(len(tokenizer(post.text)))
    mean_tokens = {}
    p95_tokens = {}
    for lab in Label:
        counts = token_counts[lab]
        mean_tokens[lab] = float(np.mean(counts)) if counts else 0.0
        p95_tokens[lab] = int(nearest_rank_percentile(counts, 95)) if counts else 0
    return SplitStats(
        split=split,
        users_per_label=users,
        posts_per_label=posts,
        mean_tokens=mean_tokens,
        p95_tokens=p95_tokens,
    )


# Synthetic corpus vocabulary: a shared pool both labels draw from, plus a
# disjoint signal pool per label so user aggregates are separable downstream.
SHARED_VOCAB_SIZE = 2000
SIGNAL_VOCAB_SIZE = 200
SIGNAL_PROB = 0.3
TOKENS_PER_POST = (5, 60)

_SHARED_TOKENS = [f"w{i}" for i in range(SHARED_VOCAB_SIZE)]
_SIGNAL_TOKENS = {
    Label.DEPRESSION: [f"dsig{i}" for i in range(SIGNAL_VOCAB_SIZE)],
    Label.CONTROL: [f"csig{i}" for i in range(SIGNAL_VOCAB_SIZE)],
}


def generate_synthetic(
    n_users_per_label: int,
    posts_range: tuple[int, int],
    seed: int,
) -> list[UserRecord]:
    """Deterministic matched corpus: equal user counts per label, posts per
    user uniform over posts_range, token slots drawn from the shared pool or
    (with probability SIGNAL_PROB) the owning label's signal pool."""
    if n_users_per_label < 1:
        raise ValueError("n_users_per_label must be >= 1")
    lo, hi = posts_range
    if not (1 <= lo <= hi <= 10000):
        raise ValueError(f"invalid posts_range: {posts_range}")
    rng = np.random.default_rng(seed)
    records: list[UserRecord] = []
    for label, prefix in ((Label.DEPRESSION, "dep"), (Label.CONTROL, "ctl")):
        signal = _SIGNAL_TOKENS[label]
        for u in range(n_users_per_label):
            n_posts = int(rng.integers(lo, hi + 1))
            posts = []
            for i in range(n_posts):
                n_tok = int(rng.integers(TOKENS_PER_POST[0], TOKENS_PER_POST[1] + 1))
                is_signal = rng.random(n_tok) < SIGNAL_PROB
                shared_idx = rng.integers(0, SHARED_VOCAB_SIZE, n_tok)
                signal_idx = rng.integers(0, SIGNAL_VOCAB_SIZE, n_tok)
                tokens = [
                    signal[signal_idx[t]] if is_signal[t] else _SHARED_TOKENS[shared_idx[t]]
                    for t in range(n_tok)
                ]
                posts.append(Post(text=" ".join(tokens), created_order=i))
            records.append(UserRecord(user_id=f"{prefix}{u:05d}", label=label, posts=posts))
    return records
