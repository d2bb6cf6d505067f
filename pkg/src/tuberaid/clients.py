"""Comment retrieval and toxicity scoring with mandatory offline fixture
modes.

Fixtures are the default everywhere; live mode talks to the real HTTP
endpoints but refuses to start unless the named credential environment
variable is set, and is never exercised by the test suite. Fixture layout:
one JSON file per video id for comments, one per text hash for scores.
"""

import hashlib
import json
import os
import threading
import time
from collections import deque
from dataclasses import dataclass
from pathlib import Path

from .ingest import Comment


class ClientError(Exception):
    pass


class NotFoundError(ClientError):
    pass


class QuotaError(ClientError):
    pass


class CommentsDisabledError(ClientError):
    pass


class TransportError(ClientError):
    pass


@dataclass
class FetchConfig:
    mode: str = "fixture"                     # fixture | live
    fixture_dir: str | Path = "fixtures/comments"
    endpoint: str = "https://www.googleapis.com/youtube/v3/commentThreads"
    credential_env: str = "YOUTUBE_API_KEY"   # name only, never a literal key
    rate_limit: float = 5.0                   # requests per second
    max_retries: int = 3

    def credential(self):
        key = os.environ.get(self.credential_env)
        if not key:
            raise ClientError(
                f"live mode requires the {self.credential_env} environment variable")
        return key


class RateLimiter:
    """Sliding-window limiter: at most ``rate`` acquisitions per second."""

    def __init__(self, rate: float, clock=time.monotonic, sleep=time.sleep):
        self.rate = rate
        self.clock = clock
        self.sleep = sleep
        self._stamps = deque()
        self._lock = threading.Lock()

    def acquire(self):
        with self._lock:
            while True:
                now = self.clock()
                while self._stamps and now - self._stamps[0] >= 1.0:
                    self._stamps.popleft()
                if len(self._stamps) < self.rate:
                    self._stamps.append(now)
                    return
                self.sleep(1.0 - (now - self._stamps[0]))


def _fixture_path(config: FetchConfig, video_id: str) -> Path:
    return Path(config.fixture_dir) / f"{video_id}.json"


def fetch_comments(video_id: str, config: FetchConfig,
                   transport=None) -> list[Comment]:
    """Retrieve all comments and replies for a video.

    Fixture mode reads a committed JSON file keyed by video id (optionally
    paged). Live mode pages through the comment-thread endpoint with rate
    limiting and exponential backoff on quota errors; replies are flattened
    with is_reply=True.
    """
    if config.mode == "fixture":
        path = _fixture_path(config, video_id)
        if not path.exists():
            raise NotFoundError(f"no fixture for video {video_id}")
        with open(path) as fh:
            doc = json.load(fh)
        if doc.get("comments_disabled"):
            raise CommentsDisabledError(video_id)
        pages = doc["pages"] if "pages" in doc else [doc["comments"]]
        out = []
        for page in pages:
            for rec in page:
                out.append(Comment(video_id=video_id, comment_id=rec["comment_id"],
                                   timestamp=rec["ts"], text=rec["text"],
                                   is_reply=rec.get("is_reply", False)))
        return out
    if config.mode == "live":
        return _fetch_live(video_id, config, transport)
    raise ValueError(f"unknown fetch mode: {config.mode}")


def _fetch_live(video_id, config, transport=None):
    key = config.credential()
    if transport is None:
        import requests

        session = requests.Session()
        transport = lambda params: session.get(config.endpoint, params=params,
                                               timeout=30)
    limiter = RateLimiter(config.rate_limit)
    comments = []
    page_token = None
    while True:
        params = {"part": "snippet,replies", "videoId": video_id,
                  "maxResults": 100, "key": key}
        if page_token:
            params["pageToken"] = page_token
        payload = _request_with_backoff(transport, params, limiter, config, video_id)
        for item in payload.get("items", []):
            top = item["snippet"]["topLevelComment"]
            comments.append(_api_comment(video_id, top, is_reply=False))
            for reply in item.get("replies", {}).get("comments", []):
                comments.append(_api_comment(video_id, reply, is_reply=True))
        page_token = payload.get("nextPageToken")
        if not page_token:
            return comments


def _request_with_backoff(transport, params, limiter, config, video_id):
    delay = 1.0
    for attempt in range(config.max_retries + 1):
        limiter.acquire()
        try:
            resp = transport(params)
        except Exception as e:
            raise TransportError(str(e)) from e
        if resp.status_code == 200:
            return resp.json()
        if resp.status_code == 403:
            body = resp.text
            if "commentsDisabled" in body:
                raise CommentsDisabledError(video_id)
            if attempt < config.max_retries:
                time.sleep(delay)
                delay *= 2
                continue
            raise QuotaError(f"quota exhausted fetching {video_id}")
        raise TransportError(f"HTTP {resp.status_code} fetching {video_id}")
    raise QuotaError(f"quota exhausted fetching {video_id}")


def _api_comment(video_id, item, is_reply):
    snippet = item["snippet"]
    ts = snippet.get("publishedAtEpoch")
    if ts is None:
        from datetime import datetime

        ts = int(datetime.fromisoformat(
            snippet["publishedAt"].replace("Z", "+00:00")).timestamp())
    return Comment(video_id=video_id, comment_id=item["id"], timestamp=int(ts),
                   text=snippet.get("textOriginal", ""), is_reply=is_reply)


# ---------------------------------------------------------------------------
# Toxicity scoring

@dataclass
class ToxicityScores:
    scores: dict[str, float]

    def __post_init__(self):
        for metric, value in self.scores.items():
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{metric}: score {value} outside [0,1]")


def text_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:24]


class LexiconScorer:
    """Deterministic offline scorer: score = fraction of tokens found in a
    small committed lexicon. Used as the test stand-in for commercial APIs."""

    DEFAULT_LEXICON = frozenset("""
        idiot stupid moron trash garbage loser scum hate awful pathetic
        disgusting worthless dumb clown ugly
    """.split())

    def __init__(self, lexicon=None, metric="Toxicity"):
        self.lexicon = frozenset(lexicon) if lexicon is not None else self.DEFAULT_LEXICON
        self.metric = metric

    def score(self, text: str) -> ToxicityScores:
        tokens = text.lower().split()
        if not tokens:
            return ToxicityScores({self.metric: 0.0})
        hits = sum(1 for t in tokens if t in self.lexicon)
        return ToxicityScores({self.metric: hits / len(tokens)})


class FixtureScorer:
    """Score lookup keyed by text hash in a committed fixture directory."""

    def __init__(self, fixture_dir):
        self.fixture_dir = Path(fixture_dir)

    def score(self, text: str) -> ToxicityScores:
        path = self.fixture_dir / f"{text_hash(text)}.json"
        if not path.exists():
            raise NotFoundError(f"no score fixture for hash {text_hash(text)}")
        with open(path) as fh:
            return ToxicityScores(json.load(fh))

    def store(self, text: str, scores: ToxicityScores):
        self.fixture_dir.mkdir(parents=True, exist_ok=True)
        path = self.fixture_dir / f"{text_hash(text)}.json"
        with open(path, "w") as fh:
            json.dump(scores.scores, fh, sort_keys=True)


class HttpScorer:
    """Live scorer against a Perspective-style HTTP endpoint."""

    def __init__(self, endpoint, credential_env="PERSPECTIVE_API_KEY",
                 metrics=("TOXICITY",), transport=None, rate_limit=1.0):
        self.endpoint = endpoint
        self.credential_env = credential_env
        self.metrics = metrics
        self.transport = transport
        self.limiter = RateLimiter(rate_limit)

    def score(self, text: str) -> ToxicityScores:
        key = os.environ.get(self.credential_env)
        if not key:
            raise ClientError(
                f"live scoring requires the {self.credential_env} environment variable")
        transport = self.transport
        if transport is None:
            import requests

            transport = lambda payload: requests.post(
                f"{self.endpoint}?key={key}", json=payload, timeout=30)
        self.limiter.acquire()
        payload = {"comment": {"text": text},
                   "requestedAttributes": {m: {} for m in self.metrics}}
        try:
            resp = transport(payload)
        except Exception as e:
            raise TransportError(str(e)) from e
        if resp.status_code != 200:
            raise TransportError(f"HTTP {resp.status_code} scoring text")
        body = resp.json()
        return ToxicityScores({
            m: body["attributeScores"][m]["summaryScore"]["value"]
            for m in self.metrics})


def score_comment(text: str, scorer) -> ToxicityScores:
    """Score one comment with the pluggable scorer implementation."""
    if not text.strip():
        raise ValueError("cannot score empty text")
    return scorer.score(text)
