"""Parsers for community dumps and comment archives, plus video-link extraction.

Source schemas differ between platforms (imageboard thread dumps name the
body field ``com``, link aggregators use ``url``), so field names are driven
by a per-source :class:`FieldMapping` instead of hard-coded parsers. Output
records use a fixed newline-delimited JSON interchange format.
"""

import gzip
import html
import json
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .text import tokenize_and_stem


class IngestError(Exception):
    """Raised for unrecoverable parse failures (file-level, not per-record)."""


@dataclass(frozen=True)
class Post:
    community_id: str
    thread_id: str
    post_id: str
    timestamp: int
    body: str
    url_field: str | None = None

    def __post_init__(self):
        if self.timestamp <= 0:
            raise ValueError(f"post {self.post_id}: timestamp must be > 0")


@dataclass(frozen=True)
class Comment:
    video_id: str
    comment_id: str
    timestamp: int
    text: str
    is_reply: bool = False

    def __post_init__(self):
        if self.timestamp <= 0:
            raise ValueError(f"comment {self.comment_id}: timestamp must be > 0")


class UrlForm(str, Enum):
    WATCH = "watch"
    SHORT = "short"
    MOBILE_WATCH = "mobile_watch"
    MOBILE_SHORT = "mobile_short"
    EMBED = "embed"


@dataclass(frozen=True)
class VideoLink:
    video_id: str
    url_form: UrlForm
    source_post: tuple[str, str, str] | None = None  # (community, thread, post)

    _ID_RE = re.compile(r"^[A-Za-z0-9_-]{11}$")

    def __post_init__(self):
        if not self._ID_RE.match(self.video_id):
            raise ValueError(f"invalid video id: {self.video_id!r}")


@dataclass
class CommunityCorpus:
    community_id: str
    documents: list[str] = field(default_factory=list)
    token_count: int = 0


@dataclass(frozen=True)
class FieldMapping:
    """Names of the id/timestamp/body fields in one source's raw records."""

    post_id: str = "id"
    timestamp: str = "time"
    body: str = "com"
    thread_id: str = "thread_id"
    url: str | None = None

    @classmethod
    def from_file(cls, path):
        with open(path) as fh:
            return cls(**json.load(fh))


@dataclass
class ParseResult:
    posts: list[Post]
    skipped: int = 0


_TAG_RE = re.compile(r"<[^>]+>")


def clean_body(raw: str) -> str:
    """Strip markup tags and decode HTML entities."""
    return html.unescape(_TAG_RE.sub(" ", raw)).strip()


def _open_maybe_gzip(source):
    if isinstance(source, (str, Path)):
        path = Path(source)
        raw = path.read_bytes()
    else:
        raw = source.read()
        if isinstance(raw, str):
            raw = raw.encode("utf-8")
    if raw[:2] == b"\x1f\x8b":
        raw = gzip.decompress(raw)
    return raw


def parse_thread_dump(source, community_id: str,
                      mapping: FieldMapping = FieldMapping(),
                      default_thread: str = "") -> ParseResult:
    """Parse a newline- or array-delimited JSON dump into canonical posts.

    Records missing an id or timestamp are skipped and tallied, as are
    individually malformed JSON lines. A file that yields no parseable JSON
    at all is a hard error naming the file and byte offset.
    """
    name = str(source) if isinstance(source, (str, Path)) else "<stream>"
    raw = _open_maybe_gzip(source)
    text = raw.decode("utf-8", errors="replace")

    stripped = text.lstrip()
    if stripped.startswith("["):
        try:
            records = json.loads(text)
        except json.JSONDecodeError as e:
            raise IngestError(f"{name}: unparseable JSON array at byte {e.pos}") from e
        return _records_to_posts(records, community_id, mapping, default_thread)

    records = []
    skipped = 0
    parsed_any = False
    offset = 0
    first_error_offset = None
    for line in text.splitlines(keepends=True):
        if line.strip():
            try:
                records.append(json.loads(line))
                parsed_any = True
            except json.JSONDecodeError:
                skipped += 1
                if first_error_offset is None:
                    first_error_offset = offset
        offset += len(line.encode("utf-8"))
    if not parsed_any:
        at = first_error_offset if first_error_offset is not None else 0
        raise IngestError(f"{name}: wholly unparseable file (first failure at byte {at})")
    result = _records_to_posts(records, community_id, mapping, default_thread)
    result.skipped += skipped
    return result


def _records_to_posts(records, community_id, mapping, default_thread):
    posts = []
    skipped = 0
    seen = set()
    for rec in records:
        if not isinstance(rec, dict):
            skipped += 1
            continue
        pid = rec.get(mapping.post_id)
        ts = rec.get(mapping.timestamp)
        if pid is None or ts is None:
            skipped += 1
            continue
        try:
            ts = int(ts)
        except (TypeError, ValueError):
            skipped += 1
            continue
        if ts <= 0:
            skipped += 1
            continue
        thread = str(rec.get(mapping.thread_id, default_thread))
        key = (thread, str(pid))
        if key in seen:
            skipped += 1
            continue
        seen.add(key)
        url = rec.get(mapping.url) if mapping.url else None
        posts.append(Post(
            community_id=community_id,
            thread_id=thread,
            post_id=str(pid),
            timestamp=ts,
            body=clean_body(str(rec.get(mapping.body, ""))),
            url_field=str(url) if url is not None else None,
        ))
    return ParseResult(posts=posts, skipped=skipped)


# The five recognized URL shapes: watch?v=, youtu.be/, their m.-prefixed
# variants, and /embed/. Matches are reported in order of appearance.
_ID = r"([A-Za-z0-9_-]{11})"
_WATCH_RE = re.compile(r"(?:\b(m)\.|\bwww\.|(?<![\w.]))youtube\.com/watch\?(?:[^\s&]*&)*v=" + _ID)
_SHORT_RE = re.compile(r"(?:\b(m)\.|\bwww\.|(?<![\w.]))youtu\.be/" + _ID)
_EMBED_RE = re.compile(r"youtube\.com/embed/" + _ID)


def extract_video_links(text: str, source_post=None) -> list[VideoLink]:
    """Extract video links of the 5 recognized URL shapes, in order of
    appearance, deduplicated per text by video id."""
    found = []
    for m in _WATCH_RE.finditer(text):
        form = UrlForm.MOBILE_WATCH if m.group(1) else UrlForm.WATCH
        found.append((m.start(2), form, m.group(2)))
    for m in _SHORT_RE.finditer(text):
        form = UrlForm.MOBILE_SHORT if m.group(1) else UrlForm.SHORT
        found.append((m.start(2), form, m.group(2)))
    for m in _EMBED_RE.finditer(text):
        found.append((m.start(1), UrlForm.EMBED, m.group(1)))
    found.sort(key=lambda t: t[0])
    links = []
    seen = set()
    for _, form, vid in found:
        if vid not in seen:
            seen.add(vid)
            links.append(VideoLink(video_id=vid, url_form=form, source_post=source_post))
    return links


def build_corpus(posts: list[Post], community_id: str) -> CommunityCorpus:
    """Concatenate post bodies (and url-field text) into a trainable corpus."""
    if not posts:
        raise ValueError("cannot build a corpus from zero posts")
    for p in posts:
        if p.community_id != community_id:
            raise ValueError(
                f"post {p.post_id} belongs to {p.community_id}, not {community_id}")
    docs = []
    for p in posts:
        doc = p.body
        if p.url_field:
            doc = f"{doc} {p.url_field}" if doc else p.url_field
        docs.append(doc)
    token_count = sum(len(tokenize_and_stem(d)) for d in docs)
    return CommunityCorpus(community_id=community_id, documents=docs,
                           token_count=token_count)


# ---------------------------------------------------------------------------
# Interchange format (newline-delimited JSON, fixed field names)

def write_posts(posts, path):
    with open(path, "w") as fh:
        for p in posts:
            fh.write(json.dumps({
                "community_id": p.community_id, "thread_id": p.thread_id,
                "post_id": p.post_id, "ts": p.timestamp, "body": p.body,
            }, sort_keys=True) + "\n")


def read_posts(path):
    posts = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                d = json.loads(line)
                posts.append(Post(community_id=d["community_id"],
                                  thread_id=d["thread_id"], post_id=d["post_id"],
                                  timestamp=d["ts"], body=d["body"]))
    return posts


def write_comments(comments, path):
    with open(path, "w") as fh:
        for c in comments:
            fh.write(json.dumps({
                "video_id": c.video_id, "comment_id": c.comment_id,
                "ts": c.timestamp, "text": c.text, "is_reply": c.is_reply,
            }, sort_keys=True) + "\n")


def read_comments(path):
    comments = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                d = json.loads(line)
                comments.append(Comment(video_id=d["video_id"],
                                        comment_id=d["comment_id"], timestamp=d["ts"],
                                        text=d["text"], is_reply=d["is_reply"]))
    return comments
