import gzip
import io
import json
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from tuberaid.ingest import (
    Comment,
    FieldMapping,
    IngestError,
    Post,
    UrlForm,
    build_corpus,
    extract_video_links,
    parse_thread_dump,
    read_comments,
    read_posts,
    write_comments,
    write_posts,
)
from tuberaid.text import tokenize_and_stem

FIXTURES = Path(__file__).parent / "fixtures"


def ndjson(records):
    return io.BytesIO("\n".join(json.dumps(r) for r in records).encode())


class TestParseThreadDump:
    def test_entity_decoding(self):
        result = parse_thread_dump(ndjson([{"id": 1, "time": 100, "com": "hello &amp; bye"}]), "c")
        assert len(result.posts) == 1
        post = result.posts[0]
        assert post.body == "hello & bye"
        assert post.timestamp == 100

    def test_missing_timestamp_skipped_and_counted(self):
        records = [{"id": 1, "time": 100, "com": "a"},
                   {"id": 2, "com": "no time"},
                   {"id": 3, "time": 300, "com": "c"}]
        result = parse_thread_dump(ndjson(records), "c")
        assert len(result.posts) == 2
        assert result.skipped == 1

    def test_golden_fixture(self):
        result = parse_thread_dump(FIXTURES / "imageboard_thread.ndjson", "board")
        golden = json.loads((FIXTURES / "imageboard_thread_golden.json").read_text())
        assert [p.body for p in result.posts] == golden
        assert len(result.posts) == 10
        assert result.skipped == 0

    def test_malformed_record_tallied(self):
        raw = io.BytesIO(b'{"id": 1, "time": 100, "com": "x"}\n{broken\n')
        result = parse_thread_dump(raw, "c")
        assert len(result.posts) == 1
        assert result.skipped == 1

    def test_wholly_unparseable_names_file_and_offset(self, tmp_path):
        bad = tmp_path / "garbage.ndjson"
        bad.write_bytes(b"not json at all\nstill not\n")
        with pytest.raises(IngestError, match="garbage.ndjson.*byte"):
            parse_thread_dump(bad, "c")

    def test_json_array_input(self):
        raw = io.BytesIO(json.dumps(
            [{"id": 1, "time": 100, "com": "a"}, {"id": 2, "time": 200, "com": "b"}]).encode())
        result = parse_thread_dump(raw, "c")
        assert [p.post_id for p in result.posts] == ["1", "2"]

    def test_gzip_transparent(self, tmp_path):
        path = tmp_path / "dump.ndjson.gz"
        path.write_bytes(gzip.compress(b'{"id": 1, "time": 100, "com": "zipped"}\n'))
        result = parse_thread_dump(path, "c")
        assert result.posts[0].body == "zipped"

    def test_custom_field_mapping(self):
        mapping = FieldMapping(post_id="name", timestamp="created_utc", body="selftext",
                               url="url")
        raw = ndjson([{"name": "t3_x", "created_utc": 100, "selftext": "hi",
                       "url": "https://youtu.be/dQw4w9WgXcQ"}])
        result = parse_thread_dump(raw, "agg", mapping)
        assert result.posts[0].url_field == "https://youtu.be/dQw4w9WgXcQ"

    def test_lossless_accounting(self):
        records = [{"id": i, "time": 100 + i, "com": "x"} for i in range(20)]
        records[3].pop("time")
        records[11]["time"] = -5
        result = parse_thread_dump(ndjson(records), "c")
        assert len(result.posts) + result.skipped == 20


class TestExtractVideoLinks:
    def test_single_short_form(self):
        links = extract_video_links("see https://youtu.be/dQw4w9WgXcQ now")
        assert [(l.video_id, l.url_form) for l in links] == [
            ("dQw4w9WgXcQ", UrlForm.SHORT)]

    def test_empty_input(self):
        assert extract_video_links("") == []

    FORMS = [
        ("https://www.youtube.com/watch?v={id}", UrlForm.WATCH),
        ("https://youtu.be/{id}", UrlForm.SHORT),
        ("https://m.youtube.com/watch?v={id}", UrlForm.MOBILE_WATCH),
        ("https://m.youtu.be/{id}", UrlForm.MOBILE_SHORT),
        ("https://youtube.com/embed/{id}", UrlForm.EMBED),
    ]

    @pytest.mark.parametrize("template,form", FORMS)
    def test_each_form(self, template, form):
        links = extract_video_links(template.format(id="abcDEF123-_"))
        assert [(l.video_id, l.url_form) for l in links] == [("abcDEF123-_", form)]

    def test_same_id_all_forms_dedups_to_one(self):
        text = " ".join(t.format(id="AAAAAAAAAAA") for t, _ in self.FORMS)
        assert len(extract_video_links(text)) == 1

    def test_distinct_ids_all_forms(self):
        ids = [f"id{i}" + "A" * 8 for i in range(5)]
        text = " ".join(t.format(id=i) for (t, _), i in zip(self.FORMS, ids))
        links = extract_video_links(text)
        assert [l.video_id for l in links] == ids

    def test_trailing_query_parameters_ignored(self):
        links = extract_video_links(
            "https://www.youtube.com/watch?v=dQw4w9WgXcQ&t=42s and "
            "https://youtu.be/dQw4w9WgXcQ?si=xyz")
        assert [l.video_id for l in links] == ["dQw4w9WgXcQ"]

    def test_order_of_appearance(self):
        text = ("https://youtu.be/BBBBBBBBBBB then "
                "https://www.youtube.com/watch?v=AAAAAAAAAAA")
        assert [l.video_id for l in extract_video_links(text)] == [
            "BBBBBBBBBBB", "AAAAAAAAAAA"]

    def test_extraction_is_idempotent(self):
        text = " ".join(t.format(id=i) for (t, _), i in zip(
            self.FORMS, ["aaaaaaaaaaa", "bbbbbbbbbbb", "ccccccccccc",
                         "ddddddddddd", "eeeeeeeeeee"]))
        links = extract_video_links(text)
        rebuilt = " ".join(f"https://youtu.be/{l.video_id}" for l in links)
        assert {l.video_id for l in extract_video_links(rebuilt)} == {
            l.video_id for l in links}

    @given(st.text(alphabet=st.characters(codec="ascii"), max_size=200))
    def test_ids_always_match_the_alphabet(self, text):
        import re
        for link in extract_video_links(text):
            assert re.fullmatch(r"[A-Za-z0-9_-]{11}", link.video_id)


class TestBuildCorpus:
    def _posts(self, n, community="c"):
        return [Post(community_id=community, thread_id="t", post_id=str(i),
                     timestamp=100 + i, body=f"hello world number {i}")
                for i in range(n)]

    def test_documents_preserve_order(self):
        corpus = build_corpus(self._posts(2), "c")
        assert len(corpus.documents) == 2
        assert corpus.documents[0].endswith("0")

    def test_mixed_communities_rejected(self):
        posts = self._posts(1, "a") + self._posts(1, "b")
        with pytest.raises(ValueError, match="belongs to"):
            build_corpus(posts, "a")

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            build_corpus([], "c")

    def test_token_count_matches_independent_recount(self):
        posts = self._posts(200)
        corpus = build_corpus(posts, "c")
        recount = sum(len(tokenize_and_stem(d).tokens) for d in corpus.documents)
        assert corpus.token_count == recount


class TestInterchange:
    def test_posts_round_trip(self, tmp_path):
        posts = [Post(community_id="c", thread_id="t", post_id="p1",
                      timestamp=100, body="hello")]
        path = tmp_path / "posts.ndjson"
        write_posts(posts, path)
        fields = json.loads(path.read_text().splitlines()[0])
        assert set(fields) == {"community_id", "thread_id", "post_id", "ts", "body"}
        assert read_posts(path) == posts

    def test_comments_round_trip(self, tmp_path):
        comments = [Comment(video_id="AAAAAAAAAAA", comment_id="c1",
                            timestamp=100, text="hi", is_reply=True)]
        path = tmp_path / "comments.ndjson"
        write_comments(comments, path)
        fields = json.loads(path.read_text().splitlines()[0])
        assert set(fields) == {"video_id", "comment_id", "ts", "text", "is_reply"}
        assert read_comments(path) == comments
