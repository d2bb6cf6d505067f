from hypothesis import given, strategies as st

from tuberaid.text import STOPWORDS, tokenize_and_stem


def test_stopword_list_is_pinned():
    assert len(STOPWORDS) == 175
    assert {"the", "and", "of"} <= STOPWORDS


def test_community_keyword_style_stems():
    # distinctive community terms must survive the stopword filter
    assert tokenize_and_stem("People THINKING thinks").tokens == ["peopl", "think", "think"]
    assert tokenize_and_stem("things one needs now").tokens == ["thing", "need", "now"]


def test_all_stopwords_vanish():
    assert tokenize_and_stem("the and of").tokens == []


def test_empty_text():
    assert tokenize_and_stem("").tokens == []


def test_urls_numbers_and_short_tokens_dropped():
    stream = tokenize_and_stem("go to https://example.com/x?y=1 42 a ok winner")
    assert stream.tokens == ["ok", "winner"]


@given(st.text(max_size=300))
def test_no_stopwords_or_empties_in_output(text):
    stream = tokenize_and_stem(text)
    for tok in stream.tokens:
        assert tok
        assert tok not in STOPWORDS
        assert not tok.isdigit()


def test_case_insensitive():
    assert tokenize_and_stem("HELLO hello HeLLo").tokens == ["hello"] * 3
