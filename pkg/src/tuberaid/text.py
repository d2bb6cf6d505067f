"""Tokenization: lowercase, URL/number removal, stopword filtering, stemming.

The stopword list is a fixed 175-word SMART-derived English list, committed
here so that trained models are reproducible; its version string is stored
inside every persisted model.
"""

import re
from dataclasses import dataclass, field

from .stemmer import STEMMER_VERSION, stem

STOPWORDS_VERSION = "smart-175/1"

STOPWORDS = frozenset("""
a about after again against all almost alone already also always am among an
and another any anybody anyone anything are as at be became because become
been before being between both but by can cannot come could did do does doing
done down each either enough ever every few for from get given go going gone
had has have having he her here hers herself him himself his how i if in into
is it its itself just let like many may me might more most much must my myself
never no nor not of off on only or other others our ours out over own per same
say see seem seemed seems shall she should since so some still such take
than that the their theirs them themselves then there these they this those
through thus to together too toward under until up upon use used very was way
we well went were what when where whether which while who whom whose why will
with within without would yet you your yours yourself
""".split())

_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_TOKEN_RE = re.compile(r"[a-z0-9]+")


@dataclass
class TokenStream:
    """Ordered lowercase stemmed terms with the versions that produced them."""

    tokens: list[str] = field(default_factory=list)
    stopwords_version: str = STOPWORDS_VERSION
    stemmer_version: str = STEMMER_VERSION

    def __len__(self):
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)


def tokenize_and_stem(text: str) -> TokenStream:
    """Turn free text into a stream of lowercase stemmed terms.

    URLs are removed wholesale; the remainder is lowercased and split on
    non-alphanumeric boundaries. Tokens shorter than 2 characters, pure
    numbers, and stopwords are dropped; the rest are Porter-stemmed.
    Stopwords are filtered again post-stemming so the stream never contains
    a stopword regardless of what a stem collapses to.
    """
    cleaned = _URL_RE.sub(" ", text.lower())
    out = []
    for tok in _TOKEN_RE.findall(cleaned):
        if len(tok) < 2 or tok.isdigit() or tok in STOPWORDS:
            continue
        stemmed = stem(tok)
        if stemmed and stemmed not in STOPWORDS:
            out.append(stemmed)
    return TokenStream(tokens=out)
