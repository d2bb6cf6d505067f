"""Cross-community TF-IDF: term frequency on one community, inverse document
frequency over the other communities treated as one document each.

Smoothed IDF is used throughout: ``ln((1 + N) / (1 + df)) + 1``. For the
community-side score, N counts the *other* communities and df how many of
them contain the term; for video-side scoring, N and df run over *all*
source communities so video and community scores share one scale.
"""

import csv
import json
import math
from collections import Counter
from dataclasses import dataclass

from .ingest import CommunityCorpus
from .text import STOPWORDS_VERSION, tokenize_and_stem
from .stemmer import STEMMER_VERSION

MODEL_FORMAT_VERSION = 1


@dataclass
class TfIdfModel:
    communities: list[str]
    scores: dict[str, dict[str, float]]          # community -> term -> TF*IDF
    idf_all: dict[str, float]                    # term -> IDF over all communities
    vocabulary_sizes: dict[str, int]
    stopwords_version: str = STOPWORDS_VERSION
    stemmer_version: str = STEMMER_VERSION

    def save(self, path):
        doc = {
            "format_version": MODEL_FORMAT_VERSION,
            "communities": self.communities,
            "scores": self.scores,
            "idf_all": self.idf_all,
            "vocabulary_sizes": self.vocabulary_sizes,
            "stopwords_version": self.stopwords_version,
            "stemmer_version": self.stemmer_version,
        }
        with open(path, "w") as fh:
            json.dump(doc, fh, sort_keys=True, indent=1)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            doc = json.load(fh)
        if doc.get("format_version") != MODEL_FORMAT_VERSION:
            raise ValueError(f"unsupported model format: {doc.get('format_version')}")
        return cls(communities=doc["communities"], scores=doc["scores"],
                   idf_all=doc["idf_all"], vocabulary_sizes=doc["vocabulary_sizes"],
                   stopwords_version=doc["stopwords_version"],
                   stemmer_version=doc["stemmer_version"])


@dataclass(frozen=True)
class KeywordSet:
    community_id: str
    keywords: tuple[str, ...]
    k: int


@dataclass
class LanguageScores:
    """Output of scoring one peak's text against the trained model."""

    video_average: float
    community_averages: dict[str, float]
    video_top_terms: list[str]
    short_vocabulary: bool = False


def smoothed_idf(n_docs: int, doc_freq: int) -> float:
    return math.log((1 + n_docs) / (1 + doc_freq)) + 1.0


def term_frequencies(tokens) -> dict[str, float]:
    counts = Counter(tokens)
    total = sum(counts.values())
    if total == 0:
        return {}
    return {term: n / total for term, n in counts.items()}


def train_tfidf(corpora: list[CommunityCorpus]) -> TfIdfModel:
    """Train per-community term scores: TF on the community itself, IDF over
    the remaining communities (one document each)."""
    if len(corpora) < 2:
        raise ValueError("cross-community IDF needs at least 2 corpora")
    community_tokens = {}
    for corpus in corpora:
        tokens = [t for doc in corpus.documents for t in tokenize_and_stem(doc)]
        if not tokens:
            raise ValueError(f"corpus {corpus.community_id} has zero usable tokens")
        community_tokens[corpus.community_id] = tokens

    vocab = {cid: set(toks) for cid, toks in community_tokens.items()}
    communities = sorted(community_tokens)
    all_terms = set().union(*vocab.values())

    idf_all = {
        term: smoothed_idf(len(communities), sum(term in vocab[c] for c in communities))
        for term in all_terms
    }

    scores = {}
    for cid in communities:
        others = [c for c in communities if c != cid]
        tf = term_frequencies(community_tokens[cid])
        scores[cid] = {
            term: tf_val * smoothed_idf(len(others),
                                        sum(term in vocab[o] for o in others))
            for term, tf_val in tf.items()
        }

    return TfIdfModel(
        communities=communities,
        scores=scores,
        idf_all=idf_all,
        vocabulary_sizes={cid: len(vocab[cid]) for cid in communities},
    )


def top_keywords(model: TfIdfModel, community_id: str, k: int) -> KeywordSet:
    """Top K terms by score; ties break lexicographically."""
    if k < 1:
        raise ValueError("k must be >= 1")
    score_map = model.scores[community_id]
    if k > len(score_map):
        raise ValueError(
            f"k={k} exceeds vocabulary size {len(score_map)} of {community_id}")
    ranked = sorted(score_map.items(), key=lambda kv: (-kv[1], kv[0]))
    return KeywordSet(community_id=community_id,
                      keywords=tuple(term for term, _ in ranked[:k]), k=k)


def video_term_scores(text: str, model: TfIdfModel) -> dict[str, float]:
    """Video-side TF-IDF: TF over the peak's comments times the model's
    community-independent IDF. Terms unseen in any community get the
    maximal smoothed IDF (df = 0)."""
    tf = term_frequencies(tokenize_and_stem(text).tokens)
    oov_idf = smoothed_idf(len(model.communities), 0)
    return {term: tf_val * model.idf_all.get(term, oov_idf)
            for term, tf_val in tf.items()}


def score_text_against_model(text: str, model: TfIdfModel, k: int) -> LanguageScores:
    """Average video score over the video's top-K terms, and the average of
    the same terms under every community's score map (absent terms score 0).
    """
    if not text.strip():
        raise ValueError("peak text is empty")
    vscores = video_term_scores(text, model)
    short = len(vscores) < k
    ranked = sorted(vscores.items(), key=lambda kv: (-kv[1], kv[0]))
    top = [term for term, _ in ranked[:k]]
    if not top:
        return LanguageScores(video_average=0.0,
                              community_averages={c: 0.0 for c in model.communities},
                              video_top_terms=[], short_vocabulary=True)
    video_avg = sum(vscores[t] for t in top) / len(top)
    community_avgs = {
        cid: sum(model.scores[cid].get(t, 0.0) for t in top) / len(top)
        for cid in model.communities
    }
    return LanguageScores(video_average=video_avg, community_averages=community_avgs,
                          video_top_terms=top, short_vocabulary=short)


def nearest_community(scores: LanguageScores, strategy: str = "closest") -> str:
    """Pick the community whose language is nearest to the scored text.

    ``closest`` (default): minimize |community average - video average|.
    ``argmax``: highest community average (the alternative reading).
    Ties break toward the higher community average, then lexicographically.
    """
    if not scores.community_averages:
        raise ValueError("no community scores")
    items = sorted(scores.community_averages.items())
    if strategy == "closest":
        return min(items, key=lambda kv: (abs(kv[1] - scores.video_average),
                                          -kv[1], kv[0]))[0]
    if strategy == "argmax":
        return min(items, key=lambda kv: (-kv[1], kv[0]))[0]
    raise ValueError(f"unknown strategy: {strategy}")


def write_keywords_csv(keyword_sets: list[KeywordSet], path):
    """Rank-by-community keyword table (one row per rank, one column per
    community)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rank"] + [ks.community_id for ks in keyword_sets])
        depth = max(ks.k for ks in keyword_sets)
        for i in range(depth):
            writer.writerow([i + 1] + [
                ks.keywords[i] if i < len(ks.keywords) else "" for ks in keyword_sets])
