"""Seeded generator of multi-community corpora and raided/benign comment
timelines with ground-truth labels.

Community vocabularies mix a shared generic word list with per-community
placeholder slang (nonsense tokens, deliberately slur-free); slang terms are
disjoint across communities, which is what makes planted raids recoverable
by the cross-community model. Regeneration with the same (config, seed) is
byte-identical.
"""

import hashlib
import json
from dataclasses import asdict, dataclass

import numpy as np

from .ingest import Comment, CommunityCorpus, Post
from .timeline import SECONDS_PER_DAY, CommentTimeline, ThreadSpan, bin_daily

UNRELATED = "UNRELATED"

EPOCH_START = 1_600_000_000 - (1_600_000_000 % SECONDS_PER_DAY)

GENERIC_VOCAB = (
    "video music game play watch song match team score love nice cool fun "
    "channel upload comment subscribe view clip edit sound beat drum guitar "
    "player goal win race track level boss stream live chat laugh joke camera "
    "light scene actor movie trailer remix cover dance party crowd stage tune "
    "melody concert album artist band festival league season trophy replay"
).split()

# Slang roots per community; each root expands to three stable tokens.
_SLANG_ROOTS = {
    "alpha": ["zarn", "velq", "quom", "drax", "plim", "vorn", "skel", "truv"],
    "bravo": ["glib", "marn", "tosk", "brev", "fyrn", "lodd", "crem", "whul"],
    "charlie": ["nerv", "polt", "gask", "yurm", "dulb", "frox", "stam", "kliv"],
}
_SLANG_SUFFIXES = ["ix", "or", "un"]


def slang_terms(root_list):
    return [root + suffix for root in root_list for suffix in _SLANG_SUFFIXES]


@dataclass
class CommunityProfile:
    community_id: str
    vocabulary: list[str]
    weights: list[float]
    slang: list[str]
    posts_per_day: float = 50.0


def default_profiles(slang_weight: float = 6.0) -> list[CommunityProfile]:
    """Three communities sharing the generic vocabulary, each with its own
    disjoint slang (weighted up so slang dominates the community's TF-IDF)."""
    profiles = []
    for cid, roots in _SLANG_ROOTS.items():
        slang = slang_terms(roots)
        vocab = GENERIC_VOCAB + slang
        weights = [1.0] * len(GENERIC_VOCAB) + [slang_weight] * len(slang)
        profiles.append(CommunityProfile(community_id=cid, vocabulary=vocab,
                                         weights=weights, slang=slang))
    return profiles


@dataclass
class RaidSpec:
    source_community: str | None    # None plants a generic (benign) burst
    start_offset_days: int
    duration_days: int
    intensity: float                # comments/day multiplier over baseline
    slang_mix: float                # fraction of raid tokens from source vocab

    def __post_init__(self):
        if self.intensity <= 1.0:
            raise ValueError("intensity must be > 1")
        if self.source_community is not None and not 0.0 < self.slang_mix <= 1.0:
            raise ValueError("slang_mix must be in (0, 1]")
        if self.duration_days < 1:
            raise ValueError("duration_days must be >= 1")


@dataclass
class SynthConfig:
    posts_per_community: int = 300
    videos_per_community: int = 50
    unrelated_videos: int = 50
    baseline_rate: float = 20.0     # comments/day on a quiet video
    video_length_days: int = 30
    raid_duration_days: int = 2
    raid_intensity: float = 8.0
    slang_mix: float = 0.5
    slang_weight: float = 6.0

    def to_dict(self):
        return asdict(self)


@dataclass
class SyntheticDataset:
    corpora: list[CommunityCorpus]
    videos: list[tuple[CommentTimeline, str]]
    spans: dict[str, ThreadSpan]
    seed: int
    config_hash: str


def _child_rng(seed: int, *key):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def _sample_tokens(rng, vocabulary, weights, n):
    probs = np.asarray(weights, dtype=float)
    probs = probs / probs.sum()
    idx = rng.choice(len(vocabulary), size=n, p=probs)
    return [vocabulary[i] for i in idx]


def generate_corpora(profiles: list[CommunityProfile], posts_per_community: int,
                     seed: int) -> tuple[list[CommunityCorpus], list[Post]]:
    """Weighted-sampled post bodies per community; slang stays exclusive to
    its own community by construction."""
    if len(profiles) < 2:
        raise ValueError("need at least 2 community profiles")
    slang_seen = set()
    for p in profiles:
        overlap = slang_seen & set(p.slang)
        if overlap:
            raise ValueError(f"slang terms shared across profiles: {sorted(overlap)}")
        slang_seen |= set(p.slang)

    corpora = []
    posts = []
    for ci, profile in enumerate(sorted(profiles, key=lambda p: p.community_id)):
        rng = _child_rng(seed, 0, ci)
        docs = []
        for pi in range(posts_per_community):
            length = int(rng.integers(8, 21))
            body = " ".join(_sample_tokens(rng, profile.vocabulary,
                                           profile.weights, length))
            docs.append(body)
            posts.append(Post(community_id=profile.community_id,
                              thread_id=f"{profile.community_id}-t0",
                              post_id=f"{profile.community_id}-p{pi}",
                              timestamp=EPOCH_START + pi * 60, body=body))
        corpus = CommunityCorpus(community_id=profile.community_id, documents=docs)
        corpus.token_count = sum(len(d.split()) for d in docs)
        corpora.append(corpus)
    return corpora, posts


def generate_video(video_id: str, baseline_rate: float, length_days: int,
                   raid: RaidSpec | None, seed: int,
                   profiles: list[CommunityProfile] | None = None,
                   start_ts: int = EPOCH_START) -> tuple[CommentTimeline, str]:
    """One video's comment timeline: generic baseline chatter plus an
    optional planted raid (or benign burst). Returns the timeline and its
    ground-truth label."""
    if length_days < 1:
        raise ValueError("length_days must be >= 1")
    rng = _child_rng(seed, 1, _stable_int(video_id))
    profile_map = {p.community_id: p for p in (profiles or default_profiles())}

    comments = []
    counter = 0
    for day in range(length_days):
        n_baseline = int(rng.poisson(baseline_rate))
        if day == 0:
            n_baseline = max(n_baseline, 1)  # anchor the timeline's first day
        counter = _emit_comments(rng, comments, video_id, start_ts, day,
                                 n_baseline, GENERIC_VOCAB, None, 0.0, counter)
        if raid and raid.start_offset_days <= day < raid.start_offset_days + raid.duration_days:
            n_raid = int(rng.poisson(raid.intensity * baseline_rate))
            source = (profile_map[raid.source_community]
                      if raid.source_community else None)
            counter = _emit_comments(rng, comments, video_id, start_ts, day,
                                     n_raid, GENERIC_VOCAB, source,
                                     raid.slang_mix if source else 0.0, counter)
    label = raid.source_community if raid and raid.source_community else UNRELATED
    return bin_daily(comments, video_id=video_id), label


def _stable_int(s: str) -> int:
    return int(hashlib.sha256(s.encode()).hexdigest()[:8], 16)


def _emit_comments(rng, out, video_id, start_ts, day, n, generic_vocab,
                   source_profile, slang_mix, counter):
    for _ in range(n):
        second = int(rng.integers(0, SECONDS_PER_DAY))
        length = int(rng.integers(3, 11))
        tokens = []
        for _ in range(length):
            if source_profile is not None and rng.random() < slang_mix:
                tokens.append(source_profile.vocabulary[
                    int(rng.choice(len(source_profile.vocabulary),
                                   p=np.asarray(source_profile.weights)
                                   / np.sum(source_profile.weights)))])
            else:
                tokens.append(generic_vocab[int(rng.integers(0, len(generic_vocab)))])
        out.append(Comment(video_id=video_id, comment_id=f"{video_id}-c{counter}",
                           timestamp=start_ts + day * SECONDS_PER_DAY + second,
                           text=" ".join(tokens)))
        counter += 1
    return counter


def generate_dataset(config: SynthConfig, seed: int) -> SyntheticDataset:
    """Full labeled dataset: per-community corpora plus raided and unrelated
    videos (every video gets a burst so unrelated ones also produce peaks,
    mirroring benign virality)."""
    profiles = default_profiles(slang_weight=config.slang_weight)
    corpora, _ = generate_corpora(profiles, config.posts_per_community, seed)

    videos = []
    spans = {}
    schedule_rng = _child_rng(seed, 2)
    communities = sorted(p.community_id for p in profiles)
    plan = ([(cid, i) for cid in communities
             for i in range(config.videos_per_community)]
            + [(None, i) for i in range(config.unrelated_videos)])
    for source, i in plan:
        vid = _video_id(source or "none", i)
        start_day = int(schedule_rng.integers(
            2, max(3, config.video_length_days - config.raid_duration_days - 2)))
        raid = RaidSpec(source_community=source, start_offset_days=start_day,
                        duration_days=config.raid_duration_days,
                        intensity=config.raid_intensity,
                        slang_mix=config.slang_mix)
        timeline, label = generate_video(
            vid, config.baseline_rate, config.video_length_days, raid, seed,
            profiles=profiles)
        videos.append((timeline, label))
        spans[vid] = ThreadSpan(
            t_first=EPOCH_START + start_day * SECONDS_PER_DAY,
            t_last=EPOCH_START + (start_day + config.raid_duration_days)
            * SECONDS_PER_DAY)

    config_hash = dataset_config_hash(config, seed)
    return SyntheticDataset(corpora=corpora, videos=videos, spans=spans,
                            seed=seed, config_hash=config_hash)


def _video_id(prefix: str, i: int) -> str:
    # Valid 11-char video ids, deterministic per (prefix, index).
    digest = hashlib.sha256(f"{prefix}:{i}".encode()).hexdigest()
    alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_"
    return "".join(alphabet[int(digest[j * 2:j * 2 + 2], 16) % 64] for j in range(11))


def dataset_config_hash(config: SynthConfig, seed: int) -> str:
    doc = json.dumps({"config": config.to_dict(), "seed": seed}, sort_keys=True)
    return hashlib.sha256(doc.encode()).hexdigest()


def dataset_content_hash(dataset: SyntheticDataset) -> str:
    """Hash of the generated content itself, for determinism checks."""
    h = hashlib.sha256()
    for corpus in dataset.corpora:
        h.update(corpus.community_id.encode())
        for doc in corpus.documents:
            h.update(doc.encode())
    for timeline, label in dataset.videos:
        h.update(timeline.video_id.encode())
        h.update(label.encode())
        for c in timeline.comments:
            h.update(f"{c.comment_id}|{c.timestamp}|{c.text}".encode())
    return h.hexdigest()
