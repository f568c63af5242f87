"""Ranking and text-overlap metrics for evaluating root-cause output.

Single-query functions take one ranking and one truth set; the mean-over-
queries variants take parallel sequences.  A query with an empty truth set
contributes 0 to the mean and is logged, never silently skipped, so
denominators stay honest.
"""

from __future__ import annotations

import logging
import re
from collections import Counter
from dataclasses import dataclass
from typing import Collection, Sequence

from causalscope.errors import DataError

logger = logging.getLogger(__name__)

_TOKEN = re.compile(r"[a-z0-9]+")


def _check_k(k: int) -> None:
    if k < 1:
        raise DataError("k must be at least 1")


def _check_ranking(ranking: Sequence[str]) -> None:
    if len(set(ranking)) != len(ranking):
        raise DataError("ranking contains duplicate items")


def _flag_empty_truth(context: str) -> None:
    logger.warning("%s: empty truth set, query contributes 0", context)


def average_precision_at_k(ranking: Sequence[str], truth: Collection[str], k: int) -> float:
    """AP@k with denominator min(k, |truth|), so a short truth set can
    still reach 1.0 within the cutoff."""
    _check_k(k)
    _check_ranking(ranking)
    truth = set(truth)
    if not truth:
        _flag_empty_truth("average_precision_at_k")
        return 0.0
    hits = 0
    precision_sum = 0.0
    for i, item in enumerate(ranking[:k], start=1):
        if item in truth:
            hits += 1
            precision_sum += hits / i
    return precision_sum / min(k, len(truth))


def precision_at_k(ranking: Sequence[str], truth: Collection[str], k: int) -> float:
    """Fraction of the first k positions that are true causes (plain
    hits / k; a truth set smaller than k caps this below 1)."""
    _check_k(k)
    _check_ranking(ranking)
    truth = set(truth)
    if not truth:
        _flag_empty_truth("precision_at_k")
        return 0.0
    hits = sum(1 for item in ranking[:k] if item in truth)
    return hits / k


def reciprocal_rank(ranking: Sequence[str], truth: Collection[str], k: int | None = None) -> float:
    """1/rank of the first relevant item; 0 when none appears (within the
    optional cutoff k)."""
    if k is not None:
        _check_k(k)
    _check_ranking(ranking)
    truth = set(truth)
    if not truth:
        _flag_empty_truth("reciprocal_rank")
        return 0.0
    scan = ranking if k is None else ranking[:k]
    for i, item in enumerate(scan, start=1):
        if item in truth:
            return 1.0 / i
    return 0.0


def jaccard(a: Collection[str], b: Collection[str]) -> float:
    """|intersection| / |union|; 1.0 when both sets are empty."""
    a, b = set(a), set(b)
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def jaccard_at_k(ranking: Sequence[str], truth: Collection[str], k: int) -> float:
    """Jaccard overlap between the top-k set and the truth set."""
    _check_k(k)
    _check_ranking(ranking)
    truth = set(truth)
    if not truth:
        _flag_empty_truth("jaccard_at_k")
        return 0.0
    return jaccard(set(ranking[:k]), truth)


def _mean_over_queries(fn, rankings, truths, *args) -> float:
    if len(rankings) != len(truths):
        raise DataError("rankings and truths must have the same length")
    if not rankings:
        raise DataError("need at least one query")
    return sum(fn(r, t, *args) for r, t in zip(rankings, truths)) / len(rankings)


def map_at_k(rankings: Sequence[Sequence[str]], truths: Sequence[Collection[str]], k: int) -> float:
    """Mean AP@k over queries."""
    return _mean_over_queries(average_precision_at_k, rankings, truths, k)


def mean_precision_at_k(
    rankings: Sequence[Sequence[str]], truths: Sequence[Collection[str]], k: int
) -> float:
    return _mean_over_queries(precision_at_k, rankings, truths, k)


def mrr(
    rankings: Sequence[Sequence[str]], truths: Sequence[Collection[str]], k: int | None = None
) -> float:
    """Mean reciprocal rank over queries, optionally truncated at k."""
    if len(rankings) != len(truths):
        raise DataError("rankings and truths must have the same length")
    if not rankings:
        raise DataError("need at least one query")
    return sum(reciprocal_rank(r, t, k) for r, t in zip(rankings, truths)) / len(rankings)


def mean_jaccard_at_k(
    rankings: Sequence[Sequence[str]], truths: Sequence[Collection[str]], k: int
) -> float:
    return _mean_over_queries(jaccard_at_k, rankings, truths, k)


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float


def _tokens(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


def rouge1(candidate: str, reference: str) -> RougeScore:
    """Unigram overlap with clipped counts.

    Tokens are lowercased alphanumeric runs (punctuation dropped).
    Precision divides by candidate length, recall by reference length;
    an empty side yields 0 for the affected components.
    """
    cand = _tokens(candidate)
    ref = _tokens(reference)
    if not cand or not ref:
        if not ref:
            _flag_empty_truth("rouge1")
        return RougeScore(precision=0.0, recall=0.0, f1=0.0)
    cand_counts = Counter(cand)
    ref_counts = Counter(ref)
    overlap = sum(min(cand_counts[t], ref_counts[t]) for t in cand_counts)
    precision = overlap / len(cand)
    recall = overlap / len(ref)
    f1 = 0.0 if precision + recall == 0.0 else 2 * precision * recall / (precision + recall)
    return RougeScore(precision=precision, recall=recall, f1=f1)


def weighted_kappa(
    ratings_a: Sequence[int],
    ratings_b: Sequence[int],
    min_rating: int = 1,
    max_rating: int = 5,
) -> float:
    """Linearly weighted agreement between two raters on an ordinal scale.

    Disagreement weight between categories i and j is |i - j| / (c - 1).
    Expected disagreement uses the product of the two raters' marginal
    distributions.  When expected disagreement is 0 (both raters constant
    on the same category) the raters agree perfectly and kappa is 1.
    """
    if len(ratings_a) != len(ratings_b):
        raise DataError("rating sequences must have the same length")
    if not ratings_a:
        raise DataError("need at least one rating pair")
    if min_rating >= max_rating:
        raise DataError("rating scale must span at least two categories")
    c = max_rating - min_rating + 1
    for r in list(ratings_a) + list(ratings_b):
        try:
            ri = int(r)
        except (TypeError, ValueError):
            raise DataError(f"rating {r!r} is not an integer") from None
        if ri != r or not min_rating <= ri <= max_rating:
            raise DataError(f"rating {r!r} outside scale [{min_rating}, {max_rating}]")

    n = len(ratings_a)
    weight = lambda i, j: abs(i - j) / (c - 1)
    observed = sum(weight(a, b) for a, b in zip(ratings_a, ratings_b)) / n

    marg_a = Counter(ratings_a)
    marg_b = Counter(ratings_b)
    expected = 0.0
    for i in range(min_rating, max_rating + 1):
        for j in range(min_rating, max_rating + 1):
            expected += (marg_a[i] / n) * (marg_b[j] / n) * weight(i, j)
    if expected == 0.0:
        return 1.0
    return 1.0 - observed / expected
