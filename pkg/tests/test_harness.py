import random

import pytest
from hypothesis import given, strategies as st

from relgrid.domain import ActionToken
from relgrid.harness import (
    VOCABULARY,
    compute_stats,
    evaluate,
    exact_match,
    random_baseline,
    random_predictions,
    relative_quadrant,
)

tokens = st.lists(st.sampled_from(list(ActionToken)), min_size=1, max_size=12)


def test_exact_match_examples():
    a = [ActionToken.WALK, ActionToken.PUSH]
    assert exact_match(a, list(a))
    assert not exact_match(a, [ActionToken.WALK, ActionToken.PULL])
    assert not exact_match(a, a[:1])


@given(tokens, tokens)
def test_exact_match_is_symmetric(a, b):
    assert exact_match(a, b) == exact_match(b, a)
    assert exact_match(a, a)


@given(tokens, st.integers(0, 2**32))
def test_random_baseline_length(gold, seed):
    out = random_baseline(gold, random.Random(seed))
    assert len(out) == len(gold) and set(out) <= set(VOCABULARY)


def test_random_baseline_rejects_empty_gold():
    with pytest.raises(ValueError):
        random_baseline([], random.Random(0))


@pytest.mark.parametrize("length", [1, 2, 3])
def test_random_baseline_hit_rate(length):
    rng = random.Random(length)
    gold = [ActionToken.WALK] * length
    trials = 60000
    hits = sum(exact_match(random_baseline(gold, rng), gold) for _ in range(trials))
    p = 6.0 ** -length
    sd = (p * (1 - p) / trials) ** 0.5
    assert abs(hits / trials - p) < 4 * sd


def test_quadrants_cover_the_plane_evenly():
    counts = {q: 0 for q in range(1, 5)}
    for dr in range(-5, 6):
        for dc in range(-5, 6):
            if dr or dc:
                counts[relative_quadrant((5, 5), (5 + dr, 5 + dc))] += 1
    assert len(set(counts.values())) == 1
    with pytest.raises(ValueError):
        relative_quadrant((1, 1), (1, 1))


def test_evaluate_and_stats():
    from relgrid.commands import Pattern
    from relgrid.distractors import GeneratorConfig, generate_corpus
    gold, _ = generate_corpus(Pattern.ONE_REL, GeneratorConfig(worlds_per_command=2), 20)
    report = evaluate(gold, {e.id: e.actions for e in gold})
    assert report.exact_match_percent == 100.0 and report.count == 40
    assert "100.00" in report.to_text()
    partial = evaluate(gold, {gold[0].id: gold[0].actions})
    assert partial.missing == 39 and partial.exact_match_percent == pytest.approx(2.5)
    assert evaluate(gold, random_predictions(gold)).exact_match_percent < 10
    stats = compute_stats(gold)
    assert stats.count == 40
    assert sum(stats.verbs.values()) == 40 and sum(stats.relative_directions.values()) == 40
    assert stats.distractor_presence["relation"] == 40
    assert '"verbs"' in stats.to_json() and "verbs:" in stats.to_text()
