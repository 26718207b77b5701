"""Token-budget batch planning for export to an external trainer.

Utterances are shuffled once with a seeded permutation and packed
greedily in that order: a batch closes as soon as the next utterance
would push it over the budget. No length bucketing, no reordering; the
plan is a pure function of (utterances, budget, seed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OversizeUtteranceError


def utterance_tokens(duration_s: float, sample_rate: int = 16000) -> int:
    """Tokens of one utterance: its sample count at the corpus rate."""
    return round(duration_s * sample_rate)


@dataclass(frozen=True)
class BatchPlan:
    """Batches of (utterance_id, tokens); final partial batch flagged."""

    batches: list
    token_budget: int
    seed: int
    final_partial: bool

    @property
    def batch_token_sums(self) -> list:
        return [sum(t for _, t in batch) for batch in self.batches]


def assemble(items, token_budget: int, seed: int) -> BatchPlan:
    """Pack (utterance_id, tokens) pairs into budgeted batches.

    Any single item over the budget is an error; the trailing batch is
    kept even when the input runs out before it fills.
    """
    items = list(items)
    for uid, tokens in items:
        if tokens > token_budget:
            raise OversizeUtteranceError(
                f"utterance {uid!r} has {tokens} tokens, budget is {token_budget}"
            )
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(items))

    batches = []
    current = []
    used = 0
    for idx in order:
        uid, tokens = items[idx]
        if current and used + tokens > token_budget:
            batches.append(current)
            current = []
            used = 0
        current.append((uid, tokens))
        used += tokens
    final_partial = False
    if current:
        batches.append(current)
        final_partial = used < token_budget
    return BatchPlan(
        batches=batches, token_budget=token_budget, seed=seed, final_partial=final_partial
    )


@dataclass(frozen=True)
class PlanStats:
    batch_count: int
    fill_ratios: list
    mean_fill: float
    total_tokens: int

    def to_dict(self) -> dict:
        return {
            "batch_count": self.batch_count,
            "fill_ratios": self.fill_ratios,
            "mean_fill": self.mean_fill,
            "total_tokens": self.total_tokens,
        }


def plan_stats(plan: BatchPlan) -> PlanStats:
    """Per-batch and mean fill ratio of a plan."""
    sums = plan.batch_token_sums
    fills = [s / plan.token_budget for s in sums]
    mean_fill = sum(fills) / len(fills) if fills else 0.0
    return PlanStats(
        batch_count=len(plan.batches),
        fill_ratios=fills,
        mean_fill=mean_fill,
        total_tokens=sum(sums),
    )


def plan_rows(plan: BatchPlan):
    """Flatten a plan into exportable (batch_index, utterance_id, tokens) rows."""
    for batch_index, batch in enumerate(plan.batches):
        for uid, tokens in batch:
            yield {"batch_index": batch_index, "utterance_id": uid, "tokens": tokens}
