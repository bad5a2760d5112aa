"""Audit planning: seeded sampling, chunk partitioning, and blinded queues.

All functions are deterministic given their inputs, so a planned audit can be
reconstructed bit-for-bit from (pool, n, seed) alone.
"""

from __future__ import annotations

import random
from collections import Counter
from typing import Sequence

from .errors import InsufficientPoolError, ValidationError
from .models import (
    AuditConfig,
    BlindedItem,
    ChunkPlan,
    DecisionRecord,
    DocumentRecord,
    InterimSummary,
    ReviewerKind,
)


def draw_sample(
    pool: Sequence[DocumentRecord], n: int, seed: int
) -> list[DocumentRecord]:
    """Uniform sample of n documents without replacement.

    Seeded Fisher-Yates partial shuffle over the pool, so the draw is
    replayable: a fixed (pool order, n, seed) always yields the same sample.
    """
    if n < 1:
        raise ValidationError(f"sample size must be >= 1, got {n}")
    seen = Counter(doc.doc_id for doc in pool)
    dupes = [doc_id for doc_id, count in seen.items() if count > 1]
    if dupes:
        raise ValidationError(f"duplicate doc_ids in pool: {sorted(dupes)[:5]}")
    if n > len(pool):
        raise InsufficientPoolError(required=n, available=len(pool))

    rng = random.Random(seed)
    picked = list(pool)
    last = len(picked)
    for i in range(n):
        j = rng.randrange(i, last)
        picked[i], picked[j] = picked[j], picked[i]
    return picked[:n]


def partition_chunks(n: int, k: int) -> ChunkPlan:
    """Split n items into k balanced chunks due in periods 1..k.

    The first n mod k chunks take the extra item, so early interim looks run
    at least at average size. When k > n the trailing chunks are empty.
    """
    if k < 1:
        raise ValidationError(f"chunk count must be >= 1, got {k}")
    if n < 1:
        raise ValidationError(f"item count must be >= 1, got {n}")
    base, extra = divmod(n, k)
    sizes = tuple([base + 1] * extra + [base] * (k - extra))
    return ChunkPlan(chunk_sizes=sizes, chunk_due=tuple(range(1, k + 1)))


def build_blinded_queue(
    audit_id: str, sample: Sequence[DocumentRecord], plan: ChunkPlan
) -> list[BlindedItem]:
    """One blinded item per sampled document, chunked in plan order.

    Item ids are sequence-derived (not random), so identical plans produce
    identical queues. The produced items carry no label fields of any kind.
    """
    if len(sample) != plan.total:
        raise ValidationError(
            f"sample has {len(sample)} documents but the plan totals {plan.total}"
        )
    queue: list[BlindedItem] = []
    position = 0
    for chunk_index, size in enumerate(plan.chunk_sizes):
        for _ in range(size):
            doc = sample[position]
            queue.append(
                BlindedItem(
                    item_id=f"item-{position:05d}",
                    audit_id=audit_id,
                    doc_id=doc.doc_id,
                    text=doc.text,
                    chunk_index=chunk_index,
                )
            )
            position += 1
    return queue


def interim_status(
    decisions: Sequence[DecisionRecord],
    config: AuditConfig,
    plan: ChunkPlan,
    queue: Sequence[BlindedItem],
) -> InterimSummary:
    """Progress snapshot: per-chunk completion plus a running, non-confirmatory
    equivalence report once at least one SME and one model decision share a
    scored document.

    A chunk counts as done when every one of its items has an SME decision.
    The attached report, when present, is always flagged interim.
    """
    from .reports import build_equivalence_report, labels_by_doc

    audit_ids = {d.audit_id for d in decisions} | {i.audit_id for i in queue}
    if len(audit_ids) > 1:
        raise ValidationError(
            f"decisions span multiple audits: {sorted(audit_ids)}"
        )
    audit_id = next(iter(audit_ids)) if audit_ids else ""

    item_chunk = {item.item_id: item.chunk_index for item in queue}
    sme_items: set[str] = set()
    by_kind: Counter[str] = Counter()
    for decision in decisions:
        by_kind[decision.reviewer_kind.value] += 1
        if decision.reviewer_kind is ReviewerKind.SME:
            if decision.item_id not in item_chunk:
                raise ValidationError(
                    f"decision references unknown item {decision.item_id!r}"
                )
            sme_items.add(decision.item_id)

    done = [0] * len(plan.chunk_sizes)
    for item_id in sme_items:
        done[item_chunk[item_id]] += 1
    chunks_completed = sum(
        1 for size, count in zip(plan.chunk_sizes, done) if count >= size
    )

    report = None
    sme, model, gold = labels_by_doc(decisions, queue)
    if sme and model and set(sme) & set(model):
        report = build_equivalence_report(
            audit_id=audit_id,
            config=config,
            sme_labels=sme,
            model_labels=model,
            gold_labels=gold,
            interim=True,
            chunks_completed=chunks_completed,
        )

    return InterimSummary(
        audit_id=audit_id,
        chunk_sizes=plan.chunk_sizes,
        chunk_done=tuple(done),
        chunks_completed=chunks_completed,
        decisions_by_kind=dict(by_kind),
        report=report,
    )
