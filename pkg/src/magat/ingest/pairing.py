"""Pairing patches with ground truth and splitting along the time axis."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

from .patch import PatchTensor
from .records import SiteRecord

log = logging.getLogger(__name__)

DEFAULT_MAX_GAP_DAYS = 160


@dataclass
class LabeledSample:
    """A patch matched to its temporally closest ground-truth record."""

    patch: PatchTensor
    record: SiteRecord

    @property
    def site_id(self) -> str:
        return self.record.id

    @property
    def label(self) -> int:
        return self.record.label


def pair_with_ground_truth(patches: Sequence[PatchTensor],
                           records: Sequence[SiteRecord],
                           max_gap_days: int = DEFAULT_MAX_GAP_DAYS
                           ) -> tuple[list[LabeledSample], int]:
    """Match each patch to the same-site record nearest in time.

    Sites are resolved through the patch center coordinates; one record
    may serve several patches. Ties in temporal distance go to the
    earlier record. Patches with no candidate record within the gap are
    dropped; the second return value counts them.
    """
    if not patches or not records:
        raise ValueError("both patches and records must be nonempty")

    by_coord: dict[tuple[float, float], list[SiteRecord]] = {}
    for r in records:
        by_coord.setdefault((r.lat, r.lon), []).append(r)
    for coord, recs in by_coord.items():
        ids = {r.id for r in recs}
        if len(ids) > 1:
            raise ValueError(f"multiple site ids {sorted(ids)} share coordinates {coord}")

    samples: list[LabeledSample] = []
    dropped = 0
    for patch in patches:
        candidates = by_coord.get(patch.center)
        if not candidates:
            dropped += 1
            continue
        best = min(candidates,
                   key=lambda r: (abs((r.observation_date - patch.acquisition_date).days),
                                  r.observation_date))
        gap = abs((best.observation_date - patch.acquisition_date).days)
        if gap > max_gap_days:
            dropped += 1
            continue
        samples.append(LabeledSample(patch=patch, record=best))
    if dropped:
        log.info("pairing dropped %d patch(es) with no record within %d days",
                 dropped, max_gap_days)
    return samples, dropped


def temporal_split(samples: Sequence[LabeledSample],
                   train_years: Sequence[int],
                   test_years: Sequence[int]
                   ) -> tuple[list[LabeledSample], list[LabeledSample]]:
    """Partition samples by observation year; years outside both sets are excluded."""
    train_years, test_years = set(train_years), set(test_years)
    if train_years & test_years:
        raise ValueError(f"split years overlap: {sorted(train_years & test_years)}")
    train = [s for s in samples if s.record.observation_date.year in train_years]
    test = [s for s in samples if s.record.observation_date.year in test_years]
    if not train:
        raise ValueError(f"empty train split for years {sorted(train_years)}")
    if not test:
        raise ValueError(f"empty test split for years {sorted(test_years)}")
    return train, test
