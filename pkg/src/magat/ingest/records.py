"""Ground-truth site records and their CSV serialization."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Iterable

CSV_HEADER = ["id", "lat", "lon", "date", "label", "lst_day", "lst_night", "ssm"]


@dataclass(frozen=True)
class SiteRecord:
    """One ground-truth observation: location, date, label, environmental summaries.

    `label` is 1 for a confirmed positive site and 0 for a pseudo-absence.
    Temperatures are kelvin; soil moisture is a percentage.
    """

    id: str
    lat: float
    lon: float
    observation_date: date
    label: int
    lst_day: float
    lst_night: float
    ssm: float

    def __post_init__(self):
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"site {self.id!r}: latitude {self.lat} out of range")
        if not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"site {self.id!r}: longitude {self.lon} out of range")
        if self.label not in (0, 1):
            raise ValueError(f"site {self.id!r}: label must be 0 or 1, got {self.label}")
        if not 0.0 <= self.ssm <= 100.0:
            raise ValueError(f"site {self.id!r}: soil moisture {self.ssm} out of [0, 100]")


def write_site_csv(records: Iterable[SiteRecord], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for r in records:
            writer.writerow([r.id, f"{r.lat:.8f}", f"{r.lon:.8f}",
                             r.observation_date.isoformat(), r.label,
                             f"{r.lst_day:.4f}", f"{r.lst_night:.4f}", f"{r.ssm:.4f}"])


def read_site_csv(path: str | Path) -> list[SiteRecord]:
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        for row in reader:
            records.append(SiteRecord(
                id=row["id"],
                lat=float(row["lat"]),
                lon=float(row["lon"]),
                observation_date=date.fromisoformat(row["date"]),
                label=int(row["label"]),
                lst_day=float(row["lst_day"]),
                lst_night=float(row["lst_night"]),
                ssm=float(row["ssm"])))
    return records
