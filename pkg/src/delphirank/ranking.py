"""Indicator-ranked publisher lists and cumulative-quartile categories.

A ranking is a list of publishers ordered by a non-negative prestige
indicator. Instead of quartiles holding 25% of the *publishers*, each
quartile holds the publishers that accumulate the next 25% of the total
indicator mass, which keeps the binning meaningful for heavily skewed
indicator distributions. Quartiles map one-to-one onto letter categories
A-D and numeric categories 4-1.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DomainError


class RankingError(DomainError):
    code = "RANKING_ERROR"


class EmptyInput(RankingError):
    code = "EMPTY_INPUT"


class DuplicatePublisher(RankingError):
    code = "DUPLICATE_PUBLISHER"


class NegativeScore(RankingError):
    code = "NEGATIVE_SCORE"


class ZeroTotal(RankingError):
    code = "ZERO_TOTAL"


class UnsortedInput(RankingError):
    code = "UNSORTED_INPUT"


class OutOfRange(RankingError):
    code = "OUT_OF_RANGE"


class MalformedCsv(RankingError):
    code = "MALFORMED_CSV"


class RankingImportWarning(UserWarning):
    """Non-fatal oddity noticed while importing a ranking."""


@dataclass(frozen=True)
class Field:
    """A subject field, e.g. "Archaeology and Prehistory"."""

    id: str
    name: str

    def __post_init__(self) -> None:
        if not self.name.strip():
            raise ValueError("field name must be non-empty")
        if not self.id:
            raise ValueError("field id must be non-empty")

    @classmethod
    def from_name(cls, name: str) -> "Field":
        """Derive a stable identifier from the display name."""
        slug = "-".join(name.strip().lower().split())
        return cls(id=slug, name=name.strip())


class Scope(str, Enum):
    """Whether a list covers domestic or foreign publishers."""

    DOMESTIC = "domestic"
    FOREIGN = "foreign"

    @classmethod
    def parse(cls, text: str) -> "Scope":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise OutOfRange(f"unknown scope {text!r}; expected 'domestic' or 'foreign'") from None


@dataclass(frozen=True)
class CategoryMapping:
    """One row of the quartile/letter/numeric correspondence."""

    quartile: int
    letter: str
    numeric: int


_CATEGORY_TABLE = (
    CategoryMapping(1, "A", 4),
    CategoryMapping(2, "B", 3),
    CategoryMapping(3, "C", 2),
    CategoryMapping(4, "D", 1),
)
_BY_QUARTILE = {m.quartile: m for m in _CATEGORY_TABLE}
_BY_NUMERIC = {m.numeric: m for m in _CATEGORY_TABLE}


def map_quartile_to_category(quartile: int) -> CategoryMapping:
    """Return the letter/numeric category for a quartile (1..4)."""
    try:
        return _BY_QUARTILE[quartile]
    except (KeyError, TypeError):
        raise OutOfRange(f"quartile must be 1..4, got {quartile!r}") from None


def category_from_numeric(numeric: int) -> CategoryMapping:
    """Inverse lookup: numeric category (1..4) back to the full mapping."""
    try:
        return _BY_NUMERIC[numeric]
    except (KeyError, TypeError):
        raise OutOfRange(f"category numeric must be 1..4, got {numeric!r}") from None


def round_to_category_numeric(x: float) -> int:
    """Round a score in [1, 4] to the nearest category numeric.

    Ties at .5 round up, toward the better category.
    """
    if not (1.0 <= x <= 4.0):
        raise OutOfRange(f"score must lie in [1, 4], got {x!r}")
    # Exact for doubles in [1, 4]: 0.5 is a multiple of every ulp here.
    return int(math.floor(x + 0.5))


def quartile_of_share(accum_share: float | Fraction) -> int:
    """Quartile for an accumulated indicator share, in percent.

    An entry belongs to the lowest quartile whose 25%-boundary its
    accumulated share does not exceed; shares landing exactly on a
    boundary stay in the lower quartile (25.0 is still quartile 1).
    """
    if accum_share <= 0:
        raise OutOfRange(f"accumulated share must be positive, got {accum_share!r}")
    return min(4, math.ceil(Fraction(accum_share) / 25))


def assign_cumulative_quartiles(scores: Sequence[float]) -> list[tuple[float, int]]:
    """Compute (accumulated share %, quartile) for descending-sorted scores.

    Shares are computed with exact rational arithmetic so quartile
    boundaries never wobble with summation order; the returned share is
    the closest float.
    """
    if not scores:
        raise EmptyInput("no scores given")
    exact = []
    for s in scores:
        if s < 0:
            raise NegativeScore(f"negative score {s!r}")
        exact.append(Fraction(s))
    for prev, cur in zip(exact, exact[1:]):
        if cur > prev:
            raise UnsortedInput("scores must be sorted in non-increasing order")
    total = sum(exact)
    if total == 0:
        raise ZeroTotal("all scores are zero")
    out: list[tuple[float, int]] = []
    cum = Fraction(0)
    for value in exact:
        cum += value
        share = cum * 100 / total
        out.append((float(share), quartile_of_share(share)))
    return out


@dataclass(frozen=True)
class RankedEntry:
    """One publisher's row in a ranking."""

    publisher: str
    icee: float
    position: int
    accum_share: float
    quartile: int
    category: CategoryMapping


@dataclass(frozen=True)
class RankedList:
    """A field's ranking for one scope, with categories assigned."""

    field: Field
    scope: Scope
    entries: tuple[RankedEntry, ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise EmptyInput("ranked list has no entries")
        prev_icee = math.inf
        prev_share = 0.0
        prev_quartile = 1
        for e in self.entries:
            if e.icee > prev_icee:
                raise UnsortedInput(f"entry {e.publisher!r} breaks descending score order")
            if e.accum_share < prev_share:
                raise UnsortedInput(f"entry {e.publisher!r} breaks accumulated-share order")
            if e.quartile < prev_quartile:
                raise UnsortedInput(f"entry {e.publisher!r} breaks quartile order")
            prev_icee, prev_share, prev_quartile = e.icee, e.accum_share, e.quartile
        last = self.entries[-1].accum_share
        if abs(last - 100.0) > 100.0 * 1e-9:
            raise RankingError(f"last accumulated share is {last!r}, expected 100")

    @property
    def publishers(self) -> tuple[str, ...]:
        return tuple(e.publisher for e in self.entries)

    def entry(self, publisher: str) -> RankedEntry:
        for e in self.entries:
            if e.publisher == publisher:
                return e
        raise KeyError(publisher)

    def to_dict(self) -> dict:
        return {
            "field": {"id": self.field.id, "name": self.field.name},
            "scope": self.scope.value,
            "entries": [
                {
                    "publisher": e.publisher,
                    "icee": e.icee,
                    "position": e.position,
                    "accum_share": e.accum_share,
                    "quartile": e.quartile,
                }
                for e in self.entries
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RankedList":
        entries = tuple(
            RankedEntry(
                publisher=e["publisher"],
                icee=e["icee"],
                position=e["position"],
                accum_share=e["accum_share"],
                quartile=e["quartile"],
                category=map_quartile_to_category(e["quartile"]),
            )
            for e in data["entries"]
        )
        return cls(
            field=Field(id=data["field"]["id"], name=data["field"]["name"]),
            scope=Scope(data["scope"]),
            entries=entries,
        )


def import_ranking(
    rows: Iterable[tuple[str, float]], field: Field, scope: Scope
) -> RankedList:
    """Build a RankedList from raw (publisher, score) rows.

    Rows are sorted by descending score; equal scores are ordered
    alphabetically and share a position (dense numbering, so positions
    stay consecutive). Accumulated shares and quartiles follow.
    """
    rows = list(rows)
    if not rows:
        raise EmptyInput("ranking has no rows")
    seen: set[str] = set()
    for publisher, score in rows:
        key = publisher.strip().casefold()
        if not key:
            raise MalformedCsv("blank publisher name")
        if key in seen:
            raise DuplicatePublisher(f"duplicate publisher {publisher!r}")
        seen.add(key)
        if score < 0:
            raise NegativeScore(f"negative score for {publisher!r}: {score!r}")
    ordered = sorted(rows, key=lambda r: (-r[1], r[0]))
    shares = assign_cumulative_quartiles([score for _, score in ordered])

    if len(ordered) == 1:
        warnings.warn(
            "single-entry ranking: the only publisher necessarily lands in "
            "quartile 4 (category D)",
            RankingImportWarning,
            stacklevel=2,
        )

    entries = []
    position = 0
    prev_score: float | None = None
    for (publisher, score), (share, quartile) in zip(ordered, shares):
        if prev_score is None or score != prev_score:
            position += 1
            prev_score = score
        entries.append(
            RankedEntry(
                publisher=publisher,
                icee=float(score),
                position=position,
                accum_share=share,
                quartile=quartile,
                category=map_quartile_to_category(quartile),
            )
        )
    return RankedList(field=field, scope=scope, entries=tuple(entries))


RANKING_CSV_HEADER = ("publisher", "icee")
EXPORT_CSV_HEADER = (
    "publisher",
    "position",
    "icee",
    "accum_share",
    "quartile",
    "category_letter",
    "category_numeric",
)


def read_ranking_csv(text: str) -> list[tuple[str, float]]:
    """Parse the `publisher,icee` ingest format (header required)."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedCsv("empty CSV") from None
    if [h.strip().lower() for h in header] != list(RANKING_CSV_HEADER):
        raise MalformedCsv(f"expected header {','.join(RANKING_CSV_HEADER)!r}, got {header!r}")
    rows: list[tuple[str, float]] = []
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 2:
            raise MalformedCsv(f"line {lineno}: expected 2 columns, got {len(row)}")
        publisher = row[0].strip()
        try:
            score = float(row[1])
        except ValueError:
            raise MalformedCsv(f"line {lineno}: bad score {row[1]!r}") from None
        rows.append((publisher, score))
    return rows


def ranking_to_csv(ranked: RankedList) -> str:
    """Serialize a ranking in the export format (shares shown to 2 decimals)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(EXPORT_CSV_HEADER)
    for e in ranked.entries:
        writer.writerow(
            [
                e.publisher,
                e.position,
                e.icee,
                f"{e.accum_share:.2f}",
                e.quartile,
                e.category.letter,
                e.category.numeric,
            ]
        )
    return buf.getvalue()
