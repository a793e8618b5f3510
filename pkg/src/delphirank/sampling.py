"""Finite-population sample sizes and reproducible random draws.

Sample sizes use the standard finite-population formula

    n = ceil( N * z^2 * p * q / (e^2 * (N - 1) + z^2 * p * q) ),  q = 1 - p

evaluated with exact rational arithmetic so the ceiling is taken on the
true quotient. Defaults are z = 1.96 (95% confidence), e = 0.05 and
p = 0.5; p = 0.5 is the conservative choice that maximizes p*q and is
required to reproduce standard published sample-size tables.

Draws are audit-reproducible: every subject gets a uniform random number
from a seeded Mersenne Twister (``random.Random``), the roster is sorted
by descending random number, and the first n subjects are taken. Rosters
are normalized (sorted by expert id) before the draw so the result does
not depend on input file order.
"""

from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Collection, Sequence

from .errors import DomainError
from .ranking import Field


class SamplingError(DomainError):
    code = "SAMPLING_ERROR"


class InvalidParams(SamplingError):
    code = "INVALID_PARAMS"


class DuplicateField(SamplingError):
    code = "DUPLICATE_FIELD"


class DuplicateExpert(SamplingError):
    code = "DUPLICATE_EXPERT"


class SampleTooLarge(SamplingError):
    code = "SAMPLE_TOO_LARGE"


class OverlapError(SamplingError):
    code = "OVERLAP"


class RosterCsvError(SamplingError):
    code = "MALFORMED_CSV"


@dataclass(frozen=True)
class SamplingParams:
    """Confidence z-value, margin of error and expected proportion."""

    confidence_z: float = 1.96
    margin_e: float = 0.05
    proportion_p: float = 0.5

    def __post_init__(self) -> None:
        if self.confidence_z <= 0:
            raise InvalidParams(f"confidence_z must be positive, got {self.confidence_z!r}")
        if not (0 < self.margin_e < 1):
            raise InvalidParams(f"margin_e must lie in (0, 1), got {self.margin_e!r}")
        if not (0 < self.proportion_p < 1):
            raise InvalidParams(f"proportion_p must lie in (0, 1), got {self.proportion_p!r}")


@dataclass(frozen=True)
class Stratum:
    field: Field
    population_n: int

    def __post_init__(self) -> None:
        if self.population_n < 1:
            raise InvalidParams(f"population must be >= 1, got {self.population_n!r}")


@dataclass(frozen=True)
class SampleSpec:
    field: Field
    sample_n: int


@dataclass(frozen=True)
class Subject:
    """One roster member; the email may be blank."""

    expert_id: str
    field: str
    email: str = ""


@dataclass(frozen=True)
class Roster:
    subjects: tuple[Subject, ...]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for s in self.subjects:
            if not s.expert_id:
                raise RosterCsvError("blank expert id")
            if s.expert_id in seen:
                raise DuplicateExpert(f"duplicate expert id {s.expert_id!r}")
            seen.add(s.expert_id)

    def __len__(self) -> int:
        return len(self.subjects)

    @property
    def expert_ids(self) -> frozenset[str]:
        return frozenset(s.expert_id for s in self.subjects)


def required_sample_size(population_n: int, params: SamplingParams | None = None) -> int:
    """Minimum sample size for a finite population at the given parameters.

    Monotone non-decreasing in the population size and never larger than
    it; approaches ceil(z^2*p*q / e^2) for large populations.
    """
    if population_n < 1:
        raise InvalidParams(f"population must be >= 1, got {population_n!r}")
    params = params or SamplingParams()
    z = Fraction(params.confidence_z)
    p = Fraction(params.proportion_p)
    e = Fraction(params.margin_e)
    zzpq = z * z * p * (1 - p)
    exact = population_n * zzpq / (e * e * (population_n - 1) + zzpq)
    return math.ceil(exact)


def allocate(strata: Sequence[Stratum], params: SamplingParams | None = None) -> list[SampleSpec]:
    """Apply the sample-size formula to each stratum independently."""
    if not strata:
        raise InvalidParams("no strata given")
    seen: set[str] = set()
    for stratum in strata:
        if stratum.field.id in seen:
            raise DuplicateField(f"duplicate field {stratum.field.name!r}")
        seen.add(stratum.field.id)
    return [
        SampleSpec(field=s.field, sample_n=required_sample_size(s.population_n, params))
        for s in strata
    ]


def draw_sample(roster: Roster, n: int, seed: int) -> list[Subject]:
    """Draw n subjects without replacement, reproducibly for (roster, seed)."""
    if n < 1:
        raise InvalidParams(f"sample size must be >= 1, got {n!r}")
    if n > len(roster):
        raise SampleTooLarge(f"sample size {n} exceeds roster size {len(roster)}")
    ordered = sorted(roster.subjects, key=lambda s: s.expert_id)
    rng = random.Random(seed)
    tagged = [(rng.random(), subject) for subject in ordered]
    tagged.sort(key=lambda pair: (-pair[0], pair[1].expert_id))
    return [subject for _, subject in tagged[:n]]


def extend_sample(
    existing_ids: Collection[str], supplement: Roster, n_extra: int, seed: int
) -> list[Subject]:
    """Draw n_extra subjects from a supplementary roster to grow a sample.

    The supplement must be disjoint from the existing sample, so the
    combined sample keeps unique expert ids and sizes simply add.
    """
    overlap = supplement.expert_ids & set(existing_ids)
    if overlap:
        raise OverlapError(f"supplement overlaps existing sample: {sorted(overlap)}")
    return draw_sample(supplement, n_extra, seed)


ROSTER_CSV_HEADER = ("expert_id", "field", "email")


def read_roster_csv(text: str) -> Roster:
    """Parse the `expert_id,field,email` roster format (header required)."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise RosterCsvError("empty CSV") from None
    if [h.strip().lower() for h in header] != list(ROSTER_CSV_HEADER):
        raise RosterCsvError(f"expected header {','.join(ROSTER_CSV_HEADER)!r}, got {header!r}")
    subjects = []
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 3:
            raise RosterCsvError(f"line {lineno}: expected 3 columns, got {len(row)}")
        subjects.append(Subject(expert_id=row[0].strip(), field=row[1].strip(), email=row[2].strip()))
    return Roster(subjects=tuple(subjects))


def sample_to_csv(subjects: Sequence[Subject], seed_of: dict[str, int]) -> str:
    """Serialize a drawn sample as `expert_id,field,seed` rows."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["expert_id", "field", "seed"])
    for s in subjects:
        writer.writerow([s.expert_id, s.field, seed_of.get(s.expert_id, "")])
    return buf.getvalue()
