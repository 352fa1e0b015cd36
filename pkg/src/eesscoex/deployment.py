"""County-level base-station projections and satellite-footprint counts.

Subscriber demand per county converts to a BS count sized for the peak
per-user demand; uniform BS density within the county then gives the
expected number of stations inside a satellite footprint placed fully
inside the county (worst case).  Multi-county footprints are only
modeled through an explicit overlap fraction.
"""

import csv
from dataclasses import dataclass, field
from importlib import resources
from math import ceil, floor

__all__ = [
    "CountyRecord",
    "RowDiagnostic",
    "CountyIngest",
    "IngestError",
    "DeploymentSnapshot",
    "ingest_counties",
    "bundled_county_paths",
    "load_bundled_counties",
    "bs_count",
    "footprint_bs_count",
    "build_snapshot",
    "worst_case_footprint",
]

METRO_RUCC_CODES = {1, 2, 3}


class IngestError(ValueError):
    """Raised when a county source is structurally unusable."""


@dataclass(frozen=True)
class CountyRecord:
    fips: str
    name: str
    state: str
    rucc_code: int
    population: int
    land_area_km2: float

    def __post_init__(self):
        if len(self.fips) != 5 or not self.fips.isdigit():
            raise ValueError(f"FIPS must be a 5-digit code, got {self.fips!r}")
        if self.population < 0:
            raise ValueError(f"{self.fips}: population must be >= 0")
        if self.land_area_km2 <= 0:
            raise ValueError(f"{self.fips}: land area must be positive")
        if not 1 <= self.rucc_code <= 9:
            raise ValueError(f"{self.fips}: RUCC code must lie in 1..9")

    @property
    def metro(self) -> bool:
        return self.rucc_code in METRO_RUCC_CODES


@dataclass(frozen=True)
class RowDiagnostic:
    line: int
    reason: str


@dataclass
class CountyIngest:
    records: list
    rejected: list = field(default_factory=list)
    n_nonmetro: int = 0


def _read_gazetteer(path) -> dict:
    areas = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "fips" not in reader.fieldnames:
            raise IngestError(f"{path}: gazetteer must have a 'fips' column")
        for row in reader:
            try:
                areas[row["fips"].strip().zfill(5)] = float(row["land_area_km2"])
            except (KeyError, TypeError, ValueError):
                continue
    return areas


def ingest_counties(county_csv, gazetteer_csv) -> CountyIngest:
    """Parse the county and land-area sources into metro CountyRecords.

    Schema: county CSV fips,name,state,rucc_code,population; gazetteer
    CSV fips,land_area_km2.  Malformed rows and rows without a gazetteer
    area are rejected with per-line diagnostics; non-metro rows (RUCC
    4-9) are filtered; a duplicate FIPS aborts the ingest.
    """
    areas = _read_gazetteer(gazetteer_csv)
    records = []
    rejected = []
    seen = {}
    n_nonmetro = 0
    with open(county_csv, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"fips", "name", "state", "rucc_code", "population"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise IngestError(f"{county_csv}: header must contain {sorted(required)}")
        for line, row in enumerate(reader, start=2):
            fips = (row.get("fips") or "").strip().zfill(5)
            try:
                rucc = int(row["rucc_code"])
                population = int(row["population"])
            except (KeyError, TypeError, ValueError) as exc:
                rejected.append(RowDiagnostic(line, f"malformed row: {exc}"))
                continue
            if fips in seen:
                raise IngestError(
                    f"duplicate FIPS {fips} at line {line} (first seen at line {seen[fips]})"
                )
            seen[fips] = line
            if rucc not in METRO_RUCC_CODES:
                n_nonmetro += 1
                continue
            if fips not in areas:
                rejected.append(RowDiagnostic(line, f"FIPS {fips}: no land area in gazetteer"))
                continue
            try:
                record = CountyRecord(
                    fips=fips,
                    name=(row.get("name") or "").strip(),
                    state=(row.get("state") or "").strip(),
                    rucc_code=rucc,
                    population=population,
                    land_area_km2=areas[fips],
                )
            except ValueError as exc:
                rejected.append(RowDiagnostic(line, str(exc)))
                continue
            records.append(record)
    records.sort(key=lambda r: r.fips)
    return CountyIngest(records=records, rejected=rejected, n_nonmetro=n_nonmetro)


def bundled_county_paths():
    """Paths of the bundled sample county and gazetteer CSVs."""
    data = resources.files("eesscoex.data")
    return data.joinpath("counties_metro_sample.csv"), data.joinpath("county_land_area_km2.csv")


def load_bundled_counties() -> CountyIngest:
    county_csv, gazetteer_csv = bundled_county_paths()
    return ingest_counties(str(county_csv), str(gazetteer_csv))


def bs_count(county: CountyRecord, penetration_per_100: float, rate_bps: float,
             eta_bps_per_hz: float, bandwidth_hz: float) -> int:
    """Base stations needed to serve the county's subscribers at `rate_bps` each.

    Ceiling rounding so provisioned capacity always covers demand.
    """
    if penetration_per_100 < 0:
        raise ValueError(f"penetration must be >= 0, got {penetration_per_100}")
    if rate_bps < 0:
        raise ValueError(f"rate must be >= 0, got {rate_bps}")
    if eta_bps_per_hz <= 0 or bandwidth_hz <= 0:
        raise ValueError("spectral efficiency and bandwidth must be positive")
    users = county.population * penetration_per_100 / 100.0
    demand = users * rate_bps
    return ceil(demand / (eta_bps_per_hz * bandwidth_hz))


def footprint_bs_count(n_bs: int, a_sat_km2: float, a_county_km2: float,
                       overlap_fraction: float = None) -> int:
    """Stations from one county inside a satellite footprint.

    Uniform density: floor(overlap/A_county * N_BS).  Without an explicit
    overlap the footprint is taken fully inside the county (worst case),
    i.e. overlap = min(A_sat, A_county).
    """
    if a_sat_km2 <= 0 or a_county_km2 <= 0:
        raise ValueError("areas must be positive")
    if n_bs < 0:
        raise ValueError(f"n_bs must be >= 0, got {n_bs}")
    max_fraction = min(a_sat_km2, a_county_km2) / a_county_km2
    if overlap_fraction is None:
        fraction = max_fraction
    else:
        if not 0 <= overlap_fraction <= max_fraction + 1e-12:
            raise ValueError(
                f"overlap fraction {overlap_fraction} outside [0, {max_fraction:.6f}]"
            )
        fraction = overlap_fraction
    return floor(fraction * n_bs)


@dataclass(frozen=True)
class DeploymentSnapshot:
    """Per-county BS counts for one (year, scenario, demand) configuration."""

    year: int
    adoption_factor: float
    penetration_per_100: float
    rate_bps: float
    eta_bps_per_hz: float
    bandwidth_hz: float
    counts: dict  # fips -> n_bs, insertion-ordered by FIPS


def build_snapshot(records, year: int, adoption_factor: float, rate_bps: float,
                   eta_bps_per_hz: float, bandwidth_hz: float,
                   penetration_per_100: float = None,
                   use_published: bool = True) -> DeploymentSnapshot:
    """Deterministic per-county BS counts for one configuration."""
    from .adoption import scenario_penetration

    if penetration_per_100 is None:
        penetration_per_100 = scenario_penetration(year, adoption_factor,
                                                   use_published=use_published)
    counts = {}
    for record in sorted(records, key=lambda r: r.fips):
        counts[record.fips] = bs_count(record, penetration_per_100, rate_bps,
                                       eta_bps_per_hz, bandwidth_hz)
    return DeploymentSnapshot(
        year=year,
        adoption_factor=adoption_factor,
        penetration_per_100=penetration_per_100,
        rate_bps=rate_bps,
        eta_bps_per_hz=eta_bps_per_hz,
        bandwidth_hz=bandwidth_hz,
        counts=counts,
    )


def worst_case_footprint(records, snapshot: DeploymentSnapshot, sensor):
    """County maximizing the footprint BS count for a sensor; ties to lowest FIPS."""
    by_fips = {r.fips: r for r in records}
    if not by_fips:
        raise ValueError("empty county record set")
    best = None
    for fips in sorted(by_fips):
        record = by_fips[fips]
        count = footprint_bs_count(snapshot.counts[fips], sensor.footprint_area_km2,
                                   record.land_area_km2)
        if best is None or count > best[1]:
            best = (record, count)
    return best
