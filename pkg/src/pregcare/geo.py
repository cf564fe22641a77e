"""Great-circle distance and nearest-facility selection.

All routing decisions (care-center assignment at registration, hospital
choice on an emergency) come down to the haversine distance below. The
sphere radius is fixed at 6372.797 km; keep it on ``EarthModel`` so tests
can swap it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

from .errors import EmptyCandidateSet, MalformedCoordinate, OutOfRange

SPHERE_RADIUS_KM = 6372.797


@dataclass(frozen=True)
class EarthModel:
    radius_km: float = SPHERE_RADIUS_KM
    deg_to_rad: float = math.pi / 180.0

    @property
    def half_circumference_km(self) -> float:
        return math.pi * self.radius_km


DEFAULT_EARTH = EarthModel()


@dataclass(frozen=True)
class GeoPoint:
    """Validated WGS-84 style decimal degrees pair."""

    lat: float
    lon: float

    def __post_init__(self):
        for v in (self.lat, self.lon):
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise MalformedCoordinate(f"coordinate is not a number: {v!r}")
            if math.isnan(v) or math.isinf(v):
                raise MalformedCoordinate(f"coordinate is not finite: {v!r}")
        if not -90.0 <= self.lat <= 90.0:
            raise OutOfRange(f"latitude {self.lat} outside [-90, 90]")
        if not -180.0 < self.lon <= 180.0:
            raise OutOfRange(f"longitude {self.lon} outside (-180, 180]")


def validate_point(raw_lat: str, raw_lon: str) -> GeoPoint:
    """Parse textual coordinates (as they arrive inside SMS payloads)."""
    values = []
    for raw in (raw_lat, raw_lon):
        try:
            values.append(float(str(raw).strip()))
        except (TypeError, ValueError):
            raise MalformedCoordinate(f"not a decimal number: {raw!r}") from None
    return GeoPoint(values[0], values[1])


def haversine_distance(a: GeoPoint, b: GeoPoint, earth: EarthModel = DEFAULT_EARTH) -> float:
    """Great-circle distance in kilometers between two points on the sphere.

    The sqrt argument is clamped to [0, 1] so antipodal pairs cannot
    produce a NaN from floating rounding.
    """
    phi1 = a.lat * earth.deg_to_rad
    phi2 = b.lat * earth.deg_to_rad
    dphi = (b.lat - a.lat) * earth.deg_to_rad
    dlam = (b.lon - a.lon) * earth.deg_to_rad
    h = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2
    c = 2.0 * math.asin(min(1.0, math.sqrt(h)))
    return earth.radius_km * c


def nearest_facility(
    origin: GeoPoint,
    candidates: Iterable[Tuple[str, GeoPoint]],
    kind_filter: Optional[str] = None,
    earth: EarthModel = DEFAULT_EARTH,
) -> Tuple[str, float]:
    """Exhaustive argmin over candidates; ties break to the smallest id.

    Candidates are `(facility_id, point)` or `(facility_id, point, kind)`
    tuples; `kind_filter` only applies to the 3-tuple form.
    """
    best: Optional[Tuple[float, str]] = None
    for entry in candidates:
        if len(entry) == 3:
            fid, point, kind = entry
            if kind_filter is not None and kind != kind_filter:
                continue
        else:
            fid, point = entry
        d = haversine_distance(origin, point, earth)
        key = (d, fid)
        if best is None or key < best:
            best = key
    if best is None:
        raise EmptyCandidateSet(
            f"no facility of kind {kind_filter!r} registered" if kind_filter else "no facilities registered"
        )
    return best[1], best[0]
