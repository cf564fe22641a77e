"""Independent great-circle oracle, deliberately not the haversine form.

Uses the Vincenty-on-a-sphere central-angle formula (atan2 of the chord
components), which is numerically stable at all separations. Written and
frozen before the production distance code; never import pregcare.geo here.
"""

import math

ORACLE_RADIUS_KM = 6372.797


def great_circle_km(lat1, lon1, lat2, lon2, radius_km=ORACLE_RADIUS_KM):
    p1 = math.radians(lat1)
    p2 = math.radians(lat2)
    dl = math.radians(lon2 - lon1)
    num = math.hypot(
        math.cos(p2) * math.sin(dl),
        math.cos(p1) * math.sin(p2) - math.sin(p1) * math.cos(p2) * math.cos(dl),
    )
    den = math.sin(p1) * math.sin(p2) + math.cos(p1) * math.cos(p2) * math.cos(dl)
    return radius_km * math.atan2(num, den)
