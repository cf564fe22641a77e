import datetime as dt

import pytest

from pregcare.clock import ManualClock
from pregcare.registry import Registry

ERBIL = (36.2062125, 44.0307111)


@pytest.fixture
def clock():
    return ManualClock(dt.datetime(2014, 1, 25, 5, 0, 0))


@pytest.fixture
def registry(tmp_path, clock):
    reg = Registry(tmp_path / "registration.db", clock=clock)
    yield reg
    reg.close()


@pytest.fixture
def seeded(registry):
    registry.seed_facilities([
        {"facility_id": "FC01", "kind": "care_center", "name": "Central Care",
         "lat": 36.21, "lon": 44.03, "contact_phone": "+9647500000001"},
        {"facility_id": "FC02", "kind": "care_center", "name": "North Care",
         "lat": 36.50, "lon": 44.20, "contact_phone": "+9647500000002"},
        {"facility_id": "FH01", "kind": "hospital", "name": "Maternity Hospital",
         "lat": 36.205, "lon": 44.032, "contact_phone": "+9647500000003"},
        {"facility_id": "FH02", "kind": "hospital", "name": "General Hospital",
         "lat": 36.56, "lon": 44.10, "contact_phone": "+9647500000004"},
    ])
    registry.seed_doctors([
        {"doctor_id": "D000001", "username": "dr.azad", "password": "pw-azad",
         "hospital_id": "FH01", "phone": "+9647501110001"},
        {"doctor_id": "D000002", "username": "dr.lana", "password": "pw-lana",
         "hospital_id": "FH01", "phone": "+9647501110002"},
    ])
    registry.seed_units([
        {"unit_id": "U000001", "kind": "car", "lat": 36.2, "lon": 44.0},
        {"unit_id": "U000002", "kind": "helicopter", "lat": 36.3, "lon": 44.1},
    ])
    return registry


def pytest_runtest_logreport(report):
    # acceptance gate: one visible pass/fail line per criterion
    if report.when == "call" and "test_acceptance" in report.nodeid:
        status = "PASS" if report.passed else "FAIL"
        name = report.nodeid.split("::", 1)[1]
        print(f"[{status}] {name}")
