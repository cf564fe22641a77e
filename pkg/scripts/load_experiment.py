#!/usr/bin/env python3
"""Spin up a local server and measure ingest latency at a target rate.

Usage: python scripts/load_experiment.py [rate] [duration_s]
"""

import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))
sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from pregcare.cli import FleetScenario, run_fleet

from server_util import LiveServer


def main():
    rate = float(sys.argv[1]) if len(sys.argv) > 1 else 50.0
    duration = float(sys.argv[2]) if len(sys.argv) > 2 else 20.0
    with tempfile.TemporaryDirectory() as tmp:
        server = LiveServer(Path(tmp) / "data").start()
        try:
            server.runtime.registry.seed_facilities([
                {"facility_id": "FC01", "kind": "care_center", "name": "Central Care",
                 "lat": 36.21, "lon": 44.03, "contact_phone": "+1"},
                {"facility_id": "FH01", "kind": "hospital", "name": "Maternity Hospital",
                 "lat": 36.205, "lon": 44.032, "contact_phone": "+2"},
            ])
            scenario = FleetScenario(seed=1, patient_count=20,
                                     help_rate=rate, duration_s=duration)
            report = run_fleet(server.url, scenario)
        finally:
            server.stop()
    for key, value in report.items():
        print(f"{key}: {value}")


if __name__ == "__main__":
    main()
