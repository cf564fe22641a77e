#!/usr/bin/env python3
"""Boot a throwaway server, seed it, and walk one emergency end to end.

Usage: python scripts/demo_end_to_end.py
"""

import csv
import datetime as dt
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from pregcare.clock import iso
from pregcare.config import ServiceConfig
from pregcare.protocol import build_help, build_reg
from pregcare.registry import Registry
from pregcare.service import ServiceRuntime, create_app

SEED_DIR = Path(__file__).parent / "seed_data"


def main():
    from fastapi.testclient import TestClient

    with tempfile.TemporaryDirectory() as tmp:
        config = ServiceConfig(data_dir=tmp, delivery_workers=2, backoff_base_s=0.01)
        runtime = ServiceRuntime(config)

        with open(SEED_DIR / "facilities.csv", newline="") as f:
            runtime.registry.seed_facilities(list(csv.DictReader(f)))
        with open(SEED_DIR / "doctors.csv", newline="") as f:
            runtime.registry.seed_doctors(list(csv.DictReader(f)))
        with open(SEED_DIR / "units.csv", newline="") as f:
            runtime.registry.seed_units(list(csv.DictReader(f)))
        runtime.registry.create_account("op", "op-pw", "emc_operator")
        runtime.start()

        with TestClient(create_app(runtime)) as client:
            lmp = (dt.date.today() - dt.timedelta(weeks=18)).isoformat()
            reg = build_reg("Rawshan", "+9647501234567", "36.2062125", "44.0307111", lmp, "ku")
            ack = client.post("/ingress/sms",
                              json={"payload": reg, "sender_phone": "+9647509999999"}).json()
            print("registered:", ack)

            help_raw = build_help(ack["patient_id"], "36.2062125", "44.0307111",
                                  iso(dt.datetime.utcnow()))
            ack = client.post("/ingress/sms",
                              json={"payload": help_raw, "sender_phone": "+9647501234567"}).json()
            print("help ingested:", ack)

            token = client.post("/auth/login",
                                json={"username": "op", "password": "op-pw"}).json()["token"]
            headers = {"Authorization": f"Bearer {token}"}
            rid = ack["request_id"]
            print("assign:", client.post(f"/requests/{rid}/assign",
                                         json={"unit_id": "U000001"}, headers=headers).json())
            print("complete:", client.post(f"/requests/{rid}/complete", headers=headers).json())

            runtime.delivery.drain(timeout_s=5)
            print("\ngateway sink:")
            print(runtime.gateway.sink_path.read_text())
        runtime.stop()


if __name__ == "__main__":
    main()
