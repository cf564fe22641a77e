"""Administrator and test-fleet command line tool.

`seed` writes straight into the embedded store (WAL mode keeps a running
server happy); `send` is the desk stand-in for the handset client; `fleet`
replays synthetic load and reports client-side latency percentiles.

Exit codes: 0 success, 1 domain error, 2 transport error.
"""

from __future__ import annotations

import concurrent.futures
import csv
import datetime as dt
import random
import statistics
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import click
import httpx

from . import protocol
from .config import ServiceConfig
from .errors import PregcareError
from .geo import validate_point
from .registry import Registry

DOMAIN_ERROR = 1
TRANSPORT_ERROR = 2


@dataclass
class FleetScenario:
    seed: int
    patient_count: int
    help_rate: float
    duration_s: float
    lat_min: float = 35.0
    lat_max: float = 37.0
    lon_min: float = 43.0
    lon_max: float = 45.0

    def __post_init__(self):
        if self.patient_count <= 0 or self.help_rate <= 0:
            raise ValueError("patient_count and help_rate must be positive")
        if self.duration_s < 0:
            raise ValueError("duration must be non-negative")
        validate_point(str(self.lat_min), str(self.lon_min))
        validate_point(str(self.lat_max), str(self.lon_max))


@click.group()
@click.option("--server", default="http://127.0.0.1:8000", show_default=True,
              help="base URL of the dispatch server")
@click.option("--config", "config_path", default=None, help="JSON config file")
@click.option("--ingress-key", default="", help="X-Ingress-Key header value")
@click.pass_context
def main(ctx, server, config_path, ingress_key):
    ctx.ensure_object(dict)
    ctx.obj["server"] = server.rstrip("/")
    ctx.obj["config"] = ServiceConfig.load(config_path) if config_path else ServiceConfig()
    ctx.obj["ingress_key"] = ingress_key


def _read_csv(path):
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


def _read_advice_tsv(path):
    rows = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        trimester, week_min, week_max, lang, text = line.split("\t")
        rows.append({"trimester": trimester, "week_min": week_min,
                     "week_max": week_max, "language": lang, "text": text})
    return rows


@main.command()
@click.option("--facilities", type=click.Path(exists=True), default=None)
@click.option("--doctors", type=click.Path(exists=True), default=None)
@click.option("--advice", type=click.Path(exists=True), default=None)
@click.option("--units", type=click.Path(exists=True), default=None)
@click.pass_context
def seed(ctx, facilities, doctors, advice, units):
    """Idempotently ingest facility/doctor/advice/unit seed files."""
    config: ServiceConfig = ctx.obj["config"]
    registry = Registry(config.db_path)
    any_errors = False
    counts = []
    try:
        for label, path, loader, sink in (
            ("facilities", facilities, _read_csv, registry.seed_facilities),
            ("doctors", doctors, _read_csv, registry.seed_doctors),
            ("advice", advice, _read_advice_tsv, registry.seed_advice),
            ("units", units, _read_csv, registry.seed_units),
        ):
            if path is None:
                continue
            count, errors = sink(loader(path))
            counts.append(f"{count} {label}")
            for err in errors:
                any_errors = True
                click.echo(f"{label} {err}", err=True)
    finally:
        registry.close()
    click.echo(", ".join(counts) + " ingested")
    if any_errors:
        sys.exit(DOMAIN_ERROR)


def _post_ingress(ctx, payload: str, sender: str):
    headers = {}
    if ctx.obj["ingress_key"]:
        headers["X-Ingress-Key"] = ctx.obj["ingress_key"]
    try:
        return httpx.post(
            f"{ctx.obj['server']}/ingress/sms",
            json={"payload": payload, "sender_phone": sender},
            headers=headers,
            timeout=10.0,
        )
    except httpx.HTTPError as exc:
        click.echo(f"transport error: {exc}", err=True)
        sys.exit(TRANSPORT_ERROR)


@main.command()
@click.argument("kind", type=click.Choice(["reg", "help", "chg"]))
@click.argument("fields", nargs=-1)
@click.option("--sender", default="+9647500000000", help="sender phone")
@click.pass_context
def send(ctx, kind, fields, sender):
    """Build a payload and post it to the server.

    \b
    send reg  <name> <phone> <lat> <lon> <lmp> <lang>
    send help <patient_id> <lat> <lon> [client_ts]
    send chg  <patient_id> <date>
    """
    try:
        if kind == "reg":
            name, phone, lat, lon, lmp, lang = fields
            raw = protocol.build_reg(name, phone, lat, lon, lmp, lang)
        elif kind == "help":
            if len(fields) == 3:
                patient_id, lat, lon = fields
                client_ts = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
            else:
                patient_id, lat, lon, client_ts = fields
            raw = protocol.build_help(patient_id, lat, lon, client_ts)
        else:
            patient_id, date = fields
            raw = protocol.build_chg(patient_id, date)
        # client-side validation before any network traffic
        protocol.parse_inbound(raw, sender, dt.datetime.utcnow())
    except PregcareError as exc:
        click.echo(exc.code, err=True)
        sys.exit(DOMAIN_ERROR)
    except ValueError:
        click.echo(f"wrong field count for {kind}", err=True)
        sys.exit(DOMAIN_ERROR)

    response = _post_ingress(ctx, raw, sender)
    body = response.json()
    if body.get("ok"):
        if kind == "help":
            click.echo(f"{body['request_id']} {body['state']}")
        else:
            click.echo(" ".join(f"{k}={v}" for k, v in body.items() if k != "ok"))
    else:
        click.echo(body.get("code", "INTERNAL"), err=True)
        sys.exit(DOMAIN_ERROR)


def run_fleet(server: str, scenario: FleetScenario, ingress_key: str = "") -> dict:
    """Register a synthetic cohort, then emit HELP at the target rate.

    Payload content is a pure function of the scenario seed; latency is
    measured client-side, send to ack.
    """
    rng = random.Random(scenario.seed)
    headers = {"X-Ingress-Key": ingress_key} if ingress_key else {}
    limits = httpx.Limits(max_connections=64, max_keepalive_connections=64)

    def rand_coord():
        lat = rng.uniform(scenario.lat_min, scenario.lat_max)
        lon = rng.uniform(scenario.lon_min, scenario.lon_max)
        return f"{lat:.6f}", f"{lon:.6f}"

    with httpx.Client(base_url=server, headers=headers, timeout=10.0, limits=limits) as client:
        try:
            client.get("/health").raise_for_status()
        except httpx.HTTPError as exc:
            raise SystemExit(f"server unreachable: {exc}")

        lmp = (dt.date.today() - dt.timedelta(weeks=10)).isoformat()
        patient_ids = []
        for i in range(scenario.patient_count):
            lat, lon = rand_coord()
            phone = f"+96475{scenario.seed % 100:02d}{i:07d}"
            raw = protocol.build_reg(f"fleet-{scenario.seed}-{i}", phone, lat, lon,
                                     lmp, "en")
            r = client.post("/ingress/sms", json={"payload": raw, "sender_phone": phone})
            body = r.json()
            if body.get("ok"):
                patient_ids.append(body["patient_id"])
            elif body.get("code") == "DUPLICATE_PHONE":
                raise SystemExit(
                    "cohort phones already registered; rerun with a fresh --seed or data dir"
                )
            else:
                raise SystemExit(f"registration failed: {body}")

        total = int(scenario.help_rate * scenario.duration_s)
        latencies: list[float] = []
        accepted = 0
        errors = 0

        def one_help(i: int) -> tuple[bool, float]:
            lat = f"{(scenario.lat_min + scenario.lat_max) / 2 + (i % 97) * 1e-4:.6f}"
            lon = f"{(scenario.lon_min + scenario.lon_max) / 2 + (i % 89) * 1e-4:.6f}"
            # unique per sequence number so the dedup window never folds two sends
            client_ts = f"2014-01-25T{(i // 3600) % 24:02d}:{(i // 60) % 60:02d}:{i % 60:02d}Z"
            raw = protocol.build_help(patient_ids[i % len(patient_ids)], lat, lon, client_ts)
            t0 = time.perf_counter()
            try:
                r = client.post("/ingress/sms", json={"payload": raw, "sender_phone": "+1"})
                ok = r.status_code == 200 and r.json().get("ok") and "request_id" in r.json()
            except httpx.HTTPError:
                ok = False
            return ok, (time.perf_counter() - t0) * 1000.0

        started = time.perf_counter()
        with concurrent.futures.ThreadPoolExecutor(max_workers=32) as pool:
            futures = []
            for i in range(total):
                target = started + i / scenario.help_rate
                delay = target - time.perf_counter()
                if delay > 0:
                    time.sleep(delay)
                futures.append(pool.submit(one_help, i))
            for fut in futures:
                ok, ms = fut.result()
                if ok:
                    accepted += 1
                    latencies.append(ms)
                else:
                    errors += 1
        elapsed = time.perf_counter() - started

    report = {
        "requested": total,
        "accepted": accepted,
        "errors": errors,
        "elapsed_s": round(elapsed, 3),
        "achieved_rate": round(accepted / elapsed, 2) if elapsed > 0 else 0.0,
    }
    if latencies:
        ranked = sorted(latencies)

        def pct(p):
            return round(ranked[min(len(ranked) - 1, int(p / 100 * len(ranked)))], 2)

        report.update(p50_ms=pct(50), p95_ms=pct(95), p99_ms=pct(99))
    return report


@main.command()
@click.option("--patients", default=10, show_default=True)
@click.option("--rate", default=1.0, show_default=True, help="HELP requests per second")
@click.option("--duration", default=10.0, show_default=True, help="seconds")
@click.option("--seed", "seed_value", default=1, show_default=True)
@click.option("--bounds", default="35,37,43,45", show_default=True,
              help="lat_min,lat_max,lon_min,lon_max")
@click.pass_context
def fleet(ctx, patients, rate, duration, seed_value, bounds):
    """Synthetic load: register a cohort and emit HELP at a fixed rate."""
    lat_min, lat_max, lon_min, lon_max = (float(x) for x in bounds.split(","))
    scenario = FleetScenario(
        seed=seed_value, patient_count=patients, help_rate=rate, duration_s=duration,
        lat_min=lat_min, lat_max=lat_max, lon_min=lon_min, lon_max=lon_max,
    )
    report = run_fleet(ctx.obj["server"], scenario, ctx.obj["ingress_key"])
    for key, value in report.items():
        click.echo(f"{key}: {value}")
    if report["errors"]:
        sys.exit(DOMAIN_ERROR)


@main.command()
@click.option("--username", required=True)
@click.option("--password", required=True)
@click.pass_context
def report(ctx, username, password):
    """Print server-side counters (requests by state, notification log)."""
    server = ctx.obj["server"]
    try:
        r = httpx.post(f"{server}/auth/login",
                       json={"username": username, "password": password}, timeout=10.0)
        if r.status_code != 200:
            click.echo(r.json().get("code", "BAD_CREDENTIALS"), err=True)
            sys.exit(DOMAIN_ERROR)
        token = r.json()["token"]
        stats = httpx.get(f"{server}/stats",
                          headers={"Authorization": f"Bearer {token}"}, timeout=10.0).json()
    except httpx.HTTPError as exc:
        click.echo(f"transport error: {exc}", err=True)
        sys.exit(TRANSPORT_ERROR)
    click.echo(f"patients: {stats['patients']}")
    click.echo(f"open requests: {stats['open_requests']}")
    for state, count in sorted(stats["requests_by_state"].items()):
        click.echo(f"  {state}: {count}")
    click.echo("notifications:")
    for status, count in sorted(stats["notifications_by_status"].items()):
        click.echo(f"  {status}: {count}")


if __name__ == "__main__":
    main()
