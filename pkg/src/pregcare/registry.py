"""System of record: patients, facilities, doctors, units, requests,
appointments, advice catalog, notification log, patient files, accounts.

Backed by a single embedded sqlite database. All writes funnel through one
lock (the writer gate); sqlite WAL mode keeps cross-process readers happy
so the CLI can seed while the server runs. Timestamps come from an
injectable clock and are stored as ISO-8601 UTC text.
"""

from __future__ import annotations

import dataclasses
import datetime as dt
import hashlib
import hmac
import json
import secrets
import sqlite3
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .clock import SystemClock, iso, parse_iso
from .errors import DuplicatePhone, InvalidField, NotFound
from .geo import GeoPoint

MAX_PREGNANCY_WEEKS = 44
LANGUAGES = ("en", "ku", "ar")
FACILITY_KINDS = ("care_center", "hospital")
UNIT_KINDS = ("car", "boat_life", "helicopter")
UNIT_STATUSES = ("available", "dispatched", "out_of_service")

_SCHEMA = """
CREATE TABLE IF NOT EXISTS patients (
    patient_id TEXT PRIMARY KEY,
    name TEXT NOT NULL,
    phone TEXT NOT NULL,
    husband_phone TEXT NOT NULL,
    lat REAL NOT NULL, lon REAL NOT NULL,
    lmp_date TEXT NOT NULL,
    language TEXT NOT NULL DEFAULT 'en',
    care_center_id TEXT NOT NULL,
    registered_at TEXT NOT NULL,
    active INTEGER NOT NULL DEFAULT 1
);
CREATE TABLE IF NOT EXISTS facilities (
    facility_id TEXT PRIMARY KEY,
    kind TEXT NOT NULL,
    name TEXT NOT NULL,
    lat REAL NOT NULL, lon REAL NOT NULL,
    contact_phone TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS doctors (
    doctor_id TEXT PRIMARY KEY,
    username TEXT NOT NULL UNIQUE,
    password_hash TEXT NOT NULL,
    hospital_id TEXT NOT NULL,
    phone TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS units (
    unit_id TEXT PRIMARY KEY,
    kind TEXT NOT NULL,
    lat REAL NOT NULL, lon REAL NOT NULL,
    status TEXT NOT NULL DEFAULT 'available'
);
CREATE TABLE IF NOT EXISTS help_requests (
    request_id TEXT PRIMARY KEY,
    patient_id TEXT NOT NULL,
    lat REAL NOT NULL, lon REAL NOT NULL,
    request_time TEXT NOT NULL,
    client_ts TEXT NOT NULL,
    received_time TEXT NOT NULL,
    state TEXT NOT NULL,
    hospital_id TEXT,
    unit_id TEXT,
    history TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS appointments (
    appointment_id TEXT PRIMARY KEY,
    patient_id TEXT NOT NULL,
    facility_id TEXT NOT NULL,
    scheduled_for TEXT NOT NULL,
    slot TEXT NOT NULL,
    state TEXT NOT NULL,
    created_at TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS advice_catalog (
    advice_id TEXT PRIMARY KEY,
    trimester INTEGER NOT NULL,
    week_min INTEGER NOT NULL,
    week_max INTEGER NOT NULL,
    language TEXT NOT NULL,
    text TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS notifications (
    notification_id TEXT PRIMARY KEY,
    recipient_phone TEXT NOT NULL,
    channel TEXT NOT NULL DEFAULT 'soip',
    template_id TEXT NOT NULL,
    payload TEXT NOT NULL,
    status TEXT NOT NULL,
    created_at TEXT NOT NULL,
    sent_at TEXT
);
CREATE TABLE IF NOT EXISTS patient_files (
    file_id TEXT PRIMARY KEY,
    patient_id TEXT NOT NULL,
    doctor_id TEXT NOT NULL,
    request_id TEXT NOT NULL,
    notes TEXT NOT NULL,
    created_at TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS admin_accounts (
    account_id TEXT PRIMARY KEY,
    username TEXT NOT NULL UNIQUE,
    password_hash TEXT NOT NULL,
    role TEXT NOT NULL,
    doctor_id TEXT
);
CREATE TABLE IF NOT EXISTS id_counters (
    entity TEXT PRIMARY KEY,
    value INTEGER NOT NULL
);
CREATE INDEX IF NOT EXISTS idx_patients_phone ON patients (phone);
CREATE INDEX IF NOT EXISTS idx_notifications_status ON notifications (status);
CREATE INDEX IF NOT EXISTS idx_requests_state ON help_requests (state);
"""

_ID_PREFIX = {
    "patient": "P",
    "facility": "F",
    "doctor": "D",
    "unit": "U",
    "request": "R",
    "appointment": "A",
    "advice": "V",
    "notification": "N",
    "file": "PF",
    "account": "ACC",
}

_PBKDF2_ITERATIONS = 60_000


def hash_password(password: str) -> str:
    salt = secrets.token_hex(16)
    digest = hashlib.pbkdf2_hmac("sha256", password.encode(), bytes.fromhex(salt), _PBKDF2_ITERATIONS)
    return f"pbkdf2-sha256${_PBKDF2_ITERATIONS}${salt}${digest.hex()}"


def verify_password(password: str, stored: str) -> bool:
    try:
        _, iters, salt, expect = stored.split("$")
        digest = hashlib.pbkdf2_hmac("sha256", password.encode(), bytes.fromhex(salt), int(iters))
        return hmac.compare_digest(digest.hex(), expect)
    except (ValueError, TypeError):
        return False


@dataclass(frozen=True)
class PatientRecord:
    patient_id: str
    name: str
    phone: str
    husband_phone: str
    home: GeoPoint
    lmp_date: dt.date
    language: str
    care_center_id: str
    registered_at: dt.datetime
    active: bool = True


@dataclass(frozen=True)
class Facility:
    facility_id: str
    kind: str
    name: str
    location: GeoPoint
    contact_phone: str


@dataclass(frozen=True)
class DoctorAccount:
    doctor_id: str
    username: str
    hospital_id: str
    phone: str


@dataclass(frozen=True)
class SuccoringUnit:
    unit_id: str
    kind: str
    base: GeoPoint
    status: str


@dataclass(frozen=True)
class Appointment:
    appointment_id: str
    patient_id: str
    facility_id: str
    scheduled_for: dt.date
    slot: str
    state: str
    created_at: dt.datetime


@dataclass(frozen=True)
class AdviceEntry:
    advice_id: str
    trimester: int
    week_min: int
    week_max: int
    language: str
    text: str


@dataclass(frozen=True)
class NotificationRecord:
    notification_id: str
    recipient_phone: str
    channel: str
    template_id: str
    payload: str
    status: str
    created_at: dt.datetime
    sent_at: Optional[dt.datetime]


@dataclass(frozen=True)
class PatientFile:
    file_id: str
    patient_id: str
    doctor_id: str
    request_id: str
    notes: str
    created_at: dt.datetime


@dataclass(frozen=True)
class Account:
    account_id: str
    username: str
    role: str
    doctor_id: Optional[str]


class Registry:
    """Single-writer embedded store over sqlite."""

    def __init__(self, path, clock=None):
        self.path = str(path)
        self.clock = clock or SystemClock()
        self._lock = threading.RLock()
        self._conn = sqlite3.connect(self.path, check_same_thread=False)
        self._conn.row_factory = sqlite3.Row
        with self._lock:
            self._conn.execute("PRAGMA journal_mode=WAL")
            self._conn.execute("PRAGMA synchronous=NORMAL")
            self._conn.execute("PRAGMA busy_timeout=5000")
            self._conn.executescript(_SCHEMA)
            self._conn.commit()

    def close(self):
        with self._lock:
            self._conn.close()

    def _next_id(self, entity: str) -> str:
        prefix = _ID_PREFIX[entity]
        cur = self._conn.execute("SELECT value FROM id_counters WHERE entity = ?", (entity,))
        row = cur.fetchone()
        value = (row["value"] if row else 0) + 1
        self._conn.execute(
            "INSERT INTO id_counters (entity, value) VALUES (?, ?) "
            "ON CONFLICT(entity) DO UPDATE SET value = excluded.value",
            (entity, value),
        )
        return f"{prefix}{value:06d}"

    # -- patients ----------------------------------------------------------

    def create_patient(
        self,
        name: str,
        phone: str,
        husband_phone: str,
        home: GeoPoint,
        lmp_date: dt.date,
        language: str,
        care_center_id: str,
    ) -> PatientRecord:
        if not name or "|" in name:
            raise InvalidField("name must be non-empty and must not contain '|'")
        if language not in LANGUAGES:
            raise InvalidField(f"language must be one of {LANGUAGES}")
        with self._lock:
            today = self.clock.today()
            if lmp_date > today:
                raise InvalidField("lmp_date is in the future")
            if (today - lmp_date).days > MAX_PREGNANCY_WEEKS * 7:
                raise InvalidField(f"lmp_date more than {MAX_PREGNANCY_WEEKS} weeks ago")
            if self._facility_row(care_center_id) is None:
                raise InvalidField(f"care center {care_center_id} does not exist")
            cur = self._conn.execute(
                "SELECT 1 FROM patients WHERE phone = ? AND active = 1", (phone,)
            )
            if cur.fetchone():
                raise DuplicatePhone(f"phone {phone} already registered")
            pid = self._next_id("patient")
            now = self.clock.now()
            self._conn.execute(
                "INSERT INTO patients (patient_id, name, phone, husband_phone, lat, lon,"
                " lmp_date, language, care_center_id, registered_at, active)"
                " VALUES (?,?,?,?,?,?,?,?,?,?,1)",
                (pid, name, phone, husband_phone, home.lat, home.lon,
                 lmp_date.isoformat(), language, care_center_id, iso(now)),
            )
            self._conn.commit()
            return self.find_patient(patient_id=pid)

    def find_patient(self, patient_id: Optional[str] = None, phone: Optional[str] = None) -> PatientRecord:
        with self._lock:
            if patient_id is not None:
                cur = self._conn.execute("SELECT * FROM patients WHERE patient_id = ?", (patient_id,))
            elif phone is not None:
                cur = self._conn.execute(
                    "SELECT * FROM patients WHERE phone = ? AND active = 1", (phone,)
                )
            else:
                raise ValueError("need patient_id or phone")
            row = cur.fetchone()
        if row is None:
            raise NotFound(f"patient {patient_id or phone} not found")
        return self._patient(row)

    def active_patients(self) -> list[PatientRecord]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT * FROM patients WHERE active = 1 ORDER BY patient_id"
            ).fetchall()
        return [self._patient(r) for r in rows]

    @staticmethod
    def _patient(row) -> PatientRecord:
        return PatientRecord(
            patient_id=row["patient_id"],
            name=row["name"],
            phone=row["phone"],
            husband_phone=row["husband_phone"],
            home=GeoPoint(row["lat"], row["lon"]),
            lmp_date=dt.date.fromisoformat(row["lmp_date"]),
            language=row["language"],
            care_center_id=row["care_center_id"],
            registered_at=parse_iso(row["registered_at"]),
            active=bool(row["active"]),
        )

    # -- facilities --------------------------------------------------------

    def seed_facilities(self, rows: Iterable[dict]) -> tuple[int, list[str]]:
        """Idempotent upsert keyed by facility_id. Bad rows are reported
        with their position; good rows still land."""
        count = 0
        row_errors: list[str] = []
        with self._lock:
            for i, row in enumerate(rows, start=1):
                try:
                    kind = row["kind"]
                    if kind not in FACILITY_KINDS:
                        raise InvalidField(f"kind must be one of {FACILITY_KINDS}")
                    point = GeoPoint(float(row["lat"]), float(row["lon"]))
                    fid = row["facility_id"]
                    if not fid:
                        raise InvalidField("facility_id required")
                    self._conn.execute(
                        "INSERT INTO facilities (facility_id, kind, name, lat, lon, contact_phone)"
                        " VALUES (?,?,?,?,?,?)"
                        " ON CONFLICT(facility_id) DO UPDATE SET"
                        " kind=excluded.kind, name=excluded.name, lat=excluded.lat,"
                        " lon=excluded.lon, contact_phone=excluded.contact_phone",
                        (fid, kind, row["name"], point.lat, point.lon, row["contact_phone"]),
                    )
                    count += 1
                except Exception as exc:
                    row_errors.append(f"row {i}: {exc}")
            self._conn.commit()
        return count, row_errors

    def _facility_row(self, facility_id: str):
        return self._conn.execute(
            "SELECT * FROM facilities WHERE facility_id = ?", (facility_id,)
        ).fetchone()

    def get_facility(self, facility_id: str) -> Facility:
        with self._lock:
            row = self._facility_row(facility_id)
        if row is None:
            raise NotFound(f"facility {facility_id} not found")
        return self._facility(row)

    def facilities(self, kind: Optional[str] = None) -> list[Facility]:
        with self._lock:
            if kind:
                rows = self._conn.execute(
                    "SELECT * FROM facilities WHERE kind = ? ORDER BY facility_id", (kind,)
                ).fetchall()
            else:
                rows = self._conn.execute("SELECT * FROM facilities ORDER BY facility_id").fetchall()
        return [self._facility(r) for r in rows]

    @staticmethod
    def _facility(row) -> Facility:
        return Facility(
            facility_id=row["facility_id"],
            kind=row["kind"],
            name=row["name"],
            location=GeoPoint(row["lat"], row["lon"]),
            contact_phone=row["contact_phone"],
        )

    # -- doctors -----------------------------------------------------------

    def seed_doctors(self, rows: Iterable[dict]) -> tuple[int, list[str]]:
        count = 0
        row_errors: list[str] = []
        with self._lock:
            for i, row in enumerate(rows, start=1):
                try:
                    hospital = self._facility_row(row["hospital_id"])
                    if hospital is None or hospital["kind"] != "hospital":
                        raise InvalidField(f"hospital_id {row['hospital_id']} is not a hospital")
                    self._conn.execute(
                        "INSERT INTO doctors (doctor_id, username, password_hash, hospital_id, phone)"
                        " VALUES (?,?,?,?,?)"
                        " ON CONFLICT(doctor_id) DO UPDATE SET"
                        " username=excluded.username, password_hash=excluded.password_hash,"
                        " hospital_id=excluded.hospital_id, phone=excluded.phone",
                        (row["doctor_id"], row["username"], hash_password(row["password"]),
                         row["hospital_id"], row["phone"]),
                    )
                    count += 1
                except Exception as exc:
                    row_errors.append(f"row {i}: {exc}")
            self._conn.commit()
        return count, row_errors

    def doctors_for_hospital(self, hospital_id: str) -> list[DoctorAccount]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT * FROM doctors WHERE hospital_id = ? ORDER BY doctor_id", (hospital_id,)
            ).fetchall()
        return [self._doctor(r) for r in rows]

    def get_doctor(self, doctor_id: str) -> DoctorAccount:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM doctors WHERE doctor_id = ?", (doctor_id,)
            ).fetchone()
        if row is None:
            raise NotFound(f"doctor {doctor_id} not found")
        return self._doctor(row)

    def verify_doctor_login(self, username: str, password: str) -> Optional[DoctorAccount]:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM doctors WHERE username = ?", (username,)
            ).fetchone()
        # hash a throwaway password on miss so timing does not leak existence
        if row is None:
            verify_password(password, hash_password("x"))
            return None
        if not verify_password(password, row["password_hash"]):
            return None
        return self._doctor(row)

    @staticmethod
    def _doctor(row) -> DoctorAccount:
        return DoctorAccount(
            doctor_id=row["doctor_id"],
            username=row["username"],
            hospital_id=row["hospital_id"],
            phone=row["phone"],
        )

    # -- units -------------------------------------------------------------

    def seed_units(self, rows: Iterable[dict]) -> tuple[int, list[str]]:
        count = 0
        row_errors: list[str] = []
        with self._lock:
            for i, row in enumerate(rows, start=1):
                try:
                    if row["kind"] not in UNIT_KINDS:
                        raise InvalidField(f"kind must be one of {UNIT_KINDS}")
                    status = row.get("status", "available")
                    if status not in UNIT_STATUSES:
                        raise InvalidField(f"status must be one of {UNIT_STATUSES}")
                    point = GeoPoint(float(row["lat"]), float(row["lon"]))
                    self._conn.execute(
                        "INSERT INTO units (unit_id, kind, lat, lon, status) VALUES (?,?,?,?,?)"
                        " ON CONFLICT(unit_id) DO UPDATE SET"
                        " kind=excluded.kind, lat=excluded.lat, lon=excluded.lon, status=excluded.status",
                        (row["unit_id"], row["kind"], point.lat, point.lon, status),
                    )
                    count += 1
                except Exception as exc:
                    row_errors.append(f"row {i}: {exc}")
            self._conn.commit()
        return count, row_errors

    def get_unit(self, unit_id: str) -> SuccoringUnit:
        with self._lock:
            row = self._conn.execute("SELECT * FROM units WHERE unit_id = ?", (unit_id,)).fetchone()
        if row is None:
            raise NotFound(f"unit {unit_id} not found")
        return self._unit(row)

    def units(self, status: Optional[str] = None) -> list[SuccoringUnit]:
        with self._lock:
            if status:
                rows = self._conn.execute(
                    "SELECT * FROM units WHERE status = ? ORDER BY unit_id", (status,)
                ).fetchall()
            else:
                rows = self._conn.execute("SELECT * FROM units ORDER BY unit_id").fetchall()
        return [self._unit(r) for r in rows]

    def set_unit_status(self, unit_id: str, status: str) -> None:
        if status not in UNIT_STATUSES:
            raise InvalidField(f"status must be one of {UNIT_STATUSES}")
        with self._lock:
            cur = self._conn.execute(
                "UPDATE units SET status = ? WHERE unit_id = ?", (status, unit_id)
            )
            if cur.rowcount == 0:
                raise NotFound(f"unit {unit_id} not found")
            self._conn.commit()

    @staticmethod
    def _unit(row) -> SuccoringUnit:
        return SuccoringUnit(
            unit_id=row["unit_id"],
            kind=row["kind"],
            base=GeoPoint(row["lat"], row["lon"]),
            status=row["status"],
        )

    # -- help requests -----------------------------------------------------

    def insert_request(self, patient_id: str, location: GeoPoint, request_time: dt.datetime,
                       client_ts: str, received_time: dt.datetime, state: str,
                       history: list) -> str:
        with self._lock:
            rid = self._next_id("request")
            self._conn.execute(
                "INSERT INTO help_requests (request_id, patient_id, lat, lon, request_time,"
                " client_ts, received_time, state, hospital_id, unit_id, history)"
                " VALUES (?,?,?,?,?,?,?,?,NULL,NULL,?)",
                (rid, patient_id, location.lat, location.lon, iso(request_time),
                 client_ts, iso(received_time), state, json.dumps(history)),
            )
            self._conn.commit()
            return rid

    def update_request(self, request_id: str, state: str, hospital_id: Optional[str],
                       unit_id: Optional[str], history: list) -> None:
        with self._lock:
            cur = self._conn.execute(
                "UPDATE help_requests SET state = ?, hospital_id = ?, unit_id = ?, history = ?"
                " WHERE request_id = ?",
                (state, hospital_id, unit_id, json.dumps(history), request_id),
            )
            if cur.rowcount == 0:
                raise NotFound(f"request {request_id} not found")
            self._conn.commit()

    def request_row(self, request_id: str) -> dict:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM help_requests WHERE request_id = ?", (request_id,)
            ).fetchone()
        if row is None:
            raise NotFound(f"request {request_id} not found")
        return dict(row)

    def request_rows(self, states: Optional[Sequence[str]] = None,
                     since: Optional[dt.datetime] = None) -> list[dict]:
        query = "SELECT * FROM help_requests"
        clauses, args = [], []
        if states:
            clauses.append(f"state IN ({','.join('?' * len(states))})")
            args.extend(states)
        if since is not None:
            clauses.append("received_time >= ?")
            args.append(iso(since))
        if clauses:
            query += " WHERE " + " AND ".join(clauses)
        query += " ORDER BY received_time DESC, request_id DESC"
        with self._lock:
            rows = self._conn.execute(query, args).fetchall()
        return [dict(r) for r in rows]

    def find_request_by_client_ts(self, patient_id: str, client_ts: str) -> Optional[dict]:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM help_requests WHERE patient_id = ? AND client_ts = ?"
                " ORDER BY received_time DESC LIMIT 1",
                (patient_id, client_ts),
            ).fetchone()
        return dict(row) if row else None

    # -- appointments ------------------------------------------------------

    def create_appointment(self, patient_id: str, facility_id: str,
                           scheduled_for: dt.date, slot: str) -> Appointment:
        with self._lock:
            if self.open_appointment(patient_id) is not None:
                raise InvalidField(f"patient {patient_id} already has an open appointment")
            now = self.clock.now()
            if scheduled_for <= now.date():
                raise InvalidField("scheduled_for must be strictly in the future")
            aid = self._next_id("appointment")
            self._conn.execute(
                "INSERT INTO appointments (appointment_id, patient_id, facility_id,"
                " scheduled_for, slot, state, created_at) VALUES (?,?,?,?,?,'scheduled',?)",
                (aid, patient_id, facility_id, scheduled_for.isoformat(), slot, iso(now)),
            )
            self._conn.commit()
            return self.get_appointment(aid)

    def get_appointment(self, appointment_id: str) -> Appointment:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM appointments WHERE appointment_id = ?", (appointment_id,)
            ).fetchone()
        if row is None:
            raise NotFound(f"appointment {appointment_id} not found")
        return self._appointment(row)

    def open_appointment(self, patient_id: str) -> Optional[Appointment]:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM appointments WHERE patient_id = ?"
                " AND state IN ('scheduled', 'rescheduled') LIMIT 1",
                (patient_id,),
            ).fetchone()
        return self._appointment(row) if row else None

    def update_appointment(self, appointment_id: str, state: str,
                           scheduled_for: Optional[dt.date] = None) -> Appointment:
        with self._lock:
            if scheduled_for is not None:
                self._conn.execute(
                    "UPDATE appointments SET state = ?, scheduled_for = ? WHERE appointment_id = ?",
                    (state, scheduled_for.isoformat(), appointment_id),
                )
            else:
                self._conn.execute(
                    "UPDATE appointments SET state = ? WHERE appointment_id = ?",
                    (state, appointment_id),
                )
            self._conn.commit()
            return self.get_appointment(appointment_id)

    @staticmethod
    def _appointment(row) -> Appointment:
        return Appointment(
            appointment_id=row["appointment_id"],
            patient_id=row["patient_id"],
            facility_id=row["facility_id"],
            scheduled_for=dt.date.fromisoformat(row["scheduled_for"]),
            slot=row["slot"],
            state=row["state"],
            created_at=parse_iso(row["created_at"]),
        )

    # -- advice catalog ----------------------------------------------------

    def seed_advice(self, rows: Iterable[dict]) -> tuple[int, list[str]]:
        count = 0
        row_errors: list[str] = []
        with self._lock:
            for i, row in enumerate(rows, start=1):
                try:
                    tri = int(row["trimester"])
                    wmin, wmax = int(row["week_min"]), int(row["week_max"])
                    if tri not in (1, 2, 3):
                        raise InvalidField("trimester must be 1, 2 or 3")
                    if not 0 <= wmin <= wmax <= MAX_PREGNANCY_WEEKS:
                        raise InvalidField("week band outside [0, 44]")
                    if row["language"] not in LANGUAGES:
                        raise InvalidField(f"language must be one of {LANGUAGES}")
                    # dedupe re-seeds on the band+language key
                    existing = self._conn.execute(
                        "SELECT advice_id FROM advice_catalog WHERE trimester=? AND week_min=?"
                        " AND week_max=? AND language=?",
                        (tri, wmin, wmax, row["language"]),
                    ).fetchone()
                    aid = existing["advice_id"] if existing else self._next_id("advice")
                    self._conn.execute(
                        "INSERT INTO advice_catalog (advice_id, trimester, week_min, week_max,"
                        " language, text) VALUES (?,?,?,?,?,?)"
                        " ON CONFLICT(advice_id) DO UPDATE SET text=excluded.text",
                        (aid, tri, wmin, wmax, row["language"], row["text"]),
                    )
                    count += 1
                except Exception as exc:
                    row_errors.append(f"row {i}: {exc}")
            self._conn.commit()
        return count, row_errors

    def advice_for(self, week: int, language: str) -> Optional[AdviceEntry]:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM advice_catalog WHERE week_min <= ? AND week_max >= ?"
                " AND language = ? ORDER BY advice_id LIMIT 1",
                (week, week, language),
            ).fetchone()
        if row is None:
            return None
        return AdviceEntry(
            advice_id=row["advice_id"],
            trimester=row["trimester"],
            week_min=row["week_min"],
            week_max=row["week_max"],
            language=row["language"],
            text=row["text"],
        )

    # -- notification log (append-only) ------------------------------------

    def append_notification(self, recipient_phone: str, template_id: str,
                            payload: str) -> NotificationRecord:
        with self._lock:
            nid = self._next_id("notification")
            now = self.clock.now()
            self._conn.execute(
                "INSERT INTO notifications (notification_id, recipient_phone, channel,"
                " template_id, payload, status, created_at, sent_at)"
                " VALUES (?,?,'soip',?,?,'queued',?,NULL)",
                (nid, recipient_phone, template_id, payload, iso(now)),
            )
            self._conn.commit()
            return self.get_notification(nid)

    def mark_notification(self, notification_id: str, status: str) -> None:
        if status not in ("sent", "failed"):
            raise InvalidField("status must be sent or failed")
        with self._lock:
            sent_at = iso(self.clock.now()) if status == "sent" else None
            cur = self._conn.execute(
                "UPDATE notifications SET status = ?, sent_at = ? WHERE notification_id = ?",
                (status, sent_at, notification_id),
            )
            if cur.rowcount == 0:
                raise NotFound(f"notification {notification_id} not found")
            self._conn.commit()

    def get_notification(self, notification_id: str) -> NotificationRecord:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM notifications WHERE notification_id = ?", (notification_id,)
            ).fetchone()
        if row is None:
            raise NotFound(f"notification {notification_id} not found")
        return self._notification(row)

    def notifications(self, status: Optional[str] = None) -> list[NotificationRecord]:
        with self._lock:
            if status:
                rows = self._conn.execute(
                    "SELECT * FROM notifications WHERE status = ? ORDER BY notification_id",
                    (status,),
                ).fetchall()
            else:
                rows = self._conn.execute(
                    "SELECT * FROM notifications ORDER BY notification_id"
                ).fetchall()
        return [self._notification(r) for r in rows]

    @staticmethod
    def _notification(row) -> NotificationRecord:
        return NotificationRecord(
            notification_id=row["notification_id"],
            recipient_phone=row["recipient_phone"],
            channel=row["channel"],
            template_id=row["template_id"],
            payload=row["payload"],
            status=row["status"],
            created_at=parse_iso(row["created_at"]),
            sent_at=parse_iso(row["sent_at"]) if row["sent_at"] else None,
        )

    # -- patient files -----------------------------------------------------

    def add_patient_file(self, patient_id: str, doctor_id: str, request_id: str,
                         notes: str) -> PatientFile:
        with self._lock:
            doctor = self.get_doctor(doctor_id)
            request = self.request_row(request_id)
            if request["hospital_id"] != doctor.hospital_id:
                raise InvalidField(
                    f"doctor {doctor_id} does not belong to hospital {request['hospital_id']}"
                )
            if request["patient_id"] != patient_id:
                raise InvalidField(f"request {request_id} is not for patient {patient_id}")
            fid = self._next_id("file")
            now = self.clock.now()
            self._conn.execute(
                "INSERT INTO patient_files (file_id, patient_id, doctor_id, request_id,"
                " notes, created_at) VALUES (?,?,?,?,?,?)",
                (fid, patient_id, doctor_id, request_id, notes, iso(now)),
            )
            self._conn.commit()
            return PatientFile(fid, patient_id, doctor_id, request_id, notes, now)

    # -- operator / admin accounts -----------------------------------------

    def create_account(self, username: str, password: str, role: str,
                       doctor_id: Optional[str] = None) -> Account:
        if role not in ("emc_operator", "admin"):
            raise InvalidField("role must be emc_operator or admin")
        with self._lock:
            cur = self._conn.execute(
                "SELECT 1 FROM admin_accounts WHERE username = ?", (username,)
            )
            if cur.fetchone():
                raise InvalidField(f"username {username} taken")
            aid = self._next_id("account")
            self._conn.execute(
                "INSERT INTO admin_accounts (account_id, username, password_hash, role, doctor_id)"
                " VALUES (?,?,?,?,?)",
                (aid, username, hash_password(password), role, doctor_id),
            )
            self._conn.commit()
            return Account(aid, username, role, doctor_id)

    def verify_account_login(self, username: str, password: str) -> Optional[Account]:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM admin_accounts WHERE username = ?", (username,)
            ).fetchone()
        if row is None:
            verify_password(password, hash_password("x"))
            return None
        if not verify_password(password, row["password_hash"]):
            return None
        return Account(row["account_id"], row["username"], row["role"], row["doctor_id"])

    # -- dump / restore ----------------------------------------------------

    _DUMP_TABLES = (
        "patients", "facilities", "doctors", "units", "help_requests",
        "appointments", "advice_catalog", "notifications", "patient_files",
        "admin_accounts", "id_counters",
    )

    def dump(self, path) -> int:
        """Newline-delimited records, stable table and key order.
        dump -> restore -> dump is byte-identical."""
        lines = []
        with self._lock:
            for table in self._DUMP_TABLES:
                cur = self._conn.execute(f"SELECT * FROM {table} ORDER BY 1")
                cols = [d[0] for d in cur.description]
                for row in cur.fetchall():
                    record = {"table": table}
                    record.update({c: row[c] for c in cols})
                    lines.append(json.dumps(record, ensure_ascii=False, sort_keys=False))
        Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
        return len(lines)

    def restore(self, path) -> int:
        count = 0
        with self._lock:
            for table in self._DUMP_TABLES:
                self._conn.execute(f"DELETE FROM {table}")
            for line in Path(path).read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                record = json.loads(line)
                table = record.pop("table")
                if table not in self._DUMP_TABLES:
                    raise InvalidField(f"unknown table {table!r} in dump")
                cols = ",".join(record)
                marks = ",".join("?" * len(record))
                self._conn.execute(
                    f"INSERT INTO {table} ({cols}) VALUES ({marks})", list(record.values())
                )
                count += 1
            self._conn.commit()
        return count
