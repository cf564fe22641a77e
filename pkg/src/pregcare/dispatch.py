"""Emergency path: HELP ingest, nearest-hospital routing, the request
state machine, and notification fan-out.

received -> located happens synchronously inside ingest (no human in the
loop before the hospital is alerted); dispatched and complete are operator
actions. Per-request transitions serialize on a request-level lock; unit
status changes ride the same critical section so the unit-conservation
invariant holds at every instant.
"""

from __future__ import annotations

import datetime as dt
import threading
from dataclasses import dataclass
from typing import Optional, Sequence

from . import geo
from .clock import iso, parse_iso
from .errors import (
    EmptyCandidateSet,
    IllegalTransition,
    NotFound,
    UnitUnavailable,
    UnknownPatient,
)
from .protocol import HelpPayload, InboundMessage, OutboundNotification, TemplateCatalog
from .registry import Registry

DEFAULT_DEDUP_WINDOW_S = 120.0

STATES = ("received", "located", "dispatched", "complete", "cancelled")
_TRANSITIONS = {
    "received": {"located", "cancelled"},
    "located": {"dispatched", "cancelled"},
    "dispatched": {"complete", "cancelled"},
    "complete": set(),
    "cancelled": set(),
}
TERMINAL_STATES = ("complete", "cancelled")


@dataclass(frozen=True)
class HelpRequest:
    request_id: str
    patient_id: str
    location: geo.GeoPoint
    request_time: dt.datetime
    client_ts: str
    received_time: dt.datetime
    state: str
    hospital_id: Optional[str]
    unit_id: Optional[str]
    state_history: tuple


@dataclass(frozen=True)
class RequestView:
    """The control-panel row: patient name, both timestamps, coordinates,
    hospital name, state, plus ids for actions."""

    request_id: str
    patient_id: str
    patient_name: str
    request_time: str
    received_time: str
    lat: float
    lon: float
    hospital_name: Optional[str]
    state: str
    unit_id: Optional[str]


class Dispatcher:
    def __init__(self, registry: Registry, templates: TemplateCatalog, clock,
                 dedup_window_s: float = DEFAULT_DEDUP_WINDOW_S, on_queued=None):
        self.registry = registry
        self.templates = templates
        self.clock = clock
        self.dedup_window_s = dedup_window_s
        self.on_queued = on_queued  # callback(notification_id) to wake delivery
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()
        self._ingest_lock = threading.Lock()

    def _request_lock(self, request_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(request_id, threading.Lock())

    # -- ingest ------------------------------------------------------------

    def ingest_help(self, msg: InboundMessage) -> HelpRequest:
        payload = msg.payload
        assert isinstance(payload, HelpPayload)
        try:
            patient = self.registry.find_patient(patient_id=payload.patient_id)
        except NotFound:
            self._queue(msg.sender_phone, "register_prompt", "en", {})
            raise UnknownPatient(f"HELP from unregistered id {payload.patient_id}") from None

        now = msg.received_at
        with self._ingest_lock:
            existing = self.registry.find_request_by_client_ts(
                payload.patient_id, payload.client_ts
            )
            if existing is not None:
                age = (now - parse_iso(existing["received_time"])).total_seconds()
                if 0 <= age <= self.dedup_window_s:
                    return self._from_row(existing)

            request_time = parse_iso(payload.client_ts)
            history = [self._event("received", now, "server")]
            if request_time > now:
                # server clock is authoritative; keep the raw claim for audit
                history[0]["raw_request_time"] = payload.client_ts
                request_time = now
            rid = self.registry.insert_request(
                patient_id=payload.patient_id,
                location=payload.location,
                request_time=request_time,
                client_ts=payload.client_ts,
                received_time=now,
                state="received",
                history=history,
            )

        hospitals = [
            (f.facility_id, f.location) for f in self.registry.facilities("hospital")
        ]
        try:
            hospital_id, _ = geo.nearest_facility(payload.location, hospitals)
        except EmptyCandidateSet:
            # request parks in `received`; surface as an operational alert
            raise EmptyCandidateSet(
                f"no hospitals seeded; request {rid} parked in received"
            ) from None

        history.append(self._event("located", self.clock.now(), "server"))
        self.registry.update_request(rid, "located", hospital_id, None, history)
        request = self.get_request(rid)
        self.fan_out(request, patient)
        return self.get_request(rid)

    # -- fan-out -----------------------------------------------------------

    def fan_out(self, request: HelpRequest, patient=None) -> list[OutboundNotification]:
        """One notification per target: hospital contact, each doctor of
        that hospital, the husband, and the patient herself."""
        if request.state != "located":
            raise IllegalTransition(f"fan-out requires state located, got {request.state}")
        if patient is None:
            patient = self.registry.find_patient(patient_id=request.patient_id)
        hospital = self.registry.get_facility(request.hospital_id)
        coords = {
            "name": patient.name,
            "phone": patient.phone,
            "lat": f"{request.location.lat}",
            "lon": f"{request.location.lon}",
            "hospital": hospital.name,
        }
        sent = [
            self._queue(hospital.contact_phone, "notify_hospital", "en", coords)
        ]
        for doctor in self.registry.doctors_for_hospital(hospital.facility_id):
            sent.append(self._queue(doctor.phone, "notify_doctor", "en", coords))
        sent.append(self._queue(patient.husband_phone, "notify_husband",
                                patient.language, coords))
        sent.append(self._queue(patient.phone, "help_ack", patient.language,
                                {"hospital": hospital.name}))
        return sent

    def _queue(self, recipient: str, template_id: str, language: str,
               bindings: dict) -> OutboundNotification:
        n = self.templates.notification(recipient, template_id, language, bindings)
        record = self.registry.append_notification(recipient, template_id, n.rendered)
        if self.on_queued is not None:
            self.on_queued(record.notification_id)
        return n

    # -- operator transitions ---------------------------------------------

    def assign_unit(self, request_id: str, unit_id: str, actor: str) -> HelpRequest:
        with self._request_lock(request_id):
            request = self.get_request(request_id)
            self._check_transition(request.state, "dispatched")
            unit = self.registry.get_unit(unit_id)
            if unit.status != "available":
                raise UnitUnavailable(f"unit {unit_id} is {unit.status}")
            history = list(self._history_raw(request))
            history.append(self._event("dispatched", self.clock.now(), actor, unit_id=unit_id))
            self.registry.set_unit_status(unit_id, "dispatched")
            self.registry.update_request(request_id, "dispatched", request.hospital_id,
                                         unit_id, history)
            return self.get_request(request_id)

    def complete_request(self, request_id: str, actor: str) -> HelpRequest:
        with self._request_lock(request_id):
            request = self.get_request(request_id)
            self._check_transition(request.state, "complete")
            history = list(self._history_raw(request))
            history.append(self._event("complete", self.clock.now(), actor))
            self.registry.update_request(request_id, "complete", request.hospital_id,
                                         request.unit_id, history)
            if request.unit_id:
                self.registry.set_unit_status(request.unit_id, "available")
            return self.get_request(request_id)

    def cancel_request(self, request_id: str, actor: str) -> HelpRequest:
        with self._request_lock(request_id):
            request = self.get_request(request_id)
            self._check_transition(request.state, "cancelled")
            history = list(self._history_raw(request))
            history.append(self._event("cancelled", self.clock.now(), actor))
            self.registry.update_request(request_id, "cancelled", request.hospital_id,
                                         request.unit_id, history)
            if request.unit_id:
                self.registry.set_unit_status(request.unit_id, "available")
            return self.get_request(request_id)

    @staticmethod
    def _check_transition(current: str, target: str) -> None:
        if target not in _TRANSITIONS[current]:
            raise IllegalTransition(f"cannot go {current} -> {target}")

    # -- reads -------------------------------------------------------------

    def get_request(self, request_id: str) -> HelpRequest:
        return self._from_row(self.registry.request_row(request_id))

    def list_requests(self, states: Optional[Sequence[str]] = None,
                      since: Optional[dt.datetime] = None) -> list[RequestView]:
        views = []
        for row in self.registry.request_rows(states, since):
            try:
                name = self.registry.find_patient(patient_id=row["patient_id"]).name
            except NotFound:
                name = "?"
            hospital_name = None
            if row["hospital_id"]:
                hospital_name = self.registry.get_facility(row["hospital_id"]).name
            views.append(RequestView(
                request_id=row["request_id"],
                patient_id=row["patient_id"],
                patient_name=name,
                request_time=row["request_time"],
                received_time=row["received_time"],
                lat=row["lat"],
                lon=row["lon"],
                hospital_name=hospital_name,
                state=row["state"],
                unit_id=row["unit_id"],
            ))
        return views

    # -- helpers -----------------------------------------------------------

    @staticmethod
    def _event(state: str, when: dt.datetime, actor: str, **extra) -> dict:
        event = {"state": state, "timestamp": iso(when), "actor": actor}
        event.update(extra)
        return event

    def _history_raw(self, request: HelpRequest) -> list:
        return [dict(e) for e in request.state_history]

    @staticmethod
    def _from_row(row: dict) -> HelpRequest:
        import json

        return HelpRequest(
            request_id=row["request_id"],
            patient_id=row["patient_id"],
            location=geo.GeoPoint(row["lat"], row["lon"]),
            request_time=parse_iso(row["request_time"]),
            client_ts=row["client_ts"],
            received_time=parse_iso(row["received_time"]),
            state=row["state"],
            hospital_id=row["hospital_id"],
            unit_id=row["unit_id"],
            state_history=tuple(json.loads(row["history"])),
        )
