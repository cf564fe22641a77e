"""Registration-side services: nearest care-center assignment, first
review and rescheduling, and trimester-keyed weekly advising.

Trimester bands are frozen at weeks 0-12 / 13-27 / 28-44. The first
review lands on the next business day at least two days out, 09:00 slot.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from typing import Optional

from . import geo
from .errors import (
    FutureLMP,
    NoOpenAppointment,
    NotFound,
    OutOfPregnancyRange,
    PastDate,
    UnknownPatient,
)
from .protocol import ChgPayload, InboundMessage, OutboundNotification, RegPayload, TemplateCatalog
from .registry import MAX_PREGNANCY_WEEKS, Appointment, PatientRecord, Registry

FIRST_REVIEW_SLOT = "09:00"
FIRST_REVIEW_MIN_DAYS = 2


def gestation_week(lmp_date: dt.date, today: dt.date) -> int:
    """Standard obstetric convention: floor(days since LMP / 7)."""
    if lmp_date > today:
        raise FutureLMP(f"lmp {lmp_date} is after {today}")
    return (today - lmp_date).days // 7


def trimester_of(week: int) -> int:
    if week < 0 or week > MAX_PREGNANCY_WEEKS:
        raise OutOfPregnancyRange(f"week {week} outside [0, {MAX_PREGNANCY_WEEKS}]")
    if week <= 12:
        return 1
    if week <= 27:
        return 2
    return 3


def first_review_date(today: dt.date) -> dt.date:
    """Next business day at least FIRST_REVIEW_MIN_DAYS out."""
    day = today + dt.timedelta(days=FIRST_REVIEW_MIN_DAYS)
    while day.weekday() >= 5:
        day += dt.timedelta(days=1)
    return day


@dataclass
class AdviceBatchReport:
    notifications: list = field(default_factory=list)
    missing_advice: list = field(default_factory=list)  # (patient_id, week, language)
    past_term: list = field(default_factory=list)  # patient_ids flagged for deactivation review


class CareService:
    def __init__(self, registry: Registry, templates: TemplateCatalog, clock, on_queued=None):
        self.registry = registry
        self.templates = templates
        self.clock = clock
        self.on_queued = on_queued

    def register(self, msg: InboundMessage) -> tuple[PatientRecord, Appointment, list]:
        payload = msg.payload
        assert isinstance(payload, RegPayload)
        centers = [
            (f.facility_id, f.location) for f in self.registry.facilities("care_center")
        ]
        center_id, _ = geo.nearest_facility(payload.home, centers)
        patient = self.registry.create_patient(
            name=payload.name,
            phone=payload.phone,
            # the wire format carries no separate contact number; the
            # transport sender doubles as the emergency contact
            husband_phone=msg.sender_phone if msg.sender_phone and msg.sender_phone != payload.phone
            else payload.phone,
            home=payload.home,
            lmp_date=payload.lmp_date,
            language=payload.language,
            care_center_id=center_id,
        )
        today = msg.received_at.date()
        appointment = self.registry.create_appointment(
            patient.patient_id, center_id, first_review_date(today), FIRST_REVIEW_SLOT
        )
        center = self.registry.get_facility(center_id)
        notifications = [
            self._queue(patient.phone, "registration_ack", patient.language,
                        {"name": patient.name, "center": center.name}),
            self._queue(patient.phone, "first_review", patient.language,
                        {"center": center.name, "date": appointment.scheduled_for.isoformat()}),
        ]
        return patient, appointment, notifications

    def reschedule(self, msg: InboundMessage) -> Appointment:
        payload = msg.payload
        assert isinstance(payload, ChgPayload)
        try:
            patient = self.registry.find_patient(patient_id=payload.patient_id)
        except NotFound:
            raise UnknownPatient(f"CHG from unknown id {payload.patient_id}") from None
        if payload.preferred_date <= msg.received_at.date():
            raise PastDate(f"{payload.preferred_date} is not in the future")
        appointment = self.registry.open_appointment(patient.patient_id)
        if appointment is None:
            raise NoOpenAppointment(f"patient {patient.patient_id} has no open appointment")
        updated = self.registry.update_appointment(
            appointment.appointment_id, "rescheduled", payload.preferred_date
        )
        self._queue(patient.phone, "review_changed", patient.language,
                    {"date": payload.preferred_date.isoformat()})
        return updated

    def weekly_advice_batch(self, today: Optional[dt.date] = None) -> AdviceBatchReport:
        """One advice message per active patient from the band holding her
        gestation week; gaps are reported, never fatal."""
        today = today or self.clock.today()
        report = AdviceBatchReport()
        for patient in self.registry.active_patients():
            week = gestation_week(patient.lmp_date, today)
            if week > MAX_PREGNANCY_WEEKS:
                report.past_term.append(patient.patient_id)
                continue
            entry = self.registry.advice_for(week, patient.language)
            if entry is None:
                report.missing_advice.append((patient.patient_id, week, patient.language))
                continue
            report.notifications.append(
                self._queue(patient.phone, "weekly_advice", patient.language,
                            {"week": week, "advice": entry.text})
            )
        return report

    def _queue(self, recipient: str, template_id: str, language: str,
               bindings: dict) -> OutboundNotification:
        n = self.templates.notification(recipient, template_id, language, bindings)
        record = self.registry.append_notification(recipient, template_id, n.rendered)
        if self.on_queued is not None:
            self.on_queued(record.notification_id)
        return n
