import datetime as dt

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pregcare.care import CareService, first_review_date, gestation_week, trimester_of
from pregcare.clock import iso
from pregcare.errors import (
    DuplicatePhone,
    FutureLMP,
    NoOpenAppointment,
    OutOfPregnancyRange,
    PastDate,
    UnknownPatient,
)
from pregcare.geo import haversine_distance
from pregcare.protocol import TemplateCatalog, parse_inbound


@pytest.fixture
def care(seeded, clock):
    return CareService(seeded, TemplateCatalog.default(), clock)


def reg_msg(clock, phone="+9647501234567", lat="36.2062125", lon="44.0307111",
            lang="ku", name="Rawshan", lmp="2013-10-01", sender="+9647509999999"):
    raw = f"REG|{name}|{phone}|{lat}|{lon}|{lmp}|{lang}"
    return parse_inbound(raw, sender, clock.now())


def seed_advice_full(registry):
    rows = []
    for lang in ("en", "ku", "ar"):
        rows += [
            {"trimester": 1, "week_min": 0, "week_max": 12, "language": lang,
             "text": f"[placeholder {lang}] early pregnancy guidance"},
            {"trimester": 2, "week_min": 13, "week_max": 27, "language": lang,
             "text": f"[placeholder {lang}] mid pregnancy guidance"},
            {"trimester": 3, "week_min": 28, "week_max": 44, "language": lang,
             "text": f"[placeholder {lang}] late pregnancy guidance"},
        ]
    count, errs = registry.seed_advice(rows)
    assert errs == []
    return count


class TestGestationMath:
    def test_week_zero(self):
        d = dt.date(2014, 1, 1)
        assert gestation_week(d, d) == 0

    def test_two_weeks(self):
        assert gestation_week(dt.date(2014, 1, 1), dt.date(2014, 1, 15)) == 2

    def test_future_lmp(self):
        with pytest.raises(FutureLMP):
            gestation_week(dt.date(2014, 2, 1), dt.date(2014, 1, 1))

    @pytest.mark.parametrize("week,expected", [(0, 1), (12, 1), (13, 2), (27, 2), (28, 3), (44, 3)])
    def test_trimester_boundaries(self, week, expected):
        assert trimester_of(week) == expected

    def test_out_of_range(self):
        with pytest.raises(OutOfPregnancyRange):
            trimester_of(45)
        with pytest.raises(OutOfPregnancyRange):
            trimester_of(-1)

    @given(st.integers(min_value=0, max_value=44))
    def test_total_and_monotone(self, week):
        assert trimester_of(week) in (1, 2, 3)
        if week > 0:
            assert trimester_of(week) >= trimester_of(week - 1)

    def test_hits_all_three(self):
        assert {trimester_of(w) for w in range(45)} == {1, 2, 3}


class TestFirstReviewDate:
    def test_at_least_two_days_out_business_day(self):
        # Sat 2014-01-25 + 2 = Mon
        assert first_review_date(dt.date(2014, 1, 25)) == dt.date(2014, 1, 27)
        # Thu + 2 = Sat -> Mon
        assert first_review_date(dt.date(2014, 1, 23)) == dt.date(2014, 1, 27)
        # Mon + 2 = Wed
        assert first_review_date(dt.date(2014, 1, 20)) == dt.date(2014, 1, 22)


class TestRegister:
    def test_assigns_nearest_center_and_books_review(self, care, seeded, clock):
        patient, appointment, notes = care.register(reg_msg(clock))
        centers = seeded.facilities("care_center")
        best = min(
            (haversine_distance(patient.home, c.location), c.facility_id) for c in centers
        )
        assert patient.care_center_id == best[1] == "FC01"
        assert appointment.state == "scheduled"
        assert (appointment.scheduled_for - clock.today()).days >= 2
        assert [n.template_id for n in notes] == ["registration_ack", "first_review"]
        assert all(n.language == "ku" for n in notes)
        assert seeded.open_appointment(patient.patient_id) is not None

    def test_husband_contact_is_sender_phone(self, care, clock):
        patient, _, _ = care.register(reg_msg(clock))
        assert patient.husband_phone == "+9647509999999"

    def test_duplicate_phone(self, care, clock):
        care.register(reg_msg(clock))
        with pytest.raises(DuplicatePhone):
            care.register(reg_msg(clock))

    def test_single_center_wins_regardless(self, registry, clock):
        registry.seed_facilities([
            {"facility_id": "FC09", "kind": "care_center", "name": "Far",
             "lat": 30.0, "lon": 40.0, "contact_phone": "+1"},
        ])
        care = CareService(registry, TemplateCatalog.default(), clock)
        patient, _, _ = care.register(reg_msg(clock))
        assert patient.care_center_id == "FC09"


class TestReschedule:
    def test_reschedule_happy_path(self, care, seeded, clock):
        patient, _, _ = care.register(reg_msg(clock))
        msg = parse_inbound(f"CHG|{patient.patient_id}|2014-02-10", patient.phone, clock.now())
        appt = care.reschedule(msg)
        assert appt.state == "rescheduled"
        assert appt.scheduled_for == dt.date(2014, 2, 10)
        notes = seeded.notifications()
        assert notes[-1].template_id == "review_changed"

    def test_past_date(self, care, clock):
        patient, _, _ = care.register(reg_msg(clock))
        msg = parse_inbound(f"CHG|{patient.patient_id}|2014-01-20", patient.phone, clock.now())
        with pytest.raises(PastDate):
            care.reschedule(msg)

    def test_no_open_appointment(self, care, seeded, clock):
        patient, appt, _ = care.register(reg_msg(clock))
        seeded.update_appointment(appt.appointment_id, "attended")
        msg = parse_inbound(f"CHG|{patient.patient_id}|2014-02-10", patient.phone, clock.now())
        with pytest.raises(NoOpenAppointment):
            care.reschedule(msg)

    def test_unknown_patient(self, care, clock):
        msg = parse_inbound("CHG|P000404|2014-02-10", "+1", clock.now())
        with pytest.raises(UnknownPatient):
            care.reschedule(msg)

    def test_one_open_appointment_after_many_reschedules(self, care, seeded, clock):
        patient, _, _ = care.register(reg_msg(clock))
        for day in (10, 12, 15):
            msg = parse_inbound(
                f"CHG|{patient.patient_id}|2014-02-{day}", patient.phone, clock.now()
            )
            care.reschedule(msg)
        open_count = sum(
            1 for a in [seeded.open_appointment(patient.patient_id)] if a is not None
        )
        assert open_count == 1


class TestWeeklyAdvice:
    def test_band_membership(self, care, seeded, clock):
        seed_advice_full(seeded)
        care.register(reg_msg(clock, lmp="2013-12-25", phone="+100", lang="en"))  # ~week 4
        care.register(reg_msg(clock, lmp="2013-06-29", phone="+101", lang="ar",
                              name="Amira", sender="+201"))  # ~week 30
        report = care.weekly_advice_batch()
        assert len(report.notifications) == 2
        texts = {n.recipient_phone: n.rendered for n in report.notifications}
        assert "early" in texts["+100"]
        assert "late" in texts["+101"]

    def test_language_fidelity(self, care, seeded, clock):
        seed_advice_full(seeded)
        care.register(reg_msg(clock, lang="ar"))
        report = care.weekly_advice_batch()
        assert report.notifications[0].language == "ar"

    def test_empty_cohort(self, care):
        report = care.weekly_advice_batch()
        assert report.notifications == []

    def test_missing_band_reported_not_fatal(self, care, seeded, clock):
        seeded.seed_advice([
            {"trimester": 1, "week_min": 0, "week_max": 12, "language": "ku",
             "text": "[placeholder ku] early"},
        ])
        patient, _, _ = care.register(reg_msg(clock, lmp="2013-06-29"))  # week 30, no band
        report = care.weekly_advice_batch()
        assert report.notifications == []
        assert report.missing_advice == [(patient.patient_id, 30, "ku")]
