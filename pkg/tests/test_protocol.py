import datetime as dt

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pregcare.errors import (
    FieldCountMismatch,
    InvalidField,
    MalformedCoordinate,
    MissingTemplate,
    OutOfRange,
    OversizedPayload,
    PregcareError,
    UnboundPlaceholder,
    UnknownKind,
)
from pregcare.geo import GeoPoint
from pregcare.protocol import (
    ChgPayload,
    HelpPayload,
    RegPayload,
    TemplateCatalog,
    build_help,
    parse_inbound,
    serialize_inbound,
)

NOW = dt.datetime(2014, 1, 25, 5, 19, 55)


class TestParse:
    def test_help_example(self):
        msg = parse_inbound("HELP|P000017|36.2062125|44.0307111|2014-01-25T05:19:55Z", "+1", NOW)
        assert msg.kind == "HELP"
        assert msg.payload == HelpPayload(
            patient_id="P000017",
            location=GeoPoint(36.2062125, 44.0307111),
            client_ts="2014-01-25T05:19:55Z",
        )
        assert msg.received_at == NOW

    def test_reg_example(self):
        msg = parse_inbound(
            "REG|Rawshan|+9647501234567|36.2062125|44.0307111|2013-10-01|ku", "+1", NOW
        )
        assert msg.payload == RegPayload(
            name="Rawshan",
            phone="+9647501234567",
            home=GeoPoint(36.2062125, 44.0307111),
            lmp_date=dt.date(2013, 10, 1),
            language="ku",
        )

    def test_chg_example(self):
        msg = parse_inbound("CHG|P000017|2014-02-10", "+1", NOW)
        assert msg.payload == ChgPayload(patient_id="P000017", preferred_date=dt.date(2014, 2, 10))

    def test_unknown_kind(self):
        with pytest.raises(UnknownKind):
            parse_inbound("PING|x", "+1", NOW)

    def test_field_count_mismatch(self):
        with pytest.raises(FieldCountMismatch):
            parse_inbound("HELP|P000017|36.2", "+1", NOW)

    def test_coordinate_errors_propagate(self):
        with pytest.raises(OutOfRange):
            parse_inbound("HELP|P1|95.0|44.0|2014-01-25T05:19:55Z", "+1", NOW)
        with pytest.raises(MalformedCoordinate):
            parse_inbound("HELP|P1|abc|44.0|2014-01-25T05:19:55Z", "+1", NOW)

    def test_oversized_payload(self):
        raw = "HELP|" + "x" * 200
        with pytest.raises(OversizedPayload):
            parse_inbound(raw, "+1", NOW)

    def test_bad_language(self):
        with pytest.raises(InvalidField):
            parse_inbound("REG|A|+1|36.0|44.0|2013-10-01|fr", "+1", NOW)

    def test_bad_date(self):
        with pytest.raises(InvalidField):
            parse_inbound("CHG|P1|tomorrow", "+1", NOW)


names = st.text(
    alphabet=st.characters(blacklist_characters="|\t\n\r", blacklist_categories=("Cs", "Cc")),
    min_size=1,
    max_size=12,
).filter(lambda s: s.strip() == s and s)
lat_text = st.decimals(min_value=-90, max_value=90, places=6).map(str)
lon_text = st.decimals(min_value=-179, max_value=180, places=6).map(str)
dates = st.dates(min_value=dt.date(2013, 1, 1), max_value=dt.date(2015, 1, 1)).map(str)


class TestRoundTrip:
    @given(names, lat_text, lon_text, dates, st.sampled_from(["en", "ku", "ar"]))
    @settings(max_examples=200, deadline=None)
    def test_reg_round_trip(self, name, lat, lon, lmp, lang):
        raw = f"REG|{name}|+964750|{lat}|{lon}|{lmp}|{lang}"
        if len(raw.encode()) > 160:
            return
        msg = parse_inbound(raw, "+1", NOW)
        again = parse_inbound(serialize_inbound(msg), "+1", NOW)
        assert again.payload == msg.payload

    @given(lat_text, lon_text)
    @settings(max_examples=100, deadline=None)
    def test_help_round_trip(self, lat, lon):
        raw = build_help("P000017", lat, lon, "2014-01-25T05:19:55Z")
        msg = parse_inbound(raw, "+1", NOW)
        assert parse_inbound(serialize_inbound(msg), "+1", NOW).payload == msg.payload

    def test_chg_round_trip(self):
        msg = parse_inbound("CHG|P000017|2014-02-10", "+1", NOW)
        assert parse_inbound(serialize_inbound(msg), "+1", NOW).payload == msg.payload

    def test_multibyte_name_preserved(self):
        raw = "REG|ڕاوشان|+964750|36.2|44.0|2013-10-01|ku"
        msg = parse_inbound(raw, "+1", NOW)
        assert serialize_inbound(msg) == raw

    def test_serializer_refuses_oversize(self):
        msg = parse_inbound("REG|short|+964750|36.2|44.0|2013-10-01|ku", "+1", NOW)
        big = msg.__class__(
            kind=msg.kind,
            sender_phone=msg.sender_phone,
            fields=("x" * 200,) + msg.fields[1:],
            received_at=msg.received_at,
            payload=msg.payload,
        )
        with pytest.raises(OversizedPayload):
            serialize_inbound(big)

    @given(st.text(max_size=170))
    @settings(max_examples=300, deadline=None)
    def test_rejection_totality(self, raw):
        """Arbitrary input either parses or raises a typed error."""
        try:
            parse_inbound(raw, "+1", NOW)
        except PregcareError:
            pass


class TestTemplates:
    def test_default_catalog_covers_all_ids_and_languages(self):
        cat = TemplateCatalog.default()
        from pregcare.protocol import DEFAULT_TEMPLATE_IDS, LANGUAGES

        for tid in DEFAULT_TEMPLATE_IDS:
            for lang in LANGUAGES:
                assert cat._templates[(tid, lang)]

    def test_substitution(self):
        cat = TemplateCatalog.default()
        out = cat.render("first_review", "en", {"center": "X", "date": "2014-02-03"})
        assert "X" in out and "2014-02-03" in out

    def test_language_changes_template_not_bindings(self):
        cat = TemplateCatalog.default()
        en = cat.render("first_review", "en", {"center": "X", "date": "2014-02-03"})
        ku = cat.render("first_review", "ku", {"center": "X", "date": "2014-02-03"})
        assert en != ku
        assert "X" in ku and "2014-02-03" in ku

    def test_unbound_placeholder(self):
        cat = TemplateCatalog.default()
        with pytest.raises(UnboundPlaceholder):
            cat.render("help_ack", "en", {})

    def test_missing_template(self):
        cat = TemplateCatalog.default()
        with pytest.raises(MissingTemplate):
            cat.render("no_such_template", "en", {})

    def test_deterministic(self):
        cat = TemplateCatalog.default()
        a = cat.render("weekly_advice", "ar", {"week": 12, "advice": "rest"})
        b = cat.render("weekly_advice", "ar", {"week": 12, "advice": "rest"})
        assert a == b
