"""Wire formats for SMS-style traffic.

Inbound payloads are pipe-delimited, first token the kind:

    REG|<name>|<phone>|<lat>|<lon>|<lmp YYYY-MM-DD>|<lang>
    HELP|<patient_id>|<lat>|<lon>|<client_ts ISO-8601>
    CHG|<patient_id>|<preferred_date YYYY-MM-DD>

No escaping: names containing '|' are rejected at registration. The whole
payload must fit in 160 UTF-8 bytes (classic SMS discipline; multibyte
scripts burn the budget faster). Outbound messages come from a per-language
template catalog and render deterministically.
"""

from __future__ import annotations

import datetime as dt
import string
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Union

from .clock import parse_iso
from .errors import (
    FieldCountMismatch,
    InvalidField,
    MissingTemplate,
    OversizedPayload,
    UnboundPlaceholder,
    UnknownKind,
)
from .geo import GeoPoint, validate_point

MAX_PAYLOAD_BYTES = 160
LANGUAGES = ("en", "ku", "ar")

DEFAULT_TEMPLATE_IDS = (
    "registration_ack", "first_review", "review_changed", "weekly_advice",
    "help_ack", "notify_husband", "notify_hospital", "notify_doctor",
    "register_prompt",
)


@dataclass(frozen=True)
class RegPayload:
    name: str
    phone: str
    home: GeoPoint
    lmp_date: dt.date
    language: str


@dataclass(frozen=True)
class HelpPayload:
    patient_id: str
    location: GeoPoint
    client_ts: str  # ISO-8601 as sent; server never trusts it for ordering


@dataclass(frozen=True)
class ChgPayload:
    patient_id: str
    preferred_date: dt.date


Payload = Union[RegPayload, HelpPayload, ChgPayload]


@dataclass(frozen=True)
class InboundMessage:
    kind: str
    sender_phone: str
    fields: tuple
    received_at: dt.datetime
    payload: Payload


@dataclass(frozen=True)
class OutboundNotification:
    recipient_phone: str
    template_id: str
    language: str
    rendered: str


_FIELD_COUNTS = {"REG": 7, "HELP": 5, "CHG": 3}


def _check_size(raw: str) -> None:
    size = len(raw.encode("utf-8"))
    if size > MAX_PAYLOAD_BYTES:
        raise OversizedPayload(f"payload is {size} bytes; limit {MAX_PAYLOAD_BYTES}")


def _parse_date(token: str, label: str) -> dt.date:
    try:
        return dt.date.fromisoformat(token)
    except ValueError:
        raise InvalidField(f"{label} is not a YYYY-MM-DD date: {token!r}") from None


def parse_inbound(raw: str, sender_phone: str, now: dt.datetime) -> InboundMessage:
    _check_size(raw)
    tokens = raw.split("|")
    kind = tokens[0]
    if kind not in _FIELD_COUNTS:
        raise UnknownKind(f"unknown message kind {kind!r}")
    if len(tokens) != _FIELD_COUNTS[kind]:
        raise FieldCountMismatch(
            f"{kind} expects {_FIELD_COUNTS[kind]} fields, got {len(tokens)}"
        )

    if kind == "REG":
        _, name, phone, lat, lon, lmp, lang = tokens
        if not name:
            raise InvalidField("name must be non-empty")
        if not phone:
            raise InvalidField("phone must be non-empty")
        if lang not in LANGUAGES:
            raise InvalidField(f"language must be one of {LANGUAGES}, got {lang!r}")
        payload: Payload = RegPayload(
            name=name,
            phone=phone,
            home=validate_point(lat, lon),
            lmp_date=_parse_date(lmp, "lmp_date"),
            language=lang,
        )
    elif kind == "HELP":
        _, patient_id, lat, lon, client_ts = tokens
        if not patient_id:
            raise InvalidField("patient_id must be non-empty")
        try:
            parse_iso(client_ts)
        except ValueError:
            raise InvalidField(f"client_ts is not ISO-8601: {client_ts!r}") from None
        payload = HelpPayload(
            patient_id=patient_id,
            location=validate_point(lat, lon),
            client_ts=client_ts,
        )
    else:  # CHG
        _, patient_id, date = tokens
        if not patient_id:
            raise InvalidField("patient_id must be non-empty")
        payload = ChgPayload(patient_id=patient_id, preferred_date=_parse_date(date, "preferred_date"))

    return InboundMessage(
        kind=kind,
        sender_phone=sender_phone,
        fields=tuple(tokens[1:]),
        received_at=now,
        payload=payload,
    )


def serialize_inbound(msg: InboundMessage) -> str:
    """Inverse of parse_inbound on semantic fields. Refuses oversize output."""
    for field in msg.fields:
        if "|" in field:
            raise InvalidField(f"field contains the delimiter: {field!r}")
    raw = "|".join((msg.kind,) + msg.fields)
    _check_size(raw)
    return raw


def build_reg(name: str, phone: str, lat: str, lon: str, lmp: str, lang: str) -> str:
    return f"REG|{name}|{phone}|{lat}|{lon}|{lmp}|{lang}"


def build_help(patient_id: str, lat: str, lon: str, client_ts: str) -> str:
    return f"HELP|{patient_id}|{lat}|{lon}|{client_ts}"


def build_chg(patient_id: str, preferred_date: str) -> str:
    return f"CHG|{patient_id}|{preferred_date}"


class TemplateCatalog:
    """Immutable per-language message templates, loaded once at startup.

    Catalog file format: one template per line, `id<TAB>lang<TAB>text`,
    with `{placeholder}` substitution slots.
    """

    def __init__(self, templates: dict):
        self._templates = dict(templates)

    @classmethod
    def from_file(cls, path) -> "TemplateCatalog":
        templates = {}
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise InvalidField(f"template line {lineno}: expected 3 tab-separated fields")
            template_id, lang, text = parts
            if lang not in LANGUAGES:
                raise InvalidField(f"template line {lineno}: unknown language {lang!r}")
            templates[(template_id, lang)] = text
        return cls(templates)

    @classmethod
    def default(cls) -> "TemplateCatalog":
        with resources.as_file(resources.files("pregcare.data") / "templates.tsv") as p:
            return cls.from_file(p)

    def render(self, template_id: str, language: str, bindings: dict) -> str:
        try:
            text = self._templates[(template_id, language)]
        except KeyError:
            raise MissingTemplate(f"no template {template_id!r} for language {language!r}") from None
        placeholders = {
            name for _, name, _, _ in string.Formatter().parse(text) if name is not None
        }
        missing = placeholders - set(bindings)
        if missing:
            raise UnboundPlaceholder(
                f"template {template_id!r}/{language}: unbound {sorted(missing)}"
            )
        return text.format(**{k: bindings[k] for k in placeholders})

    def notification(self, recipient_phone: str, template_id: str, language: str,
                     bindings: dict) -> OutboundNotification:
        rendered = self.render(template_id, language, bindings)
        return OutboundNotification(
            recipient_phone=recipient_phone,
            template_id=template_id,
            language=language,
            rendered=rendered,
        )
