"""HTTP face of the system: message ingress (the stand-in for an SMS
gateway webhook), operator/doctor APIs for the console, and auth.

Response field names are frozen; see docs/api.md and the golden tests.
"""

from __future__ import annotations

import argparse
import json
import logging
import secrets
import sys
import threading
from dataclasses import dataclass
from typing import Optional

from fastapi import Depends, FastAPI, Header, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .care import CareService
from .clock import SystemClock, iso, parse_iso
from .config import ServiceConfig
from .dispatch import Dispatcher, RequestView, TERMINAL_STATES
from .errors import (
    BadCredentials,
    EmptyCandidateSet,
    DuplicatePhone,
    IllegalTransition,
    NotFound,
    PregcareError,
    Unauthorized,
    UnitUnavailable,
)
from .gateway import DeliveryService, GatewayStub
from .protocol import TemplateCatalog, parse_inbound
from .registry import Registry

log = logging.getLogger("pregcare.service")

_STATUS_BY_CODE = {
    NotFound.code: 404,
    Unauthorized.code: 401,
    BadCredentials.code: 401,
    IllegalTransition.code: 409,
    UnitUnavailable.code: 409,
    DuplicatePhone.code: 409,
    EmptyCandidateSet.code: 503,
}


@dataclass
class Principal:
    role: str  # emc_operator | doctor | admin
    subject: str  # account id or doctor id
    doctor_id: Optional[str] = None


class TokenStore:
    """In-memory opaque session tokens; lost on restart by design."""

    def __init__(self, clock, ttl_s: float):
        self.clock = clock
        self.ttl_s = ttl_s
        self._tokens: dict[str, tuple[Principal, object]] = {}
        self._lock = threading.Lock()

    def issue(self, principal: Principal) -> tuple[str, str]:
        import datetime as dt

        token = secrets.token_urlsafe(32)  # 256 bits
        expires = self.clock.now() + dt.timedelta(seconds=self.ttl_s)
        with self._lock:
            self._tokens[token] = (principal, expires)
        return token, iso(expires)

    def validate(self, token: str) -> Principal:
        with self._lock:
            entry = self._tokens.get(token)
        if entry is None:
            raise Unauthorized("unknown token")
        principal, expires = entry
        if self.clock.now() >= expires:
            raise Unauthorized("token expired")
        return principal


class ServiceRuntime:
    """Owns every component; the FastAPI app is a thin layer over this."""

    def __init__(self, config: ServiceConfig, clock=None):
        self.config = config
        self.clock = clock or SystemClock()
        self.registry = Registry(config.db_path, clock=self.clock)
        self.templates = TemplateCatalog.default()
        self.gateway = GatewayStub(
            config.sink_path,
            failure_rate=config.gateway_failure_rate,
            seed=config.gateway_seed,
        )
        self.delivery = DeliveryService(
            self.registry, self.gateway, self.clock,
            workers=config.delivery_workers,
            retry_count=config.retry_count,
            backoff_base_s=config.backoff_base_s,
        )
        on_queued = self.delivery.enqueue if config.delivery_workers > 0 else None
        self.dispatcher = Dispatcher(
            self.registry, self.templates, self.clock,
            dedup_window_s=config.dedup_window_s,
            on_queued=on_queued,
        )
        self.care = CareService(self.registry, self.templates, self.clock, on_queued=on_queued)
        self.tokens = TokenStore(self.clock, config.token_ttl_s)
        self._batch_thread: Optional[threading.Thread] = None
        self._batch_stop = threading.Event()
        self._last_batch_date = None

    def start(self) -> None:
        self.delivery.start()
        self._batch_thread = threading.Thread(
            target=self._batch_loop, name="weekly-advice", daemon=True
        )
        self._batch_thread.start()

    def stop(self) -> None:
        self._batch_stop.set()
        if self._batch_thread:
            self._batch_thread.join(timeout=2)
        self.delivery.stop()
        self.registry.close()

    def _batch_loop(self) -> None:
        while not self._batch_stop.wait(timeout=10.0):
            now = self.clock.now()
            due = (
                now.weekday() == self.config.weekly_batch_weekday
                and now.hour >= self.config.weekly_batch_hour
                and self._last_batch_date != now.date()
            )
            if due:
                self._last_batch_date = now.date()
                report = self.care.weekly_advice_batch(now.date())
                event(
                    "weekly_advice_batch",
                    sent=len(report.notifications),
                    missing=len(report.missing_advice),
                    past_term=len(report.past_term),
                )


def event(name: str, **fields) -> None:
    """One machine-parseable event per line on stdout."""
    print(json.dumps({"event": name, **fields}, ensure_ascii=False), flush=True)


def request_view_dict(v: RequestView) -> dict:
    return {
        "request_id": v.request_id,
        "patient_id": v.patient_id,
        "patient_name": v.patient_name,
        "request_time": v.request_time,
        "received_time": v.received_time,
        "lat": v.lat,
        "lon": v.lon,
        "hospital_name": v.hospital_name,
        "state": v.state,
        "unit_id": v.unit_id,
    }


class IngressBody(BaseModel):
    payload: str
    sender_phone: str


class LoginBody(BaseModel):
    username: str
    password: str


class AssignBody(BaseModel):
    unit_id: str


class PatientFileBody(BaseModel):
    request_id: str
    notes: str


def create_app(runtime: ServiceRuntime) -> FastAPI:
    app = FastAPI(title="pregcare", version="0.1.0")
    app.state.runtime = runtime
    cfg = runtime.config

    @app.exception_handler(PregcareError)
    async def domain_error(_request: Request, exc: PregcareError):
        return JSONResponse(
            status_code=_STATUS_BY_CODE.get(exc.code, 422),
            content={"ok": False, "code": exc.code, "message": exc.message},
        )

    @app.exception_handler(Exception)
    async def unexpected_error(_request: Request, exc: Exception):
        log.exception("unhandled error")
        return JSONResponse(
            status_code=500,
            content={"ok": False, "code": "INTERNAL", "message": "internal error"},
        )

    def authenticated(authorization: str = Header(default="")) -> Principal:
        if not authorization.startswith("Bearer "):
            raise Unauthorized("missing bearer token")
        return runtime.tokens.validate(authorization[len("Bearer "):])

    def operator(principal: Principal = Depends(authenticated)) -> Principal:
        if principal.role not in ("emc_operator", "admin"):
            raise Unauthorized(f"role {principal.role} may not perform operator actions")
        return principal

    def doctor(principal: Principal = Depends(authenticated)) -> Principal:
        if principal.role != "doctor":
            raise Unauthorized(f"role {principal.role} may not perform doctor actions")
        return principal

    # -- ingress -----------------------------------------------------------

    @app.post("/ingress/sms")
    def ingress(body: IngressBody, x_ingress_key: str = Header(default="")):
        if cfg.ingress_key and x_ingress_key != cfg.ingress_key:
            raise Unauthorized("bad ingress key")
        msg = parse_inbound(body.payload, body.sender_phone, runtime.clock.now())
        if msg.kind == "HELP":
            req = runtime.dispatcher.ingest_help(msg)
            event("help_ingested", request_id=req.request_id, state=req.state)
            return {"ok": True, "kind": "HELP", "request_id": req.request_id,
                    "state": req.state, "hospital_id": req.hospital_id}
        if msg.kind == "REG":
            patient, appointment, _ = runtime.care.register(msg)
            event("patient_registered", patient_id=patient.patient_id)
            return {"ok": True, "kind": "REG", "patient_id": patient.patient_id,
                    "care_center_id": patient.care_center_id,
                    "first_review": appointment.scheduled_for.isoformat()}
        appointment = runtime.care.reschedule(msg)
        event("review_rescheduled", appointment_id=appointment.appointment_id)
        return {"ok": True, "kind": "CHG", "appointment_id": appointment.appointment_id,
                "scheduled_for": appointment.scheduled_for.isoformat()}

    # -- auth --------------------------------------------------------------

    @app.post("/auth/login")
    def login(body: LoginBody):
        account = runtime.registry.verify_account_login(body.username, body.password)
        if account is not None:
            principal = Principal(role=account.role, subject=account.account_id,
                                  doctor_id=account.doctor_id)
        else:
            doc = runtime.registry.verify_doctor_login(body.username, body.password)
            if doc is None:
                raise BadCredentials("bad username or password")
            principal = Principal(role="doctor", subject=doc.doctor_id, doctor_id=doc.doctor_id)
        token, expires_at = runtime.tokens.issue(principal)
        return {"token": token, "role": principal.role, "expires_at": expires_at}

    # -- console / operator ------------------------------------------------

    @app.get("/requests")
    def list_requests(state: str = "", since: str = "",
                      _principal: Principal = Depends(authenticated)):
        states = [s for s in state.split(",") if s] or None
        since_ts = parse_iso(since) if since else None
        views = runtime.dispatcher.list_requests(states, since_ts)
        return {"requests": [request_view_dict(v) for v in views]}

    @app.get("/requests/{request_id}")
    def get_request(request_id: str, _principal: Principal = Depends(authenticated)):
        views = [v for v in runtime.dispatcher.list_requests() if v.request_id == request_id]
        if not views:
            raise NotFound(f"request {request_id} not found")
        return request_view_dict(views[0])

    @app.post("/requests/{request_id}/assign")
    def assign(request_id: str, body: AssignBody, principal: Principal = Depends(operator)):
        runtime.dispatcher.assign_unit(request_id, body.unit_id, actor=principal.subject)
        event("unit_assigned", request_id=request_id, unit_id=body.unit_id)
        return get_request(request_id, principal)

    @app.post("/requests/{request_id}/complete")
    def complete(request_id: str, principal: Principal = Depends(operator)):
        runtime.dispatcher.complete_request(request_id, actor=principal.subject)
        event("request_completed", request_id=request_id)
        return get_request(request_id, principal)

    @app.post("/requests/{request_id}/cancel")
    def cancel(request_id: str, principal: Principal = Depends(operator)):
        runtime.dispatcher.cancel_request(request_id, actor=principal.subject)
        event("request_cancelled", request_id=request_id)
        return get_request(request_id, principal)

    @app.get("/units")
    def units(status: str = "", _principal: Principal = Depends(authenticated)):
        rows = runtime.registry.units(status or None)
        return {"units": [
            {"unit_id": u.unit_id, "kind": u.kind, "lat": u.base.lat,
             "lon": u.base.lon, "status": u.status}
            for u in rows
        ]}

    @app.get("/patients/{patient_id}")
    def patient(patient_id: str, _principal: Principal = Depends(authenticated)):
        p = runtime.registry.find_patient(patient_id=patient_id)
        return {
            "patient_id": p.patient_id, "name": p.name, "phone": p.phone,
            "husband_phone": p.husband_phone, "lat": p.home.lat, "lon": p.home.lon,
            "lmp_date": p.lmp_date.isoformat(), "language": p.language,
            "care_center_id": p.care_center_id, "registered_at": iso(p.registered_at),
        }

    @app.post("/patients/{patient_id}/file")
    def patient_file(patient_id: str, body: PatientFileBody,
                     principal: Principal = Depends(doctor)):
        f = runtime.registry.add_patient_file(
            patient_id, principal.doctor_id, body.request_id, body.notes
        )
        return {"file_id": f.file_id, "patient_id": f.patient_id,
                "doctor_id": f.doctor_id, "request_id": f.request_id}

    @app.get("/stats")
    def stats(_principal: Principal = Depends(authenticated)):
        rows = runtime.registry.request_rows()
        by_state: dict[str, int] = {}
        for row in rows:
            by_state[row["state"]] = by_state.get(row["state"], 0) + 1
        notes = runtime.registry.notifications()
        by_status: dict[str, int] = {}
        for n in notes:
            by_status[n.status] = by_status.get(n.status, 0) + 1
        return {
            "patients": len(runtime.registry.active_patients()),
            "requests_by_state": by_state,
            "open_requests": sum(
                c for s, c in by_state.items() if s not in TERMINAL_STATES
            ),
            "notifications_by_status": by_status,
        }

    @app.post("/admin/advice-batch")
    def advice_batch(principal: Principal = Depends(operator)):
        report = runtime.care.weekly_advice_batch()
        return {
            "sent": len(report.notifications),
            "missing_advice": [
                {"patient_id": p, "week": w, "language": lang}
                for p, w, lang in report.missing_advice
            ],
            "past_term": report.past_term,
        }

    @app.get("/health")
    def health():
        return {"ok": True}

    return app


def main(argv=None) -> None:
    import uvicorn

    parser = argparse.ArgumentParser(prog="pregcare-server")
    parser.add_argument("--config", default=None, help="path to JSON config file")
    args = parser.parse_args(argv)
    config = ServiceConfig.load(args.config)
    runtime = ServiceRuntime(config)
    runtime.start()
    app = create_app(runtime)
    try:
        uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
    finally:
        runtime.stop()


if __name__ == "__main__":
    main()
