"""Typed domain errors, each carrying a stable machine-readable code.

Every error a handler can return over the wire maps 1:1 to a ``code``
string; tests and the console rely on these codes never changing.
"""


class PregcareError(Exception):
    code = "INTERNAL"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
        self.message = message or self.code


class MalformedCoordinate(PregcareError):
    code = "MALFORMED_COORDINATE"


class OutOfRange(PregcareError):
    code = "OUT_OF_RANGE"


class EmptyCandidateSet(PregcareError):
    code = "EMPTY_CANDIDATE_SET"


class DuplicatePhone(PregcareError):
    code = "DUPLICATE_PHONE"


class InvalidField(PregcareError):
    code = "INVALID_FIELD"


class NotFound(PregcareError):
    code = "NOT_FOUND"


class UnknownKind(PregcareError):
    code = "UNKNOWN_KIND"


class FieldCountMismatch(PregcareError):
    code = "FIELD_COUNT_MISMATCH"


class OversizedPayload(PregcareError):
    code = "OVERSIZED_PAYLOAD"


class MissingTemplate(PregcareError):
    code = "MISSING_TEMPLATE"


class UnboundPlaceholder(PregcareError):
    code = "UNBOUND_PLACEHOLDER"


class UnknownPatient(PregcareError):
    code = "UNKNOWN_PATIENT"


class IllegalTransition(PregcareError):
    code = "ILLEGAL_TRANSITION"


class UnitUnavailable(PregcareError):
    code = "UNIT_UNAVAILABLE"


class NoOpenAppointment(PregcareError):
    code = "NO_OPEN_APPOINTMENT"


class PastDate(PregcareError):
    code = "PAST_DATE"


class FutureLMP(PregcareError):
    code = "FUTURE_LMP"


class OutOfPregnancyRange(PregcareError):
    code = "OUT_OF_PREGNANCY_RANGE"


class BadCredentials(PregcareError):
    code = "BAD_CREDENTIALS"


class Unauthorized(PregcareError):
    code = "UNAUTHORIZED"


class GatewayUnreachable(PregcareError):
    code = "GATEWAY_UNREACHABLE"
