import type { RequestView, UnitView } from "../src/types";

export function makeRequest(over: Partial<RequestView> = {}): RequestView {
  return {
    request_id: "R000001",
    patient_id: "P000001",
    patient_name: "Rawshan",
    request_time: "2014-01-25T05:00:00Z",
    received_time: "2014-01-25T05:00:01Z",
    lat: 36.2062125,
    lon: 44.0307111,
    hospital_name: "Maternity Hospital",
    state: "located",
    unit_id: null,
    ...over,
  };
}

export function makeUnit(over: Partial<UnitView> = {}): UnitView {
  return {
    unit_id: "U000001",
    kind: "car",
    lat: 36.2,
    lon: 44.0,
    status: "available",
    ...over,
  };
}

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}
