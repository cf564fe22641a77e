/**
 * Pure view-model layer for the operator board.
 *
 * The board lists only non-terminal requests (received/located/dispatched);
 * completed and cancelled requests disappear from both the board and the map.
 */

import { t, type UiLang } from "./i18n";
import { TERMINAL_STATES, type RequestView } from "./types";

export interface BoardRow {
  requestId: string;
  patientName: string;
  hospitalName: string;
  stateLabel: string;
  unitId: string;
  requestedAt: string;
  canAssign: boolean;
  canComplete: boolean;
  canCancel: boolean;
}

export interface DetailField {
  label: string;
  value: string;
}

export function openRequests(requests: RequestView[]): RequestView[] {
  return requests.filter((r) => !TERMINAL_STATES.has(r.state));
}

export function toBoardRows(
  requests: RequestView[],
  lang: UiLang,
): BoardRow[] {
  return openRequests(requests).map((r) => ({
    requestId: r.request_id,
    patientName: r.patient_name,
    hospitalName: r.hospital_name,
    stateLabel: t(lang, `state.${r.state}`),
    unitId: r.unit_id ?? "—",
    requestedAt: r.request_time,
    canAssign: r.state === "located",
    canComplete: r.state === "dispatched",
    // cancel is legal from any non-terminal state, and every board row is one
    canCancel: true,
  }));
}

/** The detail panel always shows these seven fields, in this order. */
export function detailFields(view: RequestView, lang: UiLang): DetailField[] {
  return [
    { label: t(lang, "detail.patientName"), value: view.patient_name },
    { label: t(lang, "detail.requestTime"), value: view.request_time },
    { label: t(lang, "detail.receivedTime"), value: view.received_time },
    { label: t(lang, "detail.lat"), value: view.lat.toFixed(7) },
    { label: t(lang, "detail.lon"), value: view.lon.toFixed(7) },
    { label: t(lang, "detail.hospitalName"), value: view.hospital_name },
    { label: t(lang, "detail.state"), value: t(lang, `state.${view.state}`) },
  ];
}

/**
 * Merge a single updated view (e.g. the response of an assign action) into
 * the current request list without refetching.
 */
export function applyUpdate(
  requests: RequestView[],
  updated: RequestView,
): RequestView[] {
  let found = false;
  const next = requests.map((r) => {
    if (r.request_id !== updated.request_id) return r;
    found = true;
    return updated;
  });
  return found ? next : [...next, updated];
}
