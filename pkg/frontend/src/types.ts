/** Wire types mirroring the service API (docs/api.md in the backend repo). */

export type RequestState =
  | "received"
  | "located"
  | "dispatched"
  | "complete"
  | "cancelled";

export const TERMINAL_STATES: ReadonlySet<RequestState> = new Set([
  "complete",
  "cancelled",
]);

export interface RequestView {
  request_id: string;
  patient_id: string;
  patient_name: string;
  request_time: string;
  received_time: string;
  lat: number;
  lon: number;
  hospital_name: string;
  state: RequestState;
  unit_id: string | null;
}

export type UnitKind = "car" | "boat_life" | "helicopter";
export type UnitStatus = "available" | "dispatched" | "out_of_service";

export interface UnitView {
  unit_id: string;
  kind: UnitKind;
  lat: number;
  lon: number;
  status: UnitStatus;
}

export interface LoginResponse {
  token: string;
  role: "emc_operator" | "doctor" | "admin";
  expires_at: string;
}

export interface StatsResponse {
  patients: number;
  requests_by_state: Partial<Record<RequestState, number>>;
  open_requests: number;
  notifications_by_status: Record<string, number>;
}

export interface ApiErrorBody {
  ok: false;
  code: string;
  message: string;
}
