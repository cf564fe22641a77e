/**
 * Thin fetch client for the pregcare HTTP API.
 *
 * Holds the bearer token; a 401 clears it so the app can re-prompt for login.
 * The fetch implementation is injectable for tests.
 */

import type {
  ApiErrorBody,
  LoginResponse,
  RequestView,
  StatsResponse,
  UnitView,
} from "./types";

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class ApiClient {
  private token: string | null = null;

  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) =>
      fetch(input, init),
  ) {}

  get authenticated(): boolean {
    return this.token !== null;
  }

  async login(username: string, password: string): Promise<LoginResponse> {
    const body = await this.request<LoginResponse>("POST", "/auth/login", {
      username,
      password,
    });
    this.token = body.token;
    return body;
  }

  logout(): void {
    this.token = null;
  }

  listRequests(states?: string[]): Promise<{ requests: RequestView[] }> {
    const query = states && states.length ? `?state=${states.join(",")}` : "";
    return this.request("GET", `/requests${query}`);
  }

  getRequest(requestId: string): Promise<RequestView> {
    return this.request("GET", `/requests/${requestId}`);
  }

  assign(requestId: string, unitId: string): Promise<RequestView> {
    return this.request("POST", `/requests/${requestId}/assign`, {
      unit_id: unitId,
    });
  }

  complete(requestId: string): Promise<RequestView> {
    return this.request("POST", `/requests/${requestId}/complete`);
  }

  cancel(requestId: string): Promise<RequestView> {
    return this.request("POST", `/requests/${requestId}/cancel`);
  }

  listUnits(status?: string): Promise<{ units: UnitView[] }> {
    const query = status ? `?status=${status}` : "";
    return this.request("GET", `/units${query}`);
  }

  stats(): Promise<StatsResponse> {
    return this.request("GET", "/stats");
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const headers: Record<string, string> = {};
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    if (body !== undefined) headers["Content-Type"] = "application/json";

    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });

    if (!response.ok) {
      if (response.status === 401) this.token = null;
      let code = "HTTP_ERROR";
      let message = `${response.status}`;
      try {
        const err = (await response.json()) as ApiErrorBody;
        if (err.code) code = err.code;
        if (err.message) message = err.message;
      } catch {
        // non-JSON error body; keep the status-line fallback
      }
      throw new ApiError(response.status, code, message);
    }
    return (await response.json()) as T;
  }
}
