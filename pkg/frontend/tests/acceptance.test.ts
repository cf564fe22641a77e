/**
 * Console acceptance: the board and map show only open requests, and an
 * assign action updates the row from the action response without a reload.
 */

import { describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api";
import { applyUpdate, toBoardRows } from "../src/board";
import { buildMarkers } from "../src/map";
import { jsonResponse, makeRequest } from "./fixtures";

describe("operator console acceptance", () => {
  const requests = [
    makeRequest({ request_id: "R1", state: "located" }),
    makeRequest({ request_id: "R2", state: "dispatched", unit_id: "U2" }),
    makeRequest({ request_id: "R3", state: "complete", unit_id: "U3" }),
  ];

  it("shows exactly the two non-terminal requests as rows and markers", () => {
    const rows = toBoardRows(requests, "en");
    expect(rows).toHaveLength(2);
    expect(rows.map((r) => r.requestId)).toEqual(["R1", "R2"]);

    const markers = buildMarkers(requests);
    expect(markers).toHaveLength(2);
    expect(markers.map((m) => m.id)).toEqual(["R1", "R2"]);
  });

  it("flips a located row to dispatched from the assign response alone", async () => {
    const updated = makeRequest({
      request_id: "R1",
      state: "dispatched",
      unit_id: "U000001",
    });
    const fetchImpl = vi.fn().mockResolvedValue(jsonResponse(updated));
    const client = new ApiClient("http://svc", fetchImpl);

    const next = applyUpdate(requests, await client.assign("R1", "U000001"));
    const rows = toBoardRows(next, "en");

    expect(fetchImpl).toHaveBeenCalledTimes(1); // the action call; no refetch
    expect(rows.find((r) => r.requestId === "R1")).toMatchObject({
      stateLabel: "Dispatched",
      unitId: "U000001",
      canAssign: false,
      canComplete: true,
    });
  });
});
