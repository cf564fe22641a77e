import { describe, expect, it } from "vitest";

import { buildMarkers, placeMarkers } from "../src/map";
import { makeRequest, makeUnit } from "./fixtures";

describe("buildMarkers", () => {
  it("skips terminal requests and out-of-service units", () => {
    const markers = buildMarkers(
      [
        makeRequest({ request_id: "R1", state: "located" }),
        makeRequest({ request_id: "R2", state: "cancelled" }),
      ],
      [
        makeUnit({ unit_id: "U1", status: "available" }),
        makeUnit({ unit_id: "U2", status: "out_of_service" }),
      ],
    );
    expect(markers.map((m) => m.id)).toEqual(["R1", "U1"]);
  });
});

describe("placeMarkers", () => {
  const viewport = { width: 100, height: 100, padding: 10 };

  it("fits extremes to the padded viewport corners", () => {
    const placed = placeMarkers(
      buildMarkers([
        makeRequest({ request_id: "R1", lat: 36.0, lon: 44.0 }),
        makeRequest({ request_id: "R2", lat: 37.0, lon: 45.0 }),
      ]),
      viewport,
    );
    // north-east marker lands at top-right
    expect(placed[1]).toMatchObject({ x: 90, y: 10 });
    expect(placed[0]).toMatchObject({ x: 10, y: 90 });
  });

  it("centers a single marker", () => {
    const placed = placeMarkers(buildMarkers([makeRequest()]), viewport);
    expect(placed[0]).toMatchObject({ x: 50, y: 50 });
  });

  it("returns nothing for an empty board", () => {
    expect(placeMarkers([], viewport)).toEqual([]);
  });
});
