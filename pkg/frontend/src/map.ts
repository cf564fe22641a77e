/**
 * Minimal lat/lon scatter map.
 *
 * Projects open requests and available units into pixel space with a plain
 * equirectangular fit over the marker bounding box. The renderer is pluggable
 * so a tile-based map can replace it without touching the view-model.
 */

import { openRequests } from "./board";
import type { RequestState, RequestView, UnitView } from "./types";

export interface Marker {
  id: string;
  kind: "request" | "unit";
  lat: number;
  lon: number;
  label: string;
  state?: RequestState;
}

export interface PlacedMarker extends Marker {
  x: number;
  y: number;
}

export interface Viewport {
  width: number;
  height: number;
  padding: number;
}

/** Only non-terminal requests and non-retired units produce markers. */
export function buildMarkers(
  requests: RequestView[],
  units: UnitView[] = [],
): Marker[] {
  const markers: Marker[] = openRequests(requests).map((r) => ({
    id: r.request_id,
    kind: "request",
    lat: r.lat,
    lon: r.lon,
    label: r.patient_name,
    state: r.state,
  }));
  for (const u of units) {
    if (u.status === "out_of_service") continue;
    markers.push({
      id: u.unit_id,
      kind: "unit",
      lat: u.lat,
      lon: u.lon,
      label: u.kind,
    });
  }
  return markers;
}

/**
 * Fit markers into the viewport. Degenerate extents (single marker, or all
 * markers collinear) center on the midpoint instead of dividing by zero.
 */
export function placeMarkers(
  markers: Marker[],
  viewport: Viewport,
): PlacedMarker[] {
  if (markers.length === 0) return [];
  const lats = markers.map((m) => m.lat);
  const lons = markers.map((m) => m.lon);
  const latMin = Math.min(...lats);
  const latMax = Math.max(...lats);
  const lonMin = Math.min(...lons);
  const lonMax = Math.max(...lons);
  const innerW = viewport.width - 2 * viewport.padding;
  const innerH = viewport.height - 2 * viewport.padding;

  return markers.map((m) => {
    const fx = lonMax === lonMin ? 0.5 : (m.lon - lonMin) / (lonMax - lonMin);
    // screen y grows downward while latitude grows northward
    const fy = latMax === latMin ? 0.5 : (latMax - m.lat) / (latMax - latMin);
    return {
      ...m,
      x: viewport.padding + fx * innerW,
      y: viewport.padding + fy * innerH,
    };
  });
}

export type MarkerRenderer = (placed: PlacedMarker[]) => void;
