/**
 * Geographic-to-viewport projection for the SVG map.
 *
 * A plate-carree fit with the longitude axis compressed by cos(mid
 * latitude) so square metric cells stay square on screen. North is up,
 * so the y axis inverts. toLatLon is the exact inverse, used to turn
 * map clicks back into coordinates for route requests.
 */

import type { CellFeature, LatLon } from "./api.js";

export interface Bbox {
  minLon: number;
  minLat: number;
  maxLon: number;
  maxLat: number;
}

export function featureBbox(features: readonly CellFeature[]): Bbox | null {
  let minLon = Infinity;
  let minLat = Infinity;
  let maxLon = -Infinity;
  let maxLat = -Infinity;
  for (const feature of features) {
    for (const ring of feature.geometry.coordinates) {
      for (const position of ring) {
        const lon = position[0];
        const lat = position[1];
        if (lon === undefined || lat === undefined) {
          continue;
        }
        minLon = Math.min(minLon, lon);
        maxLon = Math.max(maxLon, lon);
        minLat = Math.min(minLat, lat);
        maxLat = Math.max(maxLat, lat);
      }
    }
  }
  if (!Number.isFinite(minLon)) {
    return null;
  }
  return { minLon, minLat, maxLon, maxLat };
}

export interface Projector {
  x(lon: number): number;
  y(lat: number): number;
  toLatLon(px: number, py: number): LatLon;
  readonly width: number;
  readonly height: number;
}

export function makeProjector(
  bbox: Bbox,
  width: number,
  height: number,
  padPx = 12,
): Projector {
  const midLat = (bbox.minLat + bbox.maxLat) / 2;
  const lonShrink = Math.cos((midLat * Math.PI) / 180);
  const lonSpan = Math.max(bbox.maxLon - bbox.minLon, 1e-12) * lonShrink;
  const latSpan = Math.max(bbox.maxLat - bbox.minLat, 1e-12);
  const scale = Math.min(
    (width - 2 * padPx) / lonSpan,
    (height - 2 * padPx) / latSpan,
  );
  // center the footprint in the viewport
  const offsetX = (width - lonSpan * scale) / 2;
  const offsetY = (height - latSpan * scale) / 2;

  const x = (lon: number): number =>
    offsetX + (lon - bbox.minLon) * lonShrink * scale;
  const y = (lat: number): number =>
    height - offsetY - (lat - bbox.minLat) * scale;

  return {
    x,
    y,
    toLatLon(px: number, py: number): LatLon {
      return {
        lon: bbox.minLon + (px - offsetX) / (lonShrink * scale),
        lat: bbox.minLat + (height - offsetY - py) / scale,
      };
    },
    width,
    height,
  };
}

/** Polygon ring to an SVG path, closed. */
export function ringToPath(
  ring: readonly number[][],
  proj: Projector,
): string {
  const parts: string[] = [];
  for (const position of ring) {
    const lon = position[0];
    const lat = position[1];
    if (lon === undefined || lat === undefined) {
      continue;
    }
    const command = parts.length === 0 ? "M" : "L";
    parts.push(`${command}${round2(proj.x(lon))} ${round2(proj.y(lat))}`);
  }
  return parts.join(" ") + " Z";
}

/** LineString coordinates to an SVG polyline points attribute. */
export function lineToPoints(
  coordinates: ReadonlyArray<[number, number]>,
  proj: Projector,
): string {
  return coordinates
    .map(([lon, lat]) => `${round2(proj.x(lon))},${round2(proj.y(lat))}`)
    .join(" ");
}

function round2(value: number): number {
  return Math.round(value * 100) / 100;
}
