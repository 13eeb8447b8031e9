/**
 * Pure SVG fragment builders. No DOM access: everything returns a
 * string that main.ts injects, which keeps rendering testable in node.
 */

import type { FloodCollection, LatLon, RouteFeature } from "./api.js";
import { depthColor } from "./colors.js";
import { lineToPoints, ringToPath, type Projector } from "./geometry.js";

export function overlaySvg(
  collection: FloodCollection,
  proj: Projector,
): string {
  const cells: string[] = [];
  for (const feature of collection.features) {
    const ring = feature.geometry.coordinates[0];
    if (ring === undefined) {
      continue;
    }
    const depth = feature.properties.depth_m;
    const fill = depthColor(depth);
    const depthAttr = depth === null ? "nodata" : depth.toFixed(3);
    cells.push(
      `<path d="${ringToPath(ring, proj)}" fill="${fill}" ` +
        `stroke="none" data-depth="${depthAttr}"/>`,
    );
  }
  return `<g class="overlay">${cells.join("")}</g>`;
}

export function routeSvg(route: RouteFeature, proj: Projector): string {
  const coordinates = route.geometry.coordinates;
  if (coordinates.length === 1) {
    // degenerate route: origin and destination share a cell
    const only = coordinates[0];
    if (only === undefined) {
      return "";
    }
    const [lon, lat] = only;
    return (
      `<g class="route"><circle cx="${proj.x(lon)}" cy="${proj.y(lat)}" ` +
      `r="5" fill="#d62728"/></g>`
    );
  }
  const points = lineToPoints(coordinates, proj);
  return (
    `<g class="route"><polyline points="${points}" fill="none" ` +
    `stroke="#d62728" stroke-width="3" stroke-linejoin="round" ` +
    `stroke-linecap="round"/></g>`
  );
}

export function markerSvg(
  point: LatLon,
  proj: Projector,
  kind: "origin" | "destination",
): string {
  const cx = proj.x(point.lon);
  const cy = proj.y(point.lat);
  const fill = kind === "origin" ? "#2ca02c" : "#9467bd";
  return (
    `<g class="marker-${kind}"><circle cx="${cx}" cy="${cy}" r="6" ` +
    `fill="${fill}" stroke="#ffffff" stroke-width="2"/></g>`
  );
}

export function legendHtml(
  buckets: ReadonlyArray<{ color: string; label: string }>,
): string {
  const rows = buckets
    .map(
      (bucket) =>
        `<span class="legend-item"><span class="swatch" ` +
        `style="background:${bucket.color}"></span>${bucket.label}</span>`,
    )
    .join("");
  return rows;
}
