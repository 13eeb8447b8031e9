/**
 * Depth choropleth scale: five blue buckets, deeper water darker.
 *
 * Bucket edges (meters): 0.15, 0.30, 0.50, 1.00; the last bucket is
 * open-ended. Cells without elevation data render in neutral gray.
 */

export interface DepthBucket {
  /** Inclusive upper edge in meters; Infinity for the deepest bucket. */
  upTo: number;
  color: string;
  label: string;
}

export const DEPTH_BUCKETS: readonly DepthBucket[] = [
  { upTo: 0.15, color: "#c6dbef", label: "under 0.15 m" },
  { upTo: 0.3, color: "#9ecae1", label: "0.15 to 0.3 m" },
  { upTo: 0.5, color: "#6baed6", label: "0.3 to 0.5 m" },
  { upTo: 1.0, color: "#3182bd", label: "0.5 to 1 m" },
  { upTo: Infinity, color: "#08519c", label: "over 1 m" },
];

export const NODATA_COLOR = "#d0d0d0";

export function depthBucket(depthM: number): number {
  for (let i = 0; i < DEPTH_BUCKETS.length; i += 1) {
    const bucket = DEPTH_BUCKETS[i];
    if (bucket !== undefined && depthM <= bucket.upTo) {
      return i;
    }
  }
  return DEPTH_BUCKETS.length - 1;
}

export function depthColor(depthM: number | null): string {
  if (depthM === null || !Number.isFinite(depthM)) {
    return NODATA_COLOR;
  }
  const bucket = DEPTH_BUCKETS[depthBucket(depthM)];
  return bucket === undefined ? NODATA_COLOR : bucket.color;
}
