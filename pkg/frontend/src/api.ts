/**
 * Typed client for the flood-routing service.
 *
 * Every method returns a discriminated result instead of throwing on
 * application errors, so callers can surface problem responses (409 no
 * route, 422 validation) as banners without try/catch pyramids. Only
 * transport failures (server unreachable) reject the promise.
 */

export interface LatLon {
  lat: number;
  lon: number;
}

export type HeuristicName = "octile" | "manhattan_paper" | "zero";

/** RFC 7807 style body emitted by the service for every error. */
export interface Problem {
  title: string;
  status: number;
  detail: string;
  code: string;
  reason?: string;
  expanded?: number;
  snapshot_version?: number;
  errors?: Array<{ index: number; message: string }>;
}

export interface CellProperties {
  depth_m: number | null;
  row: number;
  col: number;
  nodata?: boolean;
}

export interface CellFeature {
  type: "Feature";
  geometry: { type: "Polygon"; coordinates: number[][][] };
  properties: CellProperties;
}

export interface FloodCollection {
  type: "FeatureCollection";
  features: CellFeature[];
  snapshot_version: number;
}

export interface RouteProperties {
  total_cost: number;
  path_length_m: number;
  expanded: number;
}

export interface RouteFeature {
  type: "Feature";
  geometry: { type: "LineString"; coordinates: Array<[number, number]> };
  properties: RouteProperties;
}

export interface BuildSummary {
  rows: number;
  cols: number;
  cell_size_m: number;
  snapshot_version: number;
  max_depth_m: number;
  flooded_cell_count: number;
}

export interface HealthInfo {
  status: string;
  snapshot_version: number;
}

export interface RouteParams {
  origin: LatLon;
  destination: LatLon;
  max_depth_m: number;
  heuristic?: HeuristicName;
  depth_penalty_per_m?: number;
}

export type ApiResult<T> =
  | { ok: true; value: T }
  | { ok: false; problem: Problem };

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function readProblem(response: Response): Promise<Problem> {
  try {
    const body = (await response.json()) as Partial<Problem>;
    if (typeof body.code === "string") {
      return body as Problem;
    }
    return {
      title: "Error",
      status: response.status,
      detail: typeof body.detail === "string" ? body.detail : response.statusText,
      code: `http_${response.status}`,
    };
  } catch {
    return {
      title: "Error",
      status: response.status,
      detail: response.statusText,
      code: `http_${response.status}`,
    };
  }
}

export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl = "", fetchFn?: FetchLike) {
    this.base = baseUrl.replace(/\/$/, "");
    // bind so the client works when the global fetch is the implementation
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async get<T>(path: string): Promise<ApiResult<T>> {
    const response = await this.fetchFn(this.base + path);
    if (!response.ok) {
      return { ok: false, problem: await readProblem(response) };
    }
    return { ok: true, value: (await response.json()) as T };
  }

  private async post<T>(path: string, body: unknown): Promise<ApiResult<T>> {
    const response = await this.fetchFn(this.base + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) {
      return { ok: false, problem: await readProblem(response) };
    }
    return { ok: true, value: (await response.json()) as T };
  }

  health(): Promise<ApiResult<HealthInfo>> {
    return this.get<HealthInfo>("/health");
  }

  buildMap(params: { bandwidth_m?: number } = {}): Promise<ApiResult<BuildSummary>> {
    return this.post<BuildSummary>("/map/build", params);
  }

  /** Cells deeper than maxDepthM (the impassable set at that threshold). */
  floodOverlay(maxDepthM: number): Promise<ApiResult<FloodCollection>> {
    const query = encodeURIComponent(String(maxDepthM));
    return this.get<FloodCollection>(`/map/flood.geojson?max_depth_m=${query}`);
  }

  route(
    params: RouteParams,
  ): Promise<ApiResult<{ snapshot_version: number; route: RouteFeature }>> {
    return this.post("/route", params);
  }
}
