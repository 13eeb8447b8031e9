/**
 * UI state container with stale-response protection.
 *
 * Route and overlay requests each carry a token captured at request
 * start. A response is applied only while its token is still current.
 * Any parameter mutation (endpoint click, slider, heuristic) and any
 * newer request of the same kind invalidates older tokens, so the
 * rendered route always corresponds to the parameters on screen and
 * rapid re-clicks keep only the final answer.
 */

import type {
  FloodCollection,
  HeuristicName,
  LatLon,
  Problem,
  RouteFeature,
} from "./api.js";

export interface Banner {
  code: string;
  detail: string;
}

export interface UiState {
  origin: LatLon | null;
  destination: LatLon | null;
  maxDepthM: number;
  heuristic: HeuristicName;
  route: RouteFeature | null;
  overlay: FloodCollection | null;
  banner: Banner | null;
  snapshotVersion: number | null;
  routePending: boolean;
}

export type Listener = (state: UiState) => void;

const INITIAL: UiState = {
  origin: null,
  destination: null,
  maxDepthM: 0.3,
  heuristic: "octile",
  route: null,
  overlay: null,
  banner: null,
  snapshotVersion: null,
  routePending: false,
};

export class UiStore {
  private state: UiState;
  private listeners: Listener[] = [];
  private sequence = 0;
  private routeToken = 0;
  private overlayToken = 0;

  constructor(initial: Partial<UiState> = {}) {
    this.state = { ...INITIAL, ...initial };
  }

  get snapshot(): UiState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private commit(patch: Partial<UiState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  /** True when a route request is allowed: both endpoints are set. */
  canRequestRoute(): boolean {
    return this.state.origin !== null && this.state.destination !== null;
  }

  // -- parameter mutations: each one invalidates in-flight responses --

  private invalidate(): void {
    this.routeToken = ++this.sequence;
    this.overlayToken = ++this.sequence;
  }

  setOrigin(point: LatLon): void {
    this.invalidate();
    this.commit({ origin: point, route: null, banner: null,
                  routePending: false });
  }

  setDestination(point: LatLon): void {
    this.invalidate();
    this.commit({ destination: point, route: null, banner: null,
                  routePending: false });
  }

  clearEndpoints(): void {
    this.invalidate();
    this.commit({ origin: null, destination: null, route: null,
                  banner: null, routePending: false });
  }

  setMaxDepth(value: number): void {
    this.invalidate();
    this.commit({ maxDepthM: value, route: null, banner: null,
                  routePending: false });
  }

  setHeuristic(name: HeuristicName): void {
    this.invalidate();
    this.commit({ heuristic: name, route: null, banner: null,
                  routePending: false });
  }

  clearBanner(): void {
    this.commit({ banner: null });
  }

  // -- asynchronous results, guarded by token --

  /** Marks a new in-flight route request and returns its token. */
  beginRoute(): number {
    this.routeToken = ++this.sequence;
    this.commit({ routePending: true });
    return this.routeToken;
  }

  beginOverlay(): number {
    this.overlayToken = ++this.sequence;
    return this.overlayToken;
  }

  isCurrentRoute(token: number): boolean {
    return token === this.routeToken;
  }

  isCurrentOverlay(token: number): boolean {
    return token === this.overlayToken;
  }

  applyRoute(token: number, route: RouteFeature, version: number): boolean {
    if (!this.isCurrentRoute(token)) {
      return false;
    }
    this.commit({ route, banner: null, snapshotVersion: version,
                  routePending: false });
    return true;
  }

  applyProblem(token: number, problem: Problem): boolean {
    if (!this.isCurrentRoute(token)) {
      return false;
    }
    this.commit({
      route: null,
      banner: { code: problem.reason ?? problem.code, detail: problem.detail },
      snapshotVersion: problem.snapshot_version ?? this.state.snapshotVersion,
      routePending: false,
    });
    return true;
  }

  applyOverlay(token: number, overlay: FloodCollection): boolean {
    if (!this.isCurrentOverlay(token)) {
      return false;
    }
    this.commit({ overlay, snapshotVersion: overlay.snapshot_version });
    return true;
  }

  noteVersion(version: number): void {
    this.commit({ snapshotVersion: version });
  }
}
