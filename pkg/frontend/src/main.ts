/**
 * DOM wiring. All state lives in UiStore, all drawing goes through the
 * pure builders in render.ts, and every number on screen comes from a
 * service response.
 */

import { ApiClient, type HeuristicName } from "./api.js";
import { DEPTH_BUCKETS } from "./colors.js";
import { DEFAULT_DEBOUNCE_MS, debounce } from "./debounce.js";
import { featureBbox, makeProjector, type Projector } from "./geometry.js";
import { legendHtml, markerSvg, overlaySvg, routeSvg } from "./render.js";
import { UiStore } from "./store.js";

const MAP_W = 720;
const MAP_H = 720;

function element<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (found === null) {
    throw new Error(`missing element #${id}`);
  }
  return found as T;
}

function main(): void {
  const svg = element<HTMLElement>("map");
  const slider = element<HTMLInputElement>("threshold");
  const sliderValue = element<HTMLElement>("threshold-value");
  const heuristicSelect = element<HTMLSelectElement>("heuristic");
  const banner = element<HTMLElement>("banner");
  const stats = element<HTMLElement>("stats");
  const versionBadge = element<HTMLElement>("version");
  const hint = element<HTMLElement>("hint");
  const clearButton = element<HTMLElement>("clear");
  element<HTMLElement>("legend").innerHTML = legendHtml(DEPTH_BUCKETS);

  const api = new ApiClient("");
  const store = new UiStore({ maxDepthM: parseFloat(slider.value) });
  let projector: Projector | null = null;

  function networkBanner(): void {
    banner.textContent = "service unreachable";
    banner.className = "banner banner-error";
    banner.hidden = false;
  }

  async function refreshOverlay(): Promise<void> {
    const token = store.beginOverlay();
    try {
      const result = await api.floodOverlay(store.snapshot.maxDepthM);
      if (!result.ok) {
        store.applyProblem(store.beginRoute(), result.problem);
        return;
      }
      // keep the viewport stable: fit once, on the first non-empty overlay
      if (projector === null) {
        const bbox = featureBbox(result.value.features);
        if (bbox !== null) {
          projector = makeProjector(bbox, MAP_W, MAP_H);
        }
      }
      store.applyOverlay(token, result.value);
    } catch {
      networkBanner();
    }
  }

  async function requestRoute(): Promise<void> {
    const state = store.snapshot;
    if (state.origin === null || state.destination === null) {
      return;
    }
    const token = store.beginRoute();
    try {
      const result = await api.route({
        origin: state.origin,
        destination: state.destination,
        max_depth_m: state.maxDepthM,
        heuristic: state.heuristic,
      });
      if (result.ok) {
        store.applyRoute(token, result.value.route,
                         result.value.snapshot_version);
      } else {
        store.applyProblem(token, result.problem);
      }
    } catch {
      networkBanner();
    }
  }

  const sweep = debounce(() => {
    void refreshOverlay();
    void requestRoute();
  }, DEFAULT_DEBOUNCE_MS);

  slider.addEventListener("input", () => {
    store.setMaxDepth(parseFloat(slider.value));
    sweep();
  });

  heuristicSelect.addEventListener("change", () => {
    store.setHeuristic(heuristicSelect.value as HeuristicName);
    void requestRoute();
  });

  clearButton.addEventListener("click", () => {
    store.clearEndpoints();
  });

  svg.addEventListener("click", (event: MouseEvent) => {
    if (projector === null) {
      return;
    }
    const rect = svg.getBoundingClientRect();
    const px = ((event.clientX - rect.left) / rect.width) * MAP_W;
    const py = ((event.clientY - rect.top) / rect.height) * MAP_H;
    const point = projector.toLatLon(px, py);
    const state = store.snapshot;
    if (state.origin === null || state.destination !== null) {
      store.clearEndpoints();
      store.setOrigin(point);
    } else {
      store.setDestination(point);
      void requestRoute();
    }
  });

  store.subscribe((state) => {
    sliderValue.textContent = `${state.maxDepthM.toFixed(2)} m`;

    if (projector !== null) {
      const layers: string[] = [];
      if (state.overlay !== null) {
        layers.push(overlaySvg(state.overlay, projector));
      }
      if (state.route !== null) {
        layers.push(routeSvg(state.route, projector));
      }
      if (state.origin !== null) {
        layers.push(markerSvg(state.origin, projector, "origin"));
      }
      if (state.destination !== null) {
        layers.push(markerSvg(state.destination, projector, "destination"));
      }
      svg.innerHTML = layers.join("");
    }

    if (state.banner !== null) {
      banner.textContent = `${state.banner.code}: ${state.banner.detail}`;
      banner.className = "banner banner-problem";
      banner.hidden = false;
    } else {
      banner.hidden = true;
    }

    if (state.route !== null) {
      const p = state.route.properties;
      stats.textContent =
        `cost ${p.total_cost.toFixed(3)} | ` +
        `length ${p.path_length_m.toFixed(1)} m | ` +
        `expanded ${p.expanded}`;
    } else if (state.routePending) {
      stats.textContent = "routing..";
    } else {
      stats.textContent = "";
    }

    versionBadge.textContent =
      state.snapshotVersion === null ? "" : `snapshot v${state.snapshotVersion}`;
    hint.hidden = state.origin !== null && state.destination !== null;
    hint.textContent =
      state.origin === null
        ? "click the map to set the origin"
        : state.destination === null
          ? "click again to set the destination"
          : "";
  });

  void (async () => {
    try {
      const health = await api.health();
      if (health.ok) {
        store.noteVersion(health.value.snapshot_version);
      }
      const built = await api.buildMap();
      if (built.ok) {
        store.noteVersion(built.value.snapshot_version);
      } else {
        store.applyProblem(store.beginRoute(), built.problem);
      }
      await refreshOverlay();
    } catch {
      networkBanner();
    }
  })();
}

main();
