/** Pure viewer state machine.
 *
 * `reduce` never mutates its input and never talks to the network; it
 * returns the next state plus the requests the caller should send.
 * Slider and orbit changes are debounced: at most one outbound request
 * per view per 100 ms window, with the newest values winning. Responses
 * carry the stamp of their request; anything older than the newest stamp
 * for that view is reported as not accepted (stale) and must not paint.
 */
import {
  DEBOUNCE_WINDOW_MS,
  OutboundRequest,
  Plane,
  ReduceResult,
  RenderRequest,
  SliceRequest,
  TrajectorySample,
  UiEvent,
  ViewerState,
} from "./types.js";

export function sliceExtent(state: ViewerState, plane?: Plane): number {
  if (!state.sizes) return 0;
  const [nx, ny, nz] = state.sizes;
  switch (plane ?? state.plane) {
    case "axial":
      return nz;
    case "coronal":
      return ny;
    case "sagittal":
      return nx;
  }
}

function clone(state: ViewerState): ViewerState {
  return {
    ...state,
    window: { ...state.window },
    orbit: { ...state.orbit },
    playback: { ...state.playback },
    newestStamp: { ...state.newestStamp },
    debounce: {
      slice: { ...state.debounce.slice },
      render: { ...state.debounce.render },
    },
  };
}

function sliceRequestBody(state: ViewerState): Omit<SliceRequest, "stamp"> {
  return {
    kind: "slice",
    plane: state.plane,
    index: state.sliceIndex,
    lo: state.window.lo,
    hi: state.window.hi,
  };
}

function renderRequestBody(state: ViewerState): Omit<RenderRequest, "stamp"> {
  return {
    kind: "render",
    orbit: { ...state.orbit },
    lo: state.window.lo,
    hi: state.window.hi,
  };
}

/** Emit now if the debounce window elapsed, otherwise coalesce as pending. */
function debounced(
  state: ViewerState,
  view: "slice" | "render",
  at: number,
  requests: OutboundRequest[],
): void {
  const body =
    view === "slice" ? sliceRequestBody(state) : renderRequestBody(state);
  const d = state.debounce[view];
  if (at - d.lastEmitAt >= DEBOUNCE_WINDOW_MS) {
    const stamp = state.nextStamp++;
    state.newestStamp[view] = stamp;
    state.debounce[view] = { lastEmitAt: at, pending: null };
    requests.push({ ...body, stamp } as OutboundRequest);
  } else {
    state.debounce[view] = {
      lastEmitAt: d.lastEmitAt,
      pending: { ...body, stamp: 0 } as SliceRequest & RenderRequest,
    };
  }
}

function flush(
  state: ViewerState,
  view: "slice" | "render",
  at: number,
  requests: OutboundRequest[],
): void {
  const d = state.debounce[view];
  if (d.pending && at - d.lastEmitAt >= DEBOUNCE_WINDOW_MS) {
    const stamp = state.nextStamp++;
    state.newestStamp[view] = stamp;
    requests.push({ ...d.pending, stamp });
    state.debounce[view] = { lastEmitAt: at, pending: null };
  }
}

export function reduce(prev: ViewerState, event: UiEvent): ReduceResult {
  const state = clone(prev);
  const requests: OutboundRequest[] = [];

  switch (event.type) {
    case "volume-loaded": {
      state.volumeId = event.volumeId;
      state.sizes = event.sizes;
      state.sliceIndex = Math.min(
        state.sliceIndex,
        Math.max(sliceExtent(state) - 1, 0),
      );
      debounced(state, "slice", event.at, requests);
      break;
    }
    case "slice-slider": {
      const extent = sliceExtent(state);
      const index = Math.round(event.index);
      if (extent === 0 || index < 0 || index >= extent) {
        console.warn(`ignored out-of-range slice index ${event.index}`);
        return { state: prev, requests: [] };
      }
      state.sliceIndex = index;
      debounced(state, "slice", event.at, requests);
      break;
    }
    case "window-slider": {
      if (!(event.hi > event.lo)) {
        console.warn(`ignored invalid window [${event.lo}, ${event.hi}]`);
        return { state: prev, requests: [] };
      }
      state.window = { lo: event.lo, hi: event.hi };
      debounced(state, "slice", event.at, requests);
      break;
    }
    case "plane-button": {
      state.plane = event.plane;
      state.sliceIndex = Math.min(
        state.sliceIndex,
        Math.max(sliceExtent(state) - 1, 0),
      );
      debounced(state, "slice", event.at, requests);
      break;
    }
    case "orbit-drag": {
      state.orbit = {
        azimuth: event.azimuth,
        elevation: event.elevation,
        distance: event.distance,
      };
      debounced(state, "render", event.at, requests);
      break;
    }
    case "debounce-flush": {
      flush(state, "slice", event.at, requests);
      flush(state, "render", event.at, requests);
      break;
    }
    case "draw-toggle": {
      state.drawMode = event.on;
      break;
    }
    case "select": {
      if (event.structure !== undefined) state.selectedStructure = event.structure;
      if (event.robot !== undefined) state.selectedRobot = event.robot;
      if (event.trocar !== undefined) state.selectedTrocar = event.trocar;
      break;
    }
    case "slice-response": {
      const accepted = event.stamp === state.newestStamp.slice;
      return { state, requests: [], accepted };
    }
    case "render-response": {
      const accepted = event.stamp === state.newestStamp.render;
      return { state, requests: [], accepted };
    }
    case "trajectory-loaded": {
      state.playback = { s: 0, playing: true, samples: event.samples };
      break;
    }
    case "playback-tick": {
      if (!state.playback.playing || !state.playback.samples) break;
      const s = Math.min(1, state.playback.s + event.ds);
      state.playback = {
        ...state.playback,
        s,
        playing: s < 1,
      };
      break;
    }
    default: {
      console.warn("ignored unknown event", event);
      return { state: prev, requests: [] };
    }
  }
  return { state, requests };
}

/** Joint states shown at playback position s: linear interpolation between
 *  the two bracketing trajectory samples, matching the engine's rule. */
export function frameAt(
  samples: TrajectorySample[],
  s: number,
): Record<string, number[]> {
  if (samples.length === 0) return {};
  if (s <= samples[0].s) return samples[0].joints;
  const last = samples[samples.length - 1];
  if (s >= last.s) return last.joints;
  let hi = 1;
  while (samples[hi].s < s) hi++;
  const a = samples[hi - 1];
  const b = samples[hi];
  const u = (s - a.s) / (b.s - a.s);
  const out: Record<string, number[]> = {};
  for (const rid of Object.keys(a.joints)) {
    out[rid] = a.joints[rid].map(
      (q0, i) => (1 - u) * q0 + u * b.joints[rid][i],
    );
  }
  return out;
}
