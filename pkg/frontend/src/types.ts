/** Shared types for the viewer state machine and the service client. */

export type Plane = "axial" | "coronal" | "sagittal";

export type Rgba = [number, number, number, number];

export interface Vec3 {
  x: number;
  y: number;
  z: number;
}

export interface ValueWindow {
  lo: number;
  hi: number;
}

export interface Orbit {
  azimuth: number;
  elevation: number;
  distance: number;
}

export interface TrajectorySample {
  s: number;
  joints: Record<string, number[]>;
  tip: [number, number, number];
  phase: "position" | "insert";
}

export interface ViewerState {
  sessionId: string | null;
  volumeId: string | null;
  /** i, j, k voxel counts of the active volume, from the info endpoint. */
  sizes: [number, number, number] | null;
  plane: Plane;
  sliceIndex: number;
  window: ValueWindow;
  orbit: Orbit;
  drawMode: boolean;
  drawColor: Rgba;
  selectedStructure: string | null;
  selectedRobot: string | null;
  selectedTrocar: string | null;
  playback: {
    s: number;
    playing: boolean;
    samples: TrajectorySample[] | null;
  };
  /** Monotonic stamp source for outbound requests. */
  nextStamp: number;
  /** Stamp of the newest request per view; older responses are stale. */
  newestStamp: { slice: number; render: number };
  /** Debounce bookkeeping per view (timestamps in ms). */
  debounce: {
    slice: { lastEmitAt: number; pending: SliceRequest | null };
    render: { lastEmitAt: number; pending: RenderRequest | null };
  };
}

export const DEBOUNCE_WINDOW_MS = 100;

export interface SliceRequest {
  kind: "slice";
  stamp: number;
  plane: Plane;
  index: number;
  lo: number;
  hi: number;
}

export interface RenderRequest {
  kind: "render";
  stamp: number;
  orbit: Orbit;
  lo: number;
  hi: number;
}

export interface SimulateRequest {
  kind: "simulate";
  robotId: string;
  trocarId: string;
  targetId: string;
  nSteps: number;
}

export type OutboundRequest = SliceRequest | RenderRequest | SimulateRequest;

export type UiEvent =
  | { type: "slice-slider"; at: number; index: number }
  | { type: "window-slider"; at: number; lo: number; hi: number }
  | { type: "plane-button"; at: number; plane: Plane }
  | { type: "orbit-drag"; at: number; azimuth: number; elevation: number; distance: number }
  | { type: "debounce-flush"; at: number }
  | { type: "volume-loaded"; at: number; volumeId: string; sizes: [number, number, number] }
  | { type: "draw-toggle"; at: number; on: boolean }
  | { type: "select"; at: number; structure?: string; robot?: string; trocar?: string }
  | { type: "slice-response"; at: number; stamp: number }
  | { type: "render-response"; at: number; stamp: number }
  | { type: "trajectory-loaded"; at: number; samples: TrajectorySample[] }
  | { type: "playback-tick"; at: number; ds: number };

export interface ReduceResult {
  state: ViewerState;
  /** Requests to send, in order. Responses that should be applied to the
   *  screen keep `accepted: true`; stale ones are dropped. */
  requests: OutboundRequest[];
  /** True when a response event carried the newest stamp and should paint. */
  accepted?: boolean;
}

export function initialState(): ViewerState {
  return {
    sessionId: null,
    volumeId: null,
    sizes: null,
    plane: "axial",
    sliceIndex: 0,
    window: { lo: 0, hi: 1 },
    orbit: { azimuth: 0, elevation: 0.5, distance: 600 },
    drawMode: false,
    drawColor: [1, 0, 0, 1],
    selectedStructure: null,
    selectedRobot: null,
    selectedTrocar: null,
    playback: { s: 0, playing: false, samples: null },
    nextStamp: 1,
    newestStamp: { slice: 0, render: 0 },
    debounce: {
      slice: { lastEmitAt: -Infinity, pending: null },
      render: { lastEmitAt: -Infinity, pending: null },
    },
  };
}
