import { describe, expect, it } from "vitest";

import { frameAt, reduce, sliceExtent } from "../src/reducer.js";
import { captureStroke, newCapture } from "../src/stroke.js";
import {
  TrajectorySample,
  UiEvent,
  ViewerState,
  initialState,
} from "../src/types.js";

function loadedState(): ViewerState {
  const { state } = reduce(initialState(), {
    type: "volume-loaded",
    at: 0,
    volumeId: "vol-1",
    sizes: [12, 10, 8],
  });
  return state;
}

function run(state: ViewerState, events: UiEvent[]) {
  const requests = [];
  for (const event of events) {
    const result = reduce(state, event);
    state = result.state;
    requests.push(...result.requests);
  }
  return { state, requests };
}

describe("reduce purity", () => {
  it("same input yields the same output and never mutates", () => {
    const state = loadedState();
    const frozen = JSON.stringify(state);
    const event: UiEvent = { type: "slice-slider", at: 500, index: 3 };
    const a = reduce(state, event);
    const b = reduce(state, event);
    expect(JSON.stringify(a)).toBe(JSON.stringify(b));
    expect(JSON.stringify(state)).toBe(frozen);
  });
});

describe("debounce", () => {
  it("three slider events inside one window emit exactly one request", () => {
    const { requests } = run(loadedState(), [
      { type: "slice-slider", at: 1000, index: 1 },
      { type: "slice-slider", at: 1030, index: 2 },
      { type: "slice-slider", at: 1060, index: 3 },
    ]);
    expect(requests).toHaveLength(1);
    expect(requests[0].kind).toBe("slice");
  });

  it("a flush after the window sends the coalesced newest values", () => {
    const { requests } = run(loadedState(), [
      { type: "slice-slider", at: 1000, index: 1 },
      { type: "slice-slider", at: 1030, index: 2 },
      { type: "slice-slider", at: 1060, index: 3 },
      { type: "debounce-flush", at: 1150 },
    ]);
    expect(requests).toHaveLength(2);
    expect(requests[1]).toMatchObject({ kind: "slice", index: 3 });
    expect(requests[1].stamp).toBeGreaterThan(requests[0].stamp!);
  });

  it("events in separate windows each emit", () => {
    const { requests } = run(loadedState(), [
      { type: "slice-slider", at: 1000, index: 1 },
      { type: "slice-slider", at: 1200, index: 2 },
      { type: "slice-slider", at: 1400, index: 3 },
    ]);
    expect(requests).toHaveLength(3);
  });

  it("window slider updates state and queues one slice request", () => {
    const { state, requests } = run(loadedState(), [
      { type: "window-slider", at: 1000, lo: 100, hi: 300 },
    ]);
    expect(state.window).toEqual({ lo: 100, hi: 300 });
    expect(requests).toHaveLength(1);
    expect(requests[0]).toMatchObject({ kind: "slice", lo: 100, hi: 300 });
  });

  it("orbit drags debounce on the render view independently", () => {
    const { requests } = run(loadedState(), [
      { type: "orbit-drag", at: 1000, azimuth: 0.1, elevation: 0.5, distance: 600 },
      { type: "orbit-drag", at: 1020, azimuth: 0.2, elevation: 0.5, distance: 600 },
      { type: "slice-slider", at: 1040, index: 2 },
    ]);
    expect(requests.map((r) => r.kind)).toEqual(["render", "slice"]);
  });
});

describe("local precondition checks", () => {
  it("rejects out-of-range slice indices without a request", () => {
    const state = loadedState();
    expect(sliceExtent(state)).toBe(8); // axial extent = nz
    const result = reduce(state, { type: "slice-slider", at: 1000, index: 8 });
    expect(result.requests).toHaveLength(0);
    expect(result.state.sliceIndex).toBe(state.sliceIndex);
  });

  it("rejects windows with hi <= lo", () => {
    const result = reduce(loadedState(), {
      type: "window-slider",
      at: 1000,
      lo: 5,
      hi: 5,
    });
    expect(result.requests).toHaveLength(0);
  });

  it("clamps the slice index when switching planes", () => {
    let { state } = run(loadedState(), [
      { type: "slice-slider", at: 1000, index: 7 },
    ]);
    ({ state } = reduce(state, {
      type: "plane-button",
      at: 2000,
      plane: "sagittal",
    }));
    expect(state.sliceIndex).toBe(7); // sagittal extent is nx = 12
    ({ state } = reduce(state, {
      type: "plane-button",
      at: 3000,
      plane: "coronal",
    }));
    expect(state.sliceIndex).toBeLessThan(10);
  });
});

describe("stale response discard", () => {
  it("accepts only the newest stamp", () => {
    const { state, requests } = run(loadedState(), [
      { type: "slice-slider", at: 1000, index: 1 },
      { type: "slice-slider", at: 1200, index: 2 },
    ]);
    expect(requests).toHaveLength(2);
    const oldStamp = requests[0].stamp!;
    const newStamp = requests[1].stamp!;
    const stale = reduce(state, {
      type: "slice-response",
      at: 1300,
      stamp: oldStamp,
    });
    expect(stale.accepted).toBe(false);
    const fresh = reduce(state, {
      type: "slice-response",
      at: 1300,
      stamp: newStamp,
    });
    expect(fresh.accepted).toBe(true);
  });

  it("slice and render stamps are tracked per view", () => {
    const { state, requests } = run(loadedState(), [
      { type: "slice-slider", at: 1000, index: 1 },
      { type: "orbit-drag", at: 1000, azimuth: 1, elevation: 0.4, distance: 500 },
    ]);
    const sliceStamp = requests.find((r) => r.kind === "slice")!.stamp!;
    const renderStamp = requests.find((r) => r.kind === "render")!.stamp!;
    expect(
      reduce(state, { type: "slice-response", at: 1100, stamp: sliceStamp })
        .accepted,
    ).toBe(true);
    expect(
      reduce(state, { type: "render-response", at: 1100, stamp: renderStamp })
        .accepted,
    ).toBe(true);
  });
});

describe("stroke event mapping", () => {
  const color: [number, number, number, number] = [1, 0, 0, 1];

  it("down, 10 moves spaced 2 mm, up gives 1 begin + 10 append + 1 end", () => {
    let capture = newCapture();
    const actions = [];
    const feed = (sample: Parameters<typeof captureStroke>[1]) => {
      const result = captureStroke(capture, sample, color, 42);
      capture = result.capture;
      actions.push(...result.actions);
    };
    feed({ kind: "down" });
    for (let i = 0; i < 10; i++) {
      feed({ kind: "move", point: [i * 2, 0, 0] });
    }
    feed({ kind: "up" });
    const kinds = actions.map((a) => a.action);
    expect(kinds[0]).toBe("begin");
    expect(kinds.filter((k) => k === "append")).toHaveLength(10);
    expect(kinds[kinds.length - 1]).toBe("end");
    expect(actions).toHaveLength(12);
  });

  it("filters move points closer than the minimum spacing", () => {
    let capture = newCapture();
    let count = 0;
    const feed = (sample: Parameters<typeof captureStroke>[1]) => {
      const result = captureStroke(capture, sample, color, 0);
      capture = result.capture;
      count += result.actions.filter((a) => a.action === "append").length;
    };
    feed({ kind: "down" });
    feed({ kind: "move", point: [0, 0, 0] });
    feed({ kind: "move", point: [0.4, 0, 0] }); // < 1 mm, dropped
    feed({ kind: "move", point: [1.5, 0, 0] });
    expect(count).toBe(2);
  });

  it("down then up with no move still emits begin + end", () => {
    let capture = newCapture();
    const down = captureStroke(capture, { kind: "down" }, color, 0);
    const up = captureStroke(down.capture, { kind: "up" }, color, 0);
    expect(down.actions[0].action).toBe("begin");
    expect(up.actions[0].action).toBe("end");
  });

  it("ignores moves and ups without an open stroke", () => {
    const capture = newCapture();
    expect(
      captureStroke(capture, { kind: "move", point: [0, 0, 0] }, color, 0)
        .actions,
    ).toHaveLength(0);
    expect(captureStroke(capture, { kind: "up" }, color, 0).actions).toHaveLength(
      0,
    );
  });
});

describe("playback", () => {
  const samples: TrajectorySample[] = [
    { s: 0, joints: { arm: [0, 0, 100] }, tip: [0, 0, 0], phase: "position" },
    { s: 0.5, joints: { arm: [1, 50, 0] }, tip: [0, 0, 0], phase: "insert" },
    { s: 1, joints: { arm: [1, 50, 200] }, tip: [0, 0, 0], phase: "insert" },
  ];

  it("stops at s = 1 and shows the final joint state", () => {
    let { state } = reduce(loadedState(), {
      type: "trajectory-loaded",
      at: 0,
      samples,
    });
    expect(state.playback.playing).toBe(true);
    for (let i = 0; i < 60; i++) {
      ({ state } = reduce(state, { type: "playback-tick", at: i, ds: 0.05 }));
    }
    expect(state.playback.s).toBe(1);
    expect(state.playback.playing).toBe(false);
    expect(frameAt(samples, state.playback.s)).toEqual({ arm: [1, 50, 200] });
  });

  it("interpolates joints linearly between bracketing samples", () => {
    const joints = frameAt(samples, 0.25);
    expect(joints.arm[0]).toBeCloseTo(0.5, 12);
    expect(joints.arm[1]).toBeCloseTo(25, 12);
    expect(joints.arm[2]).toBeCloseTo(50, 12);
  });

  it("clamps outside the sampled range", () => {
    expect(frameAt(samples, -1)).toEqual(samples[0].joints);
    expect(frameAt(samples, 2)).toEqual(samples[2].joints);
  });
});
