/** Maps pointer events (already unprojected to 3D volume-frame mm) to the
 *  stroke actions the service expects: down → begin, move → append,
 *  up → end. Points closer than the minimum spacing to the last kept point
 *  are filtered client-side to cut traffic; the server re-filters
 *  authoritatively with the same rule. */
import { Rgba } from "./types.js";

export const STROKE_MIN_SPACING_MM = 1.0;

export interface PointerSample {
  kind: "down" | "move" | "up";
  point?: [number, number, number];
}

export type StrokeAction =
  | { action: "begin"; color: Rgba; created_at: number }
  | { action: "append"; point: [number, number, number] }
  | { action: "end" };

export interface StrokeCapture {
  open: boolean;
  lastPoint: [number, number, number] | null;
}

export function newCapture(): StrokeCapture {
  return { open: false, lastPoint: null };
}

function distance(
  a: [number, number, number],
  b: [number, number, number],
): number {
  const dx = a[0] - b[0];
  const dy = a[1] - b[1];
  const dz = a[2] - b[2];
  return Math.sqrt(dx * dx + dy * dy + dz * dz);
}

/** One pointer sample in, zero or more stroke actions out. Pure: returns
 *  the next capture state alongside the actions. */
export function captureStroke(
  capture: StrokeCapture,
  sample: PointerSample,
  color: Rgba,
  createdAt: number,
  minSpacing: number = STROKE_MIN_SPACING_MM,
): { capture: StrokeCapture; actions: StrokeAction[] } {
  switch (sample.kind) {
    case "down": {
      if (capture.open) return { capture, actions: [] };
      return {
        capture: { open: true, lastPoint: null },
        actions: [{ action: "begin", color, created_at: createdAt }],
      };
    }
    case "move": {
      if (!capture.open || !sample.point) return { capture, actions: [] };
      if (
        capture.lastPoint &&
        distance(sample.point, capture.lastPoint) < minSpacing
      ) {
        return { capture, actions: [] };
      }
      return {
        capture: { open: true, lastPoint: sample.point },
        actions: [{ action: "append", point: sample.point }],
      };
    }
    case "up": {
      if (!capture.open) return { capture, actions: [] };
      return {
        capture: { open: false, lastPoint: null },
        actions: [{ action: "end" }],
      };
    }
  }
}
