/** Thin typed client for the planning service HTTP routes. */
import { Orbit, Plane, TrajectorySample, ValueWindow } from "./types.js";
import { StrokeAction } from "./stroke.js";

export interface VolumeMeta {
  id: string;
  sizes: [number, number, number];
  value_range: [number, number];
}

export interface SceneSummary {
  volume_id: string | null;
  structures: string[];
  robots: string[];
  trocars: string[];
  targets: string[];
  strokes: string[];
}

export interface FeasibilityReport {
  feasible: boolean;
  robot_id: string;
  joints: number[] | null;
  rcm_residual: number | null;
  limit_violations: { joint: string; amount: number }[];
  collision_pairs: { a: string; b: string; clearance: number }[];
  reason: string;
}

export class ServiceError extends Error {
  constructor(
    public status: number,
    public errorName: string,
    detail: string,
  ) {
    super(`${errorName}: ${detail}`);
  }
}

async function fail(response: Response): Promise<never> {
  let name = "HttpError";
  let detail = response.statusText;
  try {
    const body = await response.json();
    name = body.error ?? name;
    detail = body.detail ?? detail;
  } catch {
    /* non-JSON error body */
  }
  throw new ServiceError(response.status, name, detail);
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private sessionId: string,
  ) {}

  static async connect(baseUrl: string): Promise<ApiClient> {
    const r = await fetch(`${baseUrl}/sessions`, { method: "POST" });
    if (!r.ok) await fail(r);
    const { id } = await r.json();
    return new ApiClient(baseUrl, id);
  }

  private url(path: string): string {
    return `${this.baseUrl}/sessions/${this.sessionId}${path}`;
  }

  async uploadVolume(data: Uint8Array | ArrayBuffer): Promise<VolumeMeta> {
    const r = await fetch(this.url("/volumes"), {
      method: "POST",
      body: data as BodyInit,
    });
    if (!r.ok) await fail(r);
    return r.json();
  }

  sliceUrl(volumeId: string, plane: Plane, index: number, w: ValueWindow): string {
    return this.url(
      `/volumes/${volumeId}/slice?plane=${plane}&index=${index}` +
        `&lo=${w.lo}&hi=${w.hi}`,
    );
  }

  async fetchSlice(
    volumeId: string,
    plane: Plane,
    index: number,
    w: ValueWindow,
  ): Promise<Blob> {
    const r = await fetch(this.sliceUrl(volumeId, plane, index, w));
    if (!r.ok) await fail(r);
    return r.blob();
  }

  async renderMip(
    volumeId: string,
    center: [number, number, number],
    orbit: Orbit,
    w: ValueWindow,
    size: { width: number; height: number },
  ): Promise<Blob> {
    const ca = Math.cos(orbit.azimuth);
    const sa = Math.sin(orbit.azimuth);
    const ce = Math.cos(orbit.elevation);
    const se = Math.sin(orbit.elevation);
    const eye: [number, number, number] = [
      center[0] + orbit.distance * ce * ca,
      center[1] + orbit.distance * ce * sa,
      center[2] + orbit.distance * se,
    ];
    const r = await fetch(this.url("/render/mip"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({
        volume_id: volumeId,
        camera: {
          kind: "orthographic",
          eye,
          look_at: center,
          up: [0, 0, 1],
          width: size.width,
          height: size.height,
          ortho_width: orbit.distance,
        },
        window: { lo: w.lo, hi: w.hi },
      }),
    });
    if (!r.ok) await fail(r);
    return r.blob();
  }

  async getScene(): Promise<unknown> {
    const r = await fetch(this.url("/scene"));
    if (!r.ok) await fail(r);
    return r.json();
  }

  async putScene(document: unknown): Promise<SceneSummary> {
    const r = await fetch(this.url("/scene"), {
      method: "PUT",
      body: JSON.stringify(document),
    });
    if (!r.ok) await fail(r);
    return r.json();
  }

  async stroke(action: StrokeAction): Promise<SceneSummary> {
    const r = await fetch(this.url("/scene/strokes"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(action),
    });
    if (!r.ok) await fail(r);
    return r.json();
  }

  async planReach(
    robotId: string,
    trocarId: string,
    targetId: string,
  ): Promise<FeasibilityReport> {
    const r = await fetch(this.url("/plan/reach"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({
        robot_id: robotId,
        trocar_id: trocarId,
        target_id: targetId,
      }),
    });
    if (!r.ok) await fail(r);
    return r.json();
  }

  async simulate(
    robotId: string,
    trocarId: string,
    targetId: string,
    nSteps: number,
  ): Promise<{ samples: TrajectorySample[] }> {
    const r = await fetch(this.url("/simulate"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({
        robot_id: robotId,
        trocar_id: trocarId,
        target_id: targetId,
        n_steps: nSteps,
      }),
    });
    if (!r.ok) await fail(r);
    return r.json();
  }
}
