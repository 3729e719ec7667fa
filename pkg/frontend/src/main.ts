/** Browser entry point: wires DOM controls to the pure reducer and the
 *  service client. All engine work happens server-side; this file only
 *  shuttles events, images, and meshes. */
import { ApiClient, ServiceError } from "./api.js";
import { frameAt, reduce } from "./reducer.js";
import {
  PointerSample,
  StrokeCapture,
  captureStroke,
  newCapture,
} from "./stroke.js";
import {
  OutboundRequest,
  UiEvent,
  ViewerState,
  initialState,
} from "./types.js";

const SERVICE_URL =
  (window as { SURGIPLAN_URL?: string }).SURGIPLAN_URL ??
  "http://127.0.0.1:8000";

class Viewer {
  private state: ViewerState = initialState();
  private capture: StrokeCapture = newCapture();
  private sliceImg: HTMLImageElement;
  private mipImg: HTMLImageElement;
  private toast: HTMLElement;
  private previewPoints: [number, number, number][] = [];

  constructor(
    private api: ApiClient,
    root: HTMLElement,
  ) {
    this.sliceImg = root.querySelector("#slice") as HTMLImageElement;
    this.mipImg = root.querySelector("#mip") as HTMLImageElement;
    this.toast = root.querySelector("#toast") as HTMLElement;
    this.bind(root);
    window.setInterval(
      () => this.dispatch({ type: "debounce-flush", at: performance.now() }),
      50,
    );
    window.setInterval(() => {
      if (this.state.playback.playing) {
        this.dispatch({ type: "playback-tick", at: performance.now(), ds: 0.02 });
        this.paintPlayback();
      }
    }, 40);
  }

  dispatch(event: UiEvent): void {
    const { state, requests } = reduce(this.state, event);
    this.state = state;
    for (const request of requests) void this.send(request);
  }

  private async send(request: OutboundRequest): Promise<void> {
    try {
      if (request.kind === "slice") {
        const { volumeId } = this.state;
        if (!volumeId) return;
        const blob = await this.api.fetchSlice(
          volumeId,
          request.plane,
          request.index,
          { lo: request.lo, hi: request.hi },
        );
        const { accepted } = reduce(this.state, {
          type: "slice-response",
          at: performance.now(),
          stamp: request.stamp,
        });
        if (accepted) this.sliceImg.src = URL.createObjectURL(blob);
      } else if (request.kind === "render") {
        const { volumeId, sizes } = this.state;
        if (!volumeId || !sizes) return;
        const center: [number, number, number] = [
          (sizes[0] - 1) / 2,
          (sizes[1] - 1) / 2,
          (sizes[2] - 1) / 2,
        ];
        const blob = await this.api.renderMip(
          volumeId,
          center,
          request.orbit,
          { lo: request.lo, hi: request.hi },
          { width: 512, height: 512 },
        );
        const { accepted } = reduce(this.state, {
          type: "render-response",
          at: performance.now(),
          stamp: request.stamp,
        });
        if (accepted) this.mipImg.src = URL.createObjectURL(blob);
      } else {
        const { samples } = await this.api.simulate(
          request.robotId,
          request.trocarId,
          request.targetId,
          request.nSteps,
        );
        this.dispatch({
          type: "trajectory-loaded",
          at: performance.now(),
          samples,
        });
      }
    } catch (err) {
      this.showError(err);
    }
  }

  /** down/move/up from the slice canvas; positions come pre-unprojected. */
  async pointer(sample: PointerSample): Promise<void> {
    if (!this.state.drawMode) return;
    const { capture, actions } = captureStroke(
      this.capture,
      sample,
      this.state.drawColor,
      Date.now() / 1000,
    );
    this.capture = capture;
    for (const action of actions) {
      if (action.action === "append") this.previewPoints.push(action.point);
      try {
        await this.api.stroke(action);
      } catch (err) {
        // server rejected the stroke: drop the optimistic preview
        this.previewPoints = [];
        this.capture = newCapture();
        this.showError(err);
        return;
      }
    }
    if (sample.kind === "up") this.previewPoints = [];
  }

  private paintPlayback(): void {
    const { samples, s } = this.state.playback;
    if (!samples) return;
    const joints = frameAt(samples, s);
    const label = document.querySelector("#playback-state");
    if (label) label.textContent = `s=${s.toFixed(2)} ${JSON.stringify(joints)}`;
  }

  private showError(err: unknown): void {
    this.toast.textContent =
      err instanceof ServiceError ? err.message : String(err);
    this.toast.classList.add("visible");
    window.setTimeout(() => this.toast.classList.remove("visible"), 4000);
  }

  private bind(root: HTMLElement): void {
    const slider = root.querySelector("#slice-index") as HTMLInputElement;
    slider.addEventListener("input", () =>
      this.dispatch({
        type: "slice-slider",
        at: performance.now(),
        index: Number(slider.value),
      }),
    );
    const lo = root.querySelector("#window-lo") as HTMLInputElement;
    const hi = root.querySelector("#window-hi") as HTMLInputElement;
    const windowChanged = () =>
      this.dispatch({
        type: "window-slider",
        at: performance.now(),
        lo: Number(lo.value),
        hi: Number(hi.value),
      });
    lo.addEventListener("input", windowChanged);
    hi.addEventListener("input", windowChanged);
    const upload = root.querySelector("#volume-file") as HTMLInputElement;
    upload.addEventListener("change", async () => {
      const file = upload.files?.[0];
      if (!file) return;
      try {
        const meta = await this.api.uploadVolume(await file.arrayBuffer());
        this.dispatch({
          type: "volume-loaded",
          at: performance.now(),
          volumeId: meta.id,
          sizes: meta.sizes,
        });
        slider.max = String(meta.sizes[2] - 1);
      } catch (err) {
        this.showError(err);
      }
    });
    const draw = root.querySelector("#draw-mode") as HTMLInputElement;
    draw.addEventListener("change", () =>
      this.dispatch({
        type: "draw-toggle",
        at: performance.now(),
        on: draw.checked,
      }),
    );
  }
}

async function boot(): Promise<void> {
  const root = document.querySelector("#app") as HTMLElement;
  const api = await ApiClient.connect(SERVICE_URL);
  new Viewer(api, root);
}

if (typeof document !== "undefined") {
  void boot();
}
