/**
 * Application state and DOM wiring for the labeling session.
 *
 * The server is the single source of truth: every visual change follows a
 * completed round-trip (no optimistic updates), and at most one label POST
 * is in flight at a time — inputs are disabled while it is pending.
 */

import { ApiClient, ApiError, PointsPayload, SessionInfo } from "./api.js";
import { classColor } from "./colormap.js";
import { ColorMode, Ctx2D, emptyState, renderScatter, ViewState } from "./render.js";

export interface AppOptions {
  api?: ApiClient;
  /** Test hook: supply a recording context instead of canvas.getContext. */
  getContext?: (canvas: HTMLCanvasElement) => Ctx2D | null;
  width?: number;
  height?: number;
}

export interface Metrics {
  accuracy: number;
  clusterProportion: number;
  tau: number;
  iteration: number;
}

export class LabelingApp {
  readonly api: ApiClient;
  readonly canvas: HTMLCanvasElement;
  private readonly ctx: Ctx2D | null;
  private readonly width: number;
  private readonly height: number;
  private readonly metricsEl: HTMLElement;
  private readonly bannerEl: HTMLElement;
  private readonly classButtons: HTMLElement;
  private readonly toggleBtn: HTMLButtonElement;

  session: SessionInfo | null = null;
  points: PointsPayload | null = null;
  metrics: Metrics | null = null;
  mode: ColorMode = "scores";
  pending = false;
  frames = 0;

  constructor(private readonly root: HTMLElement, options: AppOptions = {}) {
    this.api = options.api ?? new ApiClient();
    this.width = options.width ?? 760;
    this.height = options.height ?? 640;

    this.root.innerHTML = `
      <div class="banner" id="banner" hidden></div>
      <div class="toolbar">
        <button id="toggle" title="switch point coloring">scores</button>
        <span id="classes" class="classes"></span>
        <span id="metrics" class="metrics">loading…</span>
      </div>
      <canvas id="scatter" width="${this.width}" height="${this.height}"></canvas>
      <div class="hint">digits label the suggested point; t toggles coloring</div>
    `;
    this.canvas = this.root.querySelector("#scatter") as HTMLCanvasElement;
    this.metricsEl = this.root.querySelector("#metrics") as HTMLElement;
    this.bannerEl = this.root.querySelector("#banner") as HTMLElement;
    this.classButtons = this.root.querySelector("#classes") as HTMLElement;
    this.toggleBtn = this.root.querySelector("#toggle") as HTMLButtonElement;

    const getContext = options.getContext
      ?? ((c: HTMLCanvasElement) => c.getContext("2d") as Ctx2D | null);
    this.ctx = getContext(this.canvas);

    this.toggleBtn.addEventListener("click", () => this.toggleMode());
    this.root.ownerDocument.addEventListener("keydown", (ev) => {
      void this.onKey(ev.key);
    });
  }

  async init(): Promise<void> {
    try {
      this.session = await this.api.session();
      await this.refresh();
      this.buildClassButtons();
    } catch (err) {
      this.session = null;
      if (this.ctx) {
        emptyState(this.ctx, this.width, this.height,
                   "no session — is the service running?");
      }
      this.metricsEl.textContent = "unavailable";
      this.showBanner(describe(err));
    }
  }

  /** Pull points + metrics from the server and redraw. */
  async refresh(): Promise<void> {
    this.points = await this.api.points();
    const payload = await this.api.metrics();
    const last = payload.records[payload.records.length - 1];
    if (last) {
      this.metrics = {
        accuracy: last.accuracy,
        clusterProportion: last.cluster_proportion,
        tau: last.tau,
        iteration: last.iteration,
      };
    }
    this.render();
  }

  get suggestion(): number {
    return this.points ? this.points.suggestion : -1;
  }

  viewState(): ViewState | null {
    if (!this.points) return null;
    return { ...this.points, mode: this.mode };
  }

  render(): void {
    const view = this.viewState();
    if (!this.ctx) return;
    if (!view) {
      emptyState(this.ctx, this.width, this.height, "no data");
      return;
    }
    renderScatter(this.ctx, view, this.width, this.height);
    this.frames += 1;
    if (this.metrics) {
      const m = this.metrics;
      this.metricsEl.textContent =
        `iter ${m.iteration} · accuracy ${(100 * m.accuracy).toFixed(1)}% · ` +
        `clusters ${(100 * m.clusterProportion).toFixed(0)}% · ` +
        `tau ${m.tau.toExponential(2)}`;
    }
  }

  toggleMode(): void {
    this.mode = this.mode === "scores" ? "classes" : "scores";
    this.toggleBtn.textContent = this.mode;
    this.render();
  }

  /**
   * POST one label and refetch; rejected labels surface in the banner and
   * leave the rendered state untouched.
   */
  async submitLabel(index: number, cls: number): Promise<boolean> {
    if (this.pending || !this.session) return false;
    this.pending = true;
    this.setInputsDisabled(true);
    try {
      await this.api.label(index, cls);
      this.hideBanner();
      await this.refresh();
      return true;
    } catch (err) {
      this.showBanner(describe(err));
      return false;
    } finally {
      this.pending = false;
      this.setInputsDisabled(false);
    }
  }

  /** Label the currently suggested point. */
  async labelSuggested(cls: number): Promise<boolean> {
    const idx = this.suggestion;
    if (idx < 0) return false;
    return this.submitLabel(idx, cls);
  }

  private async onKey(key: string): Promise<void> {
    if (key === "t") {
      this.toggleMode();
      return;
    }
    if (/^[0-9]$/.test(key) && this.session) {
      const cls = Number(key);
      if (cls < this.session.n_classes) {
        await this.labelSuggested(cls);
      }
    }
  }

  private buildClassButtons(): void {
    if (!this.session) return;
    this.classButtons.innerHTML = "";
    for (let c = 0; c < this.session.n_classes; c++) {
      const btn = this.root.ownerDocument.createElement("button");
      btn.textContent = String(c);
      btn.style.borderBottom = `3px solid ${classColor(c)}`;
      btn.addEventListener("click", () => void this.labelSuggested(c));
      this.classButtons.appendChild(btn);
    }
  }

  private setInputsDisabled(disabled: boolean): void {
    for (const btn of Array.from(this.root.querySelectorAll("button"))) {
      (btn as HTMLButtonElement).disabled = disabled;
    }
  }

  private showBanner(message: string): void {
    this.bannerEl.textContent = message;
    this.bannerEl.hidden = false;
  }

  private hideBanner(): void {
    this.bannerEl.hidden = true;
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return `server said ${err.status}: ${err.message}`;
  return err instanceof Error ? err.message : String(err);
}
