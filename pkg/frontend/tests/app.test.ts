import { describe, expect, it } from "vitest";

import type { ApiClient, LabelResult, MetricsPayload, PointsPayload,
              SessionInfo } from "../src/api.js";
import { LabelingApp } from "../src/app.js";
import { RecordingCtx } from "./recorder.js";

/** In-memory stand-in for the service: 4 points, 2 classes, argmax policy. */
class FakeApi {
  labeled = [0];
  observed: Record<string, number> = { "0": 0 };
  labelCalls: { index: number; cls: number }[] = [];
  inFlight = 0;
  maxInFlight = 0;
  private resolveLabel: (() => void) | null = null;

  async session(): Promise<SessionInfo> {
    return {
      id: "default", dataset: "fake", n_points: 4, n_classes: 2,
      n_clusters: 2, acquisition: "norm", policy: "argmax",
      iteration: this.labeled.length - 1, labeled: [...this.labeled],
    };
  }

  async points(): Promise<PointsPayload> {
    const scores = [0, 1, 2, 3].map((i) =>
      this.labeled.includes(i) ? null : -0.1 * (i + 1));
    const suggestion = scores.findIndex((s) => s !== null);
    return {
      x: [0, 1, 2, 3], y: [0, 1, 0, 1], predicted: [0, 1, 0, 1],
      scores, labeled: [...this.labeled], observed: { ...this.observed },
      suggestion,
    };
  }

  async suggest(): Promise<{ index: number | null }> {
    return { index: (await this.points()).suggestion };
  }

  async metrics(): Promise<MetricsPayload> {
    return {
      records: [{
        iteration: this.labeled.length - 1, query_index: -1, class: -1,
        accuracy: 0.5, cluster_proportion: 0.5, tau: 1.0, ms: 0,
      }],
    };
  }

  /** Resolves only when the test calls `release` (holds the POST open). */
  label(index: number, cls: number): Promise<LabelResult> {
    this.inFlight += 1;
    this.maxInFlight = Math.max(this.maxInFlight, this.inFlight);
    this.labelCalls.push({ index, cls });
    return new Promise((resolve) => {
      this.resolveLabel = () => {
        this.inFlight -= 1;
        this.labeled.push(index);
        this.observed[String(index)] = cls;
        resolve({
          ok: true, iteration: this.labeled.length - 1, accuracy: 0.5,
          cluster_proportion: 0.5, tau: 1.0, suggestion: index + 1,
        });
      };
    });
  }

  release(): void {
    this.resolveLabel?.();
    this.resolveLabel = null;
  }
}

function makeApp(api: FakeApi): LabelingApp {
  const root = document.createElement("div");
  document.body.appendChild(root);
  return new LabelingApp(root, {
    api: api as unknown as ApiClient,
    getContext: () => new RecordingCtx(),
  });
}

describe("LabelingApp", () => {
  it("digit keys label the suggested point", async () => {
    const api = new FakeApi();
    const app = makeApp(api);
    await app.init();
    const suggested = app.suggestion;

    const event = new KeyboardEvent("keydown", { key: "1" });
    document.dispatchEvent(event);
    await new Promise((r) => setTimeout(r, 0));
    api.release();
    await new Promise((r) => setTimeout(r, 0));

    expect(api.labelCalls).toEqual([{ index: suggested, cls: 1 }]);
  });

  it("ignores digit keys beyond the class count", async () => {
    const api = new FakeApi();
    const app = makeApp(api);
    await app.init();
    document.dispatchEvent(new KeyboardEvent("keydown", { key: "7" }));
    await new Promise((r) => setTimeout(r, 0));
    expect(api.labelCalls).toHaveLength(0);
    expect(app.pending).toBe(false);
  });

  it("allows only one in-flight label mutation", async () => {
    const api = new FakeApi();
    const app = makeApp(api);
    await app.init();

    const first = app.submitLabel(1, 1);
    const second = app.submitLabel(2, 0);   // must be refused while pending
    expect(await second).toBe(false);
    api.release();
    expect(await first).toBe(true);
    expect(api.maxInFlight).toBe(1);
    expect(api.labelCalls).toHaveLength(1);
  });

  it("toggles the colormap mode", async () => {
    const api = new FakeApi();
    const app = makeApp(api);
    await app.init();
    expect(app.mode).toBe("scores");
    app.toggleMode();
    expect(app.mode).toBe("classes");
  });
});
