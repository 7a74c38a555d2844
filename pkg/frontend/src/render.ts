/** Canvas scatter renderer: a deterministic frame for a given view state. */

import { classColor, viridis } from "./colormap.js";

/** The 2D-context surface the renderer needs; tests supply a recorder. */
export interface Ctx2D {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  textAlign: CanvasTextAlign;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  closePath(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  fill(): void;
  stroke(): void;
  fillText(text: string, x: number, y: number): void;
}

export type ColorMode = "classes" | "scores";

export interface ViewState {
  x: number[];
  y: number[];
  predicted: number[];
  scores: (number | null)[];
  labeled: number[];
  observed: Record<string, number>;
  suggestion: number;
  mode: ColorMode;
}

const MARGIN = 18;
const BACKGROUND = "#10141a";

interface Transform {
  px(x: number): number;
  py(y: number): number;
}

function fitTransform(view: ViewState, width: number, height: number): Transform {
  let xMin = Infinity, xMax = -Infinity, yMin = Infinity, yMax = -Infinity;
  for (let i = 0; i < view.x.length; i++) {
    const x = view.x[i] as number;
    const y = view.y[i] as number;
    if (x < xMin) xMin = x;
    if (x > xMax) xMax = x;
    if (y < yMin) yMin = y;
    if (y > yMax) yMax = y;
  }
  const xSpan = xMax - xMin || 1;
  const ySpan = yMax - yMin || 1;
  const scale = Math.min((width - 2 * MARGIN) / xSpan, (height - 2 * MARGIN) / ySpan);
  const x0 = (width - scale * xSpan) / 2;
  const y0 = (height - scale * ySpan) / 2;
  return {
    px: (x) => x0 + (x - xMin) * scale,
    // canvas y grows downward
    py: (y) => height - y0 - (y - yMin) * scale,
  };
}

function scoreRange(scores: (number | null)[]): [number, number] {
  let lo = Infinity, hi = -Infinity;
  for (const s of scores) {
    if (s === null) continue;
    if (s < lo) lo = s;
    if (s > hi) hi = s;
  }
  if (!isFinite(lo)) return [0, 1];
  return [lo, hi === lo ? lo + 1 : hi];
}

function drawStar(ctx: Ctx2D, cx: number, cy: number, r: number): void {
  ctx.beginPath();
  for (let k = 0; k < 10; k++) {
    const radius = k % 2 === 0 ? r : r * 0.45;
    const angle = -Math.PI / 2 + (k * Math.PI) / 5;
    const x = cx + radius * Math.cos(angle);
    const y = cy + radius * Math.sin(angle);
    if (k === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  }
  ctx.closePath();
  ctx.fill();
  ctx.stroke();
}

export function emptyState(ctx: Ctx2D, width: number, height: number,
                           message: string): void {
  ctx.fillStyle = BACKGROUND;
  ctx.fillRect(0, 0, width, height);
  ctx.fillStyle = "#8899aa";
  ctx.font = "14px sans-serif";
  ctx.textAlign = "center";
  ctx.fillText(message, width / 2, height / 2);
}

/**
 * Draw the scatter view: points colored by predicted class or by the
 * acquisition colormap (brightest = highest score, i.e. the most desirable
 * query), labeled points as red stars, and the suggested query as a ring.
 */
export function renderScatter(ctx: Ctx2D, view: ViewState,
                              width: number, height: number): void {
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = BACKGROUND;
  ctx.fillRect(0, 0, width, height);

  const t = fitTransform(view, width, height);
  const n = view.x.length;
  const radius = n > 4000 ? 1.6 : n > 1000 ? 2.2 : 3.5;
  const [lo, hi] = scoreRange(view.scores);

  for (let i = 0; i < n; i++) {
    const score = view.scores[i] ?? null;
    if (view.mode === "scores") {
      ctx.fillStyle = score === null ? "#2a3038" : viridis((score - lo) / (hi - lo));
    } else {
      ctx.fillStyle = classColor(view.predicted[i] as number);
    }
    ctx.beginPath();
    ctx.arc(t.px(view.x[i] as number), t.py(view.y[i] as number), radius, 0, 2 * Math.PI);
    ctx.fill();
  }

  ctx.strokeStyle = "#ffffff";
  ctx.lineWidth = 1;
  ctx.fillStyle = "#e03131";
  for (const idx of view.labeled) {
    drawStar(ctx, t.px(view.x[idx] as number), t.py(view.y[idx] as number), 7);
  }

  if (view.suggestion >= 0) {
    const sx = t.px(view.x[view.suggestion] as number);
    const sy = t.py(view.y[view.suggestion] as number);
    ctx.strokeStyle = "#3bc9db";
    ctx.lineWidth = 2.5;
    ctx.beginPath();
    ctx.arc(sx, sy, 11, 0, 2 * Math.PI);
    ctx.stroke();
    ctx.beginPath();
    ctx.arc(sx, sy, 4, 0, 2 * Math.PI);
    ctx.stroke();
  }
}
