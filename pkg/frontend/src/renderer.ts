/** Canvas drawing of the most recent service response.
 *
 * No client-side placement logic: rects are drawn exactly as received
 * (the service already returns them in screen space for the requested
 * viewport).  The context is a narrow interface so tests can record calls.
 */

import type { LayoutResponse } from "./api.js";

export interface DrawContext {
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  fillText(text: string, x: number, y: number, maxWidth?: number): void;
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  font: string;
}

export interface DrawnRect {
  left: number;
  top: number;
  right: number;
  bottom: number;
  text: string;
}

export function render(
  ctx: DrawContext,
  layout: LayoutResponse | null,
  width: number,
  height: number,
): DrawnRect[] {
  ctx.clearRect(0, 0, width, height);
  const drawn: DrawnRect[] = [];
  if (layout === null) return drawn;

  ctx.fillStyle = "#3a3a3a";
  for (const p of layout.placements) {
    if (p.x < -2 || p.x > width + 2 || p.y < -2 || p.y > height + 2) continue;
    ctx.fillRect(p.x - 1, p.y - 1, 2, 2);
  }

  for (const p of layout.placements) {
    if (!p.labeled || p.rect === null) continue;
    const [left, top, right, bottom] = p.rect;
    const w = right - left;
    const h = bottom - top;
    ctx.fillStyle = "rgba(255,255,255,0.85)";
    ctx.fillRect(left, top, w, h);
    ctx.strokeStyle = "#1f77b4";
    ctx.strokeRect(left, top, w, h);
    ctx.fillStyle = "#111";
    ctx.font = `${Math.max(1, 0.8 * h)}px monospace`;
    ctx.fillText(p.text, left + 1, bottom - 0.2 * h, Math.max(1, w - 2));
    drawn.push({ left, top, right, bottom, text: p.text });
  }
  return drawn;
}

export function overlayText(layout: LayoutResponse | null): string {
  if (layout === null) return "no layout";
  const s = layout.stats;
  return `${s.labeled}/${s.total} labeled - ${layout.elapsed_ms.toFixed(1)} ms`;
}
