/** Viewer state and the interaction -> relabel loop.
 *
 * The viewer makes no placement decisions: every displayed rectangle comes
 * verbatim from the most recently accepted service response.  Interactions
 * mutate the viewport and schedule a relabel; at most one layout request is
 * in flight at a time and responses for superseded requests are discarded,
 * so after any burst of events the display settles on the final viewport.
 */

import type { Api, LayoutRequest, LayoutResponse, ViewportSpec } from "./api.js";

export interface ViewState {
  dataset: string | null;
  viewport: ViewportSpec;
  viewWidth: number;
  viewHeight: number;
  labelWidth: number;
  labelHeight: number;
  layout: LayoutResponse | null;
  /** Viewport the accepted layout was computed for. */
  layoutViewport: ViewportSpec | null;
  requestSeq: number;
  acceptedSeq: number;
  pending: boolean;
  lastError: string | null;
}

export function initialState(viewWidth: number, viewHeight: number): ViewState {
  return {
    dataset: null,
    viewport: { offset_x: 0, offset_y: 0, scale: 1 },
    viewWidth,
    viewHeight,
    labelWidth: 150,
    labelHeight: 12,
    layout: null,
    layoutViewport: null,
    requestSeq: 0,
    acceptedSeq: 0,
    pending: false,
    lastError: null,
  };
}

export const ZOOM_STEP = 1.25;

/** Scale about the cursor so the world point under it stays put.
 *  screen = (world - offset) * scale, hence world = screen/scale + offset. */
export function wheelZoom(
  vp: ViewportSpec,
  deltaY: number,
  cursorX: number,
  cursorY: number,
  step: number = ZOOM_STEP,
): ViewportSpec {
  const factor = deltaY < 0 ? step : 1 / step;
  const scale = vp.scale * factor;
  const worldX = cursorX / vp.scale + vp.offset_x;
  const worldY = cursorY / vp.scale + vp.offset_y;
  return {
    offset_x: worldX - cursorX / scale,
    offset_y: worldY - cursorY / scale,
    scale,
  };
}

/** Shift the viewport by a screen-space drag vector. */
export function panBy(vp: ViewportSpec, dx: number, dy: number): ViewportSpec {
  if (dx === 0 && dy === 0) return vp;
  return {
    offset_x: vp.offset_x - dx / vp.scale,
    offset_y: vp.offset_y - dy / vp.scale,
    scale: vp.scale,
  };
}

/** Center the viewport on a dataset's bounds at a fit-to-view scale. */
export function fitViewport(
  bounds: [number, number, number, number],
  viewWidth: number,
  viewHeight: number,
): ViewportSpec {
  const [minX, minY, maxX, maxY] = bounds;
  const w = Math.max(maxX - minX, 1e-9);
  const h = Math.max(maxY - minY, 1e-9);
  const scale = 0.9 * Math.min(viewWidth / w, viewHeight / h);
  return {
    offset_x: minX - (viewWidth / scale - w) / 2,
    offset_y: minY - (viewHeight / scale - h) / 2,
    scale,
  };
}

export function layoutRequest(state: ViewState): LayoutRequest {
  if (state.dataset === null) throw new Error("no dataset selected");
  return {
    dataset: state.dataset,
    viewport: { ...state.viewport },
    view: { width: state.viewWidth, height: state.viewHeight },
    label: { width: state.labelWidth, height: state.labelHeight },
  };
}

function sameViewport(a: ViewportSpec | null, b: ViewportSpec): boolean {
  return a !== null && a.offset_x === b.offset_x && a.offset_y === b.offset_y && a.scale === b.scale;
}

/** Drives the fetch loop: debounced, one request in flight, latest wins. */
export class LayoutController {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private inflight = false;
  private queued = false;

  constructor(
    private readonly api: Api,
    readonly state: ViewState,
    private readonly onChange: (state: ViewState) => void = () => {},
    private readonly debounceMs: number = 50,
  ) {}

  /** Apply a wheel event at a canvas position and schedule a relabel. */
  wheel(deltaY: number, cursorX: number, cursorY: number): void {
    this.state.viewport = wheelZoom(this.state.viewport, deltaY, cursorX, cursorY);
    this.schedule();
  }

  /** Apply a drag vector; a zero drag issues no request. */
  pan(dx: number, dy: number): void {
    const next = panBy(this.state.viewport, dx, dy);
    if (next === this.state.viewport) return;
    this.state.viewport = next;
    this.schedule();
  }

  selectDataset(name: string): void {
    this.state.dataset = name;
    this.refresh();
  }

  /** Request a layout for the current viewport, bypassing the debounce. */
  refresh(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    void this.issue();
  }

  schedule(): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.issue();
    }, this.debounceMs);
  }

  /** Resolves when no request is in flight or queued (test helper). */
  async settle(): Promise<void> {
    while (this.timer !== null || this.inflight || this.queued) {
      await new Promise((resolve) => setTimeout(resolve, 5));
    }
  }

  private async issue(): Promise<void> {
    const state = this.state;
    if (state.dataset === null) return;
    if (this.inflight) {
      this.queued = true;
      return;
    }
    // Skip if the displayed layout is already for this exact viewport.
    if (!state.pending && sameViewport(state.layoutViewport, state.viewport)) return;

    this.inflight = true;
    state.pending = true;
    const seq = ++state.requestSeq;
    const requested = { ...state.viewport };
    try {
      const layout = await this.api.fetchLayout(layoutRequest(state));
      if (seq > state.acceptedSeq) {
        state.acceptedSeq = seq;
        state.layout = layout;
        state.layoutViewport = requested;
        state.lastError = null;
      }
    } catch (err) {
      // keep the previous layout on failure; surface the error
      state.lastError = err instanceof Error ? err.message : String(err);
    } finally {
      this.inflight = false;
      state.pending = this.queued;
      this.onChange(state);
      if (this.queued) {
        this.queued = false;
        void this.issue();
      } else {
        state.pending = false;
      }
    }
  }
}
