/** Wire types and fetch wrappers for the layout service. */

export interface DatasetInfo {
  name: string;
  count: number;
  bounds: [number, number, number, number]; // min_x, min_y, max_x, max_y
}

export interface Placement {
  id: number;
  x: number;
  y: number;
  priority: number;
  text: string;
  corner: string | null;
  rect: [number, number, number, number] | null; // left, top, right, bottom
  labeled: boolean;
}

export interface LayoutStats {
  total: number;
  labeled: number;
  unlabeled: number;
  in_view: number;
  margin: number;
  excluded: number;
  predicate_evals: number;
  elapsed_ms: number;
}

export interface LayoutResponse {
  placements: Placement[];
  stats: LayoutStats;
  elapsed_ms: number;
}

export interface ViewportSpec {
  offset_x: number;
  offset_y: number;
  scale: number;
}

export interface LayoutRequest {
  dataset: string;
  viewport: ViewportSpec;
  view: { width: number; height: number };
  label: { width: number; height: number };
}

/** Injection point so tests can drive the controller without a network. */
export interface Api {
  fetchDatasets(): Promise<DatasetInfo[]>;
  fetchLayout(req: LayoutRequest): Promise<LayoutResponse>;
}

export class HttpApi implements Api {
  constructor(private readonly baseUrl: string) {}

  async fetchDatasets(): Promise<DatasetInfo[]> {
    const resp = await fetch(`${this.baseUrl}/datasets`);
    if (!resp.ok) throw new Error(`GET /datasets failed: ${resp.status}`);
    return (await resp.json()) as DatasetInfo[];
  }

  async fetchLayout(req: LayoutRequest): Promise<LayoutResponse> {
    const resp = await fetch(`${this.baseUrl}/layout`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(req),
    });
    if (!resp.ok) throw new Error(`POST /layout failed: ${resp.status}`);
    return (await resp.json()) as LayoutResponse;
  }
}
