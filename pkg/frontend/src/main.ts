/** Browser wiring: canvas, wheel/drag interaction, dataset picker. */

import { HttpApi } from "./api.js";
import { overlayText, render } from "./renderer.js";
import { fitViewport, initialState, LayoutController } from "./view-state.js";

const SERVICE_URL =
  new URLSearchParams(window.location.search).get("service") ?? "http://127.0.0.1:8008";

const canvas = document.getElementById("view") as HTMLCanvasElement;
const picker = document.getElementById("dataset") as HTMLSelectElement;
const banner = document.getElementById("banner") as HTMLDivElement;
const overlay = document.getElementById("overlay") as HTMLDivElement;

canvas.width = canvas.clientWidth;
canvas.height = canvas.clientHeight;

const api = new HttpApi(SERVICE_URL);
const state = initialState(canvas.width, canvas.height);
const ctx = canvas.getContext("2d")!;

const controller = new LayoutController(api, state, (s) => {
  render(ctx, s.layout, canvas.width, canvas.height);
  overlay.textContent = overlayText(s.layout);
  banner.textContent = s.lastError ?? "";
  banner.style.display = s.lastError ? "block" : "none";
});

canvas.addEventListener(
  "wheel",
  (ev) => {
    ev.preventDefault();
    const rect = canvas.getBoundingClientRect();
    controller.wheel(ev.deltaY, ev.clientX - rect.left, ev.clientY - rect.top);
  },
  { passive: false },
);

let dragging = false;
let lastX = 0;
let lastY = 0;
canvas.addEventListener("pointerdown", (ev) => {
  dragging = true;
  lastX = ev.clientX;
  lastY = ev.clientY;
  canvas.setPointerCapture(ev.pointerId);
});
canvas.addEventListener("pointermove", (ev) => {
  if (!dragging) return;
  controller.pan(ev.clientX - lastX, ev.clientY - lastY);
  lastX = ev.clientX;
  lastY = ev.clientY;
});
canvas.addEventListener("pointerup", () => {
  dragging = false;
});

picker.addEventListener("change", () => {
  controller.selectDataset(picker.value);
});

async function start(): Promise<void> {
  try {
    const datasets = await api.fetchDatasets();
    if (datasets.length === 0) {
      banner.textContent = "service has no datasets loaded";
      banner.style.display = "block";
      return;
    }
    for (const ds of datasets) {
      const opt = document.createElement("option");
      opt.value = ds.name;
      opt.textContent = `${ds.name} (${ds.count})`;
      picker.appendChild(opt);
    }
    const first = datasets[0];
    state.viewport = fitViewport(first.bounds, canvas.width, canvas.height);
    controller.selectDataset(first.name);
  } catch (err) {
    banner.textContent = `cannot reach service at ${SERVICE_URL}: ${String(err)}`;
    banner.style.display = "block";
  }
}

void start();
