/** DOM rendering. No network and no state here: view model in, elements out. */

import type {
  ActuatorInfo,
  ChartSeries,
  DashboardViewModel,
  Thresholds,
  Tile,
} from "./model.js";
import { truncate } from "./model.js";

export interface Handlers {
  submitSetpoints(values: Record<string, number>): void;
  overrideActuator(name: string, mode: "on" | "off" | "auto"): void;
}

const THRESHOLD_KEYS = [
  "ph_low", "ph_high", "water_low", "water_high", "air_low", "air_high", "humidity_min",
];

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderTile(doc: Document, tile: Tile): HTMLElement {
  const card = el(doc, "div", "tile");
  card.id = `tile-${tile.def.id}`;
  card.append(el(doc, "div", "tile-label", tile.def.label));
  const value = el(doc, "div", "tile-value", tile.display);
  value.dataset["raw"] = tile.raw ?? "";
  card.append(value);
  if (!tile.valid) {
    card.append(el(doc, "span", "badge badge-invalid", "invalid"));
    card.classList.add("tile-invalid");
  }
  if (tile.at !== null) {
    card.append(el(doc, "div", "tile-time", tile.at));
  }
  return card;
}

function chartSvg(doc: Document, series: ChartSeries): SVGElement {
  const W = 320;
  const H = 96;
  const svg = doc.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("viewBox", `0 0 ${W} ${H}`);
  svg.setAttribute("class", "chart");

  const values = series.points.map((p) => p.value);
  const bandEdges = series.band
    ? [series.band.low, series.band.high].filter((v): v is number => v !== null)
    : [];
  const all = values.concat(bandEdges);
  if (all.length === 0) return svg;
  let min = Math.min(...all);
  let max = Math.max(...all);
  if (min === max) {
    min -= 1;
    max += 1;
  }
  const pad = (max - min) * 0.1;
  min -= pad;
  max += pad;
  const y = (v: number) => H - ((v - min) / (max - min)) * H;
  const x = (i: number) =>
    series.points.length > 1 ? (i / (series.points.length - 1)) * W : W / 2;

  if (series.band !== null) {
    const top = series.band.high !== null ? y(series.band.high) : 0;
    const bottom = series.band.low !== null ? y(series.band.low) : H;
    const rect = doc.createElementNS("http://www.w3.org/2000/svg", "rect");
    rect.setAttribute("x", "0");
    rect.setAttribute("y", String(Math.min(top, bottom)));
    rect.setAttribute("width", String(W));
    rect.setAttribute("height", String(Math.abs(bottom - top)));
    rect.setAttribute("class", "ideal-band");
    svg.append(rect);
  }

  const line = doc.createElementNS("http://www.w3.org/2000/svg", "polyline");
  line.setAttribute(
    "points",
    series.points.map((p, i) => `${x(i).toFixed(1)},${y(p.value).toFixed(1)}`).join(" "),
  );
  line.setAttribute("class", "trace");
  svg.append(line);

  // Invalid samples get a marker instead of silently blending in.
  series.points.forEach((p, i) => {
    if (p.valid) return;
    const dot = doc.createElementNS("http://www.w3.org/2000/svg", "circle");
    dot.setAttribute("cx", x(i).toFixed(1));
    dot.setAttribute("cy", y(p.value).toFixed(1));
    dot.setAttribute("r", "3");
    dot.setAttribute("class", "invalid-point");
    svg.append(dot);
  });
  return svg;
}

function renderCharts(doc: Document, charts: ChartSeries[]): HTMLElement {
  const wrap = el(doc, "section", "charts");
  for (const series of charts) {
    const block = el(doc, "div", "chart-block");
    block.id = `chart-${series.def.id}`;
    block.append(el(doc, "h3", undefined, series.def.label));
    block.append(chartSvg(doc, series));
    wrap.append(block);
  }
  return wrap;
}

function renderSetpointsForm(
  doc: Document,
  thresholds: Thresholds,
  handlers: Handlers,
): HTMLElement {
  const section = el(doc, "section", "setpoints");
  section.append(el(doc, "h2", undefined, "Setpoints"));
  const form = el(doc, "form");
  form.id = "setpoints-form";

  for (const key of THRESHOLD_KEYS) {
    const row = el(doc, "label", "setpoint-row");
    row.append(el(doc, "span", undefined, key));
    const input = el(doc, "input");
    input.name = key;
    input.type = "number";
    input.step = "any";
    if (key in thresholds) input.value = String(thresholds[key]);
    row.append(input);
    const error = el(doc, "span", "field-error");
    error.id = `error-${key}`;
    row.append(error);
    form.append(row);
  }

  const submit = el(doc, "button", undefined, "Apply");
  submit.type = "submit";
  form.append(submit);
  const formError = el(doc, "div", "form-error");
  formError.id = "setpoints-error";
  form.append(formError);

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const values: Record<string, number> = {};
    for (const key of THRESHOLD_KEYS) {
      const input = form.querySelector<HTMLInputElement>(`input[name="${key}"]`);
      if (input === null || input.value.trim() === "") continue;
      values[key] = Number(input.value);
    }
    handlers.submitSetpoints(values);
  });

  section.append(form);
  return section;
}

/** Highlight a rejected setpoint with the server's message, in place. */
export function showSetpointError(
  root: ParentNode,
  field: string | null,
  message: string,
): void {
  const target = field !== null ? root.querySelector(`#error-${field}`) : null;
  if (target !== null) {
    target.textContent = message;
    return;
  }
  const general = root.querySelector("#setpoints-error");
  if (general !== null) general.textContent = message;
}

export function clearSetpointErrors(root: ParentNode): void {
  for (const node of root.querySelectorAll(".field-error, .form-error")) {
    node.textContent = "";
  }
}

function renderActuatorRow(
  doc: Document,
  name: string,
  info: ActuatorInfo,
  handlers: Handlers,
): HTMLElement {
  const row = el(doc, "div", "actuator-row");
  row.id = `actuator-${name}`;
  row.append(el(doc, "span", "actuator-name", name));
  row.append(el(doc, "span", `state state-${info.on ? "on" : "off"}`, info.on ? "On" : "Off"));
  if (info.override !== null) {
    row.append(el(doc, "span", "badge badge-manual", "manual"));
  }
  for (const mode of ["on", "off", "auto"] as const) {
    const button = el(doc, "button", "override-btn", mode);
    button.type = "button";
    button.dataset["actuator"] = name;
    button.dataset["mode"] = mode;
    button.addEventListener("click", () => handlers.overrideActuator(name, mode));
    row.append(button);
  }
  return row;
}

function renderAlerts(doc: Document, alerts: DashboardViewModel["alerts"]): HTMLElement {
  const section = el(doc, "section", "alerts");
  section.append(el(doc, "h2", undefined, "Alerts"));
  const list = el(doc, "ul");
  list.id = "alert-feed";
  if (alerts.length === 0) {
    list.append(el(doc, "li", "alert-empty", "none"));
  }
  for (const alert of alerts.slice().reverse()) {
    const item = el(doc, "li", "alert", `${alert.parameter}: ${alert.reason}`);
    if (alert.time) item.title = alert.time;
    list.append(item);
  }
  section.append(list);
  return section;
}

export function renderDashboard(
  root: HTMLElement,
  vm: DashboardViewModel,
  handlers: Handlers,
): void {
  const doc = root.ownerDocument;
  root.textContent = "";

  if (vm.stale !== null) {
    const banner = el(doc, "div", "stale-banner");
    banner.id = "stale-banner";
    banner.textContent = vm.stale.since
      ? `telemetry unreachable; showing data from ${vm.stale.since}`
      : "telemetry unreachable; no data received yet";
    root.append(banner);
  }

  const tiles = el(doc, "section", "tiles");
  tiles.id = "tiles";
  for (const tile of vm.tiles) tiles.append(renderTile(doc, tile));
  root.append(tiles);

  root.append(renderCharts(doc, vm.charts));

  const panel = el(doc, "section", "actuators");
  panel.append(el(doc, "h2", undefined, "Actuators"));
  for (const [name, info] of Object.entries(vm.actuators)) {
    panel.append(renderActuatorRow(doc, name, info, handlers));
  }
  root.append(panel);

  root.append(renderSetpointsForm(doc, vm.thresholds, handlers));
  root.append(renderAlerts(doc, vm.alerts));
}

export { truncate };
