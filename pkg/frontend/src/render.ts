// DOM rendering. Every number shown here is copied from a response field;
// banding, scores, and verdicts are never recomputed client-side.

import type {
  Band,
  PlotDocument,
  QueryResponse,
  RecordDetail,
  VerdictValue,
} from "./types.js";

export const BAND_COLORS: Record<Band, string> = {
  highly_relevant: "#2e8b57",
  moderately_relevant: "#8c8c8c",
  non_relevant: "#c0392b",
};

export const VERDICT_LABELS: Record<VerdictValue, string> = {
  reliable: "reliable",
  failed: "failed: low variance",
  insufficient_data: "insufficient data",
};

const SVG_NS = "http://www.w3.org/2000/svg";

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

export function renderResults(
  container: HTMLElement,
  response: QueryResponse,
  frameUrl: (recordId: string, index: number) => string,
  onInspect: (recordId: string) => void,
): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  for (const result of response.results) {
    const row = el(doc, "div", "result-row");
    row.dataset.record = result.record_id;
    row.dataset.band = result.band;

    if (result.frames.length > 0) {
      const thumb = el(doc, "img", "thumb");
      thumb.src = frameUrl(result.record_id, result.frames[0].index);
      thumb.alt = `frame 0 of ${result.record_id}`;
      row.appendChild(thumb);
    } else {
      row.appendChild(el(doc, "div", "thumb placeholder", "no video"));
    }

    const body = el(doc, "div", "result-body");
    body.appendChild(el(doc, "span", "record-id", result.record_id));

    const bar = el(doc, "div", "score-bar");
    const fill = el(doc, "div", "score-fill");
    const pct = Math.max(0, Math.min(1, result.combined)) * 100;
    fill.style.width = `${pct.toFixed(1)}%`;
    fill.style.backgroundColor = BAND_COLORS[result.band];
    bar.appendChild(fill);
    body.appendChild(bar);

    body.appendChild(
      el(doc, "span", "score-text", result.combined.toFixed(4)),
    );

    const chip = el(doc, "span", "band-chip", result.band.replace(/_/g, " "));
    chip.style.backgroundColor = BAND_COLORS[result.band];
    body.appendChild(chip);

    row.appendChild(body);
    row.addEventListener("click", () => onInspect(result.record_id));
    container.appendChild(row);
  }
}

function metricRow(doc: Document, label: string, value: string): HTMLElement {
  const row = el(doc, "div", "metric");
  row.appendChild(el(doc, "span", "metric-label", label));
  row.appendChild(el(doc, "span", "metric-value", value));
  return row;
}

function curveSvg(
  doc: Document,
  curve: number[],
  box: PlotDocument["box"] | null,
): SVGSVGElement {
  const svg = doc.createElementNS(SVG_NS, "svg") as SVGSVGElement;
  svg.setAttribute("viewBox", "0 0 100 60");
  svg.setAttribute("class", "curve-plot");
  const max = Math.max(...curve, 1e-9);
  const min = Math.min(...curve, 0);
  const span = max - min || 1;
  const x = (i: number) =>
    curve.length > 1 ? (i / (curve.length - 1)) * 100 : 50;
  const y = (d: number) => 55 - ((d - min) / span) * 50;

  if (box) {
    for (const key of ["q1", "median", "q3"] as const) {
      const line = doc.createElementNS(SVG_NS, "line");
      line.setAttribute("x1", "0");
      line.setAttribute("x2", "100");
      line.setAttribute("y1", String(y(box[key])));
      line.setAttribute("y2", String(y(box[key])));
      line.setAttribute("class", `box-line box-${key}`);
      svg.appendChild(line);
    }
  }

  const polyline = doc.createElementNS(SVG_NS, "polyline");
  polyline.setAttribute(
    "points",
    curve.map((d, i) => `${x(i).toFixed(2)},${y(d).toFixed(2)}`).join(" "),
  );
  polyline.setAttribute("class", "curve-line");
  polyline.setAttribute("fill", "none");
  svg.appendChild(polyline);
  return svg;
}

export function renderReliability(
  panel: HTMLElement,
  response: QueryResponse | null,
  plot: PlotDocument | null,
): void {
  const doc = panel.ownerDocument;
  panel.replaceChildren();
  if (!response || !response.curve || response.curve.length === 0) {
    panel.hidden = true;
    return;
  }
  panel.hidden = false;
  const m = response.metrics;

  const badge = el(doc, "span", `verdict-badge verdict-${m.verdict}`,
    VERDICT_LABELS[m.verdict]);
  badge.dataset.verdict = m.verdict;
  panel.appendChild(badge);

  const grid = el(doc, "div", "metric-grid");
  grid.appendChild(metricRow(doc, "LGap", m.largest_gap.toFixed(4)));
  grid.appendChild(metricRow(doc, "RLGap", `${m.relative_gap_pct.toFixed(2)}%`));
  grid.appendChild(metricRow(doc, "Range", m.distance_range.toFixed(4)));
  grid.appendChild(metricRow(doc, "StdDev", m.std_dev.toFixed(4)));
  panel.appendChild(grid);

  panel.appendChild(curveSvg(doc, response.curve, plot ? plot.box : null));
}

export function renderRecordDetail(
  container: HTMLElement,
  detail: RecordDetail,
  frameUrl: (recordId: string, index: number) => string,
): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  container.appendChild(el(doc, "h3", "detail-title", detail.record_id));

  const columns = el(doc, "div", "description-columns");
  for (const source of ["video", "signal"] as const) {
    const column = el(doc, "div", `description ${source}`);
    column.appendChild(el(doc, "h4", undefined, source));
    const entries = detail.descriptions.filter((d) => d.source === source);
    if (entries.length === 0) {
      column.appendChild(el(doc, "p", "missing", `no ${source} description`));
    }
    for (const entry of entries) {
      const label = entry.prompt_id == null ? "" : `prompt ${entry.prompt_id}: `;
      column.appendChild(el(doc, "p", undefined, `${label}${entry.text}`));
    }
    columns.appendChild(column);
  }
  container.appendChild(columns);

  const strip = el(doc, "div", "frame-strip");
  if (detail.frames.length === 0) {
    strip.appendChild(el(doc, "div", "thumb placeholder", "no video"));
  }
  for (const frame of detail.frames.slice(0, 8)) {
    const img = el(doc, "img", "thumb");
    img.src = frameUrl(detail.record_id, frame.index);
    img.alt = `frame ${frame.index} at ${frame.timestamp.toFixed(1)}s`;
    strip.appendChild(img);
  }
  container.appendChild(strip);
}

export function renderBanner(banner: HTMLElement, message: string | null): void {
  if (message === null) {
    banner.hidden = true;
    banner.textContent = "";
  } else {
    banner.hidden = false;
    banner.textContent = message;
  }
}
