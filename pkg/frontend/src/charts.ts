import type { SolveSummary } from "./types.js";

/** Deterministic SVG renderers.
 *
 * Every chart shares the same horizontal geometry so the x-axes line up
 * with the schedule grid above them.  Coordinates are rounded to fixed
 * precision, so a given payload always renders to the identical string;
 * displayed values (labels, badges) are the payload numbers verbatim via
 * String(), never reformatted or recomputed.
 */

export const PLOT_LEFT = 60;
export const PLOT_WIDTH = 890;
export const CHART_HEIGHT = 120;

const SVG_OPEN = `<svg xmlns="http://www.w3.org/2000/svg" width="${PLOT_LEFT + PLOT_WIDTH + 10}"`;

function xPositions(count: number): number[] {
  const xs: number[] = [];
  for (let i = 0; i < count; i++) {
    xs.push(PLOT_LEFT + (PLOT_WIDTH * (i + 0.5)) / count);
  }
  return xs;
}

function scaleY(values: number[], height: number): (v: number) => number {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (!(hi > lo)) {
    hi = lo + 1;
    lo = lo - 1;
  }
  const pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  return (v) => height - ((v - lo) / (hi - lo)) * height;
}

function fmt(x: number): string {
  return x.toFixed(2);
}

export interface LineChartOptions {
  title: string;
  values: number[];
  color?: string;
  stale?: boolean;
}

export function renderLineChart(options: LineChartOptions): string {
  const { title, values } = options;
  const color = options.color ?? "#0b6e99";
  const xs = xPositions(values.length);
  const toY = scaleY(values, CHART_HEIGHT - 24);
  const points = values
    .map((v, i) => `${fmt(xs[i]!)},${fmt(12 + toY(v))}`)
    .join(" ");
  const cls = options.stale ? ' class="stale"' : "";
  const first = values[0];
  const last = values[values.length - 1];
  return (
    `${SVG_OPEN} height="${CHART_HEIGHT}"${cls} data-chart="${title}">` +
    `<text x="4" y="14" font-size="11">${title}</text>` +
    `<text x="4" y="28" font-size="9" fill="#666">${String(first)} .. ${String(last)}</text>` +
    `<polyline fill="none" stroke="${color}" stroke-width="1.2" points="${points}"/>` +
    `</svg>`
  );
}

export interface BarChartOptions {
  title: string;
  values: number[];
  highlight?: boolean[];
  stale?: boolean;
}

export function renderBarChart(options: BarChartOptions): string {
  const { title, values } = options;
  const xs = xPositions(values.length);
  const barWidth = PLOT_WIDTH / values.length;
  const peak = Math.max(1, ...values);
  const bars = values
    .map((v, i) => {
      const h = ((CHART_HEIGHT - 24) * v) / peak;
      const color = options.highlight?.[i] ? "#d97706" : "#64748b";
      return (
        `<rect x="${fmt(xs[i]! - barWidth / 2)}" y="${fmt(CHART_HEIGHT - 4 - h)}"` +
        ` width="${fmt(Math.max(barWidth - 0.4, 0.4))}" height="${fmt(h)}" fill="${color}"/>`
      );
    })
    .join("");
  const cls = options.stale ? ' class="stale"' : "";
  return (
    `${SVG_OPEN} height="${CHART_HEIGHT}"${cls} data-chart="${title}">` +
    `<text x="4" y="14" font-size="11">${title} (peak ${String(peak)})</text>` +
    bars +
    `</svg>`
  );
}

export interface ScheduleGridOptions {
  servers: number[];
  loads: number[];
  editedRange?: [number, number] | null;
}

export function renderScheduleGrid(options: ScheduleGridOptions): string {
  const { servers, loads } = options;
  const xs = xPositions(servers.length);
  const cellWidth = PLOT_WIDTH / servers.length;
  const peak = Math.max(...servers) * 1.15;
  const height = 90;
  const cells = servers
    .map((s, i) => {
      const h = ((height - 24) * s) / peak;
      const inEdit =
        options.editedRange != null &&
        i >= options.editedRange[0] &&
        i <= options.editedRange[1];
      const color = inEdit ? "#16a34a" : "#94a3b8";
      return (
        `<rect x="${fmt(xs[i]! - cellWidth / 2)}" y="${fmt(height - 4 - h)}"` +
        ` width="${fmt(Math.max(cellWidth - 0.3, 0.3))}" height="${fmt(h)}" fill="${color}">` +
        `<title>period ${i}: ${String(s)} servers, load ${String(loads[i])}</title></rect>`
      );
    })
    .join("");
  const toY = scaleY(loads.concat([0, 1.05]), height - 24);
  const overlay = loads
    .map((v, i) => `${fmt(xs[i]!)},${fmt(12 + toY(v))}`)
    .join(" ");
  return (
    `${SVG_OPEN} height="${height}" data-chart="schedule">` +
    `<text x="4" y="14" font-size="11">servers and load</text>` +
    cells +
    `<polyline fill="none" stroke="#dc2626" stroke-width="1.1" points="${overlay}"/>` +
    `</svg>`
  );
}

export function renderSummaryBadges(summary: SolveSummary): string {
  const badge = (label: string, value: string, warn = false) =>
    `<span class="badge${warn ? " warn" : ""}"><b>${label}</b> ${value}</span>`;
  return [
    badge("max error bound", String(summary.max_eps_accum)),
    badge("detection threshold", String(summary.delta)),
    badge("total MVM", String(summary.total_mvm)),
    badge("detection steps", String(summary.ssd_steps)),
    badge("max tail", String(summary.max_p_tail), summary.capacity_flag),
    badge("capacity", summary.capacity_flag ? "check n" : "ok", summary.capacity_flag),
  ].join("");
}
