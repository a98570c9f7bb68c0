/**
 * Figure rendering. Pure: the SVG is a function of the spec and the CSV
 * text, nothing else. No physics happens here; values are plotted as
 * parsed, the only transformations are axis scaling and color mapping.
 */
import {
  FigureKind,
  HeatmapRow,
  PsiRow,
  Row,
  SweepRow,
  parseTable,
} from "./schema.js";
import { FigureSpec, styleFor } from "./spec.js";
import {
  Scale,
  document,
  errorBar,
  fmt,
  linearScale,
  logScale,
  marker,
  polyline,
  px,
  rampColor,
  tag,
  text,
} from "./svg.js";

export interface RenderResult {
  svg: string;
  /** curves, marker series, or heatmap panels drawn */
  seriesCount: number;
  /** data points or cells actually painted */
  pointCount: number;
  /** rows present in the CSV but masked out (failed or unreliable) */
  maskedCount: number;
}

const HEAT_FLOOR = 1e-4; // color axis clamps to [1e-4, 1] in log10
const HEAT_CEIL = 1.0;

function firstAppearanceOrder(values: string[]): string[] {
  const seen = new Set<string>();
  const out: string[] = [];
  for (const v of values) {
    if (!seen.has(v)) {
      seen.add(v);
      out.push(v);
    }
  }
  return out;
}

function makeScale(kind: "linear" | "log", domain: [number, number], range: [number, number]): Scale {
  return kind === "log" ? logScale(domain, range) : linearScale(domain, range);
}

function axes(
  x: Scale,
  y: Scale,
  box: { left: number; right: number; top: number; bottom: number },
  labels: { x: string; y: string; title: string },
): string {
  let out = "";
  out += tag("line", {
    x1: box.left, y1: box.bottom, x2: box.right, y2: box.bottom,
    stroke: "black", "stroke-width": 1,
  });
  out += tag("line", {
    x1: box.left, y1: box.top, x2: box.left, y2: box.bottom,
    stroke: "black", "stroke-width": 1,
  });
  for (const v of x.ticks()) {
    const tx = x(v);
    out += tag("line", { x1: tx, y1: box.bottom, x2: tx, y2: box.bottom + 5, stroke: "black", "stroke-width": 1 });
    out += text(tx, box.bottom + 18, fmt(v), { "text-anchor": "middle" });
  }
  for (const v of y.ticks()) {
    const ty = y(v);
    out += tag("line", { x1: box.left - 5, y1: ty, x2: box.left, y2: ty, stroke: "black", "stroke-width": 1 });
    out += text(box.left - 8, ty + 4, fmt(v), { "text-anchor": "end" });
  }
  if (labels.x !== "") {
    out += text((box.left + box.right) / 2, box.bottom + 36, labels.x, { "text-anchor": "middle" });
  }
  if (labels.y !== "") {
    const cx = box.left - 42;
    const cy = (box.top + box.bottom) / 2;
    out += text(cx, cy, labels.y, {
      "text-anchor": "middle",
      transform: `rotate(-90 ${px(cx)} ${px(cy)})`,
    });
  }
  if (labels.title !== "") {
    out += text((box.left + box.right) / 2, box.top - 10, labels.title, {
      "text-anchor": "middle", "font-size": 14,
    });
  }
  return out;
}

function sweptField(rows: Array<{ gamma: number; omega_c: number }>): "gamma" | "omega_c" {
  const gammas = new Set(rows.map((r) => r.gamma));
  const omegas = new Set(rows.map((r) => r.omega_c));
  return omegas.size > gammas.size ? "omega_c" : "gamma";
}

function renderSweep(spec: FigureSpec, rows: SweepRow[]): RenderResult {
  const usable = rows.filter((r) => r.sigma_z !== null);
  if (usable.length === 0) {
    throw new Error("sweep CSV has no plottable rows");
  }
  const field = sweptField(usable);
  const methods = firstAppearanceOrder(usable.map((r) => r.method));

  const xs = usable.map((r) => r[field]);
  const los = usable.map((r) => (r.sigma_z as number) - (r.stderr ?? 0));
  const his = usable.map((r) => (r.sigma_z as number) + (r.stderr ?? 0));
  const ySpan = Math.max(...his) - Math.min(...los) || 1;
  const box = { left: 70, right: 700, top: 40, bottom: 440 };
  const x = makeScale(spec.xScale, [Math.min(...xs), Math.max(...xs)], [box.left, box.right]);
  const y = linearScale(
    [Math.min(...los) - 0.05 * ySpan, Math.max(...his) + 0.05 * ySpan],
    [box.bottom, box.top],
  );

  let body = axes(x, y, box, { x: spec.xLabel, y: spec.yLabel, title: spec.title });
  let points = 0;
  for (const method of methods) {
    const style = styleFor(spec, method);
    const series = usable
      .filter((r) => r.method === method)
      .sort((a, b) => a[field] - b[field]);
    const coords: Array<[number, number]> = series.map((r) => [x(r[field]), y(r.sigma_z as number)]);
    points += series.length;

    for (const r of series) {
      if (r.stderr !== null && r.stderr > 0) {
        const cx = x(r[field]);
        body += errorBar(cx, y((r.sigma_z as number) - r.stderr), y((r.sigma_z as number) + r.stderr), style.color);
      }
    }
    if (style.marker === "line" || style.marker === "dashed") {
      body += polyline(coords, {
        stroke: style.color,
        "stroke-width": 2,
        ...(style.marker === "dashed" ? { "stroke-dasharray": "6 4" } : {}),
      });
    } else {
      for (const [cx, cy] of coords) {
        body += marker(style.marker, cx, cy, style.color);
      }
    }
  }

  // legend, one entry per series, in series order
  const lx = box.right - 170;
  let ly = box.top + 14;
  for (const method of methods) {
    const style = styleFor(spec, method);
    if (style.marker === "line" || style.marker === "dashed") {
      body += tag("line", {
        x1: lx, y1: ly - 4, x2: lx + 26, y2: ly - 4,
        stroke: style.color, "stroke-width": 2,
        ...(style.marker === "dashed" ? { "stroke-dasharray": "6 4" } : {}),
      });
    } else {
      body += marker(style.marker, lx + 13, ly - 4, style.color);
    }
    body += text(lx + 32, ly, style.label);
    ly += 18;
  }

  return {
    svg: document(720, 490, body),
    seriesCount: methods.length,
    pointCount: points,
    maskedCount: rows.length - usable.length,
  };
}

function renderPsi(spec: FigureSpec, rows: PsiRow[]): RenderResult {
  const gammas = firstAppearanceOrder(rows.map((r) => String(r.gamma))).map(Number);
  const columns = 2;
  const panelW = 320;
  const panelH = 230;
  const pad = { left: 60, right: 15, top: 35, bottom: 40 };
  const gridRows = Math.ceil(gammas.length / columns);

  let body = "";
  let points = 0;
  gammas.forEach((gamma, index) => {
    const panelRows = rows.filter((r) => r.gamma === gamma);
    const curve = panelRows.filter((r) => !r.flags.includes("root"));
    const roots = panelRows.filter((r) => r.flags.includes("root"));
    const ox = (index % columns) * panelW;
    const oy = Math.floor(index / columns) * panelH;
    const box = {
      left: ox + pad.left,
      right: ox + panelW - pad.right,
      top: oy + pad.top,
      bottom: oy + panelH - pad.bottom,
    };

    const values = curve.map((r) => r.psi);
    const span = Math.max(...values) - Math.min(...values) || 1;
    const x = linearScale([0, 1], [box.left, box.right]);
    const y = linearScale(
      [Math.min(...values) - 0.05 * span, Math.max(...values) + 0.05 * span],
      [box.bottom, box.top],
    );
    body += axes(x, y, box, {
      x: index >= gammas.length - columns ? spec.xLabel : "",
      y: index % columns === 0 ? spec.yLabel : "",
      title: `gamma = ${fmt(gamma)}`,
    });
    if (y.domain[0] < 0 && y.domain[1] > 0) {
      body += tag("line", {
        x1: box.left, y1: y(0), x2: box.right, y2: y(0),
        stroke: "#999999", "stroke-width": 1, "stroke-dasharray": "3 3",
      });
    }
    body += polyline(curve.map((r) => [x(r.B), y(r.psi)]), {
      stroke: "#1f77b4", "stroke-width": 1.8,
    });
    for (const r of roots) {
      if (r.flags.includes("selected")) {
        body += marker("circles", x(r.B), y(r.psi), "black", 5);
      } else {
        body += marker("dots", x(r.B), y(r.psi), "black", 3);
      }
    }
    points += curve.length + roots.length;
  });

  if (spec.title !== "") {
    body += text((columns * panelW) / 2, 16, spec.title, {
      "text-anchor": "middle", "font-size": 14,
    });
  }
  return {
    svg: document(columns * panelW, gridRows * panelH + 20, body),
    seriesCount: gammas.length,
    pointCount: points,
    maskedCount: 0,
  };
}

function renderHeatmap(spec: FigureSpec, rows: HeatmapRow[]): RenderResult {
  const present = firstAppearanceOrder(rows.map((r) => r.method));
  const panels = spec.panels ?? present;
  for (const p of panels) {
    if (!present.includes(p)) {
      throw new Error(`panel method ${JSON.stringify(p)} has no rows in the CSV`);
    }
  }
  const gammas = [...new Set(rows.map((r) => r.gamma))].sort((a, b) => a - b);
  const omegas = [...new Set(rows.map((r) => r.omega_c))].sort((a, b) => a - b);

  const panelW = 300;
  const panelH = 330;
  const pad = { left: 62, right: 12, top: 40, bottom: 50 };
  const barW = 70;

  // cell edges sit midway between grid positions in scale space
  function edges(positions: number[]): number[] {
    const out = [positions[0] - (positions[1] - positions[0]) / 2];
    for (let i = 0; i + 1 < positions.length; i++) {
      out.push((positions[i] + positions[i + 1]) / 2);
    }
    const n = positions.length;
    out.push(positions[n - 1] + (positions[n - 1] - positions[n - 2]) / 2);
    return out;
  }

  const logLo = Math.log10(HEAT_FLOOR);
  const logHi = Math.log10(HEAT_CEIL);
  const colorOf = (rel: number) => {
    const v = Math.log10(Math.max(rel, Number.MIN_VALUE));
    return rampColor((v - logLo) / (logHi - logLo));
  };

  let body = "";
  let points = 0;
  let masked = 0;
  panels.forEach((method, index) => {
    const ox = index * panelW;
    const box = {
      left: ox + pad.left,
      right: ox + panelW - pad.right,
      top: pad.top,
      bottom: panelH - pad.bottom,
    };
    const x = makeScale(spec.xScale, [gammas[0], gammas[gammas.length - 1]], [box.left, box.right]);
    const y = linearScale([omegas[0], omegas[omegas.length - 1]], [box.bottom, box.top]);
    const xe = edges(gammas.map(x));
    const ye = edges(omegas.map(y));

    const byCell = new Map<string, HeatmapRow>();
    for (const r of rows) {
      if (r.method === method) byCell.set(`${r.gamma}|${r.omega_c}`, r);
    }
    gammas.forEach((g, i) => {
      omegas.forEach((w, j) => {
        const row = byCell.get(`${g}|${w}`);
        if (row === undefined) return;
        const rect = {
          x: Math.min(xe[i], xe[i + 1]),
          y: Math.min(ye[j], ye[j + 1]),
          width: Math.abs(xe[i + 1] - xe[i]),
          height: Math.abs(ye[j + 1] - ye[j]),
        };
        if (row.rel_error !== null) {
          body += tag("rect", { ...rect, fill: colorOf(row.rel_error) });
          points += 1;
        } else {
          // unreliable reference or failed method: grey with a hatch line
          body += tag("rect", { ...rect, fill: "#cccccc" });
          body += tag("line", {
            x1: rect.x, y1: rect.y + rect.height, x2: rect.x + rect.width, y2: rect.y,
            stroke: "#888888", "stroke-width": 1,
          });
          masked += 1;
        }
      });
    });

    const label = spec.styles[method]?.label ?? method;
    body += axes(x, y, box, {
      x: spec.xLabel,
      y: index === 0 ? spec.yLabel : "",
      title: label,
    });
  });

  // shared colorbar on the right
  const bx = panels.length * panelW + 6;
  const bTop = pad.top;
  const bBottom = panelH - pad.bottom;
  const strips = 48;
  for (let i = 0; i < strips; i++) {
    const t0 = i / strips;
    const t1 = (i + 1) / strips;
    body += tag("rect", {
      x: bx,
      y: bBottom - t1 * (bBottom - bTop),
      width: 18,
      height: (bBottom - bTop) / strips + 0.5,
      fill: rampColor((t0 + t1) / 2),
    });
  }
  for (let e = logLo; e <= logHi + 1e-9; e++) {
    const t = (e - logLo) / (logHi - logLo);
    const ty = bBottom - t * (bBottom - bTop);
    body += tag("line", { x1: bx + 18, y1: ty, x2: bx + 22, y2: ty, stroke: "black", "stroke-width": 1 });
    body += text(bx + 25, ty + 4, `1e${e}`, { "font-size": 11 });
  }
  body += text(bx + 9, bTop - 8, "rel err", { "text-anchor": "middle", "font-size": 11 });

  if (spec.title !== "") {
    body += text((panels.length * panelW) / 2, 16, spec.title, {
      "text-anchor": "middle", "font-size": 14,
    });
  }
  return {
    svg: document(panels.length * panelW + barW, panelH, body),
    seriesCount: panels.length,
    pointCount: points,
    maskedCount: masked,
  };
}

/** Parse every input against the kind's schema and draw the figure. */
export function render(spec: FigureSpec, csvTexts: string[]): RenderResult {
  const rows: Row[] = csvTexts.flatMap((t) => parseTable(t, spec.kind as FigureKind));
  switch (spec.kind) {
    case "sweep":
      return renderSweep(spec, rows as SweepRow[]);
    case "psi":
      return renderPsi(spec, rows as PsiRow[]);
    case "heatmap":
      return renderHeatmap(spec, rows as HeatmapRow[]);
  }
}
