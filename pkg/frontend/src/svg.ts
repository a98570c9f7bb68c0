/**
 * Small SVG toolkit: scales, tick generation, and element builders.
 * Everything is a pure function of its arguments so rendered output is
 * reproducible byte for byte.
 */

export interface Scale {
  (value: number): number;
  ticks(): number[];
  domain: [number, number];
}

/** Fixed-precision coordinate format; keeps files small and diffs stable. */
export function px(value: number): string {
  return value.toFixed(2).replace(/\.00$/, "");
}

/** Tick label format: up to 6 significant digits, no trailing zeros. */
export function fmt(value: number): string {
  if (value === 0) return "0";
  const s = value.toPrecision(6);
  return s.includes(".") || s.includes("e")
    ? String(Number(s))
    : s;
}

function niceStep(span: number, target: number): number {
  const raw = span / target;
  const mag = 10 ** Math.floor(Math.log10(raw));
  for (const m of [1, 2, 5, 10]) {
    if (mag * m >= raw) return mag * m;
  }
  return mag * 10;
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const scale = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  scale.domain = domain;
  scale.ticks = () => {
    const step = niceStep(Math.abs(span), 5);
    const first = Math.ceil(Math.min(d0, d1) / step) * step;
    const last = Math.max(d0, d1);
    const out = [];
    // step is a clean decimal; rounding kills 0.30000000000000004 artifacts
    for (let v = first; v <= last + 1e-9 * step; v += step) {
      out.push(Number(v.toPrecision(12)));
    }
    return out;
  };
  return scale;
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  if (d0 <= 0 || d1 <= 0) {
    throw new Error(`log scale needs a positive domain, got [${d0}, ${d1}]`);
  }
  const [l0, l1] = [Math.log10(d0), Math.log10(d1)];
  const inner = linearScale([l0, l1], range);
  const scale = ((v: number) => inner(Math.log10(v))) as Scale;
  scale.domain = domain;
  scale.ticks = () => {
    const out: number[] = [];
    const lo = Math.floor(Math.min(l0, l1));
    const hi = Math.ceil(Math.max(l0, l1));
    const mantissas = hi - lo <= 1 ? [1, 2, 5] : [1];
    for (let e = lo; e <= hi; e++) {
      for (const m of mantissas) {
        const v = m * 10 ** e;
        if (v >= Math.min(d0, d1) * (1 - 1e-12) && v <= Math.max(d0, d1) * (1 + 1e-12)) {
          out.push(v);
        }
      }
    }
    return out;
  };
  return scale;
}

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

export function tag(
  name: string,
  attrs: Record<string, string | number>,
  content?: string,
): string {
  const a = Object.entries(attrs)
    .map(([k, v]) => ` ${k}="${typeof v === "number" ? px(v) : v}"`)
    .join("");
  return content === undefined ? `<${name}${a}/>` : `<${name}${a}>${content}</${name}>`;
}

export function text(
  x: number,
  y: number,
  value: string,
  attrs: Record<string, string | number> = {},
): string {
  return tag("text", { x, y, "font-size": 12, "font-family": "sans-serif", ...attrs }, esc(value));
}

export function polyline(points: Array<[number, number]>, attrs: Record<string, string | number>): string {
  const p = points.map(([x, y]) => `${px(x)},${px(y)}`).join(" ");
  return tag("polyline", { points: p, fill: "none", ...attrs });
}

/** Point marker in the style vocabulary of the figure specs. */
export function marker(
  kind: string,
  x: number,
  y: number,
  color: string,
  size = 3.5,
): string {
  switch (kind) {
    case "dots":
      return tag("circle", { cx: x, cy: y, r: size, fill: color });
    case "circles":
      return tag("circle", {
        cx: x, cy: y, r: size, fill: "none", stroke: color, "stroke-width": 1.4,
      });
    case "crosses":
      return (
        tag("line", {
          x1: x - size, y1: y - size, x2: x + size, y2: y + size,
          stroke: color, "stroke-width": 1.4,
        }) +
        tag("line", {
          x1: x - size, y1: y + size, x2: x + size, y2: y - size,
          stroke: color, "stroke-width": 1.4,
        })
      );
    case "diamonds": {
      const d = size * 1.3;
      const points = `${px(x)},${px(y - d)} ${px(x + d)},${px(y)} ${px(x)},${px(y + d)} ${px(x - d)},${px(y)}`;
      return tag("polygon", {
        points, fill: "none", stroke: color, "stroke-width": 1.4,
      });
    }
    default:
      return tag("circle", { cx: x, cy: y, r: size, fill: color });
  }
}

export function errorBar(x: number, yLo: number, yHi: number, color: string): string {
  const cap = 3;
  return tag("g", { class: "errorbar" },
    tag("line", { x1: x, y1: yLo, x2: x, y2: yHi, stroke: color, "stroke-width": 1.2 }) +
    tag("line", { x1: x - cap, y1: yLo, x2: x + cap, y2: yLo, stroke: color, "stroke-width": 1.2 }) +
    tag("line", { x1: x - cap, y1: yHi, x2: x + cap, y2: yHi, stroke: color, "stroke-width": 1.2 }),
  );
}

export function document(width: number, height: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}">\n` +
    tag("rect", { x: 0, y: 0, width, height, fill: "white" }) +
    body +
    "\n</svg>\n"
  );
}

/** Five-stop blue-to-yellow ramp evaluated at t in [0, 1]. */
export function rampColor(t: number): string {
  const stops: Array<[number, number, number]> = [
    [68, 1, 84],
    [59, 82, 139],
    [33, 145, 140],
    [94, 201, 98],
    [253, 231, 37],
  ];
  const clamped = Math.min(1, Math.max(0, t));
  const pos = clamped * (stops.length - 1);
  const i = Math.min(stops.length - 2, Math.floor(pos));
  const f = pos - i;
  const mix = stops[i].map((c, k) => Math.round(c + f * (stops[i + 1][k] - c)));
  return `rgb(${mix[0]},${mix[1]},${mix[2]})`;
}
