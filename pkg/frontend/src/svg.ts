/** Minimal deterministic SVG emission: linear/log scales, axes, shapes. */

import { Style } from "./schema.js";

export function fmt(v: number): string {
  return v.toFixed(2);
}

export interface Scale {
  (v: number): number;
  domain: [number, number];
}

export function linScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 || 1;
  const f = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  f.domain = [d0, d1];
  return f;
}

export function logScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const l0 = Math.log10(d0);
  const span = Math.log10(d1) - l0 || 1;
  const f = ((v: number) =>
    r0 + ((Math.log10(v) - l0) / span) * (r1 - r0)) as Scale;
  f.domain = [d0, d1];
  return f;
}

export function extent(vals: number[], padFrac = 0.05): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of vals) {
    if (Number.isFinite(v)) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (!Number.isFinite(lo)) return [0, 1];
  const pad = (hi - lo || Math.abs(lo) || 1) * padFrac;
  return [lo - pad, hi + pad];
}

export class SvgDoc {
  private parts: string[] = [];
  constructor(readonly style: Style, readonly title: string) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${style.width}" ` +
      `height="${style.height}" viewBox="0 0 ${style.width} ${style.height}">`,
      `<rect width="${style.width}" height="${style.height}" ` +
      `fill="${style.background}"/>`,
      `<title>${title}</title>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string,
       width = 1, cls?: string, dash?: string): void {
    const c = cls ? ` class="${cls}"` : "";
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<line${c} x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" ` +
      `y2="${fmt(y2)}" stroke="${stroke}" stroke-width="${width}"${d}/>`,
    );
  }

  polyline(pts: Array<[number, number]>, stroke: string, width = 1.2,
           cls?: string): void {
    const c = cls ? ` class="${cls}"` : "";
    const p = pts.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(
      `<polyline${c} points="${p}" fill="none" stroke="${stroke}" ` +
      `stroke-width="${width}"/>`,
    );
  }

  circle(x: number, y: number, r: number, fill: string, cls?: string): void {
    const c = cls ? ` class="${cls}"` : "";
    this.parts.push(
      `<circle${c} cx="${fmt(x)}" cy="${fmt(y)}" r="${r}" fill="${fill}"/>`,
    );
  }

  text(x: number, y: number, s: string, size = 12, anchor = "start",
       cls?: string): void {
    const c = cls ? ` class="${cls}"` : "";
    this.parts.push(
      `<text${c} x="${fmt(x)}" y="${fmt(y)}" font-size="${size}" ` +
      `font-family="sans-serif" text-anchor="${anchor}" ` +
      `fill="${this.style.axisColor}">${escapeXml(s)}</text>`,
    );
  }

  /** plot frame with tick labels at the domain ends and midpoint */
  frame(xs: Scale, ys: Scale, xLabel: string, yLabel: string,
        xTickFmt: (v: number) => string = (v) => trimNum(v),
        yTickFmt: (v: number) => string = (v) => trimNum(v)): void {
    const { margin, width, height, axisColor } = this.style;
    this.line(margin, height - margin, width - margin, height - margin,
              axisColor, 1, "axis");
    this.line(margin, margin, margin, height - margin, axisColor, 1, "axis");
    const [x0, x1] = xs.domain;
    const [y0, y1] = ys.domain;
    for (const v of [x0, (x0 + x1) / 2, x1]) {
      this.text(xs(v), height - margin + 16, xTickFmt(v), 10, "middle", "tick");
    }
    for (const v of [y0, (y0 + y1) / 2, y1]) {
      this.text(margin - 6, ys(v) + 3, yTickFmt(v), 10, "end", "tick");
    }
    this.text((margin + width - margin) / 2, height - margin + 34, xLabel,
              12, "middle", "axis-label");
    this.text(14, margin - 12, yLabel, 12, "start", "axis-label");
  }

  render(): string {
    return this.parts.concat("</svg>").join("\n") + "\n";
  }
}

export function trimNum(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1);
  return String(Math.round(v * 1000) / 1000);
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}
