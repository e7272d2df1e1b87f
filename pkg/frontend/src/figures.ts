/** The five figure kinds.  Every renderer consumes serialized CLI artifacts
 *  only; the single numerical liberty is presentation aggregation (sup
 *  distance to uniform in the relax figure) — fitted slopes are read from
 *  the file header, never recomputed. */

import { CsvTable, column } from "./csv.js";
import { LoadedInputs } from "./schema.js";
import { SvgDoc, extent, linScale, logScale, trimNum } from "./svg.js";

/** time runs upward; exchange events appear as horizontal segments joining
 *  the two coordinates involved at the event time */
export function renderPaths(inp: LoadedInputs): string {
  const { table, trajectory, style } = inp;
  const t = column(table, "t");
  const coordCols = table.columns.filter((c) => c.startsWith("x_"));
  const m = style.margin;
  const values = coordCols.flatMap((c) => column(table, c));
  const xs = linScale(...extent(values), m, style.width - m);
  const ys = linScale(t[0], t[t.length - 1], style.height - m, m);
  const doc = new SvgDoc(style, "particle paths with exchange events");
  doc.frame(xs, ys, "coordinate", "t");
  coordCols.forEach((cname, k) => {
    const v = column(table, cname);
    doc.polyline(v.map((x, i) => [xs(x), ys(t[i])] as [number, number]),
                 style.palette[k % style.palette.length], 1.2, "trace");
  });
  const events = trajectory!;
  const et = column(events, "t");
  const ei = column(events, "event_root_i");
  const ej = column(events, "event_root_j");
  for (let k = 0; k < et.length; k++) {
    const row = nearestRow(t, et[k]);
    const vi = coordValue(table, row, ei[k]);
    const vj = coordValue(table, row, ej[k]);
    // horizontal marker: same y at both ends
    doc.line(xs(vi), ys(et[k]), xs(vj), ys(et[k]), style.markerColor, 1.6,
             "jump-marker");
  }
  return doc.render();
}

function nearestRow(t: number[], te: number): number {
  let best = 0;
  let dist = Infinity;
  for (let i = 0; i < t.length; i++) {
    const d = Math.abs(t[i] - te);
    if (d < dist) {
      dist = d;
      best = i;
    }
  }
  return best;
}

/** signed 1-based root code -> coordinate value (negative code = sign flip) */
function coordValue(table: CsvTable, row: number, code: number): number {
  const idx = Math.abs(code);
  const v = column(table, `x_${idx}`)[row];
  return code < 0 ? -v : v;
}

/** cumulative number of exchange events */
export function renderCounts(inp: LoadedInputs): string {
  const { table, style } = inp;
  const et = column(table, "t");
  const m = style.margin;
  const tMax = et.length ? et[et.length - 1] : 1;
  const xs = linScale(0, tMax, m, style.width - m);
  const ys = linScale(0, Math.max(et.length, 1), style.height - m, m);
  const doc = new SvgDoc(style, "cumulative jump count");
  doc.frame(xs, ys, "t", "count");
  const pts: Array<[number, number]> = [[xs(0), ys(0)]];
  et.forEach((te, k) => {
    pts.push([xs(te), ys(k)]);        // staircase: horizontal then riser
    pts.push([xs(te), ys(k + 1)]);
  });
  pts.push([xs(tMax), ys(et.length)]);
  doc.polyline(pts, style.palette[0], 1.5, "count-steps");
  return doc.render();
}

/** per-particle rate against N with the bulk-limit line */
export function renderPhase(inp: LoadedInputs): string {
  const { table, style } = inp;
  const n = column(table, "N");
  const rate = column(table, "rate_per_particle");
  const theory = column(table, "theory");
  const m = style.margin;
  const xs = linScale(...extent(n), m, style.width - m);
  const ys = linScale(...extent([0, ...rate, ...theory]),
                      style.height - m, m);
  const doc = new SvgDoc(style, "per-particle jump rate vs N");
  doc.frame(xs, ys, "N", "rate per particle");
  doc.line(xs(xs.domain[0]), ys(theory[0]), xs(xs.domain[1]), ys(theory[0]),
           style.palette[3], 1.2, "theory-line", "6,4");
  doc.text(xs(xs.domain[1]), ys(theory[0]) - 6,
           `limit ${trimNum(theory[0])}`, 11, "end", "theory-label");
  n.forEach((nv, k) => {
    doc.circle(xs(nv), ys(rate[k]), 3, style.palette[0], "phase-point");
  });
  doc.polyline(n.map((nv, k) => [xs(nv), ys(rate[k])] as [number, number]),
               style.palette[0], 1, "phase-curve");
  return doc.render();
}

/** log-log distance to uniform, annotated with the header's fitted slope */
export function renderRelax(inp: LoadedInputs): string {
  const { table, style } = inp;
  const t = column(table, "t");
  const emp = column(table, "p_emp");
  const theo = column(table, "p_theory");
  const times = [...new Set(t)].sort((a, b) => a - b);
  const nW = new Set(column(table, "tau_index")).size;
  const dEmp: number[] = [];
  const dTheo: number[] = [];
  for (const tv of times) {
    let me = 0;
    let mt = 0;
    t.forEach((ti, k) => {
      if (ti === tv) {
        me = Math.max(me, Math.abs(emp[k] - 1 / nW));
        mt = Math.max(mt, Math.abs(theo[k] - 1 / nW));
      }
    });
    dEmp.push(me);
    dTheo.push(mt);
  }
  const m = style.margin;
  const pos = dEmp.concat(dTheo).filter((v) => v > 0);
  const xs = logScale(times[0], times[times.length - 1], m, style.width - m);
  const ys = logScale(Math.min(...pos), Math.max(...pos),
                      style.height - m, m);
  const doc = new SvgDoc(style, "relaxation distance to uniform");
  doc.frame(xs, ys, "t / t0", "sup distance",
            (v) => trimNum(v), (v) => v.toExponential(1));
  doc.polyline(times.map((tv, k) =>
    [xs(tv), ys(Math.max(dTheo[k], 1e-300))] as [number, number]),
    style.palette[3], 1.2, "relax-theory");
  times.forEach((tv, k) => {
    if (dEmp[k] > 0) {
      doc.circle(xs(tv), ys(dEmp[k]), 3, style.palette[0], "relax-emp");
    }
  });
  const slope = Number(table.header["fitted_exponent"]);
  doc.text(style.width - m, m + 16, `slope = ${slope.toFixed(3)}`, 13, "end",
           "slope-annotation");
  return doc.render();
}

/** eigenvalue stems grouped by multiplicity */
export function renderSpectrum(inp: LoadedInputs): string {
  const { table, style } = inp;
  const idx = column(table, "index");
  const ev = column(table, "eigenvalue");
  const grp = column(table, "multiplicity_group");
  const m = style.margin;
  const xs = linScale(-0.5, Math.max(...idx) + 0.5, m, style.width - m);
  const ys = linScale(...extent([0, ...ev]), style.height - m, m);
  const doc = new SvgDoc(style, "relaxation exponent spectrum");
  doc.frame(xs, ys, "index", "exponent");
  doc.line(xs(xs.domain[0]), ys(0), xs(xs.domain[1]), ys(0),
           style.axisColor, 0.6, "zero-line", "2,3");
  idx.forEach((iv, k) => {
    const color = style.palette[grp[k] % style.palette.length];
    doc.line(xs(iv), ys(0), xs(iv), ys(ev[k]), color, 2, "stem");
    doc.circle(xs(iv), ys(ev[k]), 3.2, color, "stem-head");
  });
  return doc.render();
}
