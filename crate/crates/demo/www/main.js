import init, { sensitivity_curve, estimator_moments, protocol_run } from "./pkg/lwdp_demo.js";

const num = (form, name) => Number(form.querySelector(`[name=${name}]`).value);
const flag = (form, name) => form.querySelector(`[name=${name}]`).checked;

// Line chart of several series over shared x values.
function plot(canvas, xs, series, { logY = false } = {}) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 40;
  ctx.clearRect(0, 0, w, h);
  const tf = logY ? (v) => Math.log10(Math.max(v, 1e-12)) : (v) => v;
  const ys = series.flatMap((s) => s.values.map(tf));
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  let [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  if (y1 === y0) y1 = y0 + 1;
  const px = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (w - 2 * pad);
  const py = (y) => h - pad + ((tf(y) - y0) / (y0 - y1)) * (h - 2 * pad);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#444";
  ctx.font = "11px sans-serif";
  ctx.fillText(logY ? `1e${y1.toFixed(1)}` : y1.toPrecision(3), 2, pad + 4);
  ctx.fillText(logY ? `1e${y0.toFixed(1)}` : y0.toPrecision(3), 2, h - pad);
  ctx.fillText(String(x0), pad, h - pad + 14);
  ctx.fillText(String(x1), w - pad - 20, h - pad + 14);
  series.forEach((s, i) => {
    ctx.strokeStyle = s.color;
    ctx.beginPath();
    s.values.forEach((v, j) => (j ? ctx.lineTo(px(xs[j]), py(v)) : ctx.moveTo(px(xs[j]), py(v))));
    ctx.stroke();
    ctx.fillStyle = s.color;
    ctx.fillText(s.label, w - pad - 150, pad + 14 + 14 * i);
  });
}

function wire(id, action) {
  const form = document.getElementById(id);
  const out = form.querySelector(".out");
  form.querySelector("button").addEventListener("click", () => {
    try {
      out.className = "out";
      action(form, out);
    } catch (e) {
      out.className = "out err";
      out.textContent = String(e.message ?? e);
    }
  });
}

await init();

wire("sens", (f, out) => {
  const betas = Array.from({ length: 40 }, (_, i) => 0.02 * Math.pow(1.15, i));
  const r = sensitivity_curve(num(f, "nodes"), num(f, "density"), num(f, "maxw"), num(f, "seed"),
    num(f, "eps1"), flag(f, "unbiased"), new Float64Array(betas));
  const [node, lambda, ls, gs] = r;
  const smooth = Array.from(r.slice(4));
  out.textContent = `node ${node}, λ = ${lambda}: local ${ls.toFixed(3)}, global ${gs.toFixed(3)}`;
  plot(f.querySelector("canvas"), betas, [
    { label: "smooth S*(β)", color: "#1565c0", values: smooth },
    { label: "local", color: "#2e7d32", values: betas.map(() => ls) },
    { label: "global", color: "#c62828", values: betas.map(() => gs) },
  ]);
});

wire("moments", (f, out) => {
  const p = Math.exp(-num(f, "eps1"));
  const r = estimator_moments(p, -10, 10);
  const rows = [];
  for (let i = 0; i < r.length; i += 4) rows.push(r.slice(i, i + 4));
  out.textContent = `p = ${p.toFixed(4)}; x axis is w_T - λ, log scale`;
  plot(f.querySelector("canvas"), rows.map((q) => q[0]), [
    { label: "biased: bias²", color: "#c62828", values: rows.map((q) => (q[1] - (q[0] < 0 ? 1 : 0)) ** 2) },
    { label: "biased: variance", color: "#ef6c00", values: rows.map((q) => q[2]) },
    { label: "unbiased: variance", color: "#1565c0", values: rows.map((q) => q[3]) },
  ], { logY: true });
});

wire("run", (f, out) => {
  const r = protocol_run(num(f, "nodes"), num(f, "density"), num(f, "maxw"), num(f, "seed"),
    num(f, "eps"), flag(f, "unbiased"), flag(f, "smooth"));
  const [exact, est, base, up1, down, up2, tris] = r;
  const rel = (v) => (exact > 0 ? (Math.abs(v - exact) / exact).toFixed(4) : "NA");
  out.innerHTML = `<table>
    <tr><th></th><th>value</th><th>relative error</th></tr>
    <tr><td>true count f(G)</td><td>${exact}</td><td></td></tr>
    <tr><td>two-step estimate</td><td>${est.toFixed(2)}</td><td>${rel(est)}</td></tr>
    <tr><td>baseline estimate</td><td>${base.toFixed(2)}</td><td>${rel(base)}</td></tr>
    <tr><td>triangles</td><td>${tris}</td><td></td></tr>
    <tr><td>weight uploads</td><td>${up1}</td><td></td></tr>
    <tr><td>downloads</td><td>${down}</td><td></td></tr>
    <tr><td>count uploads</td><td>${up2}</td><td></td></tr>
  </table>`;
});
