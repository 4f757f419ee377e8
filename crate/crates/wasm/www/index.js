import init, { dephasingRun, thermalRun, coherenceTriple } from "./pkg/ehrenfest_wasm.js";

const num = (form, name) => parseFloat(form.querySelector(`[name=${name}]`).value);

function plot(canvas, t, series) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 40;
  ctx.clearRect(0, 0, w, h);
  let lo = Infinity, hi = -Infinity;
  for (const s of series) for (const v of s.y) if (Number.isFinite(v)) { lo = Math.min(lo, v); hi = Math.max(hi, v); }
  if (hi - lo < 1e-12) { hi += 0.5; lo -= 0.5; }
  const t0 = t[0], t1 = t[t.length - 1];
  const x = (v) => pad + ((v - t0) / (t1 - t0)) * (w - 2 * pad);
  const y = (v) => h - pad - ((v - lo) / (hi - lo)) * (h - 2 * pad);

  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad, pad); ctx.lineTo(pad, h - pad); ctx.lineTo(w - pad, h - pad);
  ctx.stroke();
  if (lo < 0 && hi > 0) {
    ctx.setLineDash([2, 3]);
    ctx.beginPath(); ctx.moveTo(pad, y(0)); ctx.lineTo(w - pad, y(0)); ctx.stroke();
    ctx.setLineDash([]);
  }
  ctx.fillStyle = "#555";
  ctx.font = "11px sans-serif";
  ctx.fillText(hi.toPrecision(3), 2, pad + 4);
  ctx.fillText(lo.toPrecision(3), 2, h - pad);
  ctx.fillText(`t = ${t1}`, w - pad - 30, h - pad + 16);

  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.setLineDash(s.dash || []);
    ctx.beginPath();
    s.y.forEach((v, i) => (i ? ctx.lineTo(x(t[i]), y(v)) : ctx.moveTo(x(t[i]), y(v))));
    ctx.stroke();
  }
  ctx.setLineDash([]);
}

function runDephasing() {
  const form = document.getElementById("dephasing");
  const out = form.querySelector(".out");
  try {
    const r = dephasingRun(num(form, "eps"), num(form, "gamma"), num(form, "bz"), num(form, "t1"), 1001);
    const t = r.t, q = r.heat, wk = r.work;
    const qEnd = q[q.length - 1];
    plot(form.querySelector("canvas"), t, [
      { y: q, color: "#c0392b" },
      { y: wk, color: "#2874a6" },
      { y: t.map(() => r.heat_expected), color: "#888", dash: [4, 4] },
    ]);
    out.textContent =
      `Q = ${qEnd.toFixed(6)}   W = ${wk[wk.length - 1].toFixed(6)}   closed form Q = ${r.heat_expected.toFixed(6)}\n` +
      `max first-law residual ${r.max_first_law_residual.toExponential(2)}   ${r.pass ? "audit passed" : "audit FAILED"}`;
  } catch (e) {
    out.textContent = `error: ${e.message ?? e}`;
  }
}

function runThermal() {
  const form = document.getElementById("thermal");
  const out = form.querySelector(".out");
  try {
    const r = thermalRun(1.0, num(form, "gamma"), num(form, "nbar"), num(form, "bz"), num(form, "t1"), 801);
    const e = r.energy, e0 = e[0];
    plot(form.querySelector("canvas"), r.t, [
      { y: r.heat, color: "#c0392b" },
      { y: r.work, color: "#2874a6" },
      { y: e.map((v) => v - e0), color: "#27ae60", dash: [5, 3] },
      { y: r.entropy, color: "#8e44ad" },
    ]);
    const n = e.length - 1;
    out.textContent =
      `Q = ${r.heat[n].toFixed(6)}   W = ${r.work[n].toExponential(2)}   dE = ${(e[n] - e0).toFixed(6)}\n` +
      `max first-law residual ${r.max_first_law_residual.toExponential(2)}   ${r.pass ? "audit passed" : "audit FAILED"}`;
  } catch (err) {
    out.textContent = `error: ${err.message ?? err}`;
  }
}

function runTriple() {
  const form = document.getElementById("triple");
  const out = form.querySelector(".out");
  const vec = (name) => form.querySelector(`[name=${name}]`).value.split(",").map(parseFloat);
  try {
    const [triple, dense] = coherenceTriple(new Float64Array([...vec("b"), ...vec("o"), ...vec("w")]));
    out.textContent =
      `2 B.(o x w)          = ${triple}\n` +
      `i tr(rho [Omega, O]) = ${dense}\n` +
      `difference           = ${Math.abs(triple - dense).toExponential(2)}`;
  } catch (e) {
    out.textContent = `error: ${e.message ?? e}`;
  }
}

await init();
for (const [id, f] of [["dephasing", runDephasing], ["thermal", runThermal], ["triple", runTriple]]) {
  document.querySelector(`#${id} button`).addEventListener("click", f);
  f();
}
