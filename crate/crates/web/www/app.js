import init, { model_response, optimize, compare, gene_bounds } from "./pkg/tdsopt_web.js";

const COLORS = { genetic: "#1565c0", caste: "#2e7d32", separated: "#d84315", topsis: "#6a1b9a" };
const STEPS = 1000;
let sliders = [];

const $ = (id) => document.getElementById(id);

function extent(values) {
  let lo = Infinity, hi = -Infinity;
  for (const v of values) {
    if (Number.isFinite(v)) { lo = Math.min(lo, v); hi = Math.max(hi, v); }
  }
  if (lo === hi) { lo -= 1; hi += 1; }
  return [lo, hi];
}

// series: [{ xs, ys, color, dots }]
function plot(canvas, series, { logX = false, logY = false } = {}) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 40;
  ctx.clearRect(0, 0, w, h);
  const tx = (x) => (logX ? Math.log10(x) : x);
  const ty = (y) => (logY ? Math.log10(y) : y);
  const [x0, x1] = extent(series.flatMap((s) => s.xs.map(tx)));
  const [y0, y1] = extent(series.flatMap((s) => s.ys.map(ty)));
  const px = (x) => pad + ((tx(x) - x0) / (x1 - x0)) * (w - pad - 10);
  const py = (y) => h - pad + -((ty(y) - y0) / (y1 - y0)) * (h - pad - 10);

  ctx.strokeStyle = "#999";
  ctx.fillStyle = "#555";
  ctx.font = "11px sans-serif";
  ctx.strokeRect(pad, 10, w - pad - 10, h - pad - 10);
  const fmt = (v, log) => (log ? `1e${v.toFixed(1)}` : v.toPrecision(3));
  ctx.fillText(fmt(y1, logY), 2, 18);
  ctx.fillText(fmt(y0, logY), 2, h - pad);
  ctx.fillText(fmt(x0, logX), pad, h - pad + 14);
  ctx.fillText(fmt(x1, logX), w - 60, h - pad + 14);

  for (const s of series) {
    ctx.strokeStyle = ctx.fillStyle = s.color;
    if (s.dots) {
      s.xs.forEach((x, i) => {
        ctx.beginPath();
        ctx.arc(px(x), py(s.ys[i]), 3, 0, 2 * Math.PI);
        ctx.fill();
      });
    } else {
      ctx.beginPath();
      s.xs.forEach((x, i) => (i ? ctx.lineTo(px(x), py(s.ys[i])) : ctx.moveTo(px(x), py(s.ys[i]))));
      ctx.stroke();
    }
  }
}

function showResponse(r) {
  const model = "#1565c0", data = "#d84315";
  const om = r.bode.map((p) => p.omega);
  const dom = r.dataset_bode.map((p) => p.omega);
  plot($("mag"), [
    { xs: om, ys: r.bode.map((p) => p.mag_db), color: model },
    { xs: dom, ys: r.dataset_bode.map((p) => p.mag_db), color: data, dots: true },
  ], { logX: true });
  plot($("phase"), [
    { xs: om, ys: r.bode.map((p) => p.phase_deg), color: model },
    { xs: dom, ys: r.dataset_bode.map((p) => p.phase_deg), color: data, dots: true },
  ], { logX: true });
  plot($("nyquist"), [
    { xs: r.nyquist.map((p) => p[0]), ys: r.nyquist.map((p) => p[1]), color: model },
    { xs: r.dataset_nyquist.map((p) => p[0]), ys: r.dataset_nyquist.map((p) => p[1]), color: data, dots: true },
  ]);

  const rows = r.constraints.map((c) =>
    `<tr><td>${c.name}</td><td class="${c.violation > 0 ? "fail" : "pass"}">${c.violation > 0 ? c.violation.toExponential(2) : "ok"}</td></tr>`);
  rows.push(`<tr><th>feasible</th><th class="${r.feasible ? "pass" : "fail"}">${r.feasible}</th></tr>`);
  rows.push(`<tr><td>static gain</td><td>${r.static_gain?.toPrecision(6) ?? "undefined"}</td></tr>`);
  rows.push(`<tr><td>b0_tau</td><td>${r.parameters.b0_tau.toPrecision(6)}</td></tr>`);
  rows.push(`<tr><td>cost</td><td>${r.cost?.toExponential(3) ?? "undefined"}</td></tr>`);
  $("report").innerHTML = rows.join("");
}

// sliders move on a log scale for the wide positive ranges
function toSlider(v, lo, hi, log) {
  return Math.round(STEPS * (log ? Math.log(v / lo) / Math.log(hi / lo) : (v - lo) / (hi - lo)));
}

function fromSlider(t, lo, hi, log) {
  const f = t / STEPS;
  return log ? lo * Math.pow(hi / lo, f) : lo + f * (hi - lo);
}

function genes() {
  return Float64Array.from(sliders.map((s) => s.value));
}

function refresh() {
  try {
    showResponse(JSON.parse(model_response(genes())));
  } catch (e) {
    $("status").textContent = String(e);
  }
}

function setGenes(values) {
  values.forEach((v, i) => {
    const s = sliders[i];
    s.value = v;
    s.input.value = toSlider(v, s.lo, s.hi, s.log);
    s.text.value = v.toPrecision(5);
  });
  refresh();
}

function buildSliders(bounds, initial) {
  const box = $("sliders");
  sliders = bounds.map(([name, lo, hi], i) => {
    const log = lo > 0;
    const label = document.createElement("label");
    label.className = "gene";
    label.innerHTML = `<span>${name}</span><input type="range" min="0" max="${STEPS}"><input type="text">`;
    const [input, text] = label.querySelectorAll("input");
    const s = { lo, hi, log, input, text, value: initial[i] };
    input.addEventListener("input", () => {
      s.value = fromSlider(+input.value, lo, hi, log);
      text.value = s.value.toPrecision(5);
      refresh();
    });
    text.addEventListener("change", () => {
      const v = Math.min(hi, Math.max(lo, parseFloat(text.value)));
      if (Number.isFinite(v)) setGenes(sliders.map((o) => (o === s ? v : o.value)));
    });
    box.appendChild(label);
    return s;
  });
}

function plotCurves(curves) {
  plot($("curve"), curves.map(([alg, c]) => ({ xs: c.evaluations, ys: c.best, color: COLORS[alg] })), { logY: true });
  $("curve-legend").innerHTML = curves.map(([alg]) => `<span style="color:${COLORS[alg]}">&#9632; ${alg}</span>`).join("");
}

// let the status line paint before a long synchronous run
const later = (f) => setTimeout(f, 20);

function onOptimize() {
  const alg = $("algorithm").value;
  $("status").textContent = `running ${alg}...`;
  later(() => {
    try {
      const t = performance.now();
      const r = JSON.parse(optimize(alg, +$("seed").value, +$("budget").value));
      $("status").textContent = `${alg}: best cost ${r.final_cost.toExponential(3)} (${((performance.now() - t) / 1000).toFixed(1)} s)`;
      setGenes(r.genes);
      plotCurves([[alg, r.curve]]);
      $("summary").innerHTML = "";
    } catch (e) {
      $("status").textContent = String(e);
    }
  });
}

function onCompare() {
  $("status").textContent = "running all four algorithms...";
  later(() => {
    try {
      const r = JSON.parse(compare(+$("seed").value, +$("budget").value, +$("reps").value));
      plotCurves(r.curves);
      $("summary").innerHTML = "<tr><th>algorithm</th><th>average</th><th>minimum</th><th>std</th></tr>" +
        r.summaries.map((s) => `<tr><td>${s.algorithm}</td><td>${s.average.toExponential(3)}</td><td>${s.minimum.toExponential(3)}</td><td>${s.std.toExponential(3)}</td></tr>`).join("");
      $("status").textContent = "done";
    } catch (e) {
      $("status").textContent = String(e);
    }
  });
}

await init();
const bounds = JSON.parse(gene_bounds());
buildSliders(bounds, [0.03, 1, 5, 2, 1.5, 0.5, 0.1, 50]);
setGenes(sliders.map((s) => s.value));
$("run").addEventListener("click", onOptimize);
$("compare").addEventListener("click", onCompare);
