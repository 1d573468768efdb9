import init, { discretization_check, womp_trace, sine_certificate } from "./pkg/sparsedisc_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function call(fn, out) {
  try {
    return JSON.parse(fn());
  } catch (e) {
    out.textContent = String(e.message ?? e);
    out.className = "bad";
    return null;
  }
}

function drawCircle(canvas, points) {
  const g = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height;
  g.clearRect(0, 0, w, h);
  g.strokeStyle = "#999";
  g.beginPath(); g.moveTo(10, h / 2); g.lineTo(w - 10, h / 2); g.stroke();
  g.fillStyle = "#246";
  for (const x of points) {
    const px = 10 + (x / (2 * Math.PI)) * (w - 20);
    g.beginPath(); g.arc(px, h / 2, 4, 0, 2 * Math.PI); g.fill();
  }
  g.fillStyle = "#555";
  g.fillText("0", 6, h - 6); g.fillText("2π", w - 20, h - 6);
}

function runCheck() {
  const out = $("c-out");
  const r = call(() => discretization_check(num("c-M"), num("c-m"), $("c-mode").value, num("c-v"), num("c-seed")), out);
  if (!r) return;
  drawCircle($("c-canvas"), r.points);
  out.className = r.holds ? "ok" : "bad";
  out.textContent =
    `N = ${r.N}, m = ${r.m}, supports checked = ${r.supports_checked}\n` +
    `C1 = ${r.c1_global.toFixed(6)} on frequencies [${r.min_support}]\n` +
    `C2 = ${r.c2_global.toFixed(6)} on frequencies [${r.max_support}]\n` +
    (r.holds ? "holds with (1/2, 3/2)" : "fails for (1/2, 3/2)");
}

function runWomp() {
  const out = $("w-out");
  const r = call(() => womp_trace(num("w-N"), num("w-v"), num("w-m"), num("w-t"), num("w-it"), num("w-seed")), out);
  if (!r) return;
  const c = $("w-canvas"), g = c.getContext("2d");
  const w = c.width, h = c.height, pad = 30;
  g.clearRect(0, 0, w, h);
  const logs = r.residual_norms.map((x) => Math.log10(Math.max(x, 1e-16)));
  const hi = Math.max(...logs), lo = Math.min(-16, ...logs);
  const sx = (i) => pad + (i / Math.max(1, logs.length - 1)) * (w - 2 * pad);
  const sy = (y) => pad + ((hi - y) / Math.max(1e-9, hi - lo)) * (h - 2 * pad);
  g.strokeStyle = "#ccc";
  g.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  g.strokeStyle = "#a33"; g.lineWidth = 2; g.beginPath();
  logs.forEach((y, i) => (i ? g.lineTo(sx(i), sy(y)) : g.moveTo(sx(i), sy(y))));
  g.stroke(); g.lineWidth = 1;
  g.fillStyle = "#555";
  g.fillText(`log10 residual, ${hi.toFixed(1)} .. ${lo.toFixed(1)}`, pad, pad - 8);
  const found = r.true_frequencies.every((k) => r.selected_frequencies.includes(k));
  out.className = found ? "ok" : "bad";
  out.textContent =
    `true frequencies     [${r.true_frequencies}]\n` +
    `selected frequencies [${r.selected_frequencies}]\n` +
    `final residual ${r.residual_norms.at(-1).toExponential(3)}`;
}

const sinePoints = [];

function drawSine(cert) {
  const c = $("s-canvas"), g = c.getContext("2d");
  const w = c.width, h = c.height, pad = 10;
  g.clearRect(0, 0, w, h);
  const sx = (x) => pad + x * (w - 2 * pad);
  g.strokeStyle = "#999";
  g.beginPath(); g.moveTo(pad, h / 2); g.lineTo(w - pad, h / 2); g.stroke();
  if (cert) {
    g.strokeStyle = "#7a9";
    g.beginPath();
    for (let i = 0; i <= 2000; i++) {
      const x = i / 2000;
      const y = h / 2 - 0.4 * h * Math.sin(Math.PI * cert.k * x);
      i ? g.lineTo(sx(x), y) : g.moveTo(sx(x), y);
    }
    g.stroke();
  }
  g.fillStyle = "#246";
  for (const x of sinePoints) {
    g.beginPath(); g.arc(sx(x), h / 2, 4, 0, 2 * Math.PI); g.fill();
  }
}

function runSine() {
  const out = $("s-out");
  if (sinePoints.length === 0) {
    drawSine(null);
    out.className = "";
    out.textContent = "no points";
    return;
  }
  const r = call(() => sine_certificate(new Float64Array(sinePoints), num("s-N"), num("s-c1")), out);
  if (!r) return;
  const cert = r.certificate;
  drawSine(cert);
  const lines = [
    `m = ${sinePoints.length}, threshold m* = ${r.m_threshold.toFixed(3)}`,
    `one-sided check: ${r.one_sided_holds ? "holds" : "fails"}, C1 = ${r.one_sided_c1_global.toFixed(4)} (worst k = ${r.worst_k})`,
  ];
  if (cert) {
    lines.push(`certificate: k = ${cert.k}, a = [${cert.a}], source = ${cert.source}`);
    lines.push(`discrete mean ${cert.discrete_mean.toFixed(5)} < C1·‖φ_k‖² = ${(cert.c1 * cert.norm_sq).toFixed(5)}`);
  } else {
    lines.push("no certificate from this construction");
  }
  out.className = cert ? "bad" : "ok";
  out.textContent = lines.join("\n");
}

$("s-canvas").addEventListener("click", (ev) => {
  if (ev.shiftKey) {
    sinePoints.length = 0;
  } else {
    const rect = ev.target.getBoundingClientRect();
    const x = (ev.clientX - rect.left - 10) / (rect.width - 20);
    sinePoints.push(Math.min(1, Math.max(0, x)));
  }
  runSine();
});

await init();
$("c-run").addEventListener("click", runCheck);
$("w-run").addEventListener("click", runWomp);
for (const id of ["s-N", "s-c1"]) $(id).addEventListener("change", runSine);
sinePoints.push(0.3, 0.71);
runCheck();
runWomp();
runSine();
