import init, { Demo } from "./pkg/ellsum_web.js";

const N = 180;
const plot = document.getElementById("plot");
const ctx = plot.getContext("2d");
const hist = document.getElementById("history").getContext("2d");
const $ = (id) => document.getElementById(id);
let demo = null;
let cloud = [];

function bounds(pts) {
  let m = 0;
  for (const v of pts) m = Math.max(m, Math.abs(v));
  return m * 1.1;
}

function toScreen(x, y, scale) {
  return [plot.width / 2 + x * scale, plot.height / 2 - y * scale];
}

function path(pts, scale, color, width = 2, dash = []) {
  ctx.beginPath();
  ctx.setLineDash(dash);
  for (let i = 0; i < pts.length; i += 2) {
    const [sx, sy] = toScreen(pts[i], pts[i + 1], scale);
    i === 0 ? ctx.moveTo(sx, sy) : ctx.lineTo(sx, sy);
  }
  ctx.strokeStyle = color;
  ctx.lineWidth = width;
  ctx.stroke();
  ctx.setLineDash([]);
}

function userWeights() {
  return Array.from(document.querySelectorAll("#weights input"), (el) => Math.pow(10, +el.value));
}

function setWeights(alpha) {
  document.querySelectorAll("#weights input").forEach((el, k) => (el.value = Math.log10(alpha[k])));
  draw();
}

function draw() {
  if (!demo) return;
  $("error").textContent = "";
  const trace = demo.trace_outline(N);
  const mm = demo.mm_outline(N);
  let user = null;
  try {
    user = demo.alpha_outline(userWeights(), N);
    $("a-user").textContent = demo.alpha_area(userWeights()).toFixed(4);
  } catch (e) {
    $("error").textContent = e.message ?? String(e);
  }
  const scale = (plot.width / 2) / bounds([...trace, ...mm, ...(user ?? [])]);

  ctx.clearRect(0, 0, plot.width, plot.height);
  ctx.fillStyle = "rgba(0,0,0,0.25)";
  for (let i = 0; i < cloud.length; i += 2) {
    const [sx, sy] = toScreen(cloud[i], cloud[i + 1], scale);
    ctx.fillRect(sx - 1, sy - 1, 2, 2);
  }
  const summands = demo.summand_outlines(N);
  const per = 2 * (N + 1);
  for (let k = 0; k < demo.terms(); k++) {
    path(summands.slice(k * per, (k + 1) * per), scale, "#999", 1, [4, 3]);
  }
  path(trace, scale, "#1f77b4");
  path(mm, scale, "#d62728");
  if (user) path(user, scale, "#2ca02c", 2, [6, 4]);
  $("a-trace").textContent = demo.trace_area().toFixed(4);
  $("a-mm").textContent = demo.mm_area().toFixed(4);
}

function drawHistory() {
  const h = demo.mm_history();
  const { width, height } = hist.canvas;
  hist.clearRect(0, 0, width, height);
  const lo = Math.min(...h), hi = Math.max(...h);
  const span = hi - lo || 1;
  hist.beginPath();
  h.forEach((v, i) => {
    const x = 10 + (width - 20) * (h.length > 1 ? i / (h.length - 1) : 0);
    const y = 10 + (height - 20) * (1 - (v - lo) / span);
    i === 0 ? hist.moveTo(x, y) : hist.lineTo(x, y);
    hist.fillRect(x - 2, y - 2, 4, 4);
  });
  hist.strokeStyle = "#d62728";
  hist.stroke();
  hist.fillText(`${h.length - 1} iterations, f = ${h[h.length - 1].toFixed(6)}`, 10, height - 2);
}

function generate() {
  try {
    demo = new Demo(+$("terms").value, +$("seed").value);
  } catch (e) {
    $("error").textContent = e.message ?? String(e);
    return;
  }
  cloud = demo.sum_samples(3000, 7);
  const box = $("weights");
  box.innerHTML = "";
  for (let k = 0; k < demo.terms(); k++) {
    const label = document.createElement("label");
    label.textContent = `α${k + 1} `;
    const input = document.createElement("input");
    Object.assign(input, { type: "range", min: -2, max: 2, step: 0.01 });
    input.addEventListener("input", draw);
    label.appendChild(input);
    box.appendChild(label);
  }
  setWeights(demo.trace_alpha());
  drawHistory();
}

await init();
$("generate").addEventListener("click", generate);
$("use-mm").addEventListener("click", () => setWeights(demo.mm_alpha()));
$("use-trace").addEventListener("click", () => setWeights(demo.trace_alpha()));
generate();
