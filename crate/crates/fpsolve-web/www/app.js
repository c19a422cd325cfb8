// Static page driving the wasm module: three canvases, no framework.
import init, { catalog, problem, mode_profile, langevin_histogram } from "./pkg/fpsolve_web.js";

const $ = (id) => document.getElementById(id);
const status = (text, bad = false) => {
  const el = $("status");
  el.textContent = text;
  el.className = bad ? "err" : "";
};

const COLORS = {
  u: "#58a6ff",
  vq: "#d2a8ff",
  density: "#3fb950",
  profile: "#ffa657",
  ghost: "#4d5760",
  observed: "#58a6ff",
  expected: "#3fb950",
};

let cat = null;
let prob = null; // last problem payload
let modeDoc = null; // last mode payload
let animT = 0;
let lastFrame = null;

function sizeCanvas(canvas) {
  const ratio = window.devicePixelRatio || 1;
  const w = canvas.clientWidth;
  const h = 260;
  canvas.width = w * ratio;
  canvas.height = h * ratio;
  const ctx = canvas.getContext("2d");
  ctx.setTransform(ratio, 0, 0, ratio, 0, 0);
  return [ctx, w, h];
}

function extent(series) {
  let lo = Infinity, hi = -Infinity;
  for (const v of series) {
    if (v === null || !isFinite(v)) continue;
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!isFinite(lo)) { lo = 0; hi = 1; }
  if (lo === hi) { lo -= 1; hi += 1; }
  const pad = 0.08 * (hi - lo);
  return [lo - pad, hi + pad];
}

function frame(ctx, w, h, xw, yw) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#2e3844";
  ctx.lineWidth = 1;
  ctx.strokeRect(40.5, 8.5, w - 52, h - 34);
  ctx.fillStyle = "#8b97a5";
  ctx.font = "11px system-ui";
  ctx.textAlign = "center";
  for (let k = 0; k <= 4; k++) {
    const x = xw[0] + (k / 4) * (xw[1] - xw[0]);
    const px = 40 + ((x - xw[0]) / (xw[1] - xw[0])) * (w - 52);
    ctx.fillText(x.toFixed(2), px, h - 10);
  }
  ctx.textAlign = "right";
  for (let k = 0; k <= 3; k++) {
    const y = yw[0] + (k / 3) * (yw[1] - yw[0]);
    const py = h - 26 - ((y - yw[0]) / (yw[1] - yw[0])) * (h - 42);
    ctx.fillText(y.toPrecision(3), 36, py + 3);
  }
  return {
    px: (x) => 40 + ((x - xw[0]) / (xw[1] - xw[0])) * (w - 52),
    py: (y) => h - 26 - ((y - yw[0]) / (yw[1] - yw[0])) * (h - 42),
  };
}

function polyline(ctx, map, xs, ys, color, scale = 1) {
  ctx.strokeStyle = color;
  ctx.lineWidth = 1.6;
  ctx.beginPath();
  let pen = false;
  for (let j = 0; j < xs.length; j++) {
    const v = ys[j];
    if (v === null || !isFinite(v)) { pen = false; continue; }
    const px = map.px(xs[j]);
    const py = map.py(v * scale);
    if (pen) ctx.lineTo(px, py); else { ctx.moveTo(px, py); pen = true; }
  }
  ctx.stroke();
}

function legend(ctx, entries, w) {
  ctx.font = "12px system-ui";
  ctx.textAlign = "left";
  let x = 48;
  for (const [label, color] of entries) {
    ctx.fillStyle = color;
    ctx.fillRect(x, 14, 14, 3);
    ctx.fillStyle = "#e8edf2";
    ctx.fillText(label, x + 18, 19);
    x += 18 + ctx.measureText(label).width + 16;
    if (x > w - 100) break;
  }
}

function drawProblem() {
  if (!prob) return;
  const canvas = $("plotProblem");
  const [ctx, w, h] = sizeCanvas(canvas);
  // clip the potentials to a sane vertical range driven by the density panel
  const clip = (arr) => {
    const [lo, hi] = extent(arr);
    const span = Math.min(hi - lo, 30);
    return arr.map((v) => (v === null ? null : Math.max(lo, Math.min(lo + span, v))));
  };
  const u = clip(prob.u);
  const vq = clip(prob.vq);
  const all = [...u, ...vq, ...prob.density].filter((v) => v !== null);
  const yw = extent(all);
  const map = frame(ctx, w, h, [prob.window[0], prob.window[1]], yw);
  polyline(ctx, map, prob.x, u, COLORS.u);
  polyline(ctx, map, prob.x, vq, COLORS.vq);
  polyline(ctx, map, prob.x, prob.density, COLORS.density);
  for (const s of prob.singularities) {
    ctx.strokeStyle = COLORS.ghost;
    ctx.setLineDash([4, 4]);
    ctx.beginPath();
    ctx.moveTo(map.px(s), 10);
    ctx.lineTo(map.px(s), h - 26);
    ctx.stroke();
    ctx.setLineDash([]);
  }
  legend(ctx, [["U", COLORS.u], ["V_q", COLORS.vq], ["steady density", COLORS.density]], w);
}

function drawMode() {
  if (!modeDoc) return;
  const canvas = $("plotMode");
  const [ctx, w, h] = sizeCanvas(canvas);
  const yw = extent(modeDoc.profile);
  const span = Math.max(Math.abs(yw[0]), Math.abs(yw[1]));
  const map = frame(ctx, w, h, [modeDoc.window[0], modeDoc.window[1]], [-span, span]);
  ctx.strokeStyle = COLORS.ghost;
  ctx.beginPath();
  ctx.moveTo(map.px(modeDoc.window[0]), map.py(0));
  ctx.lineTo(map.px(modeDoc.window[1]), map.py(0));
  ctx.stroke();
  const decay = Math.exp(-modeDoc.lambda * animT);
  polyline(ctx, map, modeDoc.x, modeDoc.profile, COLORS.ghost);
  polyline(ctx, map, modeDoc.x, modeDoc.profile, COLORS.profile, decay);
  legend(ctx, [["profile at t=0", COLORS.ghost], [`e^{-λt} slice (t=${animT.toFixed(2)})`, COLORS.profile]], w);
}

function drawHistogram(doc) {
  const canvas = $("plotHist");
  const [ctx, w, h] = sizeCanvas(canvas);
  const yw = extent([...doc.observed, ...doc.expected, 0]);
  const xw = [doc.centers[0], doc.centers[doc.centers.length - 1]];
  const map = frame(ctx, w, h, xw, yw);
  const half = (map.px(doc.centers[1]) - map.px(doc.centers[0])) * 0.45;
  ctx.fillStyle = COLORS.observed + "66";
  ctx.strokeStyle = COLORS.observed;
  for (let j = 0; j < doc.centers.length; j++) {
    const px = map.px(doc.centers[j]);
    const py = map.py(doc.observed[j]);
    ctx.fillRect(px - half, py, 2 * half, map.py(0) - py);
  }
  polyline(ctx, map, doc.centers, doc.expected, COLORS.expected);
  legend(ctx, [["sampled", COLORS.observed], ["analytic", COLORS.expected]], w);
}

function paramsJson() {
  const inputs = document.querySelectorAll("#params input");
  const out = {};
  for (const input of inputs) out[input.dataset.name] = parseFloat(input.value);
  return JSON.stringify(out);
}

function renderParamInputs() {
  const fam = cat.families.find((f) => f.name === $("family").value);
  const host = $("params");
  host.innerHTML = "";
  for (const p of fam.params) {
    const label = document.createElement("label");
    label.textContent = `${p.name} (${p.range})`;
    const input = document.createElement("input");
    input.type = "number";
    input.step = "0.1";
    input.value = fam.defaults[p.name];
    input.dataset.name = p.name;
    label.appendChild(input);
    host.appendChild(label);
  }
}

function renderModeChips() {
  const host = $("modeRows");
  host.innerHTML = "";
  for (const m of prob.modes) {
    const chip = document.createElement("span");
    chip.className = "chip" + (m.admissible ? "" : " dead");
    chip.textContent = `i=${m.i}  λ=${m.lambda.toFixed(3)}`;
    chip.title = m.admissible
      ? "decaying mode"
      : "no admissible nodal domain (formal rate only)";
    chip.onclick = () => selectMode(m.i, chip);
    host.appendChild(chip);
  }
}

async function selectMode(i, chip) {
  try {
    const text = mode_profile($("family").value, paramsJson(), prob.level, i, 700);
    modeDoc = JSON.parse(text);
    animT = 0;
    document.querySelectorAll("#modeRows .chip").forEach((c) => c.classList.remove("active"));
    if (chip) chip.classList.add("active");
    $("modeNote").textContent = modeDoc.admissible
      ? `λ = ${modeDoc.lambda.toFixed(6)} — the slice relaxes like e^{-λt}`
      : `formal λ = ${modeDoc.lambda.toFixed(6)} < 0: no admissible domain, drawn frozen`;
    drawMode();
  } catch (e) {
    status(`mode failed: ${e}`, true);
  }
}

function buildProblem() {
  try {
    status("building...");
    const level = parseInt($("level").value, 10);
    const text = problem($("family").value, paramsJson(), level, 900);
    prob = JSON.parse(text);
    drawProblem();
    renderModeChips();
    const firstDecaying = prob.modes.find((m) => m.admissible && m.lambda > 0) ?? prob.modes[0];
    selectMode(firstDecaying.i, $("modeRows").children[firstDecaying.i]);
    status(`level ${level}: ${prob.modes.filter((m) => m.admissible).length} admissible modes of ${prob.modes.length}`);
  } catch (e) {
    status(`${e}`, true);
  }
}

function runSampler() {
  try {
    status("sampling...");
    const t0 = performance.now();
    const text = langevin_histogram(
      $("family").value,
      paramsJson(),
      parseInt($("level").value, 10),
      BigInt(Math.max(0, parseInt($("seed").value, 10) || 0)),
      parseInt($("steps").value, 10),
      80,
    );
    const doc = JSON.parse(text);
    drawHistogram(doc);
    const ms = (performance.now() - t0).toFixed(0);
    $("histNote").textContent =
      `${doc.samples.toLocaleString()} kept samples, TV distance ${doc.tv.toFixed(4)} (${ms} ms)`;
    status("sampler done");
  } catch (e) {
    status(`sampler failed: ${e}`, true);
  }
}

function tick(now) {
  if (lastFrame !== null && modeDoc && modeDoc.lambda > 0) {
    const speed = parseFloat($("speed").value);
    animT += ((now - lastFrame) / 1000) * speed;
    const horizon = Math.max(4 / Math.max(modeDoc.lambda, 0.25), 2);
    if (animT > horizon) animT = 0;
    drawMode();
  }
  lastFrame = now;
  requestAnimationFrame(tick);
}

async function main() {
  await init();
  cat = JSON.parse(catalog());
  const select = $("family");
  for (const f of cat.families) {
    const opt = document.createElement("option");
    opt.value = f.name;
    opt.textContent = f.name;
    select.appendChild(opt);
  }
  select.onchange = () => { renderParamInputs(); buildProblem(); };
  $("build").onclick = buildProblem;
  $("sample").onclick = runSampler;
  $("level").onchange = buildProblem;
  window.addEventListener("resize", () => { drawProblem(); drawMode(); });
  renderParamInputs();
  buildProblem();
  requestAnimationFrame(tick);
}

main().catch((e) => status(`failed to load wasm module: ${e}`, true));
