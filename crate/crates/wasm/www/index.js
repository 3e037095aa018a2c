import init, { densityGrid, restrictionSpectrum, frameCheck } from "./pkg/theta_gabor_wasm.js";

const $ = (id) => document.getElementById(id);

function params() {
  return [Number($("n").value), Number($("ore").value), Number($("oim").value)];
}

function guarded(outId, fn) {
  return () => {
    const out = $(outId);
    out.classList.remove("err");
    try {
      fn(out);
    } catch (e) {
      out.classList.add("err");
      out.textContent = String(e);
    }
  };
}

function heat(t) {
  const r = Math.round(255 * Math.min(1, 2 * t));
  const b = Math.round(255 * Math.min(1, 2 * (1 - t)));
  return [r, Math.round(80 + 100 * t), b];
}

function drawDensity(d) {
  const cv = $("density");
  cv.width = d.m_x;
  cv.height = d.m_xi;
  cv.style.width = cv.style.height = "256px";
  const ctx = cv.getContext("2d");
  const img = ctx.createImageData(d.m_x, d.m_xi);
  const span = d.max - d.min || 1;
  for (let i = 0; i < d.m_x; i++) {
    for (let j = 0; j < d.m_xi; j++) {
      const [r, g, b] = heat((d.rho[i * d.m_xi + j] - d.min) / span);
      const p = 4 * ((d.m_xi - 1 - j) * d.m_x + i);
      img.data.set([r, g, b, 255], p);
    }
  }
  ctx.putImageData(img, 0, 0);
}

function drawSpectrum(eig) {
  const cv = $("spectrum");
  const ctx = cv.getContext("2d");
  ctx.clearRect(0, 0, cv.width, cv.height);
  const w = cv.width / eig.length;
  const h = cv.height - 10;
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(0, 5);
  ctx.lineTo(cv.width, 5);
  ctx.stroke();
  ctx.fillStyle = "#3465a4";
  eig.forEach((v, i) => {
    const y = Math.max(0, Math.min(1, v));
    ctx.fillRect(i * w, 5 + h * (1 - y), Math.max(1, w - 1), h * y);
  });
}

await init();

$("run-density").onclick = guarded("density-out", (out) => {
  const d = JSON.parse(densityGrid(...params(), Number($("os").value)));
  drawDensity(d);
  out.textContent = `grid ${d.m_x}×${d.m_xi}  ∫ρ = ${d.integral.toFixed(12)}  min ${d.min.toExponential(6)}  max ${d.max.toExponential(6)}`;
});

$("run-spectrum").onclick = guarded("spectrum-out", (out) => {
  const s = JSON.parse(restrictionSpectrum(...params(), $("symbol").value));
  drawSpectrum(s.eigenvalues);
  out.textContent = `trace / N = ${s.trace_norm.toFixed(10)}  plunge fraction = ${s.plunge_fraction}\n` +
    s.eigenvalues.map((v) => v.toFixed(6)).join(" ");
});

$("run-frame").onclick = guarded("frame-out", (out) => {
  const flat = $("points").value.trim().split(/[\s;]+/).flatMap((p) => p.split(",").map(Number));
  if (flat.some((v) => !Number.isInteger(v) || v < 0)) throw new Error("samples must be non-negative integers");
  const r = JSON.parse(frameCheck(...params(), new Uint32Array(flat)));
  const parity = r.parity_no_frame === null ? "not applicable" : r.parity_no_frame ? "predicts no frame" : "no obstruction";
  out.textContent = `frame: ${r.is_frame}  A = ${r.a.toExponential(4)}  B = ${r.b.toExponential(4)}  parity: ${parity}\n` +
    `singular values: ${r.singular_values.map((v) => v.toExponential(4)).join(" ")}`;
});
