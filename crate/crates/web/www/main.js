import init, { Demo } from "./pkg/hsod_web.js";

const $ = (id) => document.getElementById(id);
let demo = null;

function paint(canvas, rgba, size) {
  canvas.width = size;
  canvas.height = size;
  const img = new ImageData(new Uint8ClampedArray(rgba), size, size);
  canvas.getContext("2d").putImageData(img, 0, 0);
}

function plotRoc(points) {
  const c = $("roc").getContext("2d");
  const s = $("roc").width;
  c.clearRect(0, 0, s, s);
  c.strokeStyle = "#bbb";
  c.beginPath();
  c.moveTo(0, s);
  c.lineTo(s, 0);
  c.stroke();
  c.strokeStyle = "#c33";
  c.beginPath();
  for (let i = 0; i < points.length; i += 2) {
    const x = points[i] * s;
    const y = s - points[i + 1] * s;
    if (i === 0) c.moveTo(x, y); else c.lineTo(x, y);
  }
  c.stroke();
}

function guard(f) {
  return () => {
    $("status").textContent = "";
    try {
      f();
    } catch (e) {
      $("status").textContent = String(e.message ?? e);
    }
  };
}

const build = guard(() => {
  demo?.free();
  demo = new Demo(
    Number($("size").value),
    Number($("bands").value),
    Number($("radius").value),
    Number($("noise").value),
    BigInt($("seed").value),
  );
  const n = demo.size();
  paint($("gt"), demo.ground_truth_rgba(), n);
  paint($("sal"), demo.saliency_rgba(Number($("which").value)), n);
  $("report").textContent = "";
  computeEdge();
});

const computeEdge = guard(() => {
  if (!demo) return;
  const k = Number($("k").value);
  const t = performance.now();
  const rgba = demo.edge_rgba(k);
  paint($("edges"), rgba, demo.size());
  $("edge-cap").textContent = `spectral edge, k=${k} (${(performance.now() - t).toFixed(0)} ms)`;
});

const score = guard(() => {
  if (!demo) return;
  const i = Number($("which").value);
  paint($("sal"), demo.saliency_rgba(i), demo.size());
  $("sal-cap").textContent = `saliency I_S_${i + 1}`;
  $("report").textContent = demo.metrics(i);
  plotRoc(demo.roc(i));
});

await init();
$("build").onclick = build;
$("edge").onclick = computeEdge;
$("eval").onclick = score;
$("which").onchange = score;
build();
score();
