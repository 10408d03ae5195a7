import init, { Demo } from "./pkg/gravkit_wasm.js";

const $ = (id) => document.getElementById(id);
const canvas = $("view");
const ctx = canvas.getContext("2d");

let demo;
let yaw = 0.8, pitch = 0.35, zoom = 2.2;
const target = [0, -20, 100];

function project(x, y, z) {
  x -= target[0]; y -= target[1]; z -= target[2];
  const cy = Math.cos(yaw), sy = Math.sin(yaw);
  const cp = Math.cos(pitch), sp = Math.sin(pitch);
  const x1 = cy * x - sy * z;
  const z1 = sy * x + cy * z;
  const y1 = cp * y - sp * z1;
  const d = sp * y + cp * z1;
  const s = zoom * 400 / (400 + d);
  return [canvas.width / 2 + x1 * s, canvas.height / 2 - y1 * s, d, s];
}

function probe() {
  return [+$("px").value, +$("py").value, +$("pz").value, +$("pr").value];
}

function draw() {
  canvas.width = canvas.clientWidth;
  canvas.height = canvas.clientHeight;
  ctx.clearRect(0, 0, canvas.width, canvas.height);

  const [bx, by, bz, br] = demo.ball();
  const b = project(bx, by, bz);
  ctx.fillStyle = "rgba(90,120,200,0.15)";
  ctx.beginPath(); ctx.arc(b[0], b[1], br * b[3], 0, 2 * Math.PI); ctx.fill();

  const bones = demo.skeleton();
  ctx.strokeStyle = "#555"; ctx.lineWidth = 3;
  for (let i = 0; i < bones.length; i += 6) {
    const a = project(bones[i], bones[i + 1], bones[i + 2]);
    const c = project(bones[i + 3], bones[i + 4], bones[i + 5]);
    ctx.beginPath(); ctx.moveTo(a[0], a[1]); ctx.lineTo(c[0], c[1]); ctx.stroke();
  }

  const pos = demo.positions();
  const col = demo.colors();
  const order = [];
  for (let i = 0; i < pos.length / 3; i++) {
    const p = project(pos[3 * i], pos[3 * i + 1], pos[3 * i + 2]);
    order.push([p[2], p[0], p[1], i]);
  }
  order.sort((a, b) => b[0] - a[0]);
  for (const [, sx, sy, i] of order) {
    ctx.fillStyle = `rgb(${col[3 * i]},${col[3 * i + 1]},${col[3 * i + 2]})`;
    ctx.fillRect(sx - 1, sy - 1, 2.5, 2.5);
  }

  const [px, py, pz, pr] = probe();
  const p = project(px, py, pz);
  ctx.strokeStyle = "#06c"; ctx.lineWidth = 1.5;
  ctx.beginPath(); ctx.arc(p[0], p[1], pr * p[3], 0, 2 * Math.PI); ctx.stroke();
}

function updateProbe() {
  const [x, y, z, r] = probe();
  $("prv").textContent = r;
  const q = JSON.parse(demo.query(x, y, z, r));
  $("probe").textContent = q.error
    ? q.error
    : `reachable: ${q.reachable}\nmin cost: ${q.min_cost === null ? "-" : q.min_cost + "°"}\nfingers: ${q.fingers.join(", ") || "-"}\npoints: ${q.points}`;
  draw();
}

function run() {
  $("stepv").textContent = $("step").value;
  $("gapv").textContent = $("gap").value;
  const t0 = performance.now();
  const n = demo.simulate(+$("step").value, +$("gap").value, $("fingers").value);
  const ms = (performance.now() - t0).toFixed(0);
  const err = demo.error();
  $("stats").innerHTML = `${n} points in ${ms} ms` + (err ? `<div class="err">${err}</div>` : "");
  $("range").textContent = `cost 0° → ${demo.max_cost()}°`;
  boundary();
}

function boundary() {
  const v = +$("voxel").value;
  $("voxv").textContent = v;
  demo.show_boundary(v);
  updateProbe();
}

let drag = null;
canvas.addEventListener("mousedown", (e) => { drag = [e.clientX, e.clientY]; });
window.addEventListener("mouseup", () => { drag = null; });
window.addEventListener("mousemove", (e) => {
  if (!drag) return;
  yaw += (e.clientX - drag[0]) * 0.01;
  pitch = Math.max(-1.5, Math.min(1.5, pitch + (e.clientY - drag[1]) * 0.01));
  drag = [e.clientX, e.clientY];
  draw();
});
canvas.addEventListener("wheel", (e) => {
  e.preventDefault();
  zoom *= Math.exp(-e.deltaY * 0.001);
  draw();
}, { passive: false });
window.addEventListener("resize", draw);

await init();
demo = new Demo();
$("run").addEventListener("click", run);
$("step").addEventListener("change", run);
$("gap").addEventListener("change", run);
$("voxel").addEventListener("input", boundary);
for (const id of ["px", "py", "pz", "pr"]) $(id).addEventListener("input", updateProbe);
run();
