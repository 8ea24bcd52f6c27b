import init, { conversion_demo, grid_rows_demo, analysis_curves } from './pkg/coopcast_wasm.js';

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function report(id, text, isError = false) {
  $(id).textContent = text;
  $(id).classList.toggle('err', isError);
}

function call(outId, f) {
  try {
    return JSON.parse(f());
  } catch (e) {
    report(outId, String(e.message ?? e), true);
    return null;
  }
}

// Fit points into the canvas with a margin; returns a mapper and the scale.
function viewport(canvas, pts, pad = 30) {
  const xs = pts.map((p) => p[0]), ys = pts.map((p) => p[1]);
  const [x0, x1, y0, y1] = [Math.min(...xs), Math.max(...xs), Math.min(...ys), Math.max(...ys)];
  const s = Math.min((canvas.width - 2 * pad) / (x1 - x0 || 1), (canvas.height - 2 * pad) / (y1 - y0 || 1));
  return { s, map: ([x, y]) => [pad + (x - x0) * s, canvas.height - pad - (y - y0) * s] };
}

function circle(ctx, [x, y], r, stroke, fill) {
  ctx.beginPath();
  ctx.arc(x, y, r, 0, 2 * Math.PI);
  if (fill) { ctx.fillStyle = fill; ctx.fill(); }
  if (stroke) { ctx.strokeStyle = stroke; ctx.stroke(); }
}

function drawConversion() {
  const d = call('c-out', () => conversion_demo($('c-kind').value, num('c-n'), num('c-alpha'), num('c-seed')));
  if (!d) return;
  const canvas = $('c-canvas'), ctx = canvas.getContext('2d');
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const { s, map } = viewport(canvas, d.positions);
  for (const disk of d.disks) {
    const c = map(d.positions[disk.center]);
    ctx.lineWidth = disk.selected ? 2 : 0.5;
    circle(ctx, c, disk.radius * s, disk.selected ? '#d2691e' : '#bbb',
      disk.selected ? 'rgba(210,105,30,0.08)' : null);
  }
  ctx.lineWidth = 1;
  for (const [w, p] of d.converted) {
    const alpha = num('c-alpha');
    circle(ctx, map(d.positions[w]), Math.pow(p, 1 / alpha) * s, 'rgba(0,90,200,0.5)');
  }
  const coopTx = new Set(d.coop.map((e) => e[0]));
  const convTx = new Set(d.converted.map((e) => e[0]));
  d.positions.forEach((p, i) => {
    const fill = i === d.source ? '#c00' : convTx.has(i) ? '#0050c8' : coopTx.has(i) ? '#4a4' : '#333';
    circle(ctx, map(p), i === d.source || convTx.has(i) ? 5 : 3, null, fill);
  });
  report('c-out',
    `cooperative total   ${d.coop_total.toPrecision(6)}  (${d.coop.length} transmitters, green)\n` +
    `converted total     ${d.converted_total.toPrecision(6)}  (${d.converted.length} transmitters, blue rings = reach)\n` +
    `ratio               ${(d.converted_total / d.coop_total).toPrecision(4)}\n` +
    `selected disks      ${d.selected.length} (orange), source in red`);
}

let gridSource = null;

function drawGrid() {
  const m = num('g-m');
  if (gridSource === null || gridSource >= m * m) gridSource = Math.floor(m / 2) * m + Math.floor(m / 2);
  const d = call('g-out', () => grid_rows_demo(m, num('g-l'), $('g-borders').checked, gridSource));
  if (!d) return;
  const canvas = $('g-canvas'), ctx = canvas.getContext('2d');
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const cell = canvas.width / m;
  const rank = new Map(d.order.map((u, k) => [u, k]));
  for (let u = 0; u < m * m; u++) {
    const [i, j] = [Math.floor(u / m), u % m];
    const x = (j + 0.5) * cell, y = (i + 0.5) * cell;
    let fill;
    if (u === d.source) fill = '#c00';
    else if (rank.has(u)) fill = `hsl(${220 - 180 * rank.get(u) / d.order.length}, 70%, 45%)`;
    else fill = d.received[u] >= 1 - 1e-9 ? '#bbb' : '#fff';
    circle(ctx, [x, y], Math.max(2, cell * 0.3), '#999', fill);
  }
  report('g-out',
    `row spacing ${d.spacing}, ${d.delivered ? 'delivers' : 'DOES NOT deliver'}\n` +
    `cooperative total   ${d.coop_total}  (transmitters coloured blue to yellow in order)\n` +
    `every node relays   ${d.all_nodes_total}\n` +
    `gain                ${d.gain.toPrecision(4)}\n` +
    `cooperative bound   ${d.coop_lower_bound.toPrecision(6)}`, !d.delivered);
}

function drawCurves() {
  const d = call('a-out', () => analysis_curves(num('a-alpha'), num('a-gamma')));
  if (!d) return;
  const canvas = $('a-canvas'), ctx = canvas.getContext('2d');
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const pad = 35, W = canvas.width - 2 * pad, H = canvas.height - 2 * pad;
  const xs = d.zeta.map((p) => Math.log(p[0] * p[0])), ys = d.zeta.map((p) => p[1]);
  const [x0, x1, y1] = [xs[0], xs[xs.length - 1], Math.max(...ys)];
  ctx.strokeStyle = '#999';
  ctx.strokeRect(pad, pad, W, H);
  ctx.beginPath();
  ctx.strokeStyle = '#0050c8';
  xs.forEach((x, k) => {
    const px = pad + (x - x0) / (x1 - x0) * W, py = pad + H - ys[k] / y1 * H;
    k ? ctx.lineTo(px, py) : ctx.moveTo(px, py);
  });
  ctx.stroke();
  ctx.fillStyle = '#222';
  ctx.fillText('ln n', pad + W - 20, pad + H + 20);
  ctx.fillText(`zeta (max ${y1.toPrecision(4)})`, pad + 4, pad - 8);
  const b = d.beta;
  report('a-out',
    `zeta at n=${d.zeta[d.zeta.length - 1][0] ** 2}: ${y1.toPrecision(6)}\n` +
    (b ? `beta ${b.beta.toPrecision(6)}  beta1 ${b.beta1.toPrecision(6)}  beta2 ${b.beta2.toPrecision(6)}`
       : 'beta constants need alpha > 2 and gamma > 1'));
}

await init();
$('c-go').addEventListener('click', drawConversion);
for (const id of ['c-kind', 'c-n', 'c-alpha', 'c-seed']) $(id).addEventListener('change', drawConversion);
for (const id of ['g-m', 'g-l', 'g-borders']) $(id).addEventListener('change', drawGrid);
$('g-canvas').addEventListener('click', (ev) => {
  const m = num('g-m'), cell = $('g-canvas').width / m;
  const r = $('g-canvas').getBoundingClientRect();
  const j = Math.floor((ev.clientX - r.left) / cell), i = Math.floor((ev.clientY - r.top) / cell);
  if (i >= 0 && i < m && j >= 0 && j < m) { gridSource = i * m + j; drawGrid(); }
});
for (const id of ['a-alpha', 'a-gamma']) $(id).addEventListener('input', drawCurves);
drawConversion();
drawGrid();
drawCurves();
