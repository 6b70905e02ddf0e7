import init, { bell_demo, two_time_demo, semi_fan, version } from "./pkg/pwlab_wasm_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const BLUE = "#2b6cb0", ORANGE = "#dd6b20", GREY = "#a0aec0";

// Axes box with linear scales; returns data-to-pixel mappers.
function frame(canvas, xr, yr, xlabel, ylabel) {
  const g = canvas.getContext("2d");
  const m = { l: 50, r: 10, t: 10, b: 34 };
  const w = canvas.width - m.l - m.r, h = canvas.height - m.t - m.b;
  g.clearRect(0, 0, canvas.width, canvas.height);
  g.strokeStyle = "#333";
  g.strokeRect(m.l, m.t, w, h);
  const px = (x) => m.l + (x - xr[0]) / (xr[1] - xr[0]) * w;
  const py = (y) => m.t + h - (y - yr[0]) / (yr[1] - yr[0]) * h;
  g.fillStyle = "#333";
  g.font = "11px sans-serif";
  g.textAlign = "center";
  for (let i = 0; i <= 5; i++) {
    const x = xr[0] + (xr[1] - xr[0]) * i / 5;
    g.fillText(x.toFixed(2), px(x), m.t + h + 14);
  }
  g.fillText(xlabel, m.l + w / 2, canvas.height - 4);
  g.textAlign = "right";
  for (let i = 0; i <= 4; i++) {
    const y = yr[0] + (yr[1] - yr[0]) * i / 4;
    g.fillText(y.toFixed(2), m.l - 4, py(y) + 4);
  }
  g.save();
  g.translate(12, m.t + h / 2);
  g.rotate(-Math.PI / 2);
  g.textAlign = "center";
  g.fillText(ylabel, 0, 0);
  g.restore();
  return { g, px, py };
}

function line(f, xs, ys, colour, width = 1.5, alpha = 1) {
  const { g, px, py } = f;
  g.globalAlpha = alpha;
  g.strokeStyle = colour;
  g.lineWidth = width;
  g.beginPath();
  xs.forEach((x, i) => (i ? g.lineTo(px(x), py(ys[i])) : g.moveTo(px(x), py(ys[i]))));
  g.stroke();
  g.globalAlpha = 1;
  g.lineWidth = 1;
}

function dots(f, xs, ys, colour) {
  const { g, px, py } = f;
  g.fillStyle = colour;
  xs.forEach((x, i) => { g.beginPath(); g.arc(px(x), py(ys[i]), 2, 0, 2 * Math.PI); g.fill(); });
}

function runBell() {
  const r = JSON.parse(bell_demo(num("b-x"), num("b-xp"), num("b-y"), num("b-yp"), 73, num("b-n"), BigInt(num("b-seed"))));
  const f = frame($("b-plot"), [0, 2 * Math.PI], [-1.05, 1.05], "x (Alice's phase)", "E(x, y)");
  const colours = [BLUE, ORANGE];
  r.curves.forEach((c, k) => {
    line(f, r.x, c.analytic, colours[k]);
    dots(f, r.x, c.sampled, colours[k]);
  });
  const [x, xp, y, yp] = r.settings;
  $("b-out").textContent =
    `S(${x}, ${xp}, ${y}, ${yp}) = ${r.chsh.toFixed(6)} analytic, ` +
    `${r.chsh_sampled.toFixed(4)} +- ${r.std_err.toFixed(4)} sampled` +
    `  (blue: y = ${r.curves[0].y}, orange: y' = ${r.curves[1].y}; lines analytic, dots sampled)`;
}

function runTwoTime() {
  const r = JSON.parse(two_time_demo(num("t-x"), num("t-xp"), num("t-y"), num("t-y2"), num("t-n"), 1n));
  const fmt = (v) => (v === null ? "" : v.toFixed(5));
  let html = "<table><tr><th>a</th><th>a'</th><th>b</th><th>p</th><th>sampled</th></tr>";
  for (const e of r.joint) {
    html += `<tr><td>${e.a}</td><td>${e.ap}</td><td>${e.b}</td><td>${fmt(e.p)}</td><td>${fmt(e.sampled)}</td></tr>`;
  }
  html += "</table><table><tr><th>Bob's y</th><th>P(1,1)</th><th>P(1,2)</th><th>P(2,1)</th><th>P(2,2)</th></tr>";
  for (const a of r.alice) {
    const t = a.table;
    html += `<tr><td>${a.y}</td><td>${fmt(t[0][0])}</td><td>${fmt(t[0][1])}</td><td>${fmt(t[1][0])}</td><td>${fmt(t[1][1])}</td></tr>`;
  }
  html += `</table><div class="out">signalling gap between the two y values: ${r.gap.toFixed(6)}</div>`;
  $("t-out").innerHTML = html;
}

function runFan() {
  $("s-out").textContent = "running...";
  // let the message paint before the blocking call
  setTimeout(() => {
    let r;
    try {
      r = JSON.parse(semi_fan(num("s-r"), num("s-n"), BigInt(num("s-seed")), 150));
    } catch (e) {
      $("s-out").innerHTML = `<span class="err">${e}</span>`;
      return;
    }
    let lo = Infinity, hi = -Infinity;
    for (const tr of r.trajectories) for (const x of tr.x) { lo = Math.min(lo, x); hi = Math.max(hi, x); }
    const f = frame($("s-plot"), [0, r.t_final], [lo, hi], "t", "x");
    line(f, [0, r.t_final], [r.x_c, r.x_c], GREY, 1);
    const colour = { bounced: BLUE, crossed: ORANGE, inconclusive: GREY };
    for (const tr of r.trajectories) line(f, tr.t, tr.x, colour[tr.label], 0.8, 0.7);
    const extra = r.correlation === null ? "" :
      `, pointer-path correlation ${r.correlation.toFixed(3)}, surreal fraction ${r.surreal_fraction.toFixed(3)}`;
    $("s-out").textContent =
      `${r.regime}: bounce ${r.bounce.toFixed(3)} [${r.ci[0].toFixed(3)}, ${r.ci[1].toFixed(3)}]${extra}` +
      "  (blue bounced, orange crossed, grey inconclusive)";
  }, 10);
}

init().then(() => {
  $("status").textContent = `pwlab ${version()}`;
  $("b-run").onclick = runBell;
  $("t-run").onclick = runTwoTime;
  $("s-run").onclick = runFan;
  runBell();
  runTwoTime();
  runFan();
}).catch((e) => {
  $("status").innerHTML = `<span class="err">Could not load the module: ${e}</span>`;
});
