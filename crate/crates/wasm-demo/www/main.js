import init, { itGap, simulate, phaseGrid } from "./pkg/ssbm_wasm_demo.js";

const $ = (id) => document.getElementById(id);
const rates = () => ["ap", "bp", "am", "bm"].map((id) => Number($(id).value));

function updateGap() {
  for (const id of ["ap", "bp", "am", "bm"]) $(id + "-v").textContent = `= ${$(id).value}`;
  const g = itGap(...rates());
  $("gap").textContent = g.toFixed(3);
  $("gap").className = g > 0 ? "good" : "bad";
}

function runSimulation() {
  const table = $("result");
  try {
    const s = simulate(Number($("n").value), ...rates(), $("xi").value, Number($("seed").value));
    const rows = [
      ["edges (+ / -)", `${s.positive_edges} / ${s.negative_edges}`],
      ["xi used", s.xi.toFixed(4)],
      ["exact recovery", s.exact ? "yes" : "no"],
      ["misclassified", `${s.misclassified} (${(100 * s.error_rate).toFixed(2)}%)`],
      ["power / sign iterations", `${s.pi_iters} / ${s.gpi_iters}`],
      ["converged", s.converged ? "yes" : "no"],
      ["objective", s.objective.toFixed(2)],
    ];
    s.free();
    table.innerHTML = rows.map(([k, v]) => `<tr><td>${k}</td><td>${v}</td></tr>`).join("");
  } catch (e) {
    table.innerHTML = `<tr><td class="bad">${e.message ?? e}</td></tr>`;
  }
}

function drawGrid(values, steps, lo, hi) {
  const canvas = $("canvas");
  const ctx = canvas.getContext("2d");
  const cell = canvas.width / steps;
  values.forEach((v, k) => {
    const i = Math.floor(k / steps);
    const j = k % steps;
    if (Number.isNaN(v)) {
      ctx.fillStyle = "#bbb";
    } else {
      const c = Math.round(255 * v);
      ctx.fillStyle = `rgb(${c},${c},${Math.round(60 + 0.75 * c)})`;
    }
    ctx.fillRect(j * cell, i * cell, cell + 1, cell + 1);
  });
  // gap = 0 contour: mark pixels whose gap sign differs from a neighbour's.
  const [ap, bp] = rates();
  const w = canvas.width;
  const at = (px) => lo + ((px - cell / 2) / (w - cell)) * (hi - lo);
  const sign = (x, y) => Math.sign(itGap(ap, bp, at(y), at(x)));
  ctx.fillStyle = "#e22";
  for (let y = 0; y < w; y += 2) {
    for (let x = 0; x < w; x += 2) {
      const s = sign(x, y);
      if (s !== sign(x + 2, y) || s !== sign(x, y + 2)) ctx.fillRect(x, y, 2, 2);
    }
  }
}

function runGrid() {
  const steps = Number($("steps").value);
  const lo = Number($("lo").value);
  const hi = Number($("hi").value);
  $("status").textContent = "running...";
  setTimeout(() => {
    const t0 = performance.now();
    try {
      const [ap, bp] = rates();
      const values = phaseGrid(Number($("gn").value), ap, bp, lo, hi, steps, Number($("trials").value), 1);
      drawGrid(Array.from(values), steps, lo, hi);
      $("status").textContent = `done in ${((performance.now() - t0) / 1000).toFixed(1)} s`;
    } catch (e) {
      $("status").textContent = e.message ?? String(e);
    }
  }, 20);
}

await init();
for (const id of ["ap", "bp", "am", "bm"]) $(id).addEventListener("input", updateGap);
$("run").addEventListener("click", runSimulation);
$("grid").addEventListener("click", runGrid);
updateGap();
