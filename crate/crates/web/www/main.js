import init, { random_pair, walk, compare_rho } from "./pkg/rnni_web.js";

const $ = (id) => document.getElementById(id);

function report(target, fn) {
  try {
    fn();
    target.classList.remove("error");
  } catch (e) {
    target.textContent = String(e);
    target.classList.add("error");
  }
}

function showRandom() {
  report($("summary"), () => {
    const pair = JSON.parse(random_pair(Number($("n").value), BigInt($("seed").value)));
    $("from").value = pair.from;
    $("to").value = pair.to;
    $("summary").textContent = "";
  });
}

function showWalk() {
  $("moves").textContent = "";
  $("frames").replaceChildren();
  report($("summary"), () => {
    const result = JSON.parse(walk($("from").value, $("to").value));
    $("summary").textContent =
      `distance ${result.distance}: ${result.nni_moves} NNI moves, ${result.rank_moves} rank moves`;
    $("moves").textContent = result.moves.join("\n");
    if (result.frames.length === 0 && result.distance > 0) {
      $("summary").textContent += " (too many leaves to draw)";
    }
    for (const frame of result.frames) {
      const fig = document.createElement("figure");
      fig.innerHTML = frame.svg;
      const cap = document.createElement("figcaption");
      cap.textContent = frame.next ? `${frame.tree}  then: ${frame.next}` : frame.tree;
      fig.appendChild(cap);
      $("frames").appendChild(fig);
    }
  });
}

function showComparison() {
  report($("comparison"), () => {
    const c = JSON.parse(compare_rho($("from").value, $("to").value, Number($("rho").value)));
    const best = c.optimum === null ? "unknown" : c.optimum;
    $("comparison").textContent =
      `rho = ${c.rho}: FindPath weight ${c.findpath_weight}, lightest path ${best}. ${c.note}`;
  });
}

await init();
$("random").addEventListener("click", showRandom);
$("walk").addEventListener("click", showWalk);
$("compare").addEventListener("click", showComparison);
showWalk();
