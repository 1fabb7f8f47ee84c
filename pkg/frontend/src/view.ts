// DOM rendering. Patches carry the stimulus hex verbatim: backgroundColor is
// set to the exact string from the service and mirrored in data-hex, with no
// client-side color transformation.

import { Mode, Stimulus } from "./api.js";
import { UiSessionState } from "./state.js";

export interface StartHandlers {
  onStart(mode: Mode, dataset: string, seed?: number): void;
}

export interface StimulusHandlers {
  onRespond(value: number): void;
  onRetry(): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderStart(root: HTMLElement, handlers: StartHandlers, error?: string): void {
  root.replaceChildren();
  root.removeAttribute("style");
  root.className = "screen start-screen";

  const panel = el("div", "panel");
  panel.appendChild(el("h1", undefined, "Color difference survey"));

  if (error) {
    const banner = el("div", "error-banner", error);
    const retry = el("button", "retry-btn", "Retry");
    retry.addEventListener("click", () => handlers.onStart(readMode(), readDataset(), readSeed()));
    banner.appendChild(retry);
    panel.appendChild(banner);
  }

  const modeRow = el("div", "field");
  modeRow.appendChild(el("label", undefined, "Mode"));
  for (const mode of ["rating", "2afc"] as Mode[]) {
    const label = el("label", "radio");
    const input = el("input");
    input.type = "radio";
    input.name = "mode";
    input.value = mode;
    input.checked = mode === "rating";
    label.appendChild(input);
    label.appendChild(document.createTextNode(mode === "rating" ? " rate 0-10" : " pick A or B"));
    modeRow.appendChild(label);
  }
  panel.appendChild(modeRow);

  const datasetRow = el("div", "field");
  datasetRow.appendChild(el("label", undefined, "Dataset"));
  const datasetInput = el("input", "dataset-input");
  datasetInput.id = "dataset";
  datasetInput.value = "pairs_default";
  datasetRow.appendChild(datasetInput);
  panel.appendChild(datasetRow);

  const seedRow = el("div", "field");
  seedRow.appendChild(el("label", undefined, "Seed (optional)"));
  const seedInput = el("input", "seed-input");
  seedInput.id = "seed";
  seedInput.type = "number";
  seedRow.appendChild(seedInput);
  panel.appendChild(seedRow);

  const start = el("button", "start-btn", "Start");
  start.addEventListener("click", () => handlers.onStart(readMode(), readDataset(), readSeed()));
  panel.appendChild(start);
  root.appendChild(panel);

  function readMode(): Mode {
    const checked = root.querySelector<HTMLInputElement>("input[name=mode]:checked");
    return (checked?.value as Mode) ?? "rating";
  }
  function readDataset(): string {
    return root.querySelector<HTMLInputElement>("#dataset")?.value.trim() || "pairs_default";
  }
  function readSeed(): number | undefined {
    const raw = root.querySelector<HTMLInputElement>("#seed")?.value.trim();
    if (!raw) return undefined;
    const n = parseInt(raw, 10);
    return Number.isFinite(n) ? n : undefined;
  }
}

function renderPairGroup(stimulus: Stimulus, index: number, labeled: boolean): HTMLElement {
  const pair = stimulus.pairs[index];
  const group = el("div", "pair-group");
  group.dataset.pairId = String(pair.id);
  if (labeled) {
    group.appendChild(el("div", "group-label", index === 0 ? "A" : "B"));
  }
  const patches = el("div", "pair");
  patches.style.columnGap = `${stimulus.display.separation_px}px`;
  for (const hex of [pair.a, pair.b]) {
    const patch = el("div", "patch");
    patch.style.backgroundColor = hex;
    patch.dataset.hex = hex;
    patches.appendChild(patch);
  }
  group.appendChild(patches);
  return group;
}

export function renderStimulus(
  root: HTMLElement,
  state: UiSessionState,
  handlers: StimulusHandlers,
): void {
  const stimulus = state.current;
  if (!stimulus) return;
  root.replaceChildren();
  root.className = "screen stimulus-screen";
  root.style.backgroundColor = stimulus.display.background;

  const progress = el("div", "progress",
    `${state.progressDone + 1} / ${state.progressTotal}`);
  root.appendChild(progress);

  const stage = el("div", "stage");
  const twoAfc = stimulus.mode === "2afc";
  for (let i = 0; i < stimulus.pairs.length; i++) {
    stage.appendChild(renderPairGroup(stimulus, i, twoAfc));
  }
  root.appendChild(stage);

  const controls = el("div", "controls");
  if (twoAfc) {
    controls.appendChild(el("div", "prompt", "Which pair differs more? (keys A / B)"));
    const row = el("div", "button-row");
    stimulus.pairs.forEach((pair, i) => {
      const btn = el("button", "choice-btn", i === 0 ? "A" : "B");
      btn.dataset.value = String(pair.id);
      btn.addEventListener("click", () => handlers.onRespond(pair.id));
      row.appendChild(btn);
    });
    controls.appendChild(row);
  } else {
    controls.appendChild(el("div", "prompt",
      "How different are the two colors? 0 = identical, 10 = extremely (keys 0-9)"));
    const row = el("div", "button-row rating-row");
    for (let v = 0; v <= 10; v++) {
      const btn = el("button", "rating-btn", String(v));
      btn.dataset.value = String(v);
      btn.addEventListener("click", () => handlers.onRespond(v));
      row.appendChild(btn);
    }
    controls.appendChild(row);
  }

  if (state.pendingResponse !== null) {
    const banner = el("div", "error-banner",
      state.lastError ?? "connection lost; your response is saved");
    const retry = el("button", "retry-btn", "Retry");
    retry.addEventListener("click", () => handlers.onRetry());
    banner.appendChild(retry);
    controls.appendChild(banner);
  }
  root.appendChild(controls);
}

export function renderCompletion(root: HTMLElement, state: UiSessionState): void {
  root.replaceChildren();
  root.removeAttribute("style");
  root.className = "screen completion-screen";
  const panel = el("div", "panel");
  panel.appendChild(el("h1", undefined, "All done, thank you!"));
  panel.appendChild(el("p", "summary",
    `${state.progressDone} of ${state.progressTotal} judgments recorded ` +
    `(session ${state.sessionId ?? "?"}).`));
  const again = el("button", "start-btn", "Run another session");
  again.addEventListener("click", () => window.location.reload());
  panel.appendChild(again);
  root.appendChild(panel);
}
