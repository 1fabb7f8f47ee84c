// App wiring: screens, pointer + keyboard entry, one render pass per change.

import { ApiClient, Mode } from "./api.js";
import { SurveySession, keyToResponse } from "./state.js";
import { renderCompletion, renderStart, renderStimulus } from "./view.js";

function baseUrl(): string {
  // same-origin by default (the service serves these assets); ?api= overrides
  const override = new URLSearchParams(window.location.search).get("api");
  return override ?? "";
}

export function mountApp(root: HTMLElement, apiBase?: string): SurveySession {
  const session = new SurveySession(new ApiClient(apiBase ?? baseUrl()));
  let screen: "start" | "stimulus" = "start";

  function render(error?: string): void {
    if (screen === "start") {
      renderStart(root, { onStart: start }, error);
    } else if (session.state.completed) {
      renderCompletion(root, session.state);
    } else {
      renderStimulus(root, session.state, { onRespond: respond, onRetry: retry });
    }
  }

  async function start(mode: Mode, dataset: string, seed?: number): Promise<void> {
    try {
      await session.start(mode, dataset, seed);
      screen = "stimulus";
      render();
    } catch (err) {
      render(`could not start the session: ${err instanceof Error ? err.message : err}`);
    }
  }

  async function respond(value: number): Promise<void> {
    const outcome = await session.submit(value);
    if (outcome.kind !== "ignored") render();
  }

  async function retry(): Promise<void> {
    await session.retry();
    render();
  }

  document.addEventListener("keydown", (event) => {
    if (screen !== "stimulus" || session.state.completed) return;
    const value = keyToResponse(event.key, session.state);
    if (value !== null) void respond(value);
  });

  render();
  return session;
}

const rootElement = document.getElementById("app");
if (rootElement) {
  mountApp(rootElement);
}
