import { OperatorApi, ParticipantApi } from "./api.js";
import { DashboardController } from "./dashboard.js";
import { ParticipantSession } from "./participant.js";
import { escapeHtml } from "./views.js";

const TOKEN_KEY = "lurelab-operator-token";

function participantMain(root: HTMLElement): void {
  const session = new ParticipantSession(new ParticipantApi());
  const draw = () => {
    root.innerHTML = session.render();
  };
  root.addEventListener("click", (event) => {
    const target = (event.target as HTMLElement).closest("[data-open]");
    if (!(target instanceof HTMLElement) || !target.dataset.open) return;
    void session
      .open(target.dataset.open)
      .catch(() => undefined)
      .then(draw);
  });
  const tick = () => void session.refresh().then(draw, () => undefined);
  tick();
  // Pick up folder rotation even when the reader just sits there.
  setInterval(tick, 5000);
}

function operatorMain(root: HTMLElement): void {
  const params = new URLSearchParams(window.location.search);
  let token = params.get("token") ?? window.localStorage.getItem(TOKEN_KEY) ?? "";
  if (!token) token = window.prompt("Operator token") ?? "";
  if (!token) {
    root.innerHTML = `<p class="problem">An operator token is required for this view.</p>`;
    return;
  }
  window.localStorage.setItem(TOKEN_KEY, token);
  const controller = new DashboardController(new OperatorApi("", token), {
    onChange: () => {
      root.innerHTML = controller.render();
    },
  });
  controller.start().catch((err: unknown) => {
    root.innerHTML = `<p class="problem">${escapeHtml(String(err))}</p>`;
  });
}

const root = document.getElementById("app");
if (root) {
  if (window.location.hash.startsWith("#/operator")) operatorMain(root);
  else participantMain(root);
  window.addEventListener("hashchange", () => window.location.reload());
}
