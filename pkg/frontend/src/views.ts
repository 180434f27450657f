import type { DashboardState, EnvCard } from "./state.js";
import type { ParticipantListing } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

export interface ParticipantViewState {
  listing: ParticipantListing | null;
  openedNames: ReadonlySet<string>;
  currentDoc: { name: string; body: string } | null;
  notice: string | null;
  complete: boolean;
  error: string | null;
}

/**
 * Participant markup stays deliberately bland: share number, document names,
 * document text. Nothing the gateway redacts may be introduced here.
 */
export function renderParticipant(state: ParticipantViewState): string {
  if (!state.listing) {
    return `<section class="explorer"><p class="hint">Loading the shared folder…</p></section>`;
  }
  const listing = state.listing;
  const rows = listing.files
    .map((name) => {
      const viewed = state.openedNames.has(name);
      const marker = viewed ? ` <span class="viewed">viewed</span>` : "";
      return `<li><button type="button" data-open="${escapeHtml(name)}">${escapeHtml(name)}</button>${marker}</li>`;
    })
    .join("");
  const doc = state.currentDoc
    ? `<article class="doc"><h3>${escapeHtml(state.currentDoc.name)}</h3><pre>${escapeHtml(state.currentDoc.body)}</pre></article>`
    : `<article class="doc"><p class="hint">Select a document to read it.</p></article>`;
  const notice = state.notice ? `<p class="notice">${escapeHtml(state.notice)}</p>` : "";
  const done = state.complete
    ? `<div class="done">This session has ended. You can close the window.</div>`
    : "";
  const error = state.error ? `<p class="problem">${escapeHtml(state.error)}</p>` : "";
  return [
    `<section class="explorer" data-share="${listing.env_index}">`,
    `<h2>Shared documents</h2>`,
    `<p class="hint">Folder ${listing.env_index} · ${listing.files.length} documents</p>`,
    done,
    notice,
    error,
    `<div class="split"><ul class="docs">${rows}</ul>${doc}</div>`,
    `</section>`,
  ].join("");
}

function renderBars(scoreboard: Record<string, number>): string {
  const entries = Object.entries(scoreboard).sort((a, b) => b[1] - a[1]);
  const top = Math.max(1, ...entries.map(([, score]) => score));
  const rows = entries
    .map(([motive, score]) => {
      const pct = Math.round((100 * score) / top);
      return (
        `<div class="bar-row"><span class="bar-label">${escapeHtml(motive)}</span>` +
        `<span class="bar-track"><span class="bar-fill" style="width:${pct}%" data-score="${score}"></span></span>` +
        `<span class="bar-value">${score}</span></div>`
      );
    })
    .join("");
  return `<div class="board">${rows}</div>`;
}

function renderEnvCard(env: EnvCard, accessesPerEnv: number): string {
  const opened = env.opened
    .map((name, i) => `<li>${i + 1}. ${escapeHtml(name)}</li>`)
    .join("");
  const board = env.scoreboard ? renderBars(env.scoreboard) : "";
  const cut = env.eliminated
    ? `<p class="cut">eliminated: <strong>${escapeHtml(env.eliminated)}</strong></p>`
    : "";
  const quota = accessesPerEnv > 0 ? ` / ${accessesPerEnv}` : "";
  return [
    `<section class="env" data-env="${env.index}" data-env-status="${env.status}">`,
    `<h3>Environment ${env.index} <span class="status">${env.status}</span></h3>`,
    `<p class="opens-count">${env.accesses}${quota} opens</p>`,
    opened ? `<ol class="opens">${opened}</ol>` : "",
    board,
    cut,
    `</section>`,
  ].join("");
}

export function renderDashboard(state: DashboardState): string {
  const banner = state.prediction
    ? `<div class="banner" data-prediction="${escapeHtml(state.prediction)}">Predicted motive: <strong>${escapeHtml(state.prediction)}</strong></div>`
    : state.status === "inconclusive"
      ? `<div class="banner banner-muted">Campaign ended without a prediction.</div>`
      : "";
  const envs = state.environments
    .map((env) => renderEnvCard(env, state.accessesPerEnv))
    .join("");
  const timeline = state.timeline
    .slice(-30)
    .map(
      (entry) =>
        `<li data-seq="${entry.seq}">#${entry.seq} env ${entry.envIndex}: ${escapeHtml(entry.label)}</li>`,
    )
    .join("");
  const motives = state.activeMotives.map((m) => escapeHtml(m)).join(", ");
  return [
    `<section class="dashboard">`,
    `<header class="dash-head">`,
    `<h2>Campaign ${escapeHtml(state.campaignId ?? "…")}</h2>`,
    `<span class="pill" data-status="${state.status}">${state.status}</span>`,
    `<span class="conn" data-conn="${state.connection}">${state.connection}</span>`,
    `</header>`,
    banner,
    `<p class="motives">candidates in play: ${motives || "…"}</p>`,
    `<div class="envs">${envs}</div>`,
    `<h3>Activity</h3>`,
    `<ol class="timeline">${timeline}</ol>`,
    `</section>`,
  ].join("");
}
