import type { EnvSnapshot, StatusSnapshot, Transition } from "./types.js";
import type { StreamState } from "./sse.js";

export interface EnvCard {
  index: number;
  status: "active" | "finalized";
  accesses: number;
  opened: string[];
  scoreboard: Record<string, number> | null;
  eliminated: string | null;
  remaining: string[] | null;
}

export interface TimelineEntry {
  seq: number;
  envIndex: number;
  label: string;
}

export interface DashboardState {
  campaignId: string | null;
  status: "running" | "finished" | "inconclusive" | "unknown";
  accessesPerEnv: number;
  activeMotives: string[];
  prediction: string | null;
  environments: EnvCard[];
  timeline: TimelineEntry[];
  lastSeq: number;
  connection: StreamState | "idle";
}

export function initialDashboard(): DashboardState {
  return {
    campaignId: null,
    status: "unknown",
    accessesPerEnv: 0,
    activeMotives: [],
    prediction: null,
    environments: [],
    timeline: [],
    lastSeq: 0,
    connection: "idle",
  };
}

function envFromSnapshot(env: EnvSnapshot): EnvCard {
  return {
    index: env.index,
    status: env.status,
    accesses: env.access_log.length,
    opened: env.access_log.map((entry) => entry.name),
    scoreboard: env.scoreboard,
    eliminated: env.eliminated,
    remaining: env.remaining,
  };
}

/** Authoritative overwrite from /api/operator/status; local timeline is kept. */
export function applySnapshot(state: DashboardState, snap: StatusSnapshot): DashboardState {
  return {
    ...state,
    campaignId: snap.campaign_id,
    status: snap.status,
    accessesPerEnv: snap.accesses_per_env,
    activeMotives: snap.active_motives,
    prediction: snap.prediction,
    environments: snap.environments.map(envFromSnapshot),
    lastSeq: Math.max(state.lastSeq, snap.transition_count),
  };
}

function blankEnv(index: number): EnvCard {
  return {
    index,
    status: "active",
    accesses: 0,
    opened: [],
    scoreboard: null,
    eliminated: null,
    remaining: null,
  };
}

/**
 * Fold one stream message into the dashboard. Messages at or below `lastSeq`
 * were already covered by a snapshot or an earlier delivery and are dropped,
 * so replays after a resume are harmless.
 */
export function applyTransition(state: DashboardState, t: Transition): DashboardState {
  if (t.seq <= state.lastSeq) return state;
  const environments = state.environments.map((card) => ({ ...card }));
  if (!environments.some((card) => card.index === t.env_index)) {
    environments.push(blankEnv(t.env_index));
    environments.sort((a, b) => a.index - b.index);
  }
  const env = environments.find((card) => card.index === t.env_index)!;
  const next: DashboardState = { ...state, environments, lastSeq: t.seq };
  const note = (label: string) => {
    next.timeline = [...state.timeline, { seq: t.seq, envIndex: t.env_index, label }];
  };

  switch (t.outcome) {
    case "recorded":
      env.accesses = t.position ?? env.accesses + 1;
      if (t.name) env.opened = [...env.opened, t.name];
      note(`opened ${t.name ?? "a document"}`);
      break;
    case "duplicate_ignored":
      note(`reopened ${t.name ?? "a document"}`);
      break;
    case "unknown_file_ignored":
      note("touched an unplanted file");
      break;
    case "environment_finalized":
    case "campaign_finished":
      env.status = "finalized";
      if (t.position !== null) env.accesses = t.position;
      if (t.elimination) {
        env.scoreboard = t.elimination.scoreboard;
        env.eliminated = t.elimination.eliminated;
        env.remaining = t.elimination.remaining;
        next.activeMotives = t.elimination.remaining;
        note(`eliminated ${t.elimination.eliminated}`);
      } else {
        note("environment closed");
      }
      if (t.outcome === "campaign_finished") {
        next.status = "finished";
        next.prediction = t.prediction;
      } else if (!environments.some((card) => card.index === t.env_index + 1)) {
        // The engine provisions the follow-up share in the same step.
        environments.push(blankEnv(t.env_index + 1));
      }
      break;
    case "campaign_inconclusive":
      next.status = "inconclusive";
      note("campaign abandoned without a prediction");
      break;
  }
  return next;
}

export interface Projection {
  status: string;
  prediction: string | null;
  activeMotives: string[];
  environments: Array<{
    index: number;
    status: string;
    accesses: number;
    eliminated: string | null;
    scoreboard: Record<string, number> | null;
  }>;
}

/** The slice of dashboard state that stream messages alone must reconstruct. */
export function dashboardProjection(state: DashboardState): Projection {
  return {
    status: state.status,
    prediction: state.prediction,
    activeMotives: [...state.activeMotives],
    environments: state.environments.map((env) => ({
      index: env.index,
      status: env.status,
      accesses: env.accesses,
      eliminated: env.eliminated,
      scoreboard: env.scoreboard,
    })),
  };
}

export function snapshotProjection(snap: StatusSnapshot): Projection {
  return dashboardProjection(applySnapshot(initialDashboard(), snap));
}
