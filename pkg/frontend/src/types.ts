// Wire formats of the gateway JSON API. Field names mirror the server.

export interface ParticipantListing {
  env_index: number;
  files: string[];
  env_status: "active" | "closed" | "complete";
  next_environment_available: boolean;
}

export interface OpenResult {
  name: string;
  body: string;
  duplicate: boolean;
  finalized: boolean;
  exercise_complete: boolean;
}

export interface Elimination {
  scoreboard: Record<string, number>;
  eliminated: string;
  remaining: string[];
}

export type TransitionOutcome =
  | "recorded"
  | "duplicate_ignored"
  | "unknown_file_ignored"
  | "environment_finalized"
  | "campaign_finished"
  | "campaign_inconclusive";

export interface Transition {
  seq: number;
  outcome: TransitionOutcome;
  env_index: number;
  position: number | null;
  name: string | null;
  elimination: Elimination | null;
  prediction: string | null;
}

export interface AccessEntry {
  position: number;
  name: string;
  loc_hash: string;
  timestamp: string;
}

export interface EnvSnapshot {
  index: number;
  host_name: string;
  directory: string;
  status: "active" | "finalized";
  active_motives: string[];
  files: string[];
  access_log: AccessEntry[];
  scoreboard: Record<string, number> | null;
  eliminated: string | null;
  remaining: string[] | null;
}

export interface StatusSnapshot {
  campaign_id: string;
  status: "running" | "finished" | "inconclusive";
  accesses_per_env: number;
  active_motives: string[];
  prediction: string | null;
  transition_count: number;
  environments: EnvSnapshot[];
  ingest?: Record<string, number>;
}
