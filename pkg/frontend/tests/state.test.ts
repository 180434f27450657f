import { describe, expect, it } from "vitest";

import {
  applySnapshot,
  applyTransition,
  dashboardProjection,
  initialDashboard,
  snapshotProjection,
  type DashboardState,
} from "../src/state.js";
import type { StatusSnapshot, Transition } from "../src/types.js";

const TABLE_BOARD = {
  profit: 120,
  satisfaction: 80,
  geopolitical: 60,
  discontent: 40,
  ideological: 0,
};

function recorded(seq: number, position: number, name: string, envIndex = 1): Transition {
  return {
    seq,
    outcome: "recorded",
    env_index: envIndex,
    position,
    name,
    elimination: null,
    prediction: null,
  };
}

function finalized(seq: number, envIndex: number): Transition {
  return {
    seq,
    outcome: "environment_finalized",
    env_index: envIndex,
    position: 6,
    name: null,
    elimination: {
      scoreboard: TABLE_BOARD,
      eliminated: "ideological",
      remaining: ["profit", "geopolitical", "satisfaction", "discontent"],
    },
    prediction: null,
  };
}

function fold(transitions: Transition[], start?: DashboardState): DashboardState {
  return transitions.reduce(applyTransition, start ?? initialDashboard());
}

describe("applyTransition", () => {
  it("tracks opens and creates the follow-up environment on finalization", () => {
    const names = ["a", "b", "c", "d", "e"];
    const state = fold([
      ...names.map((name, i) => recorded(i + 1, i + 1, name)),
      finalized(6, 1),
    ]);

    expect(state.environments.map((env) => env.index)).toEqual([1, 2]);
    const env1 = state.environments[0]!;
    expect(env1.status).toBe("finalized");
    expect(env1.accesses).toBe(6);
    expect(env1.opened).toEqual(names);
    expect(env1.scoreboard).toEqual(TABLE_BOARD);
    expect(env1.eliminated).toBe("ideological");
    expect(state.activeMotives).toEqual([
      "profit",
      "geopolitical",
      "satisfaction",
      "discontent",
    ]);
    expect(state.environments[1]!.status).toBe("active");
    expect(state.status).toBe("unknown");
    expect(state.timeline.at(-1)!.label).toBe("eliminated ideological");
  });

  it("finishes the campaign with a prediction", () => {
    const state = fold([
      {
        seq: 1,
        outcome: "campaign_finished",
        env_index: 4,
        position: 6,
        name: null,
        elimination: {
          scoreboard: { profit: 180, discontent: 120 },
          eliminated: "discontent",
          remaining: ["profit"],
        },
        prediction: "profit",
      },
    ]);
    expect(state.status).toBe("finished");
    expect(state.prediction).toBe("profit");
    // no fifth environment after the last one closes
    expect(state.environments.map((env) => env.index)).toEqual([4]);
  });

  it("marks an abandoned campaign inconclusive", () => {
    const state = fold([
      {
        seq: 1,
        outcome: "campaign_inconclusive",
        env_index: 2,
        position: null,
        name: null,
        elimination: null,
        prediction: null,
      },
    ]);
    expect(state.status).toBe("inconclusive");
    expect(state.prediction).toBeNull();
  });

  it("drops replayed or snapshot-covered messages", () => {
    const first = fold([recorded(1, 1, "a")]);
    expect(applyTransition(first, recorded(1, 1, "a"))).toBe(first);

    const seeded = { ...initialDashboard(), lastSeq: 5 };
    expect(applyTransition(seeded, recorded(3, 1, "a"))).toBe(seeded);
    expect(applyTransition(seeded, recorded(6, 1, "a")).lastSeq).toBe(6);
  });

  it("notes duplicates and unplanted files without counting them", () => {
    const state = fold([
      recorded(1, 1, "a"),
      {
        seq: 2,
        outcome: "duplicate_ignored",
        env_index: 1,
        position: null,
        name: "a",
        elimination: null,
        prediction: null,
      },
      {
        seq: 3,
        outcome: "unknown_file_ignored",
        env_index: 1,
        position: null,
        name: null,
        elimination: null,
        prediction: null,
      },
    ]);
    expect(state.environments[0]!.accesses).toBe(1);
    expect(state.timeline.map((entry) => entry.label)).toEqual([
      "opened a",
      "reopened a",
      "touched an unplanted file",
    ]);
  });
});

function snapshotFixture(): StatusSnapshot {
  return {
    campaign_id: "c-abc",
    status: "running",
    accesses_per_env: 6,
    active_motives: ["profit", "geopolitical", "satisfaction", "discontent"],
    prediction: null,
    transition_count: 6,
    environments: [
      {
        index: 1,
        host_name: "deception-env-1",
        directory: "/srv/env-1",
        status: "finalized",
        active_motives: [
          "profit",
          "ideological",
          "geopolitical",
          "satisfaction",
          "discontent",
        ],
        files: ["a", "b", "c", "d", "e", "f"],
        access_log: ["a", "b", "c", "d", "e", "f"].map((name, i) => ({
          position: i + 1,
          name,
          loc_hash: "0".repeat(64),
          timestamp: "2024-01-01T00:00:00Z",
        })),
        scoreboard: TABLE_BOARD,
        eliminated: "ideological",
        remaining: ["profit", "geopolitical", "satisfaction", "discontent"],
      },
      {
        index: 2,
        host_name: "deception-env-2",
        directory: "/srv/env-2",
        status: "active",
        active_motives: ["profit", "geopolitical", "satisfaction", "discontent"],
        files: ["g", "h"],
        access_log: [],
        scoreboard: null,
        eliminated: null,
        remaining: null,
      },
    ],
  };
}

describe("snapshot and stream agreement", () => {
  it("folding the stream matches the snapshot projection", () => {
    const snap = snapshotFixture();
    const seeded = applySnapshot(initialDashboard(), {
      ...snap,
      status: "running",
      transition_count: 0,
      active_motives: [
        "profit",
        "ideological",
        "geopolitical",
        "satisfaction",
        "discontent",
      ],
      environments: [{ ...snap.environments[0]!, status: "active", access_log: [], scoreboard: null, eliminated: null, remaining: null }],
    });
    const folded = fold(
      [
        ...["a", "b", "c", "d", "e"].map((name, i) => recorded(i + 1, i + 1, name)),
        finalized(6, 1),
      ],
      seeded,
    );
    expect(dashboardProjection(folded)).toEqual(snapshotProjection(snap));
  });

  it("applySnapshot never moves lastSeq backwards", () => {
    const ahead = { ...initialDashboard(), lastSeq: 9 };
    const merged = applySnapshot(ahead, snapshotFixture());
    expect(merged.lastSeq).toBe(9);
    expect(merged.campaignId).toBe("c-abc");
  });
});
