import { describe, expect, test } from "vitest";

import {
  StreamState,
  buildViewModel,
  canSubmitFeedback,
  clipWeights,
  footprintCorners,
  normalizeFeedback,
} from "../src/model.js";
import type { SceneDoc, SessionStatus, StreamRecord } from "../src/types.js";

const SCENE: SceneDoc = {
  table_height: 0,
  workspace: { min: [0.15, -0.45, 0], max: [0.85, 0.45, 0.6] },
  ee_home: [0.45, 0, 0.35, 0, 0, 0],
  objects: [
    { label: "pear", position: [0.55, 0.18, 0.035], yaw: 0,
      extents: [0.06, 0.06, 0.07], flags: ["graspable"] },
    { label: "bottle", position: [0.48, 0.02, 0.08], yaw: 0.5,
      extents: [0.05, 0.05, 0.16], flags: ["obstacle"] },
  ],
};

function sample(seq: number, subtask: number, attempt: number, t: number,
                pose5: number[]): StreamRecord {
  return { seq, type: "sample", subtask, attempt, t, pose5, z: 1 };
}

function status(partial: Partial<SessionStatus> = {}): SessionStatus {
  return {
    id: "s1", state: "executing", task: "t", plan: [], current_subtask: null,
    attempt: 0, feedback_history: [], outcome: null, success: null,
    ee_pose: [0.45, 0, 0.35, 0, 0, 0], held: null, gripper_closed: false,
    last_weights: null, ...partial,
  };
}

describe("footprintCorners", () => {
  test("axis-aligned box", () => {
    const corners = footprintCorners([1, 2, 0], 0, [0.2, 0.1, 0.05]);
    expect(corners).toEqual([[1.1, 2.05], [1.1, 1.95], [0.9, 1.95], [0.9, 2.05]]);
  });

  test("quarter turn swaps length and width", () => {
    const corners = footprintCorners([0, 0, 0], Math.PI / 2, [0.2, 0.1, 0.05]);
    for (const [x, y] of corners) {
      expect(Math.abs(x)).toBeCloseTo(0.05, 10);
      expect(Math.abs(y)).toBeCloseTo(0.1, 10);
    }
  });
});

describe("StreamState", () => {
  test("accumulates traces per subtask/attempt", () => {
    const s = new StreamState();
    s.add(sample(0, 0, 0, 0.0, [0.1, 0.2, 0.3, 0, 0]));
    s.add(sample(1, 0, 0, 0.1, [0.15, 0.2, 0.3, 0, 0]));
    s.add(sample(2, 1, 0, 0.0, [0.2, 0.2, 0.3, 0, 0]));
    expect(s.traces.get("0/0")!.length).toBe(2);
    expect(s.traces.get("1/0")!.length).toBe(1);
    expect(s.activeKey()).toBe("1/0");
  });

  test("replayed records after resubscribe are deduplicated", () => {
    const s = new StreamState();
    s.add(sample(0, 0, 0, 0.0, [0.1, 0, 0, 0, 0]));
    s.add(sample(1, 0, 0, 0.1, [0.2, 0, 0, 0, 0]));
    // reconnect replays the same sequence numbers
    s.add(sample(0, 0, 0, 0.0, [0.1, 0, 0, 0, 0]));
    s.add(sample(1, 0, 0, 0.1, [0.2, 0, 0, 0, 0]));
    s.add(sample(2, 0, 0, 0.2, [0.3, 0, 0, 0, 0]));
    expect(s.traces.get("0/0")!.length).toBe(3);
    expect(s.nextSeq).toBe(3);
  });

  test("events become markers anchored on the trace", () => {
    const s = new StreamState();
    s.add(sample(0, 0, 0, 0.0, [0.1, 0.0, 0.3, 0, 0]));
    s.add(sample(1, 0, 0, 0.5, [0.3, 0.1, 0.3, 0, 0]));
    s.add({ seq: 2, type: "event", subtask: 0, attempt: 0,
            event: { type: "collision", time: 0.5, phase: 0.1, label: "bottle" } });
    const vm = buildViewModel(SCENE, status(), s);
    expect(vm.markers).toEqual([
      { x: 0.3, y: 0.1, kind: "collision", label: "bottle" },
    ]);
  });
});

describe("buildViewModel", () => {
  test("derives purely from service responses", () => {
    const s = new StreamState();
    const vm = buildViewModel(
      SCENE,
      status({ state: "awaiting_feedback", plan: ["REACH(pear)"],
               feedback_history: ["too high"], gripper_closed: true,
               ee_pose: [0.5, 0.1, 0.2, 0, 0, 0.3] }),
      s,
    );
    expect(vm.objects.map((o) => o.label)).toEqual(["pear", "bottle"]);
    expect(vm.ee).toEqual({ x: 0.5, y: 0.1, z: 0.2, yaw: 0.3, closed: true });
    expect(vm.plan).toEqual(["REACH(pear)"]);
    expect(vm.feedbackHistory).toEqual(["too high"]);
    expect(vm.activeTrace).toBeNull();
  });

  test("rebuilding from the same inputs gives the same view", () => {
    const s = new StreamState();
    s.add(sample(0, 0, 0, 0, [0.1, 0.2, 0.3, 0, 0]));
    const a = buildViewModel(SCENE, status(), s);
    const b = buildViewModel(SCENE, status(), s);
    expect(JSON.stringify(a)).toBe(JSON.stringify(b));
  });

  test("heatmap clips to the symmetric unit range", () => {
    const weights = [[0.5, -2.0], [1.5, 0.0]];
    expect(clipWeights(weights)).toEqual([[0.5, -1.0], [1.0, 0.0]]);
    const vm = buildViewModel(SCENE, status({ last_weights: weights }), new StreamState());
    expect(vm.heatmap).toEqual([[0.5, -1.0], [1.0, 0.0]]);
  });
});

describe("feedback gating", () => {
  test("only awaiting_feedback may submit", () => {
    expect(canSubmitFeedback("awaiting_feedback")).toBe(true);
    for (const state of ["idle", "planning", "executing", "done", "failed"]) {
      expect(canSubmitFeedback(state)).toBe(false);
    }
  });

  test("feedback round-trips verbatim apart from surrounding whitespace", () => {
    expect(normalizeFeedback("  too high, you missed the sponge \n"))
      .toBe("too high, you missed the sponge");
    expect(normalizeFeedback("keep the  double  spaces"))
      .toBe("keep the  double  spaces");
  });
});
