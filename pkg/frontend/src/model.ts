/** Pure view-model derivation: no DOM, no network, no client-side physics.
 *
 * Everything rendered derives from service responses: the scene snapshot,
 * the session status, and the accumulated rollout stream records.
 */

import type {
  EventRecord,
  SampleRecord,
  SceneDoc,
  SessionStatus,
  StreamRecord,
} from "./types.js";

export interface TracePoint {
  x: number;
  y: number;
  z: number;
  yaw: number;
  grip: number;
  t: number;
}

export interface Trace {
  key: string; // "subtask/attempt"
  points: TracePoint[];
}

export interface Marker {
  x: number;
  y: number;
  kind: string;
  label: string;
}

export interface FootprintPoly {
  label: string;
  corners: [number, number][];
  center: [number, number];
  top: number;
  flags: string[];
}

export interface ViewModel {
  workspace: { min: number[]; max: number[] };
  objects: FootprintPoly[];
  traces: Trace[];
  activeTrace: Trace | null;
  markers: Marker[];
  ee: { x: number; y: number; z: number; yaw: number; closed: boolean } | null;
  state: string;
  plan: string[];
  currentSubtask: string | null;
  attempt: number;
  feedbackHistory: string[];
  outcome: { success: boolean; kind: string; reason: string } | null;
  success: boolean | null;
  heatmap: number[][] | null; // clipped to [-1, 1]
}

export function footprintCorners(
  center: number[], yaw: number, extents: number[],
): [number, number][] {
  const hl = extents[0] / 2;
  const hw = extents[1] / 2;
  const c = Math.cos(yaw);
  const s = Math.sin(yaw);
  const local: [number, number][] = [[hl, hw], [hl, -hw], [-hl, -hw], [-hl, hw]];
  return local.map(([lx, ly]) => [
    center[0] + c * lx - s * ly,
    center[1] + s * lx + c * ly,
  ]);
}

/** Clip a weight matrix to the symmetric [-1, 1] range used by the heatmap. */
export function clipWeights(weights: number[][] | null): number[][] | null {
  if (!weights) return null;
  return weights.map((row) => row.map((v) => Math.max(-1, Math.min(1, v))));
}

/** Accumulates rollout records; resubscribe-safe via `nextSeq`. */
export class StreamState {
  nextSeq = 0;
  traces = new Map<string, TracePoint[]>();
  events: EventRecord[] = [];
  order: string[] = [];

  add(record: StreamRecord): void {
    if (record.seq < this.nextSeq) return; // replayed duplicate
    this.nextSeq = record.seq + 1;
    if (record.type === "sample") {
      const sample = record as SampleRecord;
      const key = `${sample.subtask}/${sample.attempt}`;
      let points = this.traces.get(key);
      if (!points) {
        points = [];
        this.traces.set(key, points);
        this.order.push(key);
      }
      points.push({
        x: sample.pose5[0],
        y: sample.pose5[1],
        z: sample.pose5[2],
        yaw: sample.pose5[3],
        grip: sample.pose5[4],
        t: sample.t,
      });
    } else if (record.type === "event") {
      this.events.push(record as EventRecord);
    }
  }

  activeKey(): string | null {
    return this.order.length ? this.order[this.order.length - 1] : null;
  }
}

function markerFor(stream: StreamState, ev: EventRecord): Marker | null {
  if (ev.event.type === "goal_reached" || ev.event.type === "grasp_attempt") {
    return null;
  }
  const points = stream.traces.get(`${ev.subtask}/${ev.attempt}`);
  if (!points || !points.length) return null;
  // nearest sample at or before the event time (stream is decimated)
  let best = points[0];
  for (const p of points) {
    if (p.t <= ev.event.time) best = p;
    else break;
  }
  return {
    x: best.x,
    y: best.y,
    kind: ev.event.type,
    label: ev.event.label ?? "",
  };
}

export function buildViewModel(
  scene: SceneDoc,
  status: SessionStatus | null,
  stream: StreamState,
): ViewModel {
  const objects: FootprintPoly[] = scene.objects.map((o) => ({
    label: o.label,
    corners: footprintCorners(o.position, o.yaw, o.extents),
    center: [o.position[0], o.position[1]],
    top: o.position[2] + o.extents[2] / 2,
    flags: o.flags,
  }));
  const traces: Trace[] = [];
  for (const key of stream.order) {
    traces.push({ key, points: stream.traces.get(key)! });
  }
  const activeKey = stream.activeKey();
  const markers: Marker[] = [];
  for (const ev of stream.events) {
    const m = markerFor(stream, ev);
    if (m) markers.push(m);
  }
  const ee = status
    ? {
        x: status.ee_pose[0],
        y: status.ee_pose[1],
        z: status.ee_pose[2],
        yaw: status.ee_pose[5],
        closed: status.gripper_closed,
      }
    : null;
  return {
    workspace: scene.workspace,
    objects,
    traces,
    activeTrace: activeKey ? { key: activeKey, points: stream.traces.get(activeKey)! } : null,
    markers,
    ee,
    state: status?.state ?? "idle",
    plan: status?.plan ?? [],
    currentSubtask: status?.current_subtask ?? null,
    attempt: status?.attempt ?? 0,
    feedbackHistory: status?.feedback_history ?? [],
    outcome: status?.outcome ?? null,
    success: status?.success ?? null,
    heatmap: clipWeights(status?.last_weights ?? null),
  };
}

/** Feedback may be submitted only while the judge is waiting. */
export function canSubmitFeedback(state: string): boolean {
  return state === "awaiting_feedback";
}

/** Round-trip rule: surrounding whitespace is trimmed, nothing else. */
export function normalizeFeedback(text: string): string {
  return text.trim();
}
