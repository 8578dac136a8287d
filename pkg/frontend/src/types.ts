/** Wire types mirroring the session service's JSON responses. */

export interface SceneObjectDoc {
  label: string;
  position: number[];
  yaw: number;
  extents: number[];
  flags: string[];
}

export interface SceneDoc {
  table_height: number;
  workspace: { min: number[]; max: number[] };
  ee_home: number[];
  objects: SceneObjectDoc[];
}

export interface Outcome {
  success: boolean;
  kind: string;
  reason: string;
}

export interface SessionStatus {
  id: string;
  state: string;
  task: string;
  plan: string[];
  current_subtask: string | null;
  attempt: number;
  feedback_history: string[];
  outcome: Outcome | null;
  success: boolean | null;
  ee_pose: number[];
  held: string | null;
  gripper_closed: boolean;
  last_weights: number[][] | null;
}

export interface SampleRecord {
  seq: number;
  type: "sample";
  subtask: number;
  attempt: number;
  t: number;
  pose5: number[];
  z: number;
}

export interface EventRecord {
  seq: number;
  type: "event";
  subtask: number;
  attempt: number;
  event: { type: string; time: number; phase: number; label?: string };
}

export interface StatusRecord {
  seq: number;
  type: "status";
  state: string;
  [key: string]: unknown;
}

export type StreamRecord = SampleRecord | EventRecord | StatusRecord;

export interface PromptEntry {
  role: string;
  messages: { role: string; content: string }[];
}
