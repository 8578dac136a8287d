/** Browser wiring: one session, one stream subscription, all mutation
 * through the service. Reloading rebuilds the identical view from GETs. */

import { Client } from "./api.js";
import {
  StreamState,
  buildViewModel,
  canSubmitFeedback,
  normalizeFeedback,
} from "./model.js";
import { drawHeatmap, drawTopDown, drawZStrip } from "./render.js";
import type { SceneDoc, SessionStatus } from "./types.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
};

const client = new Client(
  (document.body.dataset.service ?? "").trim() || window.location.origin,
);

let sessionId: string | null = null;
let scene: SceneDoc | null = null;
let status: SessionStatus | null = null;
const stream = new StreamState();

function redraw(): void {
  if (!scene) return;
  const vm = buildViewModel(scene, status, stream);
  const top = $<HTMLCanvasElement>("topdown");
  drawTopDown(top.getContext("2d")!, vm, { width: top.width, height: top.height });
  const strip = $<HTMLCanvasElement>("zstrip");
  drawZStrip(strip.getContext("2d")!, vm, { width: strip.width, height: strip.height });
  const heat = $<HTMLCanvasElement>("heatmap");
  drawHeatmap(heat.getContext("2d")!, vm, { width: heat.width, height: heat.height });

  $("state").textContent = vm.state;
  $("plan").innerHTML = vm.plan.map((s) => `<li>${escapeHtml(s)}</li>`).join("");
  $("current").textContent = vm.currentSubtask
    ? `${vm.currentSubtask} (attempt ${vm.attempt + 1})`
    : "-";
  $("outcome").textContent = vm.outcome
    ? vm.outcome.success ? "success" : `failed: ${vm.outcome.reason}`
    : "-";
  $("history").innerHTML = vm.feedbackHistory
    .map((f) => `<li>${escapeHtml(f)}</li>`)
    .join("");
  const button = $<HTMLButtonElement>("send");
  button.disabled = !canSubmitFeedback(vm.state);
  $("result").textContent =
    vm.success === null ? "" : vm.success ? "task succeeded" : "task failed";
}

function escapeHtml(text: string): string {
  return text.replace(/[&<>"']/g, (ch) =>
    ({ "&": "&amp;", "<": "&lt;", ">": "&gt;", '"': "&quot;", "'": "&#39;" }[ch]!));
}

async function pollStatus(): Promise<void> {
  if (!sessionId) return;
  try {
    status = await client.status(sessionId);
    scene = await client.scene(sessionId);
  } catch {
    // keep the last view on transient errors
  }
  redraw();
  window.setTimeout(pollStatus, 250);
}

async function followStream(): Promise<void> {
  if (!sessionId) return;
  for await (const record of client.stream(sessionId, stream.nextSeq)) {
    stream.add(record);
    if (record.seq % 25 === 0) redraw();
  }
  redraw();
}

async function connect(id: string): Promise<void> {
  sessionId = id;
  $("session").textContent = id;
  scene = await client.scene(id);
  void pollStatus();
  void followStream();
}

$<HTMLButtonElement>("create").addEventListener("click", async () => {
  const sceneName = $<HTMLInputElement>("scene-name").value.trim();
  const task = $<HTMLInputElement>("task").value.trim();
  const fixtures = $<HTMLInputElement>("fixtures").value.trim();
  const body: Parameters<Client["createSession"]>[0] = {
    scene: sceneName,
    task,
    judge: "interactive",
  };
  if (fixtures) body.fixtures = fixtures;
  const { id } = await client.createSession(body);
  await connect(id);
});

$<HTMLButtonElement>("attach").addEventListener("click", async () => {
  const id = $<HTMLInputElement>("session-id").value.trim();
  if (id) await connect(id);
});

$<HTMLButtonElement>("send").addEventListener("click", async () => {
  if (!sessionId) return;
  const box = $<HTMLTextAreaElement>("feedback");
  await client.feedback(sessionId, normalizeFeedback(box.value));
  box.value = "";
});
