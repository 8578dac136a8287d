/** Canvas drawing over an injected minimal 2D-context interface, so the
 * renderer can be exercised headlessly with a recording fake. */

import type { Marker, Trace, ViewModel } from "./model.js";

export interface Ctx2D {
  // string | object admits the DOM's gradient/pattern union; only plain
  // color strings are ever assigned here
  fillStyle: string | object;
  strokeStyle: string | object;
  lineWidth: number;
  font: string;
  globalAlpha: number;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  closePath(): void;
  stroke(): void;
  fill(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillText(text: string, x: number, y: number): void;
}

export interface Viewport {
  width: number;
  height: number;
}

export interface Transform {
  toPx(x: number, y: number): [number, number];
  scale: number;
}

export function makeTransform(
  workspace: { min: number[]; max: number[] }, vp: Viewport, margin = 12,
): Transform {
  const wx = workspace.max[0] - workspace.min[0];
  const wy = workspace.max[1] - workspace.min[1];
  const scale = Math.min((vp.width - 2 * margin) / wy, (vp.height - 2 * margin) / wx);
  // robot +x points away from the base (up on screen), +y to the right
  return {
    scale,
    toPx(x: number, y: number): [number, number] {
      const px = margin + (y - workspace.min[1]) * scale;
      const py = vp.height - margin - (x - workspace.min[0]) * scale;
      return [px, py];
    },
  };
}

const OBJECT_FILL: Record<string, string> = {
  obstacle: "#d98c8c",
  container: "#8cb8d9",
  surface: "#cfc7a6",
  graspable: "#9ecf9e",
};

function objectColor(flags: string[]): string {
  for (const key of ["obstacle", "container", "surface", "graspable"]) {
    if (flags.includes(key)) return OBJECT_FILL[key];
  }
  return "#cccccc";
}

function polygon(ctx: Ctx2D, tf: Transform, corners: [number, number][]): void {
  ctx.beginPath();
  corners.forEach(([x, y], i) => {
    const [px, py] = tf.toPx(x, y);
    if (i === 0) ctx.moveTo(px, py);
    else ctx.lineTo(px, py);
  });
  ctx.closePath();
}

function polyline(ctx: Ctx2D, tf: Transform, trace: Trace): void {
  ctx.beginPath();
  trace.points.forEach((p, i) => {
    const [px, py] = tf.toPx(p.x, p.y);
    if (i === 0) ctx.moveTo(px, py);
    else ctx.lineTo(px, py);
  });
  ctx.stroke();
}

function drawMarker(ctx: Ctx2D, tf: Transform, marker: Marker): void {
  const [px, py] = tf.toPx(marker.x, marker.y);
  ctx.beginPath();
  ctx.arc(px, py, marker.kind === "collision" ? 6 : 4, 0, 2 * Math.PI);
  ctx.fillStyle = marker.kind === "collision" ? "#d62222"
    : marker.kind === "grasp_success" ? "#1f8f1f" : "#888833";
  ctx.fill();
  if (marker.label) {
    ctx.font = "10px sans-serif";
    ctx.fillText(`${marker.kind}: ${marker.label}`, px + 7, py - 4);
  }
}

export function drawTopDown(ctx: Ctx2D, vm: ViewModel, vp: Viewport): Transform {
  const tf = makeTransform(vm.workspace, vp);
  ctx.clearRect(0, 0, vp.width, vp.height);
  ctx.fillStyle = "#f7f4ee";
  ctx.fillRect(0, 0, vp.width, vp.height);

  for (const obj of vm.objects) {
    polygon(ctx, tf, obj.corners);
    ctx.globalAlpha = 0.75;
    ctx.fillStyle = objectColor(obj.flags);
    ctx.fill();
    ctx.globalAlpha = 1.0;
    ctx.strokeStyle = "#555555";
    ctx.lineWidth = 1;
    ctx.stroke();
    const [lx, ly] = tf.toPx(obj.center[0], obj.center[1]);
    ctx.fillStyle = "#222222";
    ctx.font = "11px sans-serif";
    ctx.fillText(obj.label, lx, ly);
  }

  for (const trace of vm.traces) {
    const active = vm.activeTrace !== null && trace.key === vm.activeTrace.key;
    ctx.strokeStyle = active ? "#2255cc" : "#99aacc";
    ctx.lineWidth = active ? 2 : 1;
    if (trace.points.length > 1) polyline(ctx, tf, trace);
  }

  for (const marker of vm.markers) drawMarker(ctx, tf, marker);

  if (vm.ee) {
    const [px, py] = tf.toPx(vm.ee.x, vm.ee.y);
    ctx.beginPath();
    ctx.arc(px, py, 7, 0, 2 * Math.PI);
    ctx.strokeStyle = "#111111";
    ctx.lineWidth = 2;
    ctx.stroke();
    if (vm.ee.closed) {
      ctx.beginPath();
      ctx.arc(px, py, 3, 0, 2 * Math.PI);
      ctx.fillStyle = "#111111";
      ctx.fill();
    }
    // jaw glyph: a bar across the closing direction (ee frame y-axis)
    const jaw = 10;
    const dx = -Math.sin(vm.ee.yaw) * jaw;
    const dy = Math.cos(vm.ee.yaw) * jaw;
    ctx.beginPath();
    ctx.moveTo(px - dy, py - dx);
    ctx.lineTo(px + dy, py + dx);
    ctx.stroke();
  }
  return tf;
}

/** Side strip: end-effector height against the objects' top faces. */
export function drawZStrip(ctx: Ctx2D, vm: ViewModel, vp: Viewport): void {
  ctx.clearRect(0, 0, vp.width, vp.height);
  ctx.fillStyle = "#eef2f7";
  ctx.fillRect(0, 0, vp.width, vp.height);
  const zMax = vm.workspace.max[2];
  const toY = (z: number) => vp.height - 8 - (z / zMax) * (vp.height - 16);
  ctx.strokeStyle = "#999999";
  ctx.lineWidth = 1;
  for (const obj of vm.objects) {
    const y = toY(obj.top);
    ctx.beginPath();
    ctx.moveTo(8, y);
    ctx.lineTo(vp.width - 8, y);
    ctx.stroke();
    ctx.fillStyle = "#666666";
    ctx.font = "9px sans-serif";
    ctx.fillText(obj.label, 10, y - 2);
  }
  if (vm.ee) {
    const y = toY(vm.ee.z);
    ctx.beginPath();
    ctx.arc(vp.width / 2, y, 5, 0, 2 * Math.PI);
    ctx.fillStyle = "#2255cc";
    ctx.fill();
  }
}

/** Symmetric diverging color for a weight in [-1, 1]: blue..white..red. */
export function heatColor(v: number): string {
  const clipped = Math.max(-1, Math.min(1, v));
  const mag = Math.round(Math.abs(clipped) * 200);
  const rest = 255 - mag;
  return clipped >= 0
    ? `rgb(255, ${rest}, ${rest})`
    : `rgb(${rest}, ${rest}, 255)`;
}

export function drawHeatmap(ctx: Ctx2D, vm: ViewModel, vp: Viewport): void {
  ctx.clearRect(0, 0, vp.width, vp.height);
  if (!vm.heatmap) return;
  const rows = vm.heatmap.length;
  const cols = vm.heatmap[0].length;
  const labels = ["x", "y", "z", "yaw", "grip"];
  const cellW = (vp.width - 34) / cols;
  const cellH = (vp.height - 4) / rows;
  for (let r = 0; r < rows; r++) {
    ctx.fillStyle = "#333333";
    ctx.font = "10px sans-serif";
    ctx.fillText(labels[r] ?? String(r), 2, (r + 0.7) * cellH);
    for (let c = 0; c < cols; c++) {
      ctx.fillStyle = heatColor(vm.heatmap[r][c]);
      ctx.fillRect(30 + c * cellW, 2 + r * cellH, cellW - 1, cellH - 1);
    }
  }
}
