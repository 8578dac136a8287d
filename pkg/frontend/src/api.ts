/** Thin client over the session service's HTTP + NDJSON stream contract. */

import type {
  PromptEntry,
  SceneDoc,
  SessionStatus,
  StreamRecord,
} from "./types.js";

export class ServiceError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

async function asJson<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    throw new ServiceError(`${resp.status}: ${await resp.text()}`, resp.status);
  }
  return (await resp.json()) as T;
}

export class Client {
  constructor(readonly baseUrl: string) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  async createSession(body: {
    scene: string | object;
    task: string;
    fixtures?: string;
    judge?: string;
  }): Promise<{ id: string; state: string }> {
    return asJson(await fetch(this.url("/sessions"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    }));
  }

  async status(id: string): Promise<SessionStatus> {
    return asJson(await fetch(this.url(`/sessions/${id}`)));
  }

  async scene(id: string): Promise<SceneDoc> {
    return asJson(await fetch(this.url(`/sessions/${id}/scene`)));
  }

  async prompts(id: string): Promise<{ prompts: PromptEntry[] }> {
    return asJson(await fetch(this.url(`/sessions/${id}/prompts`)));
  }

  async report(id: string): Promise<Record<string, unknown>> {
    return asJson(await fetch(this.url(`/sessions/${id}/report`)));
  }

  async feedback(id: string, text: string): Promise<void> {
    await asJson(await fetch(this.url(`/sessions/${id}/feedback`), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ text }),
    }));
  }

  async reset(id: string): Promise<void> {
    await asJson(await fetch(this.url(`/sessions/${id}/reset`), { method: "POST" }));
  }

  /**
   * Follow the rollout stream, parsing one JSON record per line. On
   * disconnect the generator resubscribes from the last seen sequence
   * number, so records are delivered exactly once in order.
   */
  async *stream(id: string, from = 0): AsyncGenerator<StreamRecord> {
    let next = from;
    for (;;) {
      let resp: Response;
      try {
        resp = await fetch(this.url(`/sessions/${id}/rollout?start=${next}`));
      } catch {
        await new Promise((r) => setTimeout(r, 250));
        continue; // transient disconnect: resubscribe from `next`
      }
      if (!resp.ok || !resp.body) {
        throw new ServiceError(`stream failed: ${resp.status}`, resp.status);
      }
      const reader = resp.body.getReader();
      const decoder = new TextDecoder();
      let buffer = "";
      let interrupted = false;
      try {
        for (;;) {
          const { done, value } = await reader.read();
          if (done) break;
          buffer += decoder.decode(value, { stream: true });
          let idx: number;
          while ((idx = buffer.indexOf("\n")) >= 0) {
            const line = buffer.slice(0, idx).trim();
            buffer = buffer.slice(idx + 1);
            if (!line) continue;
            const record = JSON.parse(line) as StreamRecord;
            next = record.seq + 1;
            yield record;
          }
        }
      } catch {
        interrupted = true; // connection dropped mid-stream
      }
      if (!interrupted) return; // server closed the stream cleanly: session done
    }
  }
}
