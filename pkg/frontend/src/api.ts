// Thin typed client over the service HTTP API. All reads and writes go
// through here; nothing else in the UI talks to the network.

import type {
  ExplorationReport,
  MapDocument,
  OverviewPayload,
  ReadingPayload,
  SessionEventInput,
} from "./types.js";

export class ApiError extends Error {
  status: number;
  code: string;
  currentRevision: number | null;

  constructor(status: number, code: string, message: string, currentRevision: number | null = null) {
    super(message);
    this.status = status;
    this.code = code;
    this.currentRevision = currentRevision;
  }
}

async function parseError(response: Response): Promise<never> {
  let code = "http_error";
  let message = `${response.status} ${response.statusText}`;
  let revision: number | null = null;
  try {
    const body = await response.json();
    code = body.error ?? code;
    message = body.message ?? message;
    revision = body.current_revision ?? null;
  } catch {
    // non-JSON error body; keep the status line
  }
  throw new ApiError(response.status, code, message, revision);
}

export class ApiClient {
  constructor(private baseUrl: string) {}

  private async get<T>(path: string, params?: Record<string, string | number | undefined | null>): Promise<T> {
    const url = new URL(this.baseUrl + path);
    for (const [key, value] of Object.entries(params ?? {})) {
      if (value !== undefined && value !== null && value !== "") url.searchParams.set(key, String(value));
    }
    const response = await fetch(url);
    if (!response.ok) await parseError(response);
    return response.json() as Promise<T>;
  }

  private async send<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) await parseError(response);
    return response.json() as Promise<T>;
  }

  overview(params: {
    ui?: string | null;
    ve?: string | null;
    offset?: number;
    limit?: number;
  }): Promise<OverviewPayload> {
    return this.get("/overview", params);
  }

  reading(
    postId: string,
    params: {
      ui?: string | null;
      ve?: string | null;
      feedback?: string | null;
      session?: string;
      n?: number;
      seed?: number;
    },
  ): Promise<ReadingPayload> {
    return this.get(`/posts/${encodeURIComponent(postId)}/reading`, params);
  }

  postEvents(sessionId: string, events: SessionEventInput[]): Promise<{ accepted: number; total: number }> {
    return this.send("POST", `/sessions/${encodeURIComponent(sessionId)}/events`, { events });
  }

  report(sessionId: string, thresholdMs?: number): Promise<ExplorationReport> {
    return this.get(`/sessions/${encodeURIComponent(sessionId)}/report`, { threshold_ms: thresholdMs });
  }

  createMap(mapId?: string, rootTitle?: string): Promise<MapDocument> {
    return this.send("POST", "/maps", { map_id: mapId ?? null, root_title: rootTitle ?? "My notes" });
  }

  getMap(mapId: string): Promise<MapDocument> {
    return this.get(`/maps/${encodeURIComponent(mapId)}`);
  }

  addNode(
    mapId: string,
    body: { parent_id: string; title: string; note?: string | null; expected_revision: number },
  ): Promise<{ node_id: string; title: string; revision: number }> {
    return this.send("POST", `/maps/${encodeURIComponent(mapId)}/nodes`, body);
  }

  addCommentNode(
    mapId: string,
    body: { parent_id: string; comment_id: string; expected_revision: number; seed?: number },
  ): Promise<{ node_id: string; title: string; revision: number }> {
    return this.send("POST", `/maps/${encodeURIComponent(mapId)}/comment-nodes`, body);
  }

  jump(mapId: string, nodeId: string): Promise<{ post_id: string; comment_id: string }> {
    return this.send("POST", `/maps/${encodeURIComponent(mapId)}/jump`, { node_id: nodeId });
  }

  editNode(
    mapId: string,
    nodeId: string,
    body: { title?: string; note?: string | null; expected_revision: number },
  ): Promise<{ revision: number }> {
    return this.send("PUT", `/maps/${encodeURIComponent(mapId)}/nodes/${encodeURIComponent(nodeId)}`, body);
  }

  deleteSubtree(mapId: string, nodeId: string, expectedRevision: number): Promise<{ removed: number; revision: number }> {
    return this.send(
      "DELETE",
      `/maps/${encodeURIComponent(mapId)}/nodes/${encodeURIComponent(nodeId)}?expected_revision=${expectedRevision}`,
    );
  }

  moveNode(
    mapId: string,
    body: { node_id: string; new_parent_id: string; position?: number | null; expected_revision: number },
  ): Promise<{ revision: number }> {
    return this.send("POST", `/maps/${encodeURIComponent(mapId)}/move`, body);
  }

  async exportMap(mapId: string): Promise<{ text: string; document: MapDocument }> {
    const response = await fetch(`${this.baseUrl}/maps/${encodeURIComponent(mapId)}/export`);
    if (!response.ok) await parseError(response);
    const text = await response.text();
    return { text, document: JSON.parse(text) as MapDocument };
  }

  importMap(document: MapDocument, replace = false): Promise<MapDocument> {
    return this.send("POST", "/maps/import", { document, replace });
  }
}
