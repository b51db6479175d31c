// View state and the optimistic mindmap controller.
//
// The view state mirrors server payloads only; counts, scores, and
// orderings always come from the service. The mindmap controller applies
// mutations optimistically against the revision it last saw and, on a 409,
// parks the failed operation so the UI can offer refresh-and-retry.

import { ApiClient, ApiError } from "./api.js";
import type { MapDocument } from "./types.js";

export interface ViewState {
  ui: string | null;
  ve: string | null;
  feedback: string | null;
  currentPost: string | null;
  history: string[]; // previously explored post ids, most recent last
  mapId: string | null;
}

export function initialViewState(): ViewState {
  return { ui: null, ve: null, feedback: null, currentPost: null, history: [], mapId: null };
}

export function withFacets(state: ViewState, ui: string | null, ve: string | null): ViewState {
  return { ...state, ui, ve };
}

export function openPost(state: ViewState, postId: string, historyDepth = 50): ViewState {
  const history = state.currentPost && state.currentPost !== postId
    ? [...state.history, state.currentPost].slice(-historyDepth)
    : state.history;
  return { ...state, currentPost: postId, history };
}

export function goBack(state: ViewState): ViewState {
  if (!state.history.length) return state;
  const history = state.history.slice(0, -1);
  return { ...state, currentPost: state.history[state.history.length - 1]!, history };
}

type PendingOp = (expectedRevision: number) => Promise<{ revision: number }>;

export type MindmapStatus =
  | { kind: "idle" }
  | { kind: "pending" }
  | { kind: "conflict"; currentRevision: number; message: string }
  | { kind: "error"; message: string };

/**
 * Revision-tracked mindmap session for one map. `status` drives the UI:
 * a conflict keeps the failed op (and its precursor state) around until
 * retryAfterRefresh() or discard() resolves it.
 */
export class MindmapController {
  document: MapDocument | null = null;
  revision = 0;
  status: MindmapStatus = { kind: "idle" };
  private pendingOp: PendingOp | null = null;

  constructor(
    private api: ApiClient,
    readonly mapId: string,
  ) {}

  async load(): Promise<MapDocument> {
    const doc = await this.api.getMap(this.mapId);
    this.document = doc;
    this.revision = doc.revision ?? 0;
    return doc;
  }

  private async run(op: PendingOp): Promise<{ revision: number } | null> {
    this.status = { kind: "pending" };
    try {
      const result = await op(this.revision);
      this.revision = result.revision;
      await this.load();
      this.status = { kind: "idle" };
      return result;
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.pendingOp = op;
        this.status = {
          kind: "conflict",
          currentRevision: err.currentRevision ?? -1,
          message: err.message,
        };
        return null;
      }
      this.status = { kind: "error", message: err instanceof Error ? err.message : String(err) };
      throw err;
    }
  }

  addNode(parentId: string, title: string, note?: string): Promise<{ revision: number } | null> {
    return this.run((rev) =>
      this.api.addNode(this.mapId, {
        parent_id: parentId,
        title,
        note: note ?? null,
        expected_revision: rev,
      }),
    );
  }

  async addCommentNode(
    parentId: string,
    commentId: string,
  ): Promise<{ node_id: string; title: string; revision: number } | null> {
    let created: { node_id: string; title: string; revision: number } | null = null;
    const outcome = await this.run(async (rev) => {
      created = await this.api.addCommentNode(this.mapId, {
        parent_id: parentId,
        comment_id: commentId,
        expected_revision: rev,
      });
      return created;
    });
    return outcome === null ? null : created;
  }

  editNode(nodeId: string, fields: { title?: string; note?: string | null }): Promise<{ revision: number } | null> {
    return this.run((rev) => this.api.editNode(this.mapId, nodeId, { ...fields, expected_revision: rev }));
  }

  deleteSubtree(nodeId: string): Promise<{ revision: number } | null> {
    return this.run((rev) => this.api.deleteSubtree(this.mapId, nodeId, rev));
  }

  moveNode(nodeId: string, newParentId: string, position?: number): Promise<{ revision: number } | null> {
    return this.run((rev) =>
      this.api.moveNode(this.mapId, {
        node_id: nodeId,
        new_parent_id: newParentId,
        position: position ?? null,
        expected_revision: rev,
      }),
    );
  }

  /** Conflict resolution: reload the map, then replay the parked op. */
  async retryAfterRefresh(): Promise<{ revision: number } | null> {
    if (this.status.kind !== "conflict" || !this.pendingOp) return null;
    const op = this.pendingOp;
    this.pendingOp = null;
    await this.load();
    return this.run(op);
  }

  discard(): void {
    this.pendingOp = null;
    this.status = { kind: "idle" };
  }
}
