// Browser bootstrap: hash routing, pane wiring, session event emission.
// All rendering goes through the pure functions in render.ts; this file
// only assigns innerHTML and listens to events.

import { ApiClient, ApiError } from "./api.js";
import { downloadRaster } from "./mindmapSvg.js";
import {
  extractCardOrder,
  renderCommentPane,
  renderComponentMenu,
  renderConflictPrompt,
  renderElementBar,
  renderElementDropdown,
  renderFeedbackDropdown,
  renderMindmap,
  renderOverviewGrid,
  renderToast,
} from "./render.js";
import { initialViewState, MindmapController, openPost, withFacets, type ViewState } from "./state.js";
import type { MapDocument, ReadingPayload } from "./types.js";

const api = new ApiClient("");
const sessionId = `web-${Math.random().toString(36).slice(2, 10)}`;
let state: ViewState = initialViewState();
let map: MindmapController | null = null;
let selectedNode: string | null = null;
let eventClock = Date.now();

const root = document.getElementById("app")!;

function emit(kind: "view_post" | "view_comment" | "filter_change" | "note_add" | "jump", subjectId: string): void {
  eventClock = Math.max(eventClock + 1, Date.now());
  api.postEvents(sessionId, [{ kind, timestamp: eventClock, subject_id: subjectId }]).catch(() => {
    // analytics must never break reading
  });
}

function toast(kind: string, message: string): void {
  const host = document.getElementById("toasts")!;
  host.insertAdjacentHTML("beforeend", renderToast(kind, message));
  const el = host.lastElementChild!;
  setTimeout(() => el.remove(), 4000);
}

function navigate(hash: string): void {
  window.location.hash = hash;
}

window.addEventListener("hashchange", () => void route());

async function route(): Promise<void> {
  const hash = window.location.hash || "#/overview";
  const postMatch = /^#\/post\/(.+)$/.exec(hash);
  try {
    if (postMatch) {
      state = openPost(state, decodeURIComponent(postMatch[1]!));
      emit("view_post", state.currentPost!);
      await renderReadingPage();
    } else {
      await renderOverviewPage();
    }
  } catch (err) {
    root.innerHTML = `<div class="error-state">
      <p>Could not reach the reading service.</p>
      <button id="retry-route">Retry</button></div>`;
    document.getElementById("retry-route")!.addEventListener("click", () => void route());
    if (err instanceof Error) console.error(err);
  }
}

// -- overview page -----------------------------------------------------------

async function renderOverviewPage(): Promise<void> {
  const payload = await api.overview({ ui: state.ui, ve: state.ve, limit: 60 });
  root.innerHTML = `
    <div class="overview-layout">
      <aside class="left-menu">
        <h2>UI components</h2>
        <nav id="component-menu">${renderComponentMenu(payload.facets.ui, state.ui)}</nav>
      </aside>
      <section class="overview-main">
        <header class="overview-head">
          <h1>Design feedback explorer</h1>
          <label class="element-filter">Visual element
            <span id="element-dropdown">${renderElementDropdown(payload.facets.ve, state.ve)}</span>
          </label>
        </header>
        <div id="overview-grid">${renderOverviewGrid(payload)}</div>
        <p class="total-line">${payload.total} posts</p>
      </section>
    </div>`;

  document.querySelectorAll<HTMLButtonElement>("#component-menu .facet-item").forEach((btn) => {
    btn.addEventListener("click", () => {
      state = withFacets(state, btn.dataset.ui || null, state.ve);
      emit("filter_change", `ui:${btn.dataset.ui || "all"}`);
      void renderOverviewPage(); // re-query; no full page reload
    });
  });
  document.querySelector<HTMLSelectElement>("#element-dropdown select")!.addEventListener("change", (ev) => {
    const value = (ev.target as HTMLSelectElement).value || null;
    state = withFacets(state, state.ui, value);
    emit("filter_change", `ve:${value || "all"}`);
    void renderOverviewPage();
  });
  document.querySelectorAll<HTMLElement>("#overview-grid .card").forEach((card) => {
    card.addEventListener("click", () => navigate(`#/post/${encodeURIComponent(card.dataset.postId!)}`));
  });
  void extractCardOrder(root.innerHTML); // order comes straight from payload
}

// -- reading page ---------------------------------------------------------------

async function renderReadingPage(): Promise<void> {
  const postId = state.currentPost!;
  const payload = await api.reading(postId, {
    ui: state.ui,
    ve: state.ve,
    feedback: state.feedback,
    session: sessionId,
  });
  await ensureMap();
  const mapDoc = map?.document ?? null;

  root.innerHTML = `
    <div class="reading-layout">
      <section class="pane image-pane">
        <header class="pane-head">
          <button id="back-btn" ${payload.navigation.previous_post_id ? "" : "disabled"}>&larr; previous post</button>
          <button id="home-btn">Overview</button>
        </header>
        <h1 class="post-title" title="${payload.post.title.replaceAll('"', "&quot;")}">${payload.post.title}</h1>
        <img id="post-image" class="post-image" src="${payload.post.image_refs[0] ?? ""}" alt="design example">
        <p class="post-body">${payload.post.body}</p>
      </section>
      <section class="pane comment-pane">
        <header class="pane-head">
          <span id="element-bar">${renderElementBar(["Color", "Contrast", "Space", "Typography", "Layout", "Shape&Size"], state.ve)}</span>
          <span id="feedback-dropdown">${renderFeedbackDropdown(state.feedback)}</span>
        </header>
        <div id="comments">${renderCommentPane(payload.comments, state.ve)}</div>
      </section>
      <section class="pane map-pane">
        <header class="pane-head">
          <h2>Mindmap</h2>
          <span class="map-tools">
            <button id="map-add">Add node</button>
            <button id="map-export-json">JSON</button>
            <button id="map-export-png">PNG</button>
            <button id="map-export-jpg">JPG</button>
            <label class="import-label">Import<input id="map-import" type="file" accept="application/json"></label>
          </span>
        </header>
        <div id="map-status"></div>
        <div id="map-tree">${mapDoc ? renderMindmap(mapDoc, selectedNode) : ""}</div>
        <div id="map-note" class="map-note"></div>
      </section>
      <section class="pane reco-pane">
        <h2>Next posts for this topic</h2>
        <div id="reco-cards">${payload.recommendations.map((c) => `<div class="reco-card" data-post-id="${c.post_id}">${c.title}<span class="reco-counts">${c.num_ui ?? "-"} / ${c.num_ve ?? "-"}</span></div>`).join("")}</div>
      </section>
    </div>`;

  wireReadingEvents(payload);
}

function wireReadingEvents(payload: ReadingPayload): void {
  document.getElementById("home-btn")!.addEventListener("click", () => navigate("#/overview"));
  const backBtn = document.getElementById("back-btn") as HTMLButtonElement;
  backBtn.addEventListener("click", () => {
    if (payload.navigation.previous_post_id) {
      navigate(`#/post/${encodeURIComponent(payload.navigation.previous_post_id)}`);
    }
  });

  document.querySelectorAll<HTMLButtonElement>("#element-bar .element-btn, #element-bar .element-clear").forEach(
    (btn) =>
      btn.addEventListener("click", () => {
        state = { ...state, ve: btn.dataset.ve || null };
        emit("filter_change", `ve:${btn.dataset.ve || "clear"}`);
        void renderReadingPage();
      }),
  );
  document.querySelector<HTMLSelectElement>("#feedback-dropdown select")!.addEventListener("change", (ev) => {
    state = { ...state, feedback: (ev.target as HTMLSelectElement).value || null };
    emit("filter_change", `feedback:${state.feedback || "default"}`);
    void renderReadingPage();
  });

  document.querySelectorAll<HTMLElement>("#comments .comment").forEach((el) => {
    el.addEventListener("click", () => emit("view_comment", el.dataset.commentId!));
  });
  document.querySelectorAll<HTMLButtonElement>("#comments .add-note").forEach((btn) => {
    btn.addEventListener("click", async (ev) => {
      ev.stopPropagation();
      if (!map?.document) return;
      const parent = selectedNode ?? map.document.root;
      const created = await map.addCommentNode(parent, btn.dataset.commentId!);
      if (created) {
        emit("note_add", created.node_id);
        toast("ok", `Added node: ${created.title}`);
      }
      refreshMapPane();
    });
  });

  document.getElementById("map-add")!.addEventListener("click", async () => {
    if (!map?.document) return;
    const title = window.prompt("Node title");
    if (!title) return;
    const parent = selectedNode ?? map.document.root;
    const result = await map.addNode(parent, title);
    if (result) emit("note_add", `manual:${title.slice(0, 24)}`);
    refreshMapPane();
  });
  document.getElementById("map-export-json")!.addEventListener("click", async () => {
    if (!map) return;
    const { text } = await api.exportMap(map.mapId);
    const blob = new Blob([text], { type: "application/json" });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = `${map.mapId}.json`;
    link.click();
    URL.revokeObjectURL(link.href);
  });
  document.getElementById("map-export-png")!.addEventListener("click", () => {
    if (map?.document) void downloadRaster(map.document, "png");
  });
  document.getElementById("map-export-jpg")!.addEventListener("click", () => {
    if (map?.document) void downloadRaster(map.document, "jpeg");
  });
  document.getElementById("map-import")!.addEventListener("change", async (ev) => {
    const file = (ev.target as HTMLInputElement).files?.[0];
    if (!file || !map) return;
    try {
      const doc = JSON.parse(await file.text()) as MapDocument;
      doc.map_id = map.mapId; // import initializes the current session's map
      await api.importMap(doc, true);
      await map.load();
      toast("ok", "Mindmap imported");
    } catch (err) {
      toast("error", err instanceof ApiError ? err.message : "Import failed: invalid document");
    }
    refreshMapPane();
  });

  wireMapTree();
  document.querySelectorAll<HTMLElement>("#reco-cards .reco-card").forEach((card) => {
    card.addEventListener("click", () => navigate(`#/post/${encodeURIComponent(card.dataset.postId!)}`));
  });
}

function wireMapTree(): void {
  document.querySelectorAll<HTMLElement>("#map-tree .map-node").forEach((el) => {
    el.addEventListener("click", (ev) => {
      ev.stopPropagation();
      selectedNode = el.dataset.nodeId!;
      refreshMapPane();
    });
    el.addEventListener("mouseenter", () => {
      // hovering a node shows the linked comment body / note
      document.getElementById("map-note")!.textContent = el.dataset.note ?? "";
    });
    el.addEventListener("mouseleave", () => {
      document.getElementById("map-note")!.textContent = "";
    });
  });
  document.querySelectorAll<HTMLButtonElement>("#map-tree .jump-btn").forEach((btn) => {
    btn.addEventListener("click", async (ev) => {
      ev.stopPropagation();
      if (!map) return;
      try {
        const target = await api.jump(map.mapId, btn.dataset.nodeId!);
        emit("jump", target.post_id);
        navigate(`#/post/${encodeURIComponent(target.post_id)}`);
      } catch (err) {
        toast("error", err instanceof ApiError ? `Jump failed: ${err.message}` : "Jump failed");
      }
    });
  });
}

function refreshMapPane(): void {
  if (!map) return;
  const statusHost = document.getElementById("map-status");
  const treeHost = document.getElementById("map-tree");
  if (!statusHost || !treeHost) return;
  if (map.status.kind === "conflict") {
    statusHost.innerHTML = renderConflictPrompt(map.status.currentRevision);
    statusHost.querySelector(".retry-btn")!.addEventListener("click", async () => {
      await map!.retryAfterRefresh();
      refreshMapPane();
    });
    statusHost.querySelector(".discard-btn")!.addEventListener("click", async () => {
      map!.discard();
      await map!.load();
      refreshMapPane();
    });
  } else {
    statusHost.innerHTML = "";
  }
  if (map.document) treeHost.innerHTML = renderMindmap(map.document, selectedNode);
  wireMapTree();
}

async function ensureMap(): Promise<void> {
  if (map) return;
  const mapId = `session-${sessionId}`;
  map = new MindmapController(api, mapId);
  try {
    await map.load();
  } catch {
    await api.createMap(mapId, "My learning notes");
    await map.load();
  }
  state = { ...state, mapId };
}

void route();
