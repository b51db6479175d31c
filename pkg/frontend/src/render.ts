// Pure HTML-string renderers. The browser glue assigns innerHTML and wires
// events; tests assert on the strings. Rendered order always equals
// payload order: nothing is re-sorted or re-counted client-side.

import { clusterColor, escapeHtml, renderCommentBody } from "./highlight.js";
import type { CommentView, MapDocument, MapNode, OverviewPayload, PostCard } from "./types.js";

function formatDate(unixSeconds: number): string {
  return new Date(unixSeconds * 1000).toISOString().slice(0, 10);
}

export function renderCard(card: PostCard): string {
  const counts: string[] = [];
  if (card.num_ui !== null) counts.push(`<span class="count count-ui">${card.num_ui} component</span>`);
  if (card.num_ve !== null) counts.push(`<span class="count count-ve">${card.num_ve} element</span>`);
  if (card.score !== null) counts.push(`<span class="count count-score">score ${card.score.toFixed(1)}</span>`);
  const thumb = card.thumbnail
    ? `<img class="thumb" src="${escapeHtml(card.thumbnail)}" alt="" loading="lazy">`
    : `<div class="thumb thumb-empty"></div>`;
  return (
    `<article class="card" data-post-id="${escapeHtml(card.post_id)}">` +
    thumb +
    `<h3 class="card-title">${escapeHtml(card.title)}</h3>` +
    `<p class="card-meta">u/${escapeHtml(card.author)} · ${formatDate(card.created_at)} · ` +
    `${card.num_comments} comments</p>` +
    (counts.length ? `<p class="card-counts">${counts.join(" ")}</p>` : "") +
    `</article>`
  );
}

export function renderOverviewGrid(payload: OverviewPayload): string {
  if (!payload.posts.length) {
    return `<div class="empty-state">No posts match these filters yet. Clear a facet to widen the view.</div>`;
  }
  return `<div class="grid">${payload.posts.map(renderCard).join("")}</div>`;
}

export function renderComponentMenu(facets: string[], active: string | null): string {
  const items = facets
    .map((name) => {
      const cls = name === active ? "facet-item active" : "facet-item";
      return `<li><button class="${cls}" data-ui="${escapeHtml(name)}">${escapeHtml(name)}</button></li>`;
    })
    .join("");
  const allCls = active === null ? "facet-item active" : "facet-item";
  return `<ul class="component-menu"><li><button class="${allCls}" data-ui="">All components</button></li>${items}</ul>`;
}

export function renderElementDropdown(facets: string[], active: string | null): string {
  const options = [`<option value=""${active === null ? " selected" : ""}>All elements</option>`]
    .concat(
      facets.map(
        (name) =>
          `<option value="${escapeHtml(name)}"${name === active ? " selected" : ""}>${escapeHtml(name)}</option>`,
      ),
    )
    .join("");
  return `<select class="element-dropdown" aria-label="visual element filter">${options}</select>`;
}

export function renderElementBar(facets: string[], active: string | null): string {
  const buttons = facets
    .map((name) => {
      const cls = name === active ? "element-btn active" : "element-btn";
      return (
        `<button class="${cls}" data-ve="${escapeHtml(name)}"` +
        ` style="--kw-color: ${clusterColor(name)}">${escapeHtml(name)}</button>`
      );
    })
    .join("");
  const clear = `<button class="element-clear" data-ve="" title="remove keyword highlights">x</button>`;
  return `<div class="element-bar">${buttons}${clear}</div>`;
}

export function renderFeedbackDropdown(active: string | null): string {
  const labels = ["default", "critique", "suggestion", "rationale"];
  const options = labels
    .map((label) => {
      const value = label === "default" ? "" : label;
      const selected = (active ?? "") === value ? " selected" : "";
      return `<option value="${value}"${selected}>${label}</option>`;
    })
    .join("");
  return `<select class="feedback-dropdown" aria-label="feedback type filter">${options}</select>`;
}

export function renderComment(view: CommentView, activeElement: string | null): string {
  const mentionBadge =
    activeElement === null
      ? ""
      : `<span class="mention-count">${view.mention_count} · ${escapeHtml(activeElement)}</span>`;
  return (
    `<article class="comment" data-comment-id="${escapeHtml(view.comment_id)}">` +
    `<header class="comment-head">` +
    `<span class="comment-author">u/${escapeHtml(view.author)}</span>${mentionBadge}` +
    `<button class="add-note" data-comment-id="${escapeHtml(view.comment_id)}" title="add to mindmap">+</button>` +
    `</header>` +
    `<p class="comment-body">${renderCommentBody(view, activeElement)}</p>` +
    `</article>`
  );
}

export function renderCommentPane(comments: CommentView[], activeElement: string | null): string {
  if (!comments.length) return `<div class="empty-state">No comments on this post.</div>`;
  return comments.map((c) => renderComment(c, activeElement)).join("");
}

// -- mindmap tree -------------------------------------------------------------

function nodeIndex(doc: MapDocument): Map<string, MapNode> {
  return new Map(doc.nodes.map((n) => [n.node_id, n]));
}

function renderNode(doc: MapDocument, byId: Map<string, MapNode>, nodeId: string, selected: string | null): string {
  const node = byId.get(nodeId);
  if (!node) return "";
  const cls = ["map-node"];
  if (node.link) cls.push("linked");
  if (nodeId === selected) cls.push("selected");
  const note = node.note ? ` data-note="${escapeHtml(node.note)}"` : "";
  const children = node.children.map((c) => renderNode(doc, byId, c, selected)).join("");
  return (
    `<li>` +
    `<span class="${cls.join(" ")}" data-node-id="${escapeHtml(node.node_id)}"${note} tabindex="0">` +
    `<span class="node-title">${escapeHtml(node.title)}</span>` +
    (node.link ? `<button class="jump-btn" data-node-id="${escapeHtml(node.node_id)}">Jump</button>` : "") +
    `</span>` +
    (children ? `<ul>${children}</ul>` : "") +
    `</li>`
  );
}

export function renderMindmap(doc: MapDocument, selected: string | null = null): string {
  return `<ul class="map-root">${renderNode(doc, nodeIndex(doc), doc.root, selected)}</ul>`;
}

export function renderConflictPrompt(currentRevision: number): string {
  return (
    `<div class="conflict-prompt" role="alertdialog">` +
    `<p>Someone else changed this mindmap (now at revision ${currentRevision}).</p>` +
    `<button class="retry-btn">Refresh and retry</button>` +
    `<button class="discard-btn">Discard my change</button>` +
    `</div>`
  );
}

export function renderToast(kind: string, message: string): string {
  return `<div class="toast toast-${escapeHtml(kind)}">${escapeHtml(message)}</div>`;
}

/** Post ids in rendered order; used by snapshot tests and the router. */
export function extractCardOrder(html: string): string[] {
  return [...html.matchAll(/data-post-id="([^"]+)"/g)].map((m) => m[1]!);
}
