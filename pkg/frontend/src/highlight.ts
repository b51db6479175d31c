// Comment-body highlighting: sentence feedback layers + keyword layers
// rendered from the server's byte spans. No counts or orders are computed
// here; the payload is the single source of truth.

import { segmentByBytes, type ByteSpan } from "./bytes.js";
import type { CommentView, KeywordSpan, SentenceSpan } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

/** Default color legend per element cluster ("Color" is brown). */
export const ELEMENT_LEGEND: Record<string, string> = {
  Color: "#8a5a2b",
  Contrast: "#6d4bb8",
  Space: "#0f766e",
  Typography: "#1d4ed8",
  Layout: "#c2570b",
  "Shape&Size": "#15803d",
};

export function clusterColor(name: string | null): string {
  return (name && ELEMENT_LEGEND[name]) || "#8a5a2b";
}

type Layer = ByteSpan & { layer: "sentence" | "keyword"; sentence?: SentenceSpan; keyword?: KeywordSpan };

/**
 * Render one comment body to HTML. Sentence spans become label-classed
 * wrappers (plus a highlight class when the active feedback type matches);
 * keyword spans of the selected element cluster become <mark> runs tinted
 * by the cluster legend. Byte spans never split multi-byte characters.
 */
export function renderCommentBody(view: CommentView, activeElement: string | null): string {
  const layers: Layer[] = [
    ...view.sentences.map((s) => ({ start: s.start, end: s.end, layer: "sentence" as const, sentence: s })),
    ...view.keyword_spans.map((k) => ({ start: k.start, end: k.end, layer: "keyword" as const, keyword: k })),
  ];
  const pieces: string[] = [];
  for (const segment of segmentByBytes(view.body, layers)) {
    if (!segment.text) continue;
    let html = escapeHtml(segment.text);
    const keyword = segment.covers.find((c) => c.layer === "keyword");
    const sentence = segment.covers.find((c) => c.layer === "sentence");
    if (keyword?.keyword) {
      const color = clusterColor(activeElement);
      html =
        `<mark class="kw" data-canonical="${escapeHtml(keyword.keyword.canonical)}"` +
        ` style="--kw-color: ${color}">${html}</mark>`;
    }
    if (sentence?.sentence) {
      const s = sentence.sentence;
      const classes = [`label-${s.label}`];
      if (s.highlighted) classes.push("sentence-highlight");
      html = `<span class="${classes.join(" ")}" data-label="${s.label}">${html}</span>`;
    }
    pieces.push(html);
  }
  return pieces.join("");
}

/** Plain text content of rendered HTML (tags stripped, entities restored). */
export function textContent(html: string): string {
  return html
    .replace(/<[^>]*>/g, "")
    .replaceAll("&lt;", "<")
    .replaceAll("&gt;", ">")
    .replaceAll("&quot;", '"')
    .replaceAll("&#39;", "'")
    .replaceAll("&amp;", "&");
}
