// Client-side raster export: the engine only guarantees the JSON
// document, so PNG/JPG come from rendering it here. The SVG builder is
// pure (testable); canvas conversion runs only in the browser.

import { escapeHtml } from "./highlight.js";
import type { MapDocument, MapNode } from "./types.js";

const NODE_W = 180;
const NODE_H = 34;
const GAP_X = 60;
const GAP_Y = 14;

interface Placed {
  node: MapNode;
  x: number;
  y: number;
}

function layout(doc: MapDocument): { placed: Placed[]; width: number; height: number } {
  const byId = new Map(doc.nodes.map((n) => [n.node_id, n]));
  const placed: Placed[] = [];
  let cursorY = 0;

  function subtree(nodeId: string, depth: number): { top: number; bottom: number; centre: number } {
    const node = byId.get(nodeId);
    if (!node) {
      const y = cursorY;
      cursorY += NODE_H + GAP_Y;
      return { top: y, bottom: y + NODE_H, centre: y + NODE_H / 2 };
    }
    if (!node.children.length) {
      const y = cursorY;
      cursorY += NODE_H + GAP_Y;
      placed.push({ node, x: depth * (NODE_W + GAP_X), y });
      return { top: y, bottom: y + NODE_H, centre: y + NODE_H / 2 };
    }
    const extents = node.children.map((c) => subtree(c, depth + 1));
    const top = extents[0]!.top;
    const bottom = extents[extents.length - 1]!.bottom;
    const centre = (extents[0]!.centre + extents[extents.length - 1]!.centre) / 2;
    placed.push({ node, x: depth * (NODE_W + GAP_X), y: centre - NODE_H / 2 });
    return { top, bottom, centre };
  }

  subtree(doc.root, 0);
  const width = Math.max(...placed.map((p) => p.x)) + NODE_W + 20;
  const height = Math.max(cursorY, NODE_H) + 20;
  return { placed, width, height };
}

function truncate(title: string, max = 26): string {
  return title.length <= max ? title : title.slice(0, max - 1) + "…";
}

export function mindmapToSvg(doc: MapDocument): string {
  const { placed, width, height } = layout(doc);
  const byId = new Map(placed.map((p) => [p.node.node_id, p]));
  const edges: string[] = [];
  for (const { node, x, y } of placed) {
    for (const childId of node.children) {
      const child = byId.get(childId);
      if (!child) continue;
      const x1 = x + NODE_W;
      const y1 = y + NODE_H / 2;
      const x2 = child.x;
      const y2 = child.y + NODE_H / 2;
      edges.push(
        `<path d="M ${x1} ${y1} C ${x1 + GAP_X / 2} ${y1}, ${x2 - GAP_X / 2} ${y2}, ${x2} ${y2}"` +
          ` fill="none" stroke="#94a3b8" stroke-width="1.5"/>`,
      );
    }
  }
  const boxes = placed
    .map(({ node, x, y }) => {
      const fill = node.link ? "#eef2ff" : "#ffffff";
      return (
        `<g>` +
        `<rect x="${x}" y="${y + 10}" width="${NODE_W}" height="${NODE_H}" rx="8"` +
        ` fill="${fill}" stroke="#64748b" stroke-width="1.5"/>` +
        `<text x="${x + NODE_W / 2}" y="${y + 10 + NODE_H / 2 + 4}" text-anchor="middle"` +
        ` font-family="system-ui, sans-serif" font-size="12">${escapeHtml(truncate(node.title))}</text>` +
        `</g>`
      );
    })
    .join("");
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height + 20}"` +
    ` viewBox="0 0 ${width} ${height + 20}">` +
    `<rect width="100%" height="100%" fill="#f8fafc"/>` +
    edges.join("") +
    boxes +
    `</svg>`
  );
}

/** Browser-only: rasterize the SVG and trigger a download. */
export async function downloadRaster(doc: MapDocument, format: "png" | "jpeg"): Promise<void> {
  const svg = mindmapToSvg(doc);
  const blob = new Blob([svg], { type: "image/svg+xml" });
  const url = URL.createObjectURL(blob);
  try {
    const image = new Image();
    await new Promise<void>((resolve, reject) => {
      image.onload = () => resolve();
      image.onerror = () => reject(new Error("could not render mindmap image"));
      image.src = url;
    });
    const canvas = document.createElement("canvas");
    canvas.width = image.width * 2;
    canvas.height = image.height * 2;
    const ctx = canvas.getContext("2d");
    if (!ctx) throw new Error("canvas unavailable");
    if (format === "jpeg") {
      ctx.fillStyle = "#ffffff";
      ctx.fillRect(0, 0, canvas.width, canvas.height);
    }
    ctx.scale(2, 2);
    ctx.drawImage(image, 0, 0);
    const link = document.createElement("a");
    link.href = canvas.toDataURL(`image/${format}`, 0.92);
    link.download = `${doc.map_id}.${format === "jpeg" ? "jpg" : "png"}`;
    link.click();
  } finally {
    URL.revokeObjectURL(url);
  }
}
