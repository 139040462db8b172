import type { Axis, FrameDocument, FrameItem } from "./types.js";

const MARGIN = { left: 40, right: 10, top: 10, bottom: 30 };

function fmt(v: number): string {
  return v.toFixed(3);
}

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function axisSvg(axis: Axis, width: number, height: number): string {
  const parts = [`<g class="axis axis-${axis.orient}">`];
  if (axis.orient === "bottom") {
    const y = height - MARGIN.bottom;
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y}" x2="${width - MARGIN.right}" y2="${y}" stroke="#888888"/>`,
    );
    for (const tick of axis.ticks) {
      const x = fmt(tick.pos);
      parts.push(
        `<line x1="${x}" y1="${y}" x2="${x}" y2="${y + 5}" stroke="#888888"/>`,
      );
      parts.push(
        `<text x="${x}" y="${y + 18}" text-anchor="middle" font-size="10">${esc(tick.label)}</text>`,
      );
    }
  } else {
    const x = MARGIN.left;
    parts.push(
      `<line x1="${x}" y1="${MARGIN.top}" x2="${x}" y2="${height - MARGIN.bottom}" stroke="#888888"/>`,
    );
    for (const tick of axis.ticks) {
      const y = fmt(tick.pos);
      parts.push(
        `<line x1="${x - 5}" y1="${y}" x2="${x}" y2="${y}" stroke="#888888"/>`,
      );
      parts.push(
        `<text x="${x - 8}" y="${y}" text-anchor="end" dominant-baseline="middle" font-size="10">${esc(tick.label)}</text>`,
      );
    }
  }
  parts.push("</g>");
  return parts.join("\n");
}

function itemSvg(item: FrameItem): string {
  const opacity = item.opacity !== 1.0 ? ` opacity="${fmt(item.opacity)}"` : "";
  switch (item.kind) {
    case "circle":
      return `<circle cx="${fmt(item.x)}" cy="${fmt(item.y)}" r="${fmt(item.r ?? 0)}" fill="${item.fill}"${opacity}/>`;
    case "rect": {
      const w = (item.x2 ?? item.x) - item.x;
      const h = (item.y2 ?? item.y) - item.y;
      return `<rect x="${fmt(item.x)}" y="${fmt(item.y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${item.fill}"${opacity}/>`;
    }
    case "line": {
      const pts = (item.points ?? [])
        .map(([x, y]) => `${fmt(x)},${fmt(y)}`)
        .join(" ");
      return `<polyline points="${pts}" fill="none" stroke="${item.stroke}" stroke-width="1.5"${opacity}/>`;
    }
    case "text":
      return `<text x="${fmt(item.x)}" y="${fmt(item.y)}" fill="${item.fill}" font-size="11"${opacity}>${esc(item.text ?? "")}</text>`;
  }
}

/**
 * Project a frame document to SVG markup.  A pure function of the
 * document: all layout and styling decisions were already made by the
 * service.
 */
export function renderFrame(doc: FrameDocument): string {
  const out = [
    `<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="${doc.width}" height="${doc.height}" viewBox="0 0 ${doc.width} ${doc.height}">`,
  ];
  out.push('<g class="axes">');
  for (const axis of doc.axes) out.push(axisSvg(axis, doc.width, doc.height));
  out.push("</g>");
  out.push('<g class="marks">');
  for (const item of doc.items) out.push(itemSvg(item));
  out.push("</g>");
  out.push("</svg>");
  return out.join("\n") + "\n";
}
