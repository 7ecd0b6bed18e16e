/** Scene renderer: vector output as a standalone SVG document. */
import type { Scene, SceneItem, Stroke } from "./scene.js";

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function round(v: number): string {
  return Number(v.toFixed(2)).toString();
}

function strokeAttrs(stroke: Stroke): string {
  let attrs = `stroke="${stroke.color}" stroke-width="${stroke.width}" fill="none"`;
  if (stroke.dash && stroke.dash.length > 0) {
    attrs += ` stroke-dasharray="${stroke.dash.join(" ")}"`;
  }
  return attrs;
}

function renderItem(item: SceneItem): string {
  switch (item.kind) {
    case "polyline": {
      const points = item.points.map(([x, y]) => `${round(x)},${round(y)}`).join(" ");
      return `<polyline points="${points}" ${strokeAttrs(item.stroke)} stroke-linejoin="round"/>`;
    }
    case "segment":
      return (
        `<line x1="${round(item.x1)}" y1="${round(item.y1)}" ` +
        `x2="${round(item.x2)}" y2="${round(item.y2)}" ${strokeAttrs(item.stroke)}/>`
      );
    case "rect":
      return (
        `<rect x="${round(item.x)}" y="${round(item.y)}" width="${round(item.width)}" ` +
        `height="${round(item.height)}" fill="${item.fill}"/>`
      );
    case "text": {
      const transform = item.rotate ? ` transform="rotate(${item.rotate} ${round(item.x)} ${round(item.y)})"` : "";
      return (
        `<text x="${round(item.x)}" y="${round(item.y)}" font-size="${item.size}" ` +
        `font-family="Helvetica, Arial, sans-serif" text-anchor="${anchorName(item.anchor)}" ` +
        `fill="${item.color}"${transform}>${escapeXml(item.text)}</text>`
      );
    }
  }
}

function anchorName(anchor: "start" | "middle" | "end"): string {
  return anchor;
}

export function renderSvg(scene: Scene): string {
  const lines = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${scene.width}" height="${scene.height}" ` +
      `viewBox="0 0 ${scene.width} ${scene.height}">`,
    `<rect x="0" y="0" width="${scene.width}" height="${scene.height}" fill="${scene.background}"/>`,
  ];
  for (const item of scene.items) {
    lines.push(renderItem(item));
  }
  lines.push("</svg>");
  return lines.join("\n") + "\n";
}
