/**
 * Scene renderer: raster output as an 8-bit RGBA PNG.
 *
 * Self-contained rasterizer (lines, rectangles, 5x7 bitmap text) plus a
 * minimal PNG encoder on node's zlib; no native canvas dependency.  Output
 * is deterministic: no timestamps or ancillary chunks.
 */
import { deflateSync } from "node:zlib";

import { GLYPH_HEIGHT, GLYPH_WIDTH, glyphFor } from "./font.js";
import type { Scene, SceneItem, Stroke, TextItem } from "./scene.js";

type Rgb = [number, number, number];

function parseColor(color: string): Rgb {
  const match = /^#([0-9a-fA-F]{6})$/.exec(color);
  if (!match) throw new Error(`unsupported color ${color} (use #rrggbb)`);
  const value = parseInt(match[1]!, 16);
  return [(value >> 16) & 0xff, (value >> 8) & 0xff, value & 0xff];
}

class Raster {
  readonly width: number;
  readonly height: number;
  readonly pixels: Uint8Array;

  constructor(width: number, height: number, background: string) {
    this.width = Math.round(width);
    this.height = Math.round(height);
    this.pixels = new Uint8Array(this.width * this.height * 4);
    const [r, g, b] = parseColor(background);
    for (let i = 0; i < this.pixels.length; i += 4) {
      this.pixels[i] = r;
      this.pixels[i + 1] = g;
      this.pixels[i + 2] = b;
      this.pixels[i + 3] = 255;
    }
  }

  set(x: number, y: number, [r, g, b]: Rgb): void {
    const xi = Math.round(x);
    const yi = Math.round(y);
    if (xi < 0 || yi < 0 || xi >= this.width || yi >= this.height) return;
    const i = (yi * this.width + xi) * 4;
    this.pixels[i] = r;
    this.pixels[i + 1] = g;
    this.pixels[i + 2] = b;
    this.pixels[i + 3] = 255;
  }

  stamp(x: number, y: number, color: Rgb, size: number): void {
    const radius = Math.floor(size / 2);
    for (let dy = -radius; dy <= radius; dy += 1) {
      for (let dx = -radius; dx <= radius; dx += 1) {
        this.set(x + dx, y + dy, color);
      }
    }
  }

  fillRect(x: number, y: number, w: number, h: number, color: Rgb): void {
    const x0 = Math.max(0, Math.round(Math.min(x, x + w)));
    const x1 = Math.min(this.width - 1, Math.round(Math.max(x, x + w)) - 1);
    const y0 = Math.max(0, Math.round(Math.min(y, y + h)));
    const y1 = Math.min(this.height - 1, Math.round(Math.max(y, y + h)) - 1);
    for (let yy = y0; yy <= y1; yy += 1) {
      for (let xx = x0; xx <= x1; xx += 1) {
        this.set(xx, yy, color);
      }
    }
  }

  /**
   * Walk the segment in unit steps, honoring an on/off dash pattern via the
   * distance accumulated so far (returned so polylines dash continuously).
   */
  segment(x1: number, y1: number, x2: number, y2: number, stroke: Stroke, travelled = 0): number {
    const color = parseColor(stroke.color);
    const size = Math.max(1, Math.round(stroke.width));
    const length = Math.hypot(x2 - x1, y2 - y1);
    const steps = Math.max(1, Math.ceil(length));
    const pattern = stroke.dash && stroke.dash.length > 0 ? stroke.dash : null;
    const period = pattern ? pattern.reduce((a, b) => a + b, 0) : 1;
    for (let i = 0; i <= steps; i += 1) {
      const t = i / steps;
      const distance = travelled + t * length;
      if (pattern) {
        let phase = distance % period;
        let on = true;
        for (const run of pattern) {
          if (phase < run) break;
          phase -= run;
          on = !on;
        }
        if (!on) continue;
      }
      this.stamp(x1 + t * (x2 - x1), y1 + t * (y2 - y1), color, size);
    }
    return travelled + length;
  }

  text(item: TextItem): void {
    const color = parseColor(item.color);
    const scale = Math.max(1, Math.round(item.size / 10));
    const label = item.text.toUpperCase();
    const advance = (GLYPH_WIDTH + 1) * scale;
    const textWidth = label.length * advance - scale;
    const offset = item.anchor === "middle" ? -textWidth / 2 : item.anchor === "end" ? -textWidth : 0;
    const angle = ((item.rotate ?? 0) * Math.PI) / 180;
    const cos = Math.cos(angle);
    const sin = Math.sin(angle);
    for (let index = 0; index < label.length; index += 1) {
      const rows = glyphFor(label[index]!);
      for (let row = 0; row < GLYPH_HEIGHT; row += 1) {
        for (let col = 0; col < GLYPH_WIDTH; col += 1) {
          if (!(rows[row]! & (1 << (GLYPH_WIDTH - 1 - col)))) continue;
          for (let sy = 0; sy < scale; sy += 1) {
            for (let sx = 0; sx < scale; sx += 1) {
              // glyph-local coordinates, baseline at the glyph bottom
              const gx = offset + index * advance + col * scale + sx;
              const gy = (row - GLYPH_HEIGHT + 1) * scale + sy;
              this.set(item.x + gx * cos - gy * sin, item.y + gx * sin + gy * cos, color);
            }
          }
        }
      }
    }
  }
}

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n += 1) {
    let c = n;
    for (let k = 0; k < 8; k += 1) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

function crc32(bytes: Uint8Array): number {
  let crc = 0xffffffff;
  for (const byte of bytes) {
    crc = CRC_TABLE[(crc ^ byte) & 0xff]! ^ (crc >>> 8);
  }
  return (crc ^ 0xffffffff) >>> 0;
}

function chunk(type: string, data: Uint8Array): Buffer {
  const out = Buffer.alloc(12 + data.length);
  out.writeUInt32BE(data.length, 0);
  out.write(type, 4, "ascii");
  Buffer.from(data).copy(out, 8);
  out.writeUInt32BE(crc32(out.subarray(4, 8 + data.length)), 8 + data.length);
  return out;
}

export function encodePng(width: number, height: number, rgba: Uint8Array): Buffer {
  const stride = width * 4;
  const raw = Buffer.alloc((stride + 1) * height);
  for (let y = 0; y < height; y += 1) {
    raw[y * (stride + 1)] = 0; // filter: none
    Buffer.from(rgba.subarray(y * stride, (y + 1) * stride)).copy(raw, y * (stride + 1) + 1);
  }
  const header = Buffer.alloc(13);
  header.writeUInt32BE(width, 0);
  header.writeUInt32BE(height, 4);
  header[8] = 8; // bit depth
  header[9] = 6; // color type: RGBA
  const signature = Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);
  return Buffer.concat([
    signature,
    chunk("IHDR", header),
    chunk("IDAT", deflateSync(raw, { level: 9 })),
    chunk("IEND", new Uint8Array(0)),
  ]);
}

function drawItem(raster: Raster, item: SceneItem): void {
  switch (item.kind) {
    case "polyline": {
      let travelled = 0;
      for (let i = 1; i < item.points.length; i += 1) {
        const [x1, y1] = item.points[i - 1]!;
        const [x2, y2] = item.points[i]!;
        travelled = raster.segment(x1, y1, x2, y2, item.stroke, travelled);
      }
      break;
    }
    case "segment":
      raster.segment(item.x1, item.y1, item.x2, item.y2, item.stroke);
      break;
    case "rect":
      raster.fillRect(item.x, item.y, item.width, item.height, parseColor(item.fill));
      break;
    case "text":
      raster.text(item);
      break;
  }
}

export function renderPng(scene: Scene): Buffer {
  const raster = new Raster(scene.width, scene.height, scene.background);
  for (const item of scene.items) {
    drawItem(raster, item);
  }
  return encodePng(raster.width, raster.height, raster.pixels);
}
