/**
 * A minimal retained scene: rectangles, polylines and text, serialized to
 * SVG or rasterized to PNG. Both renderers consume the same primitives, so
 * a figure kind is written once and the output format is a file-extension
 * decision at the very end.
 */

import { deflateSync } from "node:zlib";
import { GLYPH_HEIGHT, GLYPH_WIDTH, glyph } from "./font.js";

export type Anchor = "start" | "middle" | "end";

export interface Rect {
    kind: "rect";
    x: number;
    y: number;
    w: number;
    h: number;
    fill: string;
}

export interface Polyline {
    kind: "polyline";
    points: [number, number][];
    stroke: string;
    width: number;
}

export interface Text {
    kind: "text";
    x: number;
    y: number; // baseline
    value: string;
    fill: string;
    size: number;
    anchor: Anchor;
}

export type Primitive = Rect | Polyline | Text;

export class Scene {
    readonly primitives: Primitive[] = [];

    constructor(
        readonly width: number,
        readonly height: number,
        readonly background = "#ffffff",
    ) {}

    rect(x: number, y: number, w: number, h: number, fill: string): void {
        this.primitives.push({ kind: "rect", x, y, w, h, fill });
    }

    polyline(points: [number, number][], stroke: string, width = 1.5): void {
        if (points.length > 0) {
            this.primitives.push({ kind: "polyline", points, stroke, width });
        }
    }

    text(x: number, y: number, value: string, fill = "#000000", size = 12, anchor: Anchor = "start"): void {
        this.primitives.push({ kind: "text", x, y, value, fill, size, anchor });
    }
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

function escapeXml(value: string): string {
    return value
        .replaceAll("&", "&amp;")
        .replaceAll("<", "&lt;")
        .replaceAll(">", "&gt;")
        .replaceAll('"', "&quot;");
}

const fmt = (value: number) => (Number.isInteger(value) ? String(value) : value.toFixed(2));

export function toSvg(scene: Scene): string {
    const parts: string[] = [];
    parts.push(
        `<svg xmlns="http://www.w3.org/2000/svg" width="${scene.width}" height="${scene.height}" ` +
            `viewBox="0 0 ${scene.width} ${scene.height}">`,
    );
    parts.push(`<rect width="${scene.width}" height="${scene.height}" fill="${scene.background}"/>`);
    for (const p of scene.primitives) {
        if (p.kind === "rect") {
            parts.push(
                `<rect x="${fmt(p.x)}" y="${fmt(p.y)}" width="${fmt(Math.max(0, p.w))}" ` +
                    `height="${fmt(Math.max(0, p.h))}" fill="${p.fill}"/>`,
            );
        } else if (p.kind === "polyline") {
            const points = p.points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
            parts.push(
                `<polyline points="${points}" fill="none" stroke="${p.stroke}" stroke-width="${p.width}"/>`,
            );
        } else {
            parts.push(
                `<text x="${fmt(p.x)}" y="${fmt(p.y)}" font-family="monospace" font-size="${p.size}" ` +
                    `fill="${p.fill}" text-anchor="${p.anchor}">${escapeXml(p.value)}</text>`,
            );
        }
    }
    parts.push("</svg>");
    return parts.join("\n") + "\n";
}

// ---------------------------------------------------------------------------
// PNG
// ---------------------------------------------------------------------------

function parseColor(color: string): [number, number, number] {
    const hex = color.replace("#", "");
    const full = hex.length === 3 ? hex.split("").map((c) => c + c).join("") : hex;
    const value = parseInt(full, 16);
    return [(value >> 16) & 0xff, (value >> 8) & 0xff, value & 0xff];
}

class Raster {
    readonly data: Uint8Array;

    constructor(readonly width: number, readonly height: number, background: string) {
        this.data = new Uint8Array(width * height * 3);
        const [r, g, b] = parseColor(background);
        for (let i = 0; i < width * height; i++) {
            this.data[3 * i] = r;
            this.data[3 * i + 1] = g;
            this.data[3 * i + 2] = b;
        }
    }

    set(x: number, y: number, rgb: [number, number, number]): void {
        const xi = Math.round(x);
        const yi = Math.round(y);
        if (xi < 0 || yi < 0 || xi >= this.width || yi >= this.height) return;
        const i = 3 * (yi * this.width + xi);
        this.data[i] = rgb[0];
        this.data[i + 1] = rgb[1];
        this.data[i + 2] = rgb[2];
    }

    fillRect(x: number, y: number, w: number, h: number, rgb: [number, number, number]): void {
        for (let yy = Math.round(y); yy < Math.round(y + h); yy++) {
            for (let xx = Math.round(x); xx < Math.round(x + w); xx++) {
                this.set(xx, yy, rgb);
            }
        }
    }

    line(x0: number, y0: number, x1: number, y1: number, rgb: [number, number, number], width: number): void {
        const steps = Math.max(Math.abs(x1 - x0), Math.abs(y1 - y0), 1);
        const radius = Math.max(0, Math.round(width / 2) - 1);
        for (let s = 0; s <= steps; s++) {
            const x = x0 + ((x1 - x0) * s) / steps;
            const y = y0 + ((y1 - y0) * s) / steps;
            for (let dx = -radius; dx <= radius; dx++) {
                for (let dy = -radius; dy <= radius; dy++) {
                    this.set(x + dx, y + dy, rgb);
                }
            }
        }
    }

    text(t: Text): void {
        const rgb = parseColor(t.fill);
        const scale = Math.max(1, Math.round(t.size / 8));
        const advance = (GLYPH_WIDTH + 1) * scale;
        const total = t.value.length * advance;
        let x = t.x;
        if (t.anchor === "middle") x -= total / 2;
        if (t.anchor === "end") x -= total;
        const top = t.y - GLYPH_HEIGHT * scale;
        for (const ch of t.value) {
            const rows = glyph(ch);
            for (let r = 0; r < GLYPH_HEIGHT; r++) {
                for (let c = 0; c < GLYPH_WIDTH; c++) {
                    if (rows[r][c] === "#") {
                        this.fillRect(x + c * scale, top + r * scale, scale, scale, rgb);
                    }
                }
            }
            x += advance;
        }
    }
}

const CRC_TABLE = (() => {
    const table = new Uint32Array(256);
    for (let n = 0; n < 256; n++) {
        let c = n;
        for (let k = 0; k < 8; k++) {
            c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
        }
        table[n] = c >>> 0;
    }
    return table;
})();

function crc32(bytes: Uint8Array): number {
    let crc = 0xffffffff;
    for (const byte of bytes) {
        crc = CRC_TABLE[(crc ^ byte) & 0xff] ^ (crc >>> 8);
    }
    return (crc ^ 0xffffffff) >>> 0;
}

function chunk(type: string, payload: Uint8Array): Uint8Array {
    const out = new Uint8Array(12 + payload.length);
    const view = new DataView(out.buffer);
    view.setUint32(0, payload.length);
    for (let i = 0; i < 4; i++) out[4 + i] = type.charCodeAt(i);
    out.set(payload, 8);
    view.setUint32(8 + payload.length, crc32(out.subarray(4, 8 + payload.length)));
    return out;
}

export function toPng(scene: Scene): Buffer {
    const raster = new Raster(scene.width, scene.height, scene.background);
    for (const p of scene.primitives) {
        if (p.kind === "rect") {
            raster.fillRect(p.x, p.y, p.w, p.h, parseColor(p.fill));
        } else if (p.kind === "polyline") {
            const rgb = parseColor(p.stroke);
            for (let i = 1; i < p.points.length; i++) {
                raster.line(
                    p.points[i - 1][0], p.points[i - 1][1],
                    p.points[i][0], p.points[i][1],
                    rgb, p.width,
                );
            }
        } else {
            raster.text(p);
        }
    }
    const stride = scene.width * 3;
    const filtered = new Uint8Array((stride + 1) * scene.height);
    for (let y = 0; y < scene.height; y++) {
        filtered[y * (stride + 1)] = 0; // filter type none
        filtered.set(raster.data.subarray(y * stride, (y + 1) * stride), y * (stride + 1) + 1);
    }
    const ihdr = new Uint8Array(13);
    const view = new DataView(ihdr.buffer);
    view.setUint32(0, scene.width);
    view.setUint32(4, scene.height);
    ihdr[8] = 8; // bit depth
    ihdr[9] = 2; // color type: RGB
    const signature = Uint8Array.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);
    return Buffer.concat([
        signature,
        chunk("IHDR", ihdr),
        chunk("IDAT", deflateSync(filtered)),
        chunk("IEND", new Uint8Array(0)),
    ]);
}
