import { inflateSync } from "node:zlib";
import { describe, expect, it } from "vitest";
import { formatTick, linearScale, ticks } from "../src/scale.js";
import { Scene, toPng, toSvg } from "../src/scene.js";

describe("svg output", () => {
    it("serializes primitives and escapes text", () => {
        const scene = new Scene(100, 50);
        scene.rect(1, 2, 3, 4, "#ff0000");
        scene.polyline([[0, 0], [10, 10]], "#00ff00", 2);
        scene.text(5, 5, "a < b & c", "#000000", 10, "middle");
        const svg = toSvg(scene);
        expect(svg).toContain('width="100" height="50"');
        expect(svg).toContain('<rect x="1" y="2" width="3" height="4" fill="#ff0000"/>');
        expect(svg).toContain('<polyline points="0,0 10,10"');
        expect(svg).toContain("a &lt; b &amp; c");
    });

    it("drops empty polylines", () => {
        const scene = new Scene(10, 10);
        scene.polyline([], "#000000");
        expect(scene.primitives).toHaveLength(0);
    });

    it("is deterministic", () => {
        const build = () => {
            const scene = new Scene(60, 40);
            scene.rect(0, 0, 10, 10, "#123456");
            scene.text(5, 20, "label", "#000", 10, "start");
            return toSvg(scene);
        };
        expect(build()).toBe(build());
    });
});

describe("png output", () => {
    it("emits a structurally valid png", () => {
        const scene = new Scene(40, 30);
        scene.rect(0, 0, 40, 30, "#ffffff");
        scene.polyline([[0, 0], [39, 29]], "#ff0000", 2);
        scene.text(5, 20, "42", "#000000", 8, "start");
        const png = toPng(scene);
        expect([...png.subarray(0, 8)]).toEqual([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);
        expect(png.subarray(12, 16).toString("ascii")).toBe("IHDR");
        expect(png.readUInt32BE(16)).toBe(40); // width
        expect(png.readUInt32BE(20)).toBe(30); // height
        // inflate the IDAT payload and check the raw scanline size
        const idatStart = png.indexOf("IDAT");
        const idatLen = png.readUInt32BE(idatStart - 4);
        const raw = inflateSync(png.subarray(idatStart + 4, idatStart + 4 + idatLen));
        expect(raw.length).toBe((40 * 3 + 1) * 30);
    });

    it("paints the requested pixels", () => {
        const scene = new Scene(4, 2, "#ffffff");
        scene.rect(0, 0, 1, 1, "#ff0000");
        const png = toPng(scene);
        const idatStart = png.indexOf("IDAT");
        const idatLen = png.readUInt32BE(idatStart - 4);
        const raw = inflateSync(png.subarray(idatStart + 4, idatStart + 4 + idatLen));
        // first scanline: filter byte, then RGB of pixel (0,0)
        expect([raw[1], raw[2], raw[3]]).toEqual([255, 0, 0]);
        expect([raw[4], raw[5], raw[6]]).toEqual([255, 255, 255]);
    });
});

describe("scales", () => {
    it("maps domains linearly", () => {
        const scale = linearScale([0, 10], [100, 200]);
        expect(scale(0)).toBe(100);
        expect(scale(5)).toBe(150);
        expect(scale(10)).toBe(200);
    });

    it("handles degenerate domains", () => {
        const scale = linearScale([3, 3], [0, 10]);
        expect(Number.isFinite(scale(3))).toBe(true);
    });

    it("produces round ticks covering the domain", () => {
        const t = ticks(0, 1600, 6);
        expect(t[0]).toBeGreaterThanOrEqual(0);
        expect(t.at(-1)).toBeLessThanOrEqual(1600);
        expect(t).toContain(500);
        expect(ticks(0, 1, 5)).toContain(0.2);
    });

    it("formats ticks without trailing zeros", () => {
        expect(formatTick(500)).toBe("500");
        expect(formatTick(0.2)).toBe("0.2");
        expect(formatTick(1.5)).toBe("1.5");
    });
});
