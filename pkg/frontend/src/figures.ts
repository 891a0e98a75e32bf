/**
 * The five figure kinds rendered from a run directory: windowed acceptance
 * ratio, violation, relative profit and average relative profit as one line
 * per algorithm, plus per-request benefit bars colored by decision.
 */

import { readdirSync } from "node:fs";
import { join } from "node:path";
import { algorithmColor, DECISION_COLORS } from "./colors.js";
import { readDecisionsCsv, readMetricsCsv, readWindowsCsv } from "./csv.js";
import { Scene } from "./scene.js";
import { formatTick, linearScale, ticks } from "./scale.js";

export const FIGURE_KINDS = [
    "acceptance-ratio",
    "violation",
    "relative-profit",
    "avg-relative-profit",
    "benefit-bars",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface PlotSpec {
    kind: FigureKind;
    inputDir: string;
    range?: [number, number]; // inclusive, 1-based request or window indexes
}

interface Series {
    name: string;
    points: [number, number][];
}

export function discoverAlgorithms(dir: string, suffix: string): string[] {
    const names: string[] = [];
    for (const entry of readdirSync(dir)) {
        if (entry.endsWith(suffix)) {
            names.push(entry.slice(0, -suffix.length));
        }
    }
    names.sort();
    return names;
}

function inRange(index: number, range?: [number, number]): boolean {
    return !range || (index >= range[0] && index <= range[1]);
}

const MARGIN = { left: 70, right: 24, top: 42, bottom: 52 };

function lineFigure(series: Series[], title: string, xLabel: string, yLabel: string): Scene {
    const scene = new Scene(680, 420);
    const plotW = scene.width - MARGIN.left - MARGIN.right;
    const plotH = scene.height - MARGIN.top - MARGIN.bottom;
    const xs = series.flatMap((s) => s.points.map((p) => p[0]));
    const ys = series.flatMap((s) => s.points.map((p) => p[1]));
    const xDomain: [number, number] = xs.length ? [Math.min(...xs), Math.max(...xs)] : [0, 1];
    const yTop = ys.length ? Math.max(...ys) : 1;
    const yDomain: [number, number] = [0, yTop > 0 ? yTop * 1.05 : 1];
    const x = linearScale(xDomain, [MARGIN.left, MARGIN.left + plotW]);
    const y = linearScale(yDomain, [MARGIN.top + plotH, MARGIN.top]);

    scene.text(scene.width / 2, 24, title, "#000000", 14, "middle");
    // axes
    scene.rect(MARGIN.left, MARGIN.top, 1, plotH, "#000000");
    scene.rect(MARGIN.left, MARGIN.top + plotH, plotW, 1, "#000000");
    for (const tick of ticks(xDomain[0], xDomain[1], 6)) {
        scene.rect(x(tick), MARGIN.top + plotH, 1, 4, "#000000");
        scene.text(x(tick), MARGIN.top + plotH + 18, formatTick(tick), "#000000", 10, "middle");
    }
    for (const tick of ticks(yDomain[0], yDomain[1], 5)) {
        scene.rect(MARGIN.left - 4, y(tick), 4, 1, "#000000");
        scene.text(MARGIN.left - 8, y(tick) + 4, formatTick(tick), "#000000", 10, "end");
        scene.rect(MARGIN.left, y(tick), plotW, 0.5, "#dddddd");
    }
    scene.text(MARGIN.left + plotW / 2, scene.height - 12, xLabel, "#000000", 11, "middle");
    scene.text(MARGIN.left, MARGIN.top - 8, yLabel, "#000000", 11, "start");
    // series and legend
    series.forEach((s, i) => {
        const color = algorithmColor(s.name);
        scene.polyline(s.points.map(([px, py]) => [x(px), y(py)] as [number, number]), color, 1.5);
        const lx = MARGIN.left + plotW - 130;
        const ly = MARGIN.top + 10 + i * 16;
        scene.rect(lx, ly - 5, 18, 3, color);
        scene.text(lx + 24, ly, s.name, "#000000", 10, "start");
    });
    return scene;
}

function metricsSeries(
    dir: string,
    column: "violation" | "relative_profit" | "avg_relative_profit",
    range?: [number, number],
): Series[] {
    return discoverAlgorithms(dir, "_metrics.csv").map((name) => ({
        name,
        points: readMetricsCsv(join(dir, `${name}_metrics.csv`))
            .filter((row) => inRange(row.index, range))
            .map((row) => [row.index, row[column]] as [number, number]),
    }));
}

function acceptanceFigure(dir: string, range?: [number, number]): Scene {
    const series = discoverAlgorithms(dir, "_windows.csv").map((name) => ({
        name,
        points: readWindowsCsv(join(dir, `${name}_windows.csv`))
            .filter((row) => inRange(row.window_index, range))
            .map((row) => [row.window_index, row.acceptance_ratio] as [number, number]),
    }));
    return lineFigure(series, "acceptance ratio per window", "window", "ratio");
}

function benefitBarsFigure(dir: string, range?: [number, number]): Scene {
    const algorithms = discoverAlgorithms(dir, "_decisions.csv");
    if (algorithms.length === 0) {
        throw new Error(`no *_decisions.csv files in ${dir}`);
    }
    const panelH = 150;
    const scene = new Scene(680, MARGIN.top + algorithms.length * panelH + 30);
    const plotW = scene.width - MARGIN.left - MARGIN.right;
    scene.text(scene.width / 2, 24, "benefits by admission decision", "#000000", 14, "middle");
    algorithms.forEach((name, panel) => {
        const rows = readDecisionsCsv(join(dir, `${name}_decisions.csv`)).filter((row) =>
            inRange(row.index, range),
        );
        const top = MARGIN.top + panel * panelH;
        const innerH = panelH - 40;
        const xDomain: [number, number] = rows.length
            ? [Math.min(...rows.map((r) => r.index)), Math.max(...rows.map((r) => r.index))]
            : [0, 1];
        const yTop = rows.length ? Math.max(...rows.map((r) => r.benefit)) : 1;
        const x = linearScale(xDomain, [MARGIN.left, MARGIN.left + plotW]);
        const y = linearScale([0, yTop], [top + innerH, top]);
        scene.rect(MARGIN.left, top, 1, innerH, "#000000");
        scene.rect(MARGIN.left, top + innerH, plotW, 1, "#000000");
        const barW = rows.length ? Math.max(1, Math.floor(plotW / rows.length) - 1) : 1;
        for (const row of rows) {
            const height = top + innerH - y(row.benefit);
            scene.rect(x(row.index) - barW / 2, y(row.benefit), barW, height,
                DECISION_COLORS[row.decision]);
        }
        scene.text(MARGIN.left + 4, top + 12, name, "#000000", 11, "start");
        for (const tick of ticks(xDomain[0], xDomain[1], 6)) {
            scene.text(x(tick), top + innerH + 14, formatTick(tick), "#000000", 9, "middle");
        }
        scene.text(MARGIN.left - 8, top + 8, formatTick(yTop), "#000000", 9, "end");
    });
    scene.text(MARGIN.left + plotW / 2, scene.height - 8, "request index", "#000000", 11, "middle");
    return scene;
}

export function buildFigure(spec: PlotSpec): Scene {
    switch (spec.kind) {
        case "acceptance-ratio":
            return acceptanceFigure(spec.inputDir, spec.range);
        case "violation":
            return lineFigure(
                metricsSeries(spec.inputDir, "violation", spec.range),
                "maximum capacity violation", "request index", "violation",
            );
        case "relative-profit":
            return lineFigure(
                metricsSeries(spec.inputDir, "relative_profit", spec.range),
                "relative profit", "request index", "profit/violation",
            );
        case "avg-relative-profit":
            return lineFigure(
                metricsSeries(spec.inputDir, "avg_relative_profit", spec.range),
                "average relative profit", "request index", "profit/avg violation",
            );
        case "benefit-bars":
            return benefitBarsFigure(spec.inputDir, spec.range);
    }
}
