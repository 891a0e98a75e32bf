#!/usr/bin/env node
/**
 * plot --kind violation --in DIR --out fig.svg [--range 1:6400]
 *
 * Renders one figure from the CSVs in DIR. The output format follows the
 * file extension: .svg (vector) or .png (raster).
 */

import { writeFileSync } from "node:fs";
import { SchemaError } from "./csv.js";
import { buildFigure, FIGURE_KINDS, FigureKind } from "./figures.js";
import { Scene, toPng, toSvg } from "./scene.js";

const USAGE = `usage: plot --kind <${FIGURE_KINDS.join("|")}> --in DIR --out FILE [--range A:B]`;

export function parseArgs(argv: string[]): { kind: FigureKind; inputDir: string; out: string; range?: [number, number] } {
    const args = argv[0] === "plot" ? argv.slice(1) : [...argv];
    let kind: string | undefined;
    let inputDir: string | undefined;
    let out: string | undefined;
    let range: [number, number] | undefined;
    for (let i = 0; i < args.length; i += 2) {
        const flag = args[i];
        const value = args[i + 1];
        if (value === undefined) {
            throw new Error(`missing value for ${flag}\n${USAGE}`);
        }
        switch (flag) {
            case "--kind":
                kind = value.replaceAll("_", "-");
                break;
            case "--in":
                inputDir = value;
                break;
            case "--out":
                out = value;
                break;
            case "--range": {
                const match = /^(\d+):(\d+)$/.exec(value);
                if (!match) {
                    throw new Error(`--range expects A:B, got '${value}'\n${USAGE}`);
                }
                range = [Number(match[1]), Number(match[2])];
                break;
            }
            default:
                throw new Error(`unknown flag ${flag}\n${USAGE}`);
        }
    }
    if (!kind || !inputDir || !out) {
        throw new Error(USAGE);
    }
    if (!(FIGURE_KINDS as readonly string[]).includes(kind)) {
        throw new Error(`unknown figure kind '${kind}'\n${USAGE}`);
    }
    return { kind: kind as FigureKind, inputDir, out, range };
}

export function writeScene(scene: Scene, out: string): void {
    if (out.endsWith(".png")) {
        writeFileSync(out, toPng(scene));
    } else if (out.endsWith(".svg")) {
        writeFileSync(out, toSvg(scene));
    } else {
        throw new Error(`unsupported output extension for '${out}' (use .svg or .png)`);
    }
}

export function main(argv: string[]): number {
    try {
        const spec = parseArgs(argv);
        const scene = buildFigure({ kind: spec.kind, inputDir: spec.inputDir, range: spec.range });
        writeScene(scene, spec.out);
        console.log(`wrote ${spec.out}`);
        return 0;
    } catch (error) {
        if (error instanceof SchemaError) {
            console.error(`schema error: ${(error as Error).message}`);
        } else {
            console.error((error as Error).message);
        }
        return 1;
    }
}

const invokedDirectly = process.argv[1]?.endsWith("cli.js");
if (invokedDirectly) {
    process.exit(main(process.argv.slice(2)));
}
