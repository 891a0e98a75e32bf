/**
 * Readers for the simulator's CSV schemas. The files are plain
 * comma-separated tables without quoting, so a hand-rolled parser keeps the
 * package dependency-free; any schema mismatch is reported with the
 * offending column name.
 */

import { readFileSync } from "node:fs";

export interface MetricsRow {
    index: number;
    algorithm: string;
    cum_profit: number;
    violation: number;
    avg_violation: number;
    relative_profit: number;
    avg_relative_profit: number;
}

export interface WindowRow {
    window_index: number;
    algorithm: string;
    acceptance_ratio: number;
}

export type DecisionKind = "accepted" | "rejected" | "invalid";

export interface DecisionRow {
    index: number;
    algorithm: string;
    decision: DecisionKind;
    benefit: number;
}

export class SchemaError extends Error {}

function parseTable(path: string, required: string[]): Record<string, string>[] {
    const text = readFileSync(path, "utf8");
    const lines = text.split("\n").filter((line) => line.length > 0);
    if (lines.length === 0) {
        throw new SchemaError(`${path}: empty file`);
    }
    const header = lines[0].split(",");
    for (const column of required) {
        if (!header.includes(column)) {
            throw new SchemaError(`${path}: missing column '${column}'`);
        }
    }
    return lines.slice(1).map((line, i) => {
        const cells = line.split(",");
        if (cells.length !== header.length) {
            throw new SchemaError(`${path}: row ${i + 2} has ${cells.length} cells`);
        }
        return Object.fromEntries(header.map((name, j) => [name, cells[j]]));
    });
}

function num(row: Record<string, string>, column: string, path: string): number {
    const value = Number(row[column]);
    if (!Number.isFinite(value)) {
        throw new SchemaError(`${path}: column '${column}' has non-numeric value '${row[column]}'`);
    }
    return value;
}

export function readMetricsCsv(path: string): MetricsRow[] {
    const required = [
        "index", "algorithm", "cum_profit", "violation", "avg_violation",
        "relative_profit", "avg_relative_profit",
    ];
    return parseTable(path, required).map((row) => ({
        index: num(row, "index", path),
        algorithm: row["algorithm"],
        cum_profit: num(row, "cum_profit", path),
        violation: num(row, "violation", path),
        avg_violation: num(row, "avg_violation", path),
        relative_profit: num(row, "relative_profit", path),
        avg_relative_profit: num(row, "avg_relative_profit", path),
    }));
}

export function readWindowsCsv(path: string): WindowRow[] {
    return parseTable(path, ["window_index", "algorithm", "acceptance_ratio"]).map((row) => ({
        window_index: num(row, "window_index", path),
        algorithm: row["algorithm"],
        acceptance_ratio: num(row, "acceptance_ratio", path),
    }));
}

export function readDecisionsCsv(path: string): DecisionRow[] {
    return parseTable(path, ["index", "algorithm", "decision", "benefit"]).map((row) => {
        const decision = row["decision"];
        if (decision !== "accepted" && decision !== "rejected" && decision !== "invalid") {
            throw new SchemaError(`${path}: column 'decision' has unknown value '${decision}'`);
        }
        return {
            index: num(row, "index", path),
            algorithm: row["algorithm"],
            decision,
            benefit: num(row, "benefit", path),
        };
    });
}
