/**
 * Fixed color scheme. Decision bars follow the evaluation convention
 * (accepted green, rejected red, invalid black); algorithm line colors are
 * documented in LEGEND.txt at the package root.
 */

import type { DecisionKind } from "./csv.js";

export const DECISION_COLORS: Record<DecisionKind, string> = {
    accepted: "#2ca02c",
    rejected: "#d62728",
    invalid: "#000000",
};

export const ALGORITHM_COLORS: Record<string, string> = {
    greedy: "#1f77b4",
    covce: "#ff7f0e",
    covceload: "#9467bd",
    gvop: "#17becf",
};

export const FALLBACK_COLOR = "#7f7f7f";

export function algorithmColor(name: string): string {
    return ALGORITHM_COLORS[name] ?? FALLBACK_COLOR;
}
