/** Linear scales and round tick positions for the axes. */

export interface Scale {
    (value: number): number;
    domain: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
    const [d0, d1] = domain;
    const [r0, r1] = range;
    const span = d1 - d0 || 1;
    const scale = ((value: number) => r0 + ((value - d0) / span) * (r1 - r0)) as Scale;
    scale.domain = domain;
    return scale;
}

export function ticks(lo: number, hi: number, count = 5): number[] {
    if (!(hi > lo)) return [lo];
    const rawStep = (hi - lo) / Math.max(1, count);
    const magnitude = 10 ** Math.floor(Math.log10(rawStep));
    let step = magnitude;
    for (const multiple of [1, 2, 5, 10]) {
        if (magnitude * multiple >= rawStep) {
            step = magnitude * multiple;
            break;
        }
    }
    const start = Math.ceil(lo / step) * step;
    const out: number[] = [];
    for (let v = start; v <= hi + step * 1e-9; v += step) {
        out.push(Math.abs(v) < step * 1e-9 ? 0 : Number(v.toPrecision(12)));
    }
    return out;
}

export function formatTick(value: number): string {
    if (Number.isInteger(value)) return String(value);
    const fixed = value.toFixed(2);
    return fixed.replace(/0+$/, "").replace(/\.$/, "");
}
