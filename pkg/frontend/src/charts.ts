// Minimal dependency-free canvas line charts for the live series.

import type { SimState } from "./api.js";

export const RISK_COLORS: Record<string, string> = {
    C1: "#2e7d32",
    C2: "#558b2f",
    C3: "#f9a825",
    C4: "#ef6c00",
    C5: "#d84315",
    CX: "#b71c1c",
};

export interface SeriesSpec {
    label: string;
    color: string;
    pick: (s: SimState) => number;
}

export function drawSeries(canvas: HTMLCanvasElement, states: SimState[],
                           specs: SeriesSpec[]): void {
    const ctx = canvas.getContext("2d");
    if (!ctx) return;
    const w = canvas.width;
    const h = canvas.height;
    ctx.clearRect(0, 0, w, h);
    if (states.length < 2) return;

    let lo = Infinity;
    let hi = -Infinity;
    for (const spec of specs) {
        for (const s of states) {
            const v = spec.pick(s);
            if (v < lo) lo = v;
            if (v > hi) hi = v;
        }
    }
    if (hi - lo < 1e-9) hi = lo + 1;
    const pad = 8;
    const x = (i: number) => pad + (i / (states.length - 1)) * (w - 2 * pad);
    const y = (v: number) => h - pad - ((v - lo) / (hi - lo)) * (h - 2 * pad);

    ctx.strokeStyle = "#444";
    ctx.strokeRect(0.5, 0.5, w - 1, h - 1);
    for (const spec of specs) {
        ctx.beginPath();
        ctx.strokeStyle = spec.color;
        ctx.lineWidth = 1.5;
        states.forEach((s, i) => {
            const py = y(spec.pick(s));
            if (i === 0) ctx.moveTo(x(i), py);
            else ctx.lineTo(x(i), py);
        });
        ctx.stroke();
    }

    ctx.fillStyle = "#aaa";
    ctx.font = "10px sans-serif";
    ctx.fillText(hi.toFixed(1), 2, 10);
    ctx.fillText(lo.toFixed(1), 2, h - 2);
}

export function drawRiskStrip(canvas: HTMLCanvasElement,
                              states: SimState[]): void {
    const ctx = canvas.getContext("2d");
    if (!ctx) return;
    const w = canvas.width;
    const h = canvas.height;
    ctx.clearRect(0, 0, w, h);
    if (!states.length) return;
    const bw = w / states.length;
    states.forEach((s, i) => {
        ctx.fillStyle = RISK_COLORS[s.risk_class] ?? "#666";
        ctx.fillRect(i * bw, 0, Math.ceil(bw), h);
    });
}
