// Dashboard entry point: wires the store, the SSE stream, and the controls.

import {
    activateMitigation,
    deactivateMitigation,
    getHistory,
    getModels,
    injectEvent,
    openStream,
    predict,
    selectModel,
    SimState,
} from "./api.js";
import { drawRiskStrip, drawSeries, RISK_COLORS } from "./charts.js";
import { DashboardStore } from "./store.js";

const store = new DashboardStore(1800);

const $ = (id: string) => document.getElementById(id)!;

function fmt(v: number, digits = 2): string {
    return v.toFixed(digits);
}

function renderStatus(state: SimState | null): void {
    if (!state) return;
    $("stat-tick").textContent = String(state.tick);
    $("stat-time").textContent = state.timestamp;
    $("stat-temp").textContent = `${fmt(state.temp_c, 1)} °C`;
    $("stat-rh").textContent = `${fmt(state.rh_pct, 1)} %`;
    $("stat-cr").textContent = `${fmt(state.predicted_rate)} µm/yr`;
    const risk = $("stat-risk");
    risk.textContent = state.risk_class;
    risk.style.background = RISK_COLORS[state.risk_class] ?? "#666";
    $("stat-model").textContent = state.model_family;
    $("stat-reco").textContent = state.recommendation;
    $("stat-event").textContent = state.active_event ?? "none";
    $("alarm-banner").classList.toggle("active", state.alarm);
    for (const kind of ["dehumidify", "ventilate", "coat"]) {
        $(`mit-${kind}`).classList.toggle(
            "on", state.mitigations.includes(kind));
    }
}

function renderCharts(): void {
    const states = store.series();
    drawSeries($("chart-env") as HTMLCanvasElement, states, [
        { label: "T", color: "#ff7043", pick: (s) => s.temp_c },
        { label: "RH", color: "#4fc3f7", pick: (s) => s.rh_pct },
    ]);
    drawSeries($("chart-cr") as HTMLCanvasElement, states, [
        { label: "CR", color: "#ffd54f", pick: (s) => s.predicted_rate },
    ]);
    drawRiskStrip($("chart-risk") as HTMLCanvasElement, states);
}

function renderConnection(): void {
    $("conn").textContent = store.connected ? "live" : "reconnecting…";
    $("conn").classList.toggle("offline", !store.connected);
}

async function refreshModels(): Promise<void> {
    const info = await getModels();
    store.setModels(info.families, info.active);
    const select = $("model-select") as HTMLSelectElement;
    select.innerHTML = "";
    const options = info.families.length ? info.families : [info.active];
    for (const family of options) {
        const opt = document.createElement("option");
        opt.value = family;
        opt.textContent = family;
        opt.selected = family === info.active;
        select.appendChild(opt);
    }
}

async function onLiveState(state: SimState): Promise<void> {
    if (!store.push(state)) {
        // Missed ticks while disconnected: backfill, then apply.
        const states = await getHistory(store.capacity);
        store.backfill(states);
        store.push(state);
    }
}

function wireControls(): void {
    ($("model-select") as HTMLSelectElement).addEventListener(
        "change", async (ev) => {
            const family = (ev.target as HTMLSelectElement).value;
            store.setPending(true);
            try {
                await selectModel(family);
                await refreshModels();
            } finally {
                store.setPending(false);
            }
        });

    document.querySelectorAll<HTMLButtonElement>("[data-event]").forEach(
        (btn) => btn.addEventListener("click", () => {
            void injectEvent(btn.dataset.event!);
        }));

    document.querySelectorAll<HTMLButtonElement>("[data-mitigation]").forEach(
        (btn) => btn.addEventListener("click", async () => {
            const kind = btn.dataset.mitigation!;
            if (btn.classList.contains("on")) {
                await deactivateMitigation(kind);
            } else {
                await activateMitigation(kind, 0.3);
            }
        }));

    $("whatif-run").addEventListener("click", async () => {
        const t = parseFloat(($("whatif-t") as HTMLInputElement).value);
        const rh = parseFloat(($("whatif-rh") as HTMLInputElement).value);
        if (Number.isNaN(t) || Number.isNaN(rh)) return;
        const result = await predict(t, rh);
        $("whatif-out").textContent =
            `${fmt(result.predicted_cr)} µm/yr (${result.risk}` +
            `${result.alarm ? ", ALARM" : ""})`;
    });
}

async function start(): Promise<void> {
    store.subscribe(() => {
        renderStatus(store.latest());
        renderCharts();
        renderConnection();
    });
    wireControls();
    await refreshModels();
    store.backfill(await getHistory(store.capacity));
    openStream((s) => void onLiveState(s), (c) => store.setConnected(c));
}

void start();
