// Typed client for the monitoring service HTTP API.

export interface SimState {
    tick: number;
    timestamp: string;
    active_event: string | null;
    temp_c: number;
    rh_pct: number;
    predicted_rate: number;
    physics_rate: number;
    risk_class: string;
    alarm: boolean;
    model_family: string;
    recommendation: string;
    mitigations: string[];
}

export interface ModelsInfo {
    families: string[];
    active: string;
    metrics: Record<string, Record<string, unknown>>;
}

export interface PredictResult {
    predicted_cr: number;
    risk: string;
    alarm: boolean;
    predictions: Record<string, number>;
    physics_rate: number;
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(path, init);
    if (!resp.ok) {
        throw new Error(`${init?.method ?? "GET"} ${path} -> ${resp.status}`);
    }
    return resp.json() as Promise<T>;
}

function post<T>(path: string, body: unknown): Promise<T> {
    return request<T>(path, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
    });
}

export function getState(): Promise<SimState> {
    return request<SimState>("/api/state");
}

export function getHistory(n: number): Promise<SimState[]> {
    return request<{ states: SimState[] }>(`/api/history?n=${n}`)
        .then((body) => body.states);
}

export function getModels(): Promise<ModelsInfo> {
    return request<ModelsInfo>("/api/models");
}

export function selectModel(family: string): Promise<ModelsInfo> {
    return post<ModelsInfo>("/api/models/select", { family });
}

export function injectEvent(kind: string, magnitude?: number,
                            duration?: number): Promise<unknown> {
    return post("/api/event", { kind, magnitude, duration });
}

export function activateMitigation(kind: string,
                                   strength: number): Promise<unknown> {
    return post("/api/mitigation", { kind, strength });
}

export async function deactivateMitigation(kind: string): Promise<void> {
    const resp = await fetch(`/api/mitigation/${kind}`, { method: "DELETE" });
    if (!resp.ok) {
        throw new Error(`DELETE /api/mitigation/${kind} -> ${resp.status}`);
    }
}

export function predict(tempC: number, rhPct: number): Promise<PredictResult> {
    return post<PredictResult>("/api/predict", { temp_c: tempC, rh_pct: rhPct });
}

export interface StreamHandle {
    close(): void;
}

// Server-sent events subscription with automatic reconnect. The caller is
// responsible for backfilling any ticks missed while disconnected.
export function openStream(
    onState: (state: SimState) => void,
    onStatus: (connected: boolean) => void,
    makeSource: (url: string) => EventSource = (url) => new EventSource(url),
    retryMs = 2000,
): StreamHandle {
    let source: EventSource | null = null;
    let closed = false;
    let retryTimer: ReturnType<typeof setTimeout> | null = null;

    const connect = () => {
        if (closed) return;
        source = makeSource("/api/stream");
        source.onopen = () => onStatus(true);
        source.onmessage = (ev: MessageEvent) => {
            onState(JSON.parse(ev.data) as SimState);
        };
        source.onerror = () => {
            onStatus(false);
            source?.close();
            if (!closed) {
                retryTimer = setTimeout(connect, retryMs);
            }
        };
    };
    connect();

    return {
        close() {
            closed = true;
            if (retryTimer !== null) clearTimeout(retryTimer);
            source?.close();
            onStatus(false);
        },
    };
}
