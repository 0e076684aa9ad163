import { afterEach, describe, expect, it, vi } from "vitest";

import {
    activateMitigation,
    deactivateMitigation,
    getHistory,
    getModels,
    getState,
    injectEvent,
    openStream,
    predict,
    selectModel,
} from "../src/api.js";

function okResponse(body: unknown): Response {
    return new Response(JSON.stringify(body), { status: 200 });
}

afterEach(() => {
    vi.restoreAllMocks();
});

describe("api client", () => {
    it("fetches current state", async () => {
        const mock = vi.spyOn(globalThis, "fetch")
            .mockResolvedValue(okResponse({ tick: 7 }));
        const state = await getState();
        expect(mock).toHaveBeenCalledWith("/api/state", undefined);
        expect(state.tick).toBe(7);
    });

    it("unwraps the history envelope", async () => {
        vi.spyOn(globalThis, "fetch")
            .mockResolvedValue(okResponse({ states: [{ tick: 1 }, { tick: 2 }] }));
        const states = await getHistory(50);
        expect(states.map((s) => s.tick)).toEqual([1, 2]);
        expect(vi.mocked(fetch).mock.calls[0][0]).toBe("/api/history?n=50");
    });

    it("posts model selection as JSON", async () => {
        const mock = vi.spyOn(globalThis, "fetch").mockResolvedValue(
            okResponse({ families: ["gbm"], active: "gbm", metrics: {} }));
        await selectModel("gbm");
        const [url, init] = mock.mock.calls[0];
        expect(url).toBe("/api/models/select");
        expect(init?.method).toBe("POST");
        expect(JSON.parse(init?.body as string)).toEqual({ family: "gbm" });
    });

    it("posts events and mitigations with their payloads", async () => {
        const mock = vi.spyOn(globalThis, "fetch")
            .mockImplementation(() => Promise.resolve(okResponse({})));
        await injectEvent("humidity_surge", 20, 30);
        await activateMitigation("dehumidify", 0.5);
        expect(JSON.parse(mock.mock.calls[0][1]?.body as string)).toEqual(
            { kind: "humidity_surge", magnitude: 20, duration: 30 });
        expect(JSON.parse(mock.mock.calls[1][1]?.body as string)).toEqual(
            { kind: "dehumidify", strength: 0.5 });
    });

    it("deletes mitigations by kind", async () => {
        const mock = vi.spyOn(globalThis, "fetch")
            .mockResolvedValue(new Response(JSON.stringify({}), { status: 200 }));
        await deactivateMitigation("coat");
        expect(mock).toHaveBeenCalledWith("/api/mitigation/coat",
            { method: "DELETE" });
    });

    it("raises on non-2xx responses", async () => {
        vi.spyOn(globalThis, "fetch")
            .mockResolvedValue(new Response("nope", { status: 404 }));
        await expect(getModels()).rejects.toThrow("404");
    });

    it("runs what-if predictions", async () => {
        const mock = vi.spyOn(globalThis, "fetch").mockResolvedValue(
            okResponse({ predicted_cr: 12.5, risk: "C2", alarm: false,
                         predictions: {}, physics_rate: 12.0 }));
        const result = await predict(31.0, 80.0);
        expect(result.risk).toBe("C2");
        expect(JSON.parse(mock.mock.calls[0][1]?.body as string)).toEqual(
            { temp_c: 31.0, rh_pct: 80.0 });
    });
});

class FakeEventSource {
    static instances: FakeEventSource[] = [];
    onopen: (() => void) | null = null;
    onmessage: ((ev: MessageEvent) => void) | null = null;
    onerror: (() => void) | null = null;
    closed = false;

    constructor(public url: string) {
        FakeEventSource.instances.push(this);
    }

    close(): void {
        this.closed = true;
    }

    emit(data: unknown): void {
        this.onmessage?.({ data: JSON.stringify(data) } as MessageEvent);
    }
}

describe("openStream", () => {
    it("delivers parsed states and connection status", () => {
        FakeEventSource.instances = [];
        const states: number[] = [];
        const statuses: boolean[] = [];
        const handle = openStream(
            (s) => states.push(s.tick),
            (c) => statuses.push(c),
            (url) => new FakeEventSource(url) as unknown as EventSource);
        const source = FakeEventSource.instances[0];
        expect(source.url).toBe("/api/stream");
        source.onopen?.();
        source.emit({ tick: 1 });
        source.emit({ tick: 2 });
        handle.close();
        expect(states).toEqual([1, 2]);
        expect(statuses).toEqual([true, false]);
        expect(source.closed).toBe(true);
    });

    it("reconnects after an error", () => {
        vi.useFakeTimers();
        FakeEventSource.instances = [];
        const statuses: boolean[] = [];
        const handle = openStream(
            () => undefined,
            (c) => statuses.push(c),
            (url) => new FakeEventSource(url) as unknown as EventSource,
            1000);
        const first = FakeEventSource.instances[0];
        first.onopen?.();
        first.onerror?.();
        expect(first.closed).toBe(true);
        vi.advanceTimersByTime(1000);
        expect(FakeEventSource.instances).toHaveLength(2);
        handle.close();
        vi.useRealTimers();
    });

    it("stops reconnecting once closed", () => {
        vi.useFakeTimers();
        FakeEventSource.instances = [];
        const handle = openStream(
            () => undefined,
            () => undefined,
            (url) => new FakeEventSource(url) as unknown as EventSource,
            1000);
        FakeEventSource.instances[0].onerror?.();
        handle.close();
        vi.advanceTimersByTime(5000);
        expect(FakeEventSource.instances).toHaveLength(1);
        vi.useRealTimers();
    });
});
