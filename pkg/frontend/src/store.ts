// Dashboard state: a gap-free ring buffer of per-tick states plus UI status.
// Ticks arriving out of order or duplicated are ignored; a detected gap is
// reported so the owner can backfill from /api/history before resuming.

import type { SimState } from "./api.js";

export type Listener = () => void;

export class DashboardStore {
    readonly capacity: number;
    private buffer: SimState[] = [];
    private listeners: Listener[] = [];

    connected = false;
    modelFamilies: string[] = [];
    activeModel = "";
    pendingCommand = false;

    constructor(capacity = 1800) {
        this.capacity = capacity;
    }

    subscribe(fn: Listener): () => void {
        this.listeners.push(fn);
        return () => {
            this.listeners = this.listeners.filter((l) => l !== fn);
        };
    }

    private notify(): void {
        for (const fn of this.listeners) fn();
    }

    latest(): SimState | null {
        return this.buffer.length
            ? this.buffer[this.buffer.length - 1]
            : null;
    }

    series(): SimState[] {
        return this.buffer;
    }

    lastTick(): number {
        const last = this.latest();
        return last ? last.tick : -1;
    }

    /** Append one live state. Returns false when a gap was detected and the
     *  state was not applied (caller should backfill, then retry). */
    push(state: SimState): boolean {
        const last = this.lastTick();
        if (last >= 0 && state.tick <= last) {
            return true; // duplicate or stale: drop silently
        }
        if (last >= 0 && state.tick > last + 1) {
            return false;
        }
        this.buffer.push(state);
        if (this.buffer.length > this.capacity) {
            this.buffer.splice(0, this.buffer.length - this.capacity);
        }
        this.notify();
        return true;
    }

    /** Merge a history backfill (sorted by tick) with the buffer. */
    backfill(states: SimState[]): void {
        const byTick = new Map<number, SimState>();
        for (const s of this.buffer) byTick.set(s.tick, s);
        for (const s of states) byTick.set(s.tick, s);
        const ticks = [...byTick.keys()].sort((a, b) => a - b);
        // Keep only the trailing contiguous run so the no-gap invariant holds.
        let start = ticks.length - 1;
        while (start > 0 && ticks[start - 1] === ticks[start] - 1) start--;
        this.buffer = ticks.slice(start).map((t) => byTick.get(t)!)
            .slice(-this.capacity);
        this.notify();
    }

    setConnected(connected: boolean): void {
        if (this.connected !== connected) {
            this.connected = connected;
            this.notify();
        }
    }

    setModels(families: string[], active: string): void {
        this.modelFamilies = families;
        this.activeModel = active;
        this.notify();
    }

    setPending(pending: boolean): void {
        this.pendingCommand = pending;
        this.notify();
    }
}
