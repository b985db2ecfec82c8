// Console state: one in-flight query at a time, stale responses dropped by
// sequence number, and record fetches de-duplicated while in flight.

import type { PlotDocument, QueryResponse } from "./types.js";

export interface Controls {
  topN: number;
  videoWeight: number;
  signalWeight: number;
}

export class ConsoleState {
  queryText = "";
  lastResponse: QueryResponse | null = null;
  lastPlot: PlotDocument | null = null;
  selectedRecord: string | null = null;
  controls: Controls = { topN: 10, videoWeight: 1, signalWeight: 1 };

  private querySeq = 0;
  private inFlightRecords = new Map<string, Promise<unknown>>();

  /** Start a query attempt; returns its sequence number. */
  beginQuery(text: string): number {
    this.queryText = text;
    this.querySeq += 1;
    return this.querySeq;
  }

  /** True when this sequence number is still the newest query. */
  isCurrent(seq: number): boolean {
    return seq === this.querySeq;
  }

  /**
   * Install a response if it is not superseded. Resets all result-derived
   * state so nothing stale survives a new response.
   */
  acceptResponse(seq: number, response: QueryResponse): boolean {
    if (!this.isCurrent(seq)) {
      return false;
    }
    this.lastResponse = response;
    this.lastPlot = null;
    this.selectedRecord = null;
    return true;
  }

  acceptPlot(seq: number, plot: PlotDocument): boolean {
    if (!this.isCurrent(seq)) {
      return false;
    }
    this.lastPlot = plot;
    return true;
  }

  /**
   * Deduplicate concurrent fetches for the same record: while one is in
   * flight, later calls receive the same promise.
   */
  fetchRecordOnce<T>(recordId: string, fetcher: () => Promise<T>): Promise<T> {
    const pending = this.inFlightRecords.get(recordId);
    if (pending) {
      return pending as Promise<T>;
    }
    const promise = fetcher().finally(() => {
      this.inFlightRecords.delete(recordId);
    });
    this.inFlightRecords.set(recordId, promise);
    return promise;
  }

  hasInFlightRecord(recordId: string): boolean {
    return this.inFlightRecords.has(recordId);
  }
}
