// Controller: wires the form, the API client, and the renderers together.

import { ApiClient, ApiRequestError } from "./api.js";
import { ConsoleState } from "./state.js";
import {
  renderBanner,
  renderRecordDetail,
  renderReliability,
  renderResults,
} from "./render.js";

export interface ConsoleElements {
  form: HTMLFormElement;
  queryInput: HTMLInputElement;
  topNInput: HTMLInputElement;
  videoWeightInput: HTMLInputElement;
  signalWeightInput: HTMLInputElement;
  banner: HTMLElement;
  results: HTMLElement;
  reliability: HTMLElement;
  detail: HTMLElement;
}

export class Console {
  readonly state = new ConsoleState();

  constructor(
    private readonly api: ApiClient,
    private readonly ui: ConsoleElements,
  ) {
    ui.form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submit();
    });
  }

  async submit(): Promise<void> {
    const text = this.ui.queryInput.value.trim();
    if (!text) {
      renderBanner(this.ui.banner, "enter a query first");
      return;
    }
    this.state.controls = {
      topN: Number(this.ui.topNInput.value) || 10,
      videoWeight: Number(this.ui.videoWeightInput.value) || 1,
      signalWeight: Number(this.ui.signalWeightInput.value) || 1,
    };
    const seq = this.state.beginQuery(text);
    try {
      const response = await this.api.submitQuery({
        text,
        top_n: this.state.controls.topN,
        weights: {
          video: this.state.controls.videoWeight,
          signal: this.state.controls.signalWeight,
        },
      });
      if (!this.state.acceptResponse(seq, response)) {
        return; // superseded by a newer query
      }
      renderBanner(this.ui.banner, null);
      this.renderAll();
      // the box overlay arrives with the plot document; fetch best-effort
      try {
        const plot = await this.api.getPlot(response.query_hash);
        if (this.state.acceptPlot(seq, plot)) {
          renderReliability(this.ui.reliability, this.state.lastResponse, plot);
        }
      } catch {
        // panel already shows the curve without the overlay
      }
    } catch (error) {
      // state (query text, previous results) is preserved for a retry
      const message =
        error instanceof ApiRequestError
          ? `query failed [${error.code}]: ${error.message}`
          : `query failed: backend unreachable`;
      renderBanner(this.ui.banner, message);
    }
  }

  async inspect(recordId: string): Promise<void> {
    try {
      const detail = await this.state.fetchRecordOnce(recordId, () =>
        this.api.getRecord(recordId),
      );
      this.state.selectedRecord = recordId;
      renderRecordDetail(this.ui.detail, detail, (rid, index) =>
        this.api.frameUrl(rid, index),
      );
    } catch (error) {
      const message =
        error instanceof ApiRequestError && error.status === 404
          ? `record ${recordId} not found`
          : `could not load record ${recordId}`;
      renderBanner(this.ui.banner, message);
    }
  }

  renderAll(): void {
    if (!this.state.lastResponse) {
      return;
    }
    renderResults(
      this.ui.results,
      this.state.lastResponse,
      (rid, index) => this.api.frameUrl(rid, index),
      (rid) => void this.inspect(rid),
    );
    renderReliability(this.ui.reliability, this.state.lastResponse, this.state.lastPlot);
  }
}

export function createConsole(root: Document, apiBase: string = ""): Console {
  const byId = <T extends HTMLElement>(id: string): T => {
    const node = root.getElementById(id);
    if (!node) {
      throw new Error(`missing console element #${id}`);
    }
    return node as T;
  };
  return new Console(new ApiClient(apiBase), {
    form: byId<HTMLFormElement>("query-form"),
    queryInput: byId<HTMLInputElement>("query-text"),
    topNInput: byId<HTMLInputElement>("top-n"),
    videoWeightInput: byId<HTMLInputElement>("weight-video"),
    signalWeightInput: byId<HTMLInputElement>("weight-signal"),
    banner: byId("error-banner"),
    results: byId("results"),
    reliability: byId("reliability"),
    detail: byId("record-detail"),
  });
}
