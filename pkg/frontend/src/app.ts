import { SessionClient, ServiceError, type FetchLike } from "./client.js";
import { renderFrame } from "./render.js";
import type { FrameDocument, WidgetDescriptor } from "./types.js";

export interface PlaygroundOptions {
  baseUrl: string;
  fetchImpl?: FetchLike;
  /** Logical frame period used by the playback loop, default 16ms. */
  tickMs?: number;
}

/**
 * Spec editor, widget panel, and frame viewer wired to one session.
 * Every gesture becomes a service request; the DOM always shows the
 * last frame document the service returned.
 */
export class Playground {
  client: SessionClient | null = null;

  private readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;
  private readonly tickMs: number;

  private editor!: HTMLTextAreaElement;
  private loadButton!: HTMLButtonElement;
  private diagnostics!: HTMLElement;
  private panel!: HTMLElement;
  private viewer!: HTMLElement;

  constructor(
    private readonly root: HTMLElement,
    options: PlaygroundOptions,
  ) {
    this.baseUrl = options.baseUrl;
    this.fetchImpl =
      options.fetchImpl ?? (fetch.bind(globalThis) as unknown as FetchLike);
    this.tickMs = options.tickMs ?? 16;
    this.buildSkeleton();
  }

  private buildSkeleton(): void {
    this.root.innerHTML = [
      '<div class="editor-pane">',
      '<textarea class="spec-editor" spellcheck="false"></textarea>',
      '<button class="load-spec">Load</button>',
      '<pre class="diagnostics" hidden></pre>',
      "</div>",
      '<div class="chart-pane">',
      '<div class="widget-panel"></div>',
      '<div class="frame-viewer"></div>',
      "</div>",
    ].join("");
    this.editor = this.root.querySelector(".spec-editor") as HTMLTextAreaElement;
    this.loadButton = this.root.querySelector(".load-spec") as HTMLButtonElement;
    this.diagnostics = this.root.querySelector(".diagnostics") as HTMLElement;
    this.panel = this.root.querySelector(".widget-panel") as HTMLElement;
    this.viewer = this.root.querySelector(".frame-viewer") as HTMLElement;
    this.loadButton.addEventListener("click", () => {
      void this.loadSpec(this.editor.value);
    });
    this.viewer.addEventListener("click", (e) => this.forwardPointer("click", e));
    this.viewer.addEventListener("pointermove", (e) =>
      this.forwardPointer("pointermove", e),
    );
  }

  async loadSpec(text: string, data?: unknown): Promise<void> {
    this.editor.value = text;
    let spec: unknown;
    try {
      spec = JSON.parse(text);
    } catch (e) {
      this.showDiagnostics(`spec is not valid JSON: ${(e as Error).message}`);
      return;
    }
    if (this.client) {
      await this.client.close().catch(() => undefined);
      this.client = null;
    }
    try {
      this.client = await SessionClient.create(
        this.baseUrl,
        spec,
        data,
        this.fetchImpl,
      );
    } catch (e) {
      if (e instanceof ServiceError) {
        this.showDiagnostics(formatDetail(e.detail));
        return;
      }
      throw e;
    }
    this.diagnostics.hidden = true;
    this.renderWidgets(this.client.widgets);
    const frame = await this.client.getFrame();
    this.showFrame(frame);
  }

  private showDiagnostics(text: string): void {
    this.diagnostics.textContent = text;
    this.diagnostics.hidden = false;
  }

  private renderWidgets(widgets: WidgetDescriptor[]): void {
    this.panel.innerHTML = "";
    for (const w of widgets) {
      const label = document.createElement("label");
      label.textContent = w.label;
      const input = document.createElement("input");
      input.dataset.widgetId = w.id;
      if (w.kind === "range-slider") {
        input.type = "range";
        input.min = String(w.min ?? 0);
        input.max = String(w.max ?? 100);
        input.step = String(w.step ?? 1);
        input.value = String(w.value ?? w.min ?? 0);
        input.addEventListener("input", () => {
          void this.setWidget(w.id, Number(input.value));
        });
      } else {
        input.type = "checkbox";
        input.checked = w.value === true;
        input.addEventListener("change", () => {
          void this.setWidget(w.id, input.checked);
        });
      }
      label.appendChild(input);
      this.panel.appendChild(label);
    }
  }

  async setWidget(id: string, value: number | boolean): Promise<void> {
    if (!this.client) return;
    const frame = await this.client.sendEvent({
      type: "widget_set",
      widget: id,
      value,
    });
    this.showFrame(frame);
  }

  private forwardPointer(type: "click" | "pointermove", e: MouseEvent): void {
    if (!this.client) return;
    const rect = this.viewer.getBoundingClientRect();
    const modifiers: string[] = [];
    if (e.shiftKey) modifiers.push("shift");
    void this.client
      .sendEvent({
        type,
        x: e.clientX - rect.left,
        y: e.clientY - rect.top,
        modifiers,
      })
      .then((frame) => this.showFrame(frame));
  }

  /** One playback step: advances the session iff the frame says playing. */
  async tick(dtMs = this.tickMs): Promise<void> {
    if (!this.client) return;
    if (!this.isPlaying()) return;
    const frame = await this.client.advance(dtMs);
    this.showFrame(frame);
  }

  isPlaying(): boolean {
    const widgets =
      this.client?.latestFrame?.widgets ?? this.client?.widgets ?? [];
    const checkbox = widgets.find((w) => w.kind === "checkbox");
    return checkbox === undefined || checkbox.value === true;
  }

  private showFrame(frame: FrameDocument): void {
    this.viewer.innerHTML = renderFrame(frame);
    // reflect authoritative widget state back into the controls
    for (const w of frame.widgets) {
      const input = this.panel.querySelector(
        `input[data-widget-id="${w.id}"]`,
      ) as HTMLInputElement | null;
      if (!input) continue;
      if (input.type === "checkbox") {
        input.checked = w.value === true;
      } else if (w.value !== null) {
        input.value = String(w.value);
      }
    }
  }
}

function formatDetail(detail: unknown): string {
  if (typeof detail === "string") return detail;
  if (Array.isArray(detail)) {
    return detail
      .map((d) =>
        typeof d === "object" && d !== null && "path" in d && "message" in d
          ? `${(d as { path: unknown }).path}: ${(d as { message: unknown }).message}`
          : JSON.stringify(d),
      )
      .join("\n");
  }
  return JSON.stringify(detail);
}
