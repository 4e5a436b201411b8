/**
 * Application shell: one serial work queue drives polling and mutations,
 * so a user action never interleaves with an in-flight poll.
 */

import { ApiError, TelemetryClient } from "./api.js";
import { configFromQuery, DashboardConfig } from "./config.js";
import {
  buildViewModel,
  DashboardViewModel,
  emptyViewModel,
  markStale,
} from "./model.js";
import {
  clearSetpointErrors,
  Handlers,
  renderDashboard,
  showSetpointError,
} from "./render.js";

export class DashboardApp {
  private vm: DashboardViewModel = emptyViewModel();
  private chain: Promise<void> = Promise.resolve();
  private pollInFlight = false;
  private lastSuccess: string | null = null;
  private setpointError: { field: string | null; message: string } | null = null;
  private notice: string | null = null;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private client: TelemetryClient,
    private root: HTMLElement,
    private config: DashboardConfig,
  ) {}

  /** Serialize all network work; mutations queue behind the active poll. */
  private enqueue(task: () => Promise<void>): Promise<void> {
    const next = this.chain.then(task, task);
    this.chain = next;
    return next;
  }

  poll(): Promise<void> {
    if (this.pollInFlight) return this.chain;
    this.pollInFlight = true;
    return this.enqueue(async () => {
      try {
        const [feeds, actuators, thresholds] = await Promise.all([
          this.client.fetchFeeds(this.config.windowSize),
          this.client.fetchActuators(),
          this.client.fetchThresholds(),
        ]);
        this.vm = buildViewModel(feeds, actuators, thresholds, this.config.windowSize);
        this.lastSuccess = new Date().toISOString();
      } catch {
        // Unreachable server: keep showing the last data, clearly flagged.
        this.vm = markStale(this.vm, this.lastSuccess);
      } finally {
        this.pollInFlight = false;
      }
      this.render();
    });
  }

  submitSetpoints(values: Record<string, number>): Promise<void> {
    return this.enqueue(async () => {
      this.setpointError = null;
      try {
        this.vm = { ...this.vm, thresholds: await this.client.putThresholds(values) };
        this.notice = "setpoints applied";
      } catch (error) {
        if (error instanceof ApiError) {
          this.setpointError = { field: error.field, message: error.message };
        } else {
          this.setpointError = { field: null, message: String(error) };
        }
      }
      this.render();
    });
  }

  overrideActuator(name: string, mode: "on" | "off" | "auto"): Promise<void> {
    return this.enqueue(async () => {
      try {
        const payload = await this.client.putOverride(name, mode);
        this.vm = { ...this.vm, actuators: payload.actuators, alerts: payload.alerts };
        this.notice = null;
      } catch (error) {
        this.notice = error instanceof ApiError ? error.message : String(error);
      }
      this.render();
    });
  }

  private handlers(): Handlers {
    return {
      submitSetpoints: (values) => void this.submitSetpoints(values),
      overrideActuator: (name, mode) => void this.overrideActuator(name, mode),
    };
  }

  render(): void {
    const doc = this.root.ownerDocument;
    const active = doc.activeElement;
    // Don't yank the form out from under someone mid-edit.
    if (active !== null && active.closest("#setpoints-form") !== null) return;

    renderDashboard(this.root, this.vm, this.handlers());
    if (this.setpointError !== null) {
      clearSetpointErrors(this.root);
      showSetpointError(this.root, this.setpointError.field, this.setpointError.message);
    }
    if (this.notice !== null) {
      const toast = doc.createElement("div");
      toast.className = "toast";
      toast.id = "toast";
      toast.textContent = this.notice;
      this.root.append(toast);
    }
  }

  start(): void {
    void this.poll();
    this.timer = setInterval(() => void this.poll(), this.config.pollSeconds * 1000);
  }

  stop(): void {
    if (this.timer !== null) clearInterval(this.timer);
    this.timer = null;
  }

  /** Exposed for tests: the current view model snapshot. */
  get viewModel(): DashboardViewModel {
    return this.vm;
  }

  /** Exposed for tests: resolves once all queued work has drained. */
  idle(): Promise<void> {
    return this.chain;
  }
}

export function bootstrap(doc: Document, locationSearch: string): DashboardApp {
  const config = configFromQuery(locationSearch);
  const params = new URLSearchParams(locationSearch);
  const client = new TelemetryClient(
    config.baseUrl,
    config.channelId,
    params.get("key"),
  );
  const root = doc.getElementById("app");
  if (root === null) throw new Error("missing #app element");
  const app = new DashboardApp(client, root, config);
  app.start();
  return app;
}

declare global {
  interface Window {
    dashboard?: DashboardApp;
  }
}

if (typeof document !== "undefined" && document.getElementById("app") !== null) {
  window.dashboard = bootstrap(document, window.location.search);
}
