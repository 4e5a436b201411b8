/**
 * Thin typed client over the telemetry HTTP surface. The dashboard's only
 * write traffic goes through putThresholds and putOverride.
 */

import type { ActuatorsPayload, FeedsPayload, Thresholds } from "./model.js";

/** Server-side rejection; `field` names the offending setpoint when known. */
export class ApiError extends Error {
  status: number;
  field: string | null;

  constructor(status: number, message: string, field: string | null = null) {
    super(message);
    this.status = status;
    this.field = field;
  }
}

async function rejectionFrom(response: Response): Promise<ApiError> {
  let message = `${response.status} ${response.statusText}`;
  let field: string | null = null;
  try {
    const body = await response.json();
    if (typeof body.error === "string") message = body.error;
    if (typeof body.field === "string") field = body.field;
  } catch {
    // Non-JSON error body; keep the status line.
  }
  return new ApiError(response.status, message, field);
}

export class TelemetryClient {
  constructor(
    private baseUrl: string,
    private channelId: number,
    private apiKey: string | null = null,
    private fetcher: typeof fetch = fetch,
  ) {}

  private channelUrl(suffix: string, params: Record<string, string> = {}): string {
    const query = new URLSearchParams(params);
    if (this.apiKey !== null) query.set("api_key", this.apiKey);
    const qs = query.toString();
    return `${this.baseUrl}/channels/${this.channelId}/${suffix}${qs ? "?" + qs : ""}`;
  }

  private async getJson<T>(url: string): Promise<T> {
    const response = await this.fetcher(url);
    if (!response.ok) throw await rejectionFrom(response);
    return (await response.json()) as T;
  }

  fetchFeeds(results?: number): Promise<FeedsPayload> {
    const params: Record<string, string> = {};
    if (results !== undefined) params["results"] = String(results);
    return this.getJson<FeedsPayload>(this.channelUrl("feeds.json", params));
  }

  fetchActuators(): Promise<ActuatorsPayload> {
    return this.getJson<ActuatorsPayload>(this.channelUrl("actuators"));
  }

  fetchThresholds(): Promise<Thresholds> {
    return this.getJson<Thresholds>(this.channelUrl("thresholds"));
  }

  async putThresholds(values: Record<string, number>): Promise<Thresholds> {
    const body: Record<string, unknown> = { ...values };
    if (this.apiKey !== null) body["api_key"] = this.apiKey;
    const response = await this.fetcher(this.channelUrl("thresholds"), {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) throw await rejectionFrom(response);
    return (await response.json()) as Thresholds;
  }

  async putOverride(name: string, mode: "on" | "off" | "auto"): Promise<ActuatorsPayload> {
    const response = await this.fetcher(this.channelUrl(`actuators/${name}/override`), {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ mode }),
    });
    if (!response.ok) throw await rejectionFrom(response);
    return (await response.json()) as ActuatorsPayload;
  }
}
