/** Dashboard configuration: one base URL and one channel id. */

export interface DashboardConfig {
  baseUrl: string;
  channelId: number;
  pollSeconds: number;
  /** Entries to keep in the rolling chart window. */
  windowSize: number;
}

export const DEFAULTS: DashboardConfig = {
  baseUrl: "",
  channelId: 1,
  pollSeconds: 15,
  windowSize: 60,
};

/**
 * Read config from query parameters, e.g. ?base=http://host:8100&channel=2.
 * An empty base URL means "same origin", which is the normal deployment:
 * the telemetry server serves these files from its static directory.
 */
export function configFromQuery(search: string): DashboardConfig {
  const params = new URLSearchParams(search);
  const cfg = { ...DEFAULTS };
  const base = params.get("base");
  if (base !== null) cfg.baseUrl = base.replace(/\/$/, "");
  const channel = Number(params.get("channel"));
  if (Number.isInteger(channel) && channel >= 1) cfg.channelId = channel;
  const poll = Number(params.get("poll"));
  if (Number.isFinite(poll) && poll >= 1) cfg.pollSeconds = poll;
  return cfg;
}
