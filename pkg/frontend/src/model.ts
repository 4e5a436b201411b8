/**
 * Pure view-model layer. Everything displayed comes verbatim from a
 * telemetry response; nothing here recomputes physics or control logic.
 */

export interface FeedEntry {
  entry_id: number;
  created_at: string;
  [field: string]: string | number | boolean | undefined;
}

export interface FeedsPayload {
  channel: { id: number; name: string; [k: string]: unknown };
  feeds: FeedEntry[];
}

export interface ActuatorInfo {
  on: boolean;
  override: "on" | "off" | null;
  last_transition: string | null;
}

export interface ActuatorsPayload {
  actuators: Record<string, ActuatorInfo>;
  alerts: { parameter: string; reason: string; time?: string }[];
}

export type Thresholds = Record<string, number>;

export interface FieldDef {
  key: string;          // field1..field8
  id: string;           // stable DOM id fragment
  label: string;
  unit: string;
  decimals: number;     // display truncation, never applied to stored values
  /** Ideal band as [lowKey, highKey] into Thresholds; null half = unbounded. */
  band: [string | null, string | null] | null;
}

// Channel field layout used by the telemetry service.
export const FIELD_DEFS: FieldDef[] = [
  { key: "field1", id: "air", label: "Greenhouse temp", unit: "°C", decimals: 2, band: ["air_low", "air_high"] },
  { key: "field2", id: "humidity", label: "Humidity", unit: "%", decimals: 1, band: ["humidity_min", null] },
  { key: "field3", id: "ph", label: "pH", unit: "", decimals: 2, band: ["ph_low", "ph_high"] },
  { key: "field4", id: "light", label: "Light", unit: "counts", decimals: 0, band: null },
  { key: "field5", id: "water", label: "Water temp", unit: "°C", decimals: 2, band: ["water_low", "water_high"] },
];

export interface Tile {
  def: FieldDef;
  /** Verbatim value string from the feed, or null when the channel has none. */
  raw: string | null;
  display: string;      // truncated for display, or the placeholder
  valid: boolean;
  at: string | null;    // created_at of the entry the value came from
}

export interface ChartPoint {
  entryId: number;
  at: string;
  value: number;
  valid: boolean;
}

export interface ChartSeries {
  def: FieldDef;
  points: ChartPoint[];
  band: { low: number | null; high: number | null } | null;
}

export interface DashboardViewModel {
  tiles: Tile[];
  charts: ChartSeries[];
  actuators: Record<string, ActuatorInfo>;
  alerts: ActuatorsPayload["alerts"];
  thresholds: Thresholds;
  /** Set when the last poll failed; carries the last success timestamp. */
  stale: { since: string | null } | null;
}

/** Truncate toward zero to a fixed number of decimals; never rounds up. */
export function truncate(value: number, decimals: number): string {
  const factor = Math.pow(10, decimals);
  const scaled = value * factor;
  // Guard float droop just below an integer (e.g. 4.1 * 10 = 40.99999...).
  const nudged = Math.sign(scaled) * (Math.abs(scaled) + 1e-9);
  const truncated = Math.trunc(nudged) / factor;
  return truncated.toFixed(decimals);
}

function fieldValid(entry: FeedEntry, key: string): boolean {
  const flag = entry[`${key}_valid`];
  return flag !== false;
}

/** Latest entry carrying a value for the field, scanning newest first. */
function latestFor(feeds: FeedEntry[], key: string): FeedEntry | null {
  for (let i = feeds.length - 1; i >= 0; i--) {
    const entry = feeds[i];
    if (entry !== undefined && typeof entry[key] === "string") return entry;
  }
  return null;
}

export function buildTiles(feeds: FeedEntry[]): Tile[] {
  return FIELD_DEFS.map((def) => {
    const entry = latestFor(feeds, def.key);
    if (entry === null) {
      return { def, raw: null, display: "no data", valid: true, at: null };
    }
    const raw = entry[def.key] as string;
    const valid = fieldValid(entry, def.key);
    return {
      def,
      raw,
      display: `${truncate(Number(raw), def.decimals)}${def.unit ? " " + def.unit : ""}`,
      valid,
      at: entry.created_at,
    };
  });
}

function bandFor(def: FieldDef, thresholds: Thresholds): ChartSeries["band"] {
  if (def.band === null) return null;
  const [lowKey, highKey] = def.band;
  const low = lowKey !== null && lowKey in thresholds ? thresholds[lowKey]! : null;
  const high = highKey !== null && highKey in thresholds ? thresholds[highKey]! : null;
  if (low === null && high === null) return null;
  return { low, high };
}

export function buildCharts(
  feeds: FeedEntry[],
  thresholds: Thresholds,
  windowSize: number,
): ChartSeries[] {
  return FIELD_DEFS.map((def) => {
    const points: ChartPoint[] = [];
    for (const entry of feeds) {
      const value = entry[def.key];
      if (typeof value !== "string") continue;
      points.push({
        entryId: entry.entry_id,
        at: entry.created_at,
        value: Number(value),
        valid: fieldValid(entry, def.key),
      });
    }
    return { def, points: points.slice(-windowSize), band: bandFor(def, thresholds) };
  });
}

export function buildViewModel(
  feeds: FeedsPayload,
  actuators: ActuatorsPayload,
  thresholds: Thresholds,
  windowSize: number,
): DashboardViewModel {
  return {
    tiles: buildTiles(feeds.feeds),
    charts: buildCharts(feeds.feeds, thresholds, windowSize),
    actuators: actuators.actuators,
    alerts: actuators.alerts,
    thresholds,
    stale: null,
  };
}

/** The view model shown while the server is unreachable: last data, flagged. */
export function markStale(
  previous: DashboardViewModel,
  lastSuccess: string | null,
): DashboardViewModel {
  return { ...previous, stale: { since: lastSuccess } };
}

export function emptyViewModel(): DashboardViewModel {
  return {
    tiles: buildTiles([]),
    charts: buildCharts([], {}, 0),
    actuators: {},
    alerts: [],
    thresholds: {},
    stale: null,
  };
}
