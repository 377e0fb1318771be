/** Typed client for the calculator's /v1 JSON API.
 *
 * Every number the UI displays originates from one of these responses; the
 * client performs no arithmetic beyond display formatting. The session token
 * issued by the service is mirrored into the X-Session-Token header so the
 * UI works even where cookies are unavailable.
 */

export interface TrendBody {
  kind: "constant" | "linear" | "quadratic";
  average: number;
  initial?: number;
  changing_point?: number;
}

export type RandomizationBody =
  | number
  | { mode: "constant"; values: number }
  | { mode: "per_day" | "per_time"; values: number[] }
  | { csv_token: string };

export interface DesignBody {
  days: number;
  per_day: number;
  randomization: RandomizationBody;
  availability: TrendBody;
  effect: TrendBody;
}

export interface SampleSizeRequest {
  design: DesignBody;
  alpha0?: number;
  target_power: number;
}

export interface PowerRequest {
  design: DesignBody;
  alpha0?: number;
  n: number;
}

export interface FieldError {
  code: string;
  field: string;
  message: string;
  detail?: Record<string, unknown>;
}

export interface ErrorPayload {
  error: {
    code: string;
    message: string;
    fields?: FieldError[];
    cap?: number;
    power_at_cap?: number;
  };
}

export interface SampleSizeResult {
  n: number;
  power_at_n: number;
  warnings: { code: string; message: string }[];
  inputs: SampleSizeRequest & { alpha0: number };
}

export interface PowerResult {
  power: number;
  n: number;
  inputs: PowerRequest & { alpha0: number };
}

export interface TrendPreview {
  role: "effect" | "availability";
  days: number[];
  null: number[];
  average: number[];
  alternative: number[];
}

export interface UploadResult {
  token: string;
  mode: "per_day" | "per_time";
  count: number;
  preview: { index: number; probability: number }[];
}

export interface HistoryEntry {
  kind: "samplesize" | "power";
  timestamp: string;
  result: SampleSizeResult | PowerResult;
}

export class ApiError extends Error {
  constructor(readonly status: number, readonly payload: ErrorPayload) {
    super(payload.error.message);
  }
}

let sessionToken: string | null = null;

async function request<T>(
  method: string, path: string, body?: BodyInit, contentType?: string,
): Promise<T> {
  const headers: Record<string, string> = {};
  if (contentType) headers["Content-Type"] = contentType;
  if (sessionToken) headers["X-Session-Token"] = sessionToken;
  const response = await fetch(path, { method, headers, body });
  const token = response.headers.get("X-Session-Token");
  if (token) sessionToken = token;
  if (!response.ok) {
    throw new ApiError(response.status, (await response.json()) as ErrorPayload);
  }
  return (await response.json()) as T;
}

export function postSampleSize(req: SampleSizeRequest): Promise<SampleSizeResult> {
  return request("POST", "/v1/samplesize", JSON.stringify(req), "application/json");
}

export function postPower(req: PowerRequest): Promise<PowerResult> {
  return request("POST", "/v1/power", JSON.stringify(req), "application/json");
}

export function fetchTrendPreview(
  spec: TrendBody, days: number, role: "effect" | "availability",
): Promise<TrendPreview> {
  const params = new URLSearchParams({
    kind: spec.kind,
    average: String(spec.average),
    days: String(days),
    role,
  });
  if (spec.initial !== undefined) params.set("initial", String(spec.initial));
  if (spec.changing_point !== undefined) {
    params.set("changing_point", String(spec.changing_point));
  }
  return request("GET", `/v1/trend/preview?${params}`);
}

export function uploadRandomizationCsv(
  file: File, mode: "day" | "time", days: number, perDay: number,
): Promise<UploadResult> {
  const params = new URLSearchParams({
    mode, days: String(days), per_day: String(perDay),
  });
  return request("POST", `/v1/randomization-csv?${params}`, file, "text/csv");
}

export async function fetchHistory(): Promise<HistoryEntry[]> {
  const payload = await request<{ entries: HistoryEntry[] }>("GET", "/v1/history");
  return payload.entries;
}

/** Download a history export exactly as the service serialized it: the file
 * is saved from the raw response body, byte for byte. */
export async function downloadHistoryExport(format: "csv" | "json"): Promise<void> {
  const headers: Record<string, string> = {};
  if (sessionToken) headers["X-Session-Token"] = sessionToken;
  const response = await fetch(`/v1/history/export?format=${format}`, { headers });
  if (!response.ok) {
    throw new ApiError(response.status, (await response.json()) as ErrorPayload);
  }
  const blob = await response.blob();
  const url = URL.createObjectURL(blob);
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = `mrtpower-history.${format}`;
  anchor.click();
  URL.revokeObjectURL(url);
}
