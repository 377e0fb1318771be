/** Form state for the staged calculator and its mapping to /v1 requests.
 *
 * Client-side validation mirrors the server's rules only far enough to keep
 * the submit button honest; the server stays the source of truth and its
 * field errors are rendered inline. `buildRequest` produces exactly the
 * canonical request the service echoes back in `result.inputs`, so loading a
 * history row into the form and rebuilding yields an identical payload.
 */
import type {
  DesignBody,
  PowerRequest,
  RandomizationBody,
  SampleSizeRequest,
  TrendBody,
} from "./api.js";

export type TrendKind = "constant" | "linear" | "quadratic";
export type RandMode = "constant" | "per_day" | "per_time";
export type OutputMode = "samplesize" | "power";

export interface TrendFields {
  kind: TrendKind;
  average: string;
  initial: string;
  changingPoint: string;
}

export interface FormState {
  days: string;
  perDay: string;
  randMode: RandMode;
  randProb: string;
  /** Inline schedule values (from an upload preview commit or a loaded
   * history row); uploads may instead carry just the token. */
  randValues: number[] | null;
  randToken: string | null;
  availability: TrendFields;
  effect: TrendFields;
  outputMode: OutputMode;
  alpha: string;
  targetPower: string;
  n: string;
}

export function initialFormState(): FormState {
  return {
    days: "42",
    perDay: "5",
    randMode: "constant",
    randProb: "0.5",
    randValues: null,
    randToken: null,
    availability: { kind: "constant", average: "0.7", initial: "", changingPoint: "" },
    effect: { kind: "quadratic", average: "0.1", initial: "0", changingPoint: "29" },
    outputMode: "samplesize",
    alpha: "0.05",
    targetPower: "0.8",
    n: "",
  };
}

const num = (raw: string): number | null => {
  if (raw.trim() === "") return null;
  const value = Number(raw);
  return Number.isFinite(value) ? value : null;
};

const posInt = (raw: string): number | null => {
  const value = num(raw);
  return value !== null && Number.isInteger(value) && value >= 1 ? value : null;
};

/** Section-by-section validity, mirroring the server rules. */
export interface SectionValidity {
  setup: boolean;
  randomization: boolean;
  availability: boolean;
  effect: boolean;
  output: boolean;
}

function trendValid(fields: TrendFields, days: number | null, role: "availability" | "effect"): boolean {
  const average = num(fields.average);
  if (average === null) return false;
  if (role === "availability" && (average <= 0 || average > 1)) return false;
  if (role === "effect" && average < 0) return false;
  if (fields.kind === "constant") return true;
  if (num(fields.initial) === null) return false;
  if (fields.kind === "linear") return true;
  const changingPoint = num(fields.changingPoint);
  if (changingPoint === null) return false;
  return days === null || (changingPoint >= 1 && changingPoint <= days);
}

export function validate(state: FormState): SectionValidity {
  const days = posInt(state.days);
  const perDay = posInt(state.perDay);
  const setup = days !== null && perDay !== null;
  const alpha = num(state.alpha);
  const alphaOk = alpha !== null && alpha > 0 && alpha < 1;

  let randomization = false;
  if (state.randMode === "constant") {
    const p = num(state.randProb);
    randomization = p !== null && p > 0 && p < 1;
  } else {
    randomization = state.randToken !== null || state.randValues !== null;
  }

  let output = false;
  if (state.outputMode === "samplesize") {
    const target = num(state.targetPower);
    output = alphaOk && target !== null && target > 0 && target < 1;
  } else {
    output = alphaOk && posInt(state.n) !== null;
  }

  return {
    setup,
    randomization,
    availability: trendValid(state.availability, days, "availability"),
    effect: trendValid(state.effect, days, "effect"),
    output,
  };
}

export function allValid(validity: SectionValidity): boolean {
  return validity.setup && validity.randomization && validity.availability
    && validity.effect && validity.output;
}

export function trendBody(fields: TrendFields): TrendBody {
  const body: TrendBody = { kind: fields.kind, average: Number(fields.average) };
  if (fields.kind !== "constant") body.initial = Number(fields.initial);
  if (fields.kind === "quadratic") body.changing_point = Number(fields.changingPoint);
  return body;
}

function randomizationBody(state: FormState): RandomizationBody {
  if (state.randMode === "constant") {
    return { mode: "constant", values: Number(state.randProb) };
  }
  if (state.randValues !== null) {
    return { mode: state.randMode, values: state.randValues };
  }
  return { csv_token: state.randToken ?? "" };
}

export function designBody(state: FormState): DesignBody {
  return {
    days: Number(state.days),
    per_day: Number(state.perDay),
    randomization: randomizationBody(state),
    availability: trendBody(state.availability),
    effect: trendBody(state.effect),
  };
}

export function buildRequest(state: FormState): SampleSizeRequest | PowerRequest {
  const design = designBody(state);
  const alpha0 = Number(state.alpha);
  return state.outputMode === "samplesize"
    ? { design, alpha0, target_power: Number(state.targetPower) }
    : { design, alpha0, n: Number(state.n) };
}

/** Rebuild the form from a canonical request (a history row's `inputs`),
 * such that buildRequest(stateFromInputs(inputs)) deep-equals `inputs`. */
export function stateFromInputs(inputs: SampleSizeRequest | PowerRequest): FormState {
  const state = initialFormState();
  const design = inputs.design;
  state.days = String(design.days);
  state.perDay = String(design.per_day);

  const rand = design.randomization;
  if (typeof rand === "number") {
    state.randMode = "constant";
    state.randProb = String(rand);
  } else if ("csv_token" in rand) {
    state.randMode = "per_day";
    state.randToken = rand.csv_token;
  } else if (rand.mode === "constant") {
    state.randMode = "constant";
    state.randProb = String(rand.values);
  } else {
    state.randMode = rand.mode;
    state.randValues = rand.values;
  }

  state.availability = fieldsFromTrend(design.availability);
  state.effect = fieldsFromTrend(design.effect);
  state.alpha = String(inputs.alpha0 ?? 0.05);
  if ("target_power" in inputs) {
    state.outputMode = "samplesize";
    state.targetPower = String(inputs.target_power);
  } else {
    state.outputMode = "power";
    state.n = String(inputs.n);
  }
  return state;
}

function fieldsFromTrend(body: TrendBody): TrendFields {
  return {
    kind: body.kind,
    average: String(body.average),
    initial: body.initial !== undefined ? String(body.initial) : "",
    changingPoint: body.changing_point !== undefined ? String(body.changing_point) : "",
  };
}

/** Map a server field path (e.g. design.effect.changing_point) to the form
 * input that should carry the inline error. The trend-preview endpoint emits
 * bare paths (e.g. "changing_point") without the design prefix, so callers
 * that know which trend they previewed pass `previewRole` to anchor them. */
export function fieldPathToInputId(
  path: string, previewRole?: "availability" | "effect",
): string | null {
  if (previewRole) {
    const prefix = previewRole === "availability" ? "avail" : "effect";
    const bare: Record<string, string> = {
      kind: `${prefix}-kind`,
      average: `${prefix}-average`,
      initial: `${prefix}-initial`,
      changing_point: `${prefix}-changing-point`,
      availability: "avail-average",
      effect: "effect-average",
      days: "days",
    };
    if (path in bare) return bare[path];
  }
  const table: Record<string, string> = {
    "design.days": "days",
    "design.per_day": "per-day",
    "design.randomization": "rand-prob",
    "design.availability": "avail-average",
    "design.availability.kind": "avail-kind",
    "design.availability.average": "avail-average",
    "design.availability.initial": "avail-initial",
    "design.availability.changing_point": "avail-changing-point",
    "design.effect": "effect-average",
    "design.effect.kind": "effect-kind",
    "design.effect.average": "effect-average",
    "design.effect.initial": "effect-initial",
    "design.effect.changing_point": "effect-changing-point",
    "request.alpha0": "alpha",
    "request.target_power": "target-power",
    "request.n": "sample-size",
    "alpha0": "alpha",
    "target_power": "target-power",
    "n": "sample-size",
  };
  if (path in table) return table[path];
  if (path.startsWith("design.randomization")) return "rand-prob";
  return null;
}
