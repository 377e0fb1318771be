/** DOM wiring for the staged calculator. */
import {
  ApiError,
  downloadHistoryExport,
  fetchHistory,
  fetchTrendPreview,
  postPower,
  postSampleSize,
  uploadRandomizationCsv,
  type FieldError,
  type HistoryEntry,
  type PowerResult,
  type SampleSizeResult,
} from "./api.js";
import { formatNumber, formatPower, formatTimestamp } from "./format.js";
import {
  allValid,
  buildRequest,
  fieldPathToInputId,
  initialFormState,
  stateFromInputs,
  trendBody,
  validate,
  type FormState,
  type OutputMode,
  type RandMode,
  type TrendKind,
} from "./model.js";
import { plotModel, renderPlot } from "./plot.js";

const state: FormState = initialFormState();

const el = <T extends HTMLElement>(id: string): T => {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
};

const input = (id: string) => el<HTMLInputElement>(id);
const select = (id: string) => el<HTMLSelectElement>(id);

/* ---------------------------------------------------------------- errors */

function clearFieldErrors(): void {
  document.querySelectorAll<HTMLElement>(".field-error").forEach((node) => {
    node.textContent = "";
  });
  document.querySelectorAll("input.invalid").forEach((node) => {
    node.classList.remove("invalid");
  });
}

function showBanner(message: string): void {
  const banner = document.createElement("div");
  banner.className = "banner";
  const text = document.createElement("span");
  text.textContent = message;
  const close = document.createElement("button");
  close.textContent = "×";
  close.setAttribute("aria-label", "dismiss");
  close.addEventListener("click", () => banner.remove());
  banner.append(text, close);
  el("banners").append(banner);
}

/** Render server field errors inline at the offending inputs; anything that
 * cannot be anchored becomes a dismissible banner. */
function showServerErrors(error: ApiError, previewRole?: "availability" | "effect"): void {
  const fields: FieldError[] = error.payload.error.fields ?? [];
  let anchored = false;
  for (const field of fields) {
    const id = fieldPathToInputId(field.field, previewRole);
    const slot = id
      ? document.querySelector<HTMLElement>(`.field-error[data-for="${id}"]`)
      : null;
    if (id && slot) {
      slot.textContent = field.message;
      input(id).classList.add("invalid");
      anchored = true;
    } else {
      showBanner(`${field.field}: ${field.message}`);
    }
  }
  if (error.payload.error.code === "cap_exceeded") {
    const capInfo = error.payload.error;
    showBanner(
      `No sample size up to ${capInfo.cap} reaches the target power `
      + `(power at the cap: ${formatPower(capInfo.power_at_cap ?? 0)}).`,
    );
  } else if (!fields.length && !anchored) {
    showBanner(error.payload.error.message);
  }
}

/* ------------------------------------------------------------- previews */

let previewTimer: number | undefined;

function schedulePreviews(): void {
  window.clearTimeout(previewTimer);
  previewTimer = window.setTimeout(() => {
    void refreshPreview("availability");
    void refreshPreview("effect");
  }, 250);
}

async function refreshPreview(role: "availability" | "effect"): Promise<void> {
  const validity = validate(state);
  const figure = el(role === "effect" ? "effect-plot" : "avail-plot");
  const ok = role === "effect"
    ? validity.effect && validity.setup
    : validity.availability && validity.setup;
  if (!ok) {
    figure.innerHTML = "";
    return;
  }
  const fields = role === "effect" ? state.effect : state.availability;
  try {
    const preview = await fetchTrendPreview(trendBody(fields), Number(state.days), role);
    figure.innerHTML = renderPlot(plotModel(preview));
  } catch (error) {
    figure.innerHTML = "";
    if (error instanceof ApiError) showServerErrors(error, role);
    else showBanner(String(error));
  }
}

/* ------------------------------------------------------------ validation */

function refresh(): void {
  const validity = validate(state);
  el("section-setup").classList.toggle("valid", validity.setup);
  el("section-randomization").classList.toggle("valid", validity.randomization);
  el("section-availability").classList.toggle("valid", validity.availability);
  el("section-effect").classList.toggle("valid", validity.effect);
  el("section-output").classList.toggle("valid", validity.output);
  el<HTMLButtonElement>("submit").disabled = !allValid(validity);
}

function syncTrendVisibility(prefix: "avail" | "effect", kind: TrendKind): void {
  // each input's label wraps it, so toggling the parent hides the pair
  const initialLabel = el(`${prefix}-initial`).parentElement as HTMLElement;
  const changingLabel = el(`${prefix}-changing-point`).parentElement as HTMLElement;
  initialLabel.classList.toggle("hidden", kind === "constant");
  changingLabel.classList.toggle("hidden", kind !== "quadratic");
}

function syncRandVisibility(): void {
  const constant = state.randMode === "constant";
  el("rand-prob-label").classList.toggle("hidden", !constant);
  el("rand-upload").classList.toggle("hidden", constant);
}

function syncOutputVisibility(): void {
  const samplesize = state.outputMode === "samplesize";
  el("target-power-label").classList.toggle("hidden", !samplesize);
  el("sample-size-label").classList.toggle("hidden", samplesize);
}

/* ---------------------------------------------------------------- upload */

async function handleUpload(file: File): Promise<void> {
  clearFieldErrors();
  const mode = state.randMode === "per_day" ? "day" : "time";
  try {
    const result = await uploadRandomizationCsv(
      file, mode, Number(state.days), Number(state.perDay),
    );
    state.randToken = result.token;
    state.randValues = null;
    el("upload-preview").classList.remove("hidden");
    el("upload-summary").textContent =
      `${result.count} probabilities (${result.mode === "per_day" ? "per day" : "per decision time"}); `
      + `previewing the first ${result.preview.length}.`;
    const body = el("upload-table").querySelector("tbody")!;
    body.innerHTML = "";
    for (const row of result.preview) {
      const tr = document.createElement("tr");
      const index = document.createElement("td");
      index.textContent = String(row.index);
      const probability = document.createElement("td");
      probability.textContent = String(row.probability);
      tr.append(index, probability);
      body.append(tr);
    }
  } catch (error) {
    state.randToken = null;
    el("upload-preview").classList.add("hidden");
    if (error instanceof ApiError) showServerErrors(error);
    else showBanner(String(error));
  }
  refresh();
}

/* ---------------------------------------------------------------- result */

function renderResult(kind: "samplesize" | "power", result: SampleSizeResult | PowerResult): void {
  const panel = el("result");
  panel.classList.remove("hidden");
  panel.innerHTML = "";
  const headline = document.createElement("div");
  headline.className = "headline";
  const detail = document.createElement("div");
  if (kind === "samplesize") {
    const r = result as SampleSizeResult;
    headline.textContent = `Required sample size: ${r.n}`;
    detail.textContent = `Power at N=${r.n}: ${formatPower(r.power_at_n)}`;
    panel.append(headline, detail);
    for (const warning of r.warnings) {
      const note = document.createElement("div");
      note.className = "warning";
      note.textContent = warning.message;
      panel.append(note);
    }
  } else {
    const r = result as PowerResult;
    headline.textContent = `Power at N=${r.n}: ${formatPower(r.power)}`;
    panel.append(headline);
  }
}

/* --------------------------------------------------------------- history */

function historyPower(entry: HistoryEntry): number {
  return entry.kind === "samplesize"
    ? (entry.result as SampleSizeResult).power_at_n
    : (entry.result as PowerResult).power;
}

function historyResultCell(entry: HistoryEntry): string {
  return entry.kind === "samplesize"
    ? String((entry.result as SampleSizeResult).n)
    : formatPower((entry.result as PowerResult).power);
}

async function refreshHistory(): Promise<void> {
  let entries: HistoryEntry[];
  try {
    entries = await fetchHistory();
  } catch {
    return;
  }
  const body = el("history-table").querySelector("tbody")!;
  body.innerHTML = "";
  el("history-empty").classList.toggle("hidden", entries.length > 0);
  for (const entry of [...entries].reverse()) {
    const tr = document.createElement("tr");
    const design = entry.result.inputs.design;
    const cells = [
      historyResultCell(entry),
      entry.kind === "samplesize" ? "sample size" : "power",
      formatPower(historyPower(entry)),
      formatNumber(entry.result.inputs.alpha0 ?? 0.05, 3),
      String(design.days),
      String(design.per_day),
      formatTimestamp(entry.timestamp),
    ];
    for (const text of cells) {
      const td = document.createElement("td");
      td.textContent = text;
      tr.append(td);
    }
    const actions = document.createElement("td");
    const load = document.createElement("button");
    load.textContent = "Load";
    load.addEventListener("click", () => {
      loadState(stateFromInputs(entry.result.inputs));
    });
    actions.append(load);
    tr.append(actions);
    body.append(tr);
  }
}

/* ------------------------------------------------------------ form sync */

function loadState(next: FormState): void {
  Object.assign(state, next);
  input("days").value = state.days;
  input("per-day").value = state.perDay;
  select("rand-mode").value = state.randMode;
  input("rand-prob").value = state.randProb;
  select("avail-kind").value = state.availability.kind;
  input("avail-average").value = state.availability.average;
  input("avail-initial").value = state.availability.initial;
  input("avail-changing-point").value = state.availability.changingPoint;
  select("effect-kind").value = state.effect.kind;
  input("effect-average").value = state.effect.average;
  input("effect-initial").value = state.effect.initial;
  input("effect-changing-point").value = state.effect.changingPoint;
  select("output-mode").value = state.outputMode;
  input("alpha").value = state.alpha;
  input("target-power").value = state.targetPower;
  input("sample-size").value = state.n;
  syncRandVisibility();
  syncOutputVisibility();
  syncTrendVisibility("avail", state.availability.kind);
  syncTrendVisibility("effect", state.effect.kind);
  if (state.randValues) {
    el("upload-summary").textContent =
      `${state.randValues.length} probabilities loaded from history.`;
    el("upload-preview").classList.remove("hidden");
    el("upload-table").querySelector("tbody")!.innerHTML = "";
  }
  clearFieldErrors();
  refresh();
  schedulePreviews();
  window.scrollTo({ top: 0, behavior: "smooth" });
}

function bind(id: string, apply: (value: string) => void): void {
  input(id).addEventListener("input", (event) => {
    apply((event.target as HTMLInputElement).value);
    clearFieldErrors();
    refresh();
    schedulePreviews();
  });
}

/* ----------------------------------------------------------------- init */

function init(): void {
  bind("days", (v) => { state.days = v; });
  bind("per-day", (v) => { state.perDay = v; });
  bind("rand-prob", (v) => { state.randProb = v; });
  bind("avail-average", (v) => { state.availability.average = v; });
  bind("avail-initial", (v) => { state.availability.initial = v; });
  bind("avail-changing-point", (v) => { state.availability.changingPoint = v; });
  bind("effect-average", (v) => { state.effect.average = v; });
  bind("effect-initial", (v) => { state.effect.initial = v; });
  bind("effect-changing-point", (v) => { state.effect.changingPoint = v; });
  bind("alpha", (v) => { state.alpha = v; });
  bind("target-power", (v) => { state.targetPower = v; });
  bind("sample-size", (v) => { state.n = v; });

  select("rand-mode").addEventListener("change", (event) => {
    state.randMode = (event.target as HTMLSelectElement).value as RandMode;
    state.randToken = null;
    state.randValues = null;
    el("upload-preview").classList.add("hidden");
    syncRandVisibility();
    refresh();
  });
  select("avail-kind").addEventListener("change", (event) => {
    state.availability.kind = (event.target as HTMLSelectElement).value as TrendKind;
    syncTrendVisibility("avail", state.availability.kind);
    refresh();
    schedulePreviews();
  });
  select("effect-kind").addEventListener("change", (event) => {
    state.effect.kind = (event.target as HTMLSelectElement).value as TrendKind;
    syncTrendVisibility("effect", state.effect.kind);
    refresh();
    schedulePreviews();
  });
  select("output-mode").addEventListener("change", (event) => {
    state.outputMode = (event.target as HTMLSelectElement).value as OutputMode;
    syncOutputVisibility();
    refresh();
  });

  el("rand-file").addEventListener("change", (event) => {
    const file = (event.target as HTMLInputElement).files?.[0];
    if (file) void handleUpload(file);
  });

  el<HTMLButtonElement>("submit").addEventListener("click", async () => {
    clearFieldErrors();
    const request = buildRequest(state);
    try {
      if (state.outputMode === "samplesize") {
        renderResult("samplesize", await postSampleSize(request as never));
      } else {
        renderResult("power", await postPower(request as never));
      }
      await refreshHistory();
    } catch (error) {
      el("result").classList.add("hidden");
      if (error instanceof ApiError) showServerErrors(error);
      else showBanner(String(error));
    }
  });

  el("export-csv").addEventListener("click", () => {
    void downloadHistoryExport("csv").catch((error) => showBanner(String(error)));
  });
  el("export-json").addEventListener("click", () => {
    void downloadHistoryExport("json").catch((error) => showBanner(String(error)));
  });

  loadState(state);
  void refreshHistory();
}

init();
