/** SVG trend plots.
 *
 * Effect previews draw a three-series comparison plot: the null
 * hypothesis line in blue at zero, the specified average effect in black,
 * and the alternative (the elicited day curve) in red. Availability
 * previews draw only the curve, on a fixed [0, 1] axis. All series values
 * come from the service's /v1/trend/preview response; this module only maps
 * them to pixels.
 */
import type { TrendPreview } from "./api.js";

export interface Series {
  label: string;
  color: string;
  values: number[];
}

export interface PlotModel {
  days: number[];
  series: Series[];
  yMin: number;
  yMax: number;
  yLabel: string;
}

export const NULL_COLOR = "#1f4fd8";
export const AVERAGE_COLOR = "#111111";
export const ALTERNATIVE_COLOR = "#d82c1f";

/** Build the plot model from a preview response (pure; unit-testable). */
export function plotModel(preview: TrendPreview): PlotModel {
  if (preview.role === "availability") {
    return {
      days: preview.days,
      series: [{ label: "availability", color: AVERAGE_COLOR, values: preview.alternative }],
      yMin: 0,
      yMax: 1,
      yLabel: "expected availability",
    };
  }
  const all = [...preview.null, ...preview.average, ...preview.alternative];
  const top = Math.max(...all);
  const bottom = Math.min(...all);
  const pad = (top - bottom || 1) * 0.1;
  return {
    days: preview.days,
    series: [
      { label: "null", color: NULL_COLOR, values: preview.null },
      { label: "average", color: AVERAGE_COLOR, values: preview.average },
      { label: "alternative", color: ALTERNATIVE_COLOR, values: preview.alternative },
    ],
    yMin: Math.min(0, bottom) - pad,
    yMax: top + pad,
    yLabel: "standardized effect",
  };
}

const WIDTH = 460;
const HEIGHT = 220;
const MARGIN = { left: 46, right: 12, top: 10, bottom: 28 };

export function polylinePoints(
  days: number[], values: number[], yMin: number, yMax: number,
): string {
  const innerW = WIDTH - MARGIN.left - MARGIN.right;
  const innerH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const dayMin = days[0];
  const daySpan = days[days.length - 1] - dayMin || 1;
  const ySpan = yMax - yMin || 1;
  return days
    .map((day, i) => {
      const x = MARGIN.left + ((day - dayMin) / daySpan) * innerW;
      const y = MARGIN.top + (1 - (values[i] - yMin) / ySpan) * innerH;
      return `${x.toFixed(1)},${y.toFixed(1)}`;
    })
    .join(" ");
}

function axisTicks(yMin: number, yMax: number): number[] {
  const ticks: number[] = [];
  for (let i = 0; i <= 4; i++) ticks.push(yMin + ((yMax - yMin) * i) / 4);
  return ticks;
}

/** Render the model to an SVG string. */
export function renderPlot(model: PlotModel): string {
  const innerW = WIDTH - MARGIN.left - MARGIN.right;
  const parts: string[] = [];
  parts.push(
    `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img" class="trend-plot">`,
  );
  for (const tick of axisTicks(model.yMin, model.yMax)) {
    const y = MARGIN.top
      + (1 - (tick - model.yMin) / (model.yMax - model.yMin || 1))
        * (HEIGHT - MARGIN.top - MARGIN.bottom);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y.toFixed(1)}" `
      + `x2="${MARGIN.left + innerW}" y2="${y.toFixed(1)}" class="grid"/>`,
      `<text x="${MARGIN.left - 6}" y="${(y + 3).toFixed(1)}" `
      + `class="tick" text-anchor="end">${tick.toFixed(2)}</text>`,
    );
  }
  for (const series of model.series) {
    parts.push(
      `<polyline fill="none" stroke="${series.color}" stroke-width="2" `
      + `points="${polylinePoints(model.days, series.values, model.yMin, model.yMax)}"/>`,
    );
  }
  const labelX = MARGIN.left;
  let labelOffset = 0;
  for (const series of model.series) {
    if (model.series.length === 1) break;
    parts.push(
      `<rect x="${labelX + labelOffset}" y="${HEIGHT - 12}" width="10" height="3" fill="${series.color}"/>`,
      `<text x="${labelX + labelOffset + 14}" y="${HEIGHT - 7}" class="tick">${series.label}</text>`,
    );
    labelOffset += 14 + series.label.length * 7 + 18;
  }
  parts.push(
    `<text x="${MARGIN.left + innerW / 2}" y="${HEIGHT - 7}" class="tick" `
    + `text-anchor="middle">${model.series.length === 1 ? "day" : ""}</text>`,
    "</svg>",
  );
  return parts.join("");
}
