/** Display formatting. The UI does no arithmetic beyond what lives here,
 * and everything here is presentation: rounding for display and the
 * below-50% masking rule for power values. */

/** Power cells below 0.5 render as "<50%"; the calculator does not display
 * power less than 50%. */
export function formatPower(power: number): string {
  if (power < 0.5) return "<50%";
  return `${(power * 100).toFixed(1)}%`;
}

export function formatNumber(value: number, digits = 4): string {
  if (Number.isInteger(value)) return String(value);
  return value.toFixed(digits);
}

export function formatTimestamp(iso: string): string {
  const date = new Date(iso);
  if (Number.isNaN(date.getTime())) return iso;
  return date.toLocaleString();
}
