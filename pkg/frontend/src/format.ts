// Numbers are rounded for display only; the raw server value rides along in
// the tooltip so nothing is lost.

export function displayNumber(value: number | null, digits = 4): string {
  if (value === null || !isFinite(value)) return "—";
  return value.toFixed(digits);
}

export function rawTooltip(value: number | null): string {
  return value === null ? "undefined (imputed by the model)" : String(value);
}

export function displayPercent(value: number | null): string {
  if (value === null || !isFinite(value)) return "—";
  return `${(100 * value).toFixed(1)}%`;
}
