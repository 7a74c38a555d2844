/** Color helpers: a fixed class palette and a perceptually uniform colormap. */

export const CLASS_PALETTE = [
  "#4477aa", "#ee6677", "#228833", "#ccbb44",
  "#66ccee", "#aa3377", "#bbbbbb", "#e07b39",
  "#44aa99", "#882255",
];

export function classColor(cls: number): string {
  return CLASS_PALETTE[((cls % CLASS_PALETTE.length) + CLASS_PALETTE.length)
    % CLASS_PALETTE.length] as string;
}

// viridis control points, sampled evenly; linear interpolation in between
const VIRIDIS: [number, number, number][] = [
  [68, 1, 84], [71, 24, 106], [72, 40, 120], [69, 55, 129],
  [64, 70, 136], [57, 85, 140], [51, 99, 141], [45, 112, 142],
  [40, 125, 142], [35, 138, 141], [31, 150, 139], [32, 163, 134],
  [41, 175, 127], [60, 187, 117], [86, 198, 103], [116, 208, 85],
  [149, 216, 64], [184, 222, 41], [220, 227, 25], [253, 231, 37],
];

/** Map t in [0, 1] to a CSS color; brighter means larger t. */
export function viridis(t: number): string {
  const clamped = Math.min(1, Math.max(0, t));
  const pos = clamped * (VIRIDIS.length - 1);
  const lo = Math.floor(pos);
  const hi = Math.min(lo + 1, VIRIDIS.length - 1);
  const frac = pos - lo;
  const a = VIRIDIS[lo] as [number, number, number];
  const b = VIRIDIS[hi] as [number, number, number];
  const mix = (i: 0 | 1 | 2) => Math.round(a[i] + (b[i] - a[i]) * frac);
  return `rgb(${mix(0)},${mix(1)},${mix(2)})`;
}
