export function quantile(sorted: number[], p: number): number {
  const n = sorted.length;
  if (n === 0) return NaN;
  const idx = p * (n - 1);
  const lo = Math.floor(idx);
  const hi = Math.ceil(idx);
  const w = idx - lo;
  return sorted[lo] * (1 - w) + sorted[hi] * w;
}

export function median(values: number[]): number {
  return quantile([...values].sort((a, b) => a - b), 0.5);
}

function stddev(values: number[]): number {
  const n = values.length;
  const mean = values.reduce((s, v) => s + v, 0) / n;
  return Math.sqrt(values.reduce((s, v) => s + (v - mean) ** 2, 0) / Math.max(1, n - 1));
}

/** Gaussian kernel density on a fixed grid; Silverman bandwidth with a
 * floor so constant samples still draw as a slim violin. */
export function kernelDensity(
  values: number[],
  gridMin: number,
  gridMax: number,
  gridSize = 80
): { x: number[]; density: number[] } {
  const n = values.length;
  const sd = stddev(values);
  const span = gridMax - gridMin;
  const bw = Math.max(1.06 * sd * Math.pow(n, -0.2), span / 200, 1e-9);
  const x: number[] = [];
  const density: number[] = [];
  for (let i = 0; i < gridSize; i++) {
    const g = gridMin + (span * i) / (gridSize - 1);
    let acc = 0;
    for (const v of values) {
      const z = (g - v) / bw;
      acc += Math.exp(-0.5 * z * z);
    }
    x.push(g);
    density.push(acc / (n * bw * Math.sqrt(2 * Math.PI)));
  }
  return { x, density };
}

export function log10(v: number): number {
  return Math.log10(v);
}
