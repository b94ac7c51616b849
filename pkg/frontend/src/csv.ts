export interface ReportRow {
  model: string;
  engine: string;
  N: number;
  t: number;
  mse: number;
  variance: number;
  gain: number;
}

export const REPORT_COLUMNS = ["model", "engine", "N", "t", "mse", "variance", "gain"];

export class SchemaError extends Error {}

export function parseReportCsv(text: string): ReportRow[] {
  const lines = text.split(/\r?\n/).filter((l) => l.trim().length > 0);
  if (lines.length === 0) {
    throw new SchemaError("empty CSV");
  }
  const header = lines[0].split(",").map((h) => h.trim());
  for (const col of REPORT_COLUMNS) {
    if (!header.includes(col)) {
      throw new SchemaError(`missing column: ${col}`);
    }
  }
  const idx = new Map(header.map((h, i) => [h, i] as const));
  const num = (cells: string[], col: string): number => {
    const raw = cells[idx.get(col)!];
    return raw === undefined || raw === "" ? NaN : Number(raw);
  };
  return lines.slice(1).map((line) => {
    const cells = line.split(",").map((c) => c.trim());
    return {
      model: cells[idx.get("model")!] ?? "",
      engine: cells[idx.get("engine")!] ?? "",
      N: num(cells, "N"),
      t: num(cells, "t"),
      mse: num(cells, "mse"),
      variance: num(cells, "variance"),
      gain: num(cells, "gain"),
    };
  });
}
