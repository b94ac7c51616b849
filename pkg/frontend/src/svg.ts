export type Attrs = Record<string, string | number>;

function renderAttrs(attrs: Attrs): string {
  return Object.entries(attrs)
    .map(([k, v]) => ` ${k}="${v}"`)
    .join("");
}

export function el(tag: string, attrs: Attrs, children: string[] = []): string {
  const body = children.join("");
  return body.length > 0
    ? `<${tag}${renderAttrs(attrs)}>${body}</${tag}>`
    : `<${tag}${renderAttrs(attrs)}/>`;
}

export function text(content: string, attrs: Attrs): string {
  return `<text${renderAttrs(attrs)}>${escapeXml(content)}</text>`;
}

export function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function document(width: number, height: number, children: string[]): string {
  const open =
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}"` +
    ` viewBox="0 0 ${width} ${height}">`;
  return [open, ...children, "</svg>", ""].join("\n");
}

export function round2(v: number): number {
  return Math.round(v * 100) / 100;
}

export const PALETTE = ["#3466a5", "#c24f38", "#4b9457", "#8458a5", "#b08a2e", "#4d868f"];
