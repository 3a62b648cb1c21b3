/** Adapter configuration: a command template plus an extraction rule. */

import { readFileSync } from "fs";

export interface AdapterConfig {
  /** Command template; `{name}` placeholders are replaced per request. */
  command: string;
  /** Regex with exactly one capture group matching the objective float. */
  extract: RegExp;
  /** Wrapped-command timeout in milliseconds. */
  timeoutMs: number;
}

function captureGroupCount(source: string): number {
  // appending an empty alternative makes the regex match "", exposing
  // one array slot per capture group
  const probe = new RegExp(`${source}|`);
  const match = probe.exec("");
  return match === null ? 0 : match.length - 1;
}

export function loadConfig(path: string): AdapterConfig {
  let doc: unknown;
  try {
    doc = JSON.parse(readFileSync(path, "utf-8"));
  } catch (err) {
    throw new Error(`cannot read config ${path}: ${(err as Error).message}`);
  }
  if (typeof doc !== "object" || doc === null) {
    throw new Error(`${path}: config must be a JSON object`);
  }
  const { command, extract, timeout_ms } = doc as {
    command?: unknown;
    extract?: unknown;
    timeout_ms?: unknown;
  };
  if (typeof command !== "string" || command.trim() === "") {
    throw new Error(`${path}: 'command' must be a non-empty string`);
  }
  if (typeof extract !== "string") {
    throw new Error(`${path}: 'extract' must be a regular-expression string`);
  }
  let extractRe: RegExp;
  try {
    extractRe = new RegExp(extract);
  } catch (err) {
    throw new Error(`${path}: invalid 'extract' regex: ${(err as Error).message}`);
  }
  const groups = captureGroupCount(extract);
  if (groups !== 1) {
    throw new Error(`${path}: 'extract' must have exactly one capture group, found ${groups}`);
  }
  if (timeout_ms !== undefined && (typeof timeout_ms !== "number" || timeout_ms <= 0)) {
    throw new Error(`${path}: 'timeout_ms' must be a positive number`);
  }
  return { command, extract: extractRe, timeoutMs: timeout_ms ?? 600_000 };
}

/** Substitute `{name}` placeholders and split into argv tokens. */
export function renderCommand(
  template: string,
  params: Record<string, number | string>,
): string[] {
  const tokens = template.split(/\s+/).filter((t) => t.length > 0);
  return tokens.map((token) =>
    token.replace(/\{([A-Za-z_][A-Za-z0-9_]*)\}/g, (_whole, name: string) => {
      if (!(name in params)) {
        throw new Error(`request is missing parameter '${name}' used by the command template`);
      }
      return String(params[name]);
    }),
  );
}
