/**
 * Line-delimited JSON objective protocol.
 *
 * Request:  {"id": <int>, "params": {<name>: <number|string>, ...}}
 * Response: {"id": <int>, "status": "ok"|"error", "objective": <float>, "message": <string>}
 *
 * One line per message, UTF-8, flushed after every write. The adapter
 * answers every request exactly once with a matching id; stdout carries
 * protocol lines only.
 */

export interface Request {
  id: number;
  params: Record<string, number | string>;
}

export interface Response {
  id: number;
  status: "ok" | "error";
  objective?: number;
  message?: string;
}

export function parseRequest(line: string): Request {
  let doc: unknown;
  try {
    doc = JSON.parse(line);
  } catch (err) {
    throw new Error(`request is not valid JSON: ${(err as Error).message}`);
  }
  if (typeof doc !== "object" || doc === null) {
    throw new Error("request must be a JSON object");
  }
  const { id, params } = doc as { id?: unknown; params?: unknown };
  if (typeof id !== "number" || !Number.isInteger(id)) {
    throw new Error("request must carry an integer 'id'");
  }
  if (typeof params !== "object" || params === null || Array.isArray(params)) {
    throw new Error("request must carry a 'params' object");
  }
  for (const [key, value] of Object.entries(params)) {
    if (typeof value !== "number" && typeof value !== "string") {
      throw new Error(`parameter ${key} must be a number or string`);
    }
  }
  return { id, params: params as Record<string, number | string> };
}

export function okResponse(id: number, objective: number): Response {
  return { id, status: "ok", objective };
}

export function errorResponse(id: number, message: string): Response {
  return { id, status: "error", message };
}

export function encodeResponse(response: Response): string {
  return JSON.stringify(response);
}
