/**
 * The serve loop: one wrapped-command run per request, strictly serial.
 *
 * Failures of any kind (unparseable request, missing parameter, nonzero
 * exit, timeout, no extraction match) produce an "error" response and
 * the loop keeps serving. Diagnostics go to stderr only.
 */

import { execFile } from "child_process";
import { createInterface } from "readline";
import type { Readable, Writable } from "stream";

import { AdapterConfig, renderCommand } from "./config.js";
import { encodeResponse, errorResponse, okResponse, parseRequest, Response } from "./protocol.js";

interface RunResult {
  code: number | null;
  output: string;
}

function runCommand(argv: string[], timeoutMs: number): Promise<RunResult> {
  return new Promise((resolve, reject) => {
    const [file, ...args] = argv;
    execFile(
      file,
      args,
      { timeout: timeoutMs, maxBuffer: 64 * 1024 * 1024 },
      (err, stdout, stderr) => {
        const output = `${stdout}\n${stderr}`;
        if (err === null) {
          resolve({ code: 0, output });
        } else if ("code" in err && (typeof err.code === "number" || err.code === null)) {
          // command started but failed or was killed (timeout)
          const killed = (err as { killed?: boolean }).killed === true;
          if (killed) {
            reject(new Error(`wrapped command exceeded ${timeoutMs} ms`));
          } else {
            resolve({ code: err.code as number | null, output });
          }
        } else {
          reject(new Error(`cannot run ${file}: ${err.message}`));
        }
      },
    );
  });
}

export async function handleRequest(line: string, config: AdapterConfig): Promise<Response> {
  let id = -1;
  try {
    const request = parseRequest(line);
    id = request.id;
    const argv = renderCommand(config.command, request.params);
    const result = await runCommand(argv, config.timeoutMs);
    if (result.code !== 0) {
      return errorResponse(id, `wrapped command exited with code ${result.code}`);
    }
    const match = config.extract.exec(result.output);
    if (match === null || match[1] === undefined) {
      return errorResponse(id, "extraction rule matched nothing in the command output");
    }
    const objective = Number.parseFloat(match[1]);
    if (!Number.isFinite(objective)) {
      return errorResponse(id, `extracted value ${match[1]!} is not a finite number`);
    }
    return okResponse(id, objective);
  } catch (err) {
    return errorResponse(id, (err as Error).message);
  }
}

export async function serve(
  config: AdapterConfig,
  input: Readable,
  output: Writable,
  diagnostics: Writable = process.stderr,
): Promise<void> {
  const lines = createInterface({ input, crlfDelay: Infinity });
  for await (const line of lines) {
    if (line.trim() === "") {
      continue;
    }
    const response = await handleRequest(line, config);
    output.write(encodeResponse(response) + "\n");
    if (response.status === "error") {
      diagnostics.write(`[objective-adapter] request ${response.id}: ${response.message}\n`);
    }
  }
}
