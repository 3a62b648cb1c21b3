import { spawn, ChildProcess } from "child_process";
import { mkdtempSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join, resolve } from "path";
import { createInterface, Interface } from "readline";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { handleRequest } from "../src/adapter";
import { loadConfig, renderCommand } from "../src/config";
import { parseRequest } from "../src/protocol";

const ROOT = resolve(__dirname, "..");
const MAIN = join(ROOT, "dist", "main.js");

let fixtures: string;

function writeFixtures(): string {
  const dir = mkdtempSync(join(tmpdir(), "adapter-test-"));
  writeFileSync(
    join(dir, "echo.mjs"),
    `const i = process.argv.indexOf("--x");
console.log("starting up");
console.log("score=" + process.argv[i + 1]);
`,
  );
  writeFileSync(
    join(dir, "flaky.mjs"),
    `const x = Number(process.argv[process.argv.indexOf("--x") + 1]);
if (x < 0.5) { console.error("refusing left half"); process.exit(1); }
console.log("score=" + (x - 0.7) * (x - 0.7));
`,
  );
  writeFileSync(
    join(dir, "echo-config.json"),
    JSON.stringify({
      command: `node ${join(dir, "echo.mjs")} --x {x}`,
      extract: "score=([0-9.eE+-]+)",
      timeout_ms: 30000,
    }),
  );
  writeFileSync(
    join(dir, "flaky-config.json"),
    JSON.stringify({
      command: `node ${join(dir, "flaky.mjs")} --x {x}`,
      extract: "score=([0-9.eE+-]+)",
      timeout_ms: 30000,
    }),
  );
  return dir;
}

class AdapterClient {
  proc: ChildProcess;
  lines: Interface;
  pending: string[] = [];
  waiters: ((line: string) => void)[] = [];

  constructor(configPath: string) {
    this.proc = spawn("node", [MAIN, "--config", configPath], {
      stdio: ["pipe", "pipe", "ignore"],
    });
    this.lines = createInterface({ input: this.proc.stdout! });
    this.lines.on("line", (line) => {
      const waiter = this.waiters.shift();
      if (waiter) waiter(line);
      else this.pending.push(line);
    });
  }

  send(doc: unknown): void {
    this.proc.stdin!.write(JSON.stringify(doc) + "\n");
  }

  sendRaw(line: string): void {
    this.proc.stdin!.write(line + "\n");
  }

  nextLine(timeoutMs = 15000): Promise<string> {
    const queued = this.pending.shift();
    if (queued !== undefined) return Promise.resolve(queued);
    return new Promise((resolvePromise, rejectPromise) => {
      const timer = setTimeout(
        () => rejectPromise(new Error("timed out waiting for adapter response")),
        timeoutMs,
      );
      this.waiters.push((line) => {
        clearTimeout(timer);
        resolvePromise(line);
      });
    });
  }

  async request(doc: unknown): Promise<any> {
    this.send(doc);
    return JSON.parse(await this.nextLine());
  }

  close(): void {
    this.proc.stdin!.end();
    this.proc.kill();
  }
}

beforeAll(() => {
  fixtures = writeFixtures();
});

describe("config", () => {
  it("accepts a single-capture-group extraction rule", () => {
    const config = loadConfig(join(fixtures, "echo-config.json"));
    expect(config.extract.source).toContain("score=");
    expect(config.timeoutMs).toBe(30000);
  });

  it("rejects rules without exactly one capture group", () => {
    const bad = join(fixtures, "bad-config.json");
    writeFileSync(bad, JSON.stringify({ command: "node x.mjs", extract: "score=[0-9.]+" }));
    expect(() => loadConfig(bad)).toThrow(/capture group/);
    writeFileSync(
      bad,
      JSON.stringify({ command: "node x.mjs", extract: "(a)=(b)" }),
    );
    expect(() => loadConfig(bad)).toThrow(/capture group/);
  });

  it("substitutes placeholders token by token", () => {
    const argv = renderCommand("node run.mjs --lr {lr} --units {units}", {
      lr: 0.05,
      units: 32,
    });
    expect(argv).toEqual(["node", "run.mjs", "--lr", "0.05", "--units", "32"]);
  });

  it("reports missing parameters", () => {
    expect(() => renderCommand("node run.mjs --lr {lr}", {})).toThrow(/missing parameter 'lr'/);
  });
});

describe("protocol", () => {
  it("parses well-formed requests", () => {
    expect(parseRequest('{"id": 3, "params": {"x": 0.5}}')).toEqual({
      id: 3,
      params: { x: 0.5 },
    });
  });

  it("rejects non-integer ids and missing params", () => {
    expect(() => parseRequest('{"id": "a", "params": {}}')).toThrow(/integer 'id'/);
    expect(() => parseRequest('{"id": 1}')).toThrow(/params/);
  });
});

describe("handleRequest", () => {
  it("extracts the objective from command output", async () => {
    const config = loadConfig(join(fixtures, "echo-config.json"));
    const response = await handleRequest('{"id": 5, "params": {"x": 0.125}}', config);
    expect(response).toEqual({ id: 5, status: "ok", objective: 0.125 });
  });

  it("answers errors for failing commands with the request id", async () => {
    const config = loadConfig(join(fixtures, "flaky-config.json"));
    const response = await handleRequest('{"id": 8, "params": {"x": 0.1}}', config);
    expect(response.id).toBe(8);
    expect(response.status).toBe("error");
    expect(response.message).toMatch(/exited with code 1/);
  });
});

describe("serve loop over stdio", () => {
  let client: AdapterClient;

  afterAll(() => client?.close());

  it("round-trips 100 requests with matching ids and extracted objectives", async () => {
    client = new AdapterClient(join(fixtures, "echo-config.json"));
    for (let i = 0; i < 100; i++) {
      const x = (i % 17) / 16;
      const response = await client.request({ id: i, params: { x } });
      expect(response.id).toBe(i);
      expect(response.status).toBe("ok");
      expect(response.objective).toBeCloseTo(x, 10);
    }
  }, 120000);

  it("stays alive through malformed requests and command failures", async () => {
    const flaky = new AdapterClient(join(fixtures, "flaky-config.json"));
    try {
      const bad = await (async () => {
        flaky.sendRaw("this is not json");
        return JSON.parse(await flaky.nextLine());
      })();
      expect(bad.status).toBe("error");

      const failing = await flaky.request({ id: 1, params: { x: 0.2 } });
      expect(failing).toMatchObject({ id: 1, status: "error" });

      const fine = await flaky.request({ id: 2, params: { x: 0.9 } });
      expect(fine.status).toBe("ok");
      expect(fine.objective).toBeCloseTo(0.04, 6);
    } finally {
      flaky.close();
    }
  }, 60000);

  it("writes only protocol lines to stdout", async () => {
    const pure = new AdapterClient(join(fixtures, "echo-config.json"));
    try {
      const outputs: any[] = [];
      for (let i = 0; i < 5; i++) {
        outputs.push(await pure.request({ id: i, params: { x: 0.5 } }));
      }
      for (const doc of outputs) {
        expect(doc).toHaveProperty("id");
        expect(doc).toHaveProperty("status");
      }
    } finally {
      pure.close();
    }
  }, 60000);
});
