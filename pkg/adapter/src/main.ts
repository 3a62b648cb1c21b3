#!/usr/bin/env node
/** CLI entry: `objective-adapter --config adapter.json` serves on stdio. */

import { serve } from "./adapter.js";
import { loadConfig } from "./config.js";

function usage(): never {
  process.stderr.write("usage: objective-adapter --config <file.json>\n");
  process.exit(2);
}

function main(): void {
  const args = process.argv.slice(2);
  let configPath: string | undefined;
  for (let i = 0; i < args.length; i++) {
    if (args[i] === "--config") {
      configPath = args[++i];
    } else if (args[i] === "--help" || args[i] === "-h") {
      usage();
    } else {
      process.stderr.write(`unknown argument: ${args[i]}\n`);
      usage();
    }
  }
  if (configPath === undefined) {
    usage();
  }

  let config;
  try {
    config = loadConfig(configPath);
  } catch (err) {
    process.stderr.write(`${(err as Error).message}\n`);
    process.exit(2);
  }

  serve(config, process.stdin, process.stdout).catch((err) => {
    process.stderr.write(`[objective-adapter] fatal: ${(err as Error).message}\n`);
    process.exit(1);
  });
}

main();
