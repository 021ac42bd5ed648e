// Starts a real gradecase service for the test run.
//
// A throwaway data directory is seeded with the bundled sample base, the
// service is spawned on a random port, and its URL is handed to the tests
// through GRADECASE_URL.  Teardown stops the process and removes the data.

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

async function waitForHealth(url: string, proc: ChildProcess): Promise<void> {
  for (let attempt = 0; attempt < 150; attempt += 1) {
    if (proc.exitCode !== null) {
      throw new Error(`gradecase serve exited early with code ${proc.exitCode}`);
    }
    try {
      const response = await fetch(`${url}/health`);
      if (response.ok) {
        return;
      }
    } catch {
      // Not listening yet.
    }
    await sleep(200);
  }
  throw new Error(`gradecase serve never became healthy at ${url}`);
}

function waitForExit(proc: ChildProcess, timeoutMs: number): Promise<void> {
  return new Promise((resolve) => {
    if (proc.exitCode !== null) {
      resolve();
      return;
    }
    const timer = setTimeout(() => {
      proc.kill("SIGKILL");
      resolve();
    }, timeoutMs);
    proc.once("exit", () => {
      clearTimeout(timer);
      resolve();
    });
  });
}

export default async function setup(): Promise<() => Promise<void>> {
  const dataDir = mkdtempSync(join(tmpdir(), "gradecase-ui-"));
  const seeded = spawnSync("python3", ["-m", "gradecase.datasets", dataDir], {
    stdio: ["ignore", "ignore", "inherit"],
  });
  if (seeded.status !== 0) {
    rmSync(dataDir, { recursive: true, force: true });
    throw new Error("could not seed the test data directory with the sample base");
  }

  const port = 20000 + Math.floor(Math.random() * 9000);
  const url = `http://127.0.0.1:${port}`;
  const probe = spawnSync("gradecase", ["--help"], { stdio: "ignore" });
  const command =
    probe.status === 0 ? ["gradecase"] : ["python3", "-m", "gradecase.cli"];
  const proc = spawn(
    command[0] as string,
    [...command.slice(1), "serve", "--data", dataDir, "--host", "127.0.0.1", "--port", String(port)],
    { stdio: ["ignore", "ignore", "inherit"] },
  );

  try {
    await waitForHealth(url, proc);
  } catch (err) {
    proc.kill("SIGKILL");
    rmSync(dataDir, { recursive: true, force: true });
    throw err;
  }

  process.env.GRADECASE_URL = url;
  return async () => {
    proc.kill("SIGTERM");
    await waitForExit(proc, 5000);
    rmSync(dataDir, { recursive: true, force: true });
  };
}
