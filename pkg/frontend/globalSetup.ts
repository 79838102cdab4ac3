// Boots the analysis backend (mock provider, seeded fixtures) once for the
// whole test run and records its address for the e2e tests.

import { spawn, spawnSync, type ChildProcess } from 'node:child_process';
import { mkdtempSync, writeFileSync, rmSync } from 'node:fs';
import { createServer } from 'node:net';
import { tmpdir } from 'node:os';
import { join } from 'node:path';

export const ENV_FILE = join(process.cwd(), '.e2e-env.json');

const PYTHON = process.env.BLOCKAID_PYTHON ?? 'python3';

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const server = createServer();
    server.listen(0, '127.0.0.1', () => {
      const address = server.address();
      if (address && typeof address === 'object') {
        const port = address.port;
        server.close(() => resolve(port));
      } else {
        reject(new Error('no port'));
      }
    });
  });
}

async function waitForHealth(baseUrl: string, child: ChildProcess, logs: string[]): Promise<void> {
  const deadline = Date.now() + 30_000;
  while (Date.now() < deadline) {
    if (child.exitCode !== null) {
      throw new Error(`backend exited early (${child.exitCode}):\n${logs.join('')}`);
    }
    try {
      const response = await fetch(`${baseUrl}/health`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error(`backend never became healthy:\n${logs.join('')}`);
}

export default async function setup(): Promise<() => Promise<void>> {
  const dataDir = mkdtempSync(join(tmpdir(), 'blockaid-panel-'));

  const seeded = spawnSync(PYTHON, [join('scripts', 'seed_fixtures.py'), dataDir], {
    cwd: process.cwd(),
    encoding: 'utf-8',
  });
  if (seeded.status !== 0) {
    throw new Error(`fixture seeding failed:\n${seeded.stdout}\n${seeded.stderr}`);
  }
  const issueId = seeded.stdout.trim().split('\n').pop() ?? '';

  const port = await freePort();
  const baseUrl = `http://127.0.0.1:${port}`;
  const logs: string[] = [];
  const child = spawn(
    PYTHON,
    ['-m', 'blockaid.cli', 'serve', '--port', String(port), '--config', join(dataDir, 'server.toml')],
    { cwd: process.cwd(), stdio: ['ignore', 'pipe', 'pipe'] },
  );
  child.stdout?.on('data', (chunk) => logs.push(String(chunk)));
  child.stderr?.on('data', (chunk) => logs.push(String(chunk)));

  await waitForHealth(baseUrl, child, logs);

  writeFileSync(
    ENV_FILE,
    JSON.stringify({ baseUrl, sb3Path: join(dataDir, 'boat.sb3'), issueId }),
    'utf-8',
  );

  return async () => {
    child.kill('SIGTERM');
    await new Promise<void>((resolve) => {
      const timer = setTimeout(() => {
        child.kill('SIGKILL');
        resolve();
      }, 5_000);
      child.once('exit', () => {
        clearTimeout(timer);
        resolve();
      });
    });
    rmSync(ENV_FILE, { force: true });
    rmSync(dataDir, { recursive: true, force: true });
  };
}
