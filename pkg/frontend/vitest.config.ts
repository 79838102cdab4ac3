import { defineConfig } from 'vitest/config';

export default defineConfig({
  test: {
    environment: 'node',
    globalSetup: ['./globalSetup.ts'],
    testTimeout: 30_000,
    hookTimeout: 90_000,
  },
});
