import { defineConfig } from 'vitest/config';

export default defineConfig({
  test: {
    include: ['tests/**/*.test.ts'],
    // the live-gateway suite spawns a server and drives real HTTP
    testTimeout: 30_000,
    hookTimeout: 60_000,
  },
});
