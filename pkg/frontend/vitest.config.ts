import { defineConfig } from 'vitest/config';

export default defineConfig({
  test: {
    environment: 'node',
    include: ['tests/**/*.test.ts'],
    testTimeout: 60_000, // the e2e suite boots the real Python service
    hookTimeout: 60_000,
  },
});
