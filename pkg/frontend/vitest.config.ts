import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    environment: "node",
    // The round-trip suite spawns the real backend service.
    testTimeout: 60_000,
    hookTimeout: 120_000,
  },
});
