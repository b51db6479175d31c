import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "node",
    hookTimeout: 90_000,
    testTimeout: 30_000,
  },
});
