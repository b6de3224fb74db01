import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "jsdom",
    // the round-trip test drives a real server-backed run
    testTimeout: 180_000,
    hookTimeout: 60_000,
  },
});
