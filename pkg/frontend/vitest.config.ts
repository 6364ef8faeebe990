import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "happy-dom",
    environmentOptions: {
      happyDOM: {
        settings: {
          fetch: { disableSameOriginPolicy: true },
        },
      },
    },
    globals: true,
    include: ["test/**/*.test.ts"],
    testTimeout: 15000,
  },
});
