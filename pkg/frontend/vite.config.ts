import react from "@vitejs/plugin-react";
import { defineConfig } from "vite";

// the dev server proxies /api to the engine service so the browser stays
// same-origin; point SERVICE_URL elsewhere to explore a remote sweep store
export default defineConfig({
  plugins: [react()],
  server: {
    proxy: {
      "/api": {
        target: process.env.SERVICE_URL ?? "http://127.0.0.1:8710",
        changeOrigin: true,
        rewrite: (path) => path.replace(/^\/api/, ""),
      },
    },
  },
});
