import { createConsole } from "./console.js";

// Same-origin by default; set window.DRIVESEARCH_API for a split deployment.
declare global {
  interface Window {
    DRIVESEARCH_API?: string;
  }
}

document.addEventListener("DOMContentLoaded", () => {
  createConsole(document, window.DRIVESEARCH_API ?? "");
});
