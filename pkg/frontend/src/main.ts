import { ApiClient } from "./api.js";
import { GridApp } from "./ui.js";

const SERVICE_URL =
  new URLSearchParams(location.search).get("service") ??
  "http://localhost:8000";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");

const app = new GridApp(root, new ApiClient(SERVICE_URL));
void app.start();
