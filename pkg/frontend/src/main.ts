import { mountApp } from "./app.js";

const host = document.getElementById("app");
if (host) {
  const app = mountApp(host);
  app.openDialog();
}
